"""Command-line driver.

    circunits field-info --f 7 --gens 6 --p 3 --n 1
    circunits build      --f 91 --gens 2,17 --p 3 --n 1 --kind SINNOTT
    circunits cohomology --f 7 --gens 6 --p 3 --n 0 --m 1 --kind UNIV_NORM_W
    circunits phi        --f 91 --gens 3,8 --p 3 --n 0
    circunits kn         --f 7 --gens 6 --p 3 --n 0 --m 1,2
    circunits verify     --f 7 --gens 6 --p 3 --n 0 --m 1

Exit status: 0 on success (for ``verify``: every claim PASS or
EXPECTED-BELOW-THRESHOLD), 1 when a claim FAILs, 2 when something stays
UNRESOLVED, 64 on a usage error.  Reports are cached under
$CIRCUNITS_CACHE (default ~/.cache/circunits) unless --no-cache is given.
"""

from __future__ import annotations

import argparse
import fcntl
import hashlib
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__
from .abfield import (
    AbelianField,
    inertia_decomposition,
    layer,
    make_field,
    parse_field,
    splitting_data,
    tower_constants,
)
from .errors import CircUnitsError, InvalidInput, Unresolved

EXIT_OK, EXIT_FAIL, EXIT_UNRESOLVED, EXIT_USAGE = 0, 1, 2, 64
CACHE_ENV = "CIRCUNITS_CACHE"
TSV_COLUMNS = ("field", "p", "n", "m", "claim", "predicted", "computed", "verdict")
KINDS = ("CYC", "SINNOTT", "WASHINGTON", "UNIV_NORM_C", "UNIV_NORM_W")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    field: AbelianField
    p: int
    n: int = 0
    m: list = field(default_factory=list)
    m_max: int | None = None
    kind: str = "SINNOTT"
    precision: int = 192
    cache_dir: Path | None = None
    fmt: str = "json"
    generator: int | None = None

    def key(self) -> dict:
        return {"command": self.command, "field": str(self.field), "p": self.p, "n": self.n,
                "m": self.m, "m_max": self.m_max, "kind": self.kind,
                "precision": self.precision, "generator": self.generator,
                "version": __version__}


# -- parsing ------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="circunits", description="Circular units along cyclotomic Z_p-towers.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, need_m=False, m_list=False):
        sp.add_argument("--f", type=int, help="modulus of the field")
        sp.add_argument("--gens", type=_int_list, default=[],
                        help="generators of the subgroup of (Z/f)^x fixing the field")
        sp.add_argument("--field", help="canonical field string f:h1,h2,...")
        sp.add_argument("--p", type=int, required=True)
        sp.add_argument("--n", type=int, default=0)
        if m_list:
            sp.add_argument("--m", type=_int_list, required=need_m)
        else:
            sp.add_argument("--m", type=int, required=need_m)
        sp.add_argument("--m-max", type=int, dest="m_max")
        sp.add_argument("--kind", choices=KINDS, default="SINNOTT")
        sp.add_argument("--precision", type=int, default=192,
                        help="starting precision in bits for the lattice-reduction cross-check")
        sp.add_argument("--format", choices=("json", "tsv"), default="json", dest="fmt")
        sp.add_argument("--cache-dir", type=Path)
        sp.add_argument("--no-cache", action="store_true")
        sp.add_argument("--generator", type=int, help="residue of the generator of G_{m,n}")
        sp.add_argument("--output", type=Path, help="write the report here as well")

    common(sub.add_parser("field-info", help="degree, conductor, splitting and tower data"))
    common(sub.add_parser("build", help="a Galois lattice at level n"))
    common(sub.add_parser("cohomology", help="Tate groups of G_{m,n} on a lattice"), need_m=True)
    common(sub.add_parser("phi", help="universal co-norms at level n"))
    common(sub.add_parser("kn", help="KN estimates from universal norms"), need_m=True, m_list=True)
    common(sub.add_parser("verify", help="check the cohomology predictions"), need_m=True)
    return ap


def _field_of(args) -> AbelianField:
    if args.field:
        if args.f is not None or args.gens:
            raise UsageError("give either --field or --f/--gens, not both")
        return parse_field(args.field)
    if args.f is None:
        raise UsageError("a field is required (--f with --gens, or --field)")
    if args.f < 1:
        raise UsageError("--f must be positive")
    return make_field(args.f, args.gens)


def config_from_args(args) -> RunConfig:
    try:
        F = _field_of(args)
    except InvalidInput as e:
        raise UsageError(str(e))
    if args.p < 3 or args.p % 2 == 0:
        raise UsageError("--p must be an odd prime")
    if args.n < 0:
        raise UsageError("--n must be nonnegative")
    m = args.m if isinstance(args.m, list) else ([] if args.m is None else [args.m])
    if any(x < args.n for x in m):
        raise UsageError("need n <= m")
    if args.command == "kn" and any(x == args.n for x in m):
        raise UsageError("kn needs every m > n")
    if args.m_max is not None and args.m_max < args.n + 2:
        raise UsageError("--m-max must be at least n + 2")
    if args.no_cache:
        cache = None
    else:
        cache = args.cache_dir or Path(os.environ.get(CACHE_ENV, Path.home() / ".cache" / "circunits"))
    return RunConfig(args.command, F, args.p, args.n, m, args.m_max, args.kind,
                     args.precision, cache, args.fmt, args.generator)


# -- cache --------------------------------------------------------------------------------


def _cache_path(cfg: RunConfig) -> Path:
    blob = json.dumps(cfg.key(), sort_keys=True).encode()
    h = hashlib.sha256(blob).hexdigest()[:24]
    safe = str(cfg.field).replace(":", "_").replace(",", "-")[:60]
    return cfg.cache_dir / f"{cfg.command}-{safe}-{h}.json"


def cache_load(cfg: RunConfig):
    if cfg.cache_dir is None:
        return None
    path = _cache_path(cfg)
    try:
        data = json.loads(path.read_text())
    except (OSError, ValueError):
        return None
    if data.get("key") != cfg.key():
        return None  # stale version or hash collision
    return data["report"], data["status"]


def cache_store(cfg: RunConfig, report: dict, status: int) -> None:
    if cfg.cache_dir is None or status == EXIT_UNRESOLVED:
        return
    cfg.cache_dir.mkdir(parents=True, exist_ok=True)
    path = _cache_path(cfg)
    lock = path.with_suffix(".lock")
    with open(lock, "w") as lf:
        fcntl.flock(lf, fcntl.LOCK_EX)
        tmp = path.with_suffix(f".tmp{os.getpid()}")
        tmp.write_text(_dumps({"key": cfg.key(), "report": report, "status": status}))
        os.replace(tmp, path)


# -- commands ------------------------------------------------------------------------------


def cmd_field_info(cfg: RunConfig):
    F, p = cfg.field, cfg.p
    sd = splitting_data(F, p)
    tc = tower_constants(F, p)
    levels = []
    for n in range(cfg.n + 1):
        Fn = layer(F, p, n)
        I, D, sigma = inertia_decomposition(Fn, p)
        levels.append({"level": n, "field": str(Fn), "degree": Fn.degree,
                       "conductor": Fn.conductor, "inertia_field": str(I),
                       "decomposition_field": str(D), "frobenius": sigma.residue,
                       "s_plus": splitting_data(Fn, p).s_plus})
    I0, _, sigma0 = inertia_decomposition(F, p)
    report = {
        "field": str(F), "degree": F.degree, "conductor": F.conductor,
        "rational": F.degree == 1, "totally_real": F.totally_real, "p": p,
        "splitting": {"e": sd.e, "f": sd.f_res, "s": sd.s, "s_plus": sd.s_plus},
        "tower": {"n_d": tc.n_d, "n_i": tc.n_i, "offset": tc.e0},
        "frobenius_generates": I0 == F and sigma0.order == F.degree and F.degree > 1,
        "levels": levels,
    }
    return report, EXIT_OK


def _lattice(cfg: RunConfig, level: int):
    from .galmod import SINNOTT, UNIV_NORM_C, build_layer, universal_norms

    if cfg.kind.startswith("UNIV_NORM"):
        base = SINNOTT if cfg.kind == UNIV_NORM_C else "WASHINGTON"
        m_max = cfg.m_max if cfg.m_max is not None and cfg.command != "cohomology" else level + 2
        L, _ = universal_norms(cfg.field, cfg.p, level, m_max, base)
        return L
    return build_layer(cfg.field, cfg.p, level, cfg.kind)


def lattice_json(L) -> dict:
    from .exactla import to_lists

    amb = L.ambient
    return {
        "field": str(L.field), "kind": L.kind, "rank": L.rank,
        "ambient_field": str(amb.K),
        "generators": [[s.d, s.a] for s in amb.gens],
        "action": {str(a): to_lists(M) for a, M in sorted(L.action.items())},
        "witnesses": to_lists(L.witnesses),
        "basis_hnf": to_lists(L.basis),
        "stabilized": L.stabilized,
    }


def cmd_build(cfg: RunConfig):
    from .cycnum import PrecisionPolicy, relation_lattice
    from .exactla import same_lattice, saturate

    L = _lattice(cfg, cfg.n)
    report = lattice_json(L)
    amb = L.ambient
    if cfg.kind == "CYC" and amb.gens:
        # independent cross-check of the relation span by lattice reduction
        RL = relation_lattice(amb.gens, PrecisionPolicy(initial_bits=cfg.precision))
        k = len(amb.gens)
        dense = [[row.get(j, 0) for j in range(k)] for row in amb.seeds]
        seeds = saturate(dense, k) if dense else None
        agree = (RL.rank == 0 and seeds is None) or (seeds is not None and same_lattice(RL.relations, seeds))
        report["lll_cross_check"] = {"agree": agree, "precision_history": RL.history}
        if not agree:
            return report, EXIT_FAIL
    return report, EXIT_OK


def cmd_cohomology(cfg: RunConfig):
    from .tatecoh import cyclic_action, tate_of_action

    m = cfg.m[0]
    L = _lattice(cfg, m)
    A = cyclic_action(L, layer(cfg.field, cfg.p, cfg.n), cfg.generator)
    T = tate_of_action(A)
    Tp = T.p_part(cfg.p)
    report = {"field": str(cfg.field), "p": cfg.p, "n": cfg.n, "m": m, "kind": cfg.kind,
              "lattice_field": str(L.field), "rank": L.rank, "generator": A.generator,
              "order": A.q, "h0": T.h0.to_list(), "h_minus1": T.h_minus1.to_list(),
              "h0_p": Tp.h0.to_list(), "h_minus1_p": Tp.h_minus1.to_list(),
              "stabilized": L.stabilized}
    return report, EXIT_OK


def cmd_phi(cfg: RunConfig):
    from .asympt import phi_report

    kind = "WASHINGTON" if cfg.kind in ("WASHINGTON", "UNIV_NORM_W") else "SINNOTT"
    r = phi_report(cfg.field, cfg.p, cfg.n, cfg.m_max, kind)
    return r.to_dict(), EXIT_OK


def cmd_kn(cfg: RunConfig):
    from .asympt import kn_estimate

    r = kn_estimate(cfg.field, cfg.p, cfg.n, cfg.m)
    return r.to_dict(), EXIT_OK


def cmd_verify(cfg: RunConfig):
    from .asympt import verify_predictions

    r = verify_predictions(cfg.field, cfg.p, cfg.n, cfg.m[0])
    status = EXIT_OK
    if r.unresolved:
        status = EXIT_UNRESOLVED
    elif not r.ok:
        status = EXIT_FAIL
    return r.to_dict(), status


COMMANDS = {
    "field-info": cmd_field_info,
    "build": cmd_build,
    "cohomology": cmd_cohomology,
    "phi": cmd_phi,
    "kn": cmd_kn,
    "verify": cmd_verify,
}


# -- output ------------------------------------------------------------------------------


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _cell(x) -> str:
    if isinstance(x, (dict, list)):
        return json.dumps(x, sort_keys=True, separators=(",", ":"))
    return str(x)


def to_tsv(command: str, report: dict) -> str:
    if command == "verify":
        lines = ["\t".join(TSV_COLUMNS)]
        for c in report["claims"]:
            lines.append("\t".join(_cell(x) for x in (
                report["field"], report["p"], report["n"], report["m"],
                c["id"], c["predicted"], c["computed"], c["verdict"])))
        return "\n".join(lines) + "\n"
    return "".join(f"{k}\t{_cell(v)}\n" for k, v in sorted(report.items()))


def run(cfg: RunConfig) -> tuple[str, int]:
    cached = cache_load(cfg)
    if cached is not None:
        report, status = cached
    else:
        report, status = COMMANDS[cfg.command](cfg)
        cache_store(cfg, report, status)
    text = _dumps(report) if cfg.fmt == "json" else to_tsv(cfg.command, report)
    return text, status


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"circunits: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        text, status = run(cfg)
    except Unresolved as e:
        print(_dumps({"status": "UNRESOLVED", "message": str(e)}), end="")
        return EXIT_UNRESOLVED
    except InvalidInput as e:
        print(f"circunits: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CircUnitsError as e:
        print(f"circunits: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL
    sys.stdout.write(text)
    if args.output:
        args.output.write_text(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
