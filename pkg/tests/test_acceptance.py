"""Acceptance criteria, one check per criterion.

Run under pytest (lines appear in the terminal summary) or directly:

    python3 tests/test_acceptance.py
"""

import os
import subprocess
import sys
from pathlib import Path

import pytest

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

from conftest import ACCEPTANCE_LINES, cubic  # noqa: E402

from circunits.abfield import (  # noqa: E402
    cubic_fields_two_primes,
    layer,
    make_field,
    splitting_data,
)
from circunits.asympt import (  # noqa: E402
    TRIVIAL,
    cond2_identity,
    kn_estimate,
    phi_report,
    universal_norm_lattice,
    verify_predictions,
)
from circunits.exactla import FiniteAbelianGroup  # noqa: E402
from circunits.galmod import SINNOTT, WASHINGTON  # noqa: E402
from circunits.tatecoh import tate  # noqa: E402

P = 3
Z3 = FiniteAbelianGroup.from_orders([3])


def example_fields():
    F, D = cubic_fields_two_primes(7, 13)
    return {"7": make_field(7, [6]), "13": cubic(13), "F": F, "D": D}


def criterion_1():
    expected = {"7": (0, TRIVIAL), "13": (0, TRIVIAL), "F": (0, Z3), "D": (2, TRIVIAL)}
    ok, parts = True, []
    for name, K in example_fields().items():
        r = phi_report(K, P, 0)
        good = r.stabilized and (r.free_rank, r.torsion) == expected[name]
        ok &= good
        parts.append(f"{name}: rank {r.free_rank} tors {r.torsion}")
    return ok, "; ".join(parts)


def criterion_2():
    ok, parts = True, []
    for ell in (7, 13, 31, 43, 61):
        K = cubic(ell)
        s = splitting_data(K, P).s_plus
        if s != 1:
            # 3 splits here, so the field is outside the inert family
            parts.append(f"{ell}: 3 not inert (s+={s}), not in scope")
            continue
        r = phi_report(K, P, 0)
        good = r.stabilized and r.free_rank == 0 and r.torsion == TRIVIAL
        ok &= good
        parts.append(f"{ell}: {r.torsion}")
    two = 0
    for l1, l2 in ((7, 13), (7, 31), (13, 31), (7, 43)):
        K = cubic_fields_two_primes(l1, l2)[0]
        r = phi_report(K, P, 0)
        good = splitting_data(K, P).s_plus == 1 and r.stabilized and r.free_rank == 0 and r.torsion == Z3
        ok &= good
        two += good
        parts.append(f"{l1}*{l2}: {r.torsion}")
    return ok and two >= 2, "; ".join(parts)


def criterion_3():
    fs = example_fields()
    ok, parts = True, []
    for name in ("7", "F"):
        K = fs[name]
        for m in (1, 2):
            Wt, stab = universal_norm_lattice(K, P, m, WASHINGTON)
            T = tate(Wt, m, 0, p=P).p_part(P)
            s = splitting_data(layer(K, P, m), P).s_plus
            want = FiniteAbelianGroup.from_orders([P**m] * s)
            good = stab and T.h0 == TRIVIAL and T.h_minus1 == want
            ok &= good
            parts.append(f"{name} ({m},0): H0={T.h0} H-1={T.h_minus1}")
    return ok, "; ".join(parts)


def criterion_4():
    ok, parts = True, []
    for name, K in example_fields().items():
        Ct, stab = universal_norm_lattice(K, P, 1, SINNOTT)
        h0 = tate(Ct, 1, 0, p=P).p_part(P).h0
        est = kn_estimate(K, P, 0, [1, 2])
        good = stab and h0 == TRIVIAL and est.consistent and est.stabilized and est.kn == TRIVIAL
        ok &= good
        parts.append(f"{name}: H0={h0} consistent={est.consistent}")
    return ok, "; ".join(parts)


def criterion_5():
    F = example_fields()["F"]
    c = verify_predictions(F, P, 0, 1).claim("c")
    comp = c.computed
    good = (c.verdict == "PASS" and comp["h0_order"] == 3 and comp["h1_order"] == 9
            and comp["h0"] == Z3)
    return good, f"|H0|={comp['h0_order']} |H1|={comp['h1_order']} H0={comp['h0']} ({c.verdict})"


def criterion_6():
    ok, parts = True, []
    for name, K in example_fields().items():
        c = verify_predictions(K, P, 0, 1).claim("d")
        phiw = phi_report(K, P, 0, kind=WASHINGTON)
        good = c.verdict == "PASS" and c.computed["h0"] == phiw.quotient_by(1)
        ok &= good
        parts.append(f"{name}: H0={c.computed['h0']}")
    return ok, "; ".join(parts)


def criterion_7():
    fs = example_fields()
    ok, parts = True, []
    for name in ("7", "F"):
        for n in (0, 1):
            eq, stab, _ = cond2_identity(fs[name], P, n)
            ok &= bool(eq and stab)
            parts.append(f"{name} n={n}: {'equal' if eq else 'different'}")
    return ok, "; ".join(parts)


PROPERTY_SUITES = [
    "tests/test_exactla.py::test_snf_round_trip_property",
    "tests/test_exactla.py::test_quotient_matches_enumeration",
    "tests/test_cycnum.py::test_distribution_relation",
    "tests/test_galmod.py::test_norm_after_extension_is_power",
    "tests/test_galmod.py::test_unit_ranks",
    "tests/test_tatecoh.py::test_generator_independence_random",
    "tests/test_tatecoh.py::test_herbrand_invariant_on_sublattices",
    "tests/test_cycnum.py::test_relation_lattice_stable_under_doubling",
]


def criterion_8():
    root = HERE.parent
    out = subprocess.run([sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", *PROPERTY_SUITES],
                         cwd=root, capture_output=True, text=True, env=dict(os.environ))
    tail = out.stdout.strip().splitlines()[-1] if out.stdout.strip() else out.stderr.strip()[-200:]
    return out.returncode == 0, tail


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8]


def check(k):
    ok, detail = CRITERIA[k - 1]()
    line = f"CRITERION {k}: {'PASS' if ok else 'FAIL'} {detail}"
    print(line)
    return ok, line


@pytest.mark.parametrize("k", range(1, len(CRITERIA) + 1))
def test_criterion(k):
    ok, line = check(k)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


if __name__ == "__main__":
    results = [check(k)[0] for k in range(1, len(CRITERIA) + 1)]
    sys.exit(0 if all(results) else 1)
