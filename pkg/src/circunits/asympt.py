"""Universal co-norms, KN estimates and checks of the cohomology predictions.

Everything here is p-primary.  The thresholds beyond which the
predictions hold (the levels where universal norms and co-norms settle)
have no effective bound; reports carry the observed stabilization flags
instead, and a failure seen while those flags are down is classified
EXPECTED-BELOW-THRESHOLD rather than FAIL.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import exactla as la
from .abfield import (
    AbelianField,
    inertia_decomposition,
    layer,
    splitting_data,
    tower_constants,
)
from .errors import CircUnitsError, InvalidInput, Unresolved
from .exactla import FiniteAbelianGroup
from .galmod import (
    CYC,
    SINNOTT,
    WASHINGTON,
    build_module,
    chain_source,
    extension_matrix,
    norm_chain,
    universal_norms,
)
from .tatecoh import CyclicAction, TateGroups, cyclic_action, tate_of_action

PASS = "PASS"
FAIL = "FAIL"
UNRESOLVED = "UNRESOLVED"
BELOW = "EXPECTED-BELOW-THRESHOLD"
ANOMALOUS = "ANOMALOUS"

TRIVIAL = FiniteAbelianGroup(())


def _g(orders) -> FiniteAbelianGroup:
    return FiniteAbelianGroup.from_orders(orders)


def _check(F: AbelianField, p: int) -> None:
    if not F.totally_real:
        raise InvalidInput(f"{F} is not totally real")
    if p % 2 == 0:
        raise InvalidInput("p must be odd")


# -- Phi ----------------------------------------------------------------------------


@dataclass
class PhiReport:
    field: str
    p: int
    n: int
    m_used: int
    kind: str
    free_rank: int
    torsion: FiniteAbelianGroup
    stabilized: bool
    predicted_rank: int
    quotients: list = field(default_factory=list)

    @property
    def status(self) -> str:
        if self.stabilized and self.free_rank != self.predicted_rank:
            return ANOMALOUS
        return "OK" if self.stabilized else "UNSTABILIZED"

    def quotient_by(self, k: int) -> FiniteAbelianGroup:
        """Phi / p^k Phi."""
        return _g([self.p**k] * self.free_rank).direct_sum(self.torsion.cotorsion(self.p**k))

    def torsion_by(self, k: int) -> FiniteAbelianGroup:
        """Phi[p^k]; the free part contributes nothing."""
        return self.torsion.torsion(self.p**k)

    def to_dict(self) -> dict:
        return {
            "field": self.field, "p": self.p, "n": self.n, "m_used": self.m_used,
            "kind": self.kind, "free_rank": self.free_rank,
            "torsion": self.torsion.to_list(), "stabilized": self.stabilized,
            "predicted_rank": self.predicted_rank, "status": self.status,
            "norm_quotients": self.quotients,
        }


def phi_report(F: AbelianField, p: int, n: int, m_max: int | None = None,
               kind: str = SINNOTT) -> PhiReport:
    """X_n modulo its universal-norm proxy, for X = C (SINNOTT) or W (WASHINGTON)."""
    _check(F, p)
    if kind not in (SINNOTT, WASHINGTON):
        raise InvalidInput(f"Phi is defined for SINNOTT or WASHINGTON, not {kind}")
    m_max = n + 2 if m_max is None else m_max
    chain = norm_chain(F, p, n, m_max, kind)
    pred = splitting_data(layer(F, p, n), p).s_plus - 1
    return PhiReport(str(F), p, n, m_max, kind, chain.free_rank, chain.torsion,
                     chain.stabilized, pred, chain.quotients)


# -- KN -----------------------------------------------------------------------------


@dataclass
class KNEstimate:
    field: str
    p: int
    n: int
    pairs: dict  # m -> H^0(G_{m,n}, universal norms at m), p-primary
    inferred: dict  # m -> estimate of KN[p^(m-n)]
    consistent: bool
    stabilized: bool

    @property
    def kn(self) -> FiniteAbelianGroup:
        """Best estimate of KN itself: the group read at the largest m."""
        if not self.inferred:
            return TRIVIAL
        return self.inferred[max(self.inferred)]

    def to_dict(self) -> dict:
        return {
            "field": self.field, "p": self.p, "n": self.n,
            "pairs": {str(m): g.to_list() for m, g in sorted(self.pairs.items())},
            "inferred": {str(m): g.to_list() for m, g in sorted(self.inferred.items())},
            "kn": self.kn.to_list(), "consistent": self.consistent,
            "stabilized": self.stabilized,
        }


def universal_norm_lattice(F: AbelianField, p: int, m: int, kind: str = SINNOTT, depth: int = 2):
    return universal_norms(F, p, m, m + depth, kind)


def _tate_on(L, F: AbelianField, p: int, n: int) -> TateGroups:
    return tate_of_action(cyclic_action(L, layer(F, p, n))).p_part(p)


def kn_estimate(F: AbelianField, p: int, n: int, m_list) -> KNEstimate:
    """Read KN[p^(m-n)] off H^0(G_{m,n}, C~_m) for each m and compare the readings."""
    _check(F, p)
    m_list = sorted(set(m_list))
    if any(m <= n for m in m_list):
        raise InvalidInput("every m must exceed n")
    pairs, stab = {}, True
    for m in m_list:
        Ct, ok = universal_norm_lattice(F, p, m)
        stab &= ok
        pairs[m] = _tate_on(Ct, F, p, n).h0
    inferred = dict(pairs)
    consistent = stab
    for m in m_list:
        for m2 in m_list:
            if m < m2 and pairs[m2].torsion(p ** (m - n)) != pairs[m]:
                consistent = False
    return KNEstimate(str(F), p, n, pairs, inferred, consistent, stab)


# -- theorem checks -------------------------------------------------------------------


@dataclass
class Claim:
    id: str
    predicted: object
    computed: object
    verdict: str
    caveats: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"id": self.id, "predicted": _plain(self.predicted),
                "computed": _plain(self.computed), "verdict": self.verdict,
                "caveats": list(self.caveats)}


def _plain(x):
    if isinstance(x, FiniteAbelianGroup):
        return x.to_list()
    if isinstance(x, dict):
        return {k: _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    return x


@dataclass
class TheoremReport:
    field: str
    p: int
    n: int
    m: int
    claims: list

    @property
    def ok(self) -> bool:
        return all(c.verdict in (PASS, BELOW) for c in self.claims)

    @property
    def unresolved(self) -> bool:
        return any(c.verdict == UNRESOLVED for c in self.claims)

    def claim(self, cid: str) -> Claim:
        return next(c for c in self.claims if c.id == cid)

    def to_dict(self) -> dict:
        return {"field": self.field, "p": self.p, "n": self.n, "m": self.m,
                "claims": [c.to_dict() for c in self.claims]}


def _verdict(ok: bool, settled: bool) -> str:
    if ok:
        return PASS
    return FAIL if settled else BELOW


def verify_predictions(F: AbelianField, p: int, n: int, m: int) -> TheoremReport:
    """Check the cohomology predictions for G_{m,n} at exact invariant factors."""
    _check(F, p)
    if not 0 <= n <= m:
        raise InvalidInput("need 0 <= n <= m")
    k = m - n
    pk = p**k
    tc = tower_constants(F, p)
    s_plus = splitting_data(layer(F, p, m), p).s_plus
    claims = []

    def run(cid, fn):
        try:
            claims.append(fn())
        except Unresolved as e:
            claims.append(Claim(cid, None, None, UNRESOLVED, [str(e)]))

    def caveats(*flags):
        out = [name for name, ok in flags if not ok]
        if n < tc.n_d:
            out.append(f"n below n_d = {tc.n_d}")
        return out

    def settled(cav):
        return not cav

    # (a) universal norms of Washington units
    def claim_a():
        Wt, ok = universal_norm_lattice(F, p, m, WASHINGTON)
        T = _tate_on(Wt, F, p, n)
        pred = {"h0": TRIVIAL, "h_minus1": _g([pk] * s_plus) if k else TRIVIAL}
        comp = {"h0": T.h0, "h_minus1": T.h_minus1}
        cav = caveats(("W~_m stabilized", ok))
        return Claim("a", pred, comp, _verdict(pred == comp, settled(cav)), cav)

    kn_box = {}

    def kn():
        if "kn" not in kn_box:
            kn_box["kn"] = kn_estimate(F, p, n, range(n + 1, max(m, n + 1) + 1)) if k else None
        return kn_box["kn"]

    # (b) universal norms of Sinnott units
    def claim_b():
        Ct, ok = universal_norm_lattice(F, p, m, SINNOTT)
        T = _tate_on(Ct, F, p, n)
        est = kn()
        KN = est.kn if est else TRIVIAL
        pred_h0 = KN.torsion(pk)
        pred_order = KN.cotorsion(pk).order * pk**s_plus if k else 1
        comp = {"h0": T.h0, "h_minus1": T.h_minus1, "h_minus1_order": T.h_minus1.order}
        pred = {"h0": pred_h0, "h_minus1_order": pred_order}
        good = T.h0 == pred_h0 and T.h_minus1.order == pred_order
        if KN.is_trivial():
            pred["h_minus1"] = _g([pk] * s_plus) if k else TRIVIAL
            good = good and T.h_minus1 == pred["h_minus1"]
        cav = caveats(("C~_m stabilized", ok), ("KN chain consistent", est is None or est.consistent))
        return Claim("b", pred, comp, _verdict(good, settled(cav)), cav)

    # (c) Sinnott units
    def claim_c():
        phi = phi_report(F, p, n)
        Ct, ok = universal_norm_lattice(F, p, m, SINNOTT)
        Tt = _tate_on(Ct, F, p, n)
        T = _tate_on(chain_source(F, p, m, SINNOTT), F, p, n)
        est = kn()
        KN = est.kn if est else TRIVIAL
        q = phi.quotient_by(k)
        pred = {"h0_order": KN.torsion(pk).order * q.order,
                "h1_order": Tt.h_minus1.order * phi.torsion_by(k).order}
        comp = {"h0": T.h0, "h_minus1": T.h_minus1,
                "h0_order": T.h0.order, "h1_order": T.h_minus1.order}
        good = comp["h0_order"] == pred["h0_order"] and comp["h1_order"] == pred["h1_order"]
        if KN.is_trivial():
            pred["h0"] = q
            good = good and T.h0 == q
            if phi.torsion_by(k).is_trivial():
                pred["h_minus1"] = Tt.h_minus1
                good = good and T.h_minus1 == Tt.h_minus1
        cav = caveats(("Phi stabilized", phi.stabilized), ("C~_m stabilized", ok),
                      ("KN chain consistent", est is None or est.consistent))
        return Claim("c", pred, comp, _verdict(good, settled(cav)), cav)

    # (d) Washington units
    def claim_d():
        phiw = phi_report(F, p, n, kind=WASHINGTON)
        T = _tate_on(chain_source(F, p, m, WASHINGTON), F, p, n)
        q = phiw.quotient_by(k)
        h1_order = (pk**s_plus if k else 1) * phiw.torsion_by(k).order
        pred = {"h0": q, "h1_order": h1_order}
        comp = {"h0": T.h0, "h_minus1": T.h_minus1, "h1_order": T.h_minus1.order}
        good = T.h0 == q and T.h_minus1.order == h1_order
        if phiw.torsion_by(k).is_trivial():
            pred["h_minus1"] = _g([pk] * s_plus) if k else TRIVIAL
            good = good and T.h_minus1 == pred["h_minus1"]
        cav = caveats(("PhiW stabilized", phiw.stabilized))
        return Claim("d", pred, comp, _verdict(good, settled(cav)), cav)

    # (e) C_n = C~_n C(I_n), p-locally
    def claim_e():
        ok, stab, detail = cond2_identity(F, p, n)
        cav = caveats(("C~_n stabilized", stab))
        return Claim("e", True, {"equal": ok, **detail}, _verdict(ok, settled(cav)), cav)

    run("a", claim_a)
    run("b", claim_b)
    run("c", claim_c)
    run("d", claim_d)
    run("e", claim_e)
    return TheoremReport(str(F), p, n, m, claims)


def cond2_identity(F: AbelianField, p: int, n: int, depth: int = 2):
    """Whether C_n = C~_n C(I_n) after localizing at p.

    Returns (equal, stabilized, detail) with the ranks of the three lattices.
    """
    Xn = chain_source(F, p, n, SINNOTT)
    Ct, stab = universal_norm_lattice(F, p, n, SINNOTT, depth)
    I, _, _ = inertia_decomposition(layer(F, p, n), p)
    XI = build_module(I, SINNOTT, p)
    r = Xn.rank
    if r == 0:
        return True, stab, {"rank": 0, "universal_rank": 0, "inertia_rank": XI.rank}
    E = extension_matrix(XI, Xn) if XI.rank else la.fmpz_mat(0, r)
    Y = la.coordinates(Xn.basis, Ct.basis) if Ct.rank else la.fmpz_mat(0, r)
    gens = la.vstack([M for M in (Y, E) if M.nrows()], r)
    ok = la.p_index_equal(gens, la.identity(r), p)
    return ok, stab, {"rank": r, "universal_rank": Ct.rank, "inertia_rank": XI.rank}


# -- torsion of Phi via the inertia field -------------------------------------------------


@dataclass
class InertiaTorsion:
    group: FiniteAbelianGroup
    inertia_field: str
    frobenius: int
    order: int
    caveats: list

    def to_dict(self) -> dict:
        return {"group": self.group.to_list(), "inertia_field": self.inertia_field,
                "frobenius": self.frobenius, "order": self.order, "caveats": self.caveats}


def tor_phi_inertia(F: AbelianField, p: int, m: int, *, certify: bool = True) -> InertiaTorsion:
    """H^-1 of <sigma_p> on Cyc of the inertia field of F_m, p-primary part."""
    _check(F, p)
    Fm = layer(F, p, m)
    I, _, sigma = inertia_decomposition(Fm, p)
    X = build_module(I, CYC, p)
    q = I.element_order(sigma.residue)
    A = CyclicAction(X.matrix(sigma.residue), q, X, sigma.residue)
    T = tate_of_action(A).p_part(p)
    cav = []
    if splitting_data(F, p).e != 1:
        cav.append("p ramifies in F")
    if certify:
        try:
            est = kn_estimate(F, p, 0, [1, 2])
            if not (est.consistent and est.kn.is_trivial()):
                cav.append("KN not certified trivial")
        except CircUnitsError as e:
            cav.append(f"KN estimate failed: {e}")
    else:
        cav.append("KN not checked")
    return InertiaTorsion(T.h_minus1, str(I), sigma.residue, q, cav)
