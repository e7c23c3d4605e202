"""Circular numbers, their log embeddings, valuations and exact relations.

The symbol (d, a) over a target field K denotes the norm from Q(zeta_d) to
Q(zeta_d) ∩ K of 1 - zeta_d^a, i.e. the product of 1 - zeta_d^{ac} over the
image H_d of the subgroup of K in (Z/d)^x.  Values are tracked modulo {±1}
through their log vectors (one coordinate per embedding of K) and their
valuation vectors.

Exact checks of multiplicative relations run in Z[zeta_N] represented
multi-modularly: for primes q ≡ 1 mod N every prime of Z[zeta_N] above q is
an evaluation zeta_N -> omega^i.  A relation A = zeta B is certified once
the product of the primes used exceeds the largest conjugate of |A| + |B|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import gcd

import flint
import numpy as np

from . import kernels
from .abfield import (
    AbelianField,
    _lcm,
    _norm,
    divisors,
    prime_factors,
    units,
    valuation,
)
from .errors import InvalidInput, ResourceLimitError, Unresolved, Unsupported

PREC_FLOOR = 53


# -- symbols -------------------------------------------------------------------


@dataclass(frozen=True)
class CircSymbol:
    d: int
    a: int
    target: AbelianField

    def __str__(self) -> str:
        return f"N(d={self.d},a={self.a})@{self.target}"


class _Level:
    """Data attached to a pair (target K, d): H_d, orbit representatives, tables."""

    def __init__(self, target: AbelianField, d: int):
        self.target = target
        self.d = d
        self.H = tuple(sorted(target.image_mod(d)))
        reps, idx = [], np.full(d + 1, -1, dtype=np.int64)
        for x in units(d):
            if idx[x] >= 0:
                continue
            idx[[_norm(x * h, d) for h in self.H]] = len(reps)
            reps.append(x)
        idx[0] = idx[d]  # residue 0 only occurs for d = 1
        self.reps = tuple(reps)
        self.repidx = idx
        self.degree = len(reps)  # [K_d : Q]
        self._float = None
        self._arb: dict[int, list] = {}

    def rep(self, x: int) -> int:
        return self.reps[self.repidx[x % self.d]]

    def index(self, x: int) -> int:
        return int(self.repidx[x % self.d])

    @property
    def float_table(self) -> np.ndarray:
        """Natural log of |value| of (d, rep) at the identity embedding."""
        if self._float is None:
            d = self.d
            x = np.arange(d, dtype=np.float64)
            with np.errstate(divide="ignore"):
                T = np.log(2.0 * np.abs(np.sin(np.pi * x / d)))
            R = (np.asarray(self.reps, dtype=np.int64)[:, None] * np.asarray(self.H)[None, :]) % d
            self._float = T[R].sum(axis=1)
        return self._float

    def arb_table(self, prec: int) -> list:
        if prec not in self._arb:
            old = flint.ctx.prec
            flint.ctx.prec = prec + 32
            try:
                d = self.d
                T = {}
                for x in units(d):
                    T[x] = (2 * abs(flint.arb.sin_pi_fmpq(flint.fmpq(x, d)))).log()
                self._arb[prec] = [
                    sum((T[_norm(r * h, d)] for h in self.H), flint.arb(0)) for r in self.reps
                ]
            finally:
                flint.ctx.prec = old
        return self._arb[prec]


@lru_cache(maxsize=512)
def level(target: AbelianField, d: int) -> _Level:
    return _Level(target, d)


def make_symbol(d: int, a: int, target: AbelianField) -> CircSymbol:
    if d <= 1:
        raise InvalidInput("symbols need d > 1")
    if gcd(a, d) != 1:
        raise InvalidInput(f"{a} is not coprime to {d}")
    return CircSymbol(d, level(target, d).rep(a), target)


def _require_real(F: AbelianField) -> None:
    if not F.totally_real:
        raise Unsupported(f"field {F} is not totally real")


def circ_generators(F: AbelianField) -> list[CircSymbol]:
    """One symbol per element of each conjugate orbit, for every divisor d > 1 of f."""
    _require_real(F)
    out = []
    for d in divisors(F.conductor):
        if d > 1:
            out.extend(CircSymbol(d, b, F) for b in level(F, d).reps)
    return out


def support_moduli(F: AbelianField) -> list[int]:
    """f_S = prod_{l in S} l^{v_l(f)} for nonempty sets S of primes dividing f.

    Ordered by decreasing number of primes, then by value.
    """
    f = F.conductor
    ps = prime_factors(f)
    out = []
    for k in range(len(ps), 0, -1):
        ds = []
        for S in combinations(ps, k):
            ds.append(math.prod(q ** valuation(f, q) for q in S))
        out.extend(sorted(ds))
    return out


def reduced_generators(F: AbelianField) -> list[CircSymbol]:
    """Orbits of the symbols at the moduli f_S; these generate Cyc(F) as a group."""
    _require_real(F)
    out = []
    for d in support_moduli(F):
        out.extend(CircSymbol(d, b, F) for b in level(F, d).reps)
    return out


class SymbolIndex:
    """Position lookup for an ordered symbol list with a common target."""

    def __init__(self, gens: list[CircSymbol]):
        self.gens = list(gens)
        self.pos = {(s.d, s.a): i for i, s in enumerate(self.gens)}

    def __len__(self) -> int:
        return len(self.gens)

    def __getitem__(self, key) -> int:
        return self.pos[key]

    def of(self, d: int, a: int, target: AbelianField) -> int:
        return self.pos[(d, level(target, d).rep(a))]


# -- log embeddings ------------------------------------------------------------------


@dataclass(frozen=True)
class LogVector:
    coords: tuple
    abs_error: float
    precision_bits: int

    def floats(self) -> list[float]:
        return [float(c.mid()) for c in self.coords]


def embedding_lifts(target: AbelianField, d: int) -> np.ndarray:
    """For each embedding t of target, a residue mod d restricting to it."""
    f = target.modulus
    M = _lcm(f, d)
    out = []
    for t in target.coset_reps:
        u = t
        while gcd(u, M) != 1:
            u += f
        out.append(u % d)
    return np.asarray(out, dtype=np.int64)


def _check_prec(prec: int) -> None:
    if prec < PREC_FLOOR:
        raise InvalidInput(f"precision {prec} is below the floor of {PREC_FLOOR} bits")


def log_embedding(s: CircSymbol, prec: int = 128) -> LogVector:
    _check_prec(prec)
    L = level(s.target, s.d)
    tab = L.arb_table(prec)
    coords = tuple(tab[L.index(int(t) * s.a)] for t in embedding_lifts(s.target, s.d))
    err = max((float(c.rad()) for c in coords), default=0.0)
    return LogVector(coords, err, prec)


def log_matrix(gens: list[CircSymbol]) -> np.ndarray:
    """Float log vectors (rows) of symbols sharing a target."""
    if not gens:
        return np.zeros((0, 0))
    K = gens[0].target
    out = np.zeros((len(gens), K.degree))
    by_d: dict[int, list[int]] = {}
    for i, s in enumerate(gens):
        by_d.setdefault(s.d, []).append(i)
    for d, rows in by_d.items():
        L = level(K, d)
        lifts = embedding_lifts(K, d)
        a = np.asarray([gens[i].a for i in rows], dtype=np.int64)
        idx = L.repidx[(a[:, None] * lifts[None, :]) % d]
        out[rows] = L.float_table[idx]
    return out


def fixed_point_logs(gens: list[CircSymbol], prec: int, scale_bits: int) -> list[list[int]]:
    """round(2^scale_bits * log) for each symbol and embedding, from balls at prec bits."""
    out = []
    for s in gens:
        row = []
        for c in log_embedding(s, prec).coords:
            man, exp = c.mid().man_exp()
            man, exp = int(man), int(exp) + scale_bits
            row.append(man << exp if exp >= 0 else (man + (1 << (-exp - 1))) >> -exp)
        out.append(row)
    return out


# -- valuations -------------------------------------------------------------------


def valuation_primes(target: AbelianField, extra=()) -> list[int]:
    return sorted(set(prime_factors(target.conductor)) | set(extra))


def valuation_vector(s: CircSymbol) -> dict[int, int]:
    """v_l of the absolute norm of the symbol, for l | conductor of the target.

    The ideal of a prime-power symbol at l is a multiple of the Galois
    invariant product of the primes above l, so this determines the divisor.
    """
    primes = valuation_primes(s.target, prime_factors(s.d))
    out = dict.fromkeys(primes, 0)
    ps = prime_factors(s.d)
    if len(ps) == 1:
        out[ps[0]] = s.target.degree // level(s.target, s.d).degree
    return out


def valuation_matrix(gens: list[CircSymbol], primes: list[int]) -> list[list[int]]:
    rows = []
    for s in gens:
        v = valuation_vector(s)
        rows.append([v.get(q, 0) for q in primes])
    return rows


# -- exact verification ---------------------------------------------------------------


@dataclass(frozen=True)
class RootOfUnity:
    sign: int
    exponent: int
    order: int

    def __str__(self) -> str:
        return f"{'-' if self.sign < 0 else ''}zeta_{self.order}^{self.exponent}"


@dataclass(frozen=True)
class RelationCheck:
    holds: bool
    root: RootOfUnity | None = None
    primes_used: int = 0

    def __bool__(self) -> bool:
        return self.holds


@dataclass(frozen=True)
class Budget:
    max_modulus: int = 2_000_000
    max_work: float = 4e9  # symbol-factor evaluations per prime


DEFAULT_BUDGET = Budget()
_PRIME_CAP = (1 << 31) - 1


@lru_cache(maxsize=64)
def _primes_1_mod(N: int, count: int) -> tuple[int, ...]:
    out = []
    q = (_PRIME_CAP - 1) // N * N + 1
    while len(out) < count:
        if q <= N:
            raise ResourceLimitError(f"ran out of primes 1 mod {N} below 2^31")
        if flint.fmpz(q).is_prime():
            out.append(q)
        q -= N
    return tuple(out)


def _root_of_unity(N: int, q: int) -> int:
    ps = prime_factors(N)
    for x in range(2, q):
        w = pow(x, (q - 1) // N, q)
        if all(pow(w, N // ell, q) != 1 for ell in ps) and (N > 1 or w == 1):
            return w
    raise RuntimeError("no root of unity found")  # pragma: no cover


def _powers(w: int, N: int, q: int) -> np.ndarray:
    W = np.empty(N, dtype=np.int64)
    x = 1
    for k in range(N):
        W[k] = x
        x = x * w % q
    return W


def _sparse(rows) -> list[dict[int, int]]:
    out = []
    for r in rows:
        if isinstance(r, dict):
            out.append({int(i): int(e) for i, e in r.items() if e})
        else:
            out.append({i: int(e) for i, e in enumerate(r) if e})
    return out


class _EvalContext:
    """Shared evaluation data for a batch of relations among fixed symbols."""

    def __init__(self, gens: list[CircSymbol], used: set[int], budget: Budget):
        self.gens = gens
        self.used = sorted(used)
        N = 1
        for i in self.used:
            N = _lcm(N, gens[i].d)
        self.N = N
        if N > budget.max_modulus:
            raise ResourceLimitError(f"common cyclotomic modulus {N} exceeds budget")
        S = None
        seen = set()
        for i in self.used:
            s = gens[i]
            key = (s.target, s.d)
            if key in seen:
                continue
            seen.add(key)
            Hd = set(level(s.target, s.d).H)
            lift = {x for x in units(N) if _norm(x, s.d) in Hd}
            S = lift if S is None else S & lift
        S = S or {1}
        self.S = sorted(S)
        reps, mark = [], set()
        for x in units(N):
            if x in mark:
                continue
            reps.append(x)
            mark.update(_norm(x * s, N) for s in self.S)
        self.T = np.asarray(reps, dtype=np.int64)
        self.col = {i: k for k, i in enumerate(self.used)}
        X, off = [], [0]
        for i in self.used:
            s = gens[i]
            c = N // s.d
            X.extend(c * (s.a * h % s.d) for h in level(s.target, s.d).H)
            off.append(len(X))
        self.X = np.asarray(X, dtype=np.int64)
        self.off = np.asarray(off, dtype=np.int64)
        work = len(X) * len(self.T)
        if work > budget.max_work:
            raise ResourceLimitError(f"evaluation work {work:.3g} exceeds budget")
        # natural logs of |value| at each evaluation point
        self.logs = np.zeros((len(self.used), len(self.T)))
        for k, i in enumerate(self.used):
            s = gens[i]
            L = level(s.target, s.d)
            self.logs[k] = L.float_table[L.repidx[(s.a * self.T) % s.d]]

    def bound_bits(self, row: dict[int, int]) -> float:
        pos = np.zeros(len(self.T))
        neg = np.zeros(len(self.T))
        for i, e in row.items():
            if e > 0:
                pos += e * self.logs[self.col[i]]
            else:
                neg -= e * self.logs[self.col[i]]
        m = max(pos.max(initial=0.0), neg.max(initial=0.0))
        # log|A| + log|B| <= 1 + max; the 8 extra bits dominate float rounding
        return m / math.log(2) + 1 + 8

    def values(self, q: int) -> np.ndarray:
        w = _root_of_unity(self.N, q)
        self.W = _powers(w, self.N, q)
        return kernels.symbol_values(self.W, self.X, self.off, self.T, self.N, q)


def _verify_modular(gens, rows, budget: Budget) -> list[RelationCheck]:
    rows = _sparse(rows)
    used = set()
    for r in rows:
        used.update(r)
    results: list[RelationCheck | None] = [None] * len(rows)
    for k, r in enumerate(rows):
        if not r:
            results[k] = RelationCheck(True, RootOfUnity(1, 0, 1), 0)
    if not used:
        return results  # type: ignore[return-value]
    ctx = _EvalContext(gens, used, budget)
    N = ctx.N
    need = [ctx.bound_bits(r) if results[k] is None else 0.0 for k, r in enumerate(rows)]
    cand: list[tuple[int, int] | None] = [None] * len(rows)
    have = [0.0] * len(rows)
    nprimes = [0] * len(rows)
    todo = [k for k in range(len(rows)) if results[k] is None]
    count = 8
    qi = 0
    while todo:
        primes = _primes_1_mod(N, count)
        if qi >= len(primes):
            count *= 2
            continue
        q = primes[qi]
        qi += 1
        V = ctx.values(q)
        rowptr, idx, exps = [0], [], []
        for k in todo:
            for i, e in rows[k].items():
                idx.append(ctx.col[i])
                exps.append(e)
            rowptr.append(len(idx))
        P, Q = kernels.relation_products(
            V, np.asarray(rowptr, dtype=np.int64), np.asarray(idx, dtype=np.int64),
            np.asarray(exps, dtype=np.int64), q,
        )
        R = P * kernels.modinv(Q, q) % q
        lookup = {int(ctx.W[j]): (1, j) for j in range(N)}
        if N % 2:
            lookup.update({(q - int(ctx.W[j])) % q: (-1, j) for j in range(N)})
        still = []
        for t, k in enumerate(todo):
            r0 = int(R[t, 0])  # T[0] = 1
            c = lookup.get(r0)
            if c is None or (cand[k] is not None and cand[k] != c):
                results[k] = RelationCheck(False, None, nprimes[k] + 1)
                continue
            eps, j = c
            if any((j * (s - 1)) % N for s in ctx.S):
                results[k] = RelationCheck(False, None, nprimes[k] + 1)
                continue
            expect = ctx.W[(j * ctx.T) % N]
            if eps < 0:
                expect = (q - expect) % q
            if not np.array_equal(R[t], expect):
                results[k] = RelationCheck(False, None, nprimes[k] + 1)
                continue
            cand[k] = c
            nprimes[k] += 1
            have[k] += math.log2(q)
            if have[k] > need[k]:
                results[k] = RelationCheck(True, RootOfUnity(eps, j, N), nprimes[k])
            else:
                still.append(k)
        todo = still
    return results  # type: ignore[return-value]


def _verify_poly(gens, exps) -> RelationCheck:
    """Dense arithmetic in Z[x]/Phi_N; used for small N and as a test oracle."""
    row = _sparse([exps])[0]
    if not row:
        return RelationCheck(True, RootOfUnity(1, 0, 1), 0)
    N = 1
    for i in row:
        N = _lcm(N, gens[i].d)
    Phi = flint.fmpz_poly.cyclotomic(N)
    x = flint.fmpz_poly([0, 1])
    one = flint.fmpz_poly([1])

    def value(s: CircSymbol):
        v = one
        for h in level(s.target, s.d).H:
            e = N // s.d * (s.a * h % s.d)
            v = (v * (one - x**e)) % Phi
        return v

    A, B = one, one
    for i, e in row.items():
        v = value(gens[i])
        if e > 0:
            A = (A * v**e) % Phi
        else:
            B = (B * v ** (-e)) % Phi
    for j in range(N):
        xb = (x**j * B) % Phi
        if A == xb:
            return RelationCheck(True, RootOfUnity(1, j, N), 0)
        if N % 2 and A == -xb:
            return RelationCheck(True, RootOfUnity(-1, j, N), 0)
    return RelationCheck(False, None, 0)


def verify_relation_exact(gens, exps, method: str = "auto", budget: Budget = DEFAULT_BUDGET) -> RelationCheck:
    """Is prod gens_i^{exps_i} a root of unity?  Exact; see module docstring."""
    if len(gens) != len(exps):
        raise InvalidInput("length mismatch between symbols and exponents")
    if method == "poly":
        return _verify_poly(gens, exps)
    if method not in ("auto", "modular"):
        raise InvalidInput(f"unknown method {method!r}")
    return _verify_modular(gens, [exps], budget)[0]


def verify_relations(gens, rows, budget: Budget = DEFAULT_BUDGET) -> list[RelationCheck]:
    """Batch form of verify_relation_exact sharing one evaluation table."""
    return _verify_modular(gens, rows, budget)


# -- distribution relations --------------------------------------------------------------


def fiber(K: AbelianField, d_big: int, d_small: int, b: int) -> list[int]:
    """Orbit representatives at d_big restricting to the class of b at d_small."""
    Lb, Ls = level(K, d_big), level(K, d_small)
    rb = Ls.rep(b)
    return [x for x in Lb.reps if Ls.rep(x) == rb]


def distribution_relations(K: AbelianField, gens: list[CircSymbol]) -> list[dict[int, int]]:
    """Norm relations among the reduced generators of K.

    For S and l not in S the norm from K_{S+l} to K_S of eta_{S+l} is
    eta_S^{1 - sigma_l^{-1}}; for |S| >= 2 the full norm to Q is 1.
    """
    f = K.conductor
    ix = SymbolIndex(gens)
    ps = prime_factors(f)
    fS = {S: math.prod(q ** valuation(f, q) for q in S) for k in range(1, len(ps) + 1)
          for S in combinations(ps, k)}
    rows = []
    for S, d in fS.items():
        for ell in ps:
            if ell in S:
                continue
            S2 = tuple(sorted(S + (ell,)))
            d2 = fS[S2]
            inv = pow(ell, -1, d)
            for b in level(K, d).reps:
                row: dict[int, int] = {}
                for x in fiber(K, d2, d, b):
                    row[ix[(d2, x)]] = row.get(ix[(d2, x)], 0) + 1
                i0, i1 = ix[(d, b)], ix.of(d, b * inv, K)
                row[i0] = row.get(i0, 0) - 1
                row[i1] = row.get(i1, 0) + 1
                rows.append({i: e for i, e in row.items() if e})
        if len(S) >= 2:
            rows.append({ix[(d, b)]: 1 for b in level(K, d).reps})
    return [r for r in rows if r]


def reduction_rows(K: AbelianField, full: list[CircSymbol], reduced: list[CircSymbol]) -> list[dict[int, int]]:
    """Each full generator as a combination of reduced generators (same support norms)."""
    f = K.conductor
    ix = SymbolIndex(reduced)
    out = []
    for s in full:
        S = prime_factors(s.d)
        dS = math.prod(q ** valuation(f, q) for q in S)
        out.append({ix[(dS, x)]: 1 for x in fiber(K, dS, s.d, s.a)})
    return out


def same_support_relations(K: AbelianField, full: list[CircSymbol]) -> list[dict[int, int]]:
    """eta_d = N(eta_{f_S}) for every d | f with support S, as rows over ``full``."""
    f = K.conductor
    ix = SymbolIndex(full)
    rows = []
    for s in full:
        S = prime_factors(s.d)
        dS = math.prod(q ** valuation(f, q) for q in S)
        if dS == s.d:
            continue
        row = {ix[(dS, x)]: 1 for x in fiber(K, dS, s.d, s.a)}
        row[ix[(s.d, s.a)]] = -1
        rows.append(row)
    return rows


def dense(rows, n: int) -> list[list[int]]:
    out = []
    for r in rows:
        v = [0] * n
        for i, e in r.items():
            v[i] += e
        out.append(v)
    return out


def numeric_rank(M: np.ndarray, tol: float = 1e-6) -> tuple[int, float, float]:
    """(rank, smallest kept singular value, largest dropped singular value)."""
    if M.size == 0:
        return 0, math.inf, 0.0
    sv = np.linalg.svd(M, compute_uv=False)
    r = int((sv > tol).sum())
    kept = float(sv[r - 1]) if r else math.inf
    dropped = float(sv[r]) if r < len(sv) else 0.0
    return r, kept, dropped


def image_matrix(gens: list[CircSymbol]) -> np.ndarray:
    """[log vector | valuation vector] rows, the archimedean-plus-divisor image."""
    if not gens:
        return np.zeros((0, 0))
    K = gens[0].target
    primes = valuation_primes(K)
    return np.hstack([log_matrix(gens), np.asarray(valuation_matrix(gens, primes), dtype=float)])


# -- relation search by lattice reduction ------------------------------------------------


@dataclass(frozen=True)
class PrecisionPolicy:
    initial_bits: int = 192
    max_bits: int = 3072
    exponent_bound: int = 1 << 20


@dataclass
class RelationLattice:
    gens: list
    relations: "flint.fmpz_mat"
    precision_bits: int = 0
    history: list = field(default_factory=list)

    @property
    def rank(self) -> int:
        return self.relations.nrows()


def _lll_candidates(gens, prec: int, policy: PrecisionPolicy) -> list[list[int]]:
    g = len(gens)
    scale = prec - 8
    logs = fixed_point_logs(gens, prec, scale)
    K = gens[0].target
    primes = valuation_primes(K, [q for s in gens for q in prime_factors(s.d)])
    vals = valuation_matrix(gens, primes)
    rows = []
    for i in range(g):
        rows.append([int(i == j) for j in range(g)] + logs[i] + [v << scale for v in vals[i]])
    B = flint.fmpz_mat(rows).lll()
    out = []
    thresh = 1 << (scale // 2)
    for i in range(B.nrows()):
        coeffs = [int(B[i, j]) for j in range(g)]
        rest = [int(B[i, j]) for j in range(g, B.ncols())]
        if not any(coeffs):
            continue
        if max(abs(x) for x in rest) > thresh:
            continue
        if max(abs(x) for x in coeffs) > policy.exponent_bound:
            continue
        out.append(coeffs)
    return out


def relation_lattice(gens: list[CircSymbol], prec_policy: PrecisionPolicy = PrecisionPolicy()) -> RelationLattice:
    """Saturated lattice of exponent vectors v with prod gens^v = ±1.

    Numeric candidates come from LLL on [I | 2^(P-8) logs | weighted
    valuations]; each is confirmed exactly.  Precision doubles from the
    initial value until the verified rank agrees at three consecutive
    precisions and with the numeric rank of the image.
    """
    from .exactla import hnf, rank as int_rank, saturate

    if not gens:
        raise InvalidInput("relation_lattice needs at least one symbol")
    if len({s.target for s in gens}) != 1:
        raise InvalidInput("symbols must share a target field")
    g = len(gens)
    expected = g - numeric_rank(image_matrix(gens))[0]
    prec = prec_policy.initial_bits
    verified: list[list[int]] = []
    history = []
    refuted = None
    while True:
        _check_prec(prec)
        cands = _lll_candidates(gens, prec, prec_policy)
        checks = verify_relations(gens, cands) if cands else []
        refuted = None
        for c, ok in zip(cands, checks):
            if ok:
                verified.append(c)
            elif refuted is None:
                refuted = c
        r = int_rank(verified) if verified else 0
        history.append((prec, r, len(cands)))
        stable = len(history) >= 3 and history[-1][1] == history[-2][1] == history[-3][1]
        if stable and r == expected and refuted is None:
            break
        if prec * 2 > prec_policy.max_bits:
            if refuted is not None:
                raise Unresolved("numerically suggested relation refuted at maximal precision", refuted)
            if r != expected:
                raise Unresolved(f"found {r} relations, numeric rank predicts {expected}")
            break
        prec *= 2
    rel = saturate(verified, g) if verified else flint.fmpz_mat(0, g)
    # the ambient group modulo torsion is free, so the saturation holds too
    if rel.nrows():
        if not all(verify_relations(gens, [[int(rel[i, j]) for j in range(g)] for i in range(rel.nrows())])):
            raise Unresolved("saturated relation failed exact verification")
    return RelationLattice(list(gens), hnf(rel, g), prec, history)
