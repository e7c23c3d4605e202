"""Galois lattices of circular numbers and units over layers of a Z_p-tower.

Cyc(K) modulo torsion is presented as Z^g / Rel on the reduced generators
(symbols at the moduli f_S).  The relation lattice is the saturation of the
exactly verified norm relations; completeness is certified by checking that
the remaining generators have independent log-plus-valuation images.  All
lattices below are row spans inside this ambient, with Galois elements
acting on the right (x -> x A).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import gcd

import flint

from . import exactla as la
from .abfield import (
    AbelianField,
    generate_subgroup,
    layer,
    p_closure,
    prime_factors,
    valuation,
)
from .cycnum import (
    SymbolIndex,
    dense,
    distribution_relations,
    image_matrix,
    level,
    numeric_rank,
    reduced_generators,
    valuation_matrix,
    valuation_primes,
    verify_relations,
)
from .errors import InternalConsistencyError, InvalidInput, Unresolved, Unsupported

CYC = "CYC"
SINNOTT = "SINNOTT"
WASHINGTON = "WASHINGTON"
UNIV_NORM_C = "UNIV_NORM_C"
UNIV_NORM_W = "UNIV_NORM_W"
NORM = "NORM"
EXTENSION = "EXTENSION"


class CycAmbient:
    """Cyc(K) modulo torsion with a Z-basis, generator coordinates and valuations.

    Attributes
    ----------
    gens : reduced generators of K
    Y : g x k integer matrix, coordinates of every generator in the basis
    W : k x g integer matrix, a witness exponent vector for every basis element
    """

    def __init__(self, K: AbelianField):
        if not K.totally_real:
            raise Unsupported(f"field {K} is not totally real")
        self.K = K
        self.gens = reduced_generators(K) if K.conductor > 1 else []
        self.index = SymbolIndex(self.gens)
        g = len(self.gens)
        self.primes = valuation_primes(K)
        self.seeds = distribution_relations(K, self.gens) if g else []
        if self.seeds:
            checks = verify_relations(self.gens, self.seeds)
            bad = [r for r, c in zip(self.seeds, checks) if not c]
            if bad:
                raise InternalConsistencyError(f"distribution relation failed: {bad[0]}")
        self._build(g)
        self.val_gens = la.as_mat(valuation_matrix(self.gens, self.primes), len(self.primes)) if g else la.fmpz_mat(0, len(self.primes))
        self.val_basis = self.W * self.val_gens if self.k else la.fmpz_mat(0, len(self.primes))
        self._actions: dict[int, flint.fmpz_mat] = {}

    def _build(self, g: int) -> None:
        if g == 0:
            self.k = 0
            self.free = []
            self.Y = la.fmpz_mat(0, 0)
            self.W = la.fmpz_mat(0, 0)
            return
        if self.seeds:
            R, r = flint.fmpq_mat(dense(self.seeds, g)).rref()
        else:
            R, r = flint.fmpq_mat(0, g), 0
        piv, row = [], 0
        for j in range(g):
            if row < r and R[row, j] != 0:
                piv.append(j)
                row += 1
        pivset = set(piv)
        free = [j for j in range(g) if j not in pivset]
        k = len(free)
        # completeness: the free generators must be multiplicatively independent
        nr, kept, dropped = numeric_rank(image_matrix([self.gens[j] for j in free]))
        if nr != k or kept < 1e-4:
            raise Unresolved(
                f"relation span incomplete for {self.K}: numeric rank {nr} of {k} free generators"
            )
        fpos = {j: i for i, j in enumerate(free)}
        C = flint.fmpq_mat(g, k)
        for j in free:
            C[j, fpos[j]] = 1
        for t, i in enumerate(piv):
            for j in free:
                if R[t, j] != 0:
                    C[i, fpos[j]] = -R[t, j]
        den = 1
        for i in piv:
            for j in range(k):
                den = math.lcm(den, int(C[i, j].q))
        self.k, self.free = k, free
        if den == 1:
            self.Y = la.fmpz_mat([[int(C[i, j]) for j in range(k)] for i in range(g)])
            W = la.fmpz_mat(k, g)
            for i, j in enumerate(free):
                W[i, j] = 1
            self.W = W
            self.integral = True
            return
        # the generators span a lattice strictly larger than Z^free
        self.integral = False
        DC = la.fmpz_mat([[int(C[i, j] * den) for j in range(k)] for i in range(g)])
        H, U = DC.hnf(transform=True)
        Hk = la.select_rows(H, range(k))
        self.W = la.select_rows(U, range(k))
        Y = flint.fmpq_mat(DC) * flint.fmpq_mat(Hk).inv()
        if la.denominators(Y) != 1:
            raise InternalConsistencyError("generator coordinates are not integral")
        self.Y = la.fmpz_mat([[int(Y[i, j]) for j in range(k)] for i in range(g)])

    # -- coordinates ------------------------------------------------------------

    def coords(self, rows) -> flint.fmpz_mat:
        """Basis coordinates of sparse exponent rows over the generators."""
        if not hasattr(self, "_ysparse"):
            self._ysparse = [
                {j: int(self.Y[i, j]) for j in range(self.k) if self.Y[i, j] != 0}
                for i in range(len(self.gens))
            ]
        acc = []
        for r in rows:
            v: dict[int, int] = {}
            for i, e in r.items():
                for j, y in self._ysparse[i].items():
                    v[j] = v.get(j, 0) + e * y
            acc.append([v.get(j, 0) for j in range(self.k)])
        return la.as_mat(acc, self.k) if acc else la.fmpz_mat(0, self.k)

    def witness_rows(self, X) -> list[dict[int, int]]:
        """Exponent vectors over the generators for rows X in basis coordinates."""
        M = X * self.W
        out = []
        for i in range(M.nrows()):
            out.append({j: int(M[i, j]) for j in range(M.ncols()) if M[i, j] != 0})
        return out

    def perm(self, a: int) -> list[int]:
        """Index of sigma_a(gen_j) for each generator j."""
        out = []
        for s in self.gens:
            out.append(self.index[(s.d, level(self.K, s.d).rep(a * s.a))])
        return out

    def action(self, a: int) -> flint.fmpz_mat:
        a %= self.K.modulus
        if a not in self._actions:
            if self.k == 0:
                self._actions[a] = la.fmpz_mat(0, 0)
            else:
                P = self.perm(a)
                if self.integral:
                    self._actions[a] = la.select_rows(self.Y, [P[j] for j in self.free])
                else:
                    Wp = la.fmpz_mat(self.k, len(self.gens))
                    for i in range(self.k):
                        for j in range(len(self.gens)):
                            if self.W[i, j] != 0:
                                Wp[i, P[j]] += self.W[i, j]
                    self._actions[a] = Wp * self.Y
        return self._actions[a]


@lru_cache(maxsize=64)
def ambient(K: AbelianField) -> CycAmbient:
    return CycAmbient(K)


def galois_generators(K: AbelianField) -> list[int]:
    """Greedy generating set of (Z/f)^x / H by smallest canonical residues."""
    f = K.modulus
    cur = frozenset(K.subgroup)
    gens = []
    for a in K.coset_reps:
        if a not in cur:
            gens.append(a)
            cur = generate_subgroup(f, list(cur) + [a])
    return gens


# -- lattices -----------------------------------------------------------------------


@dataclass
class GaloisLattice:
    field: AbelianField
    kind: str
    ambient: CycAmbient
    basis: flint.fmpz_mat  # rows in ambient coordinates
    p: int | None = None
    stabilized: bool | None = None
    notes: dict = field(default_factory=dict)
    _mats: dict = field(default_factory=dict, repr=False)

    @property
    def rank(self) -> int:
        return self.basis.nrows()

    def matrix(self, a: int) -> flint.fmpz_mat:
        """Action of sigma_a in this basis (row convention)."""
        a %= self.field.modulus
        if a not in self._mats:
            if self.rank == 0:
                self._mats[a] = la.fmpz_mat(0, 0)
            else:
                img = self.basis * self.ambient.action(a)
                self._mats[a] = la.coordinates(self.basis, img)
        return self._mats[a]

    @property
    def action(self) -> dict[int, flint.fmpz_mat]:
        return {a: self.matrix(a) for a in galois_generators(self.field)}

    @property
    def witnesses(self) -> flint.fmpz_mat:
        return self.basis * self.ambient.W if self.rank else la.fmpz_mat(0, len(self.ambient.gens))

    def valuations(self) -> flint.fmpz_mat:
        return self.basis * self.ambient.val_basis


def _unit_kernel(amb: CycAmbient, basis: flint.fmpz_mat) -> flint.fmpz_mat:
    V = basis * amb.val_basis
    if V.ncols() == 0:
        return basis
    K = la.left_kernel(V)
    return K * basis if K.nrows() else la.fmpz_mat(0, amb.k)


def build_module(Fn: AbelianField, kind: str, p: int | None = None) -> GaloisLattice:
    """CYC, SINNOTT or WASHINGTON lattice over Fn.

    WASHINGTON is computed inside the maximal p-extension L of Fn in
    Q(zeta_f); it agrees with W(Fn) up to an index prime to p, so ``p`` is
    required unless Fn has no such extension.
    """
    if not Fn.totally_real:
        raise Unsupported(f"field {Fn} is not totally real")
    if kind == CYC:
        amb = ambient(Fn)
        return GaloisLattice(Fn, CYC, amb, la.identity(amb.k), p)
    if kind == SINNOTT:
        amb = ambient(Fn)
        return GaloisLattice(Fn, SINNOTT, amb, la.hnf(_unit_kernel(amb, la.identity(amb.k)), amb.k), p)
    if kind != WASHINGTON:
        raise InvalidInput(f"unknown lattice kind {kind!r}")
    if p is None:
        raise InvalidInput("WASHINGTON lattices are built p-locally; pass p")
    L = p_closure(Fn, p)
    amb = ambient(L)
    if L == Fn:
        basis = _unit_kernel(amb, la.identity(amb.k))
        return GaloisLattice(Fn, WASHINGTON, amb, la.hnf(basis, amb.k), p, notes={"closure": str(L)})
    # invariants of Gal(L/Fn): the saturation of the trace image, whose index
    # in the invariants is a power of p
    H_rel = sorted({L.rep(h) for h in Fn.subgroup})
    T = la.fmpz_mat(amb.k, amb.k)
    for h in H_rel:
        T += amb.action(h)
    inv = la.p_saturate(T, p, amb.k)
    basis = _unit_kernel(amb, inv)
    return GaloisLattice(Fn, WASHINGTON, amb, la.hnf(basis, amb.k), p, notes={"closure": str(L)})


def build_layer(F: AbelianField, p: int, n: int, kind: str) -> GaloisLattice:
    """build_module on the n-th layer of the cyclotomic Z_p-tower over F."""
    X = build_module(layer(F, p, n), kind, p)
    X.p = p
    X.notes.update(base=F, level=n)
    return X


# -- symbol-level norm and extension -------------------------------------------------


def extension_rows(K: AbelianField, K2: AbelianField) -> list[dict[int, int]]:
    """Each reduced generator of K as a combination of reduced generators of K2 ⊇ K."""
    f2 = K2.conductor
    ix2 = SymbolIndex(reduced_generators(K2))
    out = []
    for s in reduced_generators(K):
        S = prime_factors(s.d)
        d2 = math.prod(q ** valuation(f2, q) for q in S)
        L1, L2 = level(K, s.d), level(K2, d2)
        row = {}
        for x in L2.reps:
            if L1.rep(x) == s.a:
                row[ix2[(d2, x)]] = 1
        out.append(row)
    return out


def norm_rows(K2: AbelianField, K: AbelianField):
    """Norms from K2 down to K ⊆ K2 of the reduced generators of K2.

    Returns (rows over the reduced generators of K, extra) where extra[i]
    maps rational primes not dividing f_K to their exponent (norms of
    prime-power symbols at primes unramified in K).
    """
    fK = K.conductor
    ixK = SymbolIndex(reduced_generators(K)) if fK > 1 else None
    rows, extra = [], []
    for s in reduced_generators(K2):
        d0 = gcd(s.d, fK)
        Ld2 = level(K2, s.d)
        degK_d = level(K, d0).degree if d0 > 1 else 1
        c = K2.degree * degK_d // (Ld2.degree * K.degree)
        row: dict[int, int] = {}
        ext: dict[int, int] = {}
        if d0 > 1:
            new = [q for q in prime_factors(s.d) if d0 % q]
            L0 = level(K, d0)
            for t in range(len(new) + 1):
                for T in combinations(new, t):
                    b = s.a
                    for q in T:
                        b = b * pow(q, -1, d0) % d0
                    i = ixK[(d0, L0.rep(b))]
                    row[i] = row.get(i, 0) + c * (-1) ** t
        else:
            ps = prime_factors(s.d)
            if len(ps) == 1:
                ext[ps[0]] = c
        rows.append({i: e for i, e in row.items() if e})
        extra.append(ext)
    return rows, extra


@dataclass
class LayerMap:
    source: GaloisLattice
    target: GaloisLattice
    kind: str
    matrix: flint.fmpz_mat
    extra_primes: list = field(default_factory=list)
    extra: flint.fmpz_mat | None = None


def _closure_norm_exponent(Am: AbelianField, An: AbelianField, Fm: AbelianField) -> int:
    """[Am : Fm An], the power by which the ambient norm overshoots N_{Fm/Fn}."""
    from .abfield import compositum

    return Am.degree // compositum(Fm, An).degree


def layer_maps(F: AbelianField, p: int, n: int, m: int, kind: str = SINNOTT,
               source: GaloisLattice | None = None, target: GaloisLattice | None = None):
    """(NORM from level m to n, EXTENSION from level n to m) in the lattice bases."""
    if n > m:
        raise InvalidInput("need n <= m")
    Xn = source or build_module(layer(F, p, n), kind, p)
    Xm = target or build_module(layer(F, p, m), kind, p)
    if n == m:
        I = la.identity(Xn.rank)
        return LayerMap(Xm, Xn, NORM, I), LayerMap(Xn, Xm, EXTENSION, I)
    norm, extra_primes, extra = norm_matrix(Xm, Xn)
    ext = extension_matrix(Xn, Xm)
    return (LayerMap(Xm, Xn, NORM, norm, extra_primes, extra), LayerMap(Xn, Xm, EXTENSION, ext))


def extension_matrix(Xn: GaloisLattice, Xm: GaloisLattice) -> flint.fmpz_mat:
    An, Am = Xn.ambient, Xm.ambient
    if Xn.rank == 0:
        return la.fmpz_mat(0, Xm.rank)
    E = Am.coords(extension_rows(An.K, Am.K))  # gens of An -> Am coords
    img = Xn.witnesses * E
    exact = Xm.kind in (CYC, SINNOTT)
    return la.coordinates(Xm.basis, img, None if exact else Xm.p)


def norm_matrix(Xm: GaloisLattice, Xn: GaloisLattice):
    """Matrix of N_{Fm/Fn}; extra columns record rational primes outside Cyc(Fn)."""
    Am, An = Xm.ambient, Xn.ambient
    if Xm.rank == 0:
        return la.fmpz_mat(0, Xn.rank), [], None
    rows, extra = norm_rows(Am.K, An.K)
    c = _closure_norm_exponent(Am.K, An.K, Xm.field)
    Ngen = An.coords(rows)  # gens of Am -> An coords
    wit = Xm.witnesses
    img = wit * Ngen
    eprimes = sorted({q for e in extra for q in e})
    E = None
    if eprimes:
        Eg = la.fmpz_mat([[e.get(q, 0) for q in eprimes] for e in extra])
        E = wit * Eg
    if c != 1:
        for i in range(img.nrows()):
            for j in range(img.ncols()):
                if img[i, j] % c:
                    raise InternalConsistencyError("ambient norm not divisible by the closure degree")
                img[i, j] = img[i, j] // c
    if E is not None and any(E[i, j] != 0 for i in range(E.nrows()) for j in range(E.ncols())):
        if Xm.kind != CYC:
            raise InternalConsistencyError("norm of units has nonzero valuation")
        if any(v % c for v in (int(E[i, j]) for i in range(E.nrows()) for j in range(E.ncols()))):
            raise InternalConsistencyError("rational part not divisible by the closure degree")
        E = la.fmpz_mat([[int(E[i, j]) // c for j in range(E.ncols())] for i in range(E.nrows())])
    else:
        E, eprimes = None, []
    exact = Xn.kind in (CYC, SINNOTT)
    return la.coordinates(Xn.basis, img, None if exact else Xn.p), eprimes, E


# -- universal norms ------------------------------------------------------------------------


@dataclass
class NormChain:
    """Norm images N_{m,n}(X_m) for m = n+1 .. m_max, in level-n coordinates.

    ``quotients[i]`` lists the p-primary exponents of X_n / terms[i].  Past
    the asymptotic threshold that quotient is Phi/p^k Phi with k = m - n:
    free directions of Phi show up as factors p^k growing with m, torsion
    as factors that no longer move.

    The free part of Phi lives on the characters trivial on the
    decomposition group D at p (there are s+ - 1 of them).  ``stable`` is
    the complementary sublattice ker(sum over D); the universal norm proxy
    is the last image intersected with it, which has the rank of the true
    universal norms.
    """

    terms: list
    levels: list
    quotients: list
    stable: flint.fmpz_mat
    proxy: flint.fmpz_mat
    stabilized: bool
    free_rank: int
    torsion: la.FiniteAbelianGroup
    growth_free_rank: int


def _p_exponents(group: la.FiniteAbelianGroup, p: int) -> list[int]:
    return sorted(la._val(d, p) for d in group.p_part(p).invariant_factors)


def _classify(prev: list[int], last: list[int], k: int):
    """Split the last quotient into grown (free) and settled (torsion) factors.

    Returns (consistent, free_rank, torsion exponents).  Consistent means the
    previous quotient is the last one with every grown factor p^k cut back
    to p^(k-1), which is what Phi/p^(k-1) looks like next to Phi/p^k.
    """
    free = sum(1 for e in last if e == k)
    tors = [e for e in last if e < k]
    expect = sorted(e for e in tors + [k - 1] * free if e > 0)
    return expect == prev, free, tors


def decomposition_residues(Fn: AbelianField, p: int) -> list[int]:
    """Canonical residues of the decomposition group of Fn at p."""
    from .abfield import inertia_decomposition

    _, Dfield, _ = inertia_decomposition(Fn, p)
    Dsub = Dfield.subgroup_at(Fn.modulus)
    return [a for a in Fn.coset_reps if a in Dsub]


def stable_part(X: GaloisLattice, p: int) -> flint.fmpz_mat:
    """Rows of ker(sum_{d in D} d) in X-coordinates (saturated)."""
    r = X.rank
    if r == 0:
        return la.fmpz_mat(0, 0)
    ND = la.fmpz_mat(r, r)
    for a in decomposition_residues(X.field, p):
        ND += X.matrix(a)
    K = la.left_kernel(ND, r)
    return la.hnf(K, r) if K.nrows() else la.fmpz_mat(0, r)


def universal_norms(F: AbelianField, p: int, n: int, m_max: int, kind: str = SINNOTT):
    """Finite-level proxy for the universal norms of the level-n module.

    Returns (lattice, stabilized).  The lattice is N_{m_max,n}(X_{m_max})
    cut down to the part of X_n on which norms do not keep shrinking; when
    Phi is finite that cut is empty and the lattice is the plain norm image.
    """
    if m_max < n + 2:
        raise InvalidInput("m_max must be at least n + 2")
    chain = norm_chain(F, p, n, m_max, kind)
    Xn = chain_source(F, p, n, kind)
    P = chain.proxy
    basis = P * Xn.basis if P.nrows() else la.fmpz_mat(0, Xn.ambient.k)
    ukind = UNIV_NORM_C if kind == SINNOTT else UNIV_NORM_W
    lat = GaloisLattice(Xn.field, ukind, Xn.ambient, la.hnf(basis, Xn.ambient.k), p, chain.stabilized,
                        notes={"base": F, "level": n, "m_max": m_max, "levels": chain.levels,
                               "free_rank": chain.free_rank,
                               "torsion": chain.torsion.to_list(),
                               "quotients": chain.quotients})
    return lat, chain.stabilized


@lru_cache(maxsize=64)
def chain_source(F: AbelianField, p: int, n: int, kind: str) -> GaloisLattice:
    return build_layer(F, p, n, kind)


@lru_cache(maxsize=64)
def norm_chain(F: AbelianField, p: int, n: int, m_max: int, kind: str) -> NormChain:
    Xn = chain_source(F, p, n, kind)
    terms, levels, quots = [], [], []
    r = Xn.rank
    for m in range(n + 1, m_max + 1):
        Xm = chain_source(F, p, m, kind)
        N, _, _ = norm_matrix(Xm, Xn)
        terms.append(la.p_local_hnf(N, p, r) if r else N)
        _, tors = la.quotient_structure(r, terms[-1]) if r else (0, la.FiniteAbelianGroup([]))
        quots.append(_p_exponents(tors, p))
        levels.append(m)
    triv = la.FiniteAbelianGroup([])
    if r == 0:
        z = la.fmpz_mat(0, 0)
        return NormChain(terms, levels, quots, z, z, True, 0, triv, 0)
    S = stable_part(Xn, p)
    cut = [la.p_local_hnf(la.intersect(T, S, r), p, r) if S.nrows() else la.fmpz_mat(0, r)
           for T in terms]
    proxy = cut[-1]
    free, tors = r - S.nrows(), triv
    if proxy.nrows():
        _, t = la.quotient_structure(r, proxy)
        tors = t.p_part(p)
    stab, gfree = False, 0
    if len(terms) >= 2:
        k = m_max - n
        ok, gfree, gt = _classify(quots[-2], quots[-1], k)
        stab = (ok and gfree == free
                and la.FiniteAbelianGroup.from_orders(p**e for e in gt) == tors
                and (proxy.nrows() == 0 or la.p_index_equal(cut[-1], cut[-2], p)))
    return NormChain(terms, levels, quots, S, proxy, stab, free, tors, gfree)
