"""Tate cohomology of the cyclic groups Gal(F_m/F_n) on Galois lattices.

Lattices carry a right action x -> x S.  For a cyclic group of order q
generated by S, with norm element nu = 1 + S + ... + S^(q-1):

    H^0  = ker(S - 1) / im(nu)
    H^-1 = ker(nu) / im(S - 1)

Both are finite.  H^1 is reported as H^-1 (the groups are cyclic).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import flint

from . import exactla as la
from .abfield import AbelianField
from .errors import InvalidInput
from .exactla import FiniteAbelianGroup


@dataclass
class CyclicAction:
    sigma: flint.fmpz_mat
    q: int
    lattice: object = None
    generator: int | None = None

    def __post_init__(self):
        S = la.as_mat(self.sigma)
        if S.nrows() != S.ncols():
            raise InvalidInput("action matrix must be square")
        self.sigma = S
        if self.q < 1:
            raise InvalidInput("group order must be positive")
        P = la.identity(S.nrows())
        nu = la.fmpz_mat(S.nrows(), S.nrows())
        for _ in range(self.q):
            nu += P
            P = P * S
        if P != la.identity(S.nrows()):
            raise InvalidInput(f"sigma does not have order dividing {self.q}")
        self.norm_element = nu

    @property
    def rank(self) -> int:
        return self.sigma.nrows()


@dataclass(frozen=True)
class TateGroups:
    h_minus1: FiniteAbelianGroup
    h0: FiniteAbelianGroup

    @property
    def h1(self) -> FiniteAbelianGroup:
        return self.h_minus1

    def p_part(self, p: int) -> "TateGroups":
        return TateGroups(self.h_minus1.p_part(p), self.h0.p_part(p))

    def to_dict(self) -> dict:
        return {"h_minus1": self.h_minus1.to_list(), "h0": self.h0.to_list()}


def relative_generators(Fm: AbelianField, Fn: AbelianField) -> list[int]:
    """Canonical residues of all generators of Gal(Fm/Fn), in increasing order."""
    if not Fn.is_subfield_of(Fm):
        raise InvalidInput(f"{Fn} is not a subfield of {Fm}")
    q = Fm.degree // Fn.degree
    if q == 1:
        return [1]
    Hn = Fn.subgroup_at(Fm.modulus)
    return [a for a in Fm.coset_reps if a in Hn and Fm.element_order(a) == q]


def default_generator(Fm: AbelianField, Fn: AbelianField) -> int:
    """The generator of Gal(Fm/Fn) with the smallest canonical residue."""
    return relative_generators(Fm, Fn)[0]


def cyclic_action(L, Fn: AbelianField, generator: int | None = None) -> CyclicAction:
    """The action of Gal(L.field/Fn) on a GaloisLattice L."""
    Fm = L.field
    gens = relative_generators(Fm, Fn)
    a = gens[0] if generator is None else Fm.rep(generator)
    if a not in gens:
        raise InvalidInput(f"sigma_{generator} does not generate Gal({Fm}/{Fn})")
    return CyclicAction(L.matrix(a), Fm.degree // Fn.degree, L, a)


def _quotient_in(sub: flint.fmpz_mat, space: flint.fmpz_mat) -> FiniteAbelianGroup:
    d = space.nrows()
    if d == 0:
        return FiniteAbelianGroup([])
    if sub.nrows() == 0:
        raise InvalidInput("quotient is infinite")
    Y = la.coordinates(space, sub)
    free, tors = la.quotient_structure(d, Y)
    if free:
        raise InvalidInput("quotient is infinite")
    return tors


def tate_of_action(A: CyclicAction) -> TateGroups:
    r = A.rank
    if r == 0:
        return TateGroups(FiniteAbelianGroup([]), FiniteAbelianGroup([]))
    I = la.identity(r)
    D = A.sigma - I
    nu = A.norm_element
    fixed = la.left_kernel(D, r)
    nker = la.left_kernel(nu, r)
    h0 = _quotient_in(la.hnf(nu, r), fixed)
    hm1 = _quotient_in(la.hnf(D, r), nker)
    return TateGroups(hm1, h0)


def tate(L, m: int | AbelianField, n: int | AbelianField | None = None, *, p: int | None = None,
         generator: int | None = None) -> TateGroups:
    """Tate groups of Gal(F_m/F_n) acting on a lattice over F_m.

    ``m`` and ``n`` may be tower levels (then ``p`` or ``L.p`` names the
    tower and L.field must be level m of it) or the fields themselves.
    """
    from .abfield import layer

    if isinstance(n, AbelianField):
        Fn = n
    else:
        if n is None or n > m:
            raise InvalidInput("need n <= m")
        p = p or L.p
        if p is None:
            raise InvalidInput("tower prime unknown")
        F0 = L.notes.get("base")
        if F0 is None:
            raise InvalidInput("lattice does not record its tower base")
        if layer(F0, p, m) != L.field:
            raise InvalidInput(f"lattice lives over {L.field}, not level {m}")
        Fn = layer(F0, p, n)
    return tate_of_action(cyclic_action(L, Fn, generator))


def p_part(A: FiniteAbelianGroup, p: int) -> FiniteAbelianGroup:
    return A.p_part(p)


def herbrand_quotient(L, m, n=None, **kw) -> Fraction:
    T = tate(L, m, n, **kw)
    return Fraction(T.h0.order, T.h_minus1.order)


def herbrand_of_action(A: CyclicAction) -> Fraction:
    T = tate_of_action(A)
    return Fraction(T.h0.order, T.h_minus1.order)


# -- brute force ---------------------------------------------------------------------


def enumerate_quotient(sub, ambient_rank: int, limit: int = 10**4) -> FiniteAbelianGroup:
    """Z^d / row span of ``sub`` by listing cosets, for orders up to ``limit``.

    Independent of Smith forms: cosets are the points of the HNF box, and
    the group is read off from how many elements each p^j kills.
    """
    d = ambient_rank
    if d == 0:
        return FiniteAbelianGroup([])
    H = la.hnf(sub, d)
    if H.nrows() != d:
        raise InvalidInput("quotient is infinite")
    rows = [[int(H[i, j]) for j in range(d)] for i in range(d)]
    diag = [rows[i][i] for i in range(d)]
    N = 1
    for x in diag:
        N *= x
    if N > limit:
        raise InvalidInput(f"quotient of order {N} exceeds the enumeration limit")

    def reduce(v):
        v = list(v)
        for i in range(d):
            t = v[i] // diag[i]
            if t:
                v = [a - t * b for a, b in zip(v, rows[i])]
        return tuple(v)

    # enumerate the box by mixed radix
    elems = []
    for idx in range(N):
        v, t = [], idx
        for x in diag:
            v.append(t % x)
            t //= x
        elems.append(tuple(v))
    zero = tuple([0] * d)
    orders = []
    for e in elems:
        k, acc = 1, e
        while acc != zero:
            acc = reduce(a + b for a, b in zip(acc, e))
            k += 1
        orders.append(k)
    # |G[p^j]| = p^(sum_i min(j, e_i)) determines the p-exponents e_i
    from .abfield import prime_factors

    factors = []
    for p in prime_factors(N):
        counts, j = [], 0
        while True:
            c = sum(1 for o in orders if (p**j) % o == 0)
            counts.append(_log(c, p))
            if c == _p_part(N, p):
                break
            j += 1
        # counts[j] - counts[j-1] = number of exponents >= j
        for j in range(1, len(counts)):
            ge = counts[j] - counts[j - 1]
            ge_next = counts[j + 1] - counts[j] if j + 1 < len(counts) else 0
            factors += [p**j] * (ge - ge_next)
    return FiniteAbelianGroup.from_orders(factors)


def _log(c: int, p: int) -> int:
    k = 0
    while c > 1:
        c //= p
        k += 1
    return k


def _p_part(N: int, p: int) -> int:
    r = 1
    while N % p == 0:
        N //= p
        r *= p
    return r


def tate_bruteforce(A: CyclicAction, limit: int = 10**4) -> TateGroups:
    """Tate groups via coset enumeration; for cross-checking small cases."""
    r = A.rank
    if r == 0:
        return TateGroups(FiniteAbelianGroup([]), FiniteAbelianGroup([]))
    D = A.sigma - la.identity(r)
    fixed = la.left_kernel(D, r)
    nker = la.left_kernel(A.norm_element, r)
    out = []
    for sub, space in ((la.hnf(D, r), nker), (la.hnf(A.norm_element, r), fixed)):
        if space.nrows() == 0:
            out.append(FiniteAbelianGroup([]))
            continue
        Y = la.coordinates(space, sub) if sub.nrows() else la.fmpz_mat(0, space.nrows())
        out.append(enumerate_quotient(Y, space.nrows(), limit))
    return TateGroups(out[0], out[1])
