"""Real abelian fields as subgroups of (Z/f)^x.

A field F inside Q(zeta_f) is recorded by the subgroup H of (Z/f)^x fixing
it; the Galois group of F is (Z/f)^x / H.  Every field is stored at its
conductor, so equality of fields is equality of the stored pairs.

>>> F = make_field(7, [6])
>>> F.degree, F.conductor, F.totally_real
(3, 7, True)
>>> str(F)
'7:1,6'
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from math import gcd

from .errors import InvalidInput, Unsupported


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def _norm(a: int, f: int) -> int:
    # residues live in 1..f-1, except that the only residue mod 1 is written 1
    r = a % f
    return r if r else f


@lru_cache(maxsize=256)
def units(f: int) -> tuple[int, ...]:
    if f == 1:
        return (1,)
    return tuple(a for a in range(1, f) if gcd(a, f) == 1)


def prime_factors(n: int) -> list[int]:
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_prime(n: int) -> bool:
    return n >= 2 and prime_factors(n) == [n]


def euler_phi(n: int) -> int:
    out = n
    for q in prime_factors(n):
        out = out // q * (q - 1)
    return out


def generate_subgroup(f: int, gens) -> frozenset[int]:
    """Closure of ``gens`` under multiplication mod f."""
    elems = {_norm(1, f)}
    frontier = [_norm(1, f)]
    gens = [_norm(g, f) for g in gens]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = _norm(x * g, f)
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(elems)


def reduce_set(elems, f: int, d: int) -> frozenset[int]:
    """Image of a subset of (Z/f)^x under reduction to (Z/d)^x, d | lcm."""
    return frozenset(_norm(a, d) for a in elems)


def lift_set(elems, d: int, f: int) -> frozenset[int]:
    """Preimage in (Z/f)^x of a subset of (Z/d)^x, where d | f."""
    if f % d:
        raise ValueError("lift requires d | f")
    elems = set(elems)
    return frozenset(a for a in units(f) if _norm(a, d) in elems)


def kernel_of_reduction(f: int, d: int) -> list[int]:
    return [a for a in range(1, f + 1, d) if gcd(a, f) == 1] if f > 1 else [1]


@dataclass(frozen=True)
class AbelianField:
    """Fixed field of ``subgroup`` inside Q(zeta_modulus).

    Instances built through :func:`make_field` are canonical (modulus equals
    conductor).  The raw constructor does not canonicalize.
    """

    modulus: int
    subgroup: tuple[int, ...]

    def __hash__(self) -> int:
        return self._hash

    @cached_property
    def _hash(self) -> int:
        return hash((self.modulus, self.subgroup))

    @cached_property
    def _hset(self) -> frozenset[int]:
        return frozenset(self.subgroup)

    @cached_property
    def degree(self) -> int:
        return euler_phi(self.modulus) // len(self.subgroup)

    @cached_property
    def conductor(self) -> int:
        f = self.modulus
        for d in sorted(_divisors(f)):
            if all(a in self._hset for a in kernel_of_reduction(f, d)):
                return d
        return f  # pragma: no cover

    @cached_property
    def totally_real(self) -> bool:
        return _norm(-1, self.modulus) in self._hset

    def subgroup_at(self, M: int) -> frozenset[int]:
        """The subgroup fixing self, viewed in (Z/M)^x for M a multiple of the modulus."""
        return lift_set(self._hset, self.modulus, M)

    def image_mod(self, d: int) -> frozenset[int]:
        """Image in (Z/d)^x of the subgroup fixing self; fixes self ∩ Q(zeta_d)."""
        M = _lcm(self.modulus, d)
        return reduce_set(self.subgroup_at(M), M, d)

    def canonical(self) -> "AbelianField":
        c = self.conductor
        if c == self.modulus:
            return self
        return AbelianField(c, tuple(sorted(reduce_set(self._hset, self.modulus, c))))

    def is_subfield_of(self, other: "AbelianField") -> bool:
        M = _lcm(self.modulus, other.modulus)
        return other.subgroup_at(M) <= self.subgroup_at(M)

    def maximal_real_subfield(self) -> "AbelianField":
        return make_field(self.modulus, list(self.subgroup) + [-1])

    @cached_property
    def coset_reps(self) -> tuple[int, ...]:
        """Smallest residue of each coset of H; indexes the Galois group."""
        seen: set[int] = set()
        reps = []
        for a in units(self.modulus):
            if a in seen:
                continue
            reps.append(a)
            seen.update(_norm(a * h, self.modulus) for h in self.subgroup)
        return tuple(reps)

    @cached_property
    def _rep_of(self) -> dict[int, int]:
        out = {}
        for r in self.coset_reps:
            for h in self.subgroup:
                out[_norm(r * h, self.modulus)] = r
        return out

    def rep(self, a: int) -> int:
        """Canonical representative of the class of an integer a coprime to f."""
        return self._rep_of[_norm(a, self.modulus)]

    def galois_element(self, a: int) -> "GaloisElement":
        if gcd(a, self.modulus) != 1:
            raise InvalidInput(f"{a} is not coprime to {self.modulus}")
        return GaloisElement(self, self.rep(a))

    def element_order(self, a: int) -> int:
        x, k = _norm(a, self.modulus), 1
        while x not in self._hset:
            x = _norm(x * a, self.modulus)
            k += 1
        return k

    def __str__(self) -> str:
        return f"{self.modulus}:" + ",".join(map(str, self.subgroup))

    def __repr__(self) -> str:
        return f"AbelianField({self})"


@dataclass(frozen=True)
class GaloisElement:
    field: AbelianField
    residue: int

    def __mul__(self, other: "GaloisElement") -> "GaloisElement":
        return self.field.galois_element(self.residue * other.residue)

    @property
    def order(self) -> int:
        return self.field.element_order(self.residue)

    def generates(self) -> bool:
        return self.order == self.field.degree

    def __str__(self) -> str:
        return f"sigma_{self.residue}"


@dataclass(frozen=True)
class SplittingData:
    e: int
    f_res: int
    s: int
    s_plus: int


@dataclass(frozen=True)
class TowerConstants:
    n_d: int
    n_i: int
    e0: int


def _divisors(n: int) -> list[int]:
    ds = [1]
    for q in prime_factors(n):
        k = valuation(n, q)
        ds = [d * q**i for d in ds for i in range(k + 1)]
    return ds


def divisors(n: int) -> list[int]:
    return sorted(_divisors(n))


def make_field(f: int, gens=()) -> AbelianField:
    """Field fixed by the subgroup of (Z/f)^x generated by ``gens``, at its conductor."""
    if not isinstance(f, int) or f <= 0:
        raise InvalidInput("modulus must be a positive integer")
    for g in gens:
        if gcd(g, f) != 1:
            raise InvalidInput(f"generator {g} is not coprime to {f}")
    H = generate_subgroup(f, gens)
    return AbelianField(f, tuple(sorted(H))).canonical()


def field_from_subgroup(f: int, H) -> AbelianField:
    return AbelianField(f, tuple(sorted(set(_norm(h, f) for h in H)))).canonical()


def parse_field(text: str) -> AbelianField:
    """Inverse of ``str(field)``; the subgroup may be any generating set."""
    try:
        f_s, _, h_s = text.partition(":")
        f = int(f_s)
        gens = [int(x) for x in h_s.split(",") if x.strip()]
    except ValueError as exc:
        raise InvalidInput(f"malformed field spec {text!r}") from exc
    return make_field(f, gens)


RATIONALS = AbelianField(1, (1,))


def compositum(F: AbelianField, K: AbelianField) -> AbelianField:
    M = _lcm(F.modulus, K.modulus)
    return field_from_subgroup(M, F.subgroup_at(M) & K.subgroup_at(M))


def intersection(F: AbelianField, K: AbelianField) -> AbelianField:
    M = _lcm(F.modulus, K.modulus)
    return make_field(M, list(F.subgroup_at(M) | K.subgroup_at(M)))


def cyclotomic_subfield(F: AbelianField, d: int) -> AbelianField:
    """F ∩ Q(zeta_d)."""
    return field_from_subgroup(d, F.image_mod(d))


def tower_base(p: int, k: int) -> AbelianField:
    """The degree-p^k subfield of Q(zeta_{p^{k+1}})."""
    if k == 0:
        return RATIONALS
    q = p ** (k + 1)
    return field_from_subgroup(q, [a for a in units(q) if pow(a, p - 1, q) == 1])


def _check_odd(p: int) -> None:
    if p == 2:
        raise Unsupported("p = 2 is not supported")
    if not is_prime(p):
        raise InvalidInput(f"{p} is not prime")


def tower_offset(F: AbelianField, p: int) -> int:
    """e0: largest k with the degree-p^k layer over Q contained in F."""
    k = 0
    while tower_base(p, k + 1).is_subfield_of(F):
        k += 1
    return k


def layer(F: AbelianField, p: int, n: int) -> AbelianField:
    _check_odd(p)
    if n < 0:
        raise InvalidInput("level must be nonnegative")
    if n == 0:
        return F
    e0 = tower_offset(F, p)
    return compositum(F, tower_base(p, n + e0))


def _local_groups(F: AbelianField, p: int):
    """Inertia and decomposition subgroups of (Z/f)^x (containing H) at p."""
    f = F.modulus
    v = valuation(f, p)
    pv, fp = p**v, f // p**v
    H = F._hset
    inertia = [a for a in units(f) if _norm(a, fp) == _norm(1, fp)]
    # Frobenius: trivial on the p-part, p on the prime-to-p part
    frob = _crt(1, pv, p % fp, fp) if fp > 1 else 1
    I = generate_subgroup(f, list(H) + inertia)
    D = generate_subgroup(f, list(I) + [frob])
    return I, D, frob


def _crt(a: int, m: int, b: int, n: int) -> int:
    # m, n coprime
    t = ((b - a) * pow(m, -1, n)) % n
    return (a + m * t) % (m * n)


def splitting_data(F: AbelianField, p: int) -> SplittingData:
    if not is_prime(p):
        raise InvalidInput(f"{p} is not prime")
    I, D, _ = _local_groups(F, p)
    h = len(F.subgroup)
    e = len(I) // h
    f_res = len(D) // len(I)
    s = F.degree * h // len(D)
    if F.totally_real:
        s_plus = s
    else:
        s_plus = splitting_data(F.maximal_real_subfield(), p).s
    return SplittingData(e, f_res, s, s_plus)


def tower_constants(F: AbelianField, p: int, n_max: int = 4) -> TowerConstants:
    """n_d, n_i and e0 for the cyclotomic Z_p-tower over F.

    The tower part of the inertia group of F_inf contains Gamma^{p^{n_i}}, and
    the decomposition group is some Gamma^{p^a} containing it, so n_d <= n_i.
    Scanning up to n_i is therefore exhaustive; n_i itself is reached before
    the layer conductor exceeds the p-part of f by a factor p.
    """
    _check_odd(p)
    if n_max < 1:
        raise InvalidInput("n_max must be at least 1")
    e0 = tower_offset(F, p)
    bound = valuation(F.conductor, p) + 2
    prev = splitting_data(F, p)
    n_i = None
    n_d = None
    for n in range(bound + 1):
        cur = splitting_data(layer(F, p, n + 1), p)
        if n_d is None and cur.s == prev.s:
            n_d = n
        if cur.e > prev.e:
            n_i = n
            break
        prev = cur
    if n_i is None:  # pragma: no cover - excluded by the bound above
        raise RuntimeError("ramification level not found")
    if n_d is None:
        n_d = n_i
    return TowerConstants(n_d, n_i, e0)


def inertia_decomposition(Fn: AbelianField, p: int):
    """(I, D, sigma_p): inertia field, decomposition field and Frobenius of I."""
    I_grp, D_grp, _ = _local_groups(Fn, p)
    f = Fn.modulus
    I_field = field_from_subgroup(f, I_grp)
    D_field = field_from_subgroup(f, D_grp)
    # p is unramified in I_field, so its conductor is prime to p
    sigma = I_field.galois_element(p % I_field.modulus if I_field.modulus > 1 else 1)
    return I_field, D_field, sigma


# -- fields cut out by characters -------------------------------------------


@lru_cache(maxsize=None)
def primitive_root(ell: int) -> int:
    qs = prime_factors(ell - 1)
    for g in range(2, ell):
        if all(pow(g, (ell - 1) // q, ell) != 1 for q in qs):
            return g
    return 1


@lru_cache(maxsize=None)
def _dlog_table(ell: int) -> dict[int, int]:
    g, x, out = primitive_root(ell), 1, {}
    for k in range(ell - 1):
        out[x] = k
        x = x * g % ell
    return out


def character_field(order: int, exponents: dict[int, int]) -> AbelianField:
    """Fixed field of the kernel of prod_l chi_l^{e_l}.

    chi_l is the character mod the prime l of exact order ``order`` sending
    the least primitive root to exp(2 pi i / order).
    """
    f = 1
    for ell in exponents:
        if (ell - 1) % order:
            raise InvalidInput(f"no character of order {order} mod {ell}")
        f *= ell
    ker = []
    for a in units(f):
        t = 0
        for ell, e in exponents.items():
            t += e * _dlog_table(ell)[a % ell]
        if t % order == 0:
            ker.append(a)
    return field_from_subgroup(f, ker)


def cubic_fields_two_primes(l1: int, l2: int, p: int = 3):
    """The two cubic fields of conductor l1*l2 not contained in a prime-level field.

    Returned as (inert, split) when p is inert in one and split in the other,
    otherwise as the two fields in a fixed order.
    """
    A = character_field(3, {l1: 1, l2: 1})
    B = character_field(3, {l1: 1, l2: 2})
    if splitting_data(A, p).s > splitting_data(B, p).s:
        A, B = B, A
    return A, B


def p_closure(K: AbelianField, p: int) -> AbelianField:
    """Largest subfield of Q(zeta_f) containing K with Gal(L/K) a p-group.

    It is the fixed field of the elements of H whose order is prime to p.
    For real K this field is real, since -1 has order 2.
    """
    f = K.modulus
    m = len(K.subgroup)
    while m % p == 0:
        m //= p
    return field_from_subgroup(f, [h for h in K.subgroup if pow(h, m, f) == 1 % f])
