"""Exact integer linear algebra on row lattices.

Lattices are row spans of integer matrices.  Heavy lifting (HNF, SNF
diagonals, rational solves, nullspaces mod p) is delegated to FLINT; the
Smith form with explicit transforms is done here by elementary operations.

>>> quotient_structure(2, [[2, 0], [0, 3]])
(0, FiniteAbelianGroup(invariant_factors=(6,)))
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

import flint

from .errors import InvalidInput

fmpz_mat = flint.fmpz_mat
fmpq_mat = flint.fmpq_mat

INTERSECT = "INTERSECT"
SATURATE = "SATURATE"


@dataclass(frozen=True)
class FiniteAbelianGroup:
    invariant_factors: tuple[int, ...] = ()

    def __post_init__(self):
        fs = tuple(int(d) for d in self.invariant_factors)
        for a, b in zip(fs, fs[1:]):
            if b % a:
                raise InvalidInput("invariant factors must form a divisor chain")
        if any(d < 2 for d in fs):
            raise InvalidInput("invariant factors must be at least 2")
        object.__setattr__(self, "invariant_factors", fs)

    @classmethod
    def from_orders(cls, orders) -> "FiniteAbelianGroup":
        """Group isomorphic to the direct sum of cyclic groups of the given orders."""
        prime_powers: dict[int, list[int]] = {}
        for n in orders:
            n = abs(int(n))
            if n == 0:
                raise InvalidInput("infinite cyclic factor in a finite group")
            for q, e in _factor(n):
                prime_powers.setdefault(q, []).append(q**e)
        cols = [sorted(v, reverse=True) for v in prime_powers.values()]
        k = max((len(c) for c in cols), default=0)
        out = []
        for i in range(k):
            d = 1
            for c in cols:
                if i < len(c):
                    d *= c[i]
            out.append(d)
        return cls(tuple(sorted(out)))

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariant_factors:
            out *= d
        return out

    def is_trivial(self) -> bool:
        return not self.invariant_factors

    def p_part(self, p: int) -> "FiniteAbelianGroup":
        return FiniteAbelianGroup(
            tuple(p ** _val(d, p) for d in self.invariant_factors if d % p == 0)
        )

    def torsion(self, k: int) -> "FiniteAbelianGroup":
        """The k-torsion subgroup A[k]."""
        return FiniteAbelianGroup.from_orders(
            g for g in (gcd(d, k) for d in self.invariant_factors) if g > 1
        )

    def cotorsion(self, k: int) -> "FiniteAbelianGroup":
        """A / kA."""
        return self.torsion(k)

    def direct_sum(self, other: "FiniteAbelianGroup") -> "FiniteAbelianGroup":
        return FiniteAbelianGroup.from_orders(self.invariant_factors + other.invariant_factors)

    def __str__(self) -> str:
        if not self.invariant_factors:
            return "0"
        return " + ".join(f"Z/{d}" for d in self.invariant_factors)

    def to_list(self) -> list[int]:
        return list(self.invariant_factors)


def _val(n: int, p: int) -> int:
    v = 0
    while n and n % p == 0:
        n //= p
        v += 1
    return v


def _factor(n: int):
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            e = 0
            while n % q == 0:
                n //= q
                e += 1
            out.append((q, e))
        q += 1
    if n > 1:
        out.append((n, 1))
    return out


# -- conversions -------------------------------------------------------------


def as_mat(M, cols: int | None = None) -> fmpz_mat:
    if isinstance(M, fmpz_mat):
        return M
    rows = [list(map(int, r)) for r in M]
    if not rows:
        return fmpz_mat(0, cols or 0)
    return fmpz_mat(rows)


def to_lists(M) -> list[list[int]]:
    return [[int(M[i, j]) for j in range(M.ncols())] for i in range(M.nrows())]


def identity(n: int) -> fmpz_mat:
    I = fmpz_mat(n, n)
    for i in range(n):
        I[i, i] = 1
    return I


def vstack(mats, cols: int) -> fmpz_mat:
    rows = []
    for M in mats:
        rows.extend(to_lists(as_mat(M, cols)))
    return as_mat(rows, cols)


def select_rows(M: fmpz_mat, idx) -> fmpz_mat:
    idx = list(idx)
    out = fmpz_mat(len(idx), M.ncols())
    for a, i in enumerate(idx):
        for j in range(M.ncols()):
            out[a, j] = M[i, j]
    return out


def is_zero_row(M, i: int) -> bool:
    return all(M[i, j] == 0 for j in range(M.ncols()))


# -- Hermite form, kernels, saturation --------------------------------------


def hnf(M, cols: int | None = None) -> fmpz_mat:
    """Row HNF with zero rows removed: the canonical basis of the row span."""
    M = as_mat(M, cols)
    if M.nrows() == 0 or M.ncols() == 0:
        return fmpz_mat(0, M.ncols())
    H = M.hnf()
    keep = [i for i in range(H.nrows()) if not is_zero_row(H, i)]
    return select_rows(H, keep)


def rank(M) -> int:
    M = as_mat(M)
    if M.nrows() == 0 or M.ncols() == 0:
        return 0
    return M.rank()


def left_kernel(M, cols: int | None = None) -> fmpz_mat:
    """Basis (in HNF) of {x in Z^rows : x M = 0}; automatically saturated."""
    M = as_mat(M, cols)
    r = M.nrows()
    if r == 0:
        return fmpz_mat(0, 0)
    if M.ncols() == 0:
        return identity(r)
    H, U = M.hnf(transform=True)
    keep = [i for i in range(r) if is_zero_row(H, i)]
    return hnf(select_rows(U, keep), r)


def saturate(L, cols: int | None = None) -> fmpz_mat:
    """Basis of (Q L) ∩ Z^n."""
    L = hnf(L, cols)
    n = L.ncols()
    if L.nrows() == 0:
        return L
    K = left_kernel(L.transpose())  # rows span the orthogonal complement
    if K.nrows() == 0:
        return identity(n)
    return left_kernel(K.transpose())


def intersect(L1, L2, cols: int | None = None) -> fmpz_mat:
    A, B = hnf(L1, cols), hnf(L2, cols)
    n = A.ncols()
    if A.nrows() == 0 or B.nrows() == 0:
        return fmpz_mat(0, n)
    K = left_kernel(vstack([A, -B], n))
    if K.nrows() == 0:
        return fmpz_mat(0, n)
    return hnf(select_cols(K, range(A.nrows())) * A, n)


def select_cols(M: fmpz_mat, idx) -> fmpz_mat:
    idx = list(idx)
    out = fmpz_mat(M.nrows(), len(idx))
    for i in range(M.nrows()):
        for a, j in enumerate(idx):
            out[i, a] = M[i, j]
    return out


def intersect_and_saturate(L1, L2=None, mode: str = INTERSECT, cols: int | None = None):
    if mode == INTERSECT:
        return intersect(L1, L2, cols)
    if mode == SATURATE:
        return saturate(L1, cols)
    raise InvalidInput(f"unknown mode {mode!r}")


def same_lattice(L1, L2) -> bool:
    A, B = hnf(L1), hnf(L2)
    return A.nrows() == B.nrows() and A == B


# -- Smith form --------------------------------------------------------------


def snf_diagonal(M) -> list[int]:
    """Nonzero Smith invariants of M (FLINT)."""
    M = as_mat(M)
    if M.nrows() == 0 or M.ncols() == 0:
        return []
    D = M.snf()
    out = []
    for i in range(min(D.nrows(), D.ncols())):
        if D[i, i] != 0:
            out.append(abs(int(D[i, i])))
    return out


def snf(M):
    """Smith form with transforms: returns (D, U, V) with U M V = D.

    Works on Python integers by alternating row and column reductions;
    intended for small and medium matrices (the quotient computations use
    FLINT's diagonal directly).
    """
    A = [list(map(int, r)) for r in to_lists(as_mat(M))] if not isinstance(M, list) else [list(map(int, r)) for r in M]
    m = len(A)
    n = len(A[0]) if m else (as_mat(M).ncols() if not isinstance(M, list) else 0)
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for R in A:
            R[i], R[j] = R[j], R[i]
        for R in V:
            R[i], R[j] = R[j], R[i]

    def add_row(dst, src, c):  # row_dst += c * row_src
        if c:
            A[dst] = [x + c * y for x, y in zip(A[dst], A[src])]
            U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, c):
        if c:
            for R in A:
                R[dst] += c * R[src]
            for R in V:
                R[dst] += c * R[src]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero entry in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // A[t][t]))
                    if A[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // A[t][t]))
                    if A[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            # divisibility: pivot must divide every remaining entry
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if A[i][j] % A[t][t]:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    D = as_mat(A, n) if m else fmpz_mat(0, n)
    return D, as_mat(U, m) if m else fmpz_mat(0, 0), as_mat(V, n) if n else fmpz_mat(0, 0)


def quotient_structure(ambient_rank: int, sub_gens):
    """(free rank, torsion) of Z^ambient_rank / row span of sub_gens."""
    M = as_mat(sub_gens, ambient_rank)
    if M.nrows() and M.ncols() != ambient_rank:
        raise InvalidInput("generator length does not match ambient rank")
    diag = snf_diagonal(M) if M.nrows() else []
    free = ambient_rank - len(diag)
    return free, FiniteAbelianGroup.from_orders(d for d in diag if d > 1)


# -- rational helpers ----------------------------------------------------------


def pivot_columns(M) -> list[int]:
    """Pivot columns of the reduced row echelon form over Q."""
    M = as_mat(M)
    if M.nrows() == 0:
        return []
    R, r = fmpq_mat(M).rref()
    piv = []
    row = 0
    for j in range(R.ncols()):
        if row < r and R[row, j] != 0:
            piv.append(j)
            row += 1
    return piv


def solve_rows(B, X):
    """Rational Y with Y B = X, where B has full row rank; None if no solution."""
    B, X = as_mat(B), as_mat(X)
    k = B.nrows()
    if k == 0:
        if all(is_zero_row(X, i) for i in range(X.nrows())):
            return fmpq_mat(X.nrows(), 0)
        return None
    J = pivot_columns(B)  # independent columns of B
    BJ = fmpq_mat(select_cols(B, J))
    XJ = fmpq_mat(select_cols(X, J))
    Y = (BJ.transpose().solve(XJ.transpose())).transpose()
    if Y * fmpq_mat(B) != fmpq_mat(X):
        return None
    return Y


def denominators(Y) -> int:
    d = 1
    for i in range(Y.nrows()):
        for j in range(Y.ncols()):
            q = Y[i, j].q
            d = d * q // gcd(d, int(q))
    return d


def clear_prime_to_p(Y, p: int):
    """Scale each row by the prime-to-p part of its denominator; None if p divides one."""
    rows = []
    for i in range(Y.nrows()):
        d = 1
        for j in range(Y.ncols()):
            q = int(Y[i, j].q)
            d = d * q // gcd(d, q)
        if d % p == 0:
            return None
        rows.append([int(Y[i, j] * d) for j in range(Y.ncols())])
    return as_mat(rows, Y.ncols())


# -- p-local lattices -----------------------------------------------------------


def p_saturate(L, p: int, cols: int | None = None) -> fmpz_mat:
    """Basis of the p-saturation (Z_(p) Q L ∩ Z^n) up to prime-to-p index.

    Repeatedly adjoins (y L)/p for y in the mod-p left kernel of L.  The
    returned lattice agrees with the saturation after tensoring with Z_(p).
    """
    L = hnf(L, cols)
    n = L.ncols()
    r = L.nrows()
    if r == 0:
        return L
    rows = to_lists(L)
    while True:
        K, kdim = flint.nmod_mat(rows, p).transpose().nullspace()
        if kdim == 0:
            break
        # kernel vectors in reduced echelon form: each has a 1 at its own
        # pivot and 0 at the others, so all pivot rows can be replaced at once
        Y = K.transpose().rref()[0]
        for s in range(kdim):
            coeffs = [int(Y[s, j]) for j in range(r)]
            piv = next(j for j in range(r) if coeffs[j])
            new = [0] * n
            for j, c in enumerate(coeffs):
                if c:
                    new = [a + c * b for a, b in zip(new, rows[j])]
            rows[piv] = [x // p for x in new]
        rows = to_lists(hnf(rows, n))
    return hnf(rows, n)


def p_index_equal(A, B, p: int) -> bool:
    """True iff the row spans of A and B agree after tensoring with Z_(p)."""
    A, B = hnf(A), hnf(B)
    if A.nrows() != B.nrows():
        return False
    if A.nrows() == 0:
        return True
    Y1, Y2 = solve_rows(A, B), solve_rows(B, A)
    if Y1 is None or Y2 is None:
        return False
    return clear_prime_to_p(Y1, p) is not None and clear_prime_to_p(Y2, p) is not None


def coordinates(B, X, p: int | None = None):
    """Integer coordinates of the rows of X in the basis B.

    With p given, prime-to-p denominators are cleared row by row (which does
    not change the Z_(p)-span); otherwise exact integrality is required.
    """
    Y = solve_rows(B, X)
    if Y is None:
        raise InvalidInput("rows do not lie in the rational span of the basis")
    if p is None:
        if denominators(Y) != 1:
            raise InvalidInput("rows are not integral combinations of the basis")
        return as_mat([[int(Y[i, j]) for j in range(Y.ncols())] for i in range(Y.nrows())], Y.ncols())
    C = clear_prime_to_p(Y, p)
    if C is None:
        raise InvalidInput("rows are not p-integral combinations of the basis")
    return C


def p_quotient(ambient, sub, p: int):
    """(free rank, p-primary torsion) of (Z_(p) ambient) / (Z_(p) sub), sub ⊆ ambient p-locally."""
    A = hnf(ambient)
    S = hnf(sub, A.ncols())
    k = A.nrows()
    if S.nrows() == 0:
        return k, FiniteAbelianGroup()
    Y = coordinates(A, S, p)
    free, tors = quotient_structure(k, Y)
    return free, tors.p_part(p)


def p_local_hnf(L, p: int, cols: int | None = None) -> fmpz_mat:
    """Canonical basis of the p-localization (Z_(p) L) ∩ Z^n.

    This is L + p^a Sat(L), where p^a is the p-part of the exponent of
    Sat(L)/L.
    """
    L = hnf(L, cols)
    n = L.ncols()
    if L.nrows() == 0:
        return L
    S = saturate(L, n)
    Y = coordinates(S, L)
    _, tors = quotient_structure(S.nrows(), Y)
    e = max(tors.p_part(p).invariant_factors, default=1)
    return hnf(vstack([L, S * e], n), n)
