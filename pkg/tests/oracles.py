"""Independent reference computations used to cross-check the library."""

from itertools import product


def bareiss_det(M):
    """Fraction-free determinant of a square integer matrix."""
    A = [list(r) for r in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k]:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def orbit_group_order(gens, f):
    """Size of the subgroup of (Z/f)^x generated by gens, by flood fill."""
    seen = {1 % f}
    frontier = [1 % f]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = x * g % f
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    return len(seen)


def quotient_by_vectors(gens, dims):
    """Order of (Z/dims) / <gens> by enumeration, for small boxes."""
    box = list(product(*(range(d) for d in dims)))
    reach = {tuple(0 for _ in dims)}
    frontier = list(reach)
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = tuple((a + b) % d for a, b, d in zip(x, g, dims))
            if y not in reach:
                reach.add(y)
                frontier.append(y)
    return len(box) // len(reach)
