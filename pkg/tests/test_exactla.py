import random

import pytest

from circunits import exactla as la
from circunits.errors import InvalidInput
from circunits.exactla import FiniteAbelianGroup
from circunits.tatecoh import enumerate_quotient

from oracles import bareiss_det, matmul


def rand_matrix(rng, rows, cols, lo=-6, hi=6):
    return [[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)]


def test_group_normalizes_orders():
    assert FiniteAbelianGroup.from_orders([2, 3]).invariant_factors == (6,)
    assert FiniteAbelianGroup.from_orders([4, 2, 9, 3]).invariant_factors == (6, 36)
    assert str(FiniteAbelianGroup()) == "0"


def test_group_rejects_bad_chain():
    with pytest.raises(InvalidInput):
        FiniteAbelianGroup((4, 6))
    with pytest.raises(InvalidInput):
        FiniteAbelianGroup((1,))


def test_torsion_and_p_part():
    A = FiniteAbelianGroup.from_orders([9, 2])
    assert A.p_part(3) == FiniteAbelianGroup((9,))
    assert A.torsion(3) == FiniteAbelianGroup((3,))
    assert FiniteAbelianGroup((6,)).p_part(3) == FiniteAbelianGroup((3,))


def test_snf_small_cases():
    assert la.snf_diagonal([[2, 4], [6, 8]]) == [2, 4]
    assert la.snf_diagonal([[2, 0], [0, 3]]) == [1, 6]
    assert la.quotient_structure(2, [[2, 0], [0, 3]]) == (0, FiniteAbelianGroup((6,)))
    assert la.quotient_structure(3, [[1, 0, 0]]) == (2, FiniteAbelianGroup())


def test_hnf_drops_zero_rows():
    H = la.hnf([[2, 4], [1, 2], [0, 0]])
    assert H.nrows() == 1 and la.to_lists(H) == [[1, 2]]


def test_left_kernel_is_saturated():
    K = la.left_kernel([[2], [4]])
    assert la.to_lists(K) == [[2, -1]]


def test_intersection_example():
    L = la.intersect([[2, 0], [0, 1]], [[1, 0], [0, 2]])
    assert la.quotient_structure(2, L) == (0, FiniteAbelianGroup((2, 2)))


def test_saturation():
    S = la.saturate([[2, 4, 6]])
    assert la.to_lists(S) == [[1, 2, 3]]


def test_p_saturate_ignores_prime_to_p():
    L = [[6, 0], [0, 5]]
    S = la.p_saturate(L, 3)
    # 3 is removed, 2 and 5 survive
    assert la.p_index_equal(S, [[2, 0], [0, 5]], 3)
    assert la.p_index_equal(S, la.identity(2), 3)


def test_p_local_hnf_is_canonical():
    A = la.p_local_hnf([[3, 0], [0, 2]], 3)
    B = la.p_local_hnf([[3, 0], [0, 1]], 3)
    assert A == B


@pytest.mark.parametrize("seed", range(4))
def test_snf_round_trip_property(seed):
    """U M V = D with U, V unimodular and the diagonal dividing; 1000+ cases in total."""
    rng = random.Random(1000 + seed)
    for _ in range(260):
        r, c = rng.randint(1, 5), rng.randint(1, 5)
        M = rand_matrix(rng, r, c)
        D, U, V = la.snf(M)
        Dl, Ul, Vl = la.to_lists(D), la.to_lists(U), la.to_lists(V)
        assert matmul(matmul(Ul, M), Vl) == Dl
        assert abs(bareiss_det(Ul)) == 1 and abs(bareiss_det(Vl)) == 1
        diag = [Dl[i][i] for i in range(min(r, c))]
        for i in range(r):
            for j in range(c):
                if i != j:
                    assert Dl[i][j] == 0
        nz = [d for d in diag if d]
        assert all(d > 0 for d in nz)
        assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
        assert diag[len(nz):] == [0] * (len(diag) - len(nz))
        assert nz == la.snf_diagonal(M)


@pytest.mark.parametrize("seed", range(4))
def test_quotient_matches_enumeration(seed):
    """Invariant factors from Smith forms agree with coset enumeration."""
    rng = random.Random(7 + seed)
    done = 0
    while done < 260:
        d = rng.randint(1, 3)
        M = rand_matrix(rng, d + rng.randint(0, 2), d, -5, 5)
        det_ok = la.rank(M) == d
        if not det_ok:
            continue
        free, tors = la.quotient_structure(d, M)
        assert free == 0
        if tors.order > 3000:
            continue
        assert enumerate_quotient(M, d, limit=3000) == tors
        if len(M) == d:
            assert abs(bareiss_det(M)) == tors.order
        done += 1


def test_coordinates_and_solve():
    B = [[1, 1, 0], [0, 1, 1]]
    X = [[2, 5, 3]]
    Y = la.coordinates(B, X)
    assert la.to_lists(Y) == [[2, 3]]
    with pytest.raises(InvalidInput):
        la.coordinates(B, [[1, 0, 0]])
    assert la.to_lists(la.coordinates([[2, 0], [0, 1]], [[1, 0]], p=3)) == [[1, 0]]


def test_p_quotient():
    free, tors = la.p_quotient(la.identity(2), [[9, 0], [0, 2]], 3)
    assert free == 0 and tors == FiniteAbelianGroup((9,))
