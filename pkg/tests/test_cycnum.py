import math

import flint
import mpmath
import pytest

from circunits.abfield import RATIONALS, is_prime, make_field
from circunits.cycnum import (
    Budget,
    PrecisionPolicy,
    circ_generators,
    log_embedding,
    make_symbol,
    reduced_generators,
    relation_lattice,
    valuation_vector,
    verify_relation_exact,
    verify_relations,
)
from circunits.errors import InvalidInput, Unsupported


def full(N):
    return make_field(N, [1])


def test_generators_of_cubic_seven():
    K = make_field(7, [6])
    gens = circ_generators(K)
    assert [(s.d, s.a) for s in gens] == [(7, 1), (7, 2), (7, 3)]
    assert circ_generators(RATIONALS) == []


def test_generators_of_conductor_91(fields):
    F = fields["F"]
    by_d = {}
    for s in circ_generators(F):
        by_d.setdefault(s.d, []).append(s)
    assert sorted(by_d) == [7, 13, 91]
    assert len(by_d[7]) == len(by_d[13]) == 1 and len(by_d[91]) == 3


def test_non_real_rejected():
    with pytest.raises(Unsupported):
        circ_generators(make_field(7, [2]))


def test_log_of_full_norm_is_log7():
    v = log_embedding(make_symbol(7, 1, RATIONALS))
    assert len(v.coords) == 1
    assert abs(float(v.coords[0].mid()) - math.log(7)) < 1e-30
    assert v.abs_error < 1e-30


def test_log_of_sixth_root_is_zero():
    v = log_embedding(make_symbol(6, 1, full(6)))
    assert all(abs(float(c.mid())) < 1e-30 for c in v.coords)


def test_log_two_sine():
    mpmath.mp.prec = 600
    ref = mpmath.log(2 * mpmath.sin(mpmath.pi / 7))
    for prec in (128, 256):
        v = log_embedding(make_symbol(7, 1, full(7)), prec)
        # coordinate for the identity embedding
        mid = v.coords[0].mid().man_exp()
        got = mpmath.mpf(int(mid[0])) * mpmath.mpf(2) ** int(mid[1])
        assert abs(got - ref) < mpmath.mpf(2) ** (-prec + 20)
    assert float(ref) == pytest.approx(-0.14183, abs=1e-5)


def test_precision_floor():
    with pytest.raises(InvalidInput):
        log_embedding(make_symbol(7, 1, full(7)), 8)


def test_valuations():
    assert valuation_vector(make_symbol(7, 1, RATIONALS)) == {7: 1}
    assert not any(valuation_vector(make_symbol(91, 1, full(91))).values())
    assert valuation_vector(make_symbol(9, 1, make_field(9, [8]))) == {3: 1}


def test_unit_logs_sum_to_zero(fields):
    for s in circ_generators(fields["F"]):
        if s.d == 91:
            v = log_embedding(s)
            with flint.ctx.workprec(v.precision_bits + 32):
                total = sum(v.coords, flint.arb(0))
            assert total.contains(0) and total.rad() < 1e-30


def test_exact_examples():
    K9 = full(9)
    gens = [make_symbol(9, a, K9) for a in (1, 4, 7)] + [make_symbol(3, 1, K9)]
    assert verify_relation_exact(gens, [1, 1, 1, -1])
    assert verify_relation_exact(gens, [1, 1, 1, -1], method="poly")
    K3 = full(3)
    g3 = [make_symbol(3, 1, K3), make_symbol(3, 2, K3), make_symbol(3, 1, RATIONALS)]
    assert verify_relation_exact(g3, [1, 1, -1])
    K7 = full(7)
    g7 = [make_symbol(7, 1, K7), make_symbol(7, 2, K7)]
    assert not verify_relation_exact(g7, [2, -1])
    assert not verify_relation_exact(g7, [2, -1], method="poly")


def test_root_of_unity_reported():
    K = full(7)
    # (1 - z^6) = -z^6 (1 - z): the quotient is a root of unity
    c = verify_relation_exact([make_symbol(7, 6, K), make_symbol(7, 1, K)], [1, -1])
    assert c and c.root is not None


def test_budget():
    from circunits.errors import ResourceLimitError

    K = full(7)
    with pytest.raises(ResourceLimitError):
        verify_relation_exact([make_symbol(7, 1, K)], [1], budget=Budget(max_modulus=5))


def _distribution_cases():
    primes = [q for q in range(2, 101) if is_prime(q)]
    for ell in primes:
        for q in primes:
            if ell * q <= 200:
                yield ell, q


@pytest.mark.parametrize("ell,q", list(_distribution_cases()))
def test_distribution_relation(ell, q):
    """prod over x^ell = zeta_q of (1 - x) equals 1 - zeta_q, twisted by Frobenius when ell != q."""
    N = ell * q
    K = full(N)
    rows, gens = [], []
    idx = {}

    def sym(d, a):
        a %= d
        if (d, a) not in idx:
            idx[(d, a)] = len(gens)
            gens.append(make_symbol(d, a, K))
        return idx[(d, a)]

    for a in range(1, q):
        row = {}
        for x in range(1, N):
            if math.gcd(x, N) == 1 and x % q == a:
                row[sym(N, x)] = row.get(sym(N, x), 0) + 1
        row[sym(q, a)] = row.get(sym(q, a), 0) - 1
        if ell != q:
            j = sym(q, a * pow(ell, -1, q))
            row[j] = row.get(j, 0) + 1
        rows.append(row)
    dense = [[r.get(i, 0) for i in range(len(gens))] for r in rows]
    assert all(verify_relations(gens, dense))
    # a broken relation must be refuted
    broken = [list(dense[0])]
    broken[0][sym(q, 1)] -= 1
    assert not verify_relations(gens, broken)[0]


def test_relation_lattice_examples(fields):
    F = fields["F"]
    orbit = [s for s in circ_generators(F) if s.d == 91]
    RL = relation_lattice(orbit)
    assert RL.rank == 1
    assert [abs(int(RL.relations[0, j])) for j in range(3)] == [1, 1, 1]
    RL7 = relation_lattice(circ_generators(make_field(7, [6])))
    assert RL7.rank == 0
    assert relation_lattice([make_symbol(7, 1, RATIONALS)]).rank == 0


def test_relation_lattice_stable_under_doubling(fields):
    for name in ("7", "13", "F", "D"):
        gens = reduced_generators(fields[name])
        a = relation_lattice(gens, PrecisionPolicy(initial_bits=192))
        b = relation_lattice(gens, PrecisionPolicy(initial_bits=384))
        assert a.relations == b.relations
