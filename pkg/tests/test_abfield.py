import pytest

from circunits.abfield import (
    RATIONALS,
    character_field,
    compositum,
    cubic_fields_two_primes,
    euler_phi,
    inertia_decomposition,
    intersection,
    layer,
    make_field,
    p_closure,
    parse_field,
    splitting_data,
    tower_constants,
)
from circunits.errors import InvalidInput, Unsupported

from conftest import cubic
from oracles import orbit_group_order


def test_cubic_of_conductor_seven():
    F = make_field(7, [6])
    assert (F.degree, F.conductor, F.totally_real) == (3, 7, True)
    assert str(F) == "7:1,6"
    assert parse_field("7:1,6") == F


def test_rationals():
    assert RATIONALS.degree == 1 and RATIONALS.conductor == 1
    assert make_field(1) == RATIONALS
    assert make_field(12, [5, 7, 11]) == RATIONALS


def test_canonical_form_is_at_conductor():
    F = make_field(21, [2, 8, 20])  # contains the fixed field of <2,-1> mod 7
    assert F.modulus == F.conductor


@pytest.mark.parametrize("f", [7, 9, 13, 15, 21, 28, 91])
def test_degree_against_flood_fill(f):
    for gens in ([f - 1], [2 % f or 1, f - 1]):
        gens = [g for g in gens if g % f and __import__("math").gcd(g, f) == 1]
        F = make_field(f, gens)
        assert F.degree * orbit_group_order(gens, f) == euler_phi(f)


def test_bare_modulus_is_full_cyclotomic_field():
    assert parse_field("7").degree == 6


def test_parse_rejects_garbage():
    for bad in ("x:1", "7:1,x", "7:1,7", "-3:1"):
        with pytest.raises(InvalidInput):
            parse_field(bad)


def test_splitting_of_inert_cubic():
    sd = splitting_data(make_field(7, [6]), 3)
    assert (sd.e, sd.f_res, sd.s, sd.s_plus) == (1, 3, 1, 1)


def test_conductor_91_fields():
    F, D = cubic_fields_two_primes(7, 13)
    assert F.conductor == D.conductor == 91
    assert splitting_data(F, 3).s == 1
    assert splitting_data(D, 3).s == 3
    I, Dec, sigma = inertia_decomposition(F, 3)
    assert I == F and sigma.generates()
    L = compositum(cubic(7), cubic(13))
    assert L.degree == 9 and F.is_subfield_of(L) and D.is_subfield_of(L)
    assert intersection(F, D) == RATIONALS


def test_tower_layers():
    K = make_field(7, [6])
    K1 = layer(K, 3, 1)
    assert K1.degree == 9 and K1.conductor == 63
    assert layer(K, 3, 0) == K
    # a field already inside the tower
    B1 = layer(RATIONALS, 3, 1)
    assert B1.conductor == 9 and B1.degree == 3
    assert layer(B1, 3, 1) == layer(RATIONALS, 3, 2)
    assert str(layer(cubic_at_9(), 3, 1)) == "27:1,26"


def cubic_at_9():
    return make_field(9, [8])


def test_tower_constants():
    tc = tower_constants(make_field(7, [6]), 3)
    assert (tc.n_d, tc.n_i, tc.e0) == (0, 0, 0)
    tc = tower_constants(cubic_at_9(), 3)
    assert tc.e0 == 1


def test_even_p_rejected():
    with pytest.raises(Unsupported):
        layer(RATIONALS, 2, 1)


def test_character_field_and_closure():
    K = character_field(3, {13: 1})
    assert K.degree == 3 and K.conductor == 13
    assert p_closure(K, 3) == K
    F, _ = cubic_fields_two_primes(7, 13)
    L = p_closure(F, 3)
    assert L.degree == 9 and L.totally_real and F.is_subfield_of(L)
    assert p_closure(RATIONALS, 3) == RATIONALS


def test_galois_element_order():
    K = make_field(7, [6])
    assert K.galois_element(3).order == 3
    assert K.galois_element(6).order == 1
