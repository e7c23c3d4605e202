import pytest

from circunits.abfield import character_field, cubic_fields_two_primes, layer, splitting_data
from circunits.asympt import (
    PASS,
    TRIVIAL,
    cond2_identity,
    kn_estimate,
    phi_report,
    tor_phi_inertia,
    verify_predictions,
)
from circunits.errors import InvalidInput
from circunits.exactla import FiniteAbelianGroup
from circunits.galmod import SINNOTT, WASHINGTON

from conftest import cubic

P = 3
Z3 = FiniteAbelianGroup.from_orders([3])


@pytest.mark.parametrize("name,free,tors", [("7", 0, TRIVIAL), ("13", 0, TRIVIAL),
                                             ("F", 0, Z3), ("D", 2, TRIVIAL), ("Q", 0, TRIVIAL)])
def test_phi_examples(fields, name, free, tors):
    r = phi_report(fields[name], P, 0)
    assert (r.free_rank, r.torsion, r.stabilized) == (free, tors, True)
    assert r.status == "OK"
    assert r.free_rank == r.predicted_rank


@pytest.mark.parametrize("name", ["7", "F", "D"])
def test_phi_stable_in_depth(fields, name):
    for kind in (SINNOTT, WASHINGTON):
        a = phi_report(fields[name], P, 0, 2, kind)
        b = phi_report(fields[name], P, 0, 3, kind)
        assert (a.free_rank, a.torsion) == (b.free_rank, b.torsion)


def test_phi_quotients(fields):
    r = phi_report(fields["D"], P, 0)
    assert r.quotient_by(2) == FiniteAbelianGroup.from_orders([9, 9])
    assert r.torsion_by(2) == TRIVIAL
    f = phi_report(fields["F"], P, 0)
    assert f.quotient_by(1) == Z3 and f.torsion_by(3) == Z3


def test_phi_rejects_cyc(fields):
    with pytest.raises(InvalidInput):
        phi_report(fields["7"], P, 0, kind="CYC")


@pytest.mark.parametrize("name", ["Q", "7", "F"])
def test_kn_trivial(fields, name):
    est = kn_estimate(fields[name], P, 0, [1, 2])
    assert est.consistent and est.stabilized
    assert est.kn == TRIVIAL
    assert all(g == TRIVIAL for g in est.pairs.values())


def test_kn_needs_higher_levels(fields):
    with pytest.raises(InvalidInput):
        kn_estimate(fields["7"], P, 1, [1])


@pytest.mark.parametrize("name", ["Q", "7", "13", "F", "D"])
def test_verify_level_one(fields, name):
    rep = verify_predictions(fields[name], P, 0, 1)
    assert [c.id for c in rep.claims] == ["a", "b", "c", "d", "e"]
    assert all(c.verdict == PASS for c in rep.claims), rep.to_dict()
    s = splitting_data(layer(fields[name], P, 0), P).s_plus
    a = rep.claim("a").computed
    assert a["h0"] == TRIVIAL and a["h_minus1"] == FiniteAbelianGroup.from_orders([3] * s)


def test_cohomology_order_for_F(fields):
    rep = verify_predictions(fields["F"], P, 0, 1)
    assert rep.claim("c").computed["h0"].order == 3


def test_cond2(fields):
    for name in ("7", "F", "D"):
        assert cond2_identity(fields[name], P, 0)


@pytest.mark.parametrize("name,expected", [("F", Z3), ("7", TRIVIAL), ("D", TRIVIAL)])
def test_inertia_torsion(fields, name, expected):
    t = tor_phi_inertia(fields[name], P, 0)
    assert t.group == expected
    assert t.caveats == []
    assert t.group == phi_report(fields[name], P, 0).torsion


def test_d_frobenius_is_trivial(fields):
    assert tor_phi_inertia(fields["D"], P, 0).order == 1


# real cubic fields in which 3 is inert
SINGLE = [7, 13, 31, 43]
DOUBLE = [(7, 13), (7, 31), (13, 31), (7, 43)]


@pytest.mark.parametrize("ell", SINGLE)
def test_dichotomy_one_prime(ell):
    K = cubic(ell)
    assert splitting_data(K, P).s_plus == 1
    r = phi_report(K, P, 0)
    assert r.stabilized and r.free_rank == 0 and r.torsion == TRIVIAL


@pytest.mark.parametrize("l1,l2", DOUBLE)
def test_dichotomy_two_primes(l1, l2):
    K = cubic_fields_two_primes(l1, l2)[0]
    assert splitting_data(K, P).s_plus == 1
    r = phi_report(K, P, 0)
    assert r.stabilized and r.free_rank == 0 and r.torsion == Z3
    assert tor_phi_inertia(K, P, 0, certify=False).group == Z3


def test_split_cubic_outside_dichotomy():
    # 3 is a cube mod 61, so 3 splits and Phi_0 is free of rank s+ - 1
    K = character_field(3, {61: 1})
    assert splitting_data(K, P).s_plus == 3
    r = phi_report(K, P, 0)
    assert r.free_rank == 2 and r.torsion == TRIVIAL

