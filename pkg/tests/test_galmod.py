import pytest

from circunits import exactla as la
from circunits.abfield import layer
from circunits.errors import InvalidInput, Unsupported
from circunits.abfield import make_field
from circunits.galmod import (
    CYC,
    SINNOTT,
    WASHINGTON,
    build_layer,
    build_module,
    extension_matrix,
    galois_generators,
    layer_maps,
    norm_chain,
    universal_norms,
)

P = 3


@pytest.mark.parametrize("name", ["7", "13", "F", "D"])
@pytest.mark.parametrize("n", [0, 1, 2])
def test_unit_ranks(fields, name, n):
    F = fields[name]
    for kind in (SINNOTT, WASHINGTON):
        X = build_layer(F, P, n, kind)
        assert X.rank == F.degree * P**n - 1


def test_rationals_have_no_units(fields):
    assert build_module(fields["Q"], SINNOTT).rank == 0


def test_cyc_rank_for_two_prime_conductor(fields):
    # three units plus one generator above each of 7 and 13
    assert build_module(fields["F"], CYC).rank == 4


def test_imaginary_rejected():
    with pytest.raises(Unsupported):
        build_module(make_field(7, [1]), SINNOTT)


def test_washington_needs_p(fields):
    with pytest.raises(InvalidInput):
        build_module(fields["F"], WASHINGTON)


@pytest.mark.parametrize("name", ["F", "D"])
def test_action_is_a_representation(fields, name):
    X = build_layer(fields[name], P, 1, SINNOTT)
    K = X.field
    gens = galois_generators(K)
    I = la.identity(X.rank)
    for a in gens:
        for b in gens:
            assert X.matrix(a) * X.matrix(b) == X.matrix(a * b)
        assert X.matrix(a) ** K.element_order(a) == I
    assert X.matrix(1) == I


@pytest.mark.parametrize("name", ["7", "F", "D"])
def test_sinnott_inside_washington(fields, name):
    # W is only determined p-locally; coordinates raise if C is not inside
    for n in (0, 1):
        C = build_layer(fields[name], P, n, SINNOTT)
        W = build_layer(fields[name], P, n, WASHINGTON)
        Y = extension_matrix(C, W)
        assert Y.nrows() == C.rank and la.rank(Y) == C.rank


@pytest.mark.parametrize("kind", [CYC, SINNOTT, WASHINGTON])
@pytest.mark.parametrize("name", ["7", "13", "F", "D"])
def test_norm_after_extension_is_power(fields, kind, name):
    F = fields[name]
    for n, m in ((0, 1), (0, 2), (1, 2)):
        Nm, Em = layer_maps(F, P, n, m, kind)
        k = m - n
        prod = Em.matrix * Nm.matrix
        assert prod == la.identity(prod.nrows()) * P**k
        if Nm.extra is not None:
            # the rational primes part is killed too
            assert all(x == 0 for x in (Em.matrix * Nm.extra).entries())


def test_norm_chain_needs_depth(fields):
    with pytest.raises(InvalidInput):
        universal_norms(fields["7"], P, 0, 1)


EXPECTED = {"7": (0, []), "13": (0, []), "F": (0, [3]), "D": (2, [])}


@pytest.mark.parametrize("name", sorted(EXPECTED))
@pytest.mark.parametrize("kind", [SINNOTT, WASHINGTON])
def test_universal_norm_examples(fields, name, kind):
    free, tors = EXPECTED[name]
    for n in (0, 1):
        lat, ok = universal_norms(fields[name], P, n, n + 2, kind)
        assert ok
        assert lat.notes["free_rank"] == free
        assert lat.notes["torsion"] == tors
        assert lat.field == layer(fields[name], P, n)


@pytest.mark.parametrize("name", ["F", "D"])
def test_universal_norms_independent_of_depth(fields, name):
    a, _ = universal_norms(fields[name], P, 0, 2)
    b, _ = universal_norms(fields[name], P, 0, 3)
    assert la.p_index_equal(a.basis, b.basis, P)
    ca, cb = norm_chain(fields[name], P, 0, 2, SINNOTT), norm_chain(fields[name], P, 0, 3, SINNOTT)
    assert cb.quotients[:2] == ca.quotients
