import numpy as np
import pytest

from motkit.chow import ChowModel, projective_space, split_quadric_odd
from motkit.correspondence import (Correspondence, act_on_cycle, compose, cycle, diag_pullback, diagonal,
                                   external_product, fundamental, generic_fiber, intersection_product,
                                   permute_cycle, random_homogeneous, regroup, transpose)
from tests.conftest import small_model


def test_basis_products_compose_to_kronecker_delta():
    """(x_i × y) ∘ (y' × x*_j) = δ_ij (y' × y), computed on P² with explicit vectors."""
    p = 5
    m = ChowModel(p, [projective_space(2, "X"), projective_space(1, "W"), projective_space(1, "Z")])
    dual = m.ante_dual(("X",))
    y, y2 = np.array([0, 1]), np.array([1, 0])  # y = [Z], y' = pt_W
    for i in range(3):
        for j in range(3):
            tx = 0 - j  # dim y' + dim x*_j - dim X
            inner = Correspondence(m, ("W",), ("X",), np.outer(y2, dual[j]), 0, tx)
            # target twist: dim x_i + dim y - dim Z + tx, and dim y = dim Z = 1
            outer = Correspondence(m, ("X",), ("Z",), np.outer(np.eye(3, dtype=np.int64)[i], y), tx, i + tx)
            got = compose(outer, inner)
            expect = np.outer(y2, y) if i == j else np.zeros((2, 2), dtype=np.int64)
            assert got.coeffs.tolist() == expect.tolist()


def test_diagonal_is_identity_p2():
    m = ChowModel(3, [projective_space(2, "P2")])
    d = diagonal(m, ("P2",))
    # Δ = e0×e2 + e1×e1 + e2×e0 for the antidiagonal Gram
    assert sorted(d.terms()) == [(1, "e0", "e2"), (1, "e1", "e1"), (1, "e2", "e0")]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_category_laws_random(p, rng):
    m = small_model(p)
    exprs = [("P1",), ("P2",), ("C",), ("P1", "C"), ("Q3",)]
    for _ in range(40):
        a, b, c, d = (exprs[k] for k in rng.integers(0, len(exprs), 4))
        ta, tb, tc, td = (int(x) for x in rng.integers(-2, 3, 4))
        f = random_homogeneous(m, a, b, ta, tb, rng)
        g = random_homogeneous(m, b, c, tb, tc, rng)
        h = random_homogeneous(m, c, d, tc, td, rng)
        assert compose(h, compose(g, f)) == compose(compose(h, g), f)
        assert compose(diagonal(m, b, tb), f) == f
        assert compose(f, diagonal(m, a, ta)) == f
        assert transpose(transpose(f)) == f
        assert transpose(compose(g, f)) == compose(transpose(f), transpose(g))


def test_transpose_twists():
    m = ChowModel(2, [projective_space(1, "A"), projective_space(2, "B")])
    f = Correspondence.from_terms(m, "A", "B", [(1, ("e1", "e0"))], source_twist=3)
    t = transpose(f)
    assert (t.source, t.target) == (("B",), ("A",))
    assert (t.source_twist, t.target_twist) == (-2 - f.target_twist, -1 - 3)
    assert t.terms() == [(1, "e0", "e1")]


def test_from_terms_rejects_inhomogeneous():
    m = ChowModel(2, [projective_space(1, "A")])
    with pytest.raises(ValueError):
        Correspondence.from_terms(m, "A", "A", [(1, ("e0", "e0")), (1, ("e1", "e1"))])


def test_act_on_cycle_point_times_line():
    """pt×[P¹] acting on P¹: pt ↦ 0 and [P¹] ↦ [P¹] (pairing of the point with the source)."""
    m = ChowModel(3, [projective_space(1, "P1")])
    a = Correspondence.from_terms(m, "P1", "P1", [(1, ("e0", "e1"))])
    assert act_on_cycle(a, np.array([1, 0])).flat.tolist() == [0, 0]
    assert act_on_cycle(a, np.array([0, 1])).flat.tolist() == [0, 1]
    b = Correspondence.from_terms(m, "P1", "P1", [(1, ("e1", "e0"))])
    assert act_on_cycle(b, np.array([1, 0])).flat.tolist() == [1, 0]
    assert act_on_cycle(b, np.array([0, 1])).flat.tolist() == [0, 0]


def test_diag_pullback_conic_smoke_step():
    m = ChowModel(2, [split_quadric_odd(1, "C")])
    d = diagonal(m, "C")
    vec = np.kron(d.flat, m.fundamental_class(("C",)))  # Δ_C × [C]
    h2 = Correspondence.from_flat(m, ("C",), ("C", "C"), vec, 0, 0)
    assert diag_pullback(h2, ("C",)) == d
    assert generic_fiber(h2, ("C",)) == d


def test_generic_fiber_drops_correction_terms():
    m = ChowModel(2, [projective_space(1, "P1")])
    vec = np.zeros(8, dtype=np.int64)
    vec[[1, 6]] = 1  # e0×e0×e1 + e1×e1×e0
    t = Correspondence.from_flat(m, ("P1",), ("P1", "P1"), vec, 0, 0)
    assert generic_fiber(t, ("P1",)).terms() == [(1, "e0", "e0")]


def test_intersection_with_fundamental(rng):
    m = small_model(3)
    e = ("P1", "C")
    v = cycle(m, e, np.array([0, 1, 2, 0]))
    one = fundamental(m, e)
    assert intersection_product(v, one).flat.tolist() == v.flat.tolist()


def test_external_product_interchange(rng):
    m = small_model(3)
    for _ in range(20):
        a = random_homogeneous(m, "P1", "C", 0, 0, rng)
        c = random_homogeneous(m, "C", "P1", 0, 0, rng)
        b = random_homogeneous(m, "P2", "P2", 0, 0, rng)
        d = random_homogeneous(m, "P2", "P2", 0, 0, rng)
        lhs = compose(external_product(c, d), external_product(a, b))
        rhs = external_product(compose(c, a), compose(d, b))
        assert lhs == rhs


def test_permute_roundtrip(rng):
    m = small_model(5)
    e = ("P1", "P2", "C")
    vec = rng.integers(0, 5, m.size(e))
    e2, v2 = permute_cycle(m, e, vec, [2, 0, 1])
    assert e2 == ("C", "P1", "P2")
    e3, v3 = permute_cycle(m, e2, v2, [1, 2, 0])
    assert e3 == e and v3.tolist() == vec.tolist()


def test_regroup_swap_is_transpose(rng):
    m = small_model(3)
    f = random_homogeneous(m, "P1", "P2", 0, 0, rng)
    g = regroup(f, [1, 0], 1, source_twist=transpose(f).source_twist)
    assert g == transpose(f)


def test_compose_checks_shapes():
    m = small_model(2)
    f = diagonal(m, "P1")
    g = diagonal(m, "P2")
    with pytest.raises(ValueError):
        compose(f, g)
    with pytest.raises(ValueError):
        compose(f, diagonal(m, "P1", 1))


def test_powers_and_arithmetic():
    m = small_model(3)
    d = diagonal(m, "P1")
    assert d ** 3 == d
    assert (d + d) == 2 * d
    assert (d - d).is_zero()
    assert (d @ d) == d
