import itertools

import numpy as np
import pytest

from motkit import ff
from motkit.algebra import (FiniteAlgebra, idempotent_power, is_field, jacobson_radical, lift_idempotent,
                            primitive_decomposition, radical_brute_force, radical_trace, verify_radical)


def poly_algebra(modulus, p):
    """GF(p)[x]/(modulus) with basis 1, x, ..., x^(d-1); modulus lowest degree first, monic."""
    d = len(modulus) - 1
    consts = np.zeros((d, d, d), dtype=np.int64)
    for i, j in itertools.product(range(d), repeat=2):
        prod = [0] * (i + j) + [1]
        _, r = ff.poly_divmod(prod, modulus, p)
        r = ff.poly_trim(r)
        consts[i, j, :len(r)] = r
    unit = np.zeros(d, dtype=np.int64)
    unit[0] = 1
    return FiniteAlgebra(p, consts, unit)


def matrix_algebra(mats, p):
    n = mats[0].shape[0]
    basis = np.array([m.ravel() for m in mats])
    mul = lambda x, y: ff.mat_mul(x.reshape(n, n), y.reshape(n, n), p).ravel()  # noqa: E731
    alg, span = FiniteAlgebra.from_basis(basis, mul, np.eye(n, dtype=np.int64).ravel(), p)
    return alg, span


def e_(i, j, n=2):
    m = np.zeros((n, n), dtype=np.int64)
    m[i, j] = 1
    return m


def elements(alg):
    for c in itertools.product(range(alg.p), repeat=alg.n):
        yield np.array(c, dtype=np.int64)


def test_gf2_s_squared_minus_one():
    alg = poly_algebra([1, 0, 1], 2)  # s^2 - 1 = s^2 + 1 = (s + 1)^2 over GF(2)
    j = jacobson_radical(alg)
    assert j.dim == 1 and j.contains(np.array([1, 1]))
    assert radical_trace(alg) == radical_brute_force(alg)
    assert len(primitive_decomposition(alg)) == 1


def test_dual_numbers_lift():
    alg = poly_algebra([0, 0, 1], 3)  # GF(3)[x]/x^2
    assert jacobson_radical(alg).contains(np.array([0, 1]))
    assert lift_idempotent(alg, np.array([1, 0])).tolist() == [1, 0]
    prims = primitive_decomposition(alg)
    assert len(prims) == 1 and prims[0].element.tolist() == [1, 0]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_full_matrix_algebra(p):
    alg, _ = matrix_algebra([e_(0, 0), e_(0, 1), e_(1, 0), e_(1, 1)], p)
    assert jacobson_radical(alg).dim == 0
    prims = primitive_decomposition(alg, seed=7)
    assert len(prims) == 2
    a, b = (pr.element for pr in prims)
    assert np.array_equal(alg.mul(a, a), a) and np.array_equal(alg.mul(b, b), b)
    assert not alg.mul(a, b).any() and not alg.mul(b, a).any()
    assert np.array_equal((a + b) % p, alg.unit)


def test_upper_triangular():
    p = 3
    alg, span = matrix_algebra([e_(0, 0), e_(0, 1), e_(1, 1)], p)
    j = jacobson_radical(alg)
    assert j.dim == 1
    # the radical is spanned by the strictly upper triangular matrix
    assert j.contains(span.coords(e_(0, 1).ravel()))
    assert len(primitive_decomposition(alg)) == 2


def test_gf4_is_a_field():
    alg = poly_algebra([1, 1, 1], 2)
    assert is_field(alg)
    assert jacobson_radical(alg).dim == 0
    prims = primitive_decomposition(alg)
    assert len(prims) == 1 and "enumerated" in prims[0].certificate


@pytest.mark.parametrize("modulus,p", [
    ([0, 1, 1], 2),           # x(x + 1)
    ([2, 0, 1], 3),           # x^2 - 1 = (x - 1)(x + 1)
    ([1, 0, 0, 1], 2),        # x^3 + 1 = (x + 1)(x^2 + x + 1)
    ([0, 0, 1, 1], 2),        # x^2 (x + 1)
    ([1, 0, 1, 0, 1], 3),     # x^4 + x^2 + 1
])
def test_commutative_quotients_count_by_factorization(modulus, p):
    """Primitive idempotents of GF(p)[x]/(f) correspond to distinct irreducible factors of f."""
    alg = poly_algebra(modulus, p)
    distinct = len(ff.factor_poly(modulus, p))
    assert len(primitive_decomposition(alg)) == distinct


@pytest.mark.parametrize("p", [2, 3])
def test_radical_methods_agree_on_random_subalgebras(p, rng):
    """Algebras generated by a couple of random 3x3 matrices."""
    n = 3
    for _ in range(8):
        gens = [rng.integers(0, p, (n, n)) for _ in range(2)]
        # close the span under multiplication
        span = ff.Subspace.span(np.array([np.eye(n, dtype=np.int64).ravel()] + [g.ravel() for g in gens]), p)
        while True:
            prods = [ff.mat_mul(a.reshape(n, n), b.reshape(n, n), p).ravel()
                     for a in span.basis for b in span.basis]
            bigger = span.extend(np.array(prods))
            if bigger.dim == span.dim:
                break
            span = bigger
        mul = lambda x, y: ff.mat_mul(x.reshape(n, n), y.reshape(n, n), p).ravel()  # noqa: E731
        alg, _ = FiniteAlgebra.from_basis(span.basis, mul, np.eye(n, dtype=np.int64).ravel(), p)
        j = radical_trace(alg)
        assert verify_radical(alg, j) is None
        if p ** alg.n <= 1 << 12:
            assert j == radical_brute_force(alg)
        prims = primitive_decomposition(alg, seed=1)
        total = sum(pr.element for pr in prims) % p
        assert np.array_equal(total, alg.unit)


def test_idempotent_power_table():
    p = 2
    mul = lambda a, b: ff.mat_mul(a, b, p)  # noqa: E731
    key = lambda a: a.tobytes()  # noqa: E731
    unipotent = np.array([[1, 1], [0, 1]])
    r = idempotent_power(unipotent, mul, key)
    assert (r.m, r.r, r.n) == (1, 2, 2) and r.e.tolist() == [[1, 0], [0, 1]]
    nil = np.array([[0, 1], [0, 0]])
    assert idempotent_power(nil, mul, key).trivial
    proj = np.array([[1, 1], [0, 0]])
    r = idempotent_power(proj, mul, key)
    assert (r.m, r.r, r.n) == (1, 1, 1)


def test_idempotent_power_mixed_tail_and_cycle():
    """x = diag(J, c) over GF(3) with J nilpotent of index 2 and c of order 2: m = 2, r = 2, n = 2."""
    p = 3
    x = np.array([[0, 1, 0], [0, 0, 0], [0, 0, 2]])
    mul = lambda a, b: ff.mat_mul(a, b, p)  # noqa: E731
    r = idempotent_power(x, mul, lambda a: a.tobytes())
    assert (r.m, r.r, r.n) == (2, 2, 2)
    assert r.e.tolist() == [[0, 0, 0], [0, 0, 0], [0, 0, 1]]


def test_finite_algebra_shape_check():
    with pytest.raises(ValueError):
        FiniteAlgebra(2, np.zeros((2, 2, 3)), np.array([1, 0]))
