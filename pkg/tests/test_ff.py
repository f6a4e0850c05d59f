import itertools

import numpy as np
import pytest
import sympy

from motkit import _kernels, ff


def test_is_prime_matches_sympy():
    for n in range(-3, 2000):
        assert ff.is_prime(n) == sympy.isprime(n)


@pytest.mark.parametrize("bad", [0, 1, 4, 9, 1 << 20, (1 << 20) + 7])
def test_check_prime_rejects(bad):
    with pytest.raises(ValueError):
        ff.check_prime(bad)


def test_check_prime_accepts_largest_supported():
    assert ff.check_prime(1048573) == 1048573  # largest prime below 2^20


def _span_size(rows, p):
    """Count distinct combinations by brute force."""
    rows = np.asarray(rows) % p
    seen = set()
    for coeffs in itertools.product(range(p), repeat=len(rows)):
        seen.add(tuple((np.array(coeffs) @ rows) % p) if len(rows) else ())
    return len(seen)


@pytest.mark.parametrize("p", [2, 3])
def test_rank_against_enumeration(p, rng):
    for _ in range(30):
        m = rng.integers(0, p, (rng.integers(1, 5), rng.integers(1, 5)))
        assert p ** ff.rank(m, p) == _span_size(m, p)


def test_rref_known_example():
    # over GF(5): row0/2 = (1, 2, 3); row1 - that = (0, 0, 1); clear column 2 above
    r, piv = ff.rref(np.array([[2, 4, 1], [1, 2, 4]]), 5)
    assert list(piv) == [0, 2]
    assert r.tolist() == [[1, 2, 0], [0, 0, 1]]


@pytest.mark.parametrize("p", [2, 3, 7])
def test_nullspace_and_solve(p, rng):
    for _ in range(20):
        a = rng.integers(0, p, (4, 6))
        ker = ff.nullspace(a, p)
        assert ker.shape[0] == 6 - ff.rank(a, p)
        assert not ((a @ ker.T) % p).any()
        x0 = rng.integers(0, p, 6)
        b = (a @ x0) % p
        x, _ = ff.solve_linear(a, b, p)
        assert np.array_equal((a @ x) % p, b)


def test_solve_inconsistent():
    x, ker = ff.solve_linear(np.array([[1, 1], [1, 1]]), np.array([0, 1]), 2)
    assert x is None
    assert ker.tolist() == [[1, 1]]


def test_inverse_roundtrip(rng):
    p = 11
    m = np.array([[1, 2], [3, 4]])
    inv = ff.inverse(m, p)
    assert ff.mat_mul(m, inv, p).tolist() == [[1, 0], [0, 1]]
    with pytest.raises(ZeroDivisionError):
        ff.inverse(np.array([[1, 2], [2, 4]]), p)


def _all_vectors(space):
    return {tuple((np.array(c) @ space.basis) % space.p) if space.dim else (0,) * space.ambient
            for c in itertools.product(range(space.p), repeat=space.dim)}


def test_subspace_operations_against_sets(rng):
    p, n = 2, 5
    for _ in range(25):
        u = ff.Subspace.span(rng.integers(0, p, (2, n)), p, n)
        v = ff.Subspace.span(rng.integers(0, p, (3, n)), p, n)
        su, sv = _all_vectors(u), _all_vectors(v)
        assert _all_vectors(u & v) == su & sv
        assert (u + v).dim + (u & v).dim == u.dim + v.dim
        for vec in su:
            assert u.contains(np.array(vec))
        assert u.contains_space(u & v)


def test_subspace_coords():
    s = ff.Subspace.span(np.array([[1, 0, 1], [0, 1, 1]]), 3, 3)
    v = np.array([2, 1, 0])  # 2*(1,0,1) + (0,1,1) = (2,1,3)=(2,1,0)
    assert s.coords(v).tolist() == [2, 1]


def test_polynomial_helpers():
    p = 5
    f = [1, 0, 1]  # 1 + x^2
    g = [4, 1]  # x - 1
    q, r = ff.poly_divmod(f, g, p)
    assert ff.poly_trim(ff.poly_sub(f, ff.poly_mul(q, g, p), p)) == ff.poly_trim(r)
    d, s, t = ff.poly_gcdex(f, g, p)
    lhs = [(a + b) % p for a, b in itertools.zip_longest(ff.poly_mul(s, f, p), ff.poly_mul(t, g, p), fillvalue=0)]
    assert ff.poly_trim(lhs) == ff.poly_trim(d)
    assert ff.poly_trim(d) == [1]  # 1 + x^2 = (x-2)(x-3) over GF(5), coprime to x - 1


def test_factor_poly_over_gf5():
    # x^2 + 1 = (x + 2)(x + 3) over GF(5)
    assert ff.factor_poly([1, 0, 1], 5) == [([2, 1], 1), ([3, 1], 1)]
    # x^2 + x + 1 irreducible over GF(2)
    assert ff.factor_poly([1, 1, 1], 2) == [([1, 1, 1], 1)]


def test_min_poly_jordan_block():
    j = np.array([[0, 1, 0], [0, 0, 1], [0, 0, 0]])
    assert ff.min_poly(j, 3) == [0, 0, 0, 1]
    assert ff.min_poly(np.eye(3, dtype=np.int64), 3) == [2, 1]  # x - 1


@pytest.mark.skipif(not _kernels._HAVE_NUMBA, reason="numba unavailable")
@pytest.mark.parametrize("p", [2, 3, 65521])
def test_backends_agree(p, rng):
    for _ in range(10):
        a = rng.integers(0, p, (7, 9))
        b = rng.integers(0, p, (9, 4))
        assert np.array_equal(_kernels.matmul_numpy(a, b, p), _kernels.matmul_numba(a, b, p))
        r1, p1 = _kernels.rref_numpy(a, p)
        r2, p2 = _kernels.rref_numba(a, p)
        assert np.array_equal(r1, r2) and np.array_equal(p1, p2)


def test_backend_switch_env(monkeypatch):
    import importlib

    monkeypatch.setenv("MOTKIT_NO_NUMBA", "1")
    mod = importlib.reload(_kernels)
    try:
        assert mod.BACKEND == "numpy"
    finally:
        monkeypatch.delenv("MOTKIT_NO_NUMBA")
        importlib.reload(_kernels)
