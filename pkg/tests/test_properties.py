"""Randomized algebraic identities, driven by hypothesis."""

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from motkit import _kernels, ff
from motkit.correspondence import compose, diagonal, external_product, random_homogeneous, transpose
from motkit.motive import MotiveSummand, classify, dual_summand, profile, random_projector
from tests.conftest import small_model

MODELS = {p: small_model(p) for p in (2, 3, 5)}
EXPRS = [("P1",), ("P2",), ("C",), ("Q3",), ("P1", "C"), ("Q",)]

primes = st.sampled_from([2, 3, 5])
exprs = st.sampled_from(EXPRS)
twists = st.integers(-2, 2)
seeds = st.integers(0, 2**32 - 1)
fast = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@fast
@given(primes, st.tuples(exprs, exprs, exprs, exprs), st.tuples(twists, twists, twists, twists), seeds)
def test_category_laws(p, es, ts, seed):
    m, rng = MODELS[p], np.random.default_rng(seed)
    a, b, c, d = es
    f = random_homogeneous(m, a, b, ts[0], ts[1], rng)
    g = random_homogeneous(m, b, c, ts[1], ts[2], rng)
    h = random_homogeneous(m, c, d, ts[2], ts[3], rng)
    assert compose(h, compose(g, f)) == compose(compose(h, g), f)
    assert compose(diagonal(m, b, ts[1]), f) == f == compose(f, diagonal(m, a, ts[0]))
    assert transpose(transpose(f)) == f
    assert transpose(compose(g, f)) == compose(transpose(f), transpose(g))


@fast
@given(primes, exprs, exprs, twists, seeds)
def test_composition_is_bilinear(p, a, b, t, seed):
    m, rng = MODELS[p], np.random.default_rng(seed)
    f1, f2 = (random_homogeneous(m, a, b, 0, t, rng) for _ in range(2))
    g = random_homogeneous(m, b, a, t, 0, rng)
    assert compose(g, f1 + f2) == compose(g, f1) + compose(g, f2)
    assert compose(g, 2 * f1) == 2 * compose(g, f1)


@fast
@given(primes, exprs, exprs, seeds)
def test_external_product_of_diagonals(p, a, b, seed):
    m = MODELS[p]
    prod = external_product(diagonal(m, a), diagonal(m, b))
    assert prod.coeffs.tolist() == diagonal(m, a + b).coeffs.tolist()


@fast
@given(st.sampled_from([2, 3]), st.sampled_from([("P2",), ("P1", "P1"), ("Q3",), ("P1", "C")]), twists, seeds)
def test_duality_swaps_bottom_top_and_flags(p, expr, twist, seed):
    m, rng = MODELS[p], np.random.default_rng(seed)
    amb = MotiveSummand.whole(m, expr, twist=twist)
    n = random_projector(m, expr, rng, twist=twist)
    pn, pd = profile(n), profile(dual_summand(n))
    assert (pd.bottom, pd.top) == (-pn.top, -pn.bottom)
    c, cd = classify(n, amb), classify(dual_summand(n), dual_summand(amb))
    assert (cd.upper, cd.lower) == (c.lower, c.upper)


@fast
@given(st.sampled_from([2, 3]), exprs, twists, seeds)
def test_profile_methods_agree(p, expr, twist, seed):
    n = random_projector(MODELS[p], expr, np.random.default_rng(seed), twist=twist)
    assert profile(n, "matrix") == profile(n, "chow")


@fast
@given(st.sampled_from([2, 3, 7, 65521]), st.integers(1, 9), st.integers(1, 9), seeds)
def test_rank_nullity(p, r, c, seed):
    a = np.random.default_rng(seed).integers(0, p, (r, c))
    assert ff.rank(a, p) + ff.nullspace(a, p).shape[0] == c


@fast
@given(st.sampled_from([2, 3, 65521]), st.integers(1, 8), st.integers(1, 8), seeds)
def test_numpy_kernels_match_active_backend(p, r, c, seed):
    a = np.random.default_rng(seed).integers(0, p, (r, c))
    b = np.random.default_rng(seed + 1).integers(0, p, (c, r))
    assert np.array_equal(_kernels.matmul_numpy(a, b, p), ff.mat_mul(a, b, p))
    r1, piv1 = _kernels.rref_numpy(a, p)
    r2, piv2 = ff.rref(a, p)
    assert list(piv1) == list(piv2)
    assert np.array_equal(r1[:len(piv1)], r2[:len(piv2)])
    assert not r1[len(piv1):].any()
