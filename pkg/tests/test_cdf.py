import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import integrate, stats

from copdep.cdf import (DegenerateInputError, KernelCdfConfig, copula_transform,
                        ecdf_multivariate, ecdf_univariate, kernel_cdf, kernel_copula_transform)
from copdep.data import DataError, EmptyInputError


def brute_ecdf(data, q):
    n, d = data.shape
    count = 0
    for i in range(n):
        ok = True
        for j in range(d):
            if not data[i, j] <= q[j]:
                ok = False
                break
        count += ok
    return count / n


@pytest.mark.parametrize("data,query,expected", [
    ([1, 2, 3], 2, 2 / 3),
    ([5, 5, 5], 5, 1.0),
    ([1, 2, 3], 0.5, 0.0),
])
def test_ecdf_univariate(data, query, expected):
    assert ecdf_univariate(data, query) == expected


def test_ecdf_univariate_empty():
    with pytest.raises(EmptyInputError):
        ecdf_univariate([], 1.0)


def test_ecdf_multivariate_examples():
    data = np.array([[0, 0], [1, 1]])
    assert ecdf_multivariate(data, [1, 1]) == 1.0
    assert ecdf_multivariate(data, [0, 1]) == 0.5


def test_ecdf_multivariate_shape_error():
    with pytest.raises(DataError):
        ecdf_multivariate(np.zeros((3, 2)), [0, 0, 0])


def test_ecdf_multivariate_matches_brute_force(rng):
    data = rng.standard_normal((50, 3))
    queries = rng.standard_normal((20, 3))
    for q in queries:
        assert ecdf_multivariate(data, q) == brute_ecdf(data, q)


def test_copula_transform_examples():
    assert copula_transform(np.array([[0, 0], [1, 1], [2, 2]])).values.tolist() == [1 / 3, 2 / 3, 1.0]
    assert copula_transform([3.1, -2.0, 0.4]).values.tolist() == [1.0, 1 / 3, 2 / 3]


def test_copula_transform_degenerate():
    with pytest.raises(DegenerateInputError):
        copula_transform([[1.0, 2.0]])


def test_copula_transform_monotone_invariance(rng):
    data = rng.standard_normal((40, 3))
    moved = data.copy()
    moved[:, 1] = np.exp(moved[:, 1])
    assert np.array_equal(copula_transform(data).values, copula_transform(moved).values)


def test_copula_transform_ties_use_weak_inequality():
    w = copula_transform([[1, 1], [1, 1], [0, 2]]).values
    assert w.tolist() == [2 / 3, 2 / 3, 1 / 3]


def test_copula_transform_blocked_path_matches(rng):
    from copdep import cdf
    data = rng.integers(0, 5, size=(300, 2)).astype(float)
    full = copula_transform(data).values
    old = cdf._BLOCK_ROWS
    try:
        cdf._BLOCK_ROWS = 7
        assert np.array_equal(copula_transform(data).values, full)
    finally:
        cdf._BLOCK_ROWS = old


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(2, 25), st.integers(1, 3)),
              elements=st.integers(-3, 3).map(float)))
def test_copula_transform_equals_brute_force(data):
    w = copula_transform(data).values
    expected = [brute_ecdf(data, row) for row in data]
    assert w.tolist() == expected
    n = data.shape[0]
    assert np.all((w >= 1 / n) & (w <= 1))
    assert np.allclose(w * n, np.round(w * n))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=60, unique=True))
def test_probability_integral_transform_exact(values):
    w = np.sort(copula_transform(values).values)
    n = len(values)
    assert np.array_equal(w, np.arange(1, n + 1) / n)
    assert stats.kstest(w, "uniform").statistic <= 1 / n + 1e-12


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 15), st.just(2)), elements=st.floats(-5, 5)),
       arrays(np.float64, (2,), elements=st.floats(-5, 5)),
       arrays(np.float64, (2,), elements=st.floats(0, 3)))
def test_cdf_monotone(data, q, step):
    q2 = q + step
    assert ecdf_multivariate(data, q) <= ecdf_multivariate(data, q2)
    cfg = KernelCdfConfig(0.3)
    assert kernel_cdf(data, cfg, q) <= kernel_cdf(data, cfg, q2) + 1e-15


def test_empirical_copula_near_product_under_independence():
    rng = np.random.default_rng(7)
    n = 10_000
    x = rng.standard_normal(n)
    y = rng.standard_normal(n)
    # empirical copula on the marginal pseudo-observations
    u = copula_transform(x).values
    v = copula_transform(y).values
    for a in (0.25, 0.5, 0.75):
        for b in (0.25, 0.5, 0.75):
            c = np.mean((u <= a) & (v <= b))
            assert abs(c - a * b) <= 5 / np.sqrt(n)


def test_kernel_cdf_examples():
    assert kernel_cdf([0.0], KernelCdfConfig(1.0), [0.0]) == 0.5
    assert kernel_cdf([0.0], KernelCdfConfig(1.0), [np.inf]) == 1.0


def test_kernel_cdf_matches_quadrature():
    data = np.array([-1.0, 1.0])
    h = 0.5

    def density(t):
        return np.mean(stats.norm.pdf((t - data) / h)) / h

    oracle, _ = integrate.quad(density, -np.inf, 0.0, epsabs=1e-12)
    assert kernel_cdf(data, KernelCdfConfig(h), [0.0]) == pytest.approx(oracle, abs=1e-6)


def test_kernel_cdf_2d_matches_quadrature(rng):
    data = rng.standard_normal((4, 2))
    h = 0.7

    def density(t2, t1):
        z = (np.array([t1, t2]) - data) / h
        return np.mean(np.prod(stats.norm.pdf(z), axis=1)) / h ** 2

    q = np.array([0.2, -0.1])
    oracle, _ = integrate.dblquad(density, -12, q[0], -12, q[1], epsabs=1e-10)
    assert kernel_cdf(data, KernelCdfConfig(h), q) == pytest.approx(oracle, abs=1e-6)


def test_kernel_cdf_small_bandwidth_tends_to_ecdf(rng):
    data = rng.standard_normal((30, 2))
    cfg = KernelCdfConfig(1e-6)
    for q in rng.standard_normal((10, 2)):
        assert abs(kernel_cdf(data, cfg, q) - ecdf_multivariate(data, q)) <= 1e-4


def test_kernel_config_validation():
    with pytest.raises(ValueError):
        KernelCdfConfig(0.0)


def test_kernel_copula_transform_rows(rng):
    data = rng.standard_normal((12, 2))
    cfg = KernelCdfConfig(0.4)
    w = kernel_copula_transform(data, cfg).values
    assert np.allclose(w, [kernel_cdf(data, cfg, row) for row in data], atol=1e-15)
