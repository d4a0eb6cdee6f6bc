import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from copdep.cdf import DegenerateInputError
from copdep.data import DataError
from copdep.smoothing import SmootherConfig, smooth_conditional_mean


def brute_running_mean(u, z, w):
    """Window of w sorted positions around each point, truncated, tie groups kept whole."""
    n = len(u)
    if w >= n:
        return np.full(n, np.mean(z))
    before = (w - 1) // 2
    after = w - 1 - before
    rank_lo = np.array([np.sum(u < ui) for ui in u])          # first sorted position of tie group
    rank_hi = np.array([np.sum(u <= ui) - 1 for ui in u])     # last sorted position of tie group
    us = np.sort(u)
    out = np.empty(n)
    for i in range(n):
        lo = max(rank_lo[i] - before, 0)
        hi = min(rank_hi[i] + after, n - 1)
        left, right = us[lo], us[hi]
        members = (u >= left) & (u <= right)
        out[i] = z[members].mean()
    return out


def cfg_for_window(w, n):
    return SmootherConfig(span=w / n, min_window=1)


def test_hand_example():
    u = np.arange(1.0, 6.0)
    out = smooth_conditional_mean(u, u, cfg_for_window(3, 5))
    assert np.allclose(out, [1.5, 2, 3, 4, 4.5], rtol=0, atol=1e-15)
    assert np.allclose(brute_running_mean(u, u, 3), [1.5, 2, 3, 4, 4.5])


@pytest.mark.parametrize("c", [0.1, -3.7, 1e8])
def test_constant_is_reproduced_exactly(rng, c):
    u = rng.standard_normal(50)
    out = smooth_conditional_mean(u, np.full(50, c))
    assert np.all(out == c)


def test_global_window(rng):
    u = rng.standard_normal(30)
    z = rng.standard_normal(30)
    out = smooth_conditional_mean(u, z, SmootherConfig(span=1.0))
    assert np.allclose(out, z.mean(), atol=1e-14)


@settings(max_examples=80, deadline=None)
@given(st.integers(4, 40).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 8).map(float), min_size=n, max_size=n),
    st.lists(st.floats(-10, 10), min_size=n, max_size=n),
    st.integers(1, n))))
def test_matches_brute_force(args):
    u, z, w = (np.array(args[0]), np.array(args[1]), args[2])
    out = smooth_conditional_mean(u, z, cfg_for_window(w, len(u)))
    assert np.allclose(out, brute_running_mean(u, z, SmootherConfig(span=w / len(u), min_window=1).window(len(u))),
                       atol=1e-9)


def test_mean_preservation_bound(rng):
    n, w = 200, 20
    for _ in range(20):
        u = rng.random(n)
        z = rng.standard_normal(n)
        out = smooth_conditional_mean(u, z, cfg_for_window(w, n))
        assert abs(out.mean() - z.mean()) <= np.abs(z).max() * w / n


def test_rank_equivariance(rng):
    u = rng.standard_normal(80)
    z = rng.standard_normal(80)
    base = smooth_conditional_mean(u, z)
    assert np.array_equal(smooth_conditional_mean(np.exp(u), z), base)
    assert np.array_equal(smooth_conditional_mean(3 * u + 1, z), base)
    perm = rng.permutation(80)
    assert np.allclose(smooth_conditional_mean(u[perm], z[perm]), base[perm], atol=1e-13)


def test_ties_share_windows(rng):
    u = np.repeat(np.arange(10.0), 5)
    z = rng.standard_normal(50)
    out = smooth_conditional_mean(u, z, SmootherConfig(span=0.1))
    for g in range(10):
        assert np.ptp(out[u == g]) == 0


def test_variance_reduction(rng):
    for _ in range(20):
        u = rng.random(100)
        z = rng.standard_normal(100)
        assert np.var(smooth_conditional_mean(u, z)) <= np.var(z)


def test_errors():
    with pytest.raises(DataError):
        smooth_conditional_mean([1, 2, 3], [1, 2])
    with pytest.raises(DegenerateInputError):
        smooth_conditional_mean([1.0], [1.0])
    with pytest.raises(ValueError):
        SmootherConfig(span=0)
    with pytest.raises(ValueError):
        SmootherConfig(min_window=0)


def test_window_size():
    assert SmootherConfig().window(200) == 60
    assert SmootherConfig(span=0.001, min_window=2).window(200) == 2
    assert SmootherConfig(span=1.0).window(7) == 7


def test_supsmu_reproduces_lines():
    x = np.linspace(0, 1, 60)
    out = smooth_conditional_mean(x, 2 * x + 1, SmootherConfig(kind="supsmu"))
    assert np.allclose(out, 2 * x + 1, atol=1e-12)


def test_supsmu_tracks_smooth_signal(rng):
    x = np.sort(rng.random(300))
    f = np.sin(6 * x)
    y = f + 0.5 * rng.standard_normal(300)
    out = smooth_conditional_mean(x, y, SmootherConfig(kind="supsmu"))
    assert np.sqrt(np.mean((out - f) ** 2)) < 0.5 * np.std(y - f)
