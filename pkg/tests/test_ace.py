import numpy as np
import pytest

from copdep.ace import AceConfig, ace_fit
from copdep.cdf import DegenerateInputError, copula_transform
from copdep.data import DataError, substream
from copdep.smoothing import SmootherConfig
from copdep import synthetic


def test_identical_vectors(rng):
    u = rng.random(200)
    assert ace_fit(u, u).r >= 0.98


def test_fit_invariants(rng):
    u = rng.random(150)
    v = np.sin(3 * u) + 0.3 * rng.standard_normal(150)
    fit = ace_fit(u, v)
    assert fit.r == pytest.approx(np.sqrt(fit.r_squared), abs=1e-12)
    assert np.var(fit.theta) == pytest.approx(1.0, abs=1e-9)
    assert fit.r == pytest.approx(np.corrcoef(fit.theta, fit.phi)[0, 1], abs=1e-12)
    assert 0 <= fit.r <= 1
    assert 1 <= fit.iterations <= AceConfig().max_iterations
    assert len(fit.trace) == fit.iterations


def test_null_is_biased_upwards():
    # Monte Carlo oracle at n=200: the estimator's null mean sits near 0.2, not 0
    rs = []
    for rep in range(200):
        s = substream(11, "ace-null", rep)
        rs.append(ace_fit(s.random(200), s.random(200)).r)
    assert 0.12 < np.mean(rs) < 0.3


def test_gaussian_maximal_correlation():
    s = substream(3, "gebelein")
    x = s.standard_normal(2000)
    y = 0.5 * x + np.sqrt(0.75) * s.standard_normal(2000)
    assert 0.43 <= ace_fit(x, y).r <= 0.57


def test_symmetry_on_dependent_data():
    diffs = []
    for rep in range(30):
        s = substream(5, "sym", rep)
        u = s.random(200)
        v = u ** 2 + 0.2 * s.standard_normal(200)
        diffs.append(abs(ace_fit(u, v).r - ace_fit(v, u).r))
    assert max(diffs) <= 0.02


def test_monotone_invariance_bit_exact(rng):
    u = rng.random(120)
    v = np.cos(4 * u) + 0.5 * rng.standard_normal(120)
    base = ace_fit(u, v)
    for fu, fv in [(np.exp, lambda t: t ** 3), (lambda t: 2 * t - 7, np.arctan)]:
        other = ace_fit(fu(u), fv(v))
        assert other.r == base.r
        assert np.array_equal(other.theta, base.theta)


def test_bounds_random(rng):
    for _ in range(50):
        n = int(rng.integers(4, 60))
        fit = ace_fit(rng.standard_normal(n), rng.integers(0, 3, n) + rng.random(n))
        assert 0.0 <= fit.r <= 1.0


def test_errors():
    with pytest.raises(DegenerateInputError):
        ace_fit(np.ones(10), np.arange(10.0))
    with pytest.raises(DegenerateInputError):
        ace_fit([1, 2, 3], [3, 2, 1])
    with pytest.raises(DataError):
        ace_fit(np.arange(5.0), np.arange(6.0))
    with pytest.raises(DataError):
        ace_fit(np.array([1, 2, np.nan, 4, 5.0]), np.arange(5.0))
    with pytest.raises(ValueError):
        AceConfig(max_iterations=0)
    with pytest.raises(ValueError):
        AceConfig(tolerance=0)


def test_iteration_cap_respected(rng):
    fit = ace_fit(rng.random(100), rng.random(100), AceConfig(max_iterations=3))
    assert fit.iterations <= 3


def test_supsmu_option_runs(rng):
    u = rng.random(200)
    fit = ace_fit(u, np.sin(5 * u) + 0.1 * rng.standard_normal(200),
                  AceConfig(smoother=SmootherConfig(kind="supsmu")))
    assert fit.r > 0.9


def _a_model_fits(reps_per_level):
    for model in synthetic.A_MODELS:
        for variance in synthetic.noise_grid():
            for rep in range(reps_per_level):
                x, y = synthetic.generate(model, 200, synthetic.NoiseSpec(variance),
                                          substream(1, model, variance, rep))
                yield ace_fit(copula_transform(x).values, copula_transform(y).values)


@pytest.mark.slow
def test_convergence_rate_on_a_models():
    fits = list(_a_model_fits(30))
    rate = np.mean([f.converged for f in fits])
    assert rate >= 0.99


@pytest.mark.xfail(strict=True, reason="the running-mean smoother is not self-adjoint, so the "
                   "ACE correlation sequence is not monotone; see README 'Known deviations'")
def test_correlation_sequence_non_decreasing():
    for fit in _a_model_fits(3):
        assert np.all(np.diff(fit.trace) >= -1e-9)
