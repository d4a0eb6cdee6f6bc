"""Dependence statistics: CDC (estimated as EDC), RDC, Pearson and chi-squared.

Every measure can be *prepared* once for a pair ``(x, y)`` and then evaluated
cheaply under row permutations of ``y``.  The permutation tests in
:mod:`copdep.experiments` rely on this: copula transforms, sort orders and
random features are computed once per replicate, not once per permutation.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

import numpy as np

from .ace import AceConfig, ace_planned, make_plan, permute_plan
from .cdf import (CopulaVector, DegenerateInputError, KernelCdfConfig, copula_transform,
                  kernel_copula_transform, marginal_ranks)
from .data import SampleMatrix, as_samples, check_paired, split_stream


class NumericError(ArithmeticError):
    """A statistic could not be computed for numerical reasons."""


@dataclass
class MeasureResult:
    name: str
    statistic: float
    p_value: Optional[float] = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not np.isfinite(self.statistic):
            raise NumericError(f"{self.name}: non-finite statistic {self.statistic}")
        if self.p_value is not None and not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value {self.p_value} outside [0, 1]")


@dataclass(frozen=True)
class RdcConfig:
    """Random-feature settings; the projection is drawn from ``(seed, stream_id)``."""

    k: int = 20
    s: float = 1 / 6
    ridge: float = 1e-8
    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not self.s > 0:
            raise ValueError("s must be positive")
        if not self.ridge > 0:
            raise ValueError("ridge must be positive")


@dataclass(frozen=True)
class Chi2Config:
    k_bins: int = 4

    def __post_init__(self):
        if self.k_bins < 2:
            raise ValueError("k_bins must be >= 2")


# ---------------------------------------------------------------------------
# prepared statistics: stat(perm) evaluates the measure on (x, y[perm])


class Prepared:
    name = "measure"

    def statistic(self, perm: np.ndarray | None = None) -> float:
        raise NotImplementedError

    def metadata(self) -> dict:
        return {}


class _PreparedAce(Prepared):
    """ACE between two scalar scores; constant scores give the statistic 0."""

    def __init__(self, name: str, u: np.ndarray, v: np.ndarray, config: AceConfig):
        self.name = name
        self.config = config
        self.u = np.ascontiguousarray(u, dtype=float)
        self.v = np.ascontiguousarray(v, dtype=float)
        self.degenerate = bool(np.ptp(self.u) == 0 or np.ptp(self.v) == 0 or self.u.size < 4)
        self.last_fit = None
        if not self.degenerate:
            self.plan_u = make_plan(self.u, config.smoother)
            self.plan_v = make_plan(self.v, config.smoother)

    def statistic(self, perm=None) -> float:
        if self.degenerate:
            return 0.0
        if perm is None:
            fit = ace_planned(self.plan_u, self.plan_v, self.config)
        else:
            fit = ace_planned(self.plan_u, permute_plan(self.plan_v, perm), self.config)
        self.last_fit = fit
        return fit.r

    def metadata(self):
        meta = {"degenerate": self.degenerate}
        if self.last_fit is not None:
            meta.update(iterations=self.last_fit.iterations,
                        converged=self.last_fit.converged)
        return meta


def prepare_cdc(x, y, ace_config: AceConfig | None = None,
                kernel: KernelCdfConfig | None = None) -> Prepared:
    x, y = as_samples(x), as_samples(y)
    check_paired(x, y)
    if x.n < 4:
        raise DegenerateInputError(f"cdc needs n >= 4, got n={x.n}")
    if kernel is None:
        u, v = copula_transform(x), copula_transform(y)
    else:
        u, v = kernel_copula_transform(x, kernel), kernel_copula_transform(y, kernel)
    return _PreparedAce("cdc", u.values, v.values, ace_config or AceConfig())


def prepare_ace(x, y, ace_config: AceConfig | None = None) -> Prepared:
    """ACE baseline on raw data; multi-column sets are reduced to their row means."""
    x, y = as_samples(x), as_samples(y)
    check_paired(x, y)
    return _PreparedAce("ace", x.values.mean(axis=1), y.values.mean(axis=1),
                        ace_config or AceConfig())


def _rdc_features(data: SampleMatrix, k: int, s: float, stream) -> np.ndarray:
    """``sin(s * [P(x), 1] @ W + b)`` with Gaussian ``W`` and phases ``b ~ U(0, 2 pi)``."""
    p = marginal_ranks(data)
    p = np.column_stack([p, np.ones(p.shape[0])])
    w = stream.standard_normal((p.shape[1], k))
    b = stream.uniform(0.0, 2 * np.pi, k)
    return np.sin(s * (p @ w) + b)


def _whiten(f: np.ndarray, ridge: float) -> np.ndarray:
    """Centre columns and map to coordinates with (ridge-regularised) identity covariance."""
    fc = f - f.mean(axis=0)
    cov = fc.T @ fc / f.shape[0]
    evals, evecs = np.linalg.eigh(cov)
    evals = evals + ridge
    if not np.all(np.isfinite(evals)) or np.any(evals <= 0):
        raise NumericError(f"feature covariance is singular (min eigenvalue {evals.min():.3g})")
    return fc @ (evecs / np.sqrt(evals))


class _PreparedRdc(Prepared):
    name = "rdc"

    def __init__(self, x, y, config: RdcConfig, stream=None):
        x, y = as_samples(x), as_samples(y)
        check_paired(x, y)
        if x.n <= 2 * config.k:
            raise ValueError(f"rdc needs n > 2k, got n={x.n}, k={config.k}")
        stream = stream if stream is not None else split_stream(config.seed, config.stream_id)
        self.config = config
        self.n = x.n
        fx = _rdc_features(x, config.k, config.s, stream)
        fy = _rdc_features(y, config.k, config.s, stream)
        self.qx = _whiten(fx, config.ridge)
        self.qy = _whiten(fy, config.ridge)

    def statistic(self, perm=None) -> float:
        qy = self.qy if perm is None else self.qy[perm]
        m = self.qx.T @ qy / self.n
        top = np.linalg.norm(m, 2)
        return float(min(max(top, 0.0), 1.0))

    def metadata(self):
        c = self.config
        return {"k": c.k, "s": c.s, "ridge": c.ridge,
                "features": "sin(s * [ecdf columns, 1] @ N(0,1)^{(d+1) x k} + U(0, 2pi)^k)"}


class _PreparedChi2(Prepared):
    name = "chi2"

    def __init__(self, w, v, config: Chi2Config):
        w = np.asarray(w, dtype=float).ravel()
        v = np.asarray(v, dtype=float).ravel()
        if w.shape != v.shape:
            raise ValueError(f"length mismatch: {w.size} vs {v.size}")
        k = config.k_bins
        if k * k > w.size:
            warnings.warn(f"chi2 with {k}x{k} bins on only {w.size} samples", stacklevel=3)
        self.k = k
        self.n = w.size
        self.bw = _bin_index(w, k)
        self.bv = _bin_index(v, k)
        self.skipped = 0

    def statistic(self, perm=None) -> float:
        bv = self.bv if perm is None else self.bv[perm]
        k = self.k
        table = np.bincount(self.bw * k + bv, minlength=k * k).reshape(k, k)
        stat, self.skipped = contingency_chi2(table)
        return stat

    def metadata(self):
        return {"df": (self.k - 1) ** 2, "k_bins": self.k, "empty_margins": self.skipped}


class _PreparedPearson(Prepared):
    name = "pearson"

    def __init__(self, x, y):
        x, y = as_samples(x), as_samples(y)
        check_paired(x, y)
        self.n = x.n
        self.zx, cx = _standardise(x.values)
        self.zy, cy = _standardise(y.values)
        self.constant = bool(cx.all() or cy.all())

    def statistic(self, perm=None) -> float:
        if self.constant:
            return 0.0
        zy = self.zy if perm is None else self.zy[perm]
        c = np.abs(self.zx.T @ zy) / self.n
        return float(min(c.max(), 1.0))

    def metadata(self):
        return {"constant": self.constant}


def _standardise(a: np.ndarray):
    ac = a - a.mean(axis=0)
    sd = np.sqrt(np.mean(ac * ac, axis=0))
    constant = sd == 0
    return ac / np.where(constant, 1.0, sd), constant


def _bin_index(u: np.ndarray, k: int) -> np.ndarray:
    # right-closed cells ((j-1)/k, j/k]; 0 falls in the first cell
    edges = np.arange(1, k) / k
    return np.searchsorted(edges, u, side="left").astype(np.int64)


def contingency_chi2(table: np.ndarray) -> tuple[float, int]:
    """Pearson chi-squared of a two-way count table.

    Cells whose expected count is zero (an empty row or column) are skipped;
    the second return value is the number of empty margins.
    """
    table = np.asarray(table, dtype=float)
    n = table.sum()
    rows = table.sum(axis=1)
    cols = table.sum(axis=0)
    expected = np.outer(rows, cols) / n
    mask = expected > 0
    stat = np.sum((table[mask] - expected[mask]) ** 2 / expected[mask])
    skipped = int(np.count_nonzero(rows == 0) + np.count_nonzero(cols == 0))
    return float(stat), skipped


# ---------------------------------------------------------------------------
# public one-shot API


def _result(prep: Prepared) -> MeasureResult:
    stat = prep.statistic()
    return MeasureResult(prep.name, stat, metadata=prep.metadata())


def cdc(x, y, ace_config: AceConfig | None = None,
        kernel: KernelCdfConfig | None = None) -> MeasureResult:
    """Copula dependence coefficient between two variable sets.

    Each set is mapped to its joint empirical CDF at every sample (or a
    Gaussian-kernel CDF when ``kernel`` is given) and ACE estimates the
    maximal correlation between the two resulting scores.
    """
    return _result(prepare_cdc(x, y, ace_config, kernel))


def ace_baseline(x, y, ace_config: AceConfig | None = None) -> MeasureResult:
    return _result(prepare_ace(x, y, ace_config))


def rdc(x, y, config: RdcConfig | None = None, stream=None) -> MeasureResult:
    """Randomized dependence coefficient (largest canonical correlation of random
    sinusoidal features of the per-column copula transforms)."""
    return _result(_PreparedRdc(x, y, config or RdcConfig(), stream))


def chi2_statistic(w, v, config: Chi2Config | None = None) -> MeasureResult:
    """Chi-squared statistic of the ``k x k`` equal-width table of two copula vectors."""
    return _result(_PreparedChi2(np.asarray(w), np.asarray(v), config or Chi2Config()))


def pearson(x, y) -> MeasureResult:
    """Absolute Pearson correlation; for multi-column sets the largest over column pairs."""
    return _result(_PreparedPearson(x, y))


@dataclass(frozen=True)
class MeasureSettings:
    """Configuration bundle used by the experiment harness."""

    ace: AceConfig = field(default_factory=AceConfig)
    rdc: RdcConfig = field(default_factory=RdcConfig)
    chi2: Chi2Config = field(default_factory=Chi2Config)


def _prep_chi2(x, y, settings, stream):
    x, y = as_samples(x), as_samples(y)
    check_paired(x, y)
    return _PreparedChi2(copula_transform(x).values, copula_transform(y).values, settings.chi2)


MEASURES: dict[str, Callable[..., Prepared]] = {
    "cdc": lambda x, y, settings, stream: prepare_cdc(x, y, settings.ace),
    "ace": lambda x, y, settings, stream: prepare_ace(x, y, settings.ace),
    "rdc": lambda x, y, settings, stream: _PreparedRdc(x, y, settings.rdc, stream),
    "chi2": _prep_chi2,
    "pearson": lambda x, y, settings, stream: _PreparedPearson(x, y),
}


def prepare(name: str, x, y, settings: MeasureSettings | None = None, stream=None) -> Prepared:
    """Prepare measure ``name`` on ``(x, y)``; ``stream`` feeds RDC's random features."""
    try:
        factory = MEASURES[name]
    except KeyError:
        raise KeyError(f"unknown measure {name!r}; choose from {sorted(MEASURES)}") from None
    return factory(x, y, settings or MeasureSettings(), stream)


def compute(name: str, x, y, settings: MeasureSettings | None = None, stream=None) -> MeasureResult:
    return _result(prepare(name, x, y, settings, stream))
