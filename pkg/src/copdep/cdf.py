"""Empirical and kernel-smoothed distribution functions.

The copula transform maps each sample row to the joint empirical CDF evaluated
at that row, ``F_n(x_i) = #{k : x_k <= x_i componentwise} / n``.  Ties are
counted with ``<=`` and the scale is ``1/n``, so values lie in ``{1/n, ..., 1}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .data import DataError, EmptyInputError, SampleMatrix, as_samples

# Above this many rows the pairwise comparison is done in row blocks.
_BLOCK_ROWS = 1024


class DegenerateInputError(DataError):
    """Input is too small or constant for the requested statistic."""


@dataclass(frozen=True, eq=False)
class CopulaVector:
    values: np.ndarray
    source_dims: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.values)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)


@dataclass(frozen=True)
class KernelCdfConfig:
    """Bandwidth for the product-Gaussian kernel CDF."""

    bandwidth: float = 0.1

    def __post_init__(self):
        if not self.bandwidth > 0:
            raise ValueError(f"bandwidth must be positive, got {self.bandwidth}")


def ecdf_univariate(data, query: float) -> float:
    data = np.asarray(data, dtype=float).ravel()
    if data.size == 0:
        raise EmptyInputError("empirical CDF of an empty sample")
    return np.count_nonzero(data <= query) / data.size


def ecdf_multivariate(data, query) -> float:
    """Fraction of rows of ``data`` dominated componentwise by ``query``."""
    x = as_samples(data).values
    q = np.atleast_1d(np.asarray(query, dtype=float))
    if q.shape != (x.shape[1],):
        raise DataError(f"query has shape {q.shape}, expected ({x.shape[1]},)")
    return np.count_nonzero(np.all(x <= q, axis=1)) / x.shape[0]


def dominance_counts(x: np.ndarray) -> np.ndarray:
    """``counts[i] = #{k : x[k] <= x[i] in every column}`` (includes ``k = i``)."""
    n, d = x.shape
    if d == 1:
        col = x[:, 0]
        return np.searchsorted(np.sort(col), col, side="right")
    counts = np.empty(n, dtype=np.int64)
    for start in range(0, n, _BLOCK_ROWS):
        stop = min(start + _BLOCK_ROWS, n)
        # (block, n, d): is row k <= row i in every coordinate
        dominated = np.all(x[None, :, :] <= x[start:stop, None, :], axis=2)
        counts[start:stop] = dominated.sum(axis=1)
    return counts


def copula_transform(data) -> CopulaVector:
    """Joint empirical CDF of ``data`` evaluated at each of its own rows."""
    x = as_samples(data)
    if x.n < 2:
        raise DegenerateInputError(f"copula transform needs n >= 2, got n={x.n}")
    return CopulaVector(dominance_counts(x.values) / x.n, x.d)


def marginal_ranks(data) -> np.ndarray:
    """Per-column empirical CDF values (``max`` rank for ties, scaled by 1/n)."""
    x = as_samples(data).values
    out = np.empty_like(x)
    for j in range(x.shape[1]):
        col = x[:, j]
        out[:, j] = np.searchsorted(np.sort(col), col, side="right") / x.shape[0]
    return out


def kernel_cdf(data, config: KernelCdfConfig, query) -> float:
    """Integral of the Gaussian product-kernel density estimate up to ``query``.

    With the standard normal kernel the integral factorises per coordinate:
    ``mean_i prod_j Phi((q_j - x_ij) / h)``.
    """
    x = as_samples(data).values
    q = np.atleast_1d(np.asarray(query, dtype=float))
    if q.shape != (x.shape[1],):
        raise DataError(f"query has shape {q.shape}, expected ({x.shape[1]},)")
    h = config.bandwidth
    return float(np.mean(np.prod(ndtr((q - x) / h), axis=1)))


def kernel_copula_transform(data, config: KernelCdfConfig) -> CopulaVector:
    """Smoothed alternative to :func:`copula_transform`, one kernel CDF per row."""
    x = as_samples(data)
    if x.n < 2:
        raise DegenerateInputError(f"copula transform needs n >= 2, got n={x.n}")
    v = x.values
    h = config.bandwidth
    out = np.empty(x.n)
    for start in range(0, x.n, _BLOCK_ROWS):
        stop = min(start + _BLOCK_ROWS, x.n)
        z = ndtr((v[start:stop, None, :] - v[None, :, :]) / h)
        out[start:stop] = np.prod(z, axis=2).mean(axis=1)
    return CopulaVector(out, x.d)
