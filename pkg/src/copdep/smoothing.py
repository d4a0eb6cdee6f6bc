"""Running-mean estimate of the conditional expectation ``E[z | u]``.

Each point is replaced by the mean of ``z`` over a window of ``w`` neighbours
in ``u``-order, truncated at both ends.  Points tied in ``u`` share one window,
and window edges never split a tie group, so the output depends on ``u`` only
through its ranks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _kernels
from .cdf import DegenerateInputError
from .data import DataError


@dataclass(frozen=True)
class SmootherConfig:
    """Window settings.

    ``span`` is the window width as a fraction of ``n``; ``min_window`` is a
    floor on the number of points.  ``kind="supsmu"`` switches to Friedman's
    variable-span running-lines smoother, in which case ``span`` is ignored
    unless ``fixed_span`` is set.
    """

    span: float = 0.3
    min_window: int = 2
    kind: str = "running_mean"
    fixed_span: bool = False

    def __post_init__(self):
        if not 0 < self.span <= 1:
            raise ValueError(f"span must be in (0, 1], got {self.span}")
        if self.min_window < 1:
            raise ValueError(f"min_window must be >= 1, got {self.min_window}")
        if self.kind not in ("running_mean", "supsmu"):
            raise ValueError(f"unknown smoother kind {self.kind!r}")

    def window(self, n: int) -> int:
        return min(n, max(self.min_window, int(round(self.span * n))))


class WindowPlan(NamedTuple):
    """Sort order of ``u`` and half-open window bounds per sorted position."""

    order: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    values: np.ndarray  # u in sorted order
    midrank: np.ndarray  # tie-averaged rank of each sorted position


def window_plan(u: np.ndarray, w: int) -> WindowPlan:
    u = np.asarray(u, dtype=float)
    n = u.size
    order = np.argsort(u, kind="stable")
    us = u[order]

    new_group = np.empty(n, dtype=bool)
    new_group[0] = True
    new_group[1:] = us[1:] != us[:-1]
    group_id = np.cumsum(new_group) - 1
    starts = np.flatnonzero(new_group)
    ends = np.append(starts[1:], n)
    gstart = starts[group_id]
    gend = ends[group_id]

    if w >= n:
        lo = np.zeros(n, dtype=np.int64)
        hi = np.full(n, n, dtype=np.int64)
    else:
        before = (w - 1) // 2
        after = w - 1 - before
        lo = np.maximum(gstart - before, 0)
        hi = np.minimum(gend - 1 + after, n - 1)
        # widen to whole tie groups at both edges
        lo = gstart[lo].astype(np.int64)
        hi = gend[hi].astype(np.int64)
    midrank = (gstart + gend - 1) / 2.0
    return WindowPlan(order.astype(np.int64), lo, hi, us, midrank)


def _check_pair(u, z):
    u = np.asarray(u, dtype=float).ravel()
    z = np.asarray(z, dtype=float).ravel()
    if u.shape != z.shape:
        raise DataError(f"length mismatch: u has {u.size} entries, z has {z.size}")
    if u.size < 2:
        raise DegenerateInputError(f"smoothing needs n >= 2, got n={u.size}")
    if not np.all(np.isfinite(u)):
        raise DataError("u contains non-finite values")
    return u, z


def smooth_conditional_mean(u, z, config: SmootherConfig | None = None) -> np.ndarray:
    """Smooth ``z`` against ``u``; returns an array aligned with the input."""
    config = config or SmootherConfig()
    u, z = _check_pair(u, z)
    n = u.size
    if config.kind == "supsmu":
        plan = window_plan(u, n)
        out = np.empty(n)
        _kernels.supsmu(z, plan.order, plan.values, _supsmu_span(config), out)
        return out
    plan = window_plan(u, config.window(n))
    out = np.empty(n)
    _kernels.running_mean(z, plan.order, plan.lo, plan.hi, out, np.empty(n + 1))
    return out


def _supsmu_span(config: SmootherConfig) -> float:
    # 0 selects the cross-validated span
    return config.span if config.fixed_span else 0.0
