"""Alternating conditional expectations for two scalar samples.

Starting from the standardised ranks of the response, the iteration alternates

    phi   <- E[theta | u]
    theta <- E[phi | v] / sd(E[phi | v])

with both expectations estimated by :mod:`copdep.smoothing`.  The returned
``r`` is the correlation of the final ``theta`` and ``phi`` and estimates the
maximal correlation between ``u`` and ``v``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .cdf import DegenerateInputError
from .data import DataError
from .smoothing import SmootherConfig, WindowPlan, window_plan


@dataclass(frozen=True)
class AceConfig:
    max_iterations: int = 100
    tolerance: float = 1e-6
    smoother: SmootherConfig = field(default_factory=SmootherConfig)

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")


@dataclass(frozen=True, eq=False)
class AceFit:
    theta: np.ndarray
    phi: np.ndarray
    r: float
    iterations: int
    converged: bool
    trace: np.ndarray

    @property
    def r_squared(self) -> float:
        return self.r * self.r


def _validate(u, v):
    u = np.ascontiguousarray(u, dtype=float).ravel()
    v = np.ascontiguousarray(v, dtype=float).ravel()
    if u.shape != v.shape:
        raise DataError(f"length mismatch: {u.size} vs {v.size}")
    if u.size < 4:
        raise DegenerateInputError(f"ACE needs n >= 4, got n={u.size}")
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise DataError("ACE inputs must be finite")
    if u.min() == u.max() or v.min() == v.max():
        raise DegenerateInputError("ACE input is constant")
    return u, v


def make_plan(u: np.ndarray, smoother: SmootherConfig) -> WindowPlan:
    n = u.size
    w = n if smoother.kind == "supsmu" else smoother.window(n)
    return window_plan(u, w)


def permute_plan(plan: WindowPlan, perm: np.ndarray) -> WindowPlan:
    """Plan for ``u[perm]`` derived from the plan for ``u`` without re-sorting."""
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size)
    return plan._replace(order=inv[plan.order])


def ace_planned(plan_u: WindowPlan, plan_v: WindowPlan, config: AceConfig) -> AceFit:
    """Run the iteration on pre-sorted inputs."""
    sm = config.smoother
    kind = _kernels.SUPSMU if sm.kind == "supsmu" else _kernels.RUNNING_MEAN
    span = sm.span if (sm.kind == "supsmu" and sm.fixed_span) else 0.0
    trace = np.empty(config.max_iterations)
    theta, phi, r, it, conv = _kernels.ace(
        plan_v.midrank, kind,
        plan_u.order, plan_u.lo, plan_u.hi, plan_u.values, span,
        plan_v.order, plan_v.lo, plan_v.hi, plan_v.values, span,
        config.max_iterations, config.tolerance, trace)
    return AceFit(theta, phi, float(r), int(it), bool(conv), trace[:it].copy())


def ace_fit(u, v, config: AceConfig | None = None) -> AceFit:
    """Estimate the maximal correlation between ``u`` and ``v``.

    Raises ``DegenerateInputError`` when either input is constant or ``n < 4``.
    """
    config = config or AceConfig()
    u, v = _validate(u, v)
    return ace_planned(make_plan(u, config.smoother), make_plan(v, config.smoother), config)
