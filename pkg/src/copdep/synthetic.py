"""Synthetic dependence models used in the power studies.

``A1``-``A8`` map three independent U(0,1) predictors to a (mostly
three-dimensional) response.  ``B1``-``B8`` are the scalar relationship types
popularised by the MIC comparisons: linear, quadratic, cubic, low- and
high-frequency sine, fourth root, circle and step.  ``NULL`` draws a response
independent of ``x`` and is used to check test levels.

Formulas are kept as numpy expression strings so they can be audited, echoed
into experiment headers, and corrected without touching the evaluation code.
``log`` is the natural logarithm.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import SampleMatrix, as_samples

A_MODELS: dict[str, tuple[str, ...]] = {
    "A1": ("x1*x2", "x2*x3", "x3*x1"),
    "A2": ("x2*x1 + log(x3**2)*x2**2 + sin(x1)*(x3 - 5)**2",),
    "A3": ("log(x1**2)*x2 + x3", "log(x2**2)*sin(x1) + x1**2", "log(x3**2)*x1"),
    "A4": ("cos(x2*(1 + x1)*x3)", "sin(6*pi*x2**2)", "sin(x2)*cos(x3*(1 + x2))"),
    "A5": ("cos(x1)*cos(x2) + x1*x2", "sin(x2)*sin(x3) + x2*x3", "cos(x3)*sin(x1) + x1*x3"),
    "A6": ("x1", "x2**2", "x3**3"),
    "A7": ("sin(x2)*2**x3 + 3*x2*x1**3", "4*x2*log(x1**2) + x1**2", "sin(x3)*log(x1) + 4*x1**2"),
    "A8": ("2*x1*x2 + x1**3*sin(x2)", "cos(x2) + 5*x2*log(x1**2) + x1**2", "sin(x2)*log(x3) + 5*x2"),
}

# ``sign`` is an independent +-1 draw per sample (used by the circle).
B_MODELS: dict[str, str] = {
    "B1": "x",
    "B2": "4*(x - 0.5)**2",
    # the published cubic repeats the cube in its second term; kept verbatim
    "B3": "128*(x - 1/3)**3 - 48*(x - 1/3)**3 - 12*(x - 1/3)",
    "B4": "sin(4*pi*x)",
    "B5": "sin(16*pi*x)",
    "B6": "x**0.25",
    "B7": "sign*sqrt(1 - (2*x - 1)**2)",
    "B8": "where(x > 0.5, 1.0, 0.0)",
}

# Per-type multiplier on the noise standard deviation.
B_NOISE_SCALE: dict[str, float] = {
    "B1": 1.0, "B2": 1.0, "B3": 10.0, "B4": 2.0,
    "B5": 1.0, "B6": 1.0, "B7": 0.25, "B8": 5.0,
}

B_NAMES = {
    "B1": "linear", "B2": "quadratic", "B3": "cubic", "B4": "sine-low",
    "B5": "sine-high", "B6": "fourth-root", "B7": "circle", "B8": "step",
}

NULL_MODEL = "NULL"

_NAMESPACE = {
    "__builtins__": {},
    "log": np.log, "sin": np.sin, "cos": np.cos, "sqrt": np.sqrt,
    "exp": np.exp, "pi": np.pi, "where": np.where,
}


@dataclass(frozen=True)
class ModelSpec:
    id: str
    input_dim: int
    output_dim: int

    @property
    def formulas(self) -> tuple[str, ...]:
        if self.id in A_MODELS:
            return A_MODELS[self.id]
        if self.id in B_MODELS:
            return (B_MODELS[self.id],)
        return ("independent N(0,1)",) * self.output_dim

    @property
    def uses_log(self) -> bool:
        return any("log" in f for f in self.formulas)


def model_spec(model_id: str) -> ModelSpec:
    if model_id in A_MODELS:
        return ModelSpec(model_id, 3, len(A_MODELS[model_id]))
    if model_id in B_MODELS:
        return ModelSpec(model_id, 1, 1)
    if model_id == NULL_MODEL:
        return ModelSpec(NULL_MODEL, 3, 3)
    raise KeyError(f"unknown model {model_id!r}")


@dataclass(frozen=True)
class NoiseSpec:
    """Additive Gaussian noise of the given variance on every response coordinate."""

    variance: float = 0.0

    def __post_init__(self):
        if not self.variance >= 0:
            raise ValueError(f"noise variance must be >= 0, got {self.variance}")


def noise_grid(levels: int = 10, low: float = 1 / 30, high: float = 3.0) -> list[float]:
    return [float(v) for v in np.linspace(low, high, levels)]


def _open_uniform(stream, shape) -> np.ndarray:
    u = stream.random(shape)
    # Generator.random is on [0, 1); zero would break the log models
    while True:
        zero = u == 0.0
        if not zero.any():
            return u
        u[zero] = stream.random(int(zero.sum()))


def gen_predictors(n: int, stream, d: int = 3) -> SampleMatrix:
    """``n x d`` independent U(0,1) draws, strictly inside the unit interval."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return SampleMatrix(_open_uniform(stream, (n, d)))


def evaluate(model: ModelSpec, x) -> np.ndarray:
    """Noise-free response ``f(x)`` as an ``n x output_dim`` array."""
    xv = as_samples(x).values
    if xv.shape[1] != model.input_dim:
        raise ValueError(f"{model.id} expects {model.input_dim} inputs, got {xv.shape[1]}")
    if model.uses_log and np.any(xv == 0.0):
        raise ValueError(f"{model.id} takes log of a zero predictor")
    env = dict(_NAMESPACE)
    env.update({f"x{j + 1}": xv[:, j] for j in range(xv.shape[1])})
    with np.errstate(divide="raise", invalid="raise"):
        cols = [np.broadcast_to(eval(f, env), (xv.shape[0],)) for f in model.formulas]
    return np.column_stack(cols).astype(float)


def gen_response(model: ModelSpec, x, noise: NoiseSpec, stream) -> SampleMatrix:
    """``y = f(x) + sqrt(variance) * Z`` with ``Z`` standard normal per entry."""
    x = as_samples(x)
    if model.id == NULL_MODEL:
        return SampleMatrix(stream.standard_normal((x.n, model.output_dim)))
    y = evaluate(model, x)
    if noise.variance > 0:
        y = y + np.sqrt(noise.variance) * stream.standard_normal(y.shape)
    return SampleMatrix(y)


def gen_2d_suite(type_id: str, n: int, noise: NoiseSpec, stream) -> tuple[np.ndarray, np.ndarray]:
    """Scalar ``(x, y)`` pairs of one of the eight B-types, ``x ~ U(0,1)``."""
    if type_id not in B_MODELS:
        raise KeyError(f"unknown 2-d type {type_id!r}")
    x = _open_uniform(stream, n)
    env = dict(_NAMESPACE)
    env["x"] = x
    env["sign"] = np.where(stream.random(n) < 0.5, -1.0, 1.0)
    y = np.broadcast_to(eval(B_MODELS[type_id], env), (n,)).astype(float)
    if noise.variance > 0:
        scale = B_NOISE_SCALE[type_id] * np.sqrt(noise.variance)
        y = y + scale * stream.standard_normal(n)
    return x, y


def generate(model_id: str, n: int, noise: NoiseSpec, stream) -> tuple[SampleMatrix, SampleMatrix]:
    """Draw a full ``(x, y)`` replicate for any model id."""
    if model_id in B_MODELS:
        x, y = gen_2d_suite(model_id, n, noise, stream)
        return SampleMatrix(x), SampleMatrix(y)
    spec = model_spec(model_id)
    x = gen_predictors(n, stream, spec.input_dim)
    return x, gen_response(spec, x, noise, stream)
