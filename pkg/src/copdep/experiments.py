"""Permutation tests, power curves and the null-distribution study.

Every replicate draws from its own stream keyed by ``(seed, model, variance,
rep)``, so results do not depend on the number of workers or on the order in
which tasks finish.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import synthetic
from .data import SampleMatrix, as_samples, check_paired, substream
from .measures import MeasureSettings, prepare

log = logging.getLogger(__name__)

DEFAULT_SEED = 20140101
POWER_HEADER = "model,measure,noise_variance,power,stderr,reps,n,B,alpha,seed"
INDEPENDENCE_HEADER = "measure,mean,variance,reps,n,seed"


@dataclass(frozen=True)
class PermutationConfig:
    B: int = 200
    alpha: float = 0.05

    def __post_init__(self):
        if self.B < 1:
            raise ValueError("B must be >= 1")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must be in (0, 1)")


def fmt(value) -> str:
    """Shortest round-trip text for floats, plain ``str`` otherwise."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _safe_stat(prep, perm) -> float:
    try:
        value = prep.statistic(perm)
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        log.warning("%s failed on a permutation (%s); scoring it 0", prep.name, exc)
        return 0.0
    return value if np.isfinite(value) else 0.0


def permutation_pvalues(preps, perms: np.ndarray) -> list[float]:
    """p-values ``(1 + #{b: T_b >= T_obs}) / (B + 1)`` for several prepared measures
    sharing one set of row permutations."""
    out = []
    for prep in preps:
        observed = _safe_stat(prep, None)
        exceed = sum(1 for perm in perms if _safe_stat(prep, perm) >= observed)
        out.append((1 + exceed) / (len(perms) + 1))
    return out


def draw_permutations(n: int, B: int, stream) -> np.ndarray:
    return np.array([stream.permutation(n) for _ in range(B)], dtype=np.int64).reshape(B, n)


def permutation_pvalue(x, y, measure: str, config: PermutationConfig | None = None,
                       stream=None, settings: MeasureSettings | None = None) -> float:
    """Permutation p-value of ``measure`` for independence of ``x`` and ``y``.

    Rows of ``y`` are permuted uniformly.  Ties with the observed statistic count
    as exceedances, so a constant ``y`` gives ``p = 1``.
    """
    config = config or PermutationConfig()
    x, y = as_samples(x), as_samples(y)
    check_paired(x, y)
    if stream is None:
        stream = substream(DEFAULT_SEED, "permutation", measure)
    prep = prepare(measure, x, y, settings, stream=stream)
    perms = draw_permutations(x.n, config.B, stream)
    return permutation_pvalues([prep], perms)[0]


@dataclass(frozen=True)
class PowerRow:
    model: str
    measure: str
    noise_variance: float
    power: float
    stderr: float
    reps: int
    n: int
    B: int
    alpha: float
    seed: int

    def csv(self) -> str:
        return ",".join(fmt(getattr(self, f)) for f in POWER_HEADER.split(","))


@dataclass
class PowerGrid:
    rows: list[PowerRow]
    config: dict = field(default_factory=dict)

    def power(self, model: str, measure: str) -> tuple[list[float], list[float]]:
        """``(noise_variances, powers)`` for one curve, ordered by variance."""
        sel = sorted((r.noise_variance, r.power) for r in self.rows
                     if r.model == model and r.measure == measure)
        return [s[0] for s in sel], [s[1] for s in sel]

    def mean_power(self, model: str, measure: str) -> float:
        return float(np.mean(self.power(model, measure)[1]))

    def to_csv(self) -> str:
        return "\n".join([POWER_HEADER] + [r.csv() for r in self.rows]) + "\n"

    def write(self, path):
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(self.to_csv())
        with open(f"{path}.meta.json", "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.config, fh, indent=2, sort_keys=True)
            fh.write("\n")


def settings_echo(settings: MeasureSettings) -> dict:
    return json.loads(json.dumps(asdict(settings)))


def model_echo(models: Iterable[str]) -> dict:
    out = {}
    for m in models:
        spec = synthetic.model_spec(m)
        out[m] = list(spec.formulas)
        if m in synthetic.B_NOISE_SCALE:
            out[m].append(f"noise sd x {synthetic.B_NOISE_SCALE[m]}")
    return out


def _replicate(model: str, variance: float, rep: int, measures: Sequence[str], n: int,
               perm: PermutationConfig, seed: int, settings: MeasureSettings) -> list[float]:
    data_stream = substream(seed, "data", model, variance, rep)
    x, y = synthetic.generate(model, n, synthetic.NoiseSpec(variance), data_stream)
    perms = draw_permutations(n, perm.B, substream(seed, "perm", model, variance, rep))
    preps = [prepare(m, x, y, settings, stream=substream(seed, m, model, variance, rep))
             for m in measures]
    return permutation_pvalues(preps, perms)


def _run_tasks(fn, tasks, workers: int):
    if workers <= 1:
        return [fn(*t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        # map preserves task order, so the reduction is worker-count independent
        return list(pool.map(lambda t: fn(*t), tasks))


def power_curve(models: Sequence[str], measures: Sequence[str], noise_grid: Sequence[float],
                n: int = 200, reps: int = 100, perm: PermutationConfig | None = None,
                seed: int = DEFAULT_SEED, settings: MeasureSettings | None = None,
                workers: int = 1, progress=None) -> PowerGrid:
    """Rejection rate of each permutation test over ``reps`` replicates per
    (model, noise variance)."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    perm = perm or PermutationConfig()
    settings = settings or MeasureSettings()
    rows = []
    for model in models:
        for variance in noise_grid:
            tasks = [(model, variance, r, measures, n, perm, seed, settings) for r in range(reps)]
            pvals = np.array(_run_tasks(_replicate, tasks, workers))
            for j, measure in enumerate(measures):
                power = float(np.mean(pvals[:, j] <= perm.alpha))
                rows.append(PowerRow(model, measure, float(variance), power,
                                     math.sqrt(power * (1 - power) / reps),
                                     reps, n, perm.B, perm.alpha, seed))
            if progress is not None:
                progress(model, variance)
    config = {
        "models": model_echo(models), "measures": list(measures),
        "noise_grid": [float(v) for v in noise_grid], "n": n, "reps": reps,
        "B": perm.B, "alpha": perm.alpha, "seed": seed,
        "settings": settings_echo(settings),
        "predictors": "x1, x2, x3 ~ U(0,1) independent; log is natural log",
        "noise": "additive N(0, variance) on every response coordinate",
        "ace_baseline": "bivariate ACE between row means of x and of y",
    }
    return PowerGrid(rows, config)


@dataclass(frozen=True)
class SummaryRow:
    measure: str
    mean: float
    variance: float
    reps: int
    n: int
    seed: int

    def csv(self) -> str:
        return ",".join(fmt(getattr(self, f)) for f in INDEPENDENCE_HEADER.split(","))


def summary_csv(rows: Sequence[SummaryRow]) -> str:
    return "\n".join([INDEPENDENCE_HEADER] + [r.csv() for r in rows]) + "\n"


def _null_pair(n: int, d: int, stream):
    return (SampleMatrix(stream.standard_normal((n, d))),
            SampleMatrix(stream.standard_normal((n, d))))


def _null_stat(measure, n, d, rep, seed, settings):
    x, y = _null_pair(n, d, substream(seed, "null", rep))
    prep = prepare(measure, x, y, settings, stream=substream(seed, "null", measure, rep))
    return _safe_stat(prep, None)


def null_sim(measure: str, n: int = 200, reps: int = 500, seed: int = DEFAULT_SEED,
             settings: MeasureSettings | None = None, d: int = 1, workers: int = 1) -> np.ndarray:
    """Statistic values on ``reps`` independent standard-normal pairs."""
    settings = settings or MeasureSettings()
    tasks = [(measure, n, d, r, seed, settings) for r in range(reps)]
    return np.array(_run_tasks(_null_stat, tasks, workers))


def independence_study(n: int = 200, reps: int = 500, seed: int = DEFAULT_SEED,
                       settings: MeasureSettings | None = None,
                       measures: Sequence[str] = ("cdc", "rdc"),
                       workers: int = 1) -> list[SummaryRow]:
    """Mean and variance of each statistic when ``x`` and ``y`` are independent
    scalar standard normals.  Variances use ``ddof=1``."""
    if reps < 2:
        raise ValueError("reps must be >= 2")
    rows = []
    for m in measures:
        values = null_sim(m, n, reps, seed, settings, workers=workers)
        rows.append(SummaryRow(m, float(values.mean()), float(values.var(ddof=1)), reps, n, seed))
    return rows
