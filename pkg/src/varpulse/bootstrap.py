"""Residual-bootstrap confidence bands for impulse responses.

Each replicate rebuilds a synthetic diary series from the fitted model by
resampling its own residual rows with replacement, refits a model of the
same lag order, and re-evaluates the impulse responses.  Percentiles of
the replicate responses give pointwise confidence bands.

Replicates are seeded individually from (seed, iteration), so results
are identical no matter how many worker threads evaluate them.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dataset import EmaDataset, VariableMeta, _column_stats
from .errors import BootstrapUnavailableError, ConfigError, FitError
from .model import VarModel, check_stability, fit_var


@dataclass(frozen=True)
class BootstrapConfig:
    iterations: int = 200
    confidence: float = 0.95
    seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if not 0.0 < self.confidence < 1.0:
            raise ConfigError(f"confidence must be in (0, 1), got {self.confidence}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class BootstrapBands:
    """Pointwise percentile bands over a full impulse-by-response grid.

    ``lower``/``upper`` have shape (m, m, k+1), indexed [impulse,
    response, step].  ``n_effective`` counts replicates whose refit
    succeeded (failed refits are skipped, never substituted).
    """

    lower: np.ndarray
    upper: np.ndarray
    n_effective: int
    config: BootstrapConfig


def simulate_series(
    model: VarModel,
    innovations: np.ndarray,
    presample: np.ndarray | None = None,
    exo_rows: np.ndarray | None = None,
) -> np.ndarray:
    """Run the fitted difference equation forward over given shock rows.

    ``innovations`` has one row per generated step; the result has
    ``lags`` presample rows followed by one row per innovation.
    """
    m, p = model.n_vars, model.lags
    innovations = np.asarray(innovations, dtype=float)
    if innovations.ndim != 2 or innovations.shape[1] != m:
        raise ValueError(f"innovations must be n x {m}, got {innovations.shape}")
    if presample is None:
        presample = default_presample(model)
    presample = np.asarray(presample, dtype=float)
    if presample.shape != (p, m):
        raise ValueError(f"presample must be {p} x {m}, got {presample.shape}")
    n = innovations.shape[0]
    if model.exo_names:
        if exo_rows is None:
            raise ValueError("model has exogenous inputs; exo_rows is required")
        exo_rows = np.asarray(exo_rows, dtype=float)
        if exo_rows.shape != (p + n, len(model.exo_names)):
            raise ValueError(
                f"exo_rows must be {p + n} x {len(model.exo_names)}, got {exo_rows.shape}"
            )

    out = np.empty((p + n, m))
    out[:p] = presample
    for t in range(p, p + n):
        y = model.constant + innovations[t - p]
        for j in range(1, p + 1):
            y = y + model.coefficients[j - 1] @ out[t - j]
        if model.exo_names:
            y = y + model.exo_coefficients @ exo_rows[t]
        out[t] = y
    return out


def default_presample(model: VarModel) -> np.ndarray:
    """Starting rows for regeneration: the first observed rows (from the
    attached data or the persisted presample), otherwise the equilibrium
    mean (zeros for an unstable model, which has none)."""
    m, p = model.n_vars, model.lags
    if model.data is not None and model.data.n_obs >= p:
        return np.array(model.data.rows[:p])
    if model.presample is not None:
        return np.array(model.presample)
    if check_stability(model).stable:
        lag_sum = np.sum(model.coefficients, axis=0)
        mu = np.linalg.solve(np.eye(m) - lag_sum, model.constant)
        return np.tile(mu, (p, 1))
    return np.zeros((p, m))


def can_bootstrap(model: VarModel) -> bool:
    """Whether the model carries enough to resample from: residuals,
    plus the original exogenous rows when it has exogenous inputs."""
    if model.residuals is None or model.residuals.shape[0] < 1:
        return False
    if model.exo_names and (model.data is None or model.data.exo_rows is None):
        return False
    return True


def _require_bootstrappable(model: VarModel) -> None:
    if model.residuals is None or model.residuals.shape[0] < 1:
        raise BootstrapUnavailableError(
            "model carries no residuals; refit from the original series first"
        )
    if model.exo_names and (model.data is None or model.data.exo_rows is None):
        raise BootstrapUnavailableError(
            "model has exogenous inputs but no attached data to replay them from"
        )


def replicate_model(model: VarModel, iteration: int, seed: int) -> VarModel | None:
    """One bootstrap refit: resample residual rows, regenerate, refit.

    Returns None when the synthetic series cannot be refitted (rank
    deficient by bad luck); unstable refits are returned as-is.
    """
    rng = np.random.default_rng((seed, iteration))
    residuals = model.residuals
    n = residuals.shape[0]
    draws = residuals[rng.integers(0, n, size=n)]
    exo_rows = model.data.exo_rows if model.exo_names else None
    rows = simulate_series(model, draws, exo_rows=exo_rows)
    variables = tuple(
        VariableMeta(v.name, v.polarity, *_column_stats(rows[:, i]))
        for i, v in enumerate(model.variables)
    )
    try:
        synthetic = EmaDataset(
            variables=variables,
            rows=rows,
            interval_minutes=model.interval_minutes,
            exo_names=model.exo_names,
            exo_rows=exo_rows,
        )
        return fit_var(synthetic, model.lags)
    except (FitError, ValueError):
        return None


def bootstrap_bands(
    model: VarModel,
    config: BootstrapConfig,
    grid_fn: Callable[[VarModel], np.ndarray],
) -> BootstrapBands:
    """Evaluate ``grid_fn`` on every successful replicate and take
    pointwise percentiles.

    ``grid_fn`` maps a model to an (m, m, k+1) response grid; it is the
    caller's job to make it apply the same options (orthogonalization,
    polarity) as the point estimate the bands will sit around.
    """
    _require_bootstrappable(model)

    def one(i: int) -> np.ndarray | None:
        refit = replicate_model(model, i, config.seed)
        if refit is None:
            return None
        with warnings.catch_warnings():
            # unstable refits are legitimate draws; keep them, quietly
            warnings.simplefilter("ignore")
            return grid_fn(refit)

    if config.workers == 1:
        grids = [one(i) for i in range(config.iterations)]
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            grids = list(pool.map(one, range(config.iterations)))

    kept = [g for g in grids if g is not None]
    if not kept:
        raise FitError("every bootstrap replicate failed to refit")
    stack = np.stack(kept)
    tail = (1.0 - config.confidence) / 2.0
    lower = np.quantile(stack, tail, axis=0)
    upper = np.quantile(stack, 1.0 - tail, axis=0)
    return BootstrapBands(lower=lower, upper=upper, n_effective=len(kept), config=config)
