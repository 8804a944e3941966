"""Model-level impulse response analysis.

This layer turns a fitted model into response series: for every ordered
pair of variables, the response path over steps 0..k, optionally
orthogonalized, polarity-adjusted, and fenced with bootstrap bands.
The summary numbers the advice layer builds on (cumulative and net
effects, significance masking) live here too.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .bootstrap import BootstrapConfig, bootstrap_bands
from .dataset import EmaDataset
from .errors import ConfigError, DomainError
from .irf import orthogonalize, polarity_transform, psi_tensor
from .model import VarModel, fit_var
from .vma import calculate_vma

DEFAULT_HORIZON = 20


@dataclass(frozen=True)
class IrfOptions:
    """Settings for one response computation.

    horizon : last step to evaluate (responses cover steps 0..horizon).
    orthogonalized : attribute correlated same-step shocks through a
        Cholesky ordering instead of assuming an isolated unit shock.
    ordering : causal ordering for orthogonalization (variable indices,
        first reacts to nothing contemporaneously); model order if None.
    polarity_adjusted : flip axes of negative variables first, so every
        response reads as "more of a good thing".
    bootstrap : confidence-band settings, or None for point estimates.
    masked : zero out steps whose band straddles zero (needs bootstrap).
    """

    horizon: int = DEFAULT_HORIZON
    orthogonalized: bool = False
    ordering: tuple[int, ...] | None = None
    polarity_adjusted: bool = False
    bootstrap: BootstrapConfig | None = None
    masked: bool = False

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if self.ordering is not None:
            object.__setattr__(self, "ordering", tuple(int(i) for i in self.ordering))
            if not self.orthogonalized:
                raise ConfigError("ordering only makes sense with orthogonalized=True")
        if self.masked and self.bootstrap is None:
            raise ConfigError("masking requires bootstrap bands")


@dataclass(frozen=True)
class ImpulseResponse:
    """Response of one variable to a unit impulse in another.

    ``values[t]`` is the response at step t (step 0 is the impulse
    instant).  ``lower``/``upper`` are pointwise confidence bounds when
    a bootstrap was run, with ``confidence`` their nominal level.
    """

    impulse: int
    response: int
    values: np.ndarray
    interval_minutes: float
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    confidence: float | None = None

    @property
    def horizon(self) -> int:
        return self.values.shape[0] - 1

    @property
    def has_bands(self) -> bool:
        return self.lower is not None and self.upper is not None


@dataclass(frozen=True)
class ResponseGrid:
    """All pairwise responses of one model under one set of options.

    ``values[x, y, t]`` is the response of variable y at step t to an
    impulse in variable x.  When masking is on, ``values`` has the
    insignificant steps zeroed and ``point`` keeps the raw estimates;
    otherwise the two are the same array.
    """

    names: tuple[str, ...]
    horizon: int
    interval_minutes: float
    options: IrfOptions
    values: np.ndarray
    point: np.ndarray
    lower: np.ndarray | None = None
    upper: np.ndarray | None = None
    n_effective: int | None = None

    @property
    def n_vars(self) -> int:
        return len(self.names)

    def series(self, impulse: int, response: int) -> np.ndarray:
        """Response path of ``response`` to a shock in ``impulse``."""
        return self.values[impulse, response]

    def pair(self, impulse: int, response: int) -> ImpulseResponse:
        """One impulse/response pair with its bands, if any."""
        cfg = self.options.bootstrap
        return ImpulseResponse(
            impulse=impulse,
            response=response,
            values=self.values[impulse, response],
            interval_minutes=self.interval_minutes,
            lower=None if self.lower is None else self.lower[impulse, response],
            upper=None if self.upper is None else self.upper[impulse, response],
            confidence=None if cfg is None else cfg.confidence,
        )


def _check_index(model: VarModel, index: int, what: str) -> None:
    if not 0 <= index < model.n_vars:
        raise DomainError(
            f"{what} index {index} outside 0..{model.n_vars - 1}"
        )


def _point_grid(model: VarModel, options: IrfOptions) -> np.ndarray:
    """(m, m, k+1) grid of responses, [impulse, response, step]."""
    target = polarity_transform(model) if options.polarity_adjusted else model
    vma = calculate_vma(target, options.horizon)
    psi = psi_tensor(vma)
    if options.orthogonalized:
        ordering = list(options.ordering) if options.ordering is not None else None
        psi[0] = orthogonalize(target, ordering)
    # psi is [step, response, impulse]; grid wants impulse first
    return np.ascontiguousarray(psi.transpose(2, 1, 0))


def response_grid(model: VarModel, options: IrfOptions | None = None) -> ResponseGrid:
    """Evaluate all pairwise impulse responses under ``options``."""
    if options is None:
        options = IrfOptions()
    point = _point_grid(model, options)
    lower = upper = None
    n_effective = None
    if options.bootstrap is not None:
        bands = bootstrap_bands(
            model, options.bootstrap, lambda refit: _point_grid(refit, options)
        )
        lower, upper, n_effective = bands.lower, bands.upper, bands.n_effective
    if options.masked:
        values = np.where((lower <= 0.0) & (upper >= 0.0), 0.0, point)
    else:
        values = point
    return ResponseGrid(
        names=tuple(model.names()),
        horizon=options.horizon,
        interval_minutes=model.interval_minutes,
        options=options,
        values=values,
        point=point,
        lower=lower,
        upper=upper,
        n_effective=n_effective,
    )


def irf(
    model: VarModel,
    impulse: int,
    response: int,
    options: IrfOptions | None = None,
) -> ImpulseResponse:
    """Response path of one variable to an impulse in another."""
    _check_index(model, impulse, "impulse")
    _check_index(model, response, "response")
    return response_grid(model, options).pair(impulse, response)


def significance_mask(resp: ImpulseResponse) -> ImpulseResponse:
    """Zero every step whose confidence band contains zero."""
    if not resp.has_bands:
        raise DomainError("response has no confidence bands to mask against")
    insignificant = (resp.lower <= 0.0) & (resp.upper >= 0.0)
    return replace(resp, values=np.where(insignificant, 0.0, resp.values))


def bootstrap_irf(
    model: VarModel,
    data: EmaDataset | None,
    impulse: int,
    response: int,
    config: BootstrapConfig | None = None,
    options: IrfOptions | None = None,
) -> ImpulseResponse:
    """Impulse response with bootstrap confidence bands.

    ``data`` supplies the resampling source when the model does not
    carry residuals of its own (the model is then refitted from it).
    """
    if config is None:
        config = BootstrapConfig()
    if options is None:
        options = IrfOptions()
    if data is not None:
        if model.residuals is None:
            model = fit_var(data, model.lags)
        elif model.data is None:
            model = replace(model, data=data)
    _check_index(model, impulse, "impulse")
    _check_index(model, response, "response")
    options = replace(options, bootstrap=config)
    return response_grid(model, options).pair(impulse, response)


def cumulative(values: np.ndarray, horizon: int | None = None) -> float:
    """Signed sum of step responses 0..horizon: net area under the
    response curve, negative stretches subtracted."""
    values = np.asarray(values, dtype=float)
    last = values.shape[0] - 1
    if horizon is None:
        horizon = last
    if not 0 <= horizon <= last:
        raise DomainError(f"horizon {horizon} outside 0..{last}")
    return float(np.sum(values[: horizon + 1]))


def irf_cum(
    model: VarModel,
    impulse: int,
    response: int,
    options: IrfOptions | None = None,
) -> float:
    """Cumulative response of one variable to an impulse in another."""
    return cumulative(irf(model, impulse, response, options).values)


def irf_total_from_grid(grid: ResponseGrid, impulse: int) -> float:
    """Net effect of one variable on all others, from a precomputed grid."""
    total = 0.0
    for response in range(grid.n_vars):
        if response != impulse:
            total += cumulative(grid.series(impulse, response))
    return total


def irf_total(
    model: VarModel,
    impulse: int,
    options: IrfOptions | None = None,
) -> float:
    """Net effect of one variable on the rest of the system: cumulative
    responses of every other variable, summed.

    Polarity adjustment is always applied here: without it a variable
    that lifts mood and also lifts fatigue would see the two effects
    cancel, even though both are real.
    """
    if options is None:
        options = IrfOptions()
    _check_index(model, impulse, "impulse")
    options = replace(options, polarity_adjusted=True)
    return irf_total_from_grid(response_grid(model, options), impulse)
