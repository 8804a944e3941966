"""Personalized advice derived from a fitted diary model.

Three generators, one report:

- influence ranking: which variable, if nudged, moves the rest of the
  system the most (net cumulative response, everything read as
  positive);
- effect length: how long a nudge to one variable keeps another moving,
  in steps and wall-clock minutes, with sub-step precision;
- percentage advice: to change a chosen target by some percent, how
  much each other variable would have to change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import phrases
from .analysis import (
    IrfOptions,
    ResponseGrid,
    cumulative,
    response_grid,
)
from .bootstrap import BootstrapConfig, can_bootstrap
from .errors import ConfigError, DomainError
from .model import VarModel

EFFECT_THRESHOLD = 1e-4

SKIP_NO_EFFECT = "no_effect"
SKIP_BELOW_THRESHOLD = "below_threshold"
SKIP_ZERO_MEAN = "zero_mean"
SKIP_ZERO_SD = "zero_sd"
SKIP_OUTSIDE_WINDOW = "outside_window"


@dataclass(frozen=True)
class RunConfig:
    """Knobs shared by the CLI, the service and the report builder.

    ``bootstrap`` is tri-state: None means "on when the model carries
    something to resample", True forces it (an error when impossible),
    False disables it.  ``interval_minutes`` overrides the model's
    measurement interval when set.
    """

    horizon: int = 20
    bootstrap: bool | None = None
    iterations: int = 200
    confidence: float = 0.95
    theta: float = 0.0
    window: float = 1000.0
    seed: int = 0
    workers: int = 1
    percent: float = 10.0
    interval_minutes: float | None = None

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if not 0.0 < self.confidence < 1.0:
            raise ConfigError(f"confidence must be in (0, 1), got {self.confidence}")
        if self.theta < 0.0:
            raise ConfigError(f"theta must be >= 0, got {self.theta}")
        if not self.window > 0.0:
            raise ConfigError(f"window must be positive, got {self.window}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.interval_minutes is not None and not self.interval_minutes > 0:
            raise ConfigError("interval_minutes override must be positive")


def resolve_bootstrap(model: VarModel, config: RunConfig) -> bool:
    """Turn the tri-state bootstrap switch into a definite yes/no."""
    if config.bootstrap is None:
        return can_bootstrap(model)
    if config.bootstrap and not can_bootstrap(model):
        raise ConfigError(
            "bootstrap requested but the model has neither residuals nor data "
            "to resample; refit from the original series or pass --no-bootstrap"
        )
    return config.bootstrap


def options_from(
    model: VarModel,
    config: RunConfig,
    orthogonalized: bool = False,
    ordering: tuple[int, ...] | None = None,
) -> IrfOptions:
    """IrfOptions for one computation under a run configuration.

    Significance masking follows the bootstrap switch: whenever bands
    are computed, aggregates only count steps distinguishable from zero.
    """
    on = resolve_bootstrap(model, config)
    cfg = (
        BootstrapConfig(
            iterations=config.iterations,
            confidence=config.confidence,
            seed=config.seed,
            workers=config.workers,
        )
        if on
        else None
    )
    return IrfOptions(
        horizon=config.horizon,
        orthogonalized=orthogonalized,
        ordering=ordering,
        bootstrap=cfg,
        masked=on,
    )


def apply_interval(model: VarModel, config: RunConfig) -> VarModel:
    if config.interval_minutes is None:
        return model
    return replace(model, interval_minutes=config.interval_minutes)


def _check_index(model: VarModel, index: int, what: str) -> None:
    if not 0 <= index < model.n_vars:
        raise DomainError(f"{what} index {index} outside 0..{model.n_vars - 1}")


# ---------------------------------------------------------------- influence


@dataclass(frozen=True)
class InfluenceEntry:
    name: str
    index: int
    net_effect: float


@dataclass(frozen=True)
class InfluenceRanking:
    """Variables ordered by how strongly they move the rest of the
    system (descending absolute net effect, ties by variable index)."""

    entries: tuple[InfluenceEntry, ...]
    horizon: int
    bootstrap: bool

    @property
    def top(self) -> InfluenceEntry:
        return self.entries[0]


def _ranking_from_grid(grid: ResponseGrid) -> InfluenceRanking:
    m = grid.n_vars
    nets = []
    for x in range(m):
        total = 0.0
        for y in range(m):
            if y != x:
                total += cumulative(grid.series(x, y))
        nets.append(total)
    order = sorted(range(m), key=lambda x: (-abs(nets[x]), x))
    return InfluenceRanking(
        entries=tuple(InfluenceEntry(grid.names[x], x, nets[x]) for x in order),
        horizon=grid.horizon,
        bootstrap=grid.options.bootstrap is not None,
    )


def determine_most_influential(
    model: VarModel, options: IrfOptions | None = None
) -> InfluenceRanking:
    """Rank every variable by its net effect on all the others.

    Responses are always polarity-adjusted first, so "more of a good
    thing" and "less of a bad thing" both count as helpful, and masked
    when bootstrap bands are requested in ``options``.
    """
    if options is None:
        options = IrfOptions()
    options = replace(options, polarity_adjusted=True)
    return _ranking_from_grid(response_grid(model, options))


# ------------------------------------------------------------ effect length


@dataclass(frozen=True)
class EffectLength:
    """How long a response stays away from zero.

    ``total_steps`` counts time (in measurement steps, fractional via
    linear interpolation) spent beyond the detection threshold, summed
    over disjoint stretches; ``total_minutes`` is the same in wall-clock
    minutes.  ``effective_horizon`` is the step where the last stretch
    ends (the full horizon when the effect never dies down).
    """

    total_minutes: float
    total_steps: float
    effective_horizon: float


def effect_length_from_values(
    values: np.ndarray,
    interval_minutes: float,
    threshold: float = EFFECT_THRESHOLD,
) -> EffectLength:
    """Walk one response series and measure its active stretches.

    A stretch is open while |value| exceeds ``threshold``.  Boundaries
    between steps are linearly interpolated against the signed
    threshold; the sign is tracked while the stretch is live, so the
    closing boundary interpolates against the level the response
    actually crossed.  A stretch live at step 0 starts at 0 exactly; one
    still live at the last step is truncated there.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.shape[0] < 1:
        raise DomainError(f"values must be a non-empty vector, got shape {values.shape}")
    k = values.shape[0] - 1
    active = False
    d = 0.0
    start = 0.0
    total = 0.0
    horizon = 0.0
    for t in range(k + 1):
        g = values[t]
        if abs(g) > threshold:
            d = -1.0 if g > threshold else 1.0
            if not active:
                active = True
                start = 0.0 if t == 0 else t - (g + d * threshold) / (g - values[t - 1])
        elif active:
            end = (t - 1) + (1.0 - (g + d * threshold) / (g - values[t - 1]))
            active = False
            total += end - start
            horizon = end
    if active:
        total += k - start
        horizon = float(k)
    return EffectLength(
        total_minutes=total * interval_minutes,
        total_steps=total,
        effective_horizon=horizon,
    )


def determine_length_of_effect(
    model: VarModel,
    impulse: int,
    response: int,
    interval_minutes: float | None = None,
    options: IrfOptions | None = None,
    threshold: float = EFFECT_THRESHOLD,
) -> EffectLength:
    """Measure how long a shock to one variable keeps another moving.

    ``interval_minutes`` defaults to the model's own interval; passing 0
    is allowed when only the step counts matter.
    """
    _check_index(model, impulse, "impulse")
    _check_index(model, response, "response")
    grid = response_grid(model, options)
    inter = model.interval_minutes if interval_minutes is None else interval_minutes
    if inter < 0:
        raise DomainError(f"interval_minutes must be >= 0, got {inter}")
    return effect_length_from_values(grid.series(impulse, response), inter, threshold)


# --------------------------------------------------------- percentage advice


@dataclass(frozen=True)
class PercentageSuggestion:
    name: str
    index: int
    required_percent: float
    net_effect: float
    effect_horizon: float


@dataclass(frozen=True)
class SkippedVariable:
    name: str
    index: int
    reason: str


@dataclass(frozen=True)
class PercentageAdvice:
    """Which levers reach a desired percentage change of one target.

    ``suggestions`` holds the workable levers, smallest required change
    first; ``skipped`` lists the rest with machine-readable reasons.
    """

    target: str
    target_index: int
    desired_percent: float
    theta: float
    window: float
    suggestions: tuple[PercentageSuggestion, ...]
    skipped: tuple[SkippedVariable, ...]


def percentage_change_required(
    desired_percent: float,
    target_mean: float,
    target_sd: float,
    other_mean: float,
    other_sd: float,
    net_effect: float,
    effect_horizon: float,
) -> float:
    """Percent change of the other variable needed to move the target by
    ``desired_percent`` percent of its own mean.

    The desired shift is expressed in the target's answer-scale units,
    converted through the cumulative response (which links standardized
    shocks of the lever to standardized movement of the target, spread
    over ``effect_horizon`` steps), and converted back into a fraction
    of the lever's mean.
    """
    delta = desired_percent / 100.0
    zeta = target_mean * effect_horizon * delta * other_sd
    zeta = zeta / (net_effect * other_mean * target_sd)
    return zeta * 100.0


def _percentage_from_grid(
    model: VarModel,
    grid: ResponseGrid,
    target: int,
    desired_percent: float,
    theta: float,
    window: float,
) -> PercentageAdvice:
    target_meta = model.variables[target]
    suggestions: list[PercentageSuggestion] = []
    skipped: list[SkippedVariable] = []
    for y in range(model.n_vars):
        if y == target:
            continue
        meta = model.variables[y]
        series = grid.series(y, target)
        k_hat = effect_length_from_values(series, 0.0).effective_horizon
        net = cumulative(series, math.floor(k_hat))
        if net == 0.0:
            skipped.append(SkippedVariable(meta.name, y, SKIP_NO_EFFECT))
            continue
        if abs(net) <= theta:
            skipped.append(SkippedVariable(meta.name, y, SKIP_BELOW_THRESHOLD))
            continue
        if meta.mean == 0.0:
            skipped.append(SkippedVariable(meta.name, y, SKIP_ZERO_MEAN))
            continue
        if target_meta.sd == 0.0:
            skipped.append(SkippedVariable(meta.name, y, SKIP_ZERO_SD))
            continue
        pct = percentage_change_required(
            desired_percent,
            target_meta.mean,
            target_meta.sd,
            meta.mean,
            meta.sd,
            net,
            k_hat,
        )
        if not -window <= pct <= window:
            skipped.append(SkippedVariable(meta.name, y, SKIP_OUTSIDE_WINDOW))
            continue
        suggestions.append(PercentageSuggestion(meta.name, y, pct, net, k_hat))
    suggestions.sort(key=lambda s: (abs(s.required_percent), s.index))
    return PercentageAdvice(
        target=target_meta.name,
        target_index=target,
        desired_percent=desired_percent,
        theta=theta,
        window=window,
        suggestions=tuple(suggestions),
        skipped=tuple(skipped),
    )


def determine_percentage_effect(
    model: VarModel,
    target: int,
    desired_percent: float = 10.0,
    theta: float = 0.0,
    window: float = 1000.0,
    options: IrfOptions | None = None,
) -> PercentageAdvice:
    """For every other variable, how much it must change (in percent of
    its own mean) to move ``target`` by ``desired_percent``.

    For each lever the response window is first clipped to where its
    effect actually lives (the effective horizon of the lever-to-target
    response), then the cumulative effect over that window drives the
    conversion.  Levers with no effect, effects below ``theta`` (in
    standard-deviation units), degenerate statistics, or answers outside
    ``window`` percent are skipped with a reason.
    """
    _check_index(model, target, "target")
    if theta < 0.0:
        raise ConfigError(f"theta must be >= 0, got {theta}")
    if not window > 0.0:
        raise ConfigError(f"window must be positive, got {window}")
    grid = response_grid(model, options)
    return _percentage_from_grid(model, grid, target, desired_percent, theta, window)


# ------------------------------------------------------------------- report


@dataclass(frozen=True)
class PairEffectLength:
    impulse: str
    impulse_index: int
    response: str
    response_index: int
    length: EffectLength


@dataclass(frozen=True)
class AdviceReport:
    """Everything the three generators say about one model, plus the
    rendered sentences for the variable that matters most."""

    names: tuple[str, ...]
    interval_minutes: float
    horizon: int
    bootstrap: bool
    iterations: int | None
    confidence: float | None
    seed: int | None
    n_effective: int | None
    theta: float
    window: float
    desired_percent: float
    influence: InfluenceRanking
    effect_lengths: tuple[PairEffectLength, ...]
    whatif: tuple[PercentageAdvice, ...]
    sentences: tuple[str, ...]


def _report_sentences(
    model: VarModel,
    ranking: InfluenceRanking,
    effect_lengths: tuple[PairEffectLength, ...],
    whatif: tuple[PercentageAdvice, ...],
) -> tuple[str, ...]:
    sentences: list[str] = []
    top = ranking.top
    top_meta = model.variables[top.index]
    label = phrases.display_label(top_meta.name, top_meta.polarity)
    sentences.append(phrases.influence_sentence(label, top.net_effect))
    for pair in effect_lengths:
        if pair.impulse_index == top.index and pair.length.total_steps > 0:
            sentences.append(
                phrases.duration_sentence(
                    pair.impulse,
                    pair.response,
                    pair.length.total_minutes,
                    pair.length.total_steps,
                )
            )
    for adv in whatif:
        sentence = phrases.whatif_summary(
            adv.target,
            adv.desired_percent,
            [(s.name, s.required_percent) for s in adv.suggestions],
        )
        if sentence is not None:
            sentences.append(sentence)
    return tuple(sentences)


def build_advice_report(model: VarModel, config: RunConfig | None = None) -> AdviceReport:
    """Run all three generators under one configuration.

    The influence ranking reads the polarity-adjusted responses; effect
    lengths and percentage advice read the raw (optionally masked)
    responses.  The what-if table covers every variable as a target at
    the configured desired percentage.
    """
    if config is None:
        config = RunConfig()
    model = apply_interval(model, config)
    opts = options_from(model, config)
    plain = response_grid(model, opts)
    adjusted = response_grid(model, replace(opts, polarity_adjusted=True))
    ranking = _ranking_from_grid(adjusted)

    effect_lengths = []
    for x in range(model.n_vars):
        for y in range(model.n_vars):
            if x == y:
                continue
            length = effect_length_from_values(
                plain.series(x, y), model.interval_minutes
            )
            effect_lengths.append(
                PairEffectLength(
                    impulse=model.variables[x].name,
                    impulse_index=x,
                    response=model.variables[y].name,
                    response_index=y,
                    length=length,
                )
            )

    whatif = tuple(
        _percentage_from_grid(
            model, plain, target, config.percent, config.theta, config.window
        )
        for target in range(model.n_vars)
    )

    bootstrap_on = opts.bootstrap is not None
    return AdviceReport(
        names=tuple(model.names()),
        interval_minutes=model.interval_minutes,
        horizon=config.horizon,
        bootstrap=bootstrap_on,
        iterations=config.iterations if bootstrap_on else None,
        confidence=config.confidence if bootstrap_on else None,
        seed=config.seed if bootstrap_on else None,
        n_effective=plain.n_effective,
        theta=config.theta,
        window=config.window,
        desired_percent=config.percent,
        influence=ranking,
        effect_lengths=tuple(effect_lengths),
        whatif=whatif,
        sentences=_report_sentences(model, ranking, tuple(effect_lengths), whatif),
    )
