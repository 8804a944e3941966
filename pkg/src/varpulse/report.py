"""Emission layer: canonical JSON documents, plot records, text rendering.

The CLI and the HTTP service both emit documents built here, so a given
model, configuration and seed produce byte-identical output on either
path.  Canonical form: fixed key order (insertion order of the builder),
every float rounded to 12 significant digits, two-space indentation,
trailing newline.
"""

from __future__ import annotations

import json
from typing import Any

from . import phrases
from .advice import (
    AdviceReport,
    InfluenceRanking,
    PercentageAdvice,
    RunConfig,
    apply_interval,
    build_advice_report,
    determine_length_of_effect,
    determine_most_influential,
    determine_percentage_effect,
    options_from,
)
from .analysis import response_grid
from .bootstrap import can_bootstrap
from .model import VarModel, check_stability

REPORT_VERSION = 1


def round12(x: float) -> float:
    """Round to 12 significant decimal digits (and normalize -0.0)."""
    return float(format(float(x), ".12g")) + 0.0


def canonical(obj: Any) -> Any:
    """Copy of a document tree with every float rounded to 12 digits."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, float):
        return round12(obj)
    if isinstance(obj, dict):
        return {key: canonical(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(value) for value in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_canonical(doc: Any) -> str:
    return json.dumps(canonical(doc), indent=2, ensure_ascii=False) + "\n"


# ------------------------------------------------------------- sections


def influence_section(ranking: InfluenceRanking) -> dict[str, Any]:
    return {
        "horizon": ranking.horizon,
        "bootstrap": ranking.bootstrap,
        "entries": [
            {"variable": e.name, "net_effect": e.net_effect} for e in ranking.entries
        ],
    }


def whatif_section(advice: PercentageAdvice) -> dict[str, Any]:
    return {
        "target": advice.target,
        "desired_percent": advice.desired_percent,
        "theta": advice.theta,
        "window": advice.window,
        "suggestions": [
            {
                "variable": s.name,
                "required_percent": s.required_percent,
                "net_effect": s.net_effect,
                "effect_horizon": s.effect_horizon,
            }
            for s in advice.suggestions
        ],
        "skipped": [
            {"variable": s.name, "reason": s.reason} for s in advice.skipped
        ],
    }


# ------------------------------------------------------------ documents


def advice_document(report: AdviceReport) -> dict[str, Any]:
    return {
        "version": REPORT_VERSION,
        "kind": "advice_report",
        "variables": list(report.names),
        "interval_minutes": report.interval_minutes,
        "config": {
            "horizon": report.horizon,
            "bootstrap": report.bootstrap,
            "iterations": report.iterations,
            "confidence": report.confidence,
            "seed": report.seed,
            "theta": report.theta,
            "window": report.window,
            "percent": report.desired_percent,
        },
        "bootstrap_replicates": report.n_effective,
        "influence": influence_section(report.influence),
        "effect_lengths": [
            {
                "impulse": p.impulse,
                "response": p.response,
                "total_minutes": p.length.total_minutes,
                "total_steps": p.length.total_steps,
                "effective_horizon": p.length.effective_horizon,
            }
            for p in report.effect_lengths
        ],
        "whatif": [whatif_section(adv) for adv in report.whatif],
        "advice_text": list(report.sentences),
    }


def influence_document(model: VarModel, config: RunConfig) -> dict[str, Any]:
    model = apply_interval(model, config)
    ranking = determine_most_influential(model, options_from(model, config))
    return influence_section(ranking)


def irf_document(
    model: VarModel,
    impulse: int,
    response: int,
    config: RunConfig,
    orthogonalized: bool = False,
    ordering: tuple[int, ...] | None = None,
) -> dict[str, Any]:
    """Plot-ready response series: raw point estimates with bands (the
    chart shows uncertainty; masking is for aggregation, not display)."""
    model = apply_interval(model, config)
    opts = options_from(model, config, orthogonalized=orthogonalized, ordering=ordering)
    grid = response_grid(model, opts)
    steps = []
    for t in range(grid.horizon + 1):
        steps.append(
            {
                "t": t,
                "minutes": t * model.interval_minutes,
                "value": float(grid.point[impulse, response, t]),
                "lower": None if grid.lower is None else float(grid.lower[impulse, response, t]),
                "upper": None if grid.upper is None else float(grid.upper[impulse, response, t]),
            }
        )
    return {
        "version": REPORT_VERSION,
        "kind": "impulse_response",
        "impulse": model.variables[impulse].name,
        "response": model.variables[response].name,
        "horizon": grid.horizon,
        "interval_minutes": model.interval_minutes,
        "orthogonalized": orthogonalized,
        "bootstrap": opts.bootstrap is not None,
        "confidence": None if opts.bootstrap is None else opts.bootstrap.confidence,
        "steps": steps,
    }


def irf_grid_document(
    model: VarModel,
    config: RunConfig,
    orthogonalized: bool = False,
    ordering: tuple[int, ...] | None = None,
) -> dict[str, Any]:
    series = [
        irf_document(model, x, y, config, orthogonalized, ordering)
        for x in range(model.n_vars)
        for y in range(model.n_vars)
    ]
    return {"version": REPORT_VERSION, "kind": "impulse_response_grid", "series": series}


def effect_length_document(
    model: VarModel, impulse: int, response: int, config: RunConfig
) -> dict[str, Any]:
    model = apply_interval(model, config)
    opts = options_from(model, config)
    length = determine_length_of_effect(model, impulse, response, options=opts)
    return {
        "version": REPORT_VERSION,
        "kind": "effect_length",
        "impulse": model.variables[impulse].name,
        "response": model.variables[response].name,
        "horizon": config.horizon,
        "interval_minutes": model.interval_minutes,
        "total_minutes": length.total_minutes,
        "total_steps": length.total_steps,
        "effective_horizon": length.effective_horizon,
    }


def whatif_document(model: VarModel, target: int, config: RunConfig) -> dict[str, Any]:
    model = apply_interval(model, config)
    opts = options_from(model, config)
    advice = determine_percentage_effect(
        model,
        target,
        desired_percent=config.percent,
        theta=config.theta,
        window=config.window,
        options=opts,
    )
    doc: dict[str, Any] = {"version": REPORT_VERSION, "kind": "percentage_advice"}
    doc.update(whatif_section(advice))
    return doc


def meta_document(model: VarModel) -> dict[str, Any]:
    stability = check_stability(model)
    return {
        "version": REPORT_VERSION,
        "kind": "model_meta",
        "variables": [
            {"name": v.name, "polarity": v.polarity, "mean": v.mean, "sd": v.sd}
            for v in model.variables
        ],
        "lags": model.lags,
        "interval_minutes": model.interval_minutes,
        "exogenous": list(model.exo_names),
        "stable": stability.stable,
        "spectral_radius": stability.spectral_radius,
        "can_bootstrap": can_bootstrap(model),
    }


# ---------------------------------------------------------- plot records


def _cell(value: float | None) -> str:
    return "" if value is None else format(round12(value), ".12g")


def plot_records(doc: dict[str, Any]) -> str:
    """Flatten response documents into one CSV record per step."""
    series = doc["series"] if doc.get("kind") == "impulse_response_grid" else [doc]
    lines = ["impulse,response,t,value,lower,upper"]
    for s in series:
        for step in s["steps"]:
            lines.append(
                ",".join(
                    [
                        s["impulse"],
                        s["response"],
                        str(step["t"]),
                        _cell(step["value"]),
                        _cell(step["lower"]),
                        _cell(step["upper"]),
                    ]
                )
            )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------- text rendering


def render_advice_text(doc: dict[str, Any]) -> str:
    cfg = doc["config"]
    out = []
    out.append("Advice report")
    out.append(f"Variables: {', '.join(doc['variables'])}")
    out.append(f"Interval: {phrases.fmt(doc['interval_minutes'])} minutes")
    out.append(f"Horizon: {cfg['horizon']} steps")
    if cfg["bootstrap"]:
        out.append(
            f"Bootstrap: {cfg['iterations']} iterations at "
            f"{phrases.fmt(cfg['confidence'] * 100)}% confidence (seed {cfg['seed']})"
        )
    else:
        out.append("Bootstrap: off")
    out.append("")
    out.append("Influence ranking")
    for rank, entry in enumerate(doc["influence"]["entries"], start=1):
        out.append(
            f"  {rank}. {entry['variable']}  net effect {phrases.fmt(entry['net_effect'])}"
        )
    out.append("")
    out.append("Effect lengths")
    if doc["effect_lengths"]:
        for p in doc["effect_lengths"]:
            out.append(
                f"  {p['impulse']} -> {p['response']}  "
                f"{phrases.fmt(p['total_minutes'])} min  "
                f"{phrases.fmt(p['total_steps'])} steps  "
                f"horizon {phrases.fmt(p['effective_horizon'])}"
            )
    else:
        out.append("  (single-variable model: no pairs)")
    out.append("")
    out.append(f"What-if at {phrases.fmt(cfg['percent'])}%")
    for adv in doc["whatif"]:
        if adv["suggestions"]:
            out.append(f"  target {adv['target']}:")
            for s in adv["suggestions"]:
                out.append(
                    f"    change {s['variable']} by {phrases.fmt(s['required_percent'])}% "
                    f"(net effect {phrases.fmt(s['net_effect'])}, "
                    f"horizon {phrases.fmt(s['effect_horizon'])})"
                )
        else:
            out.append(f"  target {adv['target']}: no suggestions")
        for s in adv["skipped"]:
            out.append(f"    skipped {s['variable']} ({s['reason']})")
    out.append("")
    out.append("Advice")
    for sentence in doc["advice_text"]:
        out.append(f"  - {sentence}")
    return "\n".join(out) + "\n"


def render_whatif_text(doc: dict[str, Any]) -> str:
    out = []
    for s in doc["suggestions"]:
        out.append(
            phrases.whatif_line(
                doc["target"], s["variable"], doc["desired_percent"], s["required_percent"]
            )
        )
    if not doc["suggestions"]:
        out.append(f"No workable suggestion for {doc['target']}.")
    for s in doc["skipped"]:
        out.append(f"skipped {s['variable']} ({s['reason']})")
    return "\n".join(out) + "\n"
