"""Template-based natural-language rendering of advice.

Phrasing lives in per-language template files shipped with the package;
all numbers are rendered to three decimals.  Only formatting happens
here, never computation.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from typing import Sequence


@lru_cache(maxsize=None)
def templates(locale: str = "en") -> dict[str, str]:
    text = resources.files(__package__).joinpath(f"locale/{locale}.json").read_text("utf-8")
    return json.loads(text)


def fmt(x: float) -> str:
    return f"{x:.3f}"


def display_label(name: str, polarity: str, locale: str = "en") -> str:
    """How a variable reads once everything is expressed as positive:
    negative variables are prefixed so "gloomy" becomes "less gloomy"."""
    if polarity == "negative":
        return templates(locale)["negative_label"].format(variable=name)
    return name


def influence_sentence(label: str, net_effect: float, locale: str = "en") -> str:
    t = templates(locale)
    if net_effect > 0:
        return t["influence_positive"].format(variable=label)
    if net_effect < 0:
        return t["influence_negative"].format(variable=label)
    return t["influence_none"]


def duration_sentence(
    impulse: str, response: str, minutes: float, steps: float, locale: str = "en"
) -> str:
    return templates(locale)["duration"].format(
        impulse=impulse, response=response, minutes=fmt(minutes), steps=fmt(steps)
    )


def whatif_summary(
    target: str,
    desired_percent: float,
    actions: Sequence[tuple[str, float]],
    locale: str = "en",
) -> str | None:
    """One sentence listing how each suggested variable can be moved to
    achieve the desired change; None when there is nothing to suggest."""
    if not actions:
        return None
    t = templates(locale)
    parts = []
    for name, pct in actions:
        key = "action_decrease" if pct < 0 else "action_increase"
        parts.append(t[key].format(variable=name, percent=fmt(abs(pct))))
    joined = t["or"].join(parts)
    if len(parts) > 1:
        joined = t["either"] + joined
    verb = t["verb_decrease"] if desired_percent < 0 else t["verb_increase"]
    return t["whatif_summary"].format(
        verb=verb, target=target, percent=fmt(abs(desired_percent)), actions=joined
    )


def whatif_line(
    target: str,
    variable: str,
    desired_percent: float,
    required_percent: float,
    locale: str = "en",
) -> str:
    """Single-suggestion rendering with the signed percentage spelled out."""
    t = templates(locale)
    verb = t["verb_decrease"] if desired_percent < 0 else t["verb_increase"]
    return t["whatif_line"].format(
        verb=verb, target=target, variable=variable, percent=fmt(required_percent)
    )
