import dataclasses
import math

import numpy as np
import pytest

from helpers import ar1_model, fitted_2var_model, golden_model, random_stable_model
from varpulse import (
    ConfigError,
    DomainError,
    IrfOptions,
    RunConfig,
    VariableMeta,
    VarModel,
    build_advice_report,
    determine_length_of_effect,
    determine_most_influential,
    determine_percentage_effect,
    effect_length_from_values,
    irf_total,
    percentage_change_required,
    response_grid,
)
from varpulse.advice import (
    SKIP_BELOW_THRESHOLD,
    SKIP_NO_EFFECT,
    SKIP_OUTSIDE_WINDOW,
    SKIP_ZERO_MEAN,
    SKIP_ZERO_SD,
    options_from,
    resolve_bootstrap,
)


def test_run_config_validation():
    RunConfig()
    for bad in (
        dict(horizon=0),
        dict(iterations=0),
        dict(confidence=1.5),
        dict(theta=-0.1),
        dict(window=0.0),
        dict(workers=0),
        dict(interval_minutes=0.0),
    ):
        with pytest.raises(ConfigError):
            RunConfig(**bad)


def test_resolve_bootstrap_tristate():
    fitted = fitted_2var_model()
    plain = golden_model()
    assert resolve_bootstrap(fitted, RunConfig()) is True
    assert resolve_bootstrap(plain, RunConfig()) is False
    assert resolve_bootstrap(fitted, RunConfig(bootstrap=False)) is False
    with pytest.raises(ConfigError):
        resolve_bootstrap(plain, RunConfig(bootstrap=True))


def test_options_from_wires_masking_to_bootstrap():
    fitted = fitted_2var_model()
    opts = options_from(fitted, RunConfig(horizon=7))
    assert opts.bootstrap is not None and opts.masked
    off = options_from(fitted, RunConfig(bootstrap=False))
    assert off.bootstrap is None and not off.masked


# ------------------------------------------------------------ effect length


def test_effect_length_geometric_decay():
    # 0.5^t crosses the 1e-4 threshold between steps 13 and 14; the
    # interpolated end lands at 13.3616 exactly (hand-derived)
    values = 0.5 ** np.arange(41)
    out = effect_length_from_values(values, interval_minutes=60.0)
    assert out.total_steps == pytest.approx(13.3616, abs=1e-9)
    assert out.effective_horizon == pytest.approx(13.3616, abs=1e-9)
    assert out.total_minutes == pytest.approx(13.3616 * 60.0, abs=1e-6)


def test_effect_length_golden_series():
    values = np.array([0.0, 0.3, 0.21, 0.117])
    out = effect_length_from_values(values, interval_minutes=360.0)
    # starts 1/3000 of a step after 0, still live at the horizon
    assert out.total_steps == pytest.approx(3.0 - 1.0 / 3000.0, abs=1e-12)
    assert out.total_minutes == pytest.approx(1079.88, abs=1e-9)
    assert out.effective_horizon == 3.0


def test_effect_length_two_exact_steps():
    # negative excursion of exactly two steps once interpolated
    values = np.array([0.0, -2e-4, -2e-4, 0.0])
    out = effect_length_from_values(values, interval_minutes=360.0)
    assert out.total_minutes == 720.0
    assert out.total_steps == 2.0
    assert out.effective_horizon == 2.5


def test_effect_length_zero_series():
    out = effect_length_from_values(np.zeros(10), 60.0)
    assert out.total_steps == 0.0
    assert out.total_minutes == 0.0
    assert out.effective_horizon == 0.0


def test_effect_length_single_live_step():
    values = np.array([1.0, 0.0, 0.0])
    out = effect_length_from_values(values, 1.0)
    # start 0, end interpolated against the falling edge just before 1
    assert out.total_steps == pytest.approx(1.0 - 1e-4, abs=1e-12)
    assert out.effective_horizon == pytest.approx(1.0 - 1e-4, abs=1e-12)


def test_effect_length_multiple_episodes():
    values = np.array([0.0, 1.0, 0.0, 0.0, 1.0, 0.0])
    out = effect_length_from_values(values, 1.0)
    single = effect_length_from_values(np.array([0.0, 1.0, 0.0]), 1.0)
    assert out.total_steps == pytest.approx(2 * single.total_steps, abs=1e-12)
    assert out.effective_horizon > 4.0


def test_effect_length_truncates_at_horizon():
    values = np.ones(5)
    out = effect_length_from_values(values, 1.0)
    assert out.total_steps == 4.0
    assert out.effective_horizon == 4.0


def test_effect_length_invariants_on_random_series():
    rng = np.random.default_rng(61)
    for _ in range(50):
        values = rng.normal(scale=rng.choice([1.0, 1e-3, 1e-4]), size=12)
        out = effect_length_from_values(values, 30.0)
        k = values.shape[0] - 1
        assert 0.0 <= out.total_steps <= k
        assert out.total_steps <= out.effective_horizon <= k or (
            out.total_steps == 0.0 and out.effective_horizon == 0.0
        )
        assert out.total_minutes == out.total_steps * 30.0


def test_effect_length_empty_series_rejected():
    with pytest.raises(DomainError):
        effect_length_from_values(np.array([]), 60.0)


def test_determine_length_of_effect():
    model = golden_model()
    out = determine_length_of_effect(model, 0, 1, options=IrfOptions(horizon=3))
    assert out.total_minutes == pytest.approx(1079.88, abs=1e-9)
    zero_interval = determine_length_of_effect(
        model, 0, 1, interval_minutes=0.0, options=IrfOptions(horizon=3)
    )
    assert zero_interval.total_minutes == 0.0
    assert zero_interval.total_steps == out.total_steps
    with pytest.raises(DomainError):
        determine_length_of_effect(model, 0, 1, interval_minutes=-1.0)
    with pytest.raises(DomainError):
        determine_length_of_effect(model, 0, 5)


# ---------------------------------------------------------------- influence


def test_ranking_golden():
    ranking = determine_most_influential(golden_model(), IrfOptions(horizon=3))
    assert [e.name for e in ranking.entries] == ["var0", "var1"]
    assert ranking.top.net_effect == pytest.approx(0.627, abs=1e-12)
    assert ranking.entries[1].net_effect == 0.0
    assert ranking.horizon == 3
    assert ranking.bootstrap is False


def test_ranking_orders_by_absolute_net():
    model = golden_model(pol1="negative")  # net flips to -0.627
    ranking = determine_most_influential(model, IrfOptions(horizon=3))
    assert ranking.top.name == "var0"
    assert ranking.top.net_effect == pytest.approx(-0.627, abs=1e-12)


def test_ranking_tie_breaks_by_index():
    model = VarModel(
        variables=(VariableMeta("a"), VariableMeta("b")),
        coefficients=np.array([[[0.0, 0.4], [0.4, 0.0]]]),
        constant=np.zeros(2),
        sigma=np.eye(2),
    )
    ranking = determine_most_influential(model, IrfOptions(horizon=6))
    assert [e.index for e in ranking.entries] == [0, 1]


def test_ranking_matches_irf_total():
    rng = np.random.default_rng(62)
    for _ in range(4):
        model = random_stable_model(rng, m=4, p=2)
        opts = IrfOptions(horizon=9)
        ranking = determine_most_influential(model, opts)
        for entry in ranking.entries:
            assert entry.net_effect == pytest.approx(
                irf_total(model, entry.index, opts), rel=1e-12, abs=1e-12
            )
        nets = [abs(e.net_effect) for e in ranking.entries]
        assert nets == sorted(nets, reverse=True)


# --------------------------------------------------------- percentage advice


def test_percentage_kernel_worked_identity():
    # with target mean 50, target sd 15, desired 10% over one unit of
    # cumulative effect and 10 steps, the answer times (other mean /
    # (100 * other sd)) is 10/3 whatever the other variable's stats are
    rng = np.random.default_rng(63)
    for _ in range(10):
        other_mean = float(rng.uniform(0.5, 20.0))
        other_sd = float(rng.uniform(0.1, 5.0))
        pct = percentage_change_required(
            desired_percent=10.0,
            target_mean=50.0,
            target_sd=15.0,
            other_mean=other_mean,
            other_sd=other_sd,
            net_effect=1.0,
            effect_horizon=10.0,
        )
        assert pct * other_mean / (other_sd * 100.0) == pytest.approx(
            10.0 / 3.0, rel=1e-9
        )


def test_percentage_kernel_round_trip():
    # feeding the answer back as the desired change of the *other*
    # variable must return the original desired percentage
    rng = np.random.default_rng(64)
    for _ in range(20):
        args = dict(
            target_mean=float(rng.uniform(1, 10)),
            target_sd=float(rng.uniform(0.2, 3)),
            other_mean=float(rng.uniform(1, 10)),
            other_sd=float(rng.uniform(0.2, 3)),
            net_effect=float(rng.uniform(-2, 2) or 0.5),
            effect_horizon=float(rng.uniform(1, 12)),
        )
        desired = float(rng.uniform(-50, 50))
        pct = percentage_change_required(desired, **args)
        back = percentage_change_required(
            pct,
            target_mean=args["other_mean"],
            target_sd=args["other_sd"],
            other_mean=args["target_mean"],
            other_sd=args["target_sd"],
            net_effect=1.0 / args["net_effect"],
            effect_horizon=1.0 / args["effect_horizon"],
        )
        assert back == pytest.approx(desired, rel=1e-9)


def test_whatif_golden_value():
    advice = determine_percentage_effect(
        golden_model(), target=1, desired_percent=10.0, options=IrfOptions(horizon=3)
    )
    assert advice.target == "var1"
    assert len(advice.suggestions) == 1
    s = advice.suggestions[0]
    assert s.name == "var0"
    assert s.required_percent == pytest.approx(76.55502392344498, rel=1e-12)
    assert s.net_effect == pytest.approx(0.627, abs=1e-12)
    assert s.effect_horizon == 3.0
    assert advice.skipped == ()


def test_whatif_no_effect_reason():
    advice = determine_percentage_effect(
        golden_model(), target=0, options=IrfOptions(horizon=3)
    )
    assert advice.suggestions == ()
    assert [s.reason for s in advice.skipped] == [SKIP_NO_EFFECT]
    assert advice.skipped[0].name == "var1"


def test_whatif_uses_floored_effective_horizon():
    # net effect must cover steps 0..floor(k_hat) of the lever series
    model = golden_model()
    grid = response_grid(model, IrfOptions(horizon=3))
    series = grid.series(0, 1)
    k_hat = effect_length_from_values(series, 0.0).effective_horizon
    expected_net = float(np.sum(series[: math.floor(k_hat) + 1]))
    advice = determine_percentage_effect(model, 1, options=IrfOptions(horizon=3))
    assert advice.suggestions[0].net_effect == expected_net


def test_whatif_below_threshold_reason():
    advice = determine_percentage_effect(
        golden_model(), target=1, theta=0.7, options=IrfOptions(horizon=3)
    )
    assert [s.reason for s in advice.skipped] == [SKIP_BELOW_THRESHOLD]


def test_whatif_zero_mean_reason():
    model = golden_model()
    zero_mean = dataclasses.replace(
        model,
        variables=(
            VariableMeta("var0", "positive", 0.0, 2.0),
            model.variables[1],
        ),
    )
    advice = determine_percentage_effect(zero_mean, 1, options=IrfOptions(horizon=3))
    assert [s.reason for s in advice.skipped] == [SKIP_ZERO_MEAN]


def test_whatif_zero_sd_reason():
    model = golden_model()
    zero_sd = dataclasses.replace(
        model,
        variables=(
            model.variables[0],
            VariableMeta("var1", "positive", 4.0, 0.0),
        ),
    )
    advice = determine_percentage_effect(zero_sd, 1, options=IrfOptions(horizon=3))
    assert [s.reason for s in advice.skipped] == [SKIP_ZERO_SD]


def test_whatif_window_is_inclusive():
    model = golden_model()
    base = determine_percentage_effect(model, 1, options=IrfOptions(horizon=3))
    pct = base.suggestions[0].required_percent
    kept = determine_percentage_effect(
        model, 1, window=pct, options=IrfOptions(horizon=3)
    )
    assert len(kept.suggestions) == 1
    dropped = determine_percentage_effect(
        model, 1, window=pct - 1e-9, options=IrfOptions(horizon=3)
    )
    assert [s.reason for s in dropped.skipped] == [SKIP_OUTSIDE_WINDOW]


def test_whatif_negative_desired_percent_flips_sign():
    model = golden_model()
    up = determine_percentage_effect(model, 1, desired_percent=10.0, options=IrfOptions(horizon=3))
    down = determine_percentage_effect(model, 1, desired_percent=-10.0, options=IrfOptions(horizon=3))
    assert down.suggestions[0].required_percent == pytest.approx(
        -up.suggestions[0].required_percent, rel=1e-12
    )


def test_whatif_sorts_by_magnitude():
    rng = np.random.default_rng(65)
    for _ in range(5):
        model = random_stable_model(rng, m=4, p=1, radius=0.6)
        advice = determine_percentage_effect(model, 2, options=IrfOptions(horizon=8))
        mags = [abs(s.required_percent) for s in advice.suggestions]
        assert mags == sorted(mags)


def test_whatif_validation():
    with pytest.raises(DomainError):
        determine_percentage_effect(golden_model(), 9)
    with pytest.raises(ConfigError):
        determine_percentage_effect(golden_model(), 0, theta=-1.0)
    with pytest.raises(ConfigError):
        determine_percentage_effect(golden_model(), 0, window=0.0)


# ------------------------------------------------------------------- report


def test_report_golden_structure():
    report = build_advice_report(golden_model(), RunConfig(horizon=3))
    assert report.names == ("var0", "var1")
    assert report.horizon == 3
    assert report.bootstrap is False
    assert report.iterations is None and report.seed is None
    assert report.influence.top.name == "var0"
    pairs = {(p.impulse, p.response) for p in report.effect_lengths}
    assert pairs == {("var0", "var1"), ("var1", "var0")}
    assert len(report.whatif) == 2
    assert report.whatif[1].suggestions[0].required_percent == pytest.approx(
        76.55502392344498, rel=1e-12
    )


def test_report_sentences_golden():
    report = build_advice_report(golden_model(), RunConfig(horizon=3))
    assert report.sentences[0] == (
        "If you were to increase your var0, this seems to positively "
        "affect your well-being."
    )
    assert "keeps affecting var1 for approximately 1079.880 minutes" in report.sentences[1]
    assert report.sentences[2] == (
        "In order to increase your var1 by 10.000%, you can increase "
        "your var0 by 76.555%."
    )


def test_report_negative_top_label():
    report = build_advice_report(golden_model(pol0="negative"), RunConfig(horizon=3))
    assert report.sentences[0].startswith("If you were to increase your less var0")


def test_report_interval_override():
    report = build_advice_report(
        golden_model(), RunConfig(horizon=3, interval_minutes=60.0)
    )
    assert report.interval_minutes == 60.0
    by_pair = {(p.impulse, p.response): p.length for p in report.effect_lengths}
    assert by_pair[("var0", "var1")].total_minutes == pytest.approx(
        (3.0 - 1.0 / 3000.0) * 60.0, abs=1e-9
    )


def test_report_with_bootstrap_records_settings():
    fitted = fitted_2var_model()
    report = build_advice_report(fitted, RunConfig(horizon=5, iterations=16, seed=7))
    assert report.bootstrap is True
    assert report.iterations == 16
    assert report.confidence == 0.95
    assert report.seed == 7
    assert report.n_effective is not None and 1 <= report.n_effective <= 16


def test_report_deterministic_across_workers():
    fitted = fitted_2var_model()
    a = build_advice_report(fitted, RunConfig(horizon=5, iterations=16, workers=1))
    b = build_advice_report(fitted, RunConfig(horizon=5, iterations=16, workers=3))
    assert a.influence == b.influence
    assert a.whatif == b.whatif
    assert a.effect_lengths == b.effect_lengths


def test_whatif_summary_two_actions_phrasing():
    from varpulse.phrases import whatif_summary

    sentence = whatif_summary(
        "cheerfulness", 10.0, [("concentration", 20.0), ("agitation", -33.0)]
    )
    assert sentence == (
        "In order to increase your cheerfulness by 10.000%, you can either "
        "increase your concentration by 20.000% or decrease your agitation "
        "by 33.000%."
    )


def test_whatif_summary_empty_is_none():
    from varpulse.phrases import whatif_summary

    assert whatif_summary("x", 10.0, []) is None
