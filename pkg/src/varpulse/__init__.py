"""Personalized advice from vector-autoregressive models of diary data.

Fit a VAR model to a person's repeated self-reports, convert it to its
moving-average form, simulate how a nudge to one variable plays out over
the following days, and turn the simulations into concrete advice: which
variable matters most, how long its effects last, and how much of it
would be needed to move another variable by a desired percentage.
"""

from importlib.metadata import PackageNotFoundError, version

from .advice import (
    AdviceReport,
    EffectLength,
    InfluenceEntry,
    InfluenceRanking,
    PairEffectLength,
    PercentageAdvice,
    PercentageSuggestion,
    RunConfig,
    SkippedVariable,
    build_advice_report,
    determine_length_of_effect,
    determine_most_influential,
    determine_percentage_effect,
    effect_length_from_values,
    percentage_change_required,
)
from .analysis import (
    ImpulseResponse,
    IrfOptions,
    ResponseGrid,
    bootstrap_irf,
    cumulative,
    irf,
    irf_cum,
    irf_total,
    response_grid,
    significance_mask,
)
from .bootstrap import (
    BootstrapBands,
    BootstrapConfig,
    bootstrap_bands,
    can_bootstrap,
    replicate_model,
    simulate_series,
)
from .dataset import EmaDataset, VariableMeta, load_ema_csv, parse_ema_csv
from .errors import (
    BootstrapUnavailableError,
    ConfigError,
    DecompositionError,
    DomainError,
    FitError,
    MissingDataError,
    ModelFormatError,
    ParseError,
    VarpulseError,
)
from .irf import (
    calculate_irf,
    exogenous_polarity_matrix,
    orthogonalize,
    polarity_matrix,
    polarity_transform,
    psi_tensor,
    unit_shock,
)
from .model import (
    StabilityResult,
    VarModel,
    check_stability,
    companion_matrix,
    fit_var,
    load_model,
    model_from_dict,
    model_to_dict,
    save_model,
)
from .vma import VmaCoefficients, calculate_vma

try:
    __version__ = version("varpulse")
except PackageNotFoundError:
    __version__ = "0.0.0"

__all__ = [
    "AdviceReport",
    "BootstrapBands",
    "BootstrapConfig",
    "BootstrapUnavailableError",
    "ConfigError",
    "DecompositionError",
    "DomainError",
    "EffectLength",
    "EmaDataset",
    "FitError",
    "ImpulseResponse",
    "InfluenceEntry",
    "InfluenceRanking",
    "IrfOptions",
    "MissingDataError",
    "ModelFormatError",
    "PairEffectLength",
    "ParseError",
    "PercentageAdvice",
    "PercentageSuggestion",
    "ResponseGrid",
    "RunConfig",
    "SkippedVariable",
    "StabilityResult",
    "VarModel",
    "VariableMeta",
    "VarpulseError",
    "VmaCoefficients",
    "bootstrap_bands",
    "bootstrap_irf",
    "build_advice_report",
    "calculate_irf",
    "calculate_vma",
    "can_bootstrap",
    "check_stability",
    "companion_matrix",
    "cumulative",
    "determine_length_of_effect",
    "determine_most_influential",
    "determine_percentage_effect",
    "effect_length_from_values",
    "exogenous_polarity_matrix",
    "fit_var",
    "irf",
    "irf_cum",
    "irf_total",
    "load_ema_csv",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "orthogonalize",
    "parse_ema_csv",
    "percentage_change_required",
    "polarity_matrix",
    "polarity_transform",
    "psi_tensor",
    "replicate_model",
    "response_grid",
    "save_model",
    "significance_mask",
    "simulate_series",
    "unit_shock",
    "__version__",
]
