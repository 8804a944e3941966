"""Vector autoregression fitting, stability diagnostics and persistence.

The model of one person's diary series is

    Y_t = c + B[1] Y_{t-1} + ... + B[p] Y_{t-p} + G X_t + e_t

with Y_t the m endogenous variables, X_t optional exogenous inputs, and
e_t white noise with covariance ``sigma``.  Every equation is estimated
separately by least squares with an intercept.
"""

from __future__ import annotations

from dataclasses import dataclass
import json
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .dataset import EmaDataset, VariableMeta, _readonly
from .errors import FitError, ModelFormatError

MODEL_FORMAT_VERSION = 1
STABILITY_MARGIN = 1e-9


@dataclass(frozen=True)
class StabilityResult:
    """Spectral radius of the companion matrix and the stable/unstable verdict."""

    stable: bool
    spectral_radius: float
    eigenvalues: tuple[complex, ...]


def _opt_array_equal(a: np.ndarray | None, b: np.ndarray | None) -> bool:
    if a is None or b is None:
        return a is b
    return a.shape == b.shape and bool(np.array_equal(a, b))


@dataclass(frozen=True, eq=False)
class VarModel:
    """Fitted VAR(p) for one individual.

    Attributes
    ----------
    variables : tuple of VariableMeta
        Metadata for the m endogenous variables (order fixes the
        coefficient layout).
    coefficients : ndarray, shape (p, m, m)
        ``coefficients[j-1]`` is the lag-j matrix B[j]; entry (r, c) is the
        effect of variable c at lag j on variable r now.
    constant : ndarray, shape (m,)
        Intercept vector c.
    sigma : ndarray, shape (m, m), optional
        Residual covariance (sample covariance of residuals, n-1).
    residuals : ndarray, shape (T-p, m), optional
        In-sample residuals, kept for bootstrap resampling.
    exo_names / exo_coefficients :
        Optional exogenous inputs and their m x n_exo coefficient matrix G.
    interval_minutes : float
        Measurement interval; converts step counts into wall-clock time.
    presample : ndarray, shape (p, m), optional
        The first p observed rows.  Kept in the model file so bootstrap
        regeneration stays conditioned on the observed start of the
        series even after a save/load round trip.
    data : EmaDataset, optional
        The series the model was fitted on (needed to rebuild bootstrap
        replicates with exogenous inputs).
    """

    variables: tuple[VariableMeta, ...]
    coefficients: np.ndarray
    constant: np.ndarray
    sigma: np.ndarray | None = None
    residuals: np.ndarray | None = None
    exo_names: tuple[str, ...] = ()
    exo_coefficients: np.ndarray | None = None
    interval_minutes: float = 1.0
    presample: np.ndarray | None = None
    data: EmaDataset | None = None

    def __post_init__(self) -> None:
        m = len(self.variables)
        if m == 0:
            raise ValueError("model needs at least one variable")
        coeff = np.asarray(self.coefficients, dtype=float)
        if coeff.ndim != 3 or coeff.shape[1:] != (m, m):
            raise ValueError(f"coefficients must be p x {m} x {m}, got {coeff.shape}")
        if coeff.shape[0] == 0:
            raise ValueError("model needs at least one lag")
        const = np.asarray(self.constant, dtype=float)
        if const.shape != (m,):
            raise ValueError(f"constant must have shape ({m},), got {const.shape}")
        if not (np.all(np.isfinite(coeff)) and np.all(np.isfinite(const))):
            raise ValueError("coefficients and constant must be finite")
        object.__setattr__(self, "coefficients", _readonly(coeff))
        object.__setattr__(self, "constant", _readonly(const))
        object.__setattr__(self, "variables", tuple(self.variables))
        if self.sigma is not None:
            sig = np.asarray(self.sigma, dtype=float)
            if sig.shape != (m, m):
                raise ValueError(f"sigma must be {m} x {m}, got {sig.shape}")
            if not np.allclose(sig, sig.T, atol=1e-10):
                raise ValueError("sigma must be symmetric")
            object.__setattr__(self, "sigma", _readonly(sig))
        if self.residuals is not None:
            res = np.asarray(self.residuals, dtype=float)
            if res.ndim != 2 or res.shape[1] != m:
                raise ValueError(f"residuals must be T' x {m}, got {res.shape}")
            object.__setattr__(self, "residuals", _readonly(res))
            if self.sigma is not None and res.shape[0] > 1:
                implied = np.cov(res, rowvar=False, ddof=1).reshape(m, m)
                if not np.allclose(self.sigma, implied, atol=1e-8):
                    raise ValueError(
                        "residual_covariance disagrees with the sample covariance "
                        "of the residuals"
                    )
        object.__setattr__(self, "exo_names", tuple(self.exo_names))
        if (self.exo_coefficients is None) != (len(self.exo_names) == 0):
            raise ValueError("exo_names and exo_coefficients must be given together")
        if self.exo_coefficients is not None:
            exo = np.asarray(self.exo_coefficients, dtype=float)
            if exo.shape != (m, len(self.exo_names)):
                raise ValueError(
                    f"exo_coefficients must be {m} x {len(self.exo_names)}, got {exo.shape}"
                )
            object.__setattr__(self, "exo_coefficients", _readonly(exo))
        if self.presample is not None:
            pre = np.asarray(self.presample, dtype=float)
            if pre.shape != (coeff.shape[0], m):
                raise ValueError(
                    f"presample must be {coeff.shape[0]} x {m}, got {pre.shape}"
                )
            object.__setattr__(self, "presample", _readonly(pre))
        if not self.interval_minutes > 0:
            raise ValueError("interval_minutes must be positive")

    def __eq__(self, other: object) -> bool:
        """Equality over the persisted fields; the attached dataset is
        provenance, not part of the model's identity."""
        if not isinstance(other, VarModel):
            return NotImplemented
        return (
            self.variables == other.variables
            and np.array_equal(self.coefficients, other.coefficients)
            and np.array_equal(self.constant, other.constant)
            and _opt_array_equal(self.sigma, other.sigma)
            and _opt_array_equal(self.residuals, other.residuals)
            and self.exo_names == other.exo_names
            and _opt_array_equal(self.exo_coefficients, other.exo_coefficients)
            and self.interval_minutes == other.interval_minutes
            and _opt_array_equal(self.presample, other.presample)
        )

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    @property
    def lags(self) -> int:
        return int(self.coefficients.shape[0])

    def names(self) -> list[str]:
        return [v.name for v in self.variables]

    def index_of(self, name: str) -> int:
        for i, v in enumerate(self.variables):
            if v.name == name:
                return i
        raise KeyError(f"unknown variable {name!r}; have {self.names()}")

    def lag_matrix(self, j: int) -> np.ndarray:
        """B[j] for 1 <= j <= p."""
        if not 1 <= j <= self.lags:
            raise IndexError(f"lag {j} outside 1..{self.lags}")
        return self.coefficients[j - 1]

    def polarity_vector(self) -> np.ndarray:
        """+1/-1 per variable (+1 when more of it is a good thing)."""
        return np.array(
            [1.0 if v.polarity == "positive" else -1.0 for v in self.variables]
        )


def companion_matrix(model: VarModel) -> np.ndarray:
    """Stack the lag matrices into the (m*p) x (m*p) companion form.

    The top block row is [B[1] ... B[p]]; an identity shifts the state
    down one lag per step.  Powers of this matrix advance the system, so
    its spectral radius decides stability.
    """
    m, p = model.n_vars, model.lags
    comp = np.zeros((m * p, m * p))
    comp[:m, :] = np.hstack([model.coefficients[j] for j in range(p)])
    if p > 1:
        comp[m:, : m * (p - 1)] = np.eye(m * (p - 1))
    return comp


def check_stability(model: VarModel) -> StabilityResult:
    """Classify the model as stable (all companion eigenvalues inside the
    unit circle, with a small numerical margin) or unstable."""
    eig = np.linalg.eigvals(companion_matrix(model))
    radius = float(np.max(np.abs(eig))) if eig.size else 0.0
    return StabilityResult(
        stable=radius < 1.0 - STABILITY_MARGIN,
        spectral_radius=radius,
        eigenvalues=tuple(complex(v) for v in eig),
    )


def _design_matrix(
    rows: np.ndarray, lags: int, exo_rows: np.ndarray | None
) -> tuple[np.ndarray, np.ndarray]:
    """Lagged regressor matrix and aligned targets for least squares.

    Column order per row t: 1, Y_{t-1}, ..., Y_{t-p}, X_t.
    """
    T, m = rows.shape
    n = T - lags
    parts = [np.ones((n, 1))]
    for j in range(1, lags + 1):
        parts.append(rows[lags - j : T - j])
    if exo_rows is not None:
        parts.append(exo_rows[lags:])
    return np.hstack(parts), rows[lags:]


def fit_var(data: EmaDataset, lags: int) -> VarModel:
    """Estimate a VAR(p) from a diary dataset by per-equation least squares.

    Raises
    ------
    FitError
        Too few observations for the requested lag order, or a design
        matrix too collinear to solve.
    """
    if lags < 1:
        raise FitError(f"lag order must be >= 1, got {lags}")
    T, m = data.rows.shape
    for i, v in enumerate(data.variables):
        if np.ptp(data.rows[:, i]) == 0.0:
            raise FitError(f"column {v.name!r} has zero variance; cannot be regressed")
    n_exo = len(data.exo_names)
    n_params = 1 + lags * m + n_exo
    if T - lags < n_params:
        raise FitError(
            f"{T} observations cannot identify a lag-{lags} model of {m} variables "
            f"({n_params} parameters per equation, {T - lags} usable rows)"
        )

    X, Y = _design_matrix(data.rows, lags, data.exo_rows)
    try:
        beta, _, rank, _ = np.linalg.lstsq(X, Y, rcond=None)
    except np.linalg.LinAlgError as exc:
        raise FitError(f"least squares failed: {exc}") from exc
    if rank < X.shape[1]:
        raise FitError(
            f"design matrix is rank deficient ({rank} < {X.shape[1]}); "
            "series may be constant or collinear"
        )

    # beta rows: intercept, then m rows per lag, then exogenous rows.
    constant = beta[0]
    coeffs = np.empty((lags, m, m))
    for j in range(lags):
        # transpose: design packs Y_{t-j} as columns, B[j] acts on the left
        coeffs[j] = beta[1 + j * m : 1 + (j + 1) * m].T
    exo_coeffs = beta[1 + lags * m :].T if n_exo else None

    residuals = Y - X @ beta
    dof = residuals.shape[0] - 1
    sigma = (residuals.T @ residuals) / dof if dof > 0 else np.zeros((m, m))

    return VarModel(
        variables=data.variables,
        coefficients=coeffs,
        constant=constant,
        sigma=sigma,
        residuals=residuals,
        exo_names=data.exo_names,
        exo_coefficients=exo_coeffs,
        interval_minutes=data.interval_minutes,
        presample=np.array(data.rows[:lags]),
        data=data,
    )


def _matrix(rows: Any, shape: tuple[int, ...], what: str) -> np.ndarray:
    try:
        arr = np.asarray(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ModelFormatError(f"{what}: not numeric") from exc
    if arr.shape != shape:
        raise ModelFormatError(f"{what}: expected shape {shape}, got {arr.shape}")
    return arr


def model_to_dict(model: VarModel) -> dict[str, Any]:
    """Plain-JSON representation of a model (the on-disk schema)."""
    doc: dict[str, Any] = {
        "version": MODEL_FORMAT_VERSION,
        "variables": [
            {"name": v.name, "polarity": v.polarity, "mean": v.mean, "sd": v.sd}
            for v in model.variables
        ],
        "lags": model.lags,
        "coefficient_blocks": [model.coefficients[j].tolist() for j in range(model.lags)],
        "constant": model.constant.tolist(),
        "interval_minutes": model.interval_minutes,
    }
    if model.exo_names:
        doc["exo_names"] = list(model.exo_names)
        doc["exo_coefficients"] = model.exo_coefficients.tolist()
    if model.sigma is not None:
        doc["residual_covariance"] = model.sigma.tolist()
    if model.residuals is not None:
        doc["residuals"] = model.residuals.tolist()
    if model.presample is not None:
        doc["presample"] = model.presample.tolist()
    return doc


def model_from_dict(doc: Any) -> VarModel:
    """Inverse of :func:`model_to_dict` with format validation."""
    if not isinstance(doc, dict):
        raise ModelFormatError(f"model document must be an object, got {type(doc).__name__}")
    version = doc.get("version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model format version {version!r}")
    raw_vars = doc.get("variables")
    if not isinstance(raw_vars, list) or not raw_vars:
        raise ModelFormatError("'variables' must be a non-empty list")
    variables = []
    for i, rv in enumerate(raw_vars):
        if not isinstance(rv, dict) or "name" not in rv:
            raise ModelFormatError(f"variables[{i}] must be an object with a 'name'")
        try:
            variables.append(
                VariableMeta(
                    name=str(rv["name"]),
                    polarity=rv.get("polarity", "positive"),
                    mean=float(rv.get("mean", 0.0)),
                    sd=float(rv.get("sd", 1.0)),
                )
            )
        except ValueError as exc:
            raise ModelFormatError(f"variables[{i}]: {exc}") from exc
    m = len(variables)
    lags = doc.get("lags")
    if not isinstance(lags, int) or lags < 1:
        raise ModelFormatError(f"'lags' must be a positive integer, got {lags!r}")
    blocks = doc.get("coefficient_blocks")
    if not isinstance(blocks, list) or len(blocks) != lags:
        raise ModelFormatError(f"'coefficient_blocks' must list {lags} matrices")
    coeffs = np.stack(
        [_matrix(b, (m, m), f"coefficient_blocks[{j}]") for j, b in enumerate(blocks)]
    )
    constant = _matrix(doc.get("constant", [0.0] * m), (m,), "constant")
    exo_names = tuple(doc.get("exo_names", ()))
    exo_coeffs = None
    if exo_names:
        exo_coeffs = _matrix(
            doc.get("exo_coefficients"), (m, len(exo_names)), "exo_coefficients"
        )
    sigma = None
    if "residual_covariance" in doc:
        sigma = _matrix(doc["residual_covariance"], (m, m), "residual_covariance")
    residuals = None
    if "residuals" in doc:
        raw = doc["residuals"]
        if not isinstance(raw, list):
            raise ModelFormatError("'residuals' must be a list of rows")
        residuals = _matrix(raw, (len(raw), m), "residuals")
    if sigma is None and residuals is None:
        raise ModelFormatError(
            "model file must carry residual_covariance or residuals "
            "(orthogonalization and bootstrap need one of them)"
        )
    if sigma is None:
        if residuals.shape[0] > 1:
            sigma = np.cov(residuals, rowvar=False, ddof=1).reshape(m, m)
        else:
            sigma = np.zeros((m, m))
    presample = None
    if "presample" in doc:
        presample = _matrix(doc["presample"], (lags, m), "presample")
    interval = doc.get("interval_minutes", 1.0)
    try:
        return VarModel(
            variables=tuple(variables),
            coefficients=coeffs,
            constant=constant,
            sigma=sigma,
            residuals=residuals,
            exo_names=exo_names,
            exo_coefficients=exo_coeffs,
            interval_minutes=float(interval),
            presample=presample,
        )
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from exc


def save_model(model: VarModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model), indent=2) + "\n", encoding="utf-8")


def load_model(path: str | Path) -> VarModel:
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: not valid JSON ({exc})") from exc
    return model_from_dict(doc)
