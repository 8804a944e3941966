"""Impulse response primitives: shocks, step responses, polarity and
orthogonalization.

An impulse response traces what a one-off unit jolt to one variable does
to every variable over the following steps.  With the moving-average
blocks in hand this is cheap: the response t steps out is psi_t applied
to the shock vector.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .errors import DecompositionError, DomainError
from .model import VarModel
from .vma import VmaCoefficients


def unit_shock(n_vars: int, index: int) -> np.ndarray:
    """Unit impulse to a single variable (one-standard-deviation shock
    under the standardized-answer convention)."""
    if not 0 <= index < n_vars:
        raise DomainError(f"variable index {index} outside 0..{n_vars - 1}")
    shock = np.zeros(n_vars)
    shock[index] = 1.0
    return shock


def calculate_irf(
    shock: np.ndarray,
    vma: VmaCoefficients,
    horizon: int | None = None,
    step_zero: np.ndarray | None = None,
) -> np.ndarray:
    """Responses of all variables to one shock vector.

    Returns an m x (k+1) matrix: row y, column t is the response of
    variable y at step t.  Column 0 is the shock instant: the shock
    itself, or ``step_zero @ shock`` when the caller substitutes a
    contemporaneous mixing matrix (see :func:`orthogonalize`).  Later
    columns are psi_t @ shock.

    The map is linear in the shock, so scaled or mixed shock vectors are
    accepted as-is.
    """
    m = vma.n_vars
    shock = np.asarray(shock, dtype=float)
    if shock.shape != (m,):
        raise DomainError(f"shock must be a length-{m} vector, got shape {shock.shape}")
    k = vma.horizon if horizon is None else horizon
    if not 0 <= k <= vma.horizon:
        raise DomainError(f"horizon {k} outside 0..{vma.horizon}")
    out = np.empty((m, k + 1))
    out[:, 0] = shock if step_zero is None else step_zero @ shock
    for t in range(1, k + 1):
        out[:, t] = vma.row_sums[t - 1] @ shock
    return out


def psi_tensor(vma: VmaCoefficients, horizon: int | None = None) -> np.ndarray:
    """Stack psi_0..psi_k into a (k+1, m, m) array (psi_0 = identity)."""
    k = vma.horizon if horizon is None else horizon
    if not 0 <= k <= vma.horizon:
        raise DomainError(f"horizon {k} outside 0..{vma.horizon}")
    out = np.empty((k + 1, vma.n_vars, vma.n_vars))
    out[0] = np.eye(vma.n_vars)
    if k:
        out[1:] = vma.row_sums[:k]
    return out


def polarity_matrix(signs: np.ndarray) -> np.ndarray:
    """Sign-flip mask for coefficient matrices: outer product of the
    per-variable +1/-1 labels with itself.

    Entry (r, c) is +1 when variables r and c point the same way and -1
    otherwise; multiplying a lag matrix elementwise by it re-expresses
    every negative variable on a flipped axis.
    """
    signs = np.asarray(signs, dtype=float)
    if signs.ndim != 1 or not np.all(np.isin(signs, (-1.0, 1.0))):
        raise ValueError("signs must be a vector of +1/-1 labels")
    return np.outer(signs, signs)


def exogenous_polarity_matrix(signs: np.ndarray, n_exo: int) -> np.ndarray:
    """Mask for exogenous coefficients: only the response side flips, so
    the labels are paired with a row of ones."""
    signs = np.asarray(signs, dtype=float)
    if signs.ndim != 1 or not np.all(np.isin(signs, (-1.0, 1.0))):
        raise ValueError("signs must be a vector of +1/-1 labels")
    return np.outer(signs, np.ones(n_exo))


def polarity_transform(model: VarModel) -> VarModel:
    """Flip every negative variable's axis so all variables read as
    "more is better".

    Each lag matrix is multiplied elementwise by the polarity mask, and
    each exogenous column by the one-sided mask.  Everything else,
    including the polarity labels themselves, is preserved, so applying
    the transform twice returns the original coefficients exactly.
    """
    signs = model.polarity_vector()
    if np.all(signs == 1.0):
        return model
    mask = polarity_matrix(signs)
    coeffs = model.coefficients * mask
    exo = None
    if model.exo_coefficients is not None:
        exo = model.exo_coefficients * exogenous_polarity_matrix(signs, len(model.exo_names))
    return replace(model, coefficients=coeffs, exo_coefficients=exo)


def orthogonalize(model: VarModel, ordering: list[int] | None = None) -> np.ndarray:
    """Contemporaneous mixing matrix from the Cholesky factor of the
    residual covariance.

    Shocks to diary variables co-occur (the residual covariance is not
    diagonal), so a "pure" impulse to one variable drags correlated
    variables with it at step 0.  The lower-triangular Cholesky factor
    attributes that shared movement according to a causal ordering: each
    variable reacts instantly only to variables placed before it.

    ``ordering`` is a permutation of variable indices giving that
    placement (first entry reacts to nothing contemporaneously); model
    order when omitted.  The returned matrix P stays in the model's own
    variable order and satisfies P @ P.T == sigma (up to the permuted
    triangularity).
    """
    if model.sigma is None:
        raise DecompositionError(
            "model has no residual covariance; fit from data or supply one"
        )
    m = model.n_vars
    if ordering is None:
        ordering = list(range(m))
    if sorted(ordering) != list(range(m)):
        raise ValueError(f"ordering must be a permutation of 0..{m - 1}, got {ordering}")
    order = np.asarray(ordering, dtype=int)
    sigma = model.sigma[np.ix_(order, order)]
    try:
        lower = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError as exc:
        raise DecompositionError(
            f"residual covariance is not positive definite: {exc}"
        ) from exc
    mixed = np.zeros((m, m))
    mixed[np.ix_(order, order)] = lower
    return mixed
