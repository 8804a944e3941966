"""Conversion of a VAR to its vector moving average representation.

A stable VAR can be rewritten as an (approximate, truncated) moving
average of past shocks:

    Y_t = mu + e_t + psi_1 e_{t-1} + psi_2 e_{t-2} + ...

The psi matrices are built here from a triangular table of products of
the lag matrices.  Row i of the table holds the blocks C[i][1..i]; their
sum is psi_i, the response of the system i steps after a shock.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import VarModel, check_stability


@dataclass(frozen=True)
class VmaCoefficients:
    """Truncated moving-average form of a VAR.

    Attributes
    ----------
    rows : tuple of tuples of ndarray
        ``rows[i-1][j-1]`` is the m x m block C[i][j] (1-based i, j; j <= i).
    row_sums : ndarray, shape (horizon, m, m)
        ``row_sums[i-1]`` is psi_i, the sum over row i.
    equilibrium_offset : ndarray or None
        The mean implied by the constant, (I - sum B[j])^-1 c; None when
        that system is singular (unit-root models have no equilibrium).
    stable : bool
        Verdict carried over from the stability check.
    """

    n_vars: int
    horizon: int
    rows: tuple[tuple[np.ndarray, ...], ...]
    row_sums: np.ndarray
    equilibrium_offset: np.ndarray | None
    stable: bool

    def block(self, i: int, j: int) -> np.ndarray:
        """C[i][j] for 1 <= j <= i <= horizon."""
        if not 1 <= i <= self.horizon:
            raise DomainError(f"row {i} outside 1..{self.horizon}")
        if not 1 <= j <= i:
            raise DomainError(f"column {j} outside 1..{i}")
        return self.rows[i - 1][j - 1]

    def psi(self, i: int) -> np.ndarray:
        """psi_i for 0 <= i <= horizon (psi_0 is the identity)."""
        if i == 0:
            return np.eye(self.n_vars)
        if not 1 <= i <= self.horizon:
            raise DomainError(f"step {i} outside 0..{self.horizon}")
        return self.row_sums[i - 1]


def _delta(model: VarModel, j: int) -> np.ndarray:
    """Lag matrix B[j], or a zero block past the model's order."""
    if 1 <= j <= model.lags:
        return model.coefficients[j - 1]
    return np.zeros((model.n_vars, model.n_vars))


def calculate_vma(model: VarModel, horizon: int) -> VmaCoefficients:
    """Build the moving-average blocks up to ``horizon`` steps ahead.

    The diagonal block of row i is the lag matrix itself; each earlier
    block chains a lag matrix with the sum of a previous row:

        C[i][i] = B[i]
        C[i][j] = B[j] @ (C[i-j][1] + ... + C[i-j][i-j])   for j < i

    Truncating an unstable model is allowed but the tail does not decay,
    so a warning is raised and downstream summaries should be read with
    care.
    """
    if horizon < 1:
        raise DomainError(f"horizon must be >= 1, got {horizon}")
    stability = check_stability(model)
    if not stability.stable:
        warnings.warn(
            f"model is not stable (spectral radius {stability.spectral_radius:.6f}); "
            "moving-average truncation will not converge",
            UserWarning,
            stacklevel=2,
        )

    m = model.n_vars
    rows: list[tuple[np.ndarray, ...]] = []
    row_sums = np.empty((horizon, m, m))
    for i in range(1, horizon + 1):
        row: list[np.ndarray] = []
        for j in range(1, i):
            row.append(_delta(model, j) @ row_sums[i - j - 1])
        row.append(_delta(model, i))
        rows.append(tuple(row))
        row_sums[i - 1] = np.sum(row, axis=0)

    lag_sum = np.sum(model.coefficients, axis=0)
    try:
        offset = np.linalg.solve(np.eye(m) - lag_sum, model.constant)
    except np.linalg.LinAlgError:
        offset = None

    return VmaCoefficients(
        n_vars=m,
        horizon=horizon,
        rows=tuple(rows),
        row_sums=row_sums,
        equilibrium_offset=offset,
        stable=stability.stable,
    )
