"""Shared fixtures-in-code: reference models and independent oracles.

The oracles here deliberately avoid the package's own linear-algebra
paths (plain loops, companion powers) so the tests compare two separate
derivations of the same quantity.
"""

from __future__ import annotations

import numpy as np

from varpulse import EmaDataset, VariableMeta, VarModel


def golden_model(
    pol0: str = "positive", pol1: str = "positive", residuals: np.ndarray | None = None
) -> VarModel:
    """Hand-checkable 2-variable VAR(1): var0 feeds var1, nothing feeds back.

    B = [[0.5, 0.0], [0.3, 0.2]]; impulse var0 -> var1 gives
    [0, 0.3, 0.21, 0.117] over steps 0..3.
    """
    return VarModel(
        variables=(
            VariableMeta("var0", pol0, 5.0, 2.0),
            VariableMeta("var1", pol1, 4.0, 1.0),
        ),
        coefficients=np.array([[[0.5, 0.0], [0.3, 0.2]]]),
        constant=np.zeros(2),
        sigma=np.eye(2),
        residuals=residuals,
        interval_minutes=360.0,
    )


def scalar_var2() -> VarModel:
    """One variable, two lags (0.2, 0.3): the smallest model where the
    moving-average table has distinct off-diagonal blocks."""
    return VarModel(
        variables=(VariableMeta("x", "positive", 3.0, 1.0),),
        coefficients=np.array([[[0.2]], [[0.3]]]),
        constant=np.zeros(1),
        sigma=np.eye(1),
        interval_minutes=60.0,
    )


def ar1_model(phi: float = 0.5) -> VarModel:
    return VarModel(
        variables=(VariableMeta("x", "positive", 2.0, 1.0),),
        coefficients=np.array([[[phi]]]),
        constant=np.zeros(1),
        sigma=np.eye(1),
        interval_minutes=60.0,
    )


def naive_companion(coefficients: np.ndarray) -> np.ndarray:
    """Companion matrix built cell by cell (independent of the package)."""
    p, m, _ = coefficients.shape
    comp = np.zeros((m * p, m * p))
    for j in range(p):
        for r in range(m):
            for c in range(m):
                comp[r, j * m + c] = coefficients[j, r, c]
    for i in range(m * (p - 1)):
        comp[m + i, i] = 1.0
    return comp


def companion_psi(coefficients: np.ndarray, k: int) -> np.ndarray:
    """psi_0..psi_k as top-left blocks of companion powers (oracle)."""
    p, m, _ = coefficients.shape
    comp = naive_companion(coefficients)
    out = np.empty((k + 1, m, m))
    power = np.eye(m * p)
    out[0] = power[:m, :m]
    for t in range(1, k + 1):
        power = power @ comp
        out[t] = power[:m, :m]
    return out


def random_stable_model(
    rng: np.random.Generator,
    m: int = 3,
    p: int = 2,
    radius: float = 0.7,
    interval: float = 60.0,
    with_exo: bool = False,
    polarities: tuple[str, ...] | None = None,
) -> VarModel:
    """Random VAR(p) rescaled lag-wise to an exact target spectral radius.

    Dividing B[j] by s**j scales every companion eigenvalue by 1/s, so
    the rescaled model hits ``radius`` up to floating-point error.
    """
    while True:
        blocks = rng.normal(scale=0.5, size=(p, m, m))
        eig = np.linalg.eigvals(naive_companion(blocks))
        r = float(np.max(np.abs(eig)))
        if r > 1e-8:
            break
    s = r / radius
    blocks = blocks * (s ** -np.arange(1.0, p + 1.0))[:, None, None]
    a = rng.normal(scale=0.3, size=(m, m))
    sigma = a @ a.T + 0.1 * np.eye(m)
    if polarities is None:
        polarities = tuple(
            "negative" if rng.integers(2) else "positive" for _ in range(m)
        )
    variables = tuple(
        VariableMeta(
            f"v{i}",
            polarities[i],
            float(rng.uniform(1.0, 8.0)),
            float(rng.uniform(0.5, 3.0)),
        )
        for i in range(m)
    )
    exo_names: tuple[str, ...] = ()
    exo_coeffs = None
    if with_exo:
        exo_names = ("u0", "u1")
        exo_coeffs = rng.normal(scale=0.4, size=(m, 2))
    return VarModel(
        variables=variables,
        coefficients=blocks,
        constant=rng.normal(scale=0.5, size=m),
        sigma=sigma,
        exo_names=exo_names,
        exo_coefficients=exo_coeffs,
        interval_minutes=interval,
    )


def naive_trajectory(
    coefficients: np.ndarray,
    constant: np.ndarray,
    presample: np.ndarray,
    innovations: np.ndarray,
    exo_coefficients: np.ndarray | None = None,
    exo_rows: np.ndarray | None = None,
) -> np.ndarray:
    """Plain-loop forward simulation oracle, presample rows included."""
    p, m, _ = coefficients.shape
    history = [np.asarray(row, dtype=float) for row in presample]
    for t, shock in enumerate(innovations):
        y = np.asarray(constant, dtype=float) + np.asarray(shock, dtype=float)
        for j in range(1, p + 1):
            y = y + coefficients[j - 1] @ history[-j]
        if exo_coefficients is not None:
            y = y + exo_coefficients @ np.asarray(exo_rows[p + t], dtype=float)
        history.append(y)
    return np.array(history)


def dataset_from_model(
    rng: np.random.Generator, model: VarModel, n_obs: int, noise: float = 0.5
) -> EmaDataset:
    """Generate a dataset consistent with a model's dynamics (for fitting
    round trips); regenerates variable stats from the simulated rows."""
    m, p = model.n_vars, model.lags
    presample = rng.normal(size=(p, m))
    innovations = rng.normal(scale=noise, size=(n_obs - p, m))
    exo_rows = None
    if model.exo_names:
        exo_rows = rng.normal(size=(n_obs, len(model.exo_names)))
    rows = naive_trajectory(
        np.asarray(model.coefficients),
        np.asarray(model.constant),
        presample,
        innovations,
        None if model.exo_coefficients is None else np.asarray(model.exo_coefficients),
        exo_rows,
    )
    variables = []
    for i, v in enumerate(model.variables):
        col = rows[:, i]
        sd = float(np.std(col, ddof=1)) if col.size > 1 else 0.0
        variables.append(VariableMeta(v.name, v.polarity, float(np.mean(col)), sd))
    return EmaDataset(
        variables=tuple(variables),
        rows=rows,
        interval_minutes=model.interval_minutes,
        exo_names=model.exo_names,
        exo_rows=exo_rows,
    )


def fitted_2var_model(seed: int = 11, n_obs: int = 80):
    """A small fitted model (residuals attached) for bootstrap paths."""
    import varpulse as vp

    rng = np.random.default_rng(seed)
    base = golden_model()
    data = dataset_from_model(rng, base, n_obs)
    return vp.fit_var(data, lags=1)
