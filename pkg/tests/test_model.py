import dataclasses

import numpy as np
import pytest

from helpers import (
    dataset_from_model,
    golden_model,
    naive_companion,
    random_stable_model,
    scalar_var2,
)
from varpulse import (
    EmaDataset,
    FitError,
    ModelFormatError,
    VariableMeta,
    VarModel,
    check_stability,
    companion_matrix,
    fit_var,
    load_model,
    model_from_dict,
    model_to_dict,
    save_model,
)


def test_companion_matrix_matches_cellwise_construction():
    rng = np.random.default_rng(0)
    for _ in range(10):
        m = int(rng.integers(1, 5))
        p = int(rng.integers(1, 4))
        model = random_stable_model(rng, m=m, p=p)
        assert np.array_equal(
            companion_matrix(model), naive_companion(np.asarray(model.coefficients))
        )


def test_stability_scalar():
    assert check_stability(golden_model()).stable
    assert check_stability(golden_model()).spectral_radius == pytest.approx(0.5)
    r = check_stability(scalar_var2()).spectral_radius
    # roots of z^2 - 0.2 z - 0.3
    assert r == pytest.approx((0.2 + np.sqrt(0.04 + 1.2)) / 2, abs=1e-12)


def test_unstable_detected():
    model = VarModel(
        variables=(VariableMeta("a"), VariableMeta("b")),
        coefficients=np.array([1.2 * np.eye(2)]),
        constant=np.zeros(2),
        sigma=np.eye(2),
    )
    result = check_stability(model)
    assert not result.stable
    assert result.spectral_radius == pytest.approx(1.2)


def test_unit_root_not_stable():
    model = VarModel(
        variables=(VariableMeta("a"),),
        coefficients=np.array([[[1.0]]]),
        constant=np.zeros(1),
        sigma=np.eye(1),
    )
    assert not check_stability(model).stable


def test_stability_invariant_under_relabeling():
    rng = np.random.default_rng(3)
    for _ in range(5):
        model = random_stable_model(rng, m=4, p=2)
        perm = rng.permutation(4)
        coeffs = np.asarray(model.coefficients)[:, perm][:, :, perm]
        permuted = VarModel(
            variables=tuple(model.variables[i] for i in perm),
            coefficients=coeffs,
            constant=np.asarray(model.constant)[perm],
            sigma=np.asarray(model.sigma)[np.ix_(perm, perm)],
        )
        assert check_stability(permuted).spectral_radius == pytest.approx(
            check_stability(model).spectral_radius, abs=1e-9
        )


def test_fit_recovers_noiseless_var():
    # zero constant and a short window: the zero-noise trajectory must
    # not flatten out, or the design loses rank
    rng = np.random.default_rng(5)
    truth = dataclasses.replace(
        random_stable_model(rng, m=2, p=2, radius=0.75), constant=np.zeros(2)
    )
    data = dataset_from_model(rng, truth, n_obs=16, noise=0.0)
    fitted = fit_var(data, lags=2)
    assert np.allclose(fitted.coefficients, truth.coefficients, atol=1e-7)
    assert np.allclose(fitted.constant, truth.constant, atol=1e-7)
    assert np.allclose(fitted.residuals, 0.0, atol=1e-7)


def test_fit_recovers_exogenous_coefficients():
    rng = np.random.default_rng(6)
    truth = random_stable_model(rng, m=2, p=1, radius=0.5, with_exo=True)
    data = dataset_from_model(rng, truth, n_obs=60, noise=0.0)
    fitted = fit_var(data, lags=1)
    assert fitted.exo_names == ("u0", "u1")
    assert np.allclose(fitted.exo_coefficients, truth.exo_coefficients, atol=1e-7)


def test_fit_residuals_orthogonal_to_design():
    # first-order condition of least squares, checked directly
    rng = np.random.default_rng(7)
    truth = random_stable_model(rng, m=3, p=1)
    data = dataset_from_model(rng, truth, n_obs=120, noise=0.8)
    fitted = fit_var(data, lags=1)
    res = np.asarray(fitted.residuals)
    lagged = data.rows[:-1]
    assert np.allclose(res.sum(axis=0), 0.0, atol=1e-8)
    assert np.allclose(lagged.T @ res, 0.0, atol=1e-6)


def test_fit_sigma_is_scaled_residual_crossproduct():
    rng = np.random.default_rng(8)
    truth = random_stable_model(rng, m=2, p=1)
    data = dataset_from_model(rng, truth, n_obs=50, noise=0.5)
    fitted = fit_var(data, lags=1)
    res = np.asarray(fitted.residuals)
    expected = res.T @ res / (res.shape[0] - 1)
    assert np.allclose(fitted.sigma, expected, atol=1e-12)


def test_fit_attaches_data_and_metadata():
    rng = np.random.default_rng(9)
    truth = random_stable_model(rng, m=2, p=1)
    data = dataset_from_model(rng, truth, n_obs=50)
    fitted = fit_var(data, lags=1)
    assert fitted.data is data
    assert fitted.interval_minutes == data.interval_minutes
    assert fitted.variables == data.variables


def test_fit_zero_variance_column():
    data = EmaDataset(
        variables=(VariableMeta("a"), VariableMeta("b")),
        rows=np.column_stack([np.ones(30), np.arange(30.0)]),
        interval_minutes=60,
    )
    with pytest.raises(FitError, match="zero variance"):
        fit_var(data, lags=1)


def test_fit_too_few_observations():
    rng = np.random.default_rng(10)
    data = EmaDataset(
        variables=(VariableMeta("a"), VariableMeta("b")),
        rows=rng.normal(size=(5, 2)),
        interval_minutes=60,
    )
    with pytest.raises(FitError, match="observations"):
        fit_var(data, lags=2)


def test_fit_collinear_design():
    rng = np.random.default_rng(11)
    col = rng.normal(size=30)
    data = EmaDataset(
        variables=(VariableMeta("a"), VariableMeta("b")),
        rows=np.column_stack([col, 2.0 * col]),
        interval_minutes=60,
    )
    with pytest.raises(FitError, match="rank"):
        fit_var(data, lags=1)


def test_fit_bad_lags():
    rng = np.random.default_rng(12)
    data = EmaDataset(
        variables=(VariableMeta("a"),), rows=rng.normal(size=(20, 1)), interval_minutes=60
    )
    with pytest.raises(FitError):
        fit_var(data, lags=0)


def test_lag_matrix_accessor():
    model = scalar_var2()
    assert model.lag_matrix(1)[0, 0] == 0.2
    assert model.lag_matrix(2)[0, 0] == 0.3
    with pytest.raises(IndexError):
        model.lag_matrix(3)
    with pytest.raises(IndexError):
        model.lag_matrix(0)


def test_index_of():
    model = golden_model()
    assert model.index_of("var1") == 1
    with pytest.raises(KeyError) as err:
        model.index_of("nope")
    assert "var0" in err.value.args[0]


def test_model_validation():
    with pytest.raises(ValueError):
        VarModel(variables=(), coefficients=np.zeros((1, 0, 0)), constant=np.zeros(0))
    with pytest.raises(ValueError):
        VarModel(
            variables=(VariableMeta("a"),),
            coefficients=np.zeros((1, 2, 2)),
            constant=np.zeros(1),
        )
    with pytest.raises(ValueError):
        VarModel(
            variables=(VariableMeta("a"),),
            coefficients=np.array([[[np.inf]]]),
            constant=np.zeros(1),
        )
    with pytest.raises(ValueError, match="symmetric"):
        VarModel(
            variables=(VariableMeta("a"), VariableMeta("b")),
            coefficients=np.zeros((1, 2, 2)),
            constant=np.zeros(2),
            sigma=np.array([[1.0, 0.5], [0.2, 1.0]]),
        )


def test_sigma_residual_consistency_enforced():
    rng = np.random.default_rng(13)
    res = rng.normal(size=(40, 2))
    good = np.cov(res, rowvar=False, ddof=1)
    VarModel(
        variables=(VariableMeta("a"), VariableMeta("b")),
        coefficients=np.zeros((1, 2, 2)),
        constant=np.zeros(2),
        sigma=good,
        residuals=res,
    )
    with pytest.raises(ValueError, match="sample covariance"):
        VarModel(
            variables=(VariableMeta("a"), VariableMeta("b")),
            coefficients=np.zeros((1, 2, 2)),
            constant=np.zeros(2),
            sigma=good + 0.5 * np.eye(2),
            residuals=res,
        )


def test_save_load_roundtrip(tmp_path):
    rng = np.random.default_rng(14)
    truth = random_stable_model(rng, m=2, p=2, with_exo=True)
    data = dataset_from_model(rng, truth, n_obs=60)
    fitted = fit_var(data, lags=2)
    path = tmp_path / "model.json"
    save_model(fitted, path)
    loaded = load_model(path)
    assert loaded == fitted
    assert loaded.data is None
    assert loaded.exo_names == fitted.exo_names


def test_dict_roundtrip_preserves_polarity_and_stats():
    model = golden_model(pol1="negative")
    back = model_from_dict(model_to_dict(model))
    assert back == model
    assert back.variables[1].polarity == "negative"
    assert back.variables[0].mean == 5.0
    assert back.variables[0].sd == 2.0


def test_model_equality_ignores_attached_data():
    rng = np.random.default_rng(15)
    truth = random_stable_model(rng, m=2, p=1)
    data = dataset_from_model(rng, truth, n_obs=50)
    fitted = fit_var(data, lags=1)
    detached = model_from_dict(model_to_dict(fitted))
    assert fitted == detached
    assert fitted.data is not None and detached.data is None


def test_sigma_derived_from_residuals_when_absent():
    rng = np.random.default_rng(16)
    res = rng.normal(size=(30, 2))
    doc = model_to_dict(golden_model())
    del doc["residual_covariance"]
    doc["residuals"] = res.tolist()
    model = model_from_dict(doc)
    assert np.allclose(model.sigma, np.cov(res, rowvar=False, ddof=1), atol=1e-12)


def test_model_file_requires_covariance_or_residuals():
    doc = model_to_dict(golden_model())
    del doc["residual_covariance"]
    with pytest.raises(ModelFormatError, match="residual"):
        model_from_dict(doc)


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.update(version=99),
        lambda d: d.update(lags=0),
        lambda d: d.update(variables=[]),
        lambda d: d.update(coefficient_blocks=[[[0.5]]]),
        lambda d: d.update(constant=[1.0, 2.0, 3.0]),
        lambda d: d.update(coefficient_blocks=[[["x", "y"], ["z", "w"]]]),
        lambda d: d.pop("variables"),
    ],
)
def test_malformed_model_documents(mutate):
    doc = model_to_dict(golden_model())
    mutate(doc)
    with pytest.raises(ModelFormatError):
        model_from_dict(doc)


def test_load_model_bad_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(ModelFormatError):
        load_model(path)


def test_polarity_vector():
    model = golden_model(pol0="negative")
    assert np.array_equal(model.polarity_vector(), [-1.0, 1.0])
