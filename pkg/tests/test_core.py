import numpy as np
import pytest
from scipy import integrate

from margauss.core import (
    ConstantsConfig,
    batch_mean_se,
    batch_var_se,
    gaussian_vector,
    resolve_seed,
    resolve_seeds,
    substream,
)

ABS_THIRD_MOMENT = 2.0 * np.sqrt(2.0 / np.pi)  # E|Z|^3


def test_identical_streams_replay():
    a = substream(7, 0).normal(100)
    b = substream(7, 0).normal(100)
    assert np.array_equal(a, b)


def test_distinct_stream_ids_are_uncorrelated():
    x = substream(7, 0).normal(10_000)
    y = substream(7, 1).normal(10_000)
    corr = np.corrcoef(x, y)[0, 1]
    assert abs(corr) < 3.0 / np.sqrt(10_000) * 3


def test_normal_mean_law_of_large_numbers():
    draws = substream(7, 0).normal(1_000_000)
    assert abs(draws.mean()) < 3e-3


def test_stream_draw_kinds_available():
    s = substream(3, 5)
    assert s.uniform(10).shape == (10,)
    assert s.exponential(10).min() >= 0
    assert s.gamma(2.0, 10).min() >= 0


def test_substream_rejects_non_integers():
    with pytest.raises(ValueError):
        substream(1.5, 0)
    with pytest.raises(ValueError):
        substream(1, "a")


def test_gaussian_vector_rejects_dim_zero():
    with pytest.raises(ValueError):
        gaussian_vector(substream(1, 0), 0)


def test_gaussian_vector_covariance_identity():
    pts = gaussian_vector(substream(11, 0), 3, count=1_000_000)
    cov = pts.T @ pts / len(pts)
    assert np.max(np.abs(cov - np.eye(3))) < 0.02


def test_gaussian_vector_third_absolute_moment():
    oracle, _ = integrate.quad(
        lambda z: abs(z) ** 3 * np.exp(-z * z / 2) / np.sqrt(2 * np.pi), -12, 12
    )
    assert oracle == pytest.approx(ABS_THIRD_MOMENT, abs=1e-9)
    draws = gaussian_vector(substream(13, 0), 1, count=1_000_000)[:, 0]
    est, se = batch_mean_se(np.abs(draws) ** 3)
    assert abs(est - oracle) < 3 * se


def test_gaussian_vector_squared_norm_dim2():
    pts = gaussian_vector(substream(17, 0), 2, count=1_000_000)
    est, se = batch_mean_se(np.sum(pts**2, axis=1))
    assert abs(est - 2.0) < 3 * se


def test_env_seed_override(monkeypatch):
    monkeypatch.delenv("MG_SEED", raising=False)
    assert resolve_seed(42) == 42
    assert resolve_seeds([1, 2, 3]) == (1, 2, 3)
    monkeypatch.setenv("MG_SEED", "9001")
    assert resolve_seed(42) == 9001
    assert resolve_seeds([1, 2, 3]) == (9001,)


def test_constants_config_defaults_and_validation():
    c = ConstantsConfig()
    assert c.C_tv_multi == c.c_smooth == c.C_tv_simplex1d == 1.0
    with pytest.raises(ValueError):
        ConstantsConfig(C_tv_multi=0.0)
    with pytest.raises(ValueError):
        ConstantsConfig(c_smooth=-1.0)


def test_constants_config_from_json(tmp_path):
    path = tmp_path / "constants.json"
    path.write_text('{"C_tv_multi": 2.5}')
    c = ConstantsConfig.from_json(path)
    assert c.C_tv_multi == 2.5 and c.c_smooth == 1.0
    bad = tmp_path / "bad.json"
    bad.write_text('{"C_what": 1.0}')
    with pytest.raises(ValueError):
        ConstantsConfig.from_json(bad)


def test_batch_helpers():
    values = substream(1, 0).normal(10_000) + 5.0
    mean, se = batch_mean_se(values)
    assert mean == pytest.approx(values[:10_000].mean(), abs=1e-12)
    assert 0 < se < 0.1
    var, var_se = batch_var_se(values)
    assert abs(var - 1.0) < 3 * var_se + 0.05
    with pytest.raises(ValueError):
        batch_mean_se(np.arange(5))
