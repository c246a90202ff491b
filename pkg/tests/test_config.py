from bd_cover.core.config import DEFAULT_PRECISION, PRECISION_ENV_VAR, ComputeConfig, default_precision


def test_defaults(monkeypatch):
    monkeypatch.delenv(PRECISION_ENV_VAR, raising=False)
    assert default_precision() == DEFAULT_PRECISION
    config = ComputeConfig.from_env()
    assert (config.p, config.m, config.precision) == (5, 2, DEFAULT_PRECISION)


def test_environment_override(monkeypatch):
    monkeypatch.setenv(PRECISION_ENV_VAR, "12")
    assert ComputeConfig.from_env().precision == 12
    assert ComputeConfig.from_env(precision=20).precision == 20


def test_bad_environment_values(monkeypatch):
    monkeypatch.setenv(PRECISION_ENV_VAR, "many")
    assert default_precision() == DEFAULT_PRECISION
    monkeypatch.setenv(PRECISION_ENV_VAR, "1")
    assert default_precision() == 4


def test_dict_round_trip_ignores_unknown_keys():
    config = ComputeConfig(p=7, m=3, seed=9)
    data = config.to_dict()
    data["colour"] = "blue"
    assert ComputeConfig.from_dict(data) == config
