from __future__ import annotations

import pytest

from qualtensor.config import SamplingConfig, SearchConfig
from settings import ENV_PREFIX, load_settings

VARIABLES = ("RESTARTS", "ITERATIONS", "TOL", "SEED", "TRIALS", "SAMPLES", "LOG_DIR")


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    # delenv records the variables as absent, so values a .env file sets are removed on teardown
    for name in VARIABLES:
        monkeypatch.delenv(ENV_PREFIX + name, raising=False)


def test_defaults(tmp_path):
    settings = load_settings(tmp_path / "missing.env")
    assert settings.search == SearchConfig()
    assert settings.sampling == SamplingConfig()
    assert settings.log_dir is None


def test_environment_overrides(monkeypatch, tmp_path):
    monkeypatch.setenv("SIGRANK_RESTARTS", "7")
    monkeypatch.setenv("SIGRANK_TOL", "1e-6")
    monkeypatch.setenv("SIGRANK_SEED", "42")
    monkeypatch.setenv("SIGRANK_SAMPLES", "15")
    settings = load_settings(tmp_path / "missing.env")
    assert settings.search.restarts == 7
    assert settings.search.tol == 1e-6
    assert settings.search.seed == 42
    assert settings.sampling.seed == 42
    assert settings.sampling.samples == 15
    assert settings.search.iterations == SearchConfig().iterations


def test_dotenv_file(tmp_path):
    env = tmp_path / ".env"
    env.write_text("SIGRANK_TRIALS=25\nSIGRANK_LOG_DIR=logs\n", encoding="utf-8")
    settings = load_settings(env)
    assert settings.sampling.trials == 25
    assert settings.log_dir == "logs"


def test_environment_wins_over_dotenv(monkeypatch, tmp_path):
    env = tmp_path / ".env"
    env.write_text("SIGRANK_ITERATIONS=10\n", encoding="utf-8")
    monkeypatch.setenv("SIGRANK_ITERATIONS", "30")
    assert load_settings(env).search.iterations == 30


def test_bad_value_names_the_variable(monkeypatch, tmp_path):
    monkeypatch.setenv("SIGRANK_RESTARTS", "many")
    with pytest.raises(ValueError, match="SIGRANK_RESTARTS"):
        load_settings(tmp_path / "missing.env")


def test_out_of_range_value(monkeypatch, tmp_path):
    monkeypatch.setenv("SIGRANK_RESTARTS", "0")
    with pytest.raises(ValueError, match="restarts"):
        load_settings(tmp_path / "missing.env")


class TestConfigs:
    def test_with_overrides_skips_none(self):
        config = SearchConfig().with_overrides(restarts=3, seed=None)
        assert config.restarts == 3
        assert config.seed == 0

    @pytest.mark.parametrize("kwargs", [
        {"restarts": 0},
        {"tol": 0.0},
        {"magnitude_low": 2.0, "magnitude_high": 1.0},
        {"r_max": 0},
        {"seed": -1},
    ])
    def test_search_validation(self, kwargs):
        with pytest.raises(ValueError):
            SearchConfig(**kwargs)

    def test_sampling_validation(self):
        with pytest.raises(ValueError):
            SamplingConfig(samples=0)
        with pytest.raises(ValueError, match="seed"):
            SamplingConfig().with_overrides(seed=-1)
        assert SamplingConfig(magnitude_low=1.0, magnitude_high=2.0).magnitude_range == (1.0, 2.0)

    def test_to_dict_lists_every_option(self):
        options = SearchConfig(restarts=4, seed=9).to_dict()
        assert options["restarts"] == 4
        assert options["seed"] == 9
        assert options["r_max"] is None
        assert set(SamplingConfig().to_dict()) == {"magnitude_low", "magnitude_high", "trials", "samples", "seed"}


def test_negative_seed_in_environment(monkeypatch, tmp_path):
    monkeypatch.setenv("SIGRANK_SEED", "-1")
    with pytest.raises(ValueError, match="seed must be >= 0"):
        load_settings(tmp_path / "missing.env")
