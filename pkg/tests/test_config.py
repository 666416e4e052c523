"""設定読み込みのテスト"""

import os
from fractions import Fraction
from pathlib import Path
from unittest.mock import patch

import pytest
from pydantic import ValidationError

from petersson_lab.config import Settings, load_settings
from petersson_lab.errors import ConfigError
from petersson_lab.suite.config import JobConfig, load_job_config, validate_job


class TestLoadSettings:
    def test_env_file_overrides_shell_env(self, tmp_path):
        """`.env` の値がシェル環境変数より優先されること"""
        env_file = tmp_path / ".env"
        env_file.write_text(
            "PETERSSON_LOG_LEVEL=debug\n"
            "PETERSSON_ERROR_CONSTANT=2.5\n"
        )

        with patch.dict(os.environ, {"PETERSSON_LOG_LEVEL": "ERROR"}):
            settings = load_settings(str(env_file))

        assert settings.log_level == "DEBUG"
        assert settings.error_constant == 2.5

    def test_formal_degree_constant_is_rational(self, tmp_path):
        env_file = tmp_path / ".env"
        env_file.write_text("PETERSSON_FORMAL_DEGREE_CONSTANT=1/64\nPETERSSON_CACHE_DIR=/tmp/pl\n")

        with patch.dict(os.environ, {}):
            settings = load_settings(str(env_file))

        assert settings.formal_degree_constant == Fraction(1, 64)
        assert settings.lvalue_cache_path == Path("/tmp/pl/lvalues.json")
        assert settings.character_cache_path == Path("/tmp/pl/characters.json")

    def test_log_file(self, tmp_path):
        env_file = tmp_path / ".env"
        env_file.write_text(f"PETERSSON_LOG_FILE={tmp_path / 'run.log'}\n")

        with patch.dict(os.environ, {}):
            settings = load_settings(str(env_file))

        assert settings.log_file == tmp_path / "run.log"

    def test_defaults(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        for key in [k for k in os.environ if k.startswith("PETERSSON_")]:
            monkeypatch.delenv(key)
        settings = load_settings()
        assert settings.log_level == "INFO"
        assert settings.formal_degree_constant is None
        assert settings.oracle_max_cells == 200_000_000
        assert settings.log_file is None


class TestSettingsValidation:
    def test_bad_log_level(self):
        with pytest.raises(ValidationError):
            Settings(log_level="LOUD")

    def test_error_constant_must_be_positive(self):
        with pytest.raises(ValidationError):
            Settings(error_constant=0.0)

    def test_oracle_max_cells(self):
        with pytest.raises(ValidationError):
            Settings(oracle_max_cells=0)


class TestJobConfig:
    def test_defaults(self):
        job = JobConfig()
        assert job.kappa == 10
        assert job.sigma_form.two_sigma == ((2, 0), (0, 2))
        assert job.sigma2_form == job.sigma_form
        assert job.similitude_spec.r == 1

    def test_similitude_spec(self):
        job = validate_job({"primes": [{"p": 3, "lam": [2, 0, 1]}, {"p": 5, "lam": [1, 0, 0]}]})
        assert job.similitude_spec.r == 45

    @pytest.mark.parametrize(
        "data",
        [
            {"primes": [{"p": 4, "lam": [1, 0, 0]}]},
            {"primes": [{"p": 3, "lam": [2, 0, 2]}]},
            {"primes": [{"p": 3, "lam": [1, 0, 0, 0]}]},
            {"primes": [{"p": 3, "lam": [1, 0, 0]}, {"p": 3, "lam": [2, 0, 0]}]},
            {"sigma": [[2, 0, 0], [0, 2, 0], [0, 0, 2]]},
            {"command": "translate"},
            {"kappa": 0},
            {"margins": []},
            {"sweep_primes": [3, 9]},
            {"unknown_key": 1},
        ],
    )
    def test_invalid(self, data):
        with pytest.raises(ConfigError):
            validate_job(data)

    def test_merged_ignores_none(self):
        job = JobConfig(kappa=12).merged(kappa=None, truncation=3, command="sweep")
        assert job.kappa == 12
        assert job.truncation == 3
        assert job.command == "sweep"

    def test_merged_revalidates(self):
        with pytest.raises(ConfigError):
            JobConfig().merged(max_tau=-1)


class TestLoadJobConfig:
    def test_none_gives_defaults(self):
        assert load_job_config(None) == JobConfig()

    def test_yaml(self, tmp_path):
        path = tmp_path / "job.yml"
        path.write_text(
            "kappa: 12\n"
            "sigma: [[2, 1], [1, 2]]\n"
            "primes:\n"
            "  - {p: 3, lam: [2, 0, 1]}\n",
            encoding="utf-8",
        )
        job = load_job_config(path)
        assert job.kappa == 12
        assert job.sigma_form.abc == (1, 1, 1)
        assert job.primes[0].coweight.l0 == 2

    def test_json_is_accepted(self, tmp_path):
        path = tmp_path / "job.json"
        path.write_text('{"grid": 64, "truncation": 3}', encoding="utf-8")
        job = load_job_config(path)
        assert (job.grid, job.truncation) == (64, 3)

    def test_syntax_error(self, tmp_path):
        path = tmp_path / "job.yml"
        path.write_text("kappa: [10\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_job_config(path)

    def test_top_level_must_be_mapping(self, tmp_path):
        path = tmp_path / "job.yml"
        path.write_text("- 1\n- 2\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_job_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_job_config(tmp_path / "missing.yml")
