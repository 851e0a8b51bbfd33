"""Config file loading, validation and the shipped defaults."""

from __future__ import annotations

from pathlib import Path

import pytest
import yaml

from librank.config import (
    CONFIG_ENV_VAR,
    AppConfig,
    config_from_dict,
    config_to_dict,
    load_config,
    save_config,
)
from librank.errors import ConfigError

REPO_ROOT = Path(__file__).resolve().parent.parent


class TestDefaults:
    def test_shipped_default_file_matches_code_defaults(self):
        shipped = yaml.safe_load(
            (REPO_ROOT / "config" / "default.yaml").read_text(encoding="utf-8")
        )
        assert shipped == config_to_dict(AppConfig())

    def test_defaults_validate(self):
        AppConfig().validate()

    def test_round_trip(self, tmp_path):
        path = tmp_path / "conf.yaml"
        save_config(AppConfig(), path)
        loaded = load_config(path)
        assert config_to_dict(loaded) == config_to_dict(AppConfig())


class TestLoading:
    def test_env_var_override(self, tmp_path, monkeypatch):
        path = tmp_path / "conf.yaml"
        path.write_text(yaml.safe_dump({"service": {"page_size": 7}}))
        monkeypatch.setenv(CONFIG_ENV_VAR, str(path))
        assert load_config().service.page_size == 7

    def test_missing_file_raises(self):
        with pytest.raises(ConfigError):
            load_config("/does/not/exist.yaml")

    def test_partial_file_keeps_other_defaults(self, tmp_path):
        path = tmp_path / "conf.yaml"
        path.write_text(yaml.safe_dump({"shaping": {"diversify_slots": 3}}))
        config = load_config(path)
        assert config.shaping.diversify_slots == 3
        assert config.service.page_size == 10
        assert config.ranking.freshness_half_life_years == 5.0


class TestValidation:
    def test_factor_weights_must_sum_to_one(self):
        data = config_to_dict(AppConfig())
        data["ranking"]["factor_weights"]["navigational"]["text"] = 0.9
        with pytest.raises(ConfigError):
            config_from_dict(data)

    def test_locality_entries_bounded(self):
        data = config_to_dict(AppConfig())
        data["ranking"]["locality_matrix"]["home"]["download"] = 1.5
        with pytest.raises(ConfigError):
            config_from_dict(data)

    def test_type_preference_multiplier_bounded(self):
        data = config_to_dict(AppConfig())
        data["ranking"]["type_preferences"]["discipline"] = {
            "informatics": {"conference_paper": 2.5}
        }
        with pytest.raises(ConfigError):
            config_from_dict(data)

    def test_popularity_weights_must_sum_to_one(self):
        data = config_to_dict(AppConfig())
        data["ranking"]["popularity_component_weights"]["views"] = 0.9
        with pytest.raises(ConfigError):
            config_from_dict(data)

    def test_unknown_field_weight_name_rejected(self):
        data = config_to_dict(AppConfig())
        data["ranking"]["field_weights"]["banana"] = 1.0
        with pytest.raises(ConfigError):
            config_from_dict(data)
