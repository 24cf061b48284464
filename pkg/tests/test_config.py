"""Tests for config.py."""

import os

import pytest

from config import Config, DEFAULTS
from errors import ArgumentError


class TestConfigLoad:
    """Tests for Config.load()."""

    def test_load_with_defaults_when_no_config_file(self, tmp_path):
        """Config uses defaults when config file doesn't exist."""
        config = Config.load(config_path=tmp_path / "nonexistent.toml")

        assert config.extension_cap == DEFAULTS["extension_cap"]
        assert config.separation_margin == DEFAULTS["separation_margin"]
        assert config.scatter_max_steps == DEFAULTS["scatter_max_steps"]
        assert config.seed == DEFAULTS["seed"]
        assert config.random_cases == DEFAULTS["random_cases"]

    def test_concurrency_defaults_to_cpu_count(self, tmp_path):
        """Unset concurrency falls back to the CPU count."""
        config = Config.load(config_path=tmp_path / "nonexistent.toml")

        assert config.concurrent_experiments == (os.cpu_count() or 4)

    def test_load_from_toml_file(self, tmp_path, config_toml_content):
        """Config loads values from TOML file."""
        config_file = tmp_path / "config.toml"
        config_file.write_text(config_toml_content)

        config = Config.load(config_path=config_file)

        assert config.extension_cap == 5000
        assert config.separation_margin == 3
        assert config.scatter_max_steps == 100
        assert config.seed == 42
        assert str(config.output_dir) == "/tmp/custom-results"
        assert config.oracle_max_size == DEFAULTS["oracle_max_size"]

    def test_cli_overrides_take_precedence(self, tmp_path, config_toml_content):
        """CLI overrides take precedence over config file values."""
        config_file = tmp_path / "config.toml"
        config_file.write_text(config_toml_content)

        config = Config.load(
            config_path=config_file,
            output_dir_override="/cli/override",
            seed_override=7,
            concurrency_override=3,
            extension_cap_override=99,
            scatter_max_steps_override=12,
        )

        assert str(config.output_dir) == "/cli/override"
        assert config.seed == 7
        assert config.concurrent_experiments == 3
        assert config.extension_cap == 99
        assert config.scatter_max_steps == 12

    def test_seed_zero_override(self, tmp_path):
        """A zero seed still overrides the file value."""
        config = Config.load(config_path=tmp_path / "nonexistent.toml", seed_override=0)

        assert config.seed == 0

    def test_output_dir_path_expansion(self, tmp_path):
        """Output directory with ~ is expanded."""
        config = Config.load(
            config_path=tmp_path / "nonexistent.toml",
            output_dir_override="~/results",
        )

        assert "~" not in str(config.output_dir)
        assert config.output_dir.is_absolute()

    @pytest.mark.parametrize(
        "line",
        [
            "extension_cap = 0\n",
            "scatter_max_steps = -1\n",
            "oracle_max_size = 0\n",
            "random_cases = 0\n",
            "concurrent_experiments = 0\n",
            "separation_margin = -1\n",
        ],
    )
    def test_rejects_invalid_values(self, tmp_path, line):
        """Limits must be positive and the margin non-negative."""
        config_file = tmp_path / "config.toml"
        config_file.write_text(line)

        with pytest.raises(ArgumentError):
            Config.load(config_path=config_file)


class TestConfigProperties:
    """Tests for Config properties."""

    def test_results_path_property(self, sample_config):
        """results_path returns correct path."""
        expected = sample_config.output_dir / "results.jsonl"
        assert sample_config.results_path == expected
