"""Configuration loading and validation for crystal-automaton."""

import os
import tomllib
from dataclasses import dataclass
from pathlib import Path

from errors import ArgumentError


DEFAULT_CONFIG_PATH = Path("config.toml")

DEFAULTS = {
    "extension_cap": 1_000_000,
    "separation_margin": 2,
    "scatter_max_steps": 2000,
    "oracle_max_size": 50_000,
    "seed": 20240611,
    "random_cases": 100,
    "concurrent_experiments": None,  # None = os.cpu_count() or 4
    "output_dir": "./results",
}


@dataclass
class Config:
    extension_cap: int
    separation_margin: int
    scatter_max_steps: int
    oracle_max_size: int
    seed: int
    random_cases: int
    concurrent_experiments: int
    output_dir: Path

    @property
    def results_path(self) -> Path:
        """Default JSONL destination of batch runs."""
        return self.output_dir / "results.jsonl"

    @classmethod
    def load(
        cls,
        config_path: Path | None = None,
        output_dir_override: str | None = None,
        seed_override: int | None = None,
        concurrency_override: int | None = None,
        extension_cap_override: int | None = None,
        scatter_max_steps_override: int | None = None,
    ) -> "Config":
        """Load configuration from TOML file with defaults."""
        config_data = dict(DEFAULTS)

        path = config_path or DEFAULT_CONFIG_PATH
        if path.exists():
            with open(path, "rb") as f:
                file_config = tomllib.load(f)
                config_data.update(file_config)

        if output_dir_override:
            config_data["output_dir"] = output_dir_override
        if seed_override is not None:
            config_data["seed"] = seed_override
        if concurrency_override is not None:
            config_data["concurrent_experiments"] = concurrency_override
        if extension_cap_override is not None:
            config_data["extension_cap"] = extension_cap_override
        if scatter_max_steps_override is not None:
            config_data["scatter_max_steps"] = scatter_max_steps_override

        # Resolve concurrent_experiments default
        concurrent_experiments = config_data.get("concurrent_experiments")
        if concurrent_experiments is None:
            concurrent_experiments = os.cpu_count() or 4

        config = cls(
            extension_cap=int(config_data["extension_cap"]),
            separation_margin=int(config_data["separation_margin"]),
            scatter_max_steps=int(config_data["scatter_max_steps"]),
            oracle_max_size=int(config_data["oracle_max_size"]),
            seed=int(config_data["seed"]),
            random_cases=int(config_data["random_cases"]),
            concurrent_experiments=int(concurrent_experiments),
            output_dir=Path(config_data["output_dir"]).expanduser().resolve(),
        )
        for name in ("extension_cap", "scatter_max_steps", "oracle_max_size", "random_cases", "concurrent_experiments"):
            if getattr(config, name) < 1:
                raise ArgumentError(f"{name} must be positive, got {getattr(config, name)}")
        if config.separation_margin < 0:
            raise ArgumentError(f"separation_margin must not be negative, got {config.separation_margin}")
        return config
