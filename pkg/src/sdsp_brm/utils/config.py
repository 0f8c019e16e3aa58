"""Configuration management for the SDSP-BRM solver suite."""

import os
from pathlib import Path
from typing import Any, List, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator
from dotenv import load_dotenv

from ..core.model import SegmentationMode


# Benchmark scenario shapes "NxM"
PRESET_SIZES: List[str] = [
    "20x8", "30x15", "50x24", "100x70", "200x85", "500x220", "800x340", "1000x530",
]


class GenParams(BaseModel):
    """Scenario generation parameters; N = a*M unless n is given."""
    m: int = Field(8, ge=1, description="Number of playback windows M")
    ld: float = Field(10.0, gt=0, description="Minimum segment length (s)")
    seed: int = Field(0, ge=0, lt=2**64)
    gap_mean: float = 100.0
    gap_std: float = Field(1.0, ge=0)
    a_low: float = Field(1.5, gt=0)
    a_high: float = Field(2.5, gt=0)
    n: Optional[int] = Field(None, ge=1, description="Exact N override; None samples a")

    @model_validator(mode="after")
    def _check_ratio_bounds(self) -> "GenParams":
        if self.a_low > self.a_high:
            raise ValueError(f"a_low ({self.a_low}) must not exceed a_high ({self.a_high})")
        return self


class SehaConfig(BaseModel):
    """SEHA search parameters."""
    model_config = ConfigDict(populate_by_name=True)

    max_iter: int = Field(100_000, ge=1)
    noup_iter: int = Field(5_000, ge=1)
    solve_time: float = Field(60.0, gt=0)
    remove_fraction: float = Field(0.10, gt=0, le=1)
    rule1_on: bool = Field(True, alias="rule1")
    rule2_on: bool = Field(True, alias="rule2")
    sg_mode: SegmentationMode = Field(SegmentationMode.SG, alias="mode")
    seed: int = Field(0, ge=0, lt=2**64)


class OracleLimits(BaseModel):
    """Tractability guard for the exact oracle."""
    max_data: int = Field(12, gt=0)
    max_windows: int = Field(6, gt=0)
    node_budget: int = Field(200_000, gt=0)
    time_budget: float = Field(30.0, gt=0)


class ExperimentSettings(BaseModel):
    """Experiment harness configuration."""
    repeats: int = Field(20, ge=1)
    seed: int = Field(0, ge=0)
    sizes: List[str] = Field(default_factory=lambda: list(PRESET_SIZES))
    out_dir: str = "./reports"
    formats: List[str] = Field(default_factory=lambda: ["csv", "json", "plotdata"])


class LoggingConfig(BaseModel):
    """Logging configuration."""
    level: str = "INFO"
    format: str = "json"  # json | text
    output: str = "stderr"  # stderr | stdout | file
    file_path: Optional[str] = "./logs/sdsp_brm.log"


class Config(BaseModel):
    """Root configuration."""
    generator: GenParams = Field(default_factory=GenParams)
    solver: SehaConfig = Field(default_factory=SehaConfig)
    oracle: OracleLimits = Field(default_factory=OracleLimits)
    experiments: ExperimentSettings = Field(default_factory=ExperimentSettings)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)


def load_config(config_path: Optional[str] = None) -> Config:
    """
    Load configuration from YAML file with environment variable substitution.

    Args:
        config_path: Path to config file. Defaults to $SDSP_BRM_CONFIG, then
            config/config.yaml

    Returns:
        Parsed configuration object

    Raises:
        FileNotFoundError: If an explicitly requested config file doesn't exist
        ValueError: If configuration is invalid
    """
    # From src/sdsp_brm/utils/config.py -> project root
    project_root = Path(__file__).parent.parent.parent.parent

    load_dotenv(project_root / ".env")

    explicit = config_path is not None or os.getenv("SDSP_BRM_CONFIG") is not None
    if config_path is None:
        config_path = os.getenv("SDSP_BRM_CONFIG")
        if config_path is None:
            config_path = str(project_root / "config" / "config.yaml")

    config_file = Path(config_path)

    if not config_file.exists():
        if explicit:
            raise FileNotFoundError(
                f"Configuration file not found: {config_path}\n"
                f"Expected location: {config_file.absolute()}"
            )
        # No project config: built-in defaults
        return Config()

    with open(config_file) as f:
        raw_config = yaml.safe_load(f) or {}

    raw_config = _substitute_env_vars(raw_config)

    try:
        return Config(**raw_config)
    except Exception as e:
        raise ValueError(f"Invalid configuration: {e}")


def _substitute_env_vars(config: Any) -> Any:
    """
    Recursively substitute environment variables in config.

    Replaces ${VAR_NAME} with os.getenv('VAR_NAME').
    """
    if isinstance(config, dict):
        return {k: _substitute_env_vars(v) for k, v in config.items()}
    elif isinstance(config, list):
        return [_substitute_env_vars(item) for item in config]
    elif isinstance(config, str):
        if config.startswith("${") and config.endswith("}"):
            var_name = config[2:-1]
            value = os.getenv(var_name)
            if value is None:
                raise ValueError(
                    f"Environment variable not set: {var_name}\n"
                    f"Please set it in .env or your environment"
                )
            return value
        return config
    else:
        return config


# Singleton instance
_config: Optional[Config] = None


def get_config(reload: bool = False) -> Config:
    """
    Get configuration singleton.

    Args:
        reload: Force reload from file

    Returns:
        Configuration instance
    """
    global _config

    if _config is None or reload:
        _config = load_config()

    return _config
