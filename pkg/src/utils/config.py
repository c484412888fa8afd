"""Configuration management for the Pulse Error Budget toolkit."""

from pathlib import Path
from typing import Dict, Literal, Union

from dotenv import dotenv_values, load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

from monitoring.error_handling import ConfigurationError

# Load environment variables from .env file
load_dotenv()


class Settings(BaseSettings):
    """Application settings and numerical defaults."""

    model_config = SettingsConfigDict(
        env_prefix="PULSE_BUDGET_", env_file=".env", case_sensitive=False, extra="ignore"
    )

    # Application Configuration
    app_name: str = "Pulse Error Budget"
    app_version: str = "1.0.0"
    log_level: str = "INFO"
    log_format: Literal["json", "text"] = "json"

    # Tolerances
    zero_tolerance: float = 1e-9  # zero/nonzero cut, scaled by max(1, tau_p)
    design_tolerance: float = 1e-9

    # Closed forms and oracle
    quadrature_abs_tol: float = 1e-11
    quadrature_subdivisions: int = 200

    # Designer
    design_scan_points: int = 512
    design_xtol: float = 1e-12

    # Simulation sweeps
    default_epsilon: float = 1e-3
    default_tau_p_scale: float = 1e-2
    shrink_factor: float = 0.5
    scaling_steps: int = 6
    slope_tolerance: float = 0.15
    fit_residual_threshold: float = 0.1
    sweep_workers: int = 4


def get_settings() -> Settings:
    """Get application settings instance."""
    return Settings()


def load_run_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """
    Read a key=value run configuration file.

    Keys are normalised to lower case with dashes replaced by underscores,
    so `tau-p=1` and `TAU_P=1` both become `tau_p`.

    Args:
        path: Path to the file

    Returns:
        Mapping of option name to raw string value
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigurationError(f"config file not found: {path}")

    values = dotenv_values(path)
    config: Dict[str, str] = {}
    for key, value in values.items():
        if value is None:
            raise ConfigurationError(f"config key without value: {key}")
        config[key.strip().lower().replace("-", "_")] = value.strip()
    return config
