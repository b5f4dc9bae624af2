"""Run configuration: defaults, environment (MODSURF_*), flat config files
and command-line overrides, validated by pydantic."""

from __future__ import annotations

import math
from functools import lru_cache
from pathlib import Path
from typing import Any, Mapping

from pydantic import Field, ValidationError, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import ConfigError

_LOWEST_FD_HEIGHT = math.sqrt(3.0) / 2.0


class RunConfig(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="MODSURF_", case_sensitive=False, extra="forbid")

    # collocation
    y0: float = Field(default=0.55, gt=0, lt=_LOWEST_FD_HEIGHT)
    y0_secondary: float = Field(default=0.50, gt=0, lt=_LOWEST_FD_HEIGHT)
    truncation_margin: float = Field(default=12.0, gt=0)
    collocation_oversampling: int = Field(default=8, ge=0)

    # eigenvalue search
    scan_step: float = Field(default=0.02, gt=0, le=0.05)
    candidate_threshold: float = Field(default=1e-4, gt=0)
    acceptance_threshold: float = Field(default=1e-6, gt=0)
    hecke_threshold: float = Field(default=1e-5, gt=0)
    secant_tolerance: float = Field(default=1e-8, gt=0)
    scan_workers: int = Field(default=1, ge=1)

    # coefficient counts
    hecke_coefficients: int = Field(default=30, ge=6)
    lseries_coefficients: int = Field(default=2000, ge=30)

    # quadrature
    quad_abs_tol: float = Field(default=1e-10, gt=0)
    quad_rel_tol: float = Field(default=1e-10, gt=0)
    panel_floor: float = Field(default=1e-4, gt=0)

    # scattering and L-functions
    eisenstein_cutoff: int = Field(default=200, ge=1)
    mellin_anchor: float = Field(default=5.0, gt=1.6)

    # counting
    cusps: int = Field(default=1, ge=1)
    include_constant_eigenvalue: bool = True

    @model_validator(mode="after")
    def _distinct_heights(self) -> "RunConfig":
        if self.y0 == self.y0_secondary:
            raise ValueError("the two collocation heights must differ")
        return self


@lru_cache
def get_config() -> RunConfig:
    """Return the cached configuration built from defaults and environment."""

    return RunConfig()


def _coerce(value: str) -> Any:
    lowered = value.lower()
    if lowered in {"true", "yes", "on"}:
        return True
    if lowered in {"false", "no", "off"}:
        return False
    return value


def read_config_file(path: Path) -> dict[str, Any]:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""

    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    values: dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in RunConfig.model_fields:
            raise ConfigError(f"{path}:{lineno}: unknown key '{key}'")
        values[key] = _coerce(value)
    return values


def load_config(path: Path | None = None, overrides: Mapping[str, Any] | None = None) -> RunConfig:
    """Merge file values and overrides (highest priority) into a RunConfig."""

    values: dict[str, Any] = {}
    if path is not None:
        values.update(read_config_file(path))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in RunConfig.model_fields:
            raise ConfigError(f"unknown configuration key '{key}'")
        values[key] = value
    try:
        return RunConfig(**values)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc
