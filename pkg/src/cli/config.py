"""
Run configuration: yaml defaults, key=value config file, command-line flags

Precedence is flags > config file > config/config.yaml. The merged mapping is
validated by RunConfig, which also builds the ModelContext so that invalid
model parameters are rejected before any computation starts.
"""
import logging
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

import yaml
from dotenv import dotenv_values
from pydantic import BaseModel, field_validator, model_validator

from src.qcore.context import ModelContext
from src.qcore.errors import ConfigurationError

logger = logging.getLogger(__name__)

DEFAULTS_PATH = Path(__file__).resolve().parents[2] / "config" / "config.yaml"

CHECKS = (
    "pearson", "gram", "bn", "lemma31", "structure", "intermediate", "painleve",
    "uv", "asymptotics", "bracket", "confinement", "dp1", "qpv",
)
METHODS = ("oracle", "forward", "fixedpoint", "closed_form")


class RunConfig(BaseModel):
    command: Literal["coeffs", "verify", "compare"]
    q: str = "0.9"
    alpha: str = "5"
    c: str = "-1"
    digits: int = 200
    exploratory: bool = False
    allow_low_precision: bool = False

    n: int = 200
    method: str = "oracle"
    methods: List[str] = ["forward@20", "fixedpoint"]
    agree_digits: int = 10
    allow_singular: bool = False

    iterations: Optional[int] = None  # fixedpoint: emit T^k(0, 0) instead of solving
    max_iter: int = 500
    tol: str = "1e-30"
    policy: Literal["shrink", "clamp"] = "shrink"
    buffer_extra: int = 0

    check: str = "painleve"
    check_tol: Optional[str] = None
    points: int = 20
    variant: Literal["quartic", "general"] = "general"
    parity: Literal["even", "odd"] = "even"
    index: int = 6
    y_before: Optional[str] = None
    epsilon: List[str] = ["1e-10", "1e-20"]
    steps: int = 4
    a: str = "0"
    n_max: int = 10
    q_family: List[str] = ["0.9", "0.99", "0.999"]
    kappa: List[str] = ["1e-2", "5e-3", "1e-3", "1e-4", "1e-5", "1e-6"]
    u: str = "0.3"
    v: str = "-0.2"

    output: Optional[str] = None

    @field_validator("methods", "epsilon", "q_family", "kappa", mode="before")
    @classmethod
    def split_lists(cls, value: Any) -> Any:
        """Accept comma-separated strings for list options"""
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    @model_validator(mode="after")
    def validate_run(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {', '.join(METHODS)}")
        if self.command == "verify" and self.check not in CHECKS:
            raise ValueError(f"unknown check {self.check!r}; choose from {', '.join(CHECKS)}")
        if self.command == "compare" and len(self.methods) < 2:
            raise ValueError("compare needs at least two methods")
        if self.n < 1:
            raise ValueError(f"n must be positive, got {self.n}")
        if self.iterations is not None and self.iterations < 1:
            raise ValueError(f"iterations must be positive, got {self.iterations}")
        try:
            self.model_context()
        except ConfigurationError as exc:
            raise ValueError(str(exc)) from exc
        return self

    def model_context(self, digits: Optional[int] = None) -> ModelContext:
        return ModelContext(
            q=self.q, alpha=self.alpha, c=self.c,
            digits=digits or self.digits,
            exploratory=self.exploratory,
            allow_low_precision=self.allow_low_precision or (digits is not None and digits < self.digits),
        )


def load_defaults(path: Path = DEFAULTS_PATH) -> Dict[str, Any]:
    """Flatten config.yaml sections into RunConfig field names"""
    if not path.exists():
        logger.warning("defaults file %s not found; using built-in defaults", path)
        return {}
    with open(path, "r", encoding="utf-8") as handle:
        raw = yaml.safe_load(handle) or {}
    flat: Dict[str, Any] = {}
    for section in raw.values():
        if isinstance(section, dict):
            flat.update({k: v for k, v in section.items() if v is not None})
    return flat


def load_config_file(path: str) -> Dict[str, Any]:
    """key=value lines with # comments; keys may use dashes or underscores"""
    if not Path(path).exists():
        raise ConfigurationError(f"config file {path} does not exist")
    values = dotenv_values(path)
    return {key.strip().lower().replace("-", "_"): value
            for key, value in values.items() if value is not None}


def build_run_config(command: str, flags: Dict[str, Any], config_path: Optional[str] = None,
                     defaults_path: Path = DEFAULTS_PATH) -> RunConfig:
    merged: Dict[str, Any] = load_defaults(defaults_path)
    if config_path:
        merged.update(load_config_file(config_path))
    merged.update({k: v for k, v in flags.items() if v is not None})
    merged["command"] = command
    known = set(RunConfig.model_fields)
    unknown = sorted(set(merged) - known)
    if unknown:
        logger.warning("ignoring unknown configuration keys: %s", ", ".join(unknown))
    return RunConfig(**{k: v for k, v in merged.items() if k in known})
