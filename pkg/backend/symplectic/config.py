"""
Numerical configuration for the symplectic toolkit.
Defaults can be overridden through environment variables (a local .env is honoured)
or per run through the `tolerances` map of a run spec.
"""

import math
import os
from contextlib import contextmanager
from contextvars import ContextVar
from functools import lru_cache
from typing import Any, Dict, Iterator, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field

load_dotenv()

ENV_PREFIX = "SYMPLECTIC_"
LOG_LEVEL = os.getenv("LOG_LEVEL", "WARNING")
DATA_DIR = os.getenv(
    "SYMPLECTIC_DATA_DIR",
    os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data"),
)


class Tolerances(BaseModel):
    """Steps, thresholds and bounds shared by every module"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    fd_step: float = Field(1e-5, gt=0)
    rank_rtol: float = Field(1e-7, gt=0)
    unitary_atol: float = Field(1e-8, gt=0)
    on_shell_atol: float = Field(1e-8, gt=0)
    involution_atol: float = Field(1e-5, gt=0)
    equivariance_atol: float = Field(1e-9, gt=0)
    consistency_rtol: float = Field(1e-9, gt=0)
    energy_drift_max: float = Field(1e-5, gt=0)
    constraint_residual_max: float = Field(1e-7, gt=0)
    singular_param_atol: float = Field(1e-8, gt=0)
    crossing_band: float = Field(1e-7, gt=0)
    phase_step_max: float = Field(math.pi / 2, gt=0)
    grid_points: int = Field(1024, ge=16)
    regular_search_draws: int = Field(10_000, ge=1)
    seed: int = 0

    @classmethod
    def from_env(cls) -> "Tolerances":
        values: Dict[str, Any] = {}
        for name in cls.model_fields:
            raw = os.getenv(ENV_PREFIX + name.upper())
            if raw is not None:
                values[name] = raw
        return cls(**values)

    def merged(self, overrides: Optional[Dict[str, Any]] = None) -> "Tolerances":
        """Validated copy with `overrides` applied; unknown keys are rejected"""
        if not overrides:
            return self
        return Tolerances(**{**self.model_dump(), **overrides})


@lru_cache(maxsize=1)
def default_tolerances() -> Tolerances:
    return Tolerances.from_env()


_active: ContextVar[Optional[Tolerances]] = ContextVar("symplectic_tolerances", default=None)


def tolerances() -> Tolerances:
    """Tolerances in effect for the current context"""
    return _active.get() or default_tolerances()


@contextmanager
def override(tol: Tolerances) -> Iterator[Tolerances]:
    token = _active.set(tol)
    try:
        yield tol
    finally:
        _active.reset(token)
