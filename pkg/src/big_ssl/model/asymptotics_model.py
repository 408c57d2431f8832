from __future__ import annotations
from enum import Enum
from typing import ClassVar, Optional

import math

from pydantic import BaseModel, Field, model_validator


class TVariant(str, Enum):
    # summation from r = 1; t(1) = 0
    PRINTED = "printed"
    # summation from r = 0, agrees with the cut limit at m = 1
    CORRECTED = "corrected"


class Schedule(BaseModel):
    SIGMA_TOLERANCE: ClassVar[float] = 1e-12

    n: int = Field(..., ge=3)
    sigma: float = Field(..., gt=0)
    m: int = Field(..., ge=1)
    x: float = Field(..., gt=0, lt=1)
    y: float = Field(..., gt=0.5, lt=1)
    dimension: int = Field(..., gt=0)
    log_base: Optional[float] = Field(None, gt=1, description="Logarithm base for m; None = natural log.")

    @model_validator(mode="after")
    def check_sigma(self):
        expected = self.n ** (-self.x / (self.m * self.dimension + 1))
        if abs(self.sigma - expected) > self.SIGMA_TOLERANCE:
            raise ValueError(f"sigma {self.sigma!r} does not follow n^(-x/(md+1)) = {expected!r}")
        return self


class ConditionReport(BaseModel):
    """Diagnostic quantities for the convergence conditions; no pass/fail verdict."""

    n: int
    sigma: float
    m: int
    dimension: int
    log_c: float = Field(..., description="log C with C = 2/(2 pi)^(d/2).")
    quantity_c3a: float = Field(..., description="m/n")
    quantity_c3b: float = Field(..., description="m sigma^2")
    quantity_c4: float = Field(..., description="(1/sigma)^(1/m)")
    log_quantity_c5: float = Field(..., description="log of n sigma^(md+1)/(m C^m)")
    log_strong_c5: float = Field(..., description="log of n sigma^(md+1)/(m C^m log n)")

    @property
    def quantity_c5(self) -> float:
        return _safe_exp(self.log_quantity_c5)

    @property
    def strong_c5(self) -> float:
        return _safe_exp(self.log_strong_c5)

    def as_dict(self) -> dict:
        data = self.model_dump()
        data["quantity_c5"] = self.quantity_c5
        data["strong_c5"] = self.strong_c5
        return data


def _safe_exp(value: float) -> float:
    if value > 709.0:
        return math.inf
    return math.exp(value)
