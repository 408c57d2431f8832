from typing import ClassVar, Dict, List, Optional
from pathlib import Path

from pydantic import BaseModel, Field, model_validator

from .asymptotics_model import TVariant
from .density_model import GmmModel, REFERENCE_GMM


def _default_offsets() -> List[float]:
    return [round(-3.0 + 0.25 * i, 10) for i in range(25)]


class AppConfig(BaseModel):
    DEFAULTS: ClassVar[Dict] = {
        "model": REFERENCE_GMM,

        "plane_normal": None,
        "plane_offset": 0.0,
        "offsets": _default_offsets(),

        "sigma": 0.1,
        "truncation": 0.0,

        "sample_sizes": [500, 1000, 1500, 2000, 2500],
        "orders": [10, 20, 30],
        "fig3_n": 2500,
        "fig3_m": 20,
        "trials": 100,
        "base_seed": 0,
        "workers": 1,
        "min_side_points": 5,
        "variant": "corrected",

        "bias_n": 2000,
        "bias_sigma": 0.05,
        "bias_orders": [1, 2, 3],
        "bias_trials": 200,

        "recovery_n": 200,
        "recovery_sigma": 0.1,
        "recovery_step": 10,

        "cut_n": 2500,
        "cut_trials": 5,

        "eigen_cap": 4000,
        "coefficient_tol": 1e-8,
        "cutoff_order": 8,
        "residual_tol": 1e-8,
        "lstsq_rcond": 1e-12,
        "threshold": 0.5,

        "schedule_x": 0.5,
        "schedule_y": 0.75,
        "log_base": None,

        "output_dir": "./results",
        "log_file": None,
    }

    model: GmmModel = Field(..., description="Ground-truth Gaussian mixture.")

    plane_normal: Optional[List[float]] = Field(None, description="Boundary normal; None = first axis.")
    plane_offset: float = Field(0.0, description="Boundary offset c for single-plane runs.")
    offsets: List[float] = Field(default_factory=_default_offsets, min_length=1,
                                 description="Boundary offsets swept by fig3.")

    sigma: float = Field(0.1, gt=0, description="Kernel width.")
    truncation: float = Field(0.0, ge=0, description="Sparse-mode weight threshold; 0 keeps W dense.")

    sample_sizes: List[int] = Field(default_factory=lambda: [500, 1000, 1500, 2000, 2500], min_length=1)
    orders: List[int] = Field(default_factory=lambda: [10, 20, 30], min_length=1)
    fig3_n: int = Field(2500, gt=1)
    fig3_m: int = Field(20, ge=1)
    trials: int = Field(100, ge=1, description="Monte-Carlo repetitions per grid cell.")
    base_seed: int = Field(0, ge=0)
    workers: int = Field(1, ge=1, description="Concurrent trial workers.")
    min_side_points: int = Field(5, ge=0, description="Trials with fewer points on a side are excluded.")
    variant: TVariant = Field(TVariant.CORRECTED)

    bias_n: int = Field(2000, gt=1)
    bias_sigma: float = Field(0.05, gt=0)
    bias_orders: List[int] = Field(default_factory=lambda: [1, 2, 3], min_length=1)
    bias_trials: int = Field(200, ge=1)

    recovery_n: int = Field(200, gt=1)
    recovery_sigma: float = Field(0.1, gt=0)
    recovery_step: int = Field(10, ge=1, description="Labels added per recovery-demo step.")

    cut_n: int = Field(2500, gt=1, description="Sample size of the cut-scaling check.")
    cut_trials: int = Field(5, ge=1)

    eigen_cap: int = Field(4000, gt=0, description="Largest n for the dense eigensolver.")
    coefficient_tol: float = Field(1e-8, gt=0)
    cutoff_order: int = Field(8, ge=1)
    residual_tol: float = Field(1e-8, gt=0)
    lstsq_rcond: float = Field(1e-12, gt=0)
    threshold: float = Field(0.5)

    schedule_x: float = Field(0.5, gt=0, lt=1)
    schedule_y: float = Field(0.75, gt=0.5, lt=1)
    log_base: Optional[float] = Field(None, gt=1)

    output_dir: Path = Field(Path("./results"), description="Directory for CSV and SVG outputs.")
    log_file: Optional[Path] = Field(None, description="Optional log file for experiment runs.")

    @model_validator(mode="after")
    def check_grids(self):
        """Sample sizes, orders and plane normal must be usable together."""
        if any(n < 2 for n in self.sample_sizes):
            raise ValueError("sample_sizes must all be >= 2")
        if any(m < 1 for m in self.orders + self.bias_orders):
            raise ValueError("bandwidth orders must all be >= 1")
        if self.plane_normal is not None and len(self.plane_normal) != self.model.dimension:
            raise ValueError("plane_normal dimension does not match the model dimension")
        return self
