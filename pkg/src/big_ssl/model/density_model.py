from __future__ import annotations
from dataclasses import dataclass
from typing import ClassVar, Dict, List

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, Field, model_validator

from .exceptions import InvalidInputError


class GmmComponent(BaseModel):
    mean: List[float] = Field(..., min_length=1, description="Component mean, feature units.")
    variance: float = Field(..., gt=0, description="Isotropic variance (covariance = variance * I).")
    weight: float = Field(..., gt=0, le=1, description="Mixture proportion.")

    @property
    def std(self) -> float:
        return float(np.sqrt(self.variance))


class GmmModel(BaseModel):
    """Isotropic Gaussian mixture p(x) on R^d."""

    WEIGHT_TOLERANCE: ClassVar[float] = 1e-12

    dimension: int = Field(..., gt=0, description="Feature dimension d.")
    components: List[GmmComponent] = Field(..., min_length=1)

    @model_validator(mode="after")
    def check_components(self):
        for i, component in enumerate(self.components):
            if len(component.mean) != self.dimension:
                raise ValueError(
                    f"Component {i} has dimension {len(component.mean)}, expected {self.dimension}"
                )
        total = sum(c.weight for c in self.components)
        if abs(total - 1.0) > self.WEIGHT_TOLERANCE:
            raise ValueError(f"Component weights sum to {total!r}, expected 1")
        return self

    # --- array views ---

    @property
    def means(self) -> npt.NDArray[np.float64]:
        return np.array([c.mean for c in self.components], dtype=np.float64)

    @property
    def variances(self) -> npt.NDArray[np.float64]:
        return np.array([c.variance for c in self.components], dtype=np.float64)

    @property
    def weights(self) -> npt.NDArray[np.float64]:
        return np.array([c.weight for c in self.components], dtype=np.float64)

    def mirrored(self, axis: int = 0, about: float = 0.0) -> "GmmModel":
        """Reflection of the mixture through the plane x_axis = about."""
        components = []
        for c in self.components:
            mean = list(c.mean)
            mean[axis] = 2.0 * about - mean[axis]
            components.append(GmmComponent(mean=mean, variance=c.variance, weight=c.weight))
        return GmmModel(dimension=self.dimension, components=components)

    @classmethod
    def reference_mixture(cls) -> "GmmModel":
        """The 2-D three-component mixture used by the bandwidth experiments."""
        return cls.model_validate(REFERENCE_GMM)


REFERENCE_GMM: Dict = {
    "dimension": 2,
    "components": [
        {"mean": [-2.0, 0.0], "variance": 0.64, "weight": 0.5},
        {"mean": [0.0, 0.0], "variance": 0.25, "weight": 0.2},
        {"mean": [2.0, 0.0], "variance": 0.16, "weight": 0.3},
    ],
}


class Hyperplane(BaseModel):
    """Oriented boundary {x : normal.x = offset}; S = {x : normal.x < offset}."""

    NORM_TOLERANCE: ClassVar[float] = 1e-12

    normal: List[float] = Field(..., min_length=1)
    offset: float = 0.0

    @model_validator(mode="after")
    def check_unit_normal(self):
        norm = float(np.linalg.norm(self.normal))
        if abs(norm - 1.0) > self.NORM_TOLERANCE:
            raise ValueError(f"Hyperplane normal must be a unit vector, got norm {norm!r}")
        return self

    @property
    def dimension(self) -> int:
        return len(self.normal)

    @property
    def normal_array(self) -> npt.NDArray[np.float64]:
        return np.asarray(self.normal, dtype=np.float64)

    def flipped(self) -> "Hyperplane":
        """Same boundary with S and S^c exchanged."""
        return Hyperplane(normal=[-v for v in self.normal], offset=-self.offset)

    @classmethod
    def axis_aligned(cls, dimension: int, axis: int = 0, offset: float = 0.0) -> "Hyperplane":
        if not 0 <= axis < dimension:
            raise InvalidInputError(f"Axis {axis} out of range for dimension {dimension}")
        normal = [0.0] * dimension
        normal[axis] = 1.0
        return cls(normal=normal, offset=offset)

    @classmethod
    def from_vector(cls, normal, offset: float = 0.0) -> "Hyperplane":
        """Normalizes an arbitrary nonzero direction; offset is taken along the unit normal."""
        vector = np.asarray(normal, dtype=np.float64)
        norm = np.linalg.norm(vector)
        if norm == 0 or not np.isfinite(norm):
            raise InvalidInputError("Hyperplane normal must be a finite nonzero vector")
        return cls(normal=(vector / norm).tolist(), offset=offset)


@dataclass(frozen=True)
class PointCloud:
    points: npt.NDArray[np.float64]
    seed: int = 0

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim != 2 or points.shape[0] < 1:
            raise InvalidInputError(f"Point cloud must be a non-empty n x d matrix, got shape {points.shape}")
        if not np.all(np.isfinite(points)):
            raise InvalidInputError("Point cloud contains non-finite coordinates")
        object.__setattr__(self, "points", points)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]
