from __future__ import annotations
from dataclasses import dataclass
from typing import Union

import numpy as np
import numpy.typing as npt
from pydantic import BaseModel, Field
from scipy import sparse


class KernelParams(BaseModel):
    sigma: float = Field(..., gt=0, description="Gaussian kernel width, feature units.")
    dimension: int = Field(..., gt=0, description="Feature dimension d.")

    @property
    def peak(self) -> float:
        """Kernel value at zero distance, (2 pi sigma^2)^(-d/2)."""
        return float((2.0 * np.pi * self.sigma ** 2) ** (-self.dimension / 2.0))


WeightMatrix = Union[npt.NDArray[np.float64], sparse.csr_matrix]


@dataclass(frozen=True)
class SimilarityGraph:
    """
    Gaussian-kernel similarity graph.

    The Laplacian L = (1/n)(D - W) is never stored; it is represented by the
    weights, the degree vector and the 1/n scale.
    """
    weights: WeightMatrix
    degrees: npt.NDArray[np.float64]
    sigma: float
    dimension: int
    truncation: float = 0.0

    @property
    def n(self) -> int:
        return self.degrees.shape[0]

    @property
    def laplacian_scale(self) -> float:
        return 1.0 / self.n

    @property
    def is_sparse(self) -> bool:
        return sparse.issparse(self.weights)

    def dense_weights(self) -> npt.NDArray[np.float64]:
        if self.is_sparse:
            return self.weights.toarray()
        return self.weights

    def dense_laplacian(self) -> npt.NDArray[np.float64]:
        return (np.diag(self.degrees) - self.dense_weights()) * self.laplacian_scale

    def spectral_radius_bound(self) -> float:
        """Gershgorin bound on the largest eigenvalue of L."""
        return 2.0 * float(np.max(self.degrees)) * self.laplacian_scale
