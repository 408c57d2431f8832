from __future__ import annotations
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from .exceptions import InvalidInputError

GraphSignal = npt.NDArray[np.float64]
IndicatorSignal = npt.NDArray[np.float64]


def as_signal(values, n: int | None = None) -> GraphSignal:
    signal = np.asarray(values, dtype=np.float64).ravel()
    if not np.all(np.isfinite(signal)):
        raise InvalidInputError("Graph signal contains non-finite entries")
    if n is not None and signal.shape[0] != n:
        raise InvalidInputError(f"Signal length {signal.shape[0]} does not match graph size {n}")
    return signal


def as_indicator(values, n: int | None = None) -> IndicatorSignal:
    signal = as_signal(values, n)
    if not np.all((signal == 0.0) | (signal == 1.0)):
        raise InvalidInputError("Indicator signal must have entries exactly 0 or 1")
    return signal


@dataclass(frozen=True)
class LabeledSet:
    indices: npt.NDArray[np.int64]
    values: npt.NDArray[np.float64]

    def __post_init__(self):
        indices = np.asarray(self.indices, dtype=np.int64).ravel()
        values = np.asarray(self.values, dtype=np.float64).ravel()
        if indices.shape != values.shape:
            raise InvalidInputError("Labeled set needs one value per index")
        if np.unique(indices).shape[0] != indices.shape[0]:
            raise InvalidInputError("Labeled indices must be distinct")
        if np.any(indices < 0):
            raise InvalidInputError("Labeled indices must be nonnegative")
        object.__setattr__(self, "indices", indices)
        object.__setattr__(self, "values", values)

    @property
    def size(self) -> int:
        return self.indices.shape[0]

    def check_range(self, n: int) -> None:
        if self.size and int(self.indices.max()) >= n:
            raise InvalidInputError(f"Labeled index {int(self.indices.max())} out of range for n = {n}")

    def unlabeled(self, n: int) -> npt.NDArray[np.int64]:
        self.check_range(n)
        mask = np.ones(n, dtype=bool)
        mask[self.indices] = False
        return np.flatnonzero(mask)

    @classmethod
    def from_signal(cls, signal: GraphSignal, indices) -> "LabeledSet":
        indices = np.asarray(indices, dtype=np.int64)
        return cls(indices=indices, values=np.asarray(signal, dtype=np.float64)[indices])


@dataclass(frozen=True)
class SpectralBasis:
    """Eigenpairs of L in ascending eigenvalue order; column k pairs with eigenvalue k."""
    eigenvalues: npt.NDArray[np.float64]
    eigenvectors: npt.NDArray[np.float64]

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def transform(self, signal: GraphSignal) -> GraphSignal:
        """Graph Fourier coefficients U^T s."""
        return self.eigenvectors.T @ signal

    def band(self, omega: float) -> npt.NDArray[np.int64]:
        """Column indices of the Paley-Wiener space PW_omega (eigenvalue strictly below omega)."""
        return np.flatnonzero(self.eigenvalues < omega)


@dataclass(frozen=True)
class Prediction:
    scores: GraphSignal
    labels: IndicatorSignal
    threshold: float


class CutValue(NamedTuple):
    raw_cut: float
    scaled_cut: float


class MinBandwidthResult(NamedTuple):
    signal: GraphSignal
    omega_min: float
    n_components: int
