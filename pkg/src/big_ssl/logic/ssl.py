from __future__ import annotations
from typing import Callable, Optional, Tuple
import bisect
import logging

import numpy as np
import numpy.typing as npt
from scipy import linalg

from ..model.exceptions import DisconnectedGraphError, InfeasibleCutoffError, InvalidInputError
from ..model.graph_model import SimilarityGraph
from ..model.signal_model import (
    GraphSignal,
    IndicatorSignal,
    LabeledSet,
    MinBandwidthResult,
    Prediction,
    SpectralBasis,
    as_signal,
)

logger = logging.getLogger(__name__)

DEFAULT_RESIDUAL_TOL = 1e-8
DEFAULT_RCOND = 1e-12
DEFAULT_THRESHOLD = 0.5
EIGENSPACE_TOL = 1e-12


def _require_labels(basis_n: int, labeled: LabeledSet) -> None:
    if labeled.size == 0:
        raise InvalidInputError("At least one labeled node is required")
    labeled.check_range(basis_n)


def _fit(basis: SpectralBasis, labeled: LabeledSet, columns: int,
         rcond: float) -> Tuple[npt.NDArray[np.float64], float]:
    """Minimum-norm least-squares coefficients on the first `columns` eigenvectors, and the residual."""
    system = basis.eigenvectors[np.ix_(labeled.indices, np.arange(columns))]
    coefficients, _, _, _ = linalg.lstsq(system, labeled.values, cond=rcond)
    residual = float(np.linalg.norm(system @ coefficients - labeled.values))
    return coefficients, residual


def interpolate_ls(basis: SpectralBasis, labeled: LabeledSet, omega_l: float,
                   rcond: float = DEFAULT_RCOND) -> GraphSignal:
    """
    Least-squares fit of the labels inside PW_omega_L; rank deficiency is
    resolved by the minimum-norm solution.
    """
    _require_labels(basis.n, labeled)
    if not omega_l > 0:
        raise InvalidInputError(f"Cutoff must be positive, got {omega_l}")
    band = basis.band(omega_l)
    if band.size == 0:
        raise InfeasibleCutoffError(f"No graph frequency lies below the cutoff {omega_l!r}")
    # PW spaces are prefixes of the ascending eigenbasis
    coefficients, residual = _fit(basis, labeled, band.size, rcond)
    logger.debug(f"LS interpolation: K={band.size}, label residual {residual:.3g}")
    return basis.eigenvectors[:, : band.size] @ coefficients


def _eigenspace_boundaries(eigenvalues: npt.NDArray[np.float64]) -> list[int]:
    """Prefix sizes K that never split a (numerically) repeated eigenvalue."""
    gaps = np.flatnonzero(np.diff(eigenvalues) > EIGENSPACE_TOL) + 1
    return [int(k) for k in gaps] + [eigenvalues.shape[0]]


def interpolate_min_bandwidth(basis: SpectralBasis, labeled: LabeledSet,
                              residual_tol: float = DEFAULT_RESIDUAL_TOL,
                              rcond: float = DEFAULT_RCOND) -> MinBandwidthResult:
    """
    Smallest-bandwidth signal matching the labels.

    Finds the smallest prefix K of the eigenbasis (whole eigenspaces only) for
    which the labels are reproduced within residual_tol * ||labels||, and
    returns the minimum-norm interpolant together with omega_min = lambda_{K-1}.
    Consistency is monotone in K, so the search bisects over eigenspace boundaries.
    """
    _require_labels(basis.n, labeled)
    target = residual_tol * float(np.linalg.norm(labeled.values))
    boundaries = _eigenspace_boundaries(basis.eigenvalues)

    def consistent(position: int) -> bool:
        return _fit(basis, labeled, boundaries[position], rcond)[1] <= target

    position = bisect.bisect_left(range(len(boundaries)), True, key=consistent)
    if position == len(boundaries):
        residual = _fit(basis, labeled, basis.n, rcond)[1]
        raise InfeasibleCutoffError(
            f"No bandlimited signal reproduces the labels within tolerance (best residual {residual:.3g})"
        )
    if position > 0 and consistent(position - 1):
        raise InfeasibleCutoffError("Label consistency is not monotone in the band size")

    k = boundaries[position]
    coefficients, residual = _fit(basis, labeled, k, rcond)
    logger.debug(f"Min-bandwidth interpolation: K={k}, residual {residual:.3g}")
    signal = basis.eigenvectors[:, :k] @ coefficients
    return MinBandwidthResult(signal=signal, omega_min=float(basis.eigenvalues[k - 1]), n_components=k)


def harmonic_interpolate(graph: SimilarityGraph, labeled: LabeledSet) -> GraphSignal:
    """
    Minimizer of f^T L f with f(labeled) fixed: f_U = -L_UU^{-1} L_UL f_L.
    """
    if labeled.size == 0:
        raise InvalidInputError("At least one labeled node is required")
    unlabeled = labeled.unlabeled(graph.n)
    f = np.zeros(graph.n)
    f[labeled.indices] = labeled.values
    if unlabeled.size == 0:
        return f

    laplacian = graph.dense_laplacian()
    l_uu = laplacian[np.ix_(unlabeled, unlabeled)]
    l_ul = laplacian[np.ix_(unlabeled, labeled.indices)]
    try:
        factor = linalg.cho_factor(l_uu)
    except linalg.LinAlgError as e:
        raise DisconnectedGraphError(
            "Unlabeled Laplacian block is singular: a connected component carries no label"
        ) from e
    f[unlabeled] = -linalg.cho_solve(factor, l_ul @ labeled.values)
    return f


def predict(scores: GraphSignal, threshold: float = DEFAULT_THRESHOLD) -> IndicatorSignal:
    scores = as_signal(scores)
    return (scores > threshold).astype(np.float64)


def make_prediction(scores: GraphSignal, threshold: float = DEFAULT_THRESHOLD) -> Prediction:
    scores = as_signal(scores)
    return Prediction(scores=scores, labels=predict(scores, threshold), threshold=threshold)


def one_vs_all(labeled: LabeledSet, n: int,
               solve: Callable[[LabeledSet], GraphSignal],
               classes: Optional[npt.NDArray[np.int64]] = None
               ) -> Tuple[npt.NDArray[np.int64], npt.NDArray[np.float64]]:
    """
    Multiclass prediction from binary problems: class c is scored by solving
    with labels 1[value == c]; the prediction is the argmax (lowest class on ties).
    """
    if classes is None:
        classes = np.unique(labeled.values).astype(np.int64)
    scores = np.empty((n, classes.shape[0]))
    for column, cls in enumerate(classes):
        binary = LabeledSet(indices=labeled.indices, values=(labeled.values == cls).astype(np.float64))
        scores[:, column] = solve(binary)
    return classes[np.argmax(scores, axis=1)], scores
