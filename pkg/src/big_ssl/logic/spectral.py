from __future__ import annotations
from typing import Optional
import logging
import math

import numpy as np
from scipy import linalg

from ..model.exceptions import InvalidInputError, ResourceLimitError, UndefinedBandwidthError
from ..model.graph_model import SimilarityGraph
from ..model.signal_model import GraphSignal, LabeledSet, SpectralBasis, as_signal
from .graph import laplacian_apply, laplacian_apply_block

logger = logging.getLogger(__name__)

DEFAULT_EIGEN_CAP = 4000
DEFAULT_COEFFICIENT_TOL = 1e-8
DEFAULT_CUTOFF_ORDER = 8
# relative to the Gershgorin bound of L
NULLSPACE_TOL = 1e-12


def fourier_basis(graph: SimilarityGraph, eigen_cap: int = DEFAULT_EIGEN_CAP) -> SpectralBasis:
    """Full symmetric eigendecomposition of L = (1/n)(D - W), eigenvalues ascending."""
    if graph.n > eigen_cap:
        raise ResourceLimitError(
            f"Dense eigendecomposition capped at n = {eigen_cap} (got n = {graph.n}); "
            "use bandwidth_estimate, which only needs iterated Laplacian applications."
        )
    eigenvalues, eigenvectors = linalg.eigh(graph.dense_laplacian())
    # L is PSD; clip rounding noise below zero
    eigenvalues = np.maximum(eigenvalues, 0.0)
    logger.debug(f"Fourier basis: n={graph.n}, lambda_max={eigenvalues[-1]:.6g}")
    return SpectralBasis(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def bandwidth_estimate(graph: SimilarityGraph, s: GraphSignal, m: int) -> float:
    """
    m-th order estimate (s^T L^m s / s^T s)^(1/m).

    Uses m successive Laplacian applications split as (L^h s)^T (L^h s) [L]
    with per-step normalization; the log of the norms is accumulated so L^m
    never under- or overflows.
    """
    if m < 1:
        raise InvalidInputError(f"Bandwidth order must be >= 1, got {m}")
    s = as_signal(s, graph.n)
    norm = float(np.linalg.norm(s))
    if norm == 0.0:
        raise UndefinedBandwidthError("Bandwidth of the zero signal is undefined")

    floor = NULLSPACE_TOL * graph.spectral_radius_bound()
    u = s / norm
    log_scale = 0.0
    for _ in range(m // 2):
        u = laplacian_apply(graph, u)
        step_norm = float(np.linalg.norm(u))
        if step_norm <= floor:
            return 0.0
        u /= step_norm
        log_scale += math.log(step_norm)

    log_ratio = 2.0 * log_scale
    if m % 2 == 1:
        q = float(u @ laplacian_apply(graph, u))
        if q <= floor:
            return 0.0
        log_ratio += math.log(q)
    return math.exp(log_ratio / m)


def exact_bandwidth(basis: SpectralBasis, s: GraphSignal,
                    tol: float = DEFAULT_COEFFICIENT_TOL) -> float:
    """Largest eigenvalue whose Fourier coefficient exceeds tol * ||s||."""
    s = as_signal(s, basis.n)
    norm = float(np.linalg.norm(s))
    if norm == 0.0:
        raise UndefinedBandwidthError("Bandwidth of the zero signal is undefined")
    coefficients = basis.transform(s)
    support = np.flatnonzero(np.abs(coefficients) > tol * norm)
    if support.size == 0:
        return 0.0
    return float(basis.eigenvalues[support[-1]])


def laplacian_power_columns(graph: SimilarityGraph, columns: np.ndarray, k: int) -> np.ndarray:
    """Columns of L^k selected by index, via k block applications."""
    block = np.zeros((graph.n, columns.shape[0]))
    block[columns, np.arange(columns.shape[0])] = 1.0
    for _ in range(k):
        block = laplacian_apply_block(graph, block)
    return block


def cutoff_frequency(graph: SimilarityGraph, labeled: LabeledSet,
                     k: int = DEFAULT_CUTOFF_ORDER, logger: Optional[logging.Logger] = None) -> float:
    """
    Cutoff frequency estimate (lambda_min[(L^k)_{U,U}])^(1/k) of a labeled set,
    U being the unlabeled nodes. An empty U gives +inf.
    """
    logger = logger or logging.getLogger(__name__)
    if k < 1:
        raise InvalidInputError(f"Cutoff order must be >= 1, got {k}")
    unlabeled = labeled.unlabeled(graph.n)
    if unlabeled.size == 0:
        return math.inf

    if 2 * unlabeled.size <= graph.n:
        logger.debug(f"Cutoff: {unlabeled.size} unlabeled nodes, iterated block applications")
        sub = laplacian_power_columns(graph, unlabeled, k)[unlabeled, :]
    else:
        logger.debug(f"Cutoff: {unlabeled.size} unlabeled nodes, dense matrix power")
        power = np.linalg.matrix_power(graph.dense_laplacian(), k)
        sub = power[np.ix_(unlabeled, unlabeled)]

    sub = 0.5 * (sub + sub.T)
    smallest = float(linalg.eigvalsh(sub, subset_by_index=[0, 0])[0])
    return max(smallest, 0.0) ** (1.0 / k)


def project_bandlimited(basis: SpectralBasis, s: GraphSignal, omega: float) -> GraphSignal:
    """Orthogonal projection onto PW_omega (eigenvalues strictly below omega)."""
    if omega < 0:
        raise InvalidInputError(f"Cutoff must be nonnegative, got {omega}")
    s = as_signal(s, basis.n)
    band = basis.band(omega)
    if band.size == 0:
        return np.zeros_like(s)
    u_k = basis.eigenvectors[:, band]
    return u_k @ (u_k.T @ s)
