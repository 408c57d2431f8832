from __future__ import annotations
from typing import NamedTuple, Optional
import logging
import math

import numpy as np
from scipy import sparse
from scipy.spatial.distance import pdist, squareform

from ..model.density_model import PointCloud
from ..model.exceptions import InvalidInputError
from ..model.graph_model import KernelParams, SimilarityGraph
from ..model.signal_model import CutValue, GraphSignal, as_indicator, as_signal

logger = logging.getLogger(__name__)


def gaussian_kernel(x, y, params: KernelParams) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != (params.dimension,) or y.shape != (params.dimension,):
        raise InvalidInputError(
            f"Kernel points must have dimension {params.dimension}, got {x.shape} and {y.shape}"
        )
    sq_dist = float(np.sum((x - y) ** 2))
    return params.peak * math.exp(-sq_dist / (2.0 * params.sigma ** 2))


def build_graph(cloud: PointCloud, params: KernelParams, truncation: float = 0.0,
                logger: Optional[logging.Logger] = None) -> SimilarityGraph:
    """
    Gaussian-kernel graph without self-loops.

    With truncation > 0 entries below the threshold are dropped and W is stored
    as a CSR matrix; otherwise W is dense.
    """
    logger = logger or logging.getLogger(__name__)
    if cloud.n < 2:
        raise InvalidInputError(f"A graph needs at least 2 points, got {cloud.n}")
    if cloud.dimension != params.dimension:
        raise InvalidInputError(
            f"Cloud dimension {cloud.dimension} does not match kernel dimension {params.dimension}"
        )
    if truncation < 0:
        raise InvalidInputError("Truncation threshold must be nonnegative")

    sq_dist = squareform(pdist(cloud.points, "sqeuclidean"))
    weights = params.peak * np.exp(-sq_dist / (2.0 * params.sigma ** 2))
    np.fill_diagonal(weights, 0.0)

    if truncation > 0:
        weights[weights < truncation] = 0.0
        weights = sparse.csr_matrix(weights)
        degrees = np.asarray(weights.sum(axis=1)).ravel()
        logger.debug(f"Sparse graph: n={cloud.n}, nnz={weights.nnz}, truncation={truncation:.3g}")
    else:
        degrees = weights.sum(axis=1)
        logger.debug(f"Dense graph: n={cloud.n}, sigma={params.sigma}")

    return SimilarityGraph(weights=weights, degrees=degrees, sigma=params.sigma,
                           dimension=params.dimension, truncation=truncation)


def laplacian_apply(graph: SimilarityGraph, f: GraphSignal) -> GraphSignal:
    """(1/n)(D f - W f) without materializing L."""
    f = as_signal(f, graph.n)
    wf = np.asarray(graph.weights @ f).ravel()
    return (graph.degrees * f - wf) * graph.laplacian_scale


def laplacian_apply_block(graph: SimilarityGraph, block) -> np.ndarray:
    """L applied to every column of an n x k block."""
    block = np.asarray(block, dtype=np.float64)
    wb = np.asarray(graph.weights @ block)
    return (graph.degrees[:, None] * block - wb) * graph.laplacian_scale


def cut_value(graph: SimilarityGraph, s) -> CutValue:
    """
    raw_cut is the total weight between S and S^c; scaled_cut is
    sqrt(2 pi)/(n sigma) * s^T L s with L = (1/n)(D - W).
    """
    s = as_indicator(s, graph.n)
    across = np.asarray(graph.weights @ (1.0 - s)).ravel()
    raw_cut = float(s @ across)
    quadratic = float(s @ laplacian_apply(graph, s))
    scaled_cut = math.sqrt(2.0 * math.pi) / (graph.n * graph.sigma) * quadratic
    return CutValue(raw_cut=raw_cut, scaled_cut=scaled_cut)


class CutInterpretations(NamedTuple):
    laplacian_scaled: float
    raw_scaled: float


def cut_interpretations(graph: SimilarityGraph, s) -> CutInterpretations:
    """
    The scaled cut statistic under both readings of the cut identity:
    with the 1/n-normalized Laplacian and with the raw cut sum_{S, S^c} w_ij.
    """
    cut = cut_value(graph, s)
    prefactor = math.sqrt(2.0 * math.pi) / (graph.n * graph.sigma)
    return CutInterpretations(laplacian_scaled=cut.scaled_cut, raw_scaled=prefactor * cut.raw_cut)
