import logging

import numpy as np
import pytest

from big_ssl.model.config_model import AppConfig
from big_ssl.model.density_model import GmmModel, Hyperplane, PointCloud
from big_ssl.model.graph_model import KernelParams, SimilarityGraph
from big_ssl.logic.graph import build_graph


@pytest.fixture
def gmm() -> GmmModel:
    return GmmModel.reference_mixture()


@pytest.fixture
def plane_x0() -> Hyperplane:
    return Hyperplane.axis_aligned(2, axis=0, offset=0.0)


def two_node_graph(w: float, sigma: float = 1.0) -> SimilarityGraph:
    weights = np.array([[0.0, w], [w, 0.0]])
    return SimilarityGraph(weights=weights, degrees=weights.sum(axis=1), sigma=sigma, dimension=1)


def random_graph(rng: np.random.Generator, n: int, d: int = 2, sigma: float = 0.7) -> SimilarityGraph:
    cloud = PointCloud(points=rng.standard_normal((n, d)))
    return build_graph(cloud, KernelParams(sigma=sigma, dimension=d))


def chain_graph(n: int, spacing: float = 1.0, sigma: float = 1.0) -> SimilarityGraph:
    points = (spacing * np.arange(n, dtype=np.float64))[:, None]
    return build_graph(PointCloud(points=points), KernelParams(sigma=sigma, dimension=1))


@pytest.fixture
def small_config(tmp_path) -> AppConfig:
    data = dict(AppConfig.DEFAULTS)
    data.update({
        "sample_sizes": [120, 200],
        "orders": [2, 4],
        "offsets": [-1.0, 0.0, 1.0],
        "fig3_n": 150,
        "fig3_m": 4,
        "trials": 3,
        "sigma": 0.3,
        "bias_n": 150,
        "bias_sigma": 0.3,
        "bias_trials": 4,
        "recovery_n": 40,
        "recovery_sigma": 0.8,
        "recovery_step": 10,
        "cut_n": 200,
        "cut_trials": 2,
        "output_dir": str(tmp_path / "results"),
    })
    return AppConfig.model_validate(data)


@pytest.fixture
def quiet_logger() -> logging.Logger:
    logger = logging.getLogger("big_ssl.tests")
    logger.setLevel(logging.DEBUG)
    return logger
