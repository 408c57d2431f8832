"""
File codecs for point clouds, mixture models, graphs, labels and scores.

Point clouds and edge lists are headerless CSV written with 17 significant
digits, which round-trips float64 exactly.
"""
from __future__ import annotations
from pathlib import Path
from typing import Union
import json

import numpy as np
import pandas as pd
from scipy import sparse

from ..model.density_model import GmmModel, PointCloud
from ..model.exceptions import InvalidInputError
from ..model.graph_model import SimilarityGraph
from ..model.signal_model import LabeledSet, Prediction

PathLike = Union[str, Path]
FLOAT_FORMAT = "%.17g"


# --- point clouds ---

def save_point_cloud(cloud: PointCloud, path: PathLike) -> None:
    np.savetxt(Path(path), cloud.points, fmt=FLOAT_FORMAT, delimiter=",")


def load_point_cloud(path: PathLike) -> PointCloud:
    points = np.loadtxt(Path(path), delimiter=",", ndmin=2, dtype=np.float64)
    return PointCloud(points=points, seed=0)


# --- mixture models ---

def save_model(model: GmmModel, path: PathLike) -> None:
    Path(path).write_text(model.model_dump_json(indent=4), encoding="utf-8")


def load_model(path: PathLike) -> GmmModel:
    return GmmModel.model_validate_json(Path(path).read_text(encoding="utf-8"))


# --- graphs ---

def graph_header_path(path: PathLike) -> Path:
    return Path(path).with_suffix(".json")


def save_graph(graph: SimilarityGraph, path: PathLike) -> Path:
    """Edge list (i, j, w_ij) with i < j and w_ij != 0, plus a JSON header next to it."""
    weights = sparse.triu(sparse.csr_matrix(graph.weights), k=1).tocoo()
    order = np.lexsort((weights.col, weights.row))
    rows, cols, values = weights.row[order], weights.col[order], weights.data[order]
    with Path(path).open("w", encoding="utf-8") as f:
        for i, j, w in zip(rows, cols, values):
            f.write(f"{i},{j},{FLOAT_FORMAT % w}\n")

    header = {"n": graph.n, "sigma": graph.sigma, "dimension": graph.dimension,
              "truncation": graph.truncation}
    header_path = graph_header_path(path)
    header_path.write_text(json.dumps(header, indent=4), encoding="utf-8")
    return header_path


def load_graph(path: PathLike) -> SimilarityGraph:
    header = json.loads(graph_header_path(path).read_text(encoding="utf-8"))
    n = int(header["n"])
    if Path(path).stat().st_size == 0:
        edges = pd.DataFrame({"i": np.zeros(0, np.int64), "j": np.zeros(0, np.int64), "w": np.zeros(0)})
    else:
        edges = pd.read_csv(Path(path), header=None, names=["i", "j", "w"],
                            dtype={"i": np.int64, "j": np.int64, "w": np.float64},
                            float_precision="round_trip")
    upper = sparse.csr_matrix((edges["w"].to_numpy(), (edges["i"].to_numpy(), edges["j"].to_numpy())),
                              shape=(n, n))
    weights = upper + upper.T
    if float(header.get("truncation", 0.0)) > 0:
        weights = sparse.csr_matrix(weights)
        degrees = np.asarray(weights.sum(axis=1)).ravel()
    else:
        weights = weights.toarray()
        degrees = weights.sum(axis=1)
    return SimilarityGraph(weights=weights, degrees=degrees, sigma=float(header["sigma"]),
                           dimension=int(header["dimension"]),
                           truncation=float(header.get("truncation", 0.0)))


# --- labels and scores ---

def load_labels(path: PathLike) -> LabeledSet:
    frame = pd.read_csv(Path(path), header=None, names=["index", "value"], comment="#",
                        float_precision="round_trip")
    if frame.empty:
        raise InvalidInputError(f"No labels found in {path}")
    return LabeledSet(indices=frame["index"].to_numpy(dtype=np.int64),
                      values=frame["value"].to_numpy(dtype=np.float64))


def save_labels(labeled: LabeledSet, path: PathLike) -> None:
    frame = pd.DataFrame({"index": labeled.indices, "value": labeled.values})
    frame.to_csv(Path(path), header=False, index=False, float_format=FLOAT_FORMAT)


def save_scores(prediction: Prediction, path: PathLike) -> None:
    frame = pd.DataFrame({
        "index": np.arange(prediction.scores.shape[0]),
        "score": prediction.scores,
        "label": prediction.labels.astype(np.int64),
    })
    frame.to_csv(Path(path), index=False, float_format="%.12g")
