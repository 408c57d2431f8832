from __future__ import annotations
from typing import Tuple
import logging
import math
import warnings

import numpy as np
import numpy.typing as npt
from scipy import integrate, linalg, optimize, stats

from ..model.density_model import GmmModel, Hyperplane, PointCloud
from ..model.exceptions import InvalidInputError, NumericalAccuracyError
from ..model.signal_model import IndicatorSignal

logger = logging.getLogger(__name__)

PATCH_STDS = 6.0
GRID_STEPS_PER_STD = 20
MAX_GRID_POINTS = 200_000
QUADRATURE_REL_TOL = 5e-3


# --------------------------------------------------------------
# Density evaluation and sampling
# --------------------------------------------------------------

def pdf_eval(model: GmmModel, x) -> float | npt.NDArray[np.float64]:
    """
    Mixture density at one point (shape (d,)) or at a batch of points (shape (k, d)).
    """
    points = np.asarray(x, dtype=np.float64)
    single = points.ndim == 1
    points = np.atleast_2d(points)
    if points.ndim != 2 or points.shape[1] != model.dimension:
        raise InvalidInputError(
            f"Point dimension {points.shape[-1]} does not match model dimension {model.dimension}"
        )

    variances = model.variances
    sq_dist = ((points[:, None, :] - model.means[None, :, :]) ** 2).sum(axis=-1)
    scale = model.weights * (2.0 * np.pi * variances) ** (-model.dimension / 2.0)
    density = (scale * np.exp(-sq_dist / (2.0 * variances))).sum(axis=1)

    if single:
        return float(density[0])
    return density


def sample(model: GmmModel, n: int, seed: int) -> PointCloud:
    """n i.i.d. draws: component by weight, then an isotropic Gaussian draw."""
    if n < 1:
        raise InvalidInputError(f"Sample size must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    labels = rng.choice(len(model.components), size=n, p=model.weights)
    noise = rng.standard_normal((n, model.dimension))
    points = model.means[labels] + np.sqrt(model.variances[labels])[:, None] * noise
    return PointCloud(points=points, seed=seed)


def indicator_from_boundary(cloud: PointCloud, plane: Hyperplane) -> IndicatorSignal:
    if cloud.dimension != plane.dimension:
        raise InvalidInputError(
            f"Cloud dimension {cloud.dimension} does not match plane dimension {plane.dimension}"
        )
    return (cloud.points @ plane.normal_array < plane.offset).astype(np.float64)


def region_mass(model: GmmModel, plane: Hyperplane) -> float:
    """Exact probability of S = {normal.x < offset} for isotropic components."""
    _check_dimensions(model, plane)
    projected = model.means @ plane.normal_array
    z = (plane.offset - projected) / np.sqrt(model.variances)
    return float(np.sum(model.weights * stats.norm.cdf(z)))


# --------------------------------------------------------------
# Boundary geometry
# --------------------------------------------------------------

def plane_frame(plane: Hyperplane) -> Tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """
    Origin (offset * normal) and an orthonormal d x (d-1) basis of the plane,
    so that boundary points are origin + basis @ y.
    """
    normal = plane.normal_array
    basis = linalg.null_space(normal[None, :])
    return plane.offset * normal, basis


def _check_dimensions(model: GmmModel, plane: Hyperplane) -> None:
    if model.dimension != plane.dimension:
        raise InvalidInputError(
            f"Model dimension {model.dimension} does not match plane dimension {plane.dimension}"
        )


def _patch_bounds(model: GmmModel, origin, basis) -> Tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Box in plane coordinates covering every projected mean +- PATCH_STDS component std."""
    centers = (model.means - origin) @ basis
    stds = np.sqrt(model.variances)[:, None]
    return (centers - PATCH_STDS * stds).min(axis=0), (centers + PATCH_STDS * stds).max(axis=0)


def boundary_argmax(model: GmmModel, plane: Hyperplane) -> Tuple[npt.NDArray[np.float64], float]:
    """
    Plane coordinates and value of the largest density on the boundary.

    Coarse grid (step = smallest component std / 20) over the patch, then a
    bounded local refinement around the best grid node.
    """
    _check_dimensions(model, plane)
    origin, basis = plane_frame(plane)
    k = basis.shape[1]
    if k == 0:
        return np.zeros(0), float(pdf_eval(model, origin))

    def density_at(y):
        return pdf_eval(model, origin + basis @ np.atleast_1d(y))

    lo, hi = _patch_bounds(model, origin, basis)
    step = float(np.sqrt(model.variances.min())) / GRID_STEPS_PER_STD
    per_axis = np.ceil((hi - lo) / step).astype(int) + 1
    per_axis = np.minimum(per_axis, max(int(MAX_GRID_POINTS ** (1.0 / k)), 3))
    axes = [np.linspace(lo[i], hi[i], per_axis[i]) for i in range(k)]
    nodes = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, k)
    values = pdf_eval(model, origin + nodes @ basis.T)

    best = int(np.argmax(values))
    y_best, value_best = nodes[best], float(values[best])
    logger.debug(f"Boundary sup grid: {nodes.shape[0]} nodes, best {value_best:.6g}")
    if value_best == 0.0:
        return y_best, 0.0

    if k == 1:
        spacing = axes[0][1] - axes[0][0] if per_axis[0] > 1 else step
        res = optimize.minimize_scalar(
            lambda t: -density_at(t),
            bounds=(y_best[0] - spacing, y_best[0] + spacing),
            method="bounded",
            options={"xatol": 1e-12},
        )
        y_ref = np.atleast_1d(res.x)
    else:
        res = optimize.minimize(
            lambda y: -density_at(y), y_best, method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-16, "maxiter": 4000},
        )
        y_ref = np.asarray(res.x)

    value_ref = float(density_at(y_ref))
    if value_ref > value_best:
        return y_ref, value_ref
    return y_best, value_best


def sup_on_boundary(model: GmmModel, plane: Hyperplane) -> float:
    return boundary_argmax(model, plane)[1]


def log_boundary_power_integral(model: GmmModel, plane: Hyperplane, q: float,
                                rel_tol: float = QUADRATURE_REL_TOL) -> float:
    """
    log of the (d-1)-dimensional integral of p^q over the hyperplane.

    The integrand is scaled by the boundary sup so large q never underflows:
    log I = q log(sup) + log of the integral of (p/sup)^q.
    """
    if q < 1:
        raise InvalidInputError(f"Exponent q must be >= 1, got {q}")
    _check_dimensions(model, plane)
    origin, basis = plane_frame(plane)
    y_peak, peak = boundary_argmax(model, plane)
    if peak == 0.0:
        return -math.inf

    k = basis.shape[1]
    if k == 0:
        return q * math.log(peak)

    lo, hi = _patch_bounds(model, origin, basis)

    def integrand(*y):
        return (pdf_eval(model, origin + basis @ np.asarray(y)) / peak) ** q

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        if k == 1:
            centers = ((model.means - origin) @ basis)[:, 0]
            breaks = sorted({float(c) for c in np.append(centers, y_peak) if lo[0] < c < hi[0]})
            value, error = integrate.quad(
                integrand, lo[0], hi[0], points=breaks or None,
                limit=500, epsabs=1e-14 * (hi[0] - lo[0]), epsrel=1e-9,
            )
        else:
            value, error = integrate.nquad(
                integrand, [(lo[i], hi[i]) for i in range(k)],
                opts={"limit": 200, "epsabs": 1e-12, "epsrel": 1e-8},
            )

    logger.debug(f"Boundary integral q={q}: scaled value {value:.6g}, error estimate {error:.3g}")
    if not np.isfinite(value) or value <= 0.0 or error > rel_tol * value:
        raise NumericalAccuracyError(
            f"Boundary quadrature did not converge for q={q}: value {value!r}, error estimate {error!r}"
        )
    return q * math.log(peak) + math.log(value)


def boundary_power_integral(model: GmmModel, plane: Hyperplane, q: float,
                            rel_tol: float = QUADRATURE_REL_TOL) -> float:
    return math.exp(log_boundary_power_integral(model, plane, q, rel_tol))
