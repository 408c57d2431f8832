import math

import numpy as np
import pytest
from scipy import stats

from big_ssl.logic import density
from big_ssl.model.density_model import GmmComponent, GmmModel, Hyperplane, PointCloud
from big_ssl.model.exceptions import InvalidInputError


def line_square_integral(model: GmmModel, axis_value: float) -> float:
    """Closed form of the integral of p^2 along x_1 = axis_value for a 2-D isotropic mixture."""
    means, variances, weights = model.means, model.variances, model.weights
    amplitude = weights / (2.0 * np.pi * variances) * np.exp(-(means[:, 0] - axis_value) ** 2 / (2.0 * variances))
    total = 0.0
    for i in range(len(weights)):
        for j in range(len(weights)):
            precision = 1.0 / variances[i] + 1.0 / variances[j]
            centre = (means[i, 1] / variances[i] + means[j, 1] / variances[j]) / precision
            offset = means[i, 1] ** 2 / variances[i] + means[j, 1] ** 2 / variances[j] - precision * centre ** 2
            total += amplitude[i] * amplitude[j] * math.sqrt(2.0 * math.pi / precision) * math.exp(-0.5 * offset)
    return total


# --- pdf ---

def test_pdf_at_origin_matches_reference_value(gmm):
    assert density.pdf_eval(gmm, [0.0, 0.0]) == pytest.approx(0.13279, rel=1e-4)


def test_pdf_batch_matches_scipy_mixture(gmm):
    rng = np.random.default_rng(3)
    points = rng.normal(scale=2.0, size=(50, 2))
    expected = sum(
        c.weight * stats.multivariate_normal(mean=c.mean, cov=c.variance * np.eye(2)).pdf(points)
        for c in gmm.components
    )
    np.testing.assert_allclose(density.pdf_eval(gmm, points), expected, rtol=1e-12)


def test_pdf_integrates_to_one_over_a_box(gmm):
    rng = np.random.default_rng(6)
    low, high = np.array([-7.0, -5.0]), np.array([5.0, 5.0])
    points = rng.uniform(low, high, size=(2_000_000, 2))
    values = density.pdf_eval(gmm, points)
    assert np.all(values >= 0)
    assert float(np.prod(high - low) * values.mean()) == pytest.approx(1.0, rel=0.01)


def test_pdf_rejects_wrong_dimension(gmm):
    with pytest.raises(InvalidInputError):
        density.pdf_eval(gmm, [0.0, 0.0, 0.0])


def test_pdf_far_from_support_is_zero_not_nan(gmm):
    value = density.pdf_eval(gmm, [1e6, 1e6])
    assert value == 0.0


# --- sampling ---

def test_sample_is_deterministic_per_seed(gmm):
    a = density.sample(gmm, 100, seed=42)
    b = density.sample(gmm, 100, seed=42)
    c = density.sample(gmm, 100, seed=43)
    np.testing.assert_array_equal(a.points, b.points)
    assert not np.array_equal(a.points, c.points)
    assert a.points.shape == (100, 2)


def test_sample_mean_matches_mixture_mean(gmm):
    cloud = density.sample(gmm, 20000, seed=0)
    expected = gmm.weights @ gmm.means
    np.testing.assert_allclose(cloud.points.mean(axis=0), expected, atol=0.06)


def test_sample_rejects_empty(gmm):
    with pytest.raises(InvalidInputError):
        density.sample(gmm, 0, seed=0)


# --- indicator and mass ---

def test_indicator_is_strict_and_binary(plane_x0):
    cloud = PointCloud(points=np.array([[-1.0, 0.0], [0.0, 5.0], [1.0, -3.0], [-1e-12, 2.0]]))
    s = density.indicator_from_boundary(cloud, plane_x0)
    np.testing.assert_array_equal(s, [1.0, 0.0, 0.0, 1.0])
    assert s.dtype == np.float64


def test_indicator_dimension_mismatch(plane_x0):
    cloud = PointCloud(points=np.zeros((3, 3)))
    with pytest.raises(InvalidInputError):
        density.indicator_from_boundary(cloud, plane_x0)


def test_region_mass_left_of_origin(gmm, plane_x0):
    assert density.region_mass(gmm, plane_x0) == pytest.approx(0.596895, abs=1e-6)


def test_region_mass_complements_under_flip(gmm):
    plane = Hyperplane.axis_aligned(2, offset=0.7)
    total = density.region_mass(gmm, plane) + density.region_mass(gmm, plane.flipped())
    assert total == pytest.approx(1.0, abs=1e-12)


def test_region_mass_matches_empirical_fraction(gmm, plane_x0):
    n = 100_000
    mass = density.region_mass(gmm, plane_x0)
    fraction = density.indicator_from_boundary(density.sample(gmm, n, seed=5), plane_x0).mean()
    assert abs(fraction - mass) <= 3 * math.sqrt(mass * (1 - mass) / n)


# --- boundary sup and integrals ---

def test_sup_on_central_boundary(gmm, plane_x0):
    assert density.sup_on_boundary(gmm, plane_x0) == pytest.approx(0.13279, rel=1e-4)


def test_sup_on_right_boundary(gmm):
    plane = Hyperplane.axis_aligned(2, offset=2.0)
    assert density.sup_on_boundary(gmm, plane) == pytest.approx(0.29846, rel=1e-3)


def test_sup_is_mirror_symmetric(gmm):
    plane = Hyperplane.axis_aligned(2, offset=0.5)
    mirrored_plane = Hyperplane.axis_aligned(2, offset=-0.5)
    assert density.sup_on_boundary(gmm.mirrored(), mirrored_plane) == pytest.approx(
        density.sup_on_boundary(gmm, plane), rel=1e-9)


def test_sup_on_oblique_boundary_bounded_by_pdf_on_it(gmm):
    plane = Hyperplane.from_vector([1.0, 1.0], offset=0.3)
    y, value = density.boundary_argmax(gmm, plane)
    origin, basis = density.plane_frame(plane)
    point = origin + basis @ y
    assert float(point @ plane.normal_array) == pytest.approx(0.3, abs=1e-12)
    assert value == pytest.approx(density.pdf_eval(gmm, point), rel=1e-12)
    rng = np.random.default_rng(1)
    samples = origin + rng.uniform(-6, 6, size=(10_000, 1)) @ basis.T
    assert np.all(density.pdf_eval(gmm, samples) <= value * (1 + 1e-9))


@pytest.mark.parametrize("offset", [-1.0, 0.0, 2.0])
def test_sup_bounds_pdf_along_axis_boundary(gmm, offset):
    sup = density.sup_on_boundary(gmm, Hyperplane.axis_aligned(2, offset=offset))
    y = np.random.default_rng(2).uniform(-6, 6, size=10_000)
    points = np.column_stack([np.full_like(y, offset), y])
    assert np.all(density.pdf_eval(gmm, points) <= sup * (1 + 1e-9))


def test_square_integral_matches_closed_form(gmm, plane_x0):
    value = density.boundary_power_integral(gmm, plane_x0, 2)
    assert value == pytest.approx(line_square_integral(gmm, 0.0), rel=1e-6)
    assert value == pytest.approx(0.0159, rel=5e-3)


def test_power_integral_in_two_dimensional_boundary():
    model = GmmModel(dimension=3, components=[GmmComponent(mean=[0.0, 0.0, 0.0], variance=1.0, weight=1.0)])
    plane = Hyperplane.axis_aligned(3, axis=2, offset=0.0)
    assert density.sup_on_boundary(model, plane) == pytest.approx((2 * math.pi) ** -1.5, rel=1e-8)
    assert density.boundary_power_integral(model, plane, 2) == pytest.approx(1.0 / (8 * math.pi ** 2), rel=1e-5)


def test_high_power_integral_stays_finite_in_log_domain(gmm, plane_x0):
    log_value = density.log_boundary_power_integral(gmm, plane_x0, 201)
    sup = density.sup_on_boundary(gmm, plane_x0)
    assert math.isfinite(log_value)
    # (p/sup)^q <= 1 over a patch narrower than 20 units
    assert log_value < 201 * math.log(sup) + math.log(20.0)
    assert log_value > 201 * math.log(sup) + math.log(1e-3)


def test_power_integral_rejects_small_exponent(gmm, plane_x0):
    with pytest.raises(InvalidInputError):
        density.log_boundary_power_integral(gmm, plane_x0, 0.5)
