import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import stats

from imfid.credal import (
    MAXIMAL,
    MEMBER,
    NOT_MAXIMAL,
    NOT_MEMBER,
    calibration_curve,
    maximality_check,
    membership_check,
    possibility_to_probability,
)
from imfid.errors import PreconditionError, UnsupportedShapeError
from imfid.fiducial import fiducial_density, fiducial_sample
from imfid.im_core import Contour, contour_grid
from imfid.models import GaussianLocation, wrap_angle, wrap_signed
from imfid.parallel import make_rng

ALPHAS = (0.01, 0.05, 0.1, 0.25, 0.5)
WIDE_GRID = np.round(np.arange(-1200, 1201) * 0.01, 10)


@pytest.fixture
def standard_contour():
    return contour_grid(GaussianLocation(), np.array([0.0]), WIDE_GRID, 1000, seed=None, method="exact")


class TestCalibrationCurve:
    def test_nondecreasing_and_full_at_one(self):
        pis = make_rng(1).random(5000)
        curve = calibration_curve(pis, (0.1, 0.3, 0.3, 0.7, 1.0))
        assert np.all(np.diff(curve.values) >= 0)
        assert curve.values[-1] == 1.0
        assert list(curve.to_frame().columns) == ["alpha", "F", "stderr"]


class TestMembership:
    def test_point_mass_at_mle(self, standard_contour):
        result = membership_check(standard_contour, np.zeros(1000), ALPHAS)
        assert result.verdict == MEMBER
        assert np.all(result.curve.values == 0.0)

    def test_fiducial_draws_are_members(self):
        model = GaussianLocation(sigma=1.0, n=5)
        x = np.array([0.1, -0.3, 0.5, 0.2, -0.1])
        contour = contour_grid(model, x, WIDE_GRID, 100_000, seed=21)
        draws = fiducial_sample(model, x, 100_000, seed=22)
        assert membership_check(contour, draws, ALPHAS).is_member

    def test_overdispersed_draws_are_not(self, standard_contour):
        draws = make_rng(3).normal(0.0, 2.0, 20_000)
        result = membership_check(standard_contour, draws, ALPHAS)
        assert result.verdict == NOT_MEMBER
        assert 0.05 in result.violations

    def test_spread_factor_two_around_mode(self, roulette, roulette_model, circle_grid):
        contour = contour_grid(roulette_model, roulette, circle_grid, 100_000, seed=23)
        draws = fiducial_sample(roulette_model, roulette, 100_000, seed=23).draws
        g = roulette_model.decompose(roulette).g
        spread = wrap_angle(g + 2.0 * wrap_signed(draws - g))
        assert membership_check(contour, spread, ALPHAS).verdict == NOT_MEMBER

    def test_draws_outside_grid(self, standard_contour):
        with pytest.raises(PreconditionError):
            membership_check(standard_contour, np.array([0.0, 50.0]), ALPHAS)

    def test_empty_draws(self, standard_contour):
        with pytest.raises(PreconditionError):
            membership_check(standard_contour, np.array([]), ALPHAS)


class TestMaximality:
    @pytest.mark.parametrize("n", [1, 5])
    def test_gaussian_fiducial_is_maximal(self, n):
        model = GaussianLocation(sigma=1.0, n=n)
        x = np.linspace(-0.5, 0.5, n)
        contour = contour_grid(model, x, WIDE_GRID, 100_000, seed=31)
        draws = fiducial_sample(model, x, 100_000, seed=31)
        result = maximality_check(contour, draws, ALPHAS)
        assert result.ks <= 0.01
        assert result.verdict == MAXIMAL
        assert result.membership.is_member

    def test_independent_draws_within_tolerance(self, standard_contour):
        draws = fiducial_sample(GaussianLocation(), np.array([0.0]), 100_000, seed=32)
        assert maximality_check(standard_contour, draws, ALPHAS).ks <= 0.01

    def test_roulette_fiducial_is_maximal(self, roulette, roulette_model, circle_grid):
        contour = contour_grid(roulette_model, roulette, circle_grid, 100_000, seed=33)
        draws = fiducial_sample(roulette_model, roulette, 100_000, seed=33)
        result = maximality_check(contour, draws, ALPHAS)
        assert result.ks <= 0.01
        assert result.verdict == MAXIMAL

    def test_point_mass_fails_maximality_only(self, standard_contour):
        result = maximality_check(standard_contour, np.zeros(1000), ALPHAS)
        assert result.ks == pytest.approx(1.0)
        assert result.verdict == NOT_MAXIMAL
        assert result.membership.is_member

    def test_band(self, standard_contour):
        draws = fiducial_sample(GaussianLocation(), np.array([0.0]), 40_000, seed=34)
        result = maximality_check(standard_contour, draws, ALPHAS)
        assert result.band == pytest.approx(1.63 / 200)


class TestTransform:
    def test_gaussian_cdf(self, standard_contour):
        approx = possibility_to_probability(standard_contour)
        assert np.max(np.abs(approx.cdf - stats.norm.cdf(approx.theta))) < 1e-3
        assert list(approx.to_frame().columns) == ["theta", "cdf"]

    def test_gaussian_density(self, standard_contour):
        approx = possibility_to_probability(standard_contour)
        expected = fiducial_density(GaussianLocation(), np.array([0.0]), approx.theta)
        assert np.max(np.abs(approx.density - expected)) < 1e-2

    def test_vonmises_density(self, roulette, roulette_model, circle_grid):
        contour = contour_grid(roulette_model, roulette, circle_grid, 1000, seed=None, method="exact")
        approx = possibility_to_probability(contour)
        assert approx.theta[0] < approx.mode < approx.theta[-1]
        assert np.all((approx.wrapped_theta >= 0) & (approx.wrapped_theta < 2 * np.pi))
        assert np.all(np.diff(approx.cdf) >= 0)
        expected = fiducial_density(roulette_model, roulette, approx.theta)
        assert np.max(np.abs(approx.density - expected)) < 1e-2

    @pytest.mark.parametrize("side_split", [0.5, 0.3])
    def test_samples_are_maximal(self, standard_contour, side_split):
        approx = possibility_to_probability(standard_contour, side_split=side_split)
        draws = approx.sample(100_000, seed=41)
        assert maximality_check(standard_contour, draws, ALPHAS).ks <= 0.01

    def test_roulette_samples_are_maximal(self, roulette, roulette_model, circle_grid):
        contour = contour_grid(roulette_model, roulette, circle_grid, 100_000, seed=42)
        draws = possibility_to_probability(contour).sample(100_000, seed=43)
        assert maximality_check(contour, draws, ALPHAS).ks <= 0.01

    def test_cdf_at(self, standard_contour):
        approx = possibility_to_probability(standard_contour)
        assert_allclose(approx.cdf_at([-1.0, 0.0, 1.0]), stats.norm.cdf([-1.0, 0.0, 1.0]), atol=1e-3)

    def test_multimodal_rejected(self):
        contour = Contour(np.arange(5.0), np.array([0.2, 1.0, 0.3, 0.9, 0.1]))
        with pytest.raises(UnsupportedShapeError):
            possibility_to_probability(contour)

    def test_bad_side_split(self, standard_contour):
        with pytest.raises(PreconditionError):
            possibility_to_probability(standard_contour, side_split=1.0)
