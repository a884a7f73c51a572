import logging

import numpy as np
import pytest
from numpy.testing import assert_allclose

from imfid.errors import PreconditionError
from imfid.fiducial import fiducial_sample
from imfid.hypothesis import Hypothesis
from imfid.im_core import contour_grid, upper_prob
from imfid.marginal import (
    FEATURES,
    get_feature,
    marginal_contour,
    marginal_fiducial,
    marginal_maximality_gap,
    marginal_validity_check,
)
from imfid.models import TWO_PI, GaussianLocation, VonMisesRotation

COS = FEATURES["cos"]
IDENTITY = FEATURES["identity"]
FEATURE_GRID = np.linspace(-1.0, 1.0, 2001)
ALPHAS = (0.01, 0.05, 0.1, 0.25, 0.5)
LINE = np.round(np.arange(-800, 801) * 0.01, 10)


@pytest.fixture
def roulette_exact(roulette, roulette_model, circle_grid):
    return contour_grid(roulette_model, roulette, circle_grid, 1000, seed=None, method="exact")


class TestMarginalContour:
    def test_identity_reproduces_contour(self):
        contour = contour_grid(GaussianLocation(), np.array([0.3]), LINE, 1000, seed=None, method="exact")
        marginal = marginal_contour(contour, IDENTITY, contour.grid)
        assert_allclose(marginal.values, contour.values, atol=1e-12)
        assert marginal.meta.feature == "identity"

    def test_cos_peak(self, roulette_exact):
        marginal = marginal_contour(roulette_exact, COS, FEATURE_GRID)
        assert marginal.argmax == pytest.approx(0.63, abs=0.01)
        assert marginal.values.max() > 0.99

    @pytest.mark.parametrize("phi0", [-0.9, -0.5, 0.0, 0.3, 0.63, 0.9])
    def test_two_branch_preimage(self, roulette_exact, phi0):
        marginal = marginal_contour(roulette_exact, COS, np.array([phi0]))
        a = np.arccos(phi0)
        expected = max(roulette_exact.evaluate(a), roulette_exact.evaluate(TWO_PI - a))
        assert marginal.values[0] == pytest.approx(expected, abs=1e-3)

    def test_extension_principle_consistency(self, roulette_exact):
        phis = FEATURE_GRID[::50]
        marginal = marginal_contour(roulette_exact, COS, phis)
        for phi0, value, points in zip(phis, marginal.values, COS.preimage(roulette_exact, phis)):
            preimage = Hypothesis.from_intervals([(p, p) for p in points], domain="circle")
            assert value == pytest.approx(upper_prob(roulette_exact, preimage), abs=1e-12)

    def test_empty_preimage_warns(self, roulette_exact, caplog):
        with caplog.at_level(logging.WARNING):
            marginal = marginal_contour(roulette_exact, COS, np.array([0.0, 1.5]))
        assert marginal.values[1] == 0.0
        assert "empty preimage" in caplog.text

    def test_unknown_feature(self):
        with pytest.raises(PreconditionError):
            get_feature("tan")


class TestMarginalFiducial:
    def test_identity_keeps_draws(self, roulette, roulette_model):
        sample = fiducial_sample(roulette_model, roulette, 2000, seed=1)
        assert np.array_equal(marginal_fiducial(sample, IDENTITY).draws, sample.draws)

    @pytest.mark.parametrize("resultant", ["total", "mean"])
    def test_cos_mode_pushed_to_boundary(self, roulette, resultant):
        model = VonMisesRotation(kappa=2.0, n=roulette.size, resultant=resultant)
        sample = fiducial_sample(model, roulette, 1_000_000, seed=2)
        pushed = marginal_fiducial(sample, COS)
        assert np.all((pushed.draws >= -1.0) & (pushed.draws <= 1.0))
        assert pushed.mode > 0.63
        assert pushed.density.sum() * np.diff(pushed.edges)[0] == pytest.approx(1.0)

    def test_empty(self):
        with pytest.raises(PreconditionError):
            marginal_fiducial(np.array([]), COS)


class TestMaximalityGap:
    def test_identity_preserves_maximality(self):
        model = GaussianLocation(sigma=1.0, n=2)
        x = np.array([0.2, -0.6])
        contour = contour_grid(model, x, LINE, 100_000, seed=3)
        sample = fiducial_sample(model, x, 100_000, seed=3)
        marginal = marginal_contour(contour, IDENTITY, contour.grid)
        gap = marginal_maximality_gap(marginal, marginal_fiducial(sample, IDENTITY), ALPHAS)
        assert gap.ks <= 0.01

    def test_monotone_feature_preserves_maximality(self):
        model = GaussianLocation(sigma=1.0, n=16)
        x = np.zeros(16)
        grid = np.round(np.arange(-300, 301) * 0.005, 10)
        contour = contour_grid(model, x, grid, 100_000, seed=4)
        sample = fiducial_sample(model, x, 100_000, seed=4)
        # sin is strictly increasing on [-1.5, 1.5]
        assert np.all(np.abs(sample.draws) < 1.5)
        sin = FEATURES["sin"]
        marginal = marginal_contour(contour, sin, np.linspace(np.sin(-1.5), np.sin(1.5), 3001))
        gap = marginal_maximality_gap(marginal, marginal_fiducial(sample, sin), ALPHAS)
        assert gap.ks <= 0.01

    def test_cos_on_roulette_printed_form_is_not_maximal_but_member(self, roulette, circle_grid):
        model = VonMisesRotation(kappa=2.0, n=roulette.size, resultant="mean")
        contour = contour_grid(model, roulette, circle_grid, 100_000, seed=5)
        sample = fiducial_sample(model, roulette, 100_000, seed=5)
        marginal = marginal_contour(contour, COS, FEATURE_GRID)
        gap = marginal_maximality_gap(marginal, marginal_fiducial(sample, COS), ALPHAS)
        assert gap.ks > gap.band
        assert not gap.is_maximal
        assert gap.membership.is_member

    def test_cos_on_single_angle_is_not_maximal_but_member(self, circle_grid):
        # n = 1 gives u = 1, where both resultant conventions coincide
        model = VonMisesRotation(kappa=2.0, n=1)
        x = np.array([0.89])
        contour = contour_grid(model, x, circle_grid, 100_000, seed=8)
        sample = fiducial_sample(model, x, 100_000, seed=8)
        marginal = marginal_contour(contour, COS, FEATURE_GRID)
        gap = marginal_maximality_gap(marginal, marginal_fiducial(sample, COS), ALPHAS)
        assert gap.ks > 0.05
        assert not gap.is_maximal
        assert gap.membership.is_member


class TestValidityTransfer:
    def test_cos_feature(self):
        model = VonMisesRotation(kappa=2.0, n=9)
        grid = np.arange(0.0, TWO_PI, 0.05)
        report = marginal_validity_check(model, 0.89, COS, grid, (0.05, 0.1), reps=1000, m=1000, seed=6,
                                         method="exact")
        assert not report.flagged

    @pytest.mark.slow
    def test_cos_feature_full(self):
        model = VonMisesRotation(kappa=2.0, n=9)
        grid = np.arange(0.0, TWO_PI, 0.02)
        report = marginal_validity_check(model, 0.89, COS, grid, (0.05, 0.1), reps=10_000, m=2000, seed=7,
                                         threads=4)
        assert not report.flagged
