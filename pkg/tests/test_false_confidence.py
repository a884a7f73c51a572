import numpy as np
import pytest

from imfid.errors import BudgetExceededError, PreconditionError
from imfid.false_confidence import PRESETS, ball_hypothesis, fc_sweep, homomorphism_hypothesis, thm2_check
from imfid.hypothesis import Hypothesis
from imfid.models import GaussianLocation
from imfid.parallel import make_rng

ALPHAS = (0.01, 0.05, 0.1, 0.25, 0.5)
PLANE = GaussianLocation(sigma=1.0, n=1, dim=2)


def within_four_se(report, reps, m):
    for row in report.rows:
        se = np.sqrt(row.alpha * (1 - row.alpha) / reps)
        assert abs(row.estimate - row.alpha) <= 4 * se + 1.0 / m, row


class TestHypotheses:
    def test_half_plane_membership(self):
        a = homomorphism_hypothesis((1.0, 0.0), 0.0)
        assert a.contains(np.array([-1.0, 5.0]))
        assert not a.contains(np.array([0.1, -9.0]))

    def test_agrees_with_raw_predicate(self):
        a = homomorphism_hypothesis((1.0, -2.0), 0.5)
        points = make_rng(1).normal(0.0, 3.0, (1000, 2))
        raw = points[:, 0] - 2.0 * points[:, 1] <= 0.5
        assert np.array_equal(a.contains(points), raw)
        assert a.agrees_with_closed_form(points)

    def test_scalar_direction_gives_interval(self):
        a = homomorphism_hypothesis(-2.0, 1.0)
        assert a.intervals == ((-0.5, np.inf),)
        assert a.agrees_with_closed_form(np.linspace(-3, 3, 101))

    def test_zero_direction(self):
        with pytest.raises(PreconditionError):
            homomorphism_hypothesis((0.0, 0.0), 1.0)

    def test_circle_arc(self):
        a = homomorphism_hypothesis(1.0, 1.0, domain="circle")
        assert a.contains(0.5)
        assert not a.contains(2.0)
        with pytest.raises(PreconditionError):
            homomorphism_hypothesis(2.0, 1.0, domain="circle")

    def test_ball(self):
        a = ball_hypothesis((0.0, 0.0), 1.0)
        assert a.contains(np.array([0.999, 0.0]))
        assert not a.contains(np.array([0.8, 0.8]))
        assert ball_hypothesis(1.0, 0.5).intervals == ((0.5, 1.5),)


class TestSweep:
    def test_full_space_never_exceeds(self):
        report = fc_sweep(GaussianLocation(), Hypothesis.everything(), [0.0], ALPHAS, reps=200, m=1000, seed=1)
        assert all(r.estimate == 0.0 for r in report.rows)

    def test_theta_outside_hypothesis(self):
        a = ball_hypothesis((0.0, 0.0), 1.0)
        with pytest.raises(PreconditionError):
            fc_sweep(PLANE, a, [(2.0, 0.0)], ALPHAS, reps=10, m=1000, seed=1)

    def test_budget(self):
        a = ball_hypothesis((0.0, 0.0), 1.0)
        with pytest.raises(BudgetExceededError):
            fc_sweep(PLANE, a, [(0.0, 0.0)], ALPHAS, reps=10_000, m=10_000, seed=1, budget=1e6)

    def test_ball_counterexample(self):
        preset = PRESETS["ball-2d"]
        report = preset.run(seed=9, reps=4000, m=4000)
        row = report.row(0.1)
        assert row.flag
        assert row.estimate - row.alpha > 0.25
        assert row.estimate == pytest.approx(0.859, abs=0.03)

    def test_interior_ball_is_fine(self):
        report = PRESETS["ball-2d-interior"].run(seed=10, reps=2000, m=2000)
        assert not report.flagged

    def test_monotone_in_alpha(self):
        report = PRESETS["ball-2d"].run(seed=11, reps=500, m=2000)
        estimates = [r.estimate for r in report.rows]
        assert estimates == sorted(estimates)

    def test_report_schema(self):
        report = PRESETS["halfline-1d"].run(seed=12, reps=100, m=1000)
        frame = report.to_frame()
        assert list(frame.columns) == ["theta", "alpha", "exceedance", "stderr", "flag"]
        assert report.config["reps"] == 100

    def test_negative_seed_uses_the_masked_stream(self):
        a = ball_hypothesis((0.0, 0.0), 1.0)
        negative = fc_sweep(PLANE, a, [(0.5, 0.0)], ALPHAS, reps=100, m=1000, seed=-3)
        masked = fc_sweep(PLANE, a, [(0.5, 0.0)], ALPHAS, reps=100, m=1000, seed=2**64 - 3)
        assert [r.estimate for r in negative.rows] == [r.estimate for r in masked.rows]

    def test_thread_count_does_not_change_output(self):
        a = ball_hypothesis((0.0, 0.0), 1.0)
        one = fc_sweep(PLANE, a, [(0.5, 0.0)], ALPHAS, reps=200, m=1000, seed=13, threads=1)
        three = fc_sweep(PLANE, a, [(0.5, 0.0)], ALPHAS, reps=200, m=1000, seed=13, threads=3)
        assert [r.estimate for r in one.rows] == [r.estimate for r in three.rows]


class TestHomomorphismGuarantee:
    def test_half_plane_boundary_is_exact(self):
        a = homomorphism_hypothesis((1.0, 0.0), 0.0)
        report = thm2_check(PLANE, a, (0.0, 0.0), ALPHAS, reps=4000, m=4000, seed=21)
        assert not report.flagged
        within_four_se(report, 4000, 4000)

    def test_half_plane_interior_has_slack(self):
        a = homomorphism_hypothesis((1.0, 0.0), 0.0)
        report = thm2_check(PLANE, a, (-2.0, 0.0), ALPHAS, reps=2000, m=2000, seed=22)
        assert all(r.estimate < r.alpha for r in report.rows)

    def test_half_line_boundary(self):
        a = homomorphism_hypothesis(1.0, 0.7)
        report = thm2_check(GaussianLocation(sigma=2.0, n=3), a, 0.7, ALPHAS, reps=4000, m=4000, seed=23)
        assert not report.flagged
        within_four_se(report, 4000, 4000)

    def test_needs_homomorphism_form(self):
        with pytest.raises(PreconditionError):
            thm2_check(PLANE, ball_hypothesis((0.0, 0.0), 1.0), (0.0, 0.0), ALPHAS, reps=10, m=1000, seed=1)

    def test_theta_beyond_boundary(self):
        a = homomorphism_hypothesis((1.0, 0.0), 0.0)
        with pytest.raises(PreconditionError):
            thm2_check(PLANE, a, (0.5, 0.0), ALPHAS, reps=10, m=1000, seed=1)

    @pytest.mark.slow
    @pytest.mark.parametrize("preset", ["halfspace-2d", "halfline-1d"])
    def test_presets_full_size(self, preset):
        report = PRESETS[preset].run(seed=31, threads=4)
        assert not report.flagged
