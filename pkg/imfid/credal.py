"""Credal-set membership, maximality and the maximal probabilistic approximation.

A probability P lies in the credal set of the possibility measure iff
P{pi(Y) <= alpha} <= alpha for every alpha; it is maximal when equality
holds, i.e. pi(Y) is Uniform(0, 1) under P.
"""

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import stats

from imfid.config import DEFAULT_ALPHA_GRID, KS_BAND
from imfid.errors import PreconditionError, UnsupportedShapeError
from imfid.im_core import Contour
from imfid.models import wrap_angle, wrap_signed
from imfid.parallel import make_rng
from imfid.report import binomial_stderr

logger = logging.getLogger(__name__)

MEMBER, NOT_MEMBER = "MEMBER", "NOT-MEMBER"
MAXIMAL, NOT_MAXIMAL = "MAXIMAL", "NOT-MAXIMAL"

# slack for monotonicity checks on tabulated contours
_SHAPE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CalibrationCurve:
    """F(alpha) = fraction of draws with pi(draw) <= alpha, with binomial SEs."""

    alpha_grid: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    m: int

    def violations(self) -> list[float]:
        excess = self.values > self.alpha_grid + 3.0 * self.stderr
        return [float(a) for a in self.alpha_grid[excess]]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"alpha": self.alpha_grid, "F": self.values, "stderr": self.stderr})


@dataclass(frozen=True, eq=False)
class MembershipResult:
    curve: CalibrationCurve
    verdict: str
    violations: list[float]

    @property
    def is_member(self) -> bool:
        return self.verdict == MEMBER


@dataclass(frozen=True, eq=False)
class MaximalityResult:
    curve: CalibrationCurve
    ks: float
    band: float
    verdict: str
    membership: MembershipResult

    @property
    def is_maximal(self) -> bool:
        return self.verdict == MAXIMAL


def _draw_values(draws) -> np.ndarray:
    values = getattr(draws, "draws", draws)
    values = np.asarray(values, dtype=float)
    if values.ndim != 1:
        raise PreconditionError(f"draws must be a 1-D sample, got shape {values.shape}")
    if values.size == 0:
        raise PreconditionError("draws are empty")
    return values


def plausibility_of_draws(contour: Contour, draws) -> np.ndarray:
    """pi evaluated at each draw; draws must lie inside the contour's grid span."""
    values = _draw_values(draws)
    inside = contour.in_span(values)
    if not inside.all():
        lo, hi = contour.span
        raise PreconditionError(
            f"{int((~inside).sum())} draw(s) fall outside the contour grid [{lo:.4g}, {hi:.4g}]"
        )
    return contour.evaluate(values)


def calibration_curve(pis, alpha_grid=DEFAULT_ALPHA_GRID) -> CalibrationCurve:
    pis = np.asarray(pis, dtype=float)
    alpha_grid = np.asarray(alpha_grid, dtype=float)
    m = pis.size
    sorted_pis = np.sort(pis)
    values = np.searchsorted(sorted_pis, alpha_grid, side="right") / m
    return CalibrationCurve(alpha_grid=alpha_grid, values=values, stderr=binomial_stderr(values, m), m=m)


def _membership(curve: CalibrationCurve) -> MembershipResult:
    bad = curve.violations()
    return MembershipResult(curve=curve, verdict=NOT_MEMBER if bad else MEMBER, violations=bad)


def membership_check(contour: Contour, draws, alpha_grid=DEFAULT_ALPHA_GRID) -> MembershipResult:
    """MEMBER iff F(alpha) <= alpha + 3 SE(alpha) at every alpha on the grid."""
    curve = calibration_curve(plausibility_of_draws(contour, draws), alpha_grid)
    result = _membership(curve)
    if result.is_member:
        logger.info(f"✅ Draws are in the credal set ({curve.m} draws)")
    else:
        logger.info(f"❌ Credal-set membership violated at alpha={result.violations}")
    return result


def maximality_check(contour: Contour, draws, alpha_grid=DEFAULT_ALPHA_GRID) -> MaximalityResult:
    """KS distance of {pi(draw_i)} from Uniform(0, 1) against the 1% asymptotic band.

    MAXIMAL requires the KS statistic inside the band and membership.
    """
    pis = plausibility_of_draws(contour, draws)
    curve = calibration_curve(pis, alpha_grid)
    membership = _membership(curve)
    ks = float(stats.kstest(pis, "uniform").statistic)
    band = KS_BAND / np.sqrt(pis.size)
    verdict = MAXIMAL if ks <= band and membership.is_member else NOT_MAXIMAL
    logger.info(f"📏 KS={ks:.5f} vs band {band:.5f} over {pis.size} draws: {verdict}")
    return MaximalityResult(curve=curve, ks=ks, band=float(band), verdict=verdict, membership=membership)


# ── maximal element from a unimodal contour ─────────────────────────


@dataclass(frozen=True, eq=False)
class MaximalApproximation:
    """CDF of a maximal credal-set member, tabulated on a chart of the parameter.

    On the line the chart is the contour grid. On the circle it is the grid
    cut at the antipode of the mode and unwrapped to mode + [-pi, pi), so
    ``theta`` may leave [0, 2pi); use ``wrapped_theta`` for group coordinates.
    """

    theta: np.ndarray
    cdf: np.ndarray
    density: np.ndarray
    mode: float
    side_split: float
    domain: str = "additive"

    @property
    def wrapped_theta(self) -> np.ndarray:
        return wrap_angle(self.theta) if self.domain == "circle" else self.theta

    def cdf_at(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.domain == "circle":
            theta = self.mode + wrap_signed(theta - self.mode)
        return np.interp(theta, self.theta, self.cdf, left=0.0, right=1.0)

    def sample(self, m: int, seed: int) -> np.ndarray:
        """Inverse-CDF sampling on the tabulated chart."""
        if m < 1:
            raise PreconditionError(f"m must be >= 1, got {m}")
        levels = make_rng(seed).random(m)
        # flat stretches of the CDF: keep the first chart point of each level
        cdf, first = np.unique(self.cdf, return_index=True)
        out = np.interp(levels, cdf, self.theta[first])
        return wrap_angle(out) if self.domain == "circle" else out

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"theta": self.theta, "cdf": self.cdf})


def _check_unimodal(chart: np.ndarray, values: np.ndarray, mode: float):
    left = values[chart < mode]
    right = values[chart >= mode]
    if np.any(np.diff(left) < -_SHAPE_TOL) or np.any(np.diff(right) > _SHAPE_TOL):
        raise UnsupportedShapeError("contour is not unimodal about its mode")


def possibility_to_probability(contour: Contour, side_split: float = 0.5) -> MaximalApproximation:
    """Maximal element with F = s*pi left of the mode and 1 - (1 - s)*pi right of it."""
    if not 0.0 < side_split < 1.0:
        raise PreconditionError(f"side_split must be in (0, 1), got {side_split}")

    mode = contour.mode
    if contour.domain == "circle":
        offsets = wrap_signed(contour.grid - mode)
        order = np.argsort(offsets, kind="stable")
        chart = mode + offsets[order]
        values = contour.values[order]
    else:
        chart, values = contour.grid, contour.values

    _check_unimodal(chart, values, mode)
    left = chart < mode
    cdf = np.where(left, side_split * values, 1.0 - (1.0 - side_split) * values)

    if contour.domain == "circle":
        # close the chart at the antipode so the CDF runs from ~0 to ~1
        anti = float(contour.evaluate(mode + np.pi))
        chart = np.concatenate(([mode - np.pi], chart, [mode + np.pi]))
        cdf = np.concatenate(([side_split * anti], cdf, [1.0 - (1.0 - side_split) * anti]))
        if chart[1] == chart[0]:
            chart, cdf = chart[1:], cdf[1:]

    density = np.clip(np.gradient(cdf, chart), 0.0, None)
    logger.info(f"🔁 Maximal approximation over {chart.size} chart points, mode {mode:.4f}")
    return MaximalApproximation(
        theta=chart, cdf=cdf, density=density, mode=mode, side_split=side_split, domain=contour.domain
    )
