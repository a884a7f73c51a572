"""Marginal inference for a scalar feature phi(theta).

The IM contour is marginalised by the extension principle (sup over the
preimage of each feature value); the fiducial distribution by pushing its
draws through phi. For non-monotone features the two need not agree.
"""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from imfid.config import DEFAULT_ALPHA_GRID, DEFAULT_THREADS
from imfid.credal import MaximalityResult, maximality_check
from imfid.errors import PreconditionError
from imfid.im_core import Contour, ContourMeta, conditional_contour
from imfid.models import TWO_PI, ModelDescriptor
from imfid.parallel import map_replicates
from imfid.report import ExperimentReport, exceedance_rows

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FeatureMap:
    name: str
    forward: Callable[[np.ndarray], np.ndarray]

    def __call__(self, theta):
        return self.forward(np.asarray(theta, dtype=float))

    def preimage(self, contour: Contour, phi0) -> list[np.ndarray]:
        """Parameter points mapped to each phi0 by the piecewise-linear feature on the grid.

        Returns one array per phi0 holding the segment crossings; where a
        value has no crossing (just past an extremum of the tabulated
        feature), the grid points within half the local feature spacing.
        """
        theta = contour.grid
        if contour.domain == "circle":
            theta = np.append(theta, theta[0] + TWO_PI)
        phi = self(theta)
        phi0 = np.atleast_1d(np.asarray(phi0, dtype=float))[:, None]

        lo_t, hi_t = theta[:-1], theta[1:]
        lo_p, hi_p = phi[:-1], phi[1:]
        dp = hi_p - lo_p
        straddle = (lo_p - phi0) * (hi_p - phi0) <= 0
        with np.errstate(divide="ignore", invalid="ignore"):
            frac = np.where(dp != 0, (phi0 - lo_p) / dp, 0.0)
        crossing = lo_t + np.clip(frac, 0.0, 1.0) * (hi_t - lo_t)

        spacing = np.abs(dp)
        half = 0.5 * np.maximum(np.append(spacing, 0.0), np.insert(spacing, 0, 0.0))
        touch = np.abs(phi - phi0) <= half

        return [
            crossing[k][straddle[k]] if straddle[k].any() else theta[touch[k]]
            for k in range(phi0.shape[0])
        ]


FEATURES = {
    "identity": FeatureMap("identity", lambda t: t),
    "cos": FeatureMap("cos", np.cos),
    "sin": FeatureMap("sin", np.sin),
}


def get_feature(name: str) -> FeatureMap:
    try:
        return FEATURES[name]
    except KeyError:
        raise PreconditionError(f"unknown feature {name!r}; expected one of {sorted(FEATURES)}") from None


def marginal_contour(contour: Contour, feature: FeatureMap, feature_grid) -> Contour:
    """pi_marg(phi0) = max of the contour over the preimage of phi0."""
    feature_grid = np.asarray(feature_grid, dtype=float)
    if feature_grid.ndim != 1 or feature_grid.size == 0:
        raise PreconditionError("feature grid must be a nonempty 1-D array")

    pieces = feature.preimage(contour, feature_grid)
    values = np.zeros(feature_grid.size)
    empty = 0
    for k, points in enumerate(pieces):
        if points.size:
            values[k] = float(np.max(contour.evaluate(points)))
        else:
            empty += 1
    if empty:
        logger.warning(f"⚠️ {empty} feature value(s) have an empty preimage on the grid; contour set to 0")

    meta = contour.meta
    return Contour(
        grid=feature_grid,
        values=np.clip(values, 0.0, 1.0),
        domain="additive",
        meta=ContourMeta(
            model=meta.model if meta else "",
            m=meta.m if meta else None,
            seed=meta.seed if meta else None,
            method=meta.method if meta else "mc",
            feature=feature.name,
        ),
    )


@dataclass(frozen=True, eq=False)
class FeatureDraws:
    """Pushforward sample {phi(theta_i)} with its Freedman–Diaconis histogram."""

    draws: np.ndarray
    feature: str
    counts: np.ndarray
    edges: np.ndarray

    @property
    def density(self) -> np.ndarray:
        return self.counts / (self.counts.sum() * np.diff(self.edges))

    @property
    def mode(self) -> float:
        k = int(np.argmax(self.counts))
        return float(0.5 * (self.edges[k] + self.edges[k + 1]))


def marginal_fiducial(draws, feature: FeatureMap) -> FeatureDraws:
    values = np.asarray(getattr(draws, "draws", draws), dtype=float)
    if values.size == 0:
        raise PreconditionError("draws are empty")
    pushed = np.asarray(feature(values), dtype=float)
    counts, edges = np.histogram(pushed, bins="fd")
    out = FeatureDraws(draws=pushed, feature=feature.name, counts=counts, edges=edges)
    logger.info(f"📊 Marginal fiducial for {feature.name}: {edges.size - 1} bins, mode {out.mode:.4f}")
    return out


def marginal_maximality_gap(marginal: Contour, feature_draws, alpha_grid=DEFAULT_ALPHA_GRID) -> MaximalityResult:
    """KS distance of {pi_marg(phi_i)} from Uniform(0, 1), plus the membership curve."""
    return maximality_check(marginal, getattr(feature_draws, "draws", feature_draws), alpha_grid)


def marginal_validity_check(model: ModelDescriptor, theta, feature: FeatureMap, grid, alpha_grid,
                            reps: int, m: int, seed: int, threads: int = DEFAULT_THREADS,
                            method: str = "mc") -> ExperimentReport:
    """Frequency of {pi_marg_X(phi(theta)) <= alpha} over X ~ P_theta."""
    grid = np.asarray(grid, dtype=float)
    domain = "circle" if model.group_kind == "circle" else "additive"
    phi_true = np.atleast_1d(feature(theta))

    def one(rng: np.random.Generator) -> float:
        x = model.sample_data(theta, model.n, rng)
        coords = model.decompose(x)
        values = conditional_contour(model, coords, grid, m, rng, method)
        points = feature.preimage(Contour(grid, values, domain), phi_true)[0]
        return float(np.max(np.interp(points, grid, values, period=TWO_PI if domain == "circle" else None)))

    pis = np.asarray(map_replicates(one, seed, reps, threads))
    return ExperimentReport(
        kind="validity",
        rows=tuple(exceedance_rows(theta, pis, alpha_grid)),
        config={**model.describe(), "feature": feature.name, "theta": float(theta), "reps": reps, "m": m,
                "seed": seed, "method": method},
    )
