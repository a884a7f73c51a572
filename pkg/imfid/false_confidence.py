"""False-confidence sweeps for fiducial probabilities of true hypotheses.

For theta in A, the exceedance P_theta{Q_X(A) <= alpha} is estimated by
nested Monte Carlo: an outer loop over datasets X ~ P_theta and, per
dataset, m fiducial draws. Homomorphism hypotheses {theta: c·theta <= k}
keep the exceedance at or below alpha.
"""

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np

from imfid.config import COMPUTE_BUDGET, DEFAULT_ALPHA_GRID, DEFAULT_THREADS
from imfid.errors import BudgetExceededError, PreconditionError
from imfid.hypothesis import Hypothesis
from imfid.models import TWO_PI, GaussianLocation, ModelDescriptor
from imfid.parallel import map_replicates, replicate_seeds
from imfid.report import ExperimentReport, exceedance_rows

logger = logging.getLogger(__name__)


def homomorphism_hypothesis(direction, k: float, domain: str = "additive") -> Hypothesis:
    """A = {theta: c·theta <= k}; on the circle, psi = identity and A is the arc [0, k]."""
    c = np.asarray(direction, dtype=float)
    if c.size == 0 or not np.any(c):
        raise PreconditionError("homomorphism direction must be nonzero")
    k = float(k)

    if domain == "circle":
        if c.ndim != 0 or c != 1.0:
            raise PreconditionError("on the circle only psi = identity (direction 1) is supported")
        if not 0.0 < k < TWO_PI:
            raise PreconditionError(f"arc bound must lie in (0, 2pi), got {k}")
        return Hypothesis.from_intervals(((0.0, k),), "circle", label=f"arc[0, {k:g}]")

    if c.ndim == 0:
        edge = k / float(c)
        intervals = ((-np.inf, edge),) if c > 0 else ((edge, np.inf),)
        return Hypothesis(
            predicate=lambda t: t * c <= k,
            intervals=intervals,
            direction=c,
            bound=k,
            label=f"{float(c):g}*theta <= {k:g}",
        )
    return Hypothesis(
        predicate=lambda t: t @ c <= k,
        direction=c,
        bound=k,
        label=f"{c.tolist()}·theta <= {k:g}",
    )


def ball_hypothesis(center, radius: float) -> Hypothesis:
    """A = {theta: ||theta - center|| <= radius}."""
    center = np.asarray(center, dtype=float)
    if not radius > 0:
        raise PreconditionError(f"radius must be > 0, got {radius}")
    label = f"ball({center.tolist()}, {radius:g})"
    if center.ndim == 0:
        c = float(center)
        return Hypothesis.from_intervals(((c - radius, c + radius),), label=label)
    return Hypothesis.from_predicate(
        lambda t: np.linalg.norm(t - center, axis=-1) <= radius, label=label
    )


def _check_budget(reps: int, m: int, n_theta: int, budget: float):
    work = reps * m * n_theta
    if work > budget:
        raise BudgetExceededError(f"reps*m*len(thetas) = {work:.3g} exceeds the compute budget {budget:.3g}")


def fc_sweep(model: ModelDescriptor, hypothesis: Hypothesis, theta_list, alpha_grid,
             reps: int, m: int, seed: int, threads: int = DEFAULT_THREADS,
             budget: float = COMPUTE_BUDGET) -> ExperimentReport:
    """Exceedance P_theta{Q_X(A) <= alpha} for each theta in theta_list and alpha in alpha_grid.

    One nested sample per theta is shared by every alpha.
    """
    thetas = [np.asarray(t, dtype=float) for t in theta_list]
    if not thetas:
        raise PreconditionError("theta_list is empty")
    for t in thetas:
        model.check_element(t)
        if not bool(hypothesis.contains(t)):
            raise PreconditionError(f"theta={t.tolist()} is not in {hypothesis.label!r}")
    _check_budget(reps, m, len(thetas), budget)

    children = replicate_seeds(seed, len(thetas))
    rows = []
    for theta, child in zip(thetas, children):

        def one(rng: np.random.Generator, theta=theta) -> float:
            x = model.sample_data(theta, model.n, rng)
            coords = model.decompose(x)
            draws = model.compose(coords.g, model.invert(model.sample_pivot(coords.u, m, rng)))
            return float(np.mean(hypothesis.contains(draws)))

        q = np.asarray(map_replicates(one, child, reps, threads))
        rows += exceedance_rows(theta.tolist() if theta.ndim else float(theta), q, alpha_grid)
        logger.info(f"🧪 theta={theta.tolist()}: median Q_X(A)={np.median(q):.4f} over {reps} reps")

    return ExperimentReport(
        kind="false_confidence",
        rows=tuple(rows),
        config={**model.describe(), "hypothesis": hypothesis.label, "reps": reps, "m": m, "seed": seed},
    )


def thm2_check(model: ModelDescriptor, hypothesis: Hypothesis, theta, alpha_grid,
               reps: int, m: int, seed: int, threads: int = DEFAULT_THREADS,
               budget: float = COMPUTE_BUDGET) -> ExperimentReport:
    """fc_sweep for a homomorphism hypothesis at a boundary or interior theta; expects no flags."""
    if hypothesis.direction is None and hypothesis.domain != "circle":
        raise PreconditionError(f"{hypothesis.label!r} is not of the form c·theta <= k")
    if hypothesis.domain == "circle" and hypothesis.intervals is None:
        raise PreconditionError(f"{hypothesis.label!r} is not an arc")
    if not bool(hypothesis.closed_form_contains(theta)):
        raise PreconditionError(f"theta={np.asarray(theta).tolist()} lies outside {hypothesis.label!r}")
    report = fc_sweep(model, hypothesis, [theta], alpha_grid, reps, m, seed, threads, budget)
    if report.flagged:
        logger.error(f"🚨 Homomorphism hypothesis {hypothesis.label!r} flagged; check the sampler")
    return report


# ── presets ─────────────────────────────────────────────────────────


@dataclass(frozen=True)
class FalseConfidencePreset:
    description: str
    model: ModelDescriptor
    hypothesis: Callable[[], Hypothesis]
    thetas: tuple
    homomorphism: bool = False
    alpha_grid: tuple = DEFAULT_ALPHA_GRID
    reps: int = 10_000
    m: int = 10_000

    def run(self, seed: int, threads: int = DEFAULT_THREADS, reps: int | None = None,
            m: int | None = None, budget: float = COMPUTE_BUDGET) -> ExperimentReport:
        reps = self.reps if reps is None else reps
        m = self.m if m is None else m
        hypothesis = self.hypothesis()
        if not self.homomorphism:
            return fc_sweep(self.model, hypothesis, self.thetas, self.alpha_grid, reps, m, seed, threads, budget)
        reports = [
            thm2_check(self.model, hypothesis, t, self.alpha_grid, reps, m, seed + i, threads, budget)
            for i, t in enumerate(self.thetas)
        ]
        return ExperimentReport(
            kind="false_confidence",
            rows=tuple(r for rep in reports for r in rep.rows),
            config={**reports[0].config, "seed": seed},
        )


PRESETS = {
    "ball-2d": FalseConfidencePreset(
        description="ball of radius 1 with theta just inside the boundary, sigma=2",
        model=GaussianLocation(sigma=2.0, n=1, dim=2),
        hypothesis=lambda: ball_hypothesis((0.0, 0.0), 1.0),
        thetas=((0.999, 0.0),),
    ),
    "ball-2d-interior": FalseConfidencePreset(
        description="ball of radius 3 with theta at its centre, sigma=1",
        model=GaussianLocation(sigma=1.0, n=1, dim=2),
        hypothesis=lambda: ball_hypothesis((0.0, 0.0), 3.0),
        thetas=((0.0, 0.0),),
    ),
    "halfspace-2d": FalseConfidencePreset(
        description="half-plane theta_1 <= 0 at the boundary and in the interior",
        model=GaussianLocation(sigma=1.0, n=1, dim=2),
        hypothesis=lambda: homomorphism_hypothesis((1.0, 0.0), 0.0),
        thetas=((0.0, 0.0), (-2.0, 0.0)),
        homomorphism=True,
    ),
    "halfline-1d": FalseConfidencePreset(
        description="half-line theta <= 0 at its boundary",
        model=GaussianLocation(sigma=1.0, n=1),
        hypothesis=lambda: homomorphism_hypothesis(1.0, 0.0),
        thetas=(0.0,),
        homomorphism=True,
    ),
}
