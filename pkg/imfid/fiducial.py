"""Fiducial distribution Q_x for invariant models.

Draws are g ∘ H^-1 with H from the conditional pivot law given U = u. The
pivot stream is the one contour_grid uses for the same seed, so fiducial
draws and a contour built with the same seed share random numbers.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from imfid.config import DEFAULT_THREADS
from imfid.errors import PreconditionError
from imfid.hypothesis import Hypothesis
from imfid.models import ModelDescriptor, OrbitCoords, decompose, sample_pivot_given_u, wrap_angle, wrap_signed
from imfid.parallel import map_replicates
from imfid.report import Estimate

logger = logging.getLogger(__name__)

MIN_DRAWS = 1000
REGION_METHODS = ("hdr", "equal_tailed")


@dataclass(frozen=True, eq=False)
class FiducialDraws:
    draws: np.ndarray
    model: str
    coords: OrbitCoords
    m: int
    seed: int

    def __len__(self) -> int:
        return self.m

    def as_dict(self) -> dict:
        u = self.coords.u if np.ndim(self.coords.u) == 0 else float(np.linalg.norm(self.coords.u))
        return {"model": self.model, "g": self.coords.g, "u": u, "m": self.m, "seed": self.seed}


def fiducial_sample(model: ModelDescriptor, x, m: int, seed: int) -> FiducialDraws:
    """m draws from Q_x: compose(g, invert(H_i))."""
    coords = decompose(model, x)
    pivots = sample_pivot_given_u(model, coords.u, m, seed)
    draws = model.compose(coords.g, model.invert(pivots))
    logger.info(f"🎲 {m} fiducial draws for {model.name} around g={np.round(coords.g, 4)}")
    return FiducialDraws(draws=np.asarray(draws), model=model.name, coords=coords, m=m, seed=seed)


def fiducial_density(model: ModelDescriptor, x, theta):
    """Normalised closed-form fiducial density q_x(theta)."""
    coords = decompose(model, x)
    return np.exp(model.fiducial_log_density(theta, coords))


def fiducial_prob(model: ModelDescriptor, x, hypothesis: Hypothesis, m: int, seed: int) -> Estimate:
    """Q_x(A) by plain Monte Carlo, with binomial standard error."""
    if m < MIN_DRAWS:
        raise PreconditionError(f"need at least {MIN_DRAWS} fiducial draws, got {m}")
    sample = fiducial_sample(model, x, m, seed)
    return Estimate.from_indicator(hypothesis.contains(sample.draws))


def _hdr_interval(dist, alpha: float) -> tuple[float, float]:
    """Shortest interval of probability 1 - alpha for a unimodal 1-D law."""
    level = 1.0 - alpha

    def width(p):
        return dist.ppf(p + level) - dist.ppf(p)

    res = optimize.minimize_scalar(width, bounds=(0.0, alpha), method="bounded", options={"xatol": 1e-10})
    p = float(res.x)
    return float(dist.ppf(p)), float(dist.ppf(p + level))


def credible_region(model: ModelDescriptor, x, alpha: float, m: int | None = None,
                    seed: int | None = None, method: str = "hdr") -> tuple[float, float]:
    """Level-(1 - alpha) fiducial credible interval on the group coordinate.

    'hdr' uses the closed-form density; 'equal_tailed' uses m fiducial draws.
    On the circle an arc crossing 0 comes back with lo > hi.
    """
    if not 0 < alpha < 1:
        raise PreconditionError(f"alpha must be in (0, 1), got {alpha}")
    if model.param_shape != ():
        raise PreconditionError("credible intervals need a scalar parameter")
    if method not in REGION_METHODS:
        raise PreconditionError(f"method must be one of {REGION_METHODS}, got {method!r}")

    coords = decompose(model, x)
    circle = model.group_kind == "circle"

    if method == "hdr":
        lo, hi = _hdr_interval(model.fiducial_distribution(coords), alpha)
    else:
        if m is None or seed is None:
            raise PreconditionError("equal-tailed regions need m and seed")
        draws = fiducial_sample(model, x, m, seed).draws
        if circle:
            offsets = wrap_signed(draws - coords.g)
            lo, hi = coords.g + np.quantile(offsets, [alpha / 2.0, 1.0 - alpha / 2.0])
        else:
            lo, hi = np.quantile(draws, [alpha / 2.0, 1.0 - alpha / 2.0])

    if circle:
        return float(wrap_angle(lo)), float(wrap_angle(hi))
    return float(lo), float(hi)


def credible_coverage(model: ModelDescriptor, theta: float, alpha: float, reps: int, m: int,
                      seed: int, threads: int = DEFAULT_THREADS) -> Estimate:
    """Frequency of {theta <= upper (1 - alpha) fiducial quantile} over X ~ P_theta."""
    if model.param_shape != () or model.group_kind != "additive":
        raise PreconditionError("credible coverage is defined for scalar additive models")
    if m < MIN_DRAWS:
        raise PreconditionError(f"need at least {MIN_DRAWS} fiducial draws, got {m}")

    def one(rng: np.random.Generator) -> bool:
        x = model.sample_data(theta, model.n, rng)
        coords = model.decompose(x)
        draws = model.compose(coords.g, model.invert(model.sample_pivot(coords.u, m, rng)))
        return bool(theta <= np.quantile(draws, 1.0 - alpha))

    hits = map_replicates(one, seed, reps, threads)
    return Estimate.from_indicator(hits)
