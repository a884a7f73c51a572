"""Possibilistic inferential model: relative likelihood, contour, Π̄/Π̲, regions, validity.

The contour is always computed in its conditional form given the observed
orbit label u:

    pi_x(theta) = P{ f(H, u) <= f(theta^-1 ∘ g, u) | U = u },

with f the relative likelihood written in (h, u) coordinates and H drawn
from the model's conditional pivot law. Ties count as <=.
"""

import logging
from dataclasses import dataclass

import numpy as np

from imfid.config import DEFAULT_THREADS
from imfid.errors import EmptyHypothesisError, PreconditionError
from imfid.hypothesis import Hypothesis, split_arcs
from imfid.models import ModelDescriptor, OrbitCoords, decompose, wrap_angle
from imfid.models.base import TWO_PI
from imfid.parallel import make_rng, map_replicates
from imfid.report import Estimate, ExperimentReport, binomial_stderr, exceedance_rows

logger = logging.getLogger(__name__)

MIN_DRAWS = 1000
METHODS = ("mc", "exact")


@dataclass(frozen=True, eq=False)
class ContourMeta:
    model: str
    coords: OrbitCoords | None = None
    m: int | None = None
    seed: int | None = None
    method: str = "mc"
    feature: str | None = None

    def as_dict(self) -> dict:
        out = {"model": self.model, "m": self.m, "seed": self.seed, "method": self.method}
        if self.coords is not None:
            out["g"] = self.coords.g
            out["u"] = self.coords.u if np.ndim(self.coords.u) == 0 else float(np.linalg.norm(self.coords.u))
        if self.feature is not None:
            out["feature"] = self.feature
        return out


@dataclass(frozen=True, eq=False)
class Contour:
    """Tabulated possibility contour with linear (periodic on the circle) interpolation."""

    grid: np.ndarray
    values: np.ndarray
    domain: str = "additive"
    meta: ContourMeta | None = None

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.size == 0:
            raise PreconditionError("contour grid must be a nonempty 1-D array")
        if grid.shape != values.shape:
            raise PreconditionError(f"grid/values length mismatch: {grid.size} vs {values.size}")
        if np.any(np.diff(grid) <= 0):
            raise PreconditionError("contour grid must be strictly increasing")
        if np.any((values < 0) | (values > 1)):
            raise PreconditionError("contour values must lie in [0, 1]")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @property
    def step(self) -> float:
        return float(np.median(np.diff(self.grid))) if self.grid.size > 1 else 0.0

    @property
    def span(self) -> tuple[float, float]:
        if self.domain == "circle":
            return 0.0, TWO_PI
        return float(self.grid[0]), float(self.grid[-1])

    def in_span(self, theta) -> np.ndarray:
        if self.domain == "circle":
            return np.ones(np.shape(theta), dtype=bool)
        theta = np.asarray(theta, dtype=float)
        return (theta >= self.grid[0]) & (theta <= self.grid[-1])

    def evaluate(self, theta):
        """Interpolated contour; clamps to the end values outside a line grid."""
        if self.domain == "circle":
            return np.interp(wrap_angle(theta), self.grid, self.values, period=TWO_PI)
        return np.interp(theta, self.grid, self.values)

    @property
    def argmax(self) -> float:
        return float(self.grid[np.argmax(self.values)])

    @property
    def mode(self) -> float:
        """Observed orbit position when known (the exact maximiser), else grid argmax."""
        if self.meta is not None and self.meta.coords is not None and np.ndim(self.meta.coords.g) == 0:
            return float(self.meta.coords.g)
        return self.argmax


# ── relative likelihood and contour ────────────────────────────────


def relative_likelihood(model: ModelDescriptor, x, theta):
    """R(x, theta) = L_x(theta) / L_x(theta_hat), routed through (theta^-1 ∘ g, u)."""
    coords = decompose(model, x)
    model.check_element(theta)
    h = model.compose(model.invert(theta), coords.g)
    return np.exp(model.log_relative_likelihood(h, coords.u))


def _check_method(method: str, m: int):
    if method not in METHODS:
        raise PreconditionError(f"method must be one of {METHODS}, got {method!r}")
    if method == "mc" and m < MIN_DRAWS:
        raise PreconditionError(f"need at least {MIN_DRAWS} pivot draws, got {m}")


def conditional_contour(model: ModelDescriptor, coords: OrbitCoords, thetas, m: int,
                        rng: np.random.Generator | None, method: str = "mc") -> np.ndarray:
    """Contour values at thetas given observed (g, u); one pivot sample shared by all thetas."""
    thetas = np.asarray(thetas, dtype=float)
    h = model.compose(model.invert(thetas), coords.g)
    if method == "exact":
        return np.clip(np.asarray(model.pivot_tail(h, coords.u), dtype=float), 0.0, 1.0)

    pivots = model.sample_pivot(coords.u, m, rng)
    log_f_draws = np.sort(model.log_relative_likelihood(pivots, coords.u))
    log_f_obs = model.log_relative_likelihood(h, coords.u)
    # inclusive ties: count draws with log f(H) <= log f(h_obs)
    return np.searchsorted(log_f_draws, log_f_obs, side="right") / m


def contour_at(model: ModelDescriptor, x, theta, m: int, seed: int, method: str = "mc") -> Estimate:
    """Estimated pi_x(theta) with its binomial standard error (0 for method='exact')."""
    _check_method(method, m)
    model.check_element(theta)
    coords = decompose(model, x)
    rng = make_rng(seed) if method == "mc" else None
    value = float(conditional_contour(model, coords, np.asarray(theta)[None, ...], m, rng, method)[0])
    stderr = float(binomial_stderr(value, m)) if method == "mc" else 0.0
    return Estimate(value, stderr)


def contour_grid(model: ModelDescriptor, x, grid, m: int, seed: int, method: str = "mc") -> Contour:
    """Contour over a sorted scalar grid, sharing one pivot sample (common random numbers)."""
    _check_method(method, m)
    if model.param_shape != ():
        raise PreconditionError("contour grids need a scalar parameter")
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise PreconditionError("grid must be a nonempty 1-D array")
    if np.any(np.diff(grid) <= 0):
        raise PreconditionError("grid must be sorted and strictly increasing")

    coords = decompose(model, x)
    rng = make_rng(seed) if method == "mc" else None
    values = conditional_contour(model, coords, grid, m, rng, method)
    domain = "circle" if model.group_kind == "circle" else "additive"
    contour = Contour(
        grid=grid,
        values=values,
        domain=domain,
        meta=ContourMeta(model=model.name, coords=coords, m=m if method == "mc" else None,
                         seed=seed if method == "mc" else None, method=method),
    )
    logger.info(
        f"📈 Contour over {grid.size} points ({method}, m={m}): peak {contour.values.max():.4f} at {contour.argmax:.4f}"
    )
    return contour


# ── possibility / necessity ─────────────────────────────────────────


def _sup(contour: Contour, hypothesis: Hypothesis) -> float:
    """sup of the contour interpolant over A; 0 for an empty A."""
    if hypothesis.is_empty:
        return 0.0

    if hypothesis.intervals is not None:
        lo_span, hi_span = contour.span
        pieces = split_arcs(hypothesis.intervals) if contour.domain == "circle" else hypothesis.intervals
        best = None
        for lo, hi in pieces:
            a, b = max(lo, lo_span), min(hi, hi_span)
            if a > b:
                continue
            inside = contour.values[(contour.grid > a) & (contour.grid < b)]
            candidates = [float(contour.evaluate(a)), float(contour.evaluate(b))]
            if inside.size:
                candidates.append(float(inside.max()))
            best = max(candidates) if best is None else max(best, *candidates)
        if best is not None:
            return best
    else:
        mask = hypothesis.contains(contour.grid)
        if mask.any():
            return float(contour.values[mask].max())

    logger.warning(f"⚠️ Hypothesis {hypothesis.label!r} does not meet the grid span; upper probability taken as 0")
    return 0.0


def upper_prob(contour: Contour, hypothesis: Hypothesis) -> float:
    """Possibility Π̄_x(A) = sup_{theta in A} pi_x(theta)."""
    if hypothesis.is_empty:
        raise EmptyHypothesisError("upper probability of an empty hypothesis")
    return _sup(contour, hypothesis)


def lower_prob(contour: Contour, hypothesis: Hypothesis) -> float:
    """Necessity Π̲_x(A) = 1 - Π̄_x(A^c)."""
    if hypothesis.is_empty:
        raise EmptyHypothesisError("lower probability of an empty hypothesis")
    return 1.0 - _sup(contour, hypothesis.complement())


def _crossing(g0, v0, g1, v1, alpha) -> float:
    if v1 == v0:
        return float(g0)
    return float(g0 + (alpha - v0) / (v1 - v0) * (g1 - g0))


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    edges = np.diff(np.concatenate(([0], mask.astype(int), [0])))
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1) - 1
    return list(zip(starts, stops))


def plausibility_region(contour: Contour, alpha: float) -> list[tuple[float, float]]:
    """Maximal intervals where the interpolant is >= alpha.

    On the circle an arc crossing 0 is returned with lo > hi.
    """
    if not 0 < alpha < 1:
        raise PreconditionError(f"alpha must be in (0, 1), got {alpha}")
    grid, values = contour.grid, contour.values
    mask = values >= alpha
    if not mask.any():
        return []
    if mask.all():
        return [contour.span]

    if contour.domain != "circle":
        regions = []
        for i, j in _runs(mask):
            lo = grid[i] if i == 0 else _crossing(grid[i - 1], values[i - 1], grid[i], values[i], alpha)
            hi = grid[j] if j == grid.size - 1 else _crossing(grid[j], values[j], grid[j + 1], values[j + 1], alpha)
            regions.append((float(lo), float(hi)))
        return regions

    # circle: roll so the sequence ends on a point below alpha, unwrap, then scan
    first_out = int(np.flatnonzero(~mask)[0])
    order = (first_out + 1 + np.arange(grid.size)) % grid.size
    g = grid[order] + TWO_PI * (order <= first_out)
    v = values[order]
    m_roll = mask[order]
    regions = []
    for i, j in _runs(m_roll):
        g_prev, v_prev = (g[-1] - TWO_PI, v[-1]) if i == 0 else (g[i - 1], v[i - 1])
        lo = _crossing(g_prev, v_prev, g[i], v[i], alpha)
        hi = _crossing(g[j], v[j], g[j + 1], v[j + 1], alpha)
        regions.append((float(wrap_angle(lo)), float(wrap_angle(hi))))
    return regions


# ── validity ────────────────────────────────────────────────────────


def validity_check(model: ModelDescriptor, theta, alpha_grid, reps: int, m: int, seed: int,
                   threads: int = DEFAULT_THREADS, method: str = "mc") -> ExperimentReport:
    """Frequency of {pi_X(theta) <= alpha} over X ~ P_theta, for each alpha."""
    _check_method(method, m)
    model.check_element(theta)
    theta_arr = np.asarray(theta, dtype=float)

    def one(rng: np.random.Generator) -> float:
        x = model.sample_data(theta_arr, model.n, rng)
        coords = model.decompose(x)
        return float(conditional_contour(model, coords, theta_arr[None, ...], m, rng, method)[0])

    pis = np.asarray(map_replicates(one, seed, reps, threads))
    report = ExperimentReport(
        kind="validity",
        rows=tuple(exceedance_rows(theta_arr, pis, alpha_grid)),
        config={**model.describe(), "theta": theta_arr.tolist(), "reps": reps, "m": m,
                "seed": seed, "method": method},
    )
    logger.info(f"✅ Validity sweep at theta={theta_arr.tolist()}: {reps} reps, {len(report.flagged)} flag(s)")
    return report
