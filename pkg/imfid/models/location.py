"""Gaussian location model with known sigma: group (R^d, +)."""

from dataclasses import dataclass

import numpy as np
from scipy import stats

from imfid.models.base import ModelDescriptor, OrbitCoords


@dataclass(frozen=True)
class GaussianLocation(ModelDescriptor):
    """X_1..X_n iid N(theta, sigma^2 I_d).

    dim > 1 is the product of dim independent 1-D location models; the
    fiducial law is then N(x_bar, sigma^2/n I_d) coordinatewise.
    """

    sigma: float = 1.0
    n: int = 1
    dim: int = 1

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")

    @property
    def name(self) -> str:
        return "gaussian-location"

    @property
    def group_kind(self) -> str:
        return "additive"

    @property
    def param_shape(self) -> tuple:
        return () if self.dim == 1 else (self.dim,)

    @property
    def pivot_scale(self) -> float:
        return self.sigma / np.sqrt(self.n)

    def describe(self) -> dict:
        return {"model": self.name, "sigma": self.sigma, "n": self.n, "dim": self.dim}

    def identity(self):
        return np.zeros(self.param_shape)[()]

    def compose(self, a, b):
        return np.add(a, b)

    def invert(self, a):
        return np.negative(a)

    def difference(self, a, b):
        return np.subtract(a, b)

    def act(self, g, x):
        return np.asarray(x, dtype=float) + np.asarray(g, dtype=float)

    def decompose(self, x) -> OrbitCoords:
        x = np.asarray(x, dtype=float)
        g = x.mean(axis=0)[()]
        u = x - g
        return OrbitCoords(g=g, u=u, residuals=u)

    def recompose(self, coords: OrbitCoords):
        return coords.g + coords.residuals

    def orbit_summary(self, u) -> float:
        return float(np.sqrt(np.sum(np.square(u))))

    def _sq_norm(self, h):
        h = np.asarray(h, dtype=float)
        return np.square(h) if self.dim == 1 else np.sum(np.square(h), axis=-1)

    def log_density(self, x, theta) -> float:
        return float(np.sum(stats.norm.logpdf(np.asarray(x, dtype=float), loc=theta, scale=self.sigma)))

    def log_relative_likelihood(self, h, u):
        return -self.n * self._sq_norm(h) / (2.0 * self.sigma**2)

    def sample_data(self, theta, n: int, rng: np.random.Generator):
        return np.asarray(theta, dtype=float) + self.sigma * rng.standard_normal((n,) + self.param_shape)

    def sample_pivot(self, u, m: int, rng: np.random.Generator):
        # independent of u
        return self.pivot_scale * rng.standard_normal((m,) + self.param_shape)

    def pivot_tail(self, h, u):
        return stats.chi2.sf(self.n * self._sq_norm(h) / self.sigma**2, df=self.dim)

    def fiducial_distribution(self, coords: OrbitCoords):
        if self.dim == 1:
            return stats.norm(loc=float(coords.g), scale=self.pivot_scale)
        return stats.multivariate_normal(mean=coords.g, cov=self.pivot_scale**2 * np.eye(self.dim))

    def fiducial_log_density(self, theta, coords: OrbitCoords):
        return self.fiducial_distribution(coords).logpdf(theta)
