"""Group-invariant statistical models.

A model is a family p_theta on a sample space acted on by a group whose
elements are identified with the parameter values. Group elements are
numpy scalars/arrays of shape ``model.param_shape``; a batch of m elements
has shape ``(m,) + param_shape``.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np

from imfid.errors import InputShapeError

TWO_PI = 2.0 * np.pi


def wrap_angle(a):
    """Map angles into [0, 2pi)."""
    r = np.mod(a, TWO_PI)
    # np.mod can round tiny negatives up to exactly 2pi
    return np.where(r >= TWO_PI, 0.0, r)[()]


def wrap_signed(a):
    """Map angles into [-pi, pi)."""
    return (np.mod(np.asarray(a, dtype=float) + np.pi, TWO_PI) - np.pi)[()]


@dataclass(frozen=True, eq=False)
class OrbitCoords:
    """Position–orbit coordinates of a data vector.

    g is the position on the orbit (a group element), u the orbit label and
    residuals the within-orbit configuration needed to rebuild the data.
    """

    g: np.ndarray
    u: np.ndarray
    residuals: np.ndarray


class ModelDescriptor(ABC):
    """An invariant statistical model with its group structure and pivot law."""

    n: int

    # ── identity / group kind ─────────────────────────────────────

    @property
    @abstractmethod
    def name(self) -> str: ...

    @property
    @abstractmethod
    def group_kind(self) -> str:
        """'additive' (R^d under +) or 'circle' (SO(2) as angles)."""

    @property
    @abstractmethod
    def param_shape(self) -> tuple: ...

    def data_shape(self, n: int | None = None) -> tuple:
        return (self.n if n is None else n,) + self.param_shape

    def describe(self) -> dict:
        """Hyperparameters as a flat dict (used for sidecars and logs)."""
        return {"model": self.name, "n": self.n}

    # ── group operations ─────────────────────────────────────────

    @abstractmethod
    def identity(self): ...

    @abstractmethod
    def compose(self, a, b): ...

    @abstractmethod
    def invert(self, a): ...

    @abstractmethod
    def difference(self, a, b):
        """Signed representative of compose(invert(b), a); used for tolerances."""

    @abstractmethod
    def act(self, g, x): ...

    # ── orbit decomposition ─────────────────────────────────────

    @abstractmethod
    def decompose(self, x) -> OrbitCoords: ...

    @abstractmethod
    def recompose(self, coords: OrbitCoords): ...

    @abstractmethod
    def orbit_summary(self, u) -> float:
        """Scalar summary of an orbit label (for metadata and ancillarity checks)."""

    # ── likelihood and pivot law ─────────────────────────────────

    @abstractmethod
    def log_density(self, x, theta) -> float:
        """Joint log density of the data vector x under p_theta."""

    @abstractmethod
    def log_relative_likelihood(self, h, u):
        """log f(h, u) = log R(x, theta) expressed through h = theta^-1 ∘ g."""

    @abstractmethod
    def sample_data(self, theta, n: int, rng: np.random.Generator): ...

    @abstractmethod
    def sample_pivot(self, u, m: int, rng: np.random.Generator):
        """m draws of H = theta^-1 ∘ G from its conditional law given U = u."""

    def pivot_tail(self, h, u):
        """Closed-form P{f(H, u) <= f(h, u) | U = u}."""
        raise NotImplementedError(f"{self.name}: no closed-form pivot tail")

    # ── fiducial closed form ─────────────────────────────────────

    def fiducial_distribution(self, coords: OrbitCoords):
        """Frozen scipy distribution of the fiducial law Q_x."""
        raise NotImplementedError(f"{self.name}: no closed-form fiducial distribution")

    def fiducial_log_density(self, theta, coords: OrbitCoords):
        raise NotImplementedError(f"{self.name}: no closed-form fiducial density")

    # ── validation helpers ───────────────────────────────────────

    def check_data(self, x) -> np.ndarray:
        arr = np.asarray(x, dtype=float)
        if arr.shape != self.data_shape():
            raise InputShapeError(
                f"{self.name}: expected data of shape {self.data_shape()}, got {arr.shape}"
            )
        return arr

    def check_element(self, g) -> np.ndarray:
        arr = np.asarray(g, dtype=float)
        k = len(self.param_shape)
        if arr.ndim < k or arr.shape[arr.ndim - k:] != self.param_shape:
            raise InputShapeError(
                f"{self.name}: group element must have trailing shape {self.param_shape}, got {arr.shape}"
            )
        if not np.all(np.isfinite(arr)):
            raise InputShapeError(f"{self.name}: group element must be finite")
        return arr
