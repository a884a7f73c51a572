"""Invariant models and the seeded operations defined on them."""

import logging

import numpy as np

from imfid.errors import InputShapeError, PreconditionError
from imfid.models.base import TWO_PI, ModelDescriptor, OrbitCoords, wrap_angle, wrap_signed
from imfid.models.location import GaussianLocation
from imfid.models.vonmises import VonMisesRotation, pivot_conditioning_oracle
from imfid.parallel import make_rng

logger = logging.getLogger(__name__)

__all__ = [
    "TWO_PI",
    "GaussianLocation",
    "ModelDescriptor",
    "OrbitCoords",
    "VonMisesRotation",
    "act",
    "build_model",
    "decompose",
    "mle",
    "pivot_conditioning_oracle",
    "sample_data",
    "sample_pivot_given_u",
    "wrap_angle",
    "wrap_signed",
]

MODEL_NAMES = ("gaussian-location", "vonmises")


def build_model(name: str, *, n: int, sigma: float = 1.0, kappa: float = 2.0,
                dim: int = 1, resultant: str = "total") -> ModelDescriptor:
    """Model factory keyed by the CLI model id."""
    if name == "gaussian-location":
        return GaussianLocation(sigma=sigma, n=n, dim=dim)
    if name == "vonmises":
        return VonMisesRotation(kappa=kappa, n=n, resultant=resultant)
    raise ValueError(f"unknown model {name!r}; expected one of {MODEL_NAMES}")


def act(model: ModelDescriptor, g, x):
    """Apply group element g to the data vector x."""
    x = model.check_data(x)
    model.check_element(g)
    return model.act(g, x)


def decompose(model: ModelDescriptor, x) -> OrbitCoords:
    return model.decompose(model.check_data(x))


def mle(model: ModelDescriptor, x):
    """Maximum likelihood estimate; the equivariant position on the orbit for both models."""
    return decompose(model, x).g


def sample_data(model: ModelDescriptor, theta, n: int | None = None, seed: int | None = None):
    """n iid draws from p_theta, a deterministic function of (model, theta, n, seed)."""
    n = model.n if n is None else n
    if n < 1:
        raise PreconditionError(f"n must be >= 1, got {n}")
    model.check_element(theta)
    return model.sample_data(theta, n, make_rng(seed))


def sample_pivot_given_u(model: ModelDescriptor, u, m: int, seed: int):
    """m draws of H = theta^-1 ∘ G from its conditional law given U = u."""
    if m < 1:
        raise PreconditionError(f"m must be >= 1, got {m}")
    if np.ndim(u) and np.shape(u)[0] != model.n:
        raise InputShapeError(f"orbit label has length {np.shape(u)[0]}, model n={model.n}")
    return model.sample_pivot(u, m, make_rng(seed))
