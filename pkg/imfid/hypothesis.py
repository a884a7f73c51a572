"""Hypotheses A ⊆ T about the parameter.

A hypothesis always carries a vectorised predicate. It may also carry a
closed form: a union of intervals on the group coordinate (arcs on the
circle, where lo > hi means the arc crosses 0) and/or a homomorphism form
{theta: c·theta <= k}.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

from imfid.models.base import TWO_PI, wrap_angle

Interval = tuple[float, float]

DOMAINS = ("additive", "circle")


def _interval_mask(theta, intervals, domain: str):
    theta = np.asarray(theta, dtype=float)
    if domain == "circle":
        theta = wrap_angle(theta)
    mask = np.zeros(theta.shape, dtype=bool)
    for lo, hi in intervals:
        if domain == "circle" and lo > hi:
            mask |= (theta >= lo) | (theta <= hi)
        else:
            mask |= (theta >= lo) & (theta <= hi)
    return mask


def _merge(pieces: list[Interval]) -> list[Interval]:
    merged: list[list[float]] = []
    for lo, hi in sorted(pieces):
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return [(a, b) for a, b in merged]


def split_arcs(intervals) -> list[Interval]:
    """Arcs as non-wrapping pieces inside [0, 2pi]."""
    pieces = []
    for lo, hi in intervals:
        if lo > hi:
            pieces += [(lo, TWO_PI), (0.0, hi)]
        else:
            pieces.append((lo, hi))
    return pieces


def _complement_intervals(intervals, domain: str) -> tuple[Interval, ...]:
    if domain == "circle":
        start, stop = 0.0, TWO_PI
        merged = _merge(split_arcs(intervals))
    else:
        start, stop = -np.inf, np.inf
        merged = _merge(list(intervals))

    gaps = []
    cursor = start
    for lo, hi in merged:
        if lo > cursor:
            gaps.append((cursor, lo))
        cursor = max(cursor, hi)
    if cursor < stop:
        gaps.append((cursor, stop))
    return tuple(gaps)


@dataclass(frozen=True, eq=False)
class Hypothesis:
    predicate: Callable[[np.ndarray], np.ndarray]
    domain: str = "additive"
    intervals: tuple[Interval, ...] | None = None
    direction: np.ndarray | None = None
    bound: float | None = None
    label: str = ""

    def __post_init__(self):
        if self.domain not in DOMAINS:
            raise ValueError(f"domain must be one of {DOMAINS}, got {self.domain!r}")

    # ── constructors ─────────────────────────────────────────────

    @classmethod
    def from_intervals(cls, intervals, domain: str = "additive", label: str = "") -> "Hypothesis":
        intervals = tuple((float(lo), float(hi)) for lo, hi in intervals)
        return cls(
            predicate=lambda t: _interval_mask(t, intervals, domain),
            domain=domain,
            intervals=intervals,
            label=label or f"intervals{list(intervals)}",
        )

    @classmethod
    def from_predicate(cls, predicate, domain: str = "additive", label: str = "") -> "Hypothesis":
        return cls(predicate=predicate, domain=domain, label=label or "predicate")

    @classmethod
    def everything(cls, domain: str = "additive") -> "Hypothesis":
        full = ((0.0, TWO_PI),) if domain == "circle" else ((-np.inf, np.inf),)
        return cls.from_intervals(full, domain, label="everything")

    @classmethod
    def empty(cls, domain: str = "additive") -> "Hypothesis":
        return cls.from_intervals((), domain, label="empty")

    # ── membership ───────────────────────────────────────────────

    @property
    def is_empty(self) -> bool:
        return self.intervals is not None and len(self.intervals) == 0

    def contains(self, theta) -> np.ndarray:
        return np.asarray(self.predicate(np.asarray(theta, dtype=float)), dtype=bool)

    def closed_form_contains(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        if self.direction is not None:
            if self.direction.ndim == 0:
                return np.asarray(theta * self.direction <= self.bound)
            return np.asarray(theta @ self.direction <= self.bound)
        if self.intervals is not None:
            return _interval_mask(theta, self.intervals, self.domain)
        raise ValueError(f"hypothesis {self.label!r} has no closed form")

    def agrees_with_closed_form(self, points) -> bool:
        """Predicate and closed form give the same verdict on every point."""
        return bool(np.array_equal(self.contains(points), self.closed_form_contains(points)))

    # ── algebra ──────────────────────────────────────────────────

    def complement(self) -> "Hypothesis":
        if self.intervals is not None:
            return Hypothesis.from_intervals(
                _complement_intervals(self.intervals, self.domain), self.domain, label=f"not {self.label}"
            )
        pred = self.predicate
        return Hypothesis.from_predicate(lambda t: ~np.asarray(pred(t), dtype=bool), self.domain, f"not {self.label}")

    def union(self, other: "Hypothesis") -> "Hypothesis":
        label = f"{self.label} or {other.label}"
        if self.intervals is not None and other.intervals is not None:
            return Hypothesis.from_intervals(self.intervals + other.intervals, self.domain, label)
        a, b = self.predicate, other.predicate
        return Hypothesis.from_predicate(
            lambda t: np.asarray(a(t), dtype=bool) | np.asarray(b(t), dtype=bool), self.domain, label
        )
