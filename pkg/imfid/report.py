"""Monte Carlo estimates and tabulated experiment reports."""

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

# CSV column layout per report kind
REPORT_SCHEMAS = {
    "validity": ["alpha", "frequency", "stderr", "flag"],
    "false_confidence": ["theta", "alpha", "exceedance", "stderr", "flag"],
}


def binomial_stderr(p, n: int):
    p = np.asarray(p, dtype=float)
    return np.sqrt(np.clip(p * (1.0 - p), 0.0, None) / n)[()]


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float

    @classmethod
    def from_indicator(cls, hits) -> "Estimate":
        hits = np.asarray(hits, dtype=bool)
        p = float(hits.mean())
        return cls(p, float(binomial_stderr(p, hits.size)))


@dataclass(frozen=True)
class ReportRow:
    theta: Any
    alpha: float
    estimate: float
    stderr: float
    flag: bool


def exceedance_rows(theta, statistic, alpha_grid) -> list[ReportRow]:
    """Rows of P_hat{statistic <= alpha}; flag when above alpha + 3 SE.

    The same replicate sample is reused for every alpha, so estimates are
    nondecreasing in alpha.
    """
    statistic = np.asarray(statistic, dtype=float)
    reps = statistic.size
    rows = []
    for alpha in alpha_grid:
        p = float(np.mean(statistic <= alpha))
        se = float(binomial_stderr(p, reps))
        rows.append(ReportRow(theta=theta, alpha=float(alpha), estimate=p, stderr=se, flag=p > alpha + 3.0 * se))
    return rows


def format_theta(theta) -> str:
    arr = np.atleast_1d(np.asarray(theta, dtype=float))
    return ";".join(f"{v:.17g}" for v in arr)


@dataclass(frozen=True, eq=False)
class ExperimentReport:
    kind: str
    rows: tuple[ReportRow, ...]
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in REPORT_SCHEMAS:
            raise ValueError(f"unknown report kind {self.kind!r}")
        flagged = self.flagged
        if flagged:
            logger.warning(
                f"🚩 {self.kind} report: {len(flagged)} flagged row(s) at alpha="
                f"{[r.alpha for r in flagged]}"
            )

    @property
    def flagged(self) -> list[ReportRow]:
        return [r for r in self.rows if r.flag]

    def row(self, alpha: float, theta=None) -> ReportRow:
        for r in self.rows:
            if np.isclose(r.alpha, alpha) and (theta is None or np.allclose(r.theta, theta)):
                return r
        raise KeyError(f"no row for alpha={alpha}, theta={theta}")

    def to_frame(self) -> pd.DataFrame:
        columns = REPORT_SCHEMAS[self.kind]
        records = []
        for r in self.rows:
            values = {
                "theta": format_theta(r.theta),
                "alpha": r.alpha,
                "frequency": r.estimate,
                "exceedance": r.estimate,
                "stderr": r.stderr,
                "flag": int(r.flag),
            }
            records.append({c: values[c] for c in columns})
        return pd.DataFrame.from_records(records, columns=columns)
