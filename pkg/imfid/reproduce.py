"""Desk-scale reproduction of every experiment with fixed seeds.

Outputs are pure functions of (draws, reps, resultant); the worker count only
changes wall time.
"""

import logging
import time
from pathlib import Path

import numpy as np

from imfid.config import COMPUTE_BUDGET, DEFAULT_ALPHA_GRID, DEFAULT_GRID_STEP, DEFAULT_THREADS
from imfid.credal import maximality_check, possibility_to_probability
from imfid.false_confidence import PRESETS
from imfid.fiducial import fiducial_density, fiducial_sample
from imfid.im_core import contour_grid, validity_check
from imfid.io import (
    plot_histogram,
    plot_lines,
    read_roulette,
    write_contour,
    write_draws,
    write_frame,
    write_sidecar,
)
from imfid.marginal import FEATURES, marginal_contour, marginal_fiducial, marginal_maximality_gap
from imfid.models import TWO_PI, GaussianLocation, VonMisesRotation

logger = logging.getLogger(__name__)

SEEDS = {
    "roulette": 20_240_101,
    "validity_gaussian": 11,
    "validity_vonmises": 12,
    "falseconf_ball": 9,
    "falseconf_ball_interior": 10,
    "thm2_halfspace": 21,
    "thm2_halfline": 22,
}

# largest inner fiducial sample used by the nested sweeps
NESTED_DRAWS = 10_000

# result each artifact reproduces
REFERENCES = {
    "contour": "roulette possibility contour peaking at the mle 0.89",
    "fiducial": "roulette fiducial density proportional to exp{k cos(g - theta)}",
    "maximality": "fiducial distribution is a maximal member of the contour's credal set",
    "transform": "maximal probabilistic approximation of a unimodal contour",
    "marginal": "cos(theta) marginal: IM peak at cos 0.89 = 0.63, fiducial mode pushed toward 1",
    "marginal-gap": "marginal fiducial stays in the marginal credal set but need not be maximal",
    "validity": "validity: P{pi_X(theta) <= alpha} <= alpha",
    "false-confidence": "false confidence: P{Q_X(A) <= alpha} > alpha for some true A",
    "homomorphism": "no false confidence for hypotheses defined by a homomorphism",
}


class Manifest:
    """manifest.txt, one ``name: [reference] description`` line per file."""

    def __init__(self, out: Path):
        self.out = out
        self.entries: dict[str, tuple[str, str]] = {}

    def add(self, path: Path, description: str, reference: str):
        if reference not in REFERENCES:
            raise KeyError(f"unknown manifest reference {reference!r}")
        self.entries[Path(path).name] = (reference, description)
        meta = Path(path).with_suffix(".meta")
        if meta.exists():
            self.entries[meta.name] = (reference, f"run metadata for {Path(path).name}")

    def write(self) -> Path:
        path = self.out / "manifest.txt"
        lines = [f"{name}: [{REFERENCES[ref]}] {desc}\n" for name, (ref, desc) in sorted(self.entries.items())]
        path.write_text("".join(lines))
        return path


def _marginal_gap(out: Path, manifest: Manifest, name: str, contour, sample, model):
    cos = FEATURES["cos"]
    marginal = marginal_contour(contour, cos, np.linspace(-1.0, 1.0, 2001))
    pushed = marginal_fiducial(sample, cos)
    gap = marginal_maximality_gap(marginal, pushed, DEFAULT_ALPHA_GRID)
    manifest.add(write_frame(gap.curve.to_frame(), out / f"{name}_calibration.csv"),
                 f"marginal fiducial against the marginal contour, resultant={model.resultant} "
                 f"(KS={gap.ks:.4f}, band {gap.band:.4f}, {gap.verdict}, {gap.membership.verdict})",
                 "marginal-gap")
    return marginal, pushed


def _roulette(out: Path, manifest: Manifest, draws: int, svg: bool, resultant: str):
    x = read_roulette()
    model = VonMisesRotation(kappa=2.0, n=x.size, resultant=resultant)
    grid = np.arange(0.0, TWO_PI, DEFAULT_GRID_STEP)
    seed = SEEDS["roulette"]

    contour = contour_grid(model, x, grid, draws, seed)
    manifest.add(write_contour(contour, out / "roulette_contour.csv"),
                 f"possibility contour for the roulette mean direction (kappa=2, resultant={resultant})",
                 "contour")

    sample = fiducial_sample(model, x, draws, seed)
    manifest.add(write_draws(sample, out / "roulette_fiducial_draws.csv",
                             meta={**model.describe(), **sample.as_dict()}),
                 "fiducial draws for the roulette mean direction", "fiducial")

    result = maximality_check(contour, sample, DEFAULT_ALPHA_GRID)
    manifest.add(write_frame(result.curve.to_frame(), out / "roulette_calibration.csv"),
                 f"calibration of fiducial draws against the contour (KS={result.ks:.4f}, {result.verdict})",
                 "maximality")

    approx = possibility_to_probability(contour)
    manifest.add(write_frame(approx.to_frame(), out / "roulette_transform.csv"),
                 "CDF of the maximal probabilistic approximation of the contour", "transform")

    marginal, pushed = _marginal_gap(out, manifest, "roulette_marginal", contour, sample, model)
    manifest.add(write_contour(marginal, out / "roulette_marginal_contour.csv"),
                 f"marginal possibility contour for cos(theta), peak at {marginal.argmax:.4f}", "marginal")
    manifest.add(write_draws(pushed, out / "roulette_marginal_draws.csv",
                             meta={**model.describe(), **sample.as_dict(), "feature": "cos"}),
                 f"marginal fiducial draws of cos(theta), histogram mode {pushed.mode:.4f}", "marginal")

    if svg:
        manifest.add(plot_lines(out / "roulette_contour.svg", [(grid, contour.values, "contour")],
                                "theta", "pi"), "plot of the roulette contour", "contour")
        manifest.add(plot_histogram(out / "roulette_fiducial_draws.svg", sample.draws, "theta",
                                    overlay=(grid, fiducial_density(model, x, grid))),
                     "histogram of fiducial draws with the closed-form density", "fiducial")
        manifest.add(plot_lines(out / "roulette_marginal_contour.svg",
                                [(marginal.grid, marginal.values, "marginal contour")], "cos(theta)", "pi"),
                     "plot of the marginal contour for cos(theta)", "marginal")
        manifest.add(plot_histogram(out / "roulette_marginal_draws.svg", pushed.draws, "cos(theta)"),
                     "histogram of the marginal fiducial draws of cos(theta)", "marginal")


def _marginal_gap_companions(out: Path, manifest: Manifest, draws: int, resultant: str):
    """cos gap under the other roulette convention and for one observation, where both agree."""
    seed = SEEDS["roulette"]
    grid = np.arange(0.0, TWO_PI, DEFAULT_GRID_STEP)
    other = "mean" if resultant == "total" else "total"
    runs = {
        f"roulette_marginal_{other}": (read_roulette(), other),
        "single_marginal": (np.array([0.89]), resultant),
    }
    for name, (x, convention) in runs.items():
        model = VonMisesRotation(kappa=2.0, n=x.size, resultant=convention)
        contour = contour_grid(model, x, grid, draws, seed)
        sample = fiducial_sample(model, x, draws, seed)
        _marginal_gap(out, manifest, name, contour, sample, model)


def _validity(out: Path, manifest: Manifest, reps: int, m: int, threads: int, resultant: str):
    runs = {
        "validity_gaussian": (GaussianLocation(sigma=1.0, n=1), 0.0, "Gaussian location (sigma=1, n=1)"),
        "validity_vonmises": (VonMisesRotation(kappa=2.0, n=9, resultant=resultant), 0.89,
                              f"von Mises (kappa=2, n=9, resultant={resultant})"),
    }
    for name, (model, theta, label) in runs.items():
        report = validity_check(model, theta, DEFAULT_ALPHA_GRID, reps, m, SEEDS[name], threads)
        path = write_frame(report.to_frame(), out / f"{name}.csv")
        write_sidecar(report.config, out / f"{name}.meta")
        manifest.add(path, f"validity frequencies of pi_X(theta) <= alpha, {label}", "validity")


def _false_confidence(out: Path, manifest: Manifest, reps: int, m: int, threads: int, budget: float):
    runs = {
        "falseconf_ball": ("ball-2d", "false-confidence"),
        "falseconf_ball_interior": ("ball-2d-interior", "false-confidence"),
        "thm2_halfspace": ("halfspace-2d", "homomorphism"),
        "thm2_halfline": ("halfline-1d", "homomorphism"),
    }
    for name, (preset_name, reference) in runs.items():
        preset = PRESETS[preset_name]
        report = preset.run(SEEDS[name], threads, reps=reps, m=m, budget=budget)
        path = write_frame(report.to_frame(), out / f"{name}.csv")
        write_sidecar({**report.config, "preset": preset_name}, out / f"{name}.meta")
        manifest.add(path, f"false-confidence exceedances: {preset.description}", reference)


def reproduce(out, draws: int, reps: int, threads: int = DEFAULT_THREADS, svg: bool = False,
              budget: float = COMPUTE_BUDGET, resultant: str = "total") -> Path:
    """Run every experiment into out/ and write manifest.txt."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = Manifest(out)
    nested = min(draws, NESTED_DRAWS)
    start = time.perf_counter()

    _roulette(out, manifest, draws, svg, resultant)
    _marginal_gap_companions(out, manifest, draws, resultant)
    _validity(out, manifest, reps, nested, threads, resultant)
    _false_confidence(out, manifest, reps, nested, threads, budget)

    path = manifest.write()
    logger.info(f"📦 Reproduction finished in {time.perf_counter() - start:.1f}s: {len(manifest.entries)} files")
    return path
