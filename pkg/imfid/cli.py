"""imfid command line: possibility contours, fiducial draws and the calibration experiments.

Exit codes: 0 ok, 2 usage, 3 data/model error, 4 compute budget exceeded.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from imfid import __version__
from imfid.config import (
    COMPUTE_BUDGET,
    DEFAULT_ALPHA_GRID,
    DEFAULT_DRAWS,
    DEFAULT_GRID_STEP,
    DEFAULT_REPS,
    DEFAULT_THREADS,
    LOG_FORMAT,
    LOG_LEVEL,
    OUT_DIR,
)
from imfid.credal import maximality_check, possibility_to_probability
from imfid.errors import BudgetExceededError, DataFileError, ImfidError, PreconditionError
from imfid.false_confidence import PRESETS
from imfid.fiducial import credible_region, fiducial_density, fiducial_sample
from imfid.im_core import contour_grid, validity_check
from imfid.io import (
    DATA_DIR,
    plot_histogram,
    plot_lines,
    read_data,
    write_contour,
    write_draws,
    write_frame,
    write_sidecar,
)
from imfid.marginal import get_feature, marginal_contour, marginal_fiducial, marginal_maximality_gap
from imfid.models import MODEL_NAMES, TWO_PI, ModelDescriptor, build_model, decompose, sample_data
from imfid.parallel import replicate_seeds
from imfid.reproduce import reproduce

logger = logging.getLogger(__name__)

COMMANDS = ("contour", "fiducial", "maximality", "marginal", "validity", "falseconf", "reproduce")
STOCHASTIC = {"contour", "fiducial", "maximality", "marginal", "validity", "falseconf"}

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_BUDGET = 0, 2, 3, 4


# ── run configuration ───────────────────────────────────────────────


class SimulationSpec(BaseModel):
    n: int = Field(ge=1)
    theta: list[float]

    @classmethod
    def parse(cls, text: str) -> "SimulationSpec":
        """'n=5,theta=0.3' (vector theta as 'theta=0.1;0.2')."""
        fields = {}
        for part in text.split(","):
            key, sep, value = part.partition("=")
            if not sep:
                raise ValueError(f"expected key=value, got {part!r}")
            fields[key.strip()] = value.strip()
        theta = [float(v) for v in fields.get("theta", "0").split(";")]
        return cls(n=int(fields.get("n", "1")), theta=theta)


class GridSpec(BaseModel):
    start: float
    stop: float
    step: float = Field(gt=0)

    @classmethod
    def parse(cls, text: str) -> "GridSpec":
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must be start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        return cls(start=start, stop=stop, step=step)

    @model_validator(mode="after")
    def _ordered(self):
        if self.stop < self.start:
            raise ValueError("grid stop must be >= start")
        return self

    def points(self) -> np.ndarray:
        """start + i*step for every i with the point <= stop."""
        count = int(np.floor((self.stop - self.start) / self.step + 1e-9)) + 1
        return self.start + self.step * np.arange(count)


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    command: str
    model: str = "vonmises"
    sigma: float = Field(1.0, gt=0)
    kappa: float = Field(2.0, gt=0)
    dim: int = Field(1, ge=1)
    resultant: str = "total"
    n: int = Field(1, ge=1)
    data: Optional[Path] = None
    simulate: Optional[SimulationSpec] = None
    grid: Optional[GridSpec] = None
    draws: Optional[int] = Field(None, ge=1)
    reps: Optional[int] = Field(None, ge=1)
    seed: Optional[int] = None
    threads: int = Field(DEFAULT_THREADS, ge=1)
    out: Path = Path(OUT_DIR)
    svg: bool = False
    alpha_grid: tuple[float, ...] = DEFAULT_ALPHA_GRID
    feature: str = "cos"
    preset: str = "ball-2d"
    theta: Optional[list[float]] = None
    method: str = "mc"
    budget: float = Field(COMPUTE_BUDGET, gt=0)

    @field_validator("command")
    @classmethod
    def _known_command(cls, v):
        if v not in COMMANDS:
            raise ValueError(f"unknown command {v!r}")
        return v

    @field_validator("model")
    @classmethod
    def _known_model(cls, v):
        if v not in MODEL_NAMES:
            raise ValueError(f"model must be one of {MODEL_NAMES}")
        return v

    @field_validator("data")
    @classmethod
    def _data_exists(cls, v):
        if v is not None and not v.is_file():
            raise ValueError(f"data file not found: {v}")
        return v

    @field_validator("alpha_grid")
    @classmethod
    def _alphas_in_unit_interval(cls, v):
        if not v or any(not 0.0 < a < 1.0 for a in v):
            raise ValueError("alpha grid values must lie in (0, 1)")
        return tuple(sorted(v))

    @field_validator("preset")
    @classmethod
    def _known_preset(cls, v):
        if v not in PRESETS:
            raise ValueError(f"preset must be one of {sorted(PRESETS)}")
        return v

    @model_validator(mode="after")
    def _consistent(self):
        if self.command in STOCHASTIC and self.seed is None:
            if not (self.command == "contour" and self.method == "exact"):
                raise ValueError(f"--seed is required for {self.command}")
        if self.data is not None and self.simulate is not None:
            raise ValueError("--data and --simulate are mutually exclusive")
        if self.method not in ("mc", "exact"):
            raise ValueError("method must be 'mc' or 'exact'")
        return self

    @property
    def m(self) -> int:
        return self.draws or DEFAULT_DRAWS

    @property
    def replicates(self) -> int:
        return self.reps or DEFAULT_REPS


# ── shared plumbing ─────────────────────────────────────────────────


def _model(cfg: RunConfig, n: int) -> ModelDescriptor:
    return build_model(cfg.model, n=n, sigma=cfg.sigma, kappa=cfg.kappa, dim=cfg.dim, resultant=cfg.resultant)


def load_observations(cfg: RunConfig) -> tuple[np.ndarray, ModelDescriptor]:
    """Data from --data, --simulate, or the bundled roulette angles for the von Mises model."""
    if cfg.simulate is not None:
        model = _model(cfg, cfg.simulate.n)
        theta = cfg.simulate.theta[0] if model.param_shape == () else np.asarray(cfg.simulate.theta)
        # data stream kept apart from the pivot stream
        x = sample_data(model, theta, cfg.simulate.n, seed=replicate_seeds(cfg.seed, 1)[0])
        logger.info(f"🎲 Simulated n={cfg.simulate.n} observations at theta={cfg.simulate.theta}")
        return x, model

    if cfg.data is not None:
        x = read_data(cfg.data)
    elif cfg.model == "vonmises":
        x = read_data(DATA_DIR / "roulette.csv")
    else:
        raise DataFileError("no data: pass --data or --simulate")
    return x, _model(cfg, x.shape[0])


def theta_grid(cfg: RunConfig, model: ModelDescriptor, x) -> np.ndarray:
    """--grid when given, else the full circle or mle +- 8 fiducial standard deviations."""
    if model.param_shape != ():
        raise PreconditionError("parameter grids need a scalar parameter")
    if model.group_kind == "circle":
        grid = cfg.grid.points() if cfg.grid else np.arange(0.0, TWO_PI, DEFAULT_GRID_STEP)
        return grid[(grid >= 0.0) & (grid < TWO_PI)]
    if cfg.grid:
        return cfg.grid.points()
    g = float(decompose(model, x).g)
    k = int(np.ceil(8.0 * model.pivot_scale / DEFAULT_GRID_STEP))
    return g + DEFAULT_GRID_STEP * np.arange(-k, k + 1)


def _feature_grid(feature_name: str, grid: np.ndarray, circle: bool) -> np.ndarray:
    if feature_name == "identity":
        return np.append(grid, TWO_PI) if circle else grid
    return np.linspace(-1.0, 1.0, 2001)


# ── subcommands ─────────────────────────────────────────────────────


def cmd_contour(cfg: RunConfig) -> int:
    x, model = load_observations(cfg)
    grid = theta_grid(cfg, model, x)
    contour = contour_grid(model, x, grid, cfg.m, cfg.seed, cfg.method)
    write_contour(contour, cfg.out / "contour.csv")
    if cfg.svg:
        plot_lines(cfg.out / "contour.svg", [(contour.grid, contour.values, "possibility contour")],
                   "theta", "pi", title=model.name)
    print(f"peak {contour.values.max():.4f} at theta={contour.argmax:.4f} (mle {float(decompose(model, x).g):.4f})")
    return EXIT_OK


def cmd_fiducial(cfg: RunConfig) -> int:
    x, model = load_observations(cfg)
    sample = fiducial_sample(model, x, cfg.m, cfg.seed)
    write_draws(sample, cfg.out / "fiducial_draws.csv", meta={**model.describe(), **sample.as_dict()})
    if model.param_shape == ():
        lo, hi = credible_region(model, x, 0.05)
        print(f"95% highest-density interval: [{lo:.4f}, {hi:.4f}]")
        if cfg.svg:
            grid = theta_grid(cfg, model, x)
            plot_histogram(cfg.out / "fiducial_draws.svg", sample.draws, "theta",
                           overlay=(grid, fiducial_density(model, x, grid)), title="fiducial distribution")
    print(f"{sample.m} fiducial draws written")
    return EXIT_OK


def _contour_and_draws(cfg: RunConfig):
    x, model = load_observations(cfg)
    grid = theta_grid(cfg, model, x)
    contour = contour_grid(model, x, grid, cfg.m, cfg.seed, cfg.method)
    sample = fiducial_sample(model, x, cfg.m, cfg.seed)
    return model, contour, sample


def cmd_maximality(cfg: RunConfig) -> int:
    _, contour, sample = _contour_and_draws(cfg)
    result = maximality_check(contour, sample, cfg.alpha_grid)
    write_frame(result.curve.to_frame(), cfg.out / "calibration.csv")
    write_frame(possibility_to_probability(contour).to_frame(), cfg.out / "transform.csv")
    print(f"KS={result.ks:.5f} band={result.band:.5f} {result.verdict} {result.membership.verdict}")
    return EXIT_OK


def cmd_marginal(cfg: RunConfig) -> int:
    model, contour, sample = _contour_and_draws(cfg)
    feature = get_feature(cfg.feature)
    marginal = marginal_contour(contour, feature, _feature_grid(feature.name, contour.grid,
                                                                  model.group_kind == "circle"))
    pushed = marginal_fiducial(sample, feature)
    gap = marginal_maximality_gap(marginal, pushed, cfg.alpha_grid)

    write_contour(marginal, cfg.out / "marginal_contour.csv")
    write_draws(pushed, cfg.out / "marginal_draws.csv",
                meta={**model.describe(), **sample.as_dict(), "feature": feature.name})
    write_frame(gap.curve.to_frame(), cfg.out / "marginal_calibration.csv")
    if cfg.svg:
        plot_lines(cfg.out / "marginal_contour.svg", [(marginal.grid, marginal.values, "marginal contour")],
                   feature.name, "pi")
        plot_histogram(cfg.out / "marginal_draws.svg", pushed.draws, feature.name, title="marginal fiducial")
    print(
        f"IM peak at {marginal.argmax:.4f}, fiducial mode {pushed.mode:.4f}; "
        f"KS={gap.ks:.5f} band={gap.band:.5f} {gap.verdict} {gap.membership.verdict}"
    )
    return EXIT_OK


def cmd_validity(cfg: RunConfig) -> int:
    model = _model(cfg, cfg.n)
    theta = cfg.theta if cfg.theta is not None else np.zeros(model.param_shape).tolist()
    theta = theta[0] if model.param_shape == () else np.asarray(theta)
    report = validity_check(model, theta, cfg.alpha_grid, cfg.replicates, cfg.draws or 10_000,
                            cfg.seed, cfg.threads, cfg.method)
    write_frame(report.to_frame(), cfg.out / "validity.csv")
    write_sidecar(report.config, cfg.out / "validity.meta")
    print(f"{len(report.flagged)} flagged row(s)")
    return EXIT_OK


def cmd_falseconf(cfg: RunConfig) -> int:
    preset = PRESETS[cfg.preset]
    report = preset.run(cfg.seed, cfg.threads, reps=cfg.reps, m=cfg.draws, budget=cfg.budget)
    write_frame(report.to_frame(), cfg.out / "falseconf.csv")
    write_sidecar({**report.config, "preset": cfg.preset}, cfg.out / "falseconf.meta")
    for row in report.flagged:
        print(f"FLAG theta={row.theta} alpha={row.alpha:g} exceedance={row.estimate:.4f} ± {row.stderr:.4f}")
    print(f"{len(report.flagged)} flagged row(s)")
    return EXIT_OK


def cmd_reproduce(cfg: RunConfig) -> int:
    reproduce(cfg.out, draws=cfg.m, reps=cfg.replicates, threads=cfg.threads, svg=cfg.svg, budget=cfg.budget,
              resultant=cfg.resultant)
    return EXIT_OK


HANDLERS = {
    "contour": cmd_contour,
    "fiducial": cmd_fiducial,
    "maximality": cmd_maximality,
    "marginal": cmd_marginal,
    "validity": cmd_validity,
    "falseconf": cmd_falseconf,
    "reproduce": cmd_reproduce,
}


# ── argument parsing ────────────────────────────────────────────────


def _add_model_args(p: argparse.ArgumentParser):
    p.add_argument("--model", choices=MODEL_NAMES, default="vonmises")
    p.add_argument("--sigma", type=float, default=1.0, help="Gaussian scale")
    p.add_argument("--kappa", type=float, default=2.0, help="von Mises concentration")
    p.add_argument("--dim", type=int, default=1, help="Gaussian location dimension")
    p.add_argument("--resultant", choices=("total", "mean"), default="total",
                   help="von Mises conditional concentration: kappa*n*u (total) or the printed kappa*u (mean)")


def _add_data_args(p: argparse.ArgumentParser):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--data", type=Path, help="one-column CSV (angle_deg, angle_rad or x)")
    src.add_argument("--simulate", help="simulate data: n=5,theta=0.3")
    p.add_argument("--grid", help="parameter grid start:stop:step")
    p.add_argument("--method", choices=("mc", "exact"), default="mc", help="contour evaluation")


def _add_run_args(p: argparse.ArgumentParser):
    p.add_argument("--draws", type=int, help=f"Monte Carlo draws m (default {DEFAULT_DRAWS})")
    p.add_argument("--reps", type=int, help=f"replicates (default {DEFAULT_REPS})")
    p.add_argument("--seed", type=int, help="random seed (required for stochastic commands)")
    p.add_argument("--threads", type=int, default=DEFAULT_THREADS)
    p.add_argument("--out", type=Path, default=Path(OUT_DIR))
    p.add_argument("--svg", action="store_true", help="also write SVG plots")
    p.add_argument("--alpha-grid", help="comma-separated alpha values")
    p.add_argument("--budget", type=float, default=COMPUTE_BUDGET, help="max reps*m*len(thetas)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="imfid", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"imfid {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    helps = {
        "contour": "possibility contour over a parameter grid",
        "fiducial": "draws from the fiducial distribution",
        "maximality": "check fiducial draws against the contour's credal set",
        "marginal": "marginal contour and marginal fiducial for a feature",
        "validity": "frequency of pi_X(theta) <= alpha over simulated data",
        "falseconf": "false-confidence sweep for a preset hypothesis",
        "reproduce": "all experiments with fixed seeds",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        _add_model_args(p)
        _add_data_args(p)
        _add_run_args(p)
        if name == "marginal":
            p.add_argument("--feature", choices=("identity", "cos", "sin"), default="cos")
        if name == "validity":
            p.add_argument("--theta", help="true parameter, ';'-separated for vectors")
            p.add_argument("--n", type=int, default=1, help="sample size")
        if name == "falseconf":
            p.add_argument("--preset", choices=sorted(PRESETS), default="ball-2d")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    fields = {k: v for k, v in vars(args).items() if v is not None}
    if "simulate" in fields:
        fields["simulate"] = SimulationSpec.parse(fields["simulate"])
    if "grid" in fields:
        fields["grid"] = GridSpec.parse(fields["grid"])
    if "alpha_grid" in fields:
        fields["alpha_grid"] = tuple(float(a) for a in fields["alpha_grid"].split(","))
    if "theta" in fields:
        fields["theta"] = [float(t) for t in fields["theta"].split(";")]
    return RunConfig(**fields)


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT)
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        cfg = config_from_args(args)
    except (ValidationError, ValueError) as e:
        logger.error(f"❌ Invalid arguments: {e}")
        return EXIT_USAGE

    try:
        return HANDLERS[cfg.command](cfg)
    except BudgetExceededError as e:
        logger.error(f"⏱️ {e}")
        return EXIT_BUDGET
    except DataFileError as e:
        logger.error(f"❌ {e}")
        return EXIT_USAGE
    except (ImfidError, ValueError) as e:
        logger.error(f"❌ {e}")
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
