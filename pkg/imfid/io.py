"""Data ingestion and artifact writers (CSV, key=value sidecars, SVG plots)."""

import logging
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from imfid.errors import DataFileError  # noqa: E402

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).parent / "data"
ROULETTE_CSV = DATA_DIR / "roulette.csv"

FLOAT_FORMAT = "%.17g"

# fixed SVG ids and no timestamps: repeated runs give identical files
plt.rcParams["svg.hashsalt"] = "imfid"
plt.rcParams["svg.fonttype"] = "none"


def read_data(path) -> np.ndarray:
    """Read a one-column data file.

    A header ``angle_deg`` is converted to radians; ``angle_rad``, ``x`` or a
    bare column of numbers is taken as is.
    """
    path = Path(path)
    if not path.is_file():
        raise DataFileError(f"data file not found: {path}")
    try:
        frame = pd.read_csv(path)
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataFileError(f"cannot parse {path}: {e}") from e

    if frame.shape[1] != 1:
        raise DataFileError(f"{path}: expected one column, got {frame.shape[1]}")
    column = str(frame.columns[0]).strip()
    if column not in ("angle_deg", "angle_rad", "x"):
        # headerless file: the first value was read as the column name
        frame = pd.read_csv(path, header=None)
    values = pd.to_numeric(frame.iloc[:, 0], errors="coerce").to_numpy(dtype=float)
    if values.size == 0 or not np.all(np.isfinite(values)):
        raise DataFileError(f"{path}: data must be a nonempty column of finite numbers")
    if column == "angle_deg":
        values = np.deg2rad(values)
    logger.info(f"📂 Loaded {values.size} observations from {path.name}")
    return values


def read_roulette() -> np.ndarray:
    return read_data(ROULETTE_CSV)


def write_frame(frame: pd.DataFrame, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"💾 Wrote {path}")
    return path


def _format_value(value) -> str:
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    if isinstance(value, np.ndarray):
        return ";".join(f"{v:.17g}" for v in np.atleast_1d(value).astype(float))
    if isinstance(value, (list, tuple)):
        return ";".join(_format_value(v) for v in value)
    return str(value)


def write_sidecar(meta: dict, path) -> Path:
    """key=value text file, keys sorted."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [f"{k}={_format_value(v)}" for k, v in sorted(meta.items()) if v is not None]
    path.write_text("\n".join(lines) + "\n")
    return path


def write_contour(contour, path) -> Path:
    write_frame(pd.DataFrame({"theta": contour.grid, "pi": contour.values}), path)
    if contour.meta is not None:
        write_sidecar(contour.meta.as_dict(), Path(path).with_suffix(".meta"))
    return Path(path)


def write_draws(draws, path, meta: dict | None = None) -> Path:
    values = np.asarray(getattr(draws, "draws", draws), dtype=float)
    write_frame(pd.DataFrame({"draw": values}), path)
    if meta:
        write_sidecar(meta, Path(path).with_suffix(".meta"))
    return Path(path)


# ── plots ───────────────────────────────────────────────────────────


def _save_svg(fig, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"🖼️ Wrote {path}")
    return path


def plot_lines(path, series: list[tuple[np.ndarray, np.ndarray, str]], xlabel: str, ylabel: str,
               title: str = "") -> Path:
    """Line plot of (x, y, label) series."""
    fig, ax = plt.subplots(figsize=(6.4, 3.8))
    for x, y, label in series:
        ax.plot(x, y, label=label, linewidth=1.2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    if len(series) > 1:
        ax.legend()
    return _save_svg(fig, path)


def plot_histogram(path, values: np.ndarray, xlabel: str, overlay: tuple[np.ndarray, np.ndarray] | None = None,
                   title: str = "") -> Path:
    """Density histogram (Freedman–Diaconis bins), optionally with a density curve on top."""
    fig, ax = plt.subplots(figsize=(6.4, 3.8))
    ax.hist(values, bins="fd", density=True, alpha=0.6, color="tab:blue")
    if overlay is not None:
        ax.plot(overlay[0], overlay[1], color="tab:red", linewidth=1.2)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("density")
    if title:
        ax.set_title(title)
    return _save_svg(fig, path)
