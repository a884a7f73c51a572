"""imfid configuration loaded from environment variables.

Every value here is only a default; CLI flags override them.
"""

import os
from dotenv import load_dotenv

load_dotenv()

# Monte Carlo sizes
DEFAULT_DRAWS = int(os.getenv("IMFID_DRAWS", "100000"))
DEFAULT_REPS = int(os.getenv("IMFID_REPS", "10000"))
DEFAULT_GRID_STEP = float(os.getenv("IMFID_GRID_STEP", "0.01"))

# Workers (output never depends on this)
DEFAULT_THREADS = int(os.getenv("IMFID_THREADS", "1"))

# Upper limit on reps * m * len(thetas) for nested sweeps
COMPUTE_BUDGET = int(float(os.getenv("IMFID_COMPUTE_BUDGET", "2e9")))

# Asymptotic KS coefficient: band = KS_BAND / sqrt(m) (1% level)
KS_BAND = float(os.getenv("IMFID_KS_BAND", "1.63"))

# Output
OUT_DIR = os.getenv("IMFID_OUT_DIR", "out")

# Logging
LOG_LEVEL = os.getenv("IMFID_LOG_LEVEL", "INFO")
LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"

# Orbit labels below this are treated as degenerate
DEGENERATE_U = 1e-12

# Default alpha grid for calibration / validity sweeps
DEFAULT_ALPHA_GRID = (0.01, 0.05, 0.1, 0.25, 0.5)
