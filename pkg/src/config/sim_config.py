from pathlib import Path
import os

from pydantic_settings import BaseSettings, SettingsConfigDict

# Base paths
BASE_DIR = Path(__file__).resolve().parent.parent.parent
LOG_DIR = BASE_DIR / "logs"
RESULTS_DIR = BASE_DIR / "results"
TEMPLATE_DIR = BASE_DIR / "src" / "crossbar" / "templates"


class SimSettings(BaseSettings):
    """Environment-overridable defaults (SNEAKPATH_* variables or a .env file)"""

    model_config = SettingsConfigDict(env_prefix="SNEAKPATH_", env_file=".env", extra="ignore")

    workers: int = os.cpu_count() or 1
    log_level: str = "WARNING"
    abs_tol: float = 1e-12
    rel_tol: float = 1e-9
    max_iter: int = 200


settings = SimSettings()

# Device law
DEFAULT_ALPHA = 3.0
DEFAULT_K_OFF = 1e-10
DEFAULT_K_ON = 3e-8
K_ON_RANGE = (1e-9, 1e-7)
SINH_ARG_LIMIT = 700.0

# Array wiring
DEFAULT_R_GROUND = 0.001
DEFAULT_R_LOAD = 0.001
MIN_SIZE = 1
MAX_SIZE = 128
V_DD_RANGE = (1.0, 3.0)

# Solver
G_MIN = 1e-15
MAX_HALVINGS = 30
SOURCE_STEPS = 10
KCL_REL_TOL = 1e-12

# Closed-form validity box
SIZE_BOUNDS = (4, 64)
K_ON_BOUNDS = K_ON_RANGE
V_DD_BOUNDS = V_DD_RANGE

# Sweep grid (K_on and V_dd axes follow the published sweep figure)
DEFAULT_SIZES = (4, 8, 16, 32, 64)
DEFAULT_K_ON_VALUES = (1e-9, 3e-8, 5e-8, 8e-8, 1e-7)
DEFAULT_V_DD_VALUES = (1.0, 1.5, 2.0, 2.5, 3.0)

# Diagonal midpoints, disjoint from the default grid
DEFAULT_HOLDOUT_POINTS = (
    (6, 1.55e-8, 1.25),
    (12, 4e-8, 1.75),
    (24, 6.5e-8, 2.25),
    (48, 9e-8, 2.75),
)

# Sensitivity endpoints
SENSITIVITY_ENDPOINTS = {
    "Vdd": (1.0, 3.0),
    "Kon": (1e-9, 1e-7),
    "Size": (4, 64),
}

CSV_SIGNIFICANT_DIGITS = 9
