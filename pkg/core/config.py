"""
Configuration management for SymMatch.
Handles PyInstaller frozen builds and development mode.
"""
import os
import sys
from pathlib import Path
from dotenv import load_dotenv


def get_app_dir() -> Path:
    """
    Get the application directory.
    - For PyInstaller frozen builds: directory containing the executable
    - For development: project root directory
    """
    if getattr(sys, 'frozen', False):
        return Path(sys.executable).parent
    else:
        return Path(__file__).resolve().parent.parent


APP_DIR = get_app_dir()
ENV_PATH = APP_DIR / ".env"

VERSION = "1.0.0"

# Verbosity levels accepted by SYMMATCH_LOG
LOG_LEVELS = {"quiet": 0, "info": 1, "debug": 2}
DEFAULT_LOG_LEVEL = "info"

# Float comparisons in irrational twin-lattice mode
FLOAT_TOLERANCE = 1e-9

# Irrational-mode threshold grid: 0, step, 2*step, ..., ceiling
DEFAULT_GRID_STEP = 0.001
DEFAULT_GRID_CEILING = 1.0

# Window Hall probe enumerates all orbit subsets; beyond this it refuses
PROBE_MAX_ORBITS = 12

# Parallel workers for independent window / angle evaluations
MAX_WORKERS = 2

# selftest defaults
SELFTEST_SEED = 2016
SELFTEST_COUNT = 200

# Rows of the paradox classification table emitted by the CLI
DEFAULT_TABLE_RADIUS = 2


def load_config():
    """Load configuration from .env (if present) without overriding the environment."""
    if ENV_PATH.exists():
        load_dotenv(ENV_PATH, override=False)


def get_env(key: str, default=None):
    """Get environment variable with optional default."""
    return os.getenv(key, default)


def get_log_level() -> int:
    """Numeric verbosity from SYMMATCH_LOG; unknown values fall back to the default."""
    name = (get_env("SYMMATCH_LOG", DEFAULT_LOG_LEVEL) or DEFAULT_LOG_LEVEL).strip().lower()
    return LOG_LEVELS.get(name, LOG_LEVELS[DEFAULT_LOG_LEVEL])


def get_max_workers() -> int:
    """Worker count from SYMMATCH_WORKERS, falling back to MAX_WORKERS."""
    try:
        return max(1, int(get_env("SYMMATCH_WORKERS", MAX_WORKERS)))
    except (TypeError, ValueError):
        return MAX_WORKERS
