import os
from pathlib import Path

from dotenv import load_dotenv

from src.config.sim_config import BASE_DIR, RESULTS_DIR

load_dotenv(BASE_DIR / ".env")

# Results store; any SQLAlchemy URL works, sqlite is the default
DATABASE_URL = os.environ.get("SNEAKPATH_DATABASE_URL", f"sqlite:///{RESULTS_DIR / 'sneakpath.db'}")


def ensure_sqlite_parent(url: str) -> str:
    """Create the directory of a file-backed sqlite URL"""
    prefix = "sqlite:///"
    if url.startswith(prefix) and url != prefix + ":memory:":
        Path(url[len(prefix):]).parent.mkdir(parents=True, exist_ok=True)
    return url
