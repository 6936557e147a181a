import argparse
import os
import sys

from sqlalchemy import inspect

# src/ lives one level up
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from src.config.db_config import DATABASE_URL
from src.database.models import init_db


def setup_database(database_url=None, reset=False):
    """Create the results schema and return the table names, or None on failure"""
    url = database_url or DATABASE_URL
    print(f"Preparing results store at {url}{' (reset)' if reset else ''}")
    try:
        engine = init_db(url, reset=reset)
        tables = sorted(inspect(engine).get_table_names())
        engine.dispose()
    except Exception as e:
        print(f"Could not prepare the results store: {str(e)}")
        return None
    print(f"Tables ready: {', '.join(tables)}")
    return tables


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Create the sneak-path results database")
    parser.add_argument("--url", default=None, help="SQLAlchemy URL (default: SNEAKPATH_DATABASE_URL or results/sneakpath.db)")
    parser.add_argument("--reset", action="store_true", help="drop existing tables first")
    args = parser.parse_args()
    sys.exit(0 if setup_database(args.url, args.reset) else 1)
