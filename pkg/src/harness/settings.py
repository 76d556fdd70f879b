import os

from dotenv import load_dotenv

load_dotenv()


def default_output_dir() -> str:
    return os.getenv("SATENQ_OUTPUT_DIR", "results")


def default_workers() -> int:
    return max(int(os.getenv("SATENQ_WORKERS", "1")), 1)


def log_level() -> str:
    return os.getenv("SATENQ_LOG_LEVEL", "INFO").upper()
