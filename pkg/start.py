"""Launcher: python start.py <command> [options]"""
import os
import sys

ROOT = os.path.dirname(os.path.abspath(__file__))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from satenq import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
