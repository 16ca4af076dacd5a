"""Version of the installed package; setup.py writes it to qssim/VERSION"""

import os

VERSION_FILE = os.path.join(os.path.dirname(__file__), "VERSION")


def string() -> str:
    try:
        with open(VERSION_FILE, "r", encoding="utf-8") as fh:
            version = fh.read().strip()
    except OSError:
        version = ""
    return version or "unknown (git checkout)"
