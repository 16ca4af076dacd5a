#!/usr/bin/env python3
"""Run from a source checkout: python qssim ... or python -m qssim ..."""

import os
import sys

if __name__ == "__main__":
    # Make the checkout importable when started as a script
    sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(os.path.realpath(__file__)), "..")))

    from qssim.main import main

    sys.exit(main())
