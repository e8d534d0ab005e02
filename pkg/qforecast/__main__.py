"""
Entry point for ``python -m qforecast``.

:author:  qforecast developers
:version: October 17, 2026
"""
import sys

from .cli import main

sys.exit(main())
