"""Numba availability switch.

Set ``QFEEDBACK_DISABLE_NUMBA=1`` in the environment to force the pure-numpy
kernels even when numba is importable. The flag is read once at import time.
"""
from __future__ import annotations

import os

ENV_FLAG = "QFEEDBACK_DISABLE_NUMBA"


def _flag_set() -> bool:
    return os.environ.get(ENV_FLAG, "").strip().lower() in {"1", "true", "yes", "on"}


try:
    import numba  # noqa: F401

    NUMBA_INSTALLED = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    NUMBA_INSTALLED = False

USE_NUMBA = NUMBA_INSTALLED and not _flag_set()
