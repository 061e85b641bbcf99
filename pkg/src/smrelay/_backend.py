"""Kernel backend selection: numba JIT by default, pure numpy as fallback.

Set SMRELAY_BACKEND=numpy to force the fallback, =numba to require the JIT
backend, or leave it unset (or =auto) to prefer numba when importable.
"""

from __future__ import annotations

import importlib
import logging
import os
from functools import lru_cache

LOGGER = logging.getLogger(__name__)

ENV_VAR = "SMRELAY_BACKEND"
BACKENDS = ("numba", "numpy")


@lru_cache(maxsize=None)
def load_kernels(name: str):
    """Import one kernel backend module by name ('numba' or 'numpy')."""
    if name not in BACKENDS:
        raise ValueError(f"unknown backend {name!r}; choose one of {BACKENDS}")
    return importlib.import_module(f"._kernels_{name}", package=__package__)


def backend_name() -> str:
    """Resolve the active backend from the environment."""
    choice = os.environ.get(ENV_VAR, "auto").strip().lower()
    if choice in ("", "auto"):
        try:
            import numba  # noqa: F401
        except ImportError:
            LOGGER.info("numba unavailable; using the numpy kernel backend")
            return "numpy"
        return "numba"
    if choice not in BACKENDS:
        raise ValueError(
            f"{ENV_VAR}={choice!r} not recognized; choose auto, numba, or numpy"
        )
    return choice


def get_kernels():
    """The kernel module selected by the environment (resolved per call)."""
    return load_kernels(backend_name())
