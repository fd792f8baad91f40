"""Kernel selection: compiled extension when available, numpy otherwise."""

try:
    from .quadcore import quad_heat_kato

    HAVE_COMPILED = True
except ImportError:  # extension not built on this install
    from .quadcore_py import quad_heat_kato

    HAVE_COMPILED = False

from . import quadcore_py

__all__ = ["quad_heat_kato", "quadcore_py", "HAVE_COMPILED"]
