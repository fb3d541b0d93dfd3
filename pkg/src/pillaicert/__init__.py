"""Certified recomputation of the Pillai problem for Padovan and Lucas numbers."""

__version__ = "0.1.0"

from .certified import CertifiedReal, PrecisionError  # noqa: E402
from .field import FieldConstants, build_constants  # noqa: E402
from .sequences import lucas, padovan  # noqa: E402

__all__ = ["CertifiedReal", "PrecisionError", "FieldConstants", "build_constants", "lucas", "padovan", "__version__"]
