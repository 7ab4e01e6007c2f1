"""Cohomology of line bundles on Moyal-quantized complex tori, in exact arithmetic."""

__version__ = "0.1.0"
