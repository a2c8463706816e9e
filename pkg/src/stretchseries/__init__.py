"""High-precision series analysis for algebraic and stretched-exponential coefficient growth."""

from .seriescore import ExactSeries, PrecisionConfig, RealSequence, SeriesError

__version__ = "0.1.0"

__all__ = ["ExactSeries", "PrecisionConfig", "RealSequence", "SeriesError", "__version__"]
