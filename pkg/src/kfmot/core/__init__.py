"""Core error types and logging bootstrap."""

from .exceptions import (
    ConfigurationError,
    DataValidationError,
    DimensionError,
    FrameIndexError,
    LossDomainError,
    ParseError,
    SizeError,
    TrackingError,
    TrainingError,
)

__all__ = [
    "TrackingError",
    "ParseError",
    "DataValidationError",
    "DimensionError",
    "FrameIndexError",
    "SizeError",
    "ConfigurationError",
    "TrainingError",
    "LossDomainError",
]
