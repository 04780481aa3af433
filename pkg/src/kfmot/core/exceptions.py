"""Custom exceptions for the tracking toolkit."""

from typing import Any, Dict, Optional


class TrackingError(Exception):
    """Base exception for tracking-related errors."""

    def __init__(self, message: str, error_code: Optional[str] = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.error_code = error_code or "TRACKING_ERROR"
        self.details = details or {}


class ParseError(TrackingError):
    """Exception for malformed lines in an input file."""

    def __init__(self, message: str, line_number: Optional[int] = None, details: Optional[Dict[str, Any]] = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message, "PARSE_ERROR", details)
        self.line_number = line_number


class DataValidationError(TrackingError):
    """Exception for data that violates a model invariant."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, "DATA_VALIDATION_ERROR", details)


class DimensionError(TrackingError, ValueError):
    """Exception for vectors or matrices of incompatible shape."""

    def __init__(self, message: str, expected: Any = None, actual: Any = None):
        super().__init__(message, "DIMENSION_ERROR", {"expected": expected, "actual": actual})
        self.expected = expected
        self.actual = actual


class FrameIndexError(TrackingError, IndexError):
    """Exception when a frame index falls outside the sequence."""

    def __init__(self, frame: int, length: int):
        super().__init__(f"Frame {frame} outside [1, {length}]", "FRAME_INDEX_ERROR",
                         {"frame": frame, "length": length})
        self.frame = frame
        self.length = length


class SizeError(TrackingError):
    """Exception when an exhaustive search is asked for too large an input."""

    def __init__(self, size: int, limit: int):
        super().__init__(f"Size {size} exceeds the enumeration limit {limit}", "SIZE_ERROR",
                         {"size": size, "limit": limit})
        self.size = size
        self.limit = limit


class ConfigurationError(TrackingError):
    """Exception for invalid or incomplete configuration."""

    def __init__(self, message: str, key: Optional[str] = None, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, "CONFIGURATION_ERROR", details)
        self.key = key


class TrainingError(TrackingError):
    """Exception for training runs that cannot proceed."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message, "TRAINING_ERROR", details)


class LossDomainError(TrackingError, ValueError):
    """Exception when a probability falls outside the open unit interval."""

    def __init__(self, probability: float):
        super().__init__(f"Probability {probability} outside (0, 1)", "LOSS_DOMAIN_ERROR",
                         {"probability": probability})
        self.probability = probability
