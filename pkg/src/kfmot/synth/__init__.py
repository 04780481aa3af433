"""Synthetic tracking scenes with known ground truth."""

from .generator import degrade, generate

__all__ = ["generate", "degrade"]
