"""Readers and writers for detection, ground-truth, result and feature files."""
