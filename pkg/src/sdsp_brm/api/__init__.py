"""Canonical JSON interfaces for scenarios and solutions."""
