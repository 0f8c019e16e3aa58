"""Seeded scenario generation."""
