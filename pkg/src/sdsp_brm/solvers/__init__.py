"""Heuristic and exact solvers."""
