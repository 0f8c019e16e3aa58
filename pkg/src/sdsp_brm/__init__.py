"""
SDSP-BRM solver suite - satellite downlink scheduling under breakpoint-resume mode.

Greedy construction with remove/insert local search, an exact small-instance
oracle, a seeded scenario generator, a constraint validator and an experiment
harness.
"""

__version__ = "0.1.0"
