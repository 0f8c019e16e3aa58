"""Shared fixtures for the SDSP-BRM test suite."""

import sys
from pathlib import Path
from typing import Callable, Sequence, Tuple

import pytest

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from sdsp_brm.core.model import ImagingData, PlaybackWindow, Scenario  # noqa: E402


DataSpec = Tuple[int, float, float]  # (p, os, oe)
WindowSpec = Tuple[float, float]  # (ds, l)


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False,
        help="run long acceptance checks",
    )


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running acceptance check (needs --runslow)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def build_scenario(
    data: Sequence[DataSpec],
    windows: Sequence[WindowSpec],
    ld: float = 10.0,
) -> Scenario:
    """Scenario from (p, os, oe) and (ds, l) tuples; d and de are derived."""
    return Scenario(
        ld=ld,
        data=tuple(
            ImagingData(n=k + 1, p=p, os=os, oe=oe, d=round(4.5 * (oe - os), 6))
            for k, (p, os, oe) in enumerate(data)
        ),
        windows=tuple(
            PlaybackWindow(m=k + 1, ds=ds, de=ds + length, l=length)
            for k, (ds, length) in enumerate(windows)
        ),
    )


@pytest.fixture
def scenario_builder() -> Callable[..., Scenario]:
    return build_scenario


@pytest.fixture
def instance_a() -> Scenario:
    """Two data of 90 s, three windows of 50/50/30 s; only one data fits."""
    return build_scenario(
        data=[(6, 0.0, 20.0), (4, 120.0, 140.0)],
        windows=[(200.0, 50.0), (300.0, 50.0), (400.0, 30.0)],
    )


@pytest.fixture
def service_example() -> Scenario:
    """oe = (50, 150, 260) against ds = (100, 200)."""
    return build_scenario(
        data=[(1, 0.0, 50.0), (1, 100.0, 150.0), (1, 200.0, 260.0)],
        windows=[(100.0, 50.0), (200.0, 50.0)],
    )


@pytest.fixture
def greedy_trap() -> Scenario:
    """
    The best-rate data (p=6, d=45) fills window 1 and blocks the p=10 data,
    which only fits split 45/45 over both windows.
    """
    return build_scenario(
        data=[(6, 0.0, 10.0), (10, 20.0, 40.0)],
        windows=[(100.0, 45.0), (200.0, 45.0)],
    )
