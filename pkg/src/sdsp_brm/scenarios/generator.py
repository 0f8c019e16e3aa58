"""Seeded random scenario generation (N = a*M data over M windows)."""

import math
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..core.model import PLAYBACK_RATIO, ImagingData, PlaybackWindow, Scenario
from ..utils.config import PRESET_SIZES, GenParams
from ..utils.logging import get_logger


logger = get_logger(__name__)

# Observation lengths are kept on a 1e-5 s grid, so d = 4.5 * (oe - os)
# lands exactly on the 1e-6 s grid of the canonical JSON.
_OBS_UNITS_PER_SECOND = 100_000

PRESETS: Dict[str, Tuple[int, int]] = {
    label: (int(label.split("x")[0]), int(label.split("x")[1])) for label in PRESET_SIZES
}


def parse_size(label: str) -> Tuple[int, int]:
    """
    Parse an "NxM" size label.

    Raises:
        ValueError: If the label is not of the form NxM with positive integers
    """
    try:
        n_text, m_text = label.lower().split("x")
        n, m = int(n_text), int(m_text)
    except ValueError:
        raise ValueError(f"Invalid size '{label}', expected NxM (e.g. 20x8)")
    if n < 1 or m < 1:
        raise ValueError(f"Invalid size '{label}', N and M must be positive")
    return n, m


def preset_params(label: str, ld: float = 10.0, seed: int = 0) -> GenParams:
    """Generation parameters pinned to a size label such as "200x85"."""
    n, m = PRESETS.get(label) or parse_size(label)
    return GenParams(m=m, n=n, ld=ld, seed=seed)


def _data_count(params: GenParams, rng: np.random.Generator) -> int:
    if params.n is not None:
        return params.n
    a = rng.uniform(params.a_low, params.a_high)
    low = max(1, math.ceil(params.a_low * params.m - 1e-9))
    high = max(low, math.floor(params.a_high * params.m + 1e-9))
    return int(min(max(round(a * params.m), low), high))


def _quantized_durations(samples: np.ndarray, ld: float) -> Tuple[np.ndarray, np.ndarray]:
    """Snap sampled downlink durations to the grid; returns (obs_len, d)."""
    scale = _OBS_UNITS_PER_SECOND / PLAYBACK_RATIO
    lo = math.ceil(2 * ld * scale - 1e-9)
    hi = math.floor(10 * ld * scale + 1e-9)
    units = np.clip(np.rint(samples * scale), lo, hi).astype(np.int64)
    obs_len = units / _OBS_UNITS_PER_SECOND
    d = np.round(units * (PLAYBACK_RATIO * 10) / (_OBS_UNITS_PER_SECOND * 10), 6)
    return obs_len, d


def generate_scenario(params: GenParams) -> Scenario:
    """
    Generate a random scenario, fully determined by params (seed included).

    Data are chained from os_1 = 0 with N(gap_mean, gap_std) gaps clamped at 0.
    The first window opens one gap after the observation a quarter of the way
    through the data, so early windows interleave with later observations.

    Args:
        params: Generation parameters

    Returns:
        Scenario with N data and M windows, both time-ordered and disjoint
    """
    rng = np.random.Generator(np.random.PCG64(params.seed))
    ld = params.ld
    n = _data_count(params, rng)
    m = params.m

    priorities = rng.integers(1, 10, size=n, endpoint=True)
    obs_len, durations = _quantized_durations(rng.uniform(2 * ld, 10 * ld, size=n), ld)
    data_gaps = np.maximum(0.0, rng.normal(params.gap_mean, params.gap_std, size=max(n - 1, 0)))
    window_gaps = np.maximum(0.0, rng.normal(params.gap_mean, params.gap_std, size=m))
    lengths = np.clip(np.round(rng.uniform(ld, 5 * ld, size=m), 6), ld, 5 * ld)

    data: List[ImagingData] = []
    start = 0.0
    for i in range(n):
        end = round(start + float(obs_len[i]), 6)
        data.append(ImagingData(
            n=i + 1, p=int(priorities[i]), os=start, oe=end, d=float(durations[i]),
        ))
        if i < n - 1:
            start = round(end + float(data_gaps[i]), 6)

    windows: List[PlaybackWindow] = []
    anchor = data[math.ceil(n / 4) - 1].oe if data else 0.0
    ds = round(anchor + float(window_gaps[0]), 6) if m else 0.0
    for j in range(m):
        length = float(lengths[j])
        de = round(ds + length, 6)
        windows.append(PlaybackWindow(m=j + 1, ds=ds, de=de, l=length))
        if j < m - 1:
            ds = round(de + float(window_gaps[j + 1]), 6)

    logger.debug(
        "Generated scenario",
        extra={"extra": {"n_data": n, "n_windows": m, "seed": params.seed, "ld": ld}},
    )
    return Scenario(ld=ld, data=tuple(data), windows=tuple(windows))


def generate_batch(
    params: GenParams,
    count: int,
    base_seed: Optional[int] = None,
) -> List[Scenario]:
    """Scenarios for seeds base_seed, base_seed + 1, ... (defaults to params.seed)."""
    first = params.seed if base_seed is None else base_seed
    return [
        generate_scenario(params.model_copy(update={"seed": first + k}))
        for k in range(count)
    ]
