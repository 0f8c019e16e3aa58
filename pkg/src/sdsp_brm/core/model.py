"""Domain model for satellite downlink scheduling under breakpoint-resume mode."""

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, Iterator, List, Mapping, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


# Absolute tolerance (s) for every duration comparison
TOLERANCE = 1e-6

# Downlink duration per second of observation
PLAYBACK_RATIO = 4.5


class SDSPError(Exception):
    """Base exception for the solver suite."""
    pass


class InputError(SDSPError):
    """Malformed or dimensionally inconsistent input."""
    pass


class ScenarioFormatError(InputError):
    """Scenario or solution file could not be parsed."""
    pass


class InvalidSolutionError(SDSPError):
    """A solution that must be valid failed validation."""

    def __init__(self, message: str, violations: List["Violation"]):
        super().__init__(message)
        self.violations = violations


class OracleRefusal(SDSPError):
    """Instance or call outside what the exact oracle accepts."""
    pass


class SegmentationMode(str, Enum):
    """SG allows fragments across windows; NonSG forces one window per data."""
    SG = "sg"
    NONSG = "nonsg"


class ImagingData(BaseModel):
    """One stored observation product <n, p, os, oe, d>."""
    model_config = ConfigDict(frozen=True)

    n: int
    p: int = Field(ge=1)
    os: float
    oe: float
    d: float = Field(gt=0)

    @model_validator(mode="after")
    def _check_playback_duration(self) -> "ImagingData":
        if not self.oe > self.os:
            raise ValueError(f"data {self.n}: oe ({self.oe}) must exceed os ({self.os})")
        expected = PLAYBACK_RATIO * (self.oe - self.os)
        if abs(self.d - expected) > TOLERANCE:
            raise ValueError(
                f"data {self.n}: d ({self.d}) != 4.5 * (oe - os) = {expected:.6f}"
            )
        return self


class PlaybackWindow(BaseModel):
    """A visibility interval <m, ds, de, l> whose capacity is its length."""
    model_config = ConfigDict(frozen=True)

    m: int
    ds: float
    de: float
    l: float = Field(gt=0)  # noqa: E741

    @model_validator(mode="after")
    def _check_length(self) -> "PlaybackWindow":
        if abs(self.de - (self.ds + self.l)) > TOLERANCE:
            raise ValueError(f"window {self.m}: de ({self.de}) != ds + l ({self.ds + self.l})")
        return self


class Scenario(BaseModel):
    """Minimum segment length plus time-ordered data and windows."""
    model_config = ConfigDict(frozen=True)

    ld: float = Field(gt=0)
    data: Tuple[ImagingData, ...] = ()
    windows: Tuple[PlaybackWindow, ...] = ()

    @model_validator(mode="after")
    def _check_order(self) -> "Scenario":
        for prev, cur in zip(self.data, self.data[1:]):
            if cur.os < prev.os:
                raise ValueError(f"data must be sorted by os: {cur.n} starts before {prev.n}")
        for prev_w, cur_w in zip(self.windows, self.windows[1:]):
            if cur_w.ds < prev_w.ds:
                raise ValueError(f"windows must be sorted by ds: {cur_w.m} starts before {prev_w.m}")
        return self

    @property
    def n_data(self) -> int:
        return len(self.data)

    @property
    def n_windows(self) -> int:
        return len(self.windows)

    def priorities(self) -> np.ndarray:
        return np.array([t.p for t in self.data], dtype=np.int64)

    def durations(self) -> np.ndarray:
        return np.array([t.d for t in self.data], dtype=float)

    def observation_ends(self) -> np.ndarray:
        return np.array([t.oe for t in self.data], dtype=float)

    def window_starts(self) -> np.ndarray:
        return np.array([w.ds for w in self.windows], dtype=float)

    def capacities(self) -> np.ndarray:
        return np.array([w.l for w in self.windows], dtype=float)


@dataclass(frozen=True, eq=False)
class ServiceMatrix:
    """r[i][j] = 1 when window j starts strictly after data i is observed."""
    r: np.ndarray

    @property
    def shape(self) -> Tuple[int, int]:
        return (int(self.r.shape[0]), int(self.r.shape[1]))

    def serviceable(self, i: int) -> np.ndarray:
        """Indices of windows that can carry data i."""
        return np.flatnonzero(self.r[i])


def _frozen_array(values: object, ndim: int, name: str) -> np.ndarray:
    arr = np.array(values, dtype=float)
    if arr.ndim != ndim:
        raise InputError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Solution:
    """
    Decision variables of the MIP plus the derived objective.

    Arrays are copied and frozen on construction. x and g are stored as floats
    so that non-integral values survive for the integrality checks.
    """
    x: np.ndarray
    y: np.ndarray
    g: np.ndarray
    q: np.ndarray
    objective: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", _frozen_array(self.x, 1, "x"))
        object.__setattr__(self, "y", _frozen_array(self.y, 2, "y"))
        object.__setattr__(self, "g", _frozen_array(self.g, 2, "g"))
        object.__setattr__(self, "q", _frozen_array(self.q, 1, "q"))
        n, m = self.y.shape
        if self.g.shape != (n, m) or self.x.shape != (n,) or self.q.shape != (m,):
            raise InputError(
                f"inconsistent solution shapes: x{self.x.shape} y{self.y.shape} "
                f"g{self.g.shape} q{self.q.shape}"
            )

    @property
    def shape(self) -> Tuple[int, int]:
        return (int(self.y.shape[0]), int(self.y.shape[1]))

    @classmethod
    def empty(cls, n_data: int, n_windows: int) -> "Solution":
        return cls(
            x=np.zeros(n_data),
            y=np.zeros((n_data, n_windows)),
            g=np.zeros((n_data, n_windows)),
            q=np.zeros(n_windows),
            objective=0,
        )

    @classmethod
    def from_allocations(
        cls,
        scenario: Scenario,
        allocations: Mapping[int, Mapping[int, float]],
    ) -> "Solution":
        """
        Build a solution from per-data fragment maps.

        Args:
            scenario: Scenario the allocation belongs to
            allocations: {data index: {window index: duration}}, 0-based

        Returns:
            Solution with x, g, q derived from the fragments
        """
        n, m = scenario.n_data, scenario.n_windows
        x = np.zeros(n)
        y = np.zeros((n, m))
        g = np.zeros((n, m))
        for i, pieces in allocations.items():
            if not pieces:
                continue
            x[i] = 1.0
            for j, dur in pieces.items():
                y[i, j] = dur
                g[i, j] = 1.0
        q = (g > 0.5).any(axis=0).astype(float) if n else np.zeros(m)
        draft = cls(x=x, y=y, g=g, q=q, objective=0)
        return replace(draft, objective=evaluate_objective(scenario, draft))

    def assignments(self) -> Iterator[Tuple[int, int, float]]:
        """Yield (i, j, y_ij) for every used pair, 0-based, row-major."""
        rows, cols = np.nonzero(self.g > 0.5)
        for i, j in zip(rows.tolist(), cols.tolist()):
            yield i, j, float(self.y[i, j])

    def allocations(self) -> Dict[int, Dict[int, float]]:
        result: Dict[int, Dict[int, float]] = {}
        for i, j, dur in self.assignments():
            result.setdefault(i, {})[j] = dur
        return result

    def scheduled(self) -> List[int]:
        return np.flatnonzero(self.x > 0.5).tolist()


@dataclass(frozen=True)
class PlaybackTask:
    """Executable output <m, ts, te, set> for one used window."""
    m: int
    ts: float
    te: float
    fragments: Tuple[Tuple[int, float], ...] = field(default_factory=tuple)


@dataclass(frozen=True)
class Violation:
    """One failed constraint check; index is 1-based as in the model."""
    constraint: str
    index: Tuple[int, ...]
    message: str

    def __str__(self) -> str:
        where = ",".join(str(k) for k in self.index)
        return f"({self.constraint}) at ({where}): {self.message}"


def compute_service_matrix(scenario: Scenario) -> ServiceMatrix:
    """
    Compute the service coefficients r_ij.

    Args:
        scenario: Scenario with data and windows

    Returns:
        N x M matrix with r_ij = 1 exactly when ds_j > oe_i
    """
    oe = scenario.observation_ends()
    ds = scenario.window_starts()
    r = (ds[np.newaxis, :] > oe[:, np.newaxis]).astype(np.int8)
    r = r.reshape(scenario.n_data, scenario.n_windows)
    r.setflags(write=False)
    return ServiceMatrix(r=r)


def evaluate_objective(scenario: Scenario, solution: Solution) -> int:
    """
    Total reward of the scheduled data, Σ x_i p_i.

    Raises:
        InputError: If x does not have one entry per data
    """
    if solution.x.shape != (scenario.n_data,):
        raise InputError(
            f"x has {solution.x.shape[0]} entries, scenario has {scenario.n_data} data"
        )
    if scenario.n_data == 0:
        return 0
    return int(round(float(np.dot(solution.x, scenario.priorities()))))
