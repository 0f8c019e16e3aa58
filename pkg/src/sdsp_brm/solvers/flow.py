"""Continuous feasibility of a fixed window pattern via integer max-flow."""

from typing import Dict, Mapping, Optional, Sequence, TypeVar, Union

from ortools.graph.python import max_flow

from ..core.model import OracleRefusal


# Durations are scaled to integer microseconds before entering the flow network
MICROS_PER_SECOND = 1_000_000

K = TypeVar("K")
V = TypeVar("V")


def to_micros(seconds: float) -> int:
    return int(round(seconds * MICROS_PER_SECOND))


def _as_mapping(values: Union[Mapping[K, V], Sequence[V]]) -> Mapping:
    if isinstance(values, Mapping):
        return values
    return dict(enumerate(values))


def transport_fragments(
    demands: Union[Mapping[int, float], Sequence[float]],
    pattern: Union[Mapping[int, Sequence[int]], Sequence[Sequence[int]]],
    capacities: Union[Mapping[int, float], Sequence[float]],
    ld: float,
) -> Optional[Dict[int, Dict[int, float]]]:
    """
    Find fragment durations for a fixed pattern, or None if none exist.

    Every used pair gets ld up front (y = ld + y'); the remaining supplies
    d_i - |J_i| ld are routed source -> data -> window -> sink with arc
    capacities d_i - ld and window capacities l_j - (ld per used pair).

    Args:
        demands: Downlink duration d_i per data key
        pattern: Windows J_i used by each data key
        capacities: Length l_j per window key
        ld: Minimum fragment length (0 drops the lower bounds)

    Returns:
        {data key: {window key: y}} saturating every demand, or None

    Raises:
        OracleRefusal: If a pattern is empty, names an unknown window or a
            data key without demand, or needs more than d_i / ld fragments
    """
    demands = _as_mapping(demands)
    pattern = _as_mapping(pattern)
    capacities = _as_mapping(capacities)

    ld_us = to_micros(ld)
    supplies: Dict[int, int] = {}
    window_load: Dict[int, int] = {w: 0 for w in capacities}
    for key, windows in pattern.items():
        if key not in demands:
            raise OracleRefusal(f"pattern names data {key} without a demand")
        if not windows:
            raise OracleRefusal(f"data {key} has an empty window set")
        unknown = [w for w in windows if w not in capacities]
        if unknown:
            raise OracleRefusal(f"data {key} uses unknown windows {unknown}")
        demand_us = to_micros(demands[key])
        supply = demand_us - len(windows) * ld_us
        if supply < 0:
            raise OracleRefusal(
                f"data {key}: {len(windows)} fragments of at least {ld} exceed d = {demands[key]}"
            )
        supplies[key] = supply
        for w in windows:
            window_load[w] += ld_us

    window_room: Dict[int, int] = {}
    for w, cap in capacities.items():
        room = to_micros(cap) - window_load[w]
        if room < 0:
            return None
        window_room[w] = room

    total_supply = sum(supplies.values())
    if total_supply == 0:
        return {
            key: {w: ld for w in windows} for key, windows in pattern.items()
        }

    data_keys = list(pattern)
    window_keys = list(capacities)
    source = 0
    data_node = {key: 1 + k for k, key in enumerate(data_keys)}
    window_node = {w: 1 + len(data_keys) + k for k, w in enumerate(window_keys)}
    sink = 1 + len(data_keys) + len(window_keys)

    smf = max_flow.SimpleMaxFlow()
    arcs: Dict[int, Dict[int, int]] = {}
    for key in data_keys:
        smf.add_arc_with_capacity(source, data_node[key], supplies[key])
        arc_cap = to_micros(demands[key]) - ld_us
        arcs[key] = {
            w: smf.add_arc_with_capacity(data_node[key], window_node[w], arc_cap)
            for w in pattern[key]
        }
    for w in window_keys:
        smf.add_arc_with_capacity(window_node[w], sink, window_room[w])

    status = smf.solve(source, sink)
    if status != smf.OPTIMAL or smf.optimal_flow() < total_supply:
        return None

    return {
        key: {
            w: (ld_us + smf.flow(arc)) / MICROS_PER_SECOND for w, arc in arcs[key].items()
        }
        for key in data_keys
    }


def flow_feasible(
    demands: Union[Mapping[int, float], Sequence[float]],
    pattern: Union[Mapping[int, Sequence[int]], Sequence[Sequence[int]]],
    capacities: Union[Mapping[int, float], Sequence[float]],
    ld: float,
) -> bool:
    """True when some y meets the fragment bounds, totals and window capacities."""
    return transport_fragments(demands, pattern, capacities, ld) is not None
