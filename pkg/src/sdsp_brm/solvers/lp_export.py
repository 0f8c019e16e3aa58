"""LP-format export of the full SDSP-BRM mixed integer program."""

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..core.model import Scenario, SegmentationMode, compute_service_matrix


def _num(value: float) -> str:
    text = f"{value:.6f}".rstrip("0").rstrip(".")
    return "0" if text in ("", "-0") else text


def _expression(terms: Sequence[Tuple[float, str]]) -> str:
    """Render coefficient/variable pairs as an LP affine expression."""
    parts: List[str] = []
    for coef, name in terms:
        sign = "-" if coef < 0 else "+"
        magnitude = abs(coef)
        body = name if magnitude == 1 else f"{_num(magnitude)} {name}"
        if not parts:
            parts.append(f"- {body}" if sign == "-" else body)
        else:
            parts.append(f"{sign} {body}")
    return " ".join(parts)


def export_lp(
    scenario: Scenario,
    ld: Optional[float] = None,
    mode: SegmentationMode = SegmentationMode.SG,
) -> str:
    """
    Write the MIP in CPLEX LP format.

    Pairs with r_ij = 0 get no g/y variables, which is how the service
    constraint is expressed. Names are 1-based: x_i, g_i_j, y_i_j.

    Args:
        scenario: Scenario to model
        ld: Minimum fragment length override (defaults to the scenario's)
        mode: NonSG adds a one-window row per data

    Returns:
        LP file text
    """
    ld_value = scenario.ld if ld is None else ld
    n, m = scenario.n_data, scenario.n_windows
    r = compute_service_matrix(scenario).r
    rows, cols = np.nonzero(r)
    pairs = list(zip(rows.tolist(), cols.tolist()))
    by_data: Dict[int, List[int]] = {i: [] for i in range(n)}
    by_window: Dict[int, List[int]] = {j: [] for j in range(m)}
    for i, j in pairs:
        by_data[i].append(j)
        by_window[j].append(i)

    lines: List[str] = [
        f"\\ SDSP-BRM model: N={n} M={m} ld={_num(ld_value)} mode={mode.value}",
        "Maximize",
    ]
    objective = [(float(t.p), f"x_{i + 1}") for i, t in enumerate(scenario.data)]
    lines.append(f" obj: {_expression(objective)}".rstrip())

    lines.append("Subject To")
    for i, j in pairs:
        g, y = f"g_{i + 1}_{j + 1}", f"y_{i + 1}_{j + 1}"
        d = scenario.data[i].d
        lines.append(f" c6lo_{i + 1}_{j + 1}: {_expression([(ld_value, g), (-1.0, y)])} <= 0")
        lines.append(f" c6hi_{i + 1}_{j + 1}: {_expression([(1.0, y), (-d, g)])} <= 0")
    for i, t in enumerate(scenario.data):
        terms = [(1.0, f"y_{i + 1}_{j + 1}") for j in by_data[i]] + [(-t.d, f"x_{i + 1}")]
        lines.append(f" c7_{i + 1}: {_expression(terms)} = 0")
    for j, w in enumerate(scenario.windows):
        if not by_window[j]:
            continue
        terms = [(1.0, f"y_{i + 1}_{j + 1}") for i in by_window[j]]
        lines.append(f" c8_{j + 1}: {_expression(terms)} <= {_num(w.l)}")
    for i, j in pairs:
        terms = [(1.0, f"g_{i + 1}_{j + 1}"), (-1.0, f"x_{i + 1}")]
        lines.append(f" c10_{i + 1}_{j + 1}: {_expression(terms)} <= 0")
    if mode == SegmentationMode.NONSG:
        for i in range(n):
            if not by_data[i]:
                continue
            terms = [(1.0, f"g_{i + 1}_{j + 1}") for j in by_data[i]]
            lines.append(f" nsg_{i + 1}: {_expression(terms)} <= 1")

    if pairs:
        lines.append("Bounds")
        lines.extend(f" y_{i + 1}_{j + 1} >= 0" for i, j in pairs)

    binaries = [f"x_{i + 1}" for i in range(n)] + [f"g_{i + 1}_{j + 1}" for i, j in pairs]
    if binaries:
        lines.append("Binaries")
        lines.extend(f" {name}" for name in binaries)
    lines.append("End")
    return "\n".join(lines) + "\n"
