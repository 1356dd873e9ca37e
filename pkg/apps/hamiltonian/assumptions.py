"""
Sampled checks of the standing assumptions on a Hamiltonian and its
Lagrangian. Failures are report entries, never exceptions.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from apps.core.conf import hj_settings

from .lagrangian import hamiltonian_envelope, max_speed_bound

logger = logging.getLogger(__name__)

TOLERANCE = 1e-9


@dataclass(frozen=True)
class AssumptionItem:
    name: str
    passed: bool
    detail: str
    informational: bool = False


@dataclass
class AssumptionReport:
    items: list = field(default_factory=list)

    def add(self, name, passed, detail, informational=False):
        item = AssumptionItem(name, bool(passed), detail, informational)
        self.items.append(item)
        if not item.passed:
            logger.warning("Assumption %s failed: %s", name, detail)
        return item

    def __getitem__(self, name):
        for item in self.items:
            if item.name == name:
                return item
        raise KeyError(name)

    def __iter__(self):
        return iter(self.items)

    @property
    def passed(self):
        return all(item.passed for item in self.items if not item.informational)

    @property
    def failures(self):
        return [item.name for item in self.items if not item.passed]

    def as_text(self):
        lines = []
        for item in self.items:
            status = "info" if item.informational else ("pass" if item.passed else "FAIL")
            lines.append(f"assumption {item.name}: {status} ({item.detail})")
        return "\n".join(lines)


def default_p_grid(hamiltonian):
    if hamiltonian.form == "tabulated":
        return np.asarray(hamiltonian.p_grid, dtype=float)
    return np.linspace(0.0, hj_settings.LEGENDRE_P_MAX_FACTOR, 65)


def _tail_secants(p_grid, values):
    """Secant slopes of every row over the last half and the quarter before it."""
    last = len(p_grid) - 1
    mid = max(1, last // 2)
    quarter = max(0, mid // 2)
    if quarter == mid:
        quarter = mid - 1
    late = (values[:, last] - values[:, mid]) / (p_grid[last] - p_grid[mid])
    early = (values[:, mid] - values[:, quarter]) / (p_grid[mid] - p_grid[quarter])
    return float(late.min()), float(early.min())


def check_assumptions(hamiltonian, lattice, p_grid=None, v_grid=None):
    """
    Sample H on lattice nodes x p-grid and L on lattice nodes x v-grid and
    report each standing assumption.
    """
    p_grid = default_p_grid(hamiltonian) if p_grid is None else np.asarray(p_grid, dtype=float)
    v_grid = np.linspace(0.0, 5.0, 51) if v_grid is None else np.asarray(v_grid, dtype=float)
    report = AssumptionReport()

    h_values = hamiltonian.node_values(lattice, p_grid)
    finite = bool(np.all(np.isfinite(h_values)))
    report.add("A1_continuity", finite, f"{h_values.size} samples finite={finite}")

    increments = np.diff(h_values, axis=1)
    worst_drop = float(-increments.min()) if increments.size else 0.0
    report.add(
        "A2_monotone",
        worst_drop <= TOLERANCE,
        f"largest decrease in p {max(worst_drop, 0.0):.3g}",
    )

    slopes = increments / np.diff(p_grid)[None, :]
    bends = np.diff(slopes, axis=1)
    worst_bend = float(-bends.min()) if bends.size else 0.0
    report.add(
        "A2_convex",
        worst_bend <= TOLERANCE,
        f"largest slope decrease {max(worst_bend, 0.0):.3g}",
    )

    c_h = h_values.max(axis=0)
    report.add("A3_c_H_finite", bool(np.all(np.isfinite(c_h))), f"max c_H {float(c_h.max()):.6g}")

    inf_h0 = float(h_values[:, 0].min())
    report.add("A4_inf_H0", bool(np.isfinite(inf_h0)), f"inf_x H(x,0) = {inf_h0:.6g}")

    late, early = _tail_secants(p_grid, h_values)
    ratio = float((h_values[:, -1] / p_grid[-1]).min()) if p_grid[-1] > 0 else 0.0
    report.add(
        "A4_slope",
        late > TOLERANCE and late >= early - TOLERANCE,
        f"tail secant {late:.6g}, previous {early:.6g}, inf_x H/p at p_max {ratio:.6g}",
    )

    lagrangian = hamiltonian.lagrangian()
    l_values = lagrangian.node_values(lattice, v_grid)
    floor = -hamiltonian_envelope(hamiltonian, lattice, 0.0)
    finite_l = l_values[np.isfinite(l_values)]
    lowest = float(finite_l.min()) if finite_l.size else np.inf
    report.add(
        "A3prime_floor",
        lowest >= floor - TOLERANCE,
        f"min sampled L {lowest:.6g} vs floor {floor:.6g}",
    )

    speed = min(max_speed_bound(lagrangian, lattice), float(v_grid[-1]))
    top = float(lagrangian.node_values(lattice, [speed]).max()) if speed > 0 else np.inf
    report.add(
        "A4prime_V_L",
        speed > 0 and np.isfinite(top),
        f"V_L {speed:.6g}, sup_x L(x,V_L) {top:.6g}",
    )

    bound = float(p_grid[-1]) * speed - inf_h0
    report.add(
        "A4prime_constructive",
        np.isfinite(top) and top <= bound + TOLERANCE,
        f"sup_x L(x,V) {top:.6g} <= P*V - inf H(.,0) = {bound:.6g}",
    )

    jump = 0.0
    speed_jump = 0.0
    node_speeds = lagrangian.node_max_speeds(lattice)
    for i, j, _ in lattice.adjacent_pairs:
        both = np.isfinite(l_values[i]) & np.isfinite(l_values[j])
        if np.any(both):
            jump = max(jump, float(np.abs(l_values[i][both] - l_values[j][both]).max()))
        if np.isfinite(node_speeds[i]) and np.isfinite(node_speeds[j]):
            speed_jump = max(speed_jump, abs(float(node_speeds[i] - node_speeds[j])))
    report.add(
        "A5_continuity",
        True,
        f"largest jump of L between neighbours {jump:.3g}, of V_L {speed_jump:.3g}",
        informational=True,
    )
    return report
