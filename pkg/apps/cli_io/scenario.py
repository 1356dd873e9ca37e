"""
Loading scenario files into solver objects.
"""

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from apps.core.exceptions import ConfigurationError, HJGraphError, ScenarioError
from apps.hamiltonian.fields import NodeField
from apps.hamiltonian.hamiltonians import CompositeHamiltonian, TabulatedHamiltonian, get_profile
from apps.hj_solver.initial import AffineDatum, Bump, ConstantDatum, DistanceToVertex, TableDatum
from apps.hj_solver.scheme import Problem
from apps.metric_graph.graph import GraphPoint, MetricGraph
from apps.metric_graph.lattice import build_lattice
from apps.verification.suite import VerificationParams

from .parser import parse_scenario
from .serializers import ScenarioSerializer

logger = logging.getLogger(__name__)

OPTIONAL_SECTIONS = ("verification", "transform", "refinement", "output")


@dataclass
class Scenario:
    name: str
    path: Path
    graph: object
    lattice: object
    hamiltonian: object
    u0: object
    T: float
    dt: float
    dx: float
    speeds: object = "geometric"
    n_speeds: int = None
    orientation: str = "min"
    p_max: float = None
    n_p: int = None
    verification: VerificationParams = field(default_factory=VerificationParams)
    probes: list = field(default_factory=list)
    v_max: float = 5.0
    n_v: int = 50
    levels: int = 3
    output_dir: Path = Path("out")

    @property
    def maximize(self):
        return self.orientation == "max"

    def internal_hamiltonian(self):
        """The Hamiltonian of the minimization problem actually solved."""
        if not self.maximize:
            return self.hamiltonian
        if not isinstance(self.hamiltonian, CompositeHamiltonian):
            raise ConfigurationError("The max orientation needs a composite Hamiltonian")
        return self.hamiltonian.with_negated_potential()

    def internal_u0(self):
        return AffineDatum(self.u0, scale=-1.0) if self.maximize else self.u0

    def problem(self, lattice=None, dt=None):
        """
        The minimization problem on ``lattice`` (default: the scenario's own).

        Tabulated coefficients are interpolated onto other lattices.
        """
        lattice = self.lattice if lattice is None else lattice
        hamiltonian = self.internal_hamiltonian()
        return Problem(
            graph=self.graph,
            lattice=lattice,
            hamiltonian=hamiltonian,
            lagrangian=hamiltonian.lagrangian(p_max=self.p_max, n_p=self.n_p),
            u0=self.internal_u0(),
            T=self.T,
            dt=self.dt if dt is None else dt,
            speeds=self.speeds,
            n_speeds=self.n_speeds,
        )


def flatten_errors(detail, prefix=""):
    """``[(dotted key, message), ...]`` from a DRF error structure."""
    if isinstance(detail, dict):
        items = detail.items()
    elif isinstance(detail, list) and detail and not isinstance(detail[0], str):
        items = [(index, item) for index, item in enumerate(detail) if item]
    else:
        messages = detail if isinstance(detail, list) else [detail]
        return [(prefix, str(message)) for message in messages]
    errors = []
    for key, value in items:
        path = f"{prefix}.{key}" if prefix else str(key)
        errors.extend(flatten_errors(value, path))
    return errors


def _payload(sections):
    payload = {
        key: value
        for key, value in sections.items()
        if key not in ("graph", "probes")
    }
    for key in OPTIONAL_SECTIONS:
        payload.setdefault(key, {})
    if "graph" in sections:
        rows = sections["graph"]
        payload["graph"] = {
            "vertices": [vertex for row in rows.get("vertex", []) for vertex in row],
            "edges": [{"u": u, "v": v, "length": length} for u, v, length in rows.get("edge", [])],
        }
    payload["probes"] = [
        {"edge": edge, "offset": offset, "t": t}
        for edge, offset, t in sections.get("probes", {}).get("probe", [])
    ]
    return payload


def _read_node_table(path, lattice, key):
    """Values of a ``node_id,value...`` CSV ordered by node id; returns (header, rows)."""
    if not path.is_file():
        raise ScenarioError(f"Table file not found: {path}", key=key)
    try:
        header = path.read_text().splitlines()[0].split(",")
        table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    except (ValueError, IndexError) as exc:
        raise ScenarioError(f"Malformed table {path.name}: {exc}", key=key) from exc
    ids = table[:, 0].astype(int)
    if sorted(ids.tolist()) != list(range(lattice.size)):
        raise ScenarioError(
            f"Table {path.name} must list every lattice node 0..{lattice.size - 1} once",
            key=key,
        )
    return header, table[np.argsort(ids), 1:]


def _field(value, lattice, base, key):
    if isinstance(value, float):
        return NodeField.uniform(value)
    _, rows = _read_node_table(base / value, lattice, key)
    return NodeField.tabulated(lattice, rows[:, 0])


def _hamiltonian(data, lattice, base):
    if data["form"] == "composite":
        profile = get_profile(data["h"], data.get("a"))
        sigma = _field(data["sigma"], lattice, base, "hamiltonian.sigma")
        f = _field(data["f"], lattice, base, "hamiltonian.f")
        return CompositeHamiltonian(profile, sigma, f)
    header, rows = _read_node_table(base / data["table"], lattice, "hamiltonian.table")
    try:
        p_grid = [float(token) for token in header[1:]]
    except ValueError as exc:
        raise ScenarioError("Table header must list the p-grid", key="hamiltonian.table") from exc
    return TabulatedHamiltonian(lattice, p_grid, rows)


def _initial(data, graph, lattice, base):
    kind = data["kind"]
    if kind == "constant":
        return ConstantDatum(data["value"])
    if kind == "table":
        _, rows = _read_node_table(base / data["path"], lattice, "initial.path")
        return TableDatum(lattice, rows[:, 0])
    if data["vertex"] not in graph.vertices:
        raise ScenarioError(f"Unknown vertex {data['vertex']!r}", key="initial.vertex")
    if kind == "distance_to_vertex":
        return DistanceToVertex(graph, data["vertex"], data["scale"])
    return Bump(graph, data["vertex"], data["radius"], data["height"])


def _probes(rows, graph):
    probes = []
    for index, row in enumerate(rows):
        try:
            point = graph.canonical(GraphPoint(row["edge"], row["offset"]))
        except HJGraphError as exc:
            raise ScenarioError(str(exc), key=f"probes.{index}") from exc
        probes.append((point, row["t"]))
    return probes


def load_scenario(path, overrides=None):
    """
    Parse, validate and build the scenario at ``path``.

    ``overrides`` may set ``output_dir``, ``seed``, ``orientation`` and
    ``corrupt``, the values of the command-line flags.
    """
    path = Path(path)
    if not path.is_file():
        raise ScenarioError(f"Scenario file not found: {path}")
    sections = parse_scenario(path.read_text())

    serializer = ScenarioSerializer(data=_payload(sections))
    if not serializer.is_valid():
        errors = flatten_errors(serializer.errors)
        key = errors[0][0]
        details = "; ".join(f"{name}: {text}" for name, text in errors)
        raise ScenarioError(f"Invalid scenario {path.name}: {details}", key=key or None)
    data = serializer.validated_data
    base = path.parent

    graph_data = data["graph"]
    try:
        graph = MetricGraph(
            graph_data["vertices"],
            [(edge["u"], edge["v"], edge["length"]) for edge in graph_data["edges"]],
        )
    except HJGraphError as exc:
        raise ScenarioError(str(exc), key="graph") from exc
    solver = data["solver"]
    lattice = build_lattice(graph, solver["dx"])

    verification = data["verification"]
    scenario = Scenario(
        name=path.stem,
        path=path,
        graph=graph,
        lattice=lattice,
        hamiltonian=_hamiltonian(data["hamiltonian"], lattice, base),
        u0=_initial(data["initial"], graph, lattice, base),
        T=solver["T"],
        dt=solver["dt"],
        dx=solver["dx"],
        speeds=solver["v_grid"],
        n_speeds=solver.get("n_speeds"),
        orientation=solver["orientation"],
        p_max=data["hamiltonian"].get("p_max"),
        n_p=data["hamiltonian"].get("n_p"),
        verification=VerificationParams(
            seed=verification["seed"],
            curves=verification["curves"],
            triples=verification["triples"],
            probes=verification["probes"],
            v_cap=verification.get("v_cap"),
            tolerance_factor=verification["tolerance_factor"],
            corrupt=verification["corrupt"],
            comparison_shift=verification["comparison_shift"],
        ),
        probes=_probes(data["probes"], graph),
        v_max=data["transform"]["v_max"],
        n_v=data["transform"]["n_v"],
        levels=data["refinement"]["levels"],
        output_dir=base / data["output"]["dir"],
    )
    scenario = apply_overrides(scenario, overrides or {})
    if scenario.maximize:
        scenario.internal_hamiltonian()
    logger.info("Loaded scenario %s (%d lattice nodes)", scenario.name, lattice.size)
    return scenario


def apply_overrides(scenario, overrides):
    overrides = {key: value for key, value in overrides.items() if value is not None}
    if "output_dir" in overrides:
        scenario.output_dir = Path(overrides["output_dir"])
    if "orientation" in overrides:
        scenario.orientation = overrides["orientation"]
    params = {}
    if "seed" in overrides:
        params["seed"] = int(overrides["seed"])
    if overrides.get("corrupt"):
        params["corrupt"] = True
    if params:
        scenario.verification = replace(scenario.verification, **params)
    return scenario
