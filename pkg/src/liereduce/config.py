"""Scenario configuration: schema, parsing and built-in presets.

Config files are YAML (JSON is accepted too).  Example::

    name: my-run
    formulation: hamiltonian        # or lagrangian
    gamma_mode: oracle              # or paper
    integrator: {method: rk4_chart, h: 0.001, N: 15000}
    stride: 10
    graph: complete                 # or a list of [i, j] pairs
    potential: {sigma: 1.0, d: 0.1, safety_radius: 0.05}
    edges:                          # optional per-edge overrides
      - {pair: [0, 1], sigma: 2.0}
    W: [[2, 0, 0], [0, 1, 0], [0, 0, 0]]
    agents:
      - {pose: [0.0, 0.0, 0.0], u: [1.0, 0.5]}
      - {matrix: [[1, 0, 1], [0, 1, 0], [0, 0, 1]], mu: [0.1, 0.2, 0.0]}
    output: {csv: trajectory.csv, json: false, plots: [xy, attitude, controls]}

Agent ``u`` may list all n coefficients or only the actuated ones; ``lam`` may
list all n or only the unactuated ones.  ``u_matrices`` / ``lam_matrices``
give the same data as se(2) / se(2)* matrices.
"""
import copy
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np
import yaml

from . import se2
from .dynamics import HAMILTONIAN, LAGRANGIAN, HamiltonianState, LagrangianState, MultiAgentSystem
from .errors import ConfigError, InputError
from .interaction import EdgeParams, InteractionGraph, PotentialParams
from .lie_core import CostMetric
from .sim import IntegratorSpec

MATRIX_POLICIES = ("repair", "verbatim")

_S2 = math.sqrt(2.0) / 2.0
_INV_S2 = 1.0 / math.sqrt(2.0)

# Initial data of the three-unicycle experiment, entered exactly as printed.
PAPER_INITIAL_MATRICES = [
    [[_S2, -_S2, -0.25], [_S2, _S2, 0.0], [0.0, 0.0, 1.0]],
    [[-_INV_S2, _INV_S2, 0.25], [_INV_S2, -_INV_S2, 0.0], [0.0, 0.0, 1.0]],
    [[0.0, 1.0, 0.0], [-1.0, 0.0, math.sqrt(3.0) / 4.0], [0.0, 0.0, 1.0]],
]
PAPER_CONTROL_MATRICES = [
    (
        [[0.0, -2.5, 0.0], [2.5, 0.0, 0.0], [0.0, 0.0, 0.0]],
        [[0.0, 0.0, 1.25], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
    ),
    (
        [[0.0, 2.0, 0.0], [-2.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
        [[0.0, 0.0, 2.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
    ),
    (
        [[0.0, -0.5, 0.0], [0.5, 0.0, 0.0], [0.0, 0.0, 0.0]],
        [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
    ),
]

_PAPER_AGENTS = [
    {"matrix": m, "u_matrices": list(c), "lam": [0.0, 0.0, 0.0]}
    for m, c in zip(PAPER_INITIAL_MATRICES, PAPER_CONTROL_MATRICES)
]

PRESETS = {
    # numerical choices of the published experiment, quirks included
    "paper-unicycles": {
        "name": "paper-unicycles",
        "formulation": LAGRANGIAN,
        "gamma_mode": "paper",
        "integrator": {"method": "euler_matrix", "h": 1e-3, "N": 15000},
        "stride": 1,
        "reorthonormalize": False,
        "initial_matrix_policy": "repair",
        "graph": "complete",
        "potential": {"sigma": 1.0, "d": 0.1, "safety_radius": 0.05},
        "W": se2.DEFAULT_METRIC.tolist(),
        "agents": _PAPER_AGENTS,
    },
    # same initial data, structure-preserving defaults
    "unicycles": {
        "name": "unicycles",
        "formulation": HAMILTONIAN,
        "gamma_mode": "oracle",
        "integrator": {"method": "rk4_chart", "h": 1e-3, "N": 15000},
        "stride": 1,
        "initial_matrix_policy": "repair",
        "graph": "complete",
        "potential": {"sigma": 1.0, "d": 0.1, "safety_radius": 0.05},
        "W": se2.DEFAULT_METRIC.tolist(),
        "agents": _PAPER_AGENTS,
    },
}


@dataclass
class ScenarioConfig:
    name: str
    poses: np.ndarray
    u0: np.ndarray
    lam0: np.ndarray
    graph: InteractionGraph
    params: PotentialParams
    metrics: List[CostMetric]
    formulation: str
    integrator: IntegratorSpec
    gamma_mode: str = "oracle"
    stride: int = 1
    reorthonormalize: Optional[bool] = None
    output: dict = field(default_factory=dict)
    repaired_agents: tuple = ()
    source: dict = field(default_factory=dict, repr=False)

    @property
    def n_agents(self):
        return self.poses.shape[0]

    @property
    def paper_mode(self):
        return self.integrator.method == "euler_matrix" and self.gamma_mode == "paper"

    @property
    def reorthonormalize_enabled(self):
        if self.reorthonormalize is None:
            return not self.paper_mode
        return bool(self.reorthonormalize)

    def system(self):
        return MultiAgentSystem(
            graph=self.graph, params=self.params, metrics=self.metrics, gamma_mode=self.gamma_mode
        )

    def initial_state(self):
        lag = LagrangianState(self.poses.copy(), self.u0.copy(), self.lam0.copy())
        if self.formulation == LAGRANGIAN:
            return lag
        return HamiltonianState(lag.g, self.system().legendre(lag.u, lag.lam))

    def with_overrides(self, **changes):
        """Re-parse the source mapping with top-level keys replaced."""
        src = copy.deepcopy(self.source)
        for key, val in changes.items():
            if val is None:
                continue
            if key in ("method", "h", "N"):
                src.setdefault("integrator", {})[key] = val
            else:
                src[key] = val
        return parse_config(src)


def load_config(spec):
    """Load a preset by name or a YAML/JSON file by path."""
    if isinstance(spec, dict):
        return parse_config(spec)
    if str(spec) in PRESETS:
        return parse_config(copy.deepcopy(PRESETS[str(spec)]))
    path = Path(spec)
    if not path.exists():
        raise ConfigError(f"no preset or file named {spec!r}; presets: {sorted(PRESETS)}", field="scenario")
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}", field="scenario") from None
    if not isinstance(data, dict):
        raise ConfigError("top level must be a mapping", field="scenario")
    data.setdefault("name", path.stem)
    return parse_config(data)


def _vec(value, length, fld, allowed=None):
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a list of numbers, got {value!r}", field=fld) from None
    lengths = allowed or (length,)
    if arr.ndim != 1 or arr.size not in lengths:
        raise ConfigError(f"expected length in {lengths}, got shape {arr.shape}", field=fld)
    if not np.all(np.isfinite(arr)):
        raise ConfigError("values must be finite", field=fld)
    return arr


def _mat(value, fld):
    try:
        M = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a 3x3 matrix, got {value!r}", field=fld) from None
    if M.shape != (3, 3) or not np.all(np.isfinite(M)):
        raise ConfigError(f"expected a finite 3x3 matrix, got shape {M.shape}", field=fld)
    return M


def _choice(data, key, options, default):
    val = data.get(key, default)
    val = str(val).replace("-", "_") if key == "method" else val
    if val not in options:
        raise ConfigError(f"must be one of {options}, got {val!r}", field=key)
    return val


def parse_config(data):
    if not isinstance(data, dict):
        raise ConfigError("configuration must be a mapping")
    d = se2.DECOMPOSITION
    n, r_idx, s_idx = d.n, list(d.r_indices), list(d.s_indices)
    group = data.get("group", "SE2")
    if str(group).upper().replace("(", "").replace(")", "") != "SE2":
        raise ConfigError(f"only SE2 is supported, got {group!r}", field="group")

    formulation = _choice(data, "formulation", (LAGRANGIAN, HAMILTONIAN), HAMILTONIAN)
    gamma_mode = _choice(data, "gamma_mode", ("oracle", "paper"), "oracle")
    policy = _choice(data, "initial_matrix_policy", MATRIX_POLICIES, "repair")

    integ = data.get("integrator", {}) or {}
    if not isinstance(integ, dict):
        raise ConfigError("must be a mapping", field="integrator")
    try:
        spec = IntegratorSpec(
            method=str(integ.get("method", "rk4_chart")).replace("-", "_"),
            h=float(integ.get("h", 1e-3)),
            N=integ.get("N", integ.get("steps", 1000)),
        )
    except (InputError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc), field="integrator") from None

    stride = data.get("stride", 1)
    if not isinstance(stride, int) or stride < 1:
        raise ConfigError(f"must be a positive integer, got {stride!r}", field="stride")
    reorth = data.get("reorthonormalize")
    if reorth is not None and not isinstance(reorth, bool):
        raise ConfigError("must be true, false or omitted", field="reorthonormalize")

    agents = data.get("agents")
    if not isinstance(agents, list) or not agents:
        raise ConfigError("at least one agent is required", field="agents")
    r = len(agents)

    poses, u0, lam0, repaired = [], np.zeros((r, n)), np.zeros((r, n)), []
    per_agent_W = []
    for a, spec_a in enumerate(agents):
        fld = f"agents[{a}]"
        if not isinstance(spec_a, dict):
            raise ConfigError("must be a mapping", field=fld)
        if ("pose" in spec_a) == ("matrix" in spec_a):
            raise ConfigError("give exactly one of 'pose' or 'matrix'", field=fld)
        if "pose" in spec_a:
            x, y, th = _vec(spec_a["pose"], 3, f"{fld}.pose")
            g = se2.from_pose(x, y, th)
        else:
            g = _mat(spec_a["matrix"], f"{fld}.matrix")
            if not se2.is_group(g):
                if policy == "verbatim":
                    if not np.allclose(g[2], (0.0, 0.0, 1.0)):
                        raise ConfigError("bottom row must be (0, 0, 1)", field=f"{fld}.matrix")
                else:
                    x, y, th = se2.to_pose(g)
                    warnings.warn(
                        f"{fld}.matrix is not in SE(2); rebuilt from pose "
                        f"(x={x:.6g}, y={y:.6g}, theta={th:.6g})",
                        stacklevel=2,
                    )
                    g = se2.from_pose(x, y, th)
                    repaired.append(a)
        poses.append(g)

        if "mu" in spec_a:
            if any(k in spec_a for k in ("u", "u_matrices", "lam", "lam_matrices")):
                raise ConfigError("give either 'mu' or 'u'/'lam', not both", field=fld)
            mu = _vec(spec_a["mu"], n, f"{fld}.mu")
            W_a = _metric(spec_a.get("W", data.get("W")), f"{fld}.W" if "W" in spec_a else "W")
            u0[a] = W_a.inverse_on_r(mu)
            lam0[a, s_idx] = mu[s_idx]
            per_agent_W.append(W_a)
            continue

        if "u_matrices" in spec_a:
            try:
                u0[a] = se2.vee(np.sum([_mat(m, f"{fld}.u_matrices") for m in spec_a["u_matrices"]], axis=0))
            except InputError as exc:
                raise ConfigError(str(exc), field=f"{fld}.u_matrices") from None
        elif "u" in spec_a:
            u = _vec(spec_a["u"], n, f"{fld}.u", allowed=(len(r_idx), n))
            if u.size == n:
                u0[a] = u
            else:
                u0[a, r_idx] = u
        if np.any(u0[a, s_idx] != 0.0):
            raise ConfigError("u must vanish on the unactuated directions", field=f"{fld}.u")
        if "lam" in spec_a:
            lam = _vec(spec_a["lam"], n, f"{fld}.lam", allowed=(len(s_idx), n))
            if lam.size == n:
                if np.any(lam[r_idx] != 0.0):
                    raise ConfigError("lam must vanish on the actuated directions", field=f"{fld}.lam")
                lam0[a] = lam
            else:
                lam0[a, s_idx] = lam
        per_agent_W.append(_metric(spec_a.get("W", data.get("W")), f"{fld}.W" if "W" in spec_a else "W"))

    graph = _graph(data.get("graph", "complete"), r)
    params = _potential(data, graph)

    output = data.get("output", {}) or {}
    if not isinstance(output, dict):
        raise ConfigError("must be a mapping", field="output")

    cfg = ScenarioConfig(
        name=str(data.get("name", "scenario")),
        poses=np.array(poses),
        u0=u0,
        lam0=lam0,
        graph=graph,
        params=params,
        metrics=per_agent_W,
        formulation=formulation,
        integrator=spec,
        gamma_mode=gamma_mode,
        stride=stride,
        reorthonormalize=reorth,
        output=output,
        repaired_agents=tuple(repaired),
        source=copy.deepcopy(data),
    )
    if policy == "verbatim" and cfg.reorthonormalize_enabled and not all(se2.is_group(g) for g in cfg.poses):
        raise ConfigError(
            "verbatim non-SE(2) initial matrices cannot be re-orthonormalized", field="initial_matrix_policy"
        )
    return cfg


def _metric(value, fld):
    if value is None:
        value = se2.DEFAULT_METRIC
    try:
        return CostMetric(np.array(value, dtype=float), se2.DECOMPOSITION)
    except (InputError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc), field=fld) from None


def _graph(value, r):
    try:
        if value == "complete":
            return InteractionGraph.complete(r)
        if isinstance(value, dict) and "edges" in value:
            value = value["edges"]
        if not isinstance(value, list):
            raise ConfigError("must be 'complete' or a list of [i, j] pairs", field="graph")
        edges = []
        for e in value:
            if not (isinstance(e, (list, tuple)) and len(e) == 2):
                raise ConfigError(f"edge must be a pair, got {e!r}", field="graph")
            edges.append(tuple(int(k) for k in e))
        return InteractionGraph(r, edges)
    except InputError as exc:
        raise ConfigError(str(exc), field="graph") from None


def _potential(data, graph):
    pot = data.get("potential", {}) or {}
    if not isinstance(pot, dict):
        raise ConfigError("must be a mapping", field="potential")
    sigma = pot.get("sigma", 1.0)
    dist = pot.get("d", 0.1)
    table = {}
    try:
        for e in graph.edges:
            table[e] = EdgeParams(float(sigma), float(dist))
        for k, over in enumerate(data.get("edges", []) or []):
            fld = f"edges[{k}]"
            if not isinstance(over, dict) or "pair" not in over:
                raise ConfigError("must be a mapping with a 'pair' entry", field=fld)
            i, j = (int(v) for v in over["pair"])
            key = (min(i, j), max(i, j))
            if key not in table:
                raise ConfigError(f"{key} is not an edge of the graph", field=fld)
            table[key] = EdgeParams(float(over.get("sigma", table[key].sigma)), float(over.get("d", table[key].d)))
        return PotentialParams(graph, table, float(pot.get("safety_radius", 0.0)))
    except InputError as exc:
        raise ConfigError(str(exc), field="potential") from None
