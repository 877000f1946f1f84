"""Trajectory files: CSV (primary) and an optional JSON mirror.

Columns: ``t``, then per agent ``x_a, y_a, theta_a`` followed by the state
coefficients (``u1_a, u2_a, lam3_a`` for the Lagrangian form or
``mu1_a, mu2_a, mu3_a`` for the Hamiltonian form), then the monitors
``min_distance, hamiltonian, orth_defect``.  Agent labels are 1-based.
Numbers use 17 significant digits so values round-trip exactly.
"""
import csv
import json
import re
from dataclasses import dataclass

import numpy as np

from . import se2
from .dynamics import HAMILTONIAN, LAGRANGIAN
from .errors import InputError

MONITORS = ("min_distance", "hamiltonian", "orth_defect")
FMT = "%.17g"


class TrajectoryParseError(InputError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def state_labels(formulation, decomposition=se2.DECOMPOSITION):
    if formulation == HAMILTONIAN:
        return [f"mu{k + 1}" for k in range(decomposition.n)]
    return [f"u{k + 1}" for k in decomposition.r_indices] + [f"lam{k + 1}" for k in decomposition.s_indices]


def header(formulation, n_agents, decomposition=se2.DECOMPOSITION):
    cols = ["t"]
    for a in range(1, n_agents + 1):
        cols += [f"x_{a}", f"y_{a}", f"theta_{a}"]
        cols += [f"{lab}_{a}" for lab in state_labels(formulation, decomposition)]
    return cols + list(MONITORS)


def _state_columns(rec, decomposition=se2.DECOMPOSITION):
    """(K, r, k) array matching :func:`state_labels`."""
    if rec.formulation == HAMILTONIAN:
        return rec.states
    n = decomposition.n
    u = rec.states[:, :, :n][:, :, list(decomposition.r_indices)]
    lam = rec.states[:, :, n:][:, :, list(decomposition.s_indices)]
    return np.concatenate([u, lam], axis=2)


def record_rows(rec):
    K, r = len(rec.times), rec.n_agents
    per_agent = np.concatenate([rec.pose_triples(), _state_columns(rec)], axis=2)
    per_agent = per_agent.reshape(K, r * per_agent.shape[2])
    mon = np.stack([rec.min_distance, rec.hamiltonian, rec.orth_defect], axis=1)
    return np.concatenate([rec.times[:, None], per_agent, mon], axis=1)


def write_csv(rec, path):
    rows = record_rows(rec)
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header(rec.formulation, rec.n_agents)) + "\n")
        for row in rows:
            fh.write(",".join(FMT % v for v in row) + "\n")
    return path


def write_json(rec, path, extra=None):
    doc = {
        "formulation": rec.formulation,
        "columns": header(rec.formulation, rec.n_agents),
        "rows": [[float(v) for v in row] for row in record_rows(rec)],
        "steps_completed": rec.steps_completed,
        "steps_requested": rec.steps_requested,
        "error": rec.error,
        "meta": rec.meta,
    }
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return path


@dataclass
class TrajectoryTable:
    """Parsed trajectory file."""

    formulation: str
    columns: list
    times: np.ndarray
    poses: np.ndarray  # (K, r, 3) x, y, theta
    states: np.ndarray  # (K, r, k)
    monitors: dict

    @property
    def n_agents(self):
        return self.poses.shape[1]

    def controls(self, W=None):
        """Body velocities (K, r, n); Hamiltonian files use ``u* = W^-1 mu_r``."""
        d = se2.DECOMPOSITION
        K, r = self.times.size, self.n_agents
        if self.formulation == LAGRANGIAN:
            u = np.zeros((K, r, d.n))
            u[:, :, list(d.r_indices)] = self.states[:, :, : d.m]
            return u
        from .lie_core import CostMetric

        metric = CostMetric(se2.DEFAULT_METRIC if W is None else W, d)
        return metric.inverse_on_r(self.states)


_AGENT_COL = re.compile(r"^(x|y|theta|u\d+|lam\d+|mu\d+)_(\d+)$")


def read_csv(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            cols = next(reader)
        except StopIteration:
            raise TrajectoryParseError("empty file", line=1) from None
        if not cols or cols[0] != "t" or tuple(cols[-3:]) != MONITORS:
            raise TrajectoryParseError("header must start with 't' and end with the monitor columns", line=1)
        agents = []
        for c in cols[1:-3]:
            m = _AGENT_COL.match(c)
            if not m:
                raise TrajectoryParseError(f"unexpected column {c!r}", line=1)
            agents.append(int(m.group(2)))
        r = max(agents) if agents else 0
        formulation = HAMILTONIAN if any(c.startswith("mu") for c in cols) else LAGRANGIAN
        if r == 0 or cols != header(formulation, r):
            raise TrajectoryParseError("header does not match the trajectory layout", line=1)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(cols):
                raise TrajectoryParseError(f"expected {len(cols)} fields, got {len(row)}", line=lineno)
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise TrajectoryParseError(str(exc), line=lineno) from None
    data = np.array(rows, dtype=float).reshape(-1, len(cols))
    k = len(state_labels(formulation))
    per_agent = data[:, 1:-3].reshape(len(data), r, 3 + k)
    if data.shape[0] > 1 and np.any(np.diff(data[:, 0]) <= 0):
        raise TrajectoryParseError("times must be strictly increasing")
    return TrajectoryTable(
        formulation=formulation,
        columns=cols,
        times=data[:, 0],
        poses=per_agent[:, :, :3],
        states=per_agent[:, :, 3:],
        monitors={name: data[:, -3 + i] for i, name in enumerate(MONITORS)},
    )
