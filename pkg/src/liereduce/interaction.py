"""Interaction graph and pairwise collision-avoidance potentials on SE(2).

The pair potential is ``V = sigma / (2 (|p_i - p_j|^2 - d^2))`` where ``p`` is
the translation part of each pose.  Forces are returned as dual vectors in the
body frame of agent i: coefficient k is ``d/dt V(g_i exp(t e_k), g_j)``.
"""
import warnings
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import CollisionError, InputError
from .lie_core import project


class InteractionGraph:
    """Static undirected graph over agents ``0..r-1``."""

    def __init__(self, r, edges):
        r = int(r)
        if r < 1:
            raise InputError("graph needs at least one agent")
        canon = set()
        for e in edges:
            i, j = (int(k) for k in e)
            if i == j:
                raise InputError(f"self-loop on agent {i}")
            if not (0 <= i < r and 0 <= j < r):
                raise InputError(f"edge {(i, j)} references a missing agent")
            canon.add((min(i, j), max(i, j)))
        self.r = r
        self.edges = tuple(sorted(canon))
        self._nbrs = [[] for _ in range(r)]
        for i, j in self.edges:
            self._nbrs[i].append(j)
            self._nbrs[j].append(i)
        self._nbrs = [tuple(sorted(n)) for n in self._nbrs]
        if not self.is_connected():
            warnings.warn("interaction graph is not connected", stacklevel=2)

    @classmethod
    def complete(cls, r):
        return cls(r, combinations(range(r), 2))

    def neighbors(self, i):
        if not 0 <= i < self.r:
            raise InputError(f"agent index {i} out of range for {self.r} agents")
        return self._nbrs[i]

    def is_connected(self):
        seen, stack = {0}, [0]
        while stack:
            for j in self._nbrs[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        return len(seen) == self.r

    def __repr__(self):
        return f"InteractionGraph(r={self.r}, edges={list(self.edges)})"


@dataclass(frozen=True)
class EdgeParams:
    sigma: float
    d: float

    def __post_init__(self):
        if not (np.isfinite(self.sigma) and self.sigma >= 0):
            raise InputError(f"sigma must be a non-negative real, got {self.sigma}")
        if not (np.isfinite(self.d) and self.d > 0):
            raise InputError(f"d must be positive, got {self.d}")


class PotentialParams:
    """Per-edge potential parameters keyed by unordered pair, plus a safety radius.

    Keys are normalized so ``params[i, j] is params[j, i]``.  ``sigma = 0`` is
    accepted to switch a pair off.
    """

    def __init__(self, graph, edge_params, safety_radius=0.0):
        self.graph = graph
        self._p = {}
        for key, val in dict(edge_params).items():
            i, j = key
            k = (min(i, j), max(i, j))
            if k not in graph.edges:
                raise InputError(f"parameters given for non-edge {key}")
            self._p[k] = val if isinstance(val, EdgeParams) else EdgeParams(*val)
        missing = [e for e in graph.edges if e not in self._p]
        if missing:
            raise InputError(f"missing potential parameters for edges {missing}")
        self.safety_radius = float(safety_radius)
        self.sigma = np.array([self._p[e].sigma for e in graph.edges])
        self.d = np.array([self._p[e].d for e in graph.edges])

    @classmethod
    def uniform(cls, graph, sigma, d, safety_radius=0.0):
        return cls(graph, {e: EdgeParams(sigma, d) for e in graph.edges}, safety_radius)

    def __getitem__(self, pair):
        i, j = pair
        return self._p[(min(i, j), max(i, j))]


def _shell(edge, gi, gj):
    delta = np.asarray(gi)[:2, 2] - np.asarray(gj)[:2, 2]
    den = float(delta @ delta) - edge.d**2
    if den <= 0.0:
        raise CollisionError(
            f"squared distance {float(delta @ delta):.6g} inside collision shell d^2={edge.d**2:.6g}"
        )
    return delta, den


def potential(edge, gi, gj):
    _, den = _shell(edge, gi, gj)
    return edge.sigma / (2.0 * den)


def coupling_force(edge, gi, gj):
    """Body-frame gradient of the pair potential with respect to ``g_i``.

    dV/dp_i = -sigma (p_i - p_j) / D^2 with D = |p_i - p_j|^2 - d^2; moving
    along e2 (e3) displaces p_i by the first (second) column of the rotation
    block, and e1 does not move p_i.
    """
    delta, den = _shell(edge, gi, gj)
    grad_p = -edge.sigma * delta / den**2
    R = np.asarray(gi, dtype=float)[:2, :2]
    return np.array([0.0, grad_p @ R[:, 0], grad_p @ R[:, 1]])


def paper_gamma(edge, gi, gj):
    """Printed closed-form coefficients ``(Gamma, Gamma_tilde)`` of the e^2 and
    e^3 coupling terms, reproduced verbatim (factor 1/16, no heading dependence).
    """
    _, den = _shell(edge, gi, gj)
    dx = gj[0, 2] - gi[0, 2]
    dy = gj[1, 2] - gi[1, 2]
    scale = -edge.sigma / (16.0 * den**2)
    return scale * dx, scale * dy


def paper_coupling_force(edge, gi, gj):
    """Force vector that, inserted into the reduced equations (which subtract the
    coupling), replays the printed unicycle system: ``-Gamma`` in the e^2 equation
    and ``+Gamma_tilde`` in the e^3 equation.
    """
    gam, gam_t = paper_gamma(edge, gi, gj)
    return np.array([0.0, gam, -gam_t])


def gamma_split(force, d):
    """Split a dual vector into its actuated and unactuated parts."""
    return project(force, d, "r"), project(force, d, "s")


def neighbor_sum(graph, params, poses, i, f):
    """Sum ``f(params[i, j], g_i, g_j)`` over neighbours j in ascending order."""
    out = np.zeros(3)
    for j in graph.neighbors(i):
        out = out + f(params[i, j], poses[i], poses[j])
    return out


class PairTable:
    """Vectorized evaluation of all pair terms for stacked poses ``G`` of shape (r, 3, 3)."""

    def __init__(self, graph, params):
        self.r = graph.r
        e = np.array(graph.edges, dtype=int).reshape(-1, 2)
        self.I, self.J = e[:, 0], e[:, 1]
        self.sigma = params.sigma.copy()
        self.d2 = params.d**2
        # incidence matrices give a fixed summation order for the neighbour sums
        E = len(self.I)
        self._inc_i = np.zeros((self.r, E))
        self._inc_j = np.zeros((self.r, E))
        self._inc_i[self.I, np.arange(E)] = 1.0
        self._inc_j[self.J, np.arange(E)] = 1.0
        self._triu = np.triu_indices(self.r, 1)

    def _geometry(self, G):
        P = G[:, :2, 2]
        delta = P[self.I] - P[self.J]
        den = np.einsum("ek,ek->e", delta, delta) - self.d2
        bad = np.flatnonzero(den <= 0.0)
        if bad.size:
            k = bad[0]
            raise CollisionError(
                f"agents {self.I[k]} and {self.J[k]} entered the collision shell",
                pair=(int(self.I[k]), int(self.J[k])),
            )
        return delta, den

    def potential_energy(self, G):
        """``1/2 sum_i sum_{j in N_i} V_ij`` (each unordered edge counted once)."""
        if self.I.size == 0:
            return 0.0
        _, den = self._geometry(G)
        return float(np.sum(self.sigma / (2.0 * den)))

    def forces(self, G, mode="oracle"):
        """Per-agent neighbour sums of the body-frame coupling force, shape (r, 3)."""
        F = np.zeros((self.r, 3))
        if self.I.size == 0:
            return F
        delta, den = self._geometry(G)
        if mode == "oracle":
            grad = -(self.sigma / den**2)[:, None] * delta
            R = G[:, :2, :2]
            fi = (grad[:, None, :] @ R[self.I])[:, 0, :]
            fj = -(grad[:, None, :] @ R[self.J])[:, 0, :]
        elif mode == "paper":
            # printed form: Gamma_ij = -sigma (x_j - x_i) / (16 D^2), same for y
            c = (self.sigma / (16.0 * den**2))[:, None]
            fi = c * delta * np.array([1.0, -1.0])
            fj = -fi
        else:
            raise InputError(f"unknown gamma mode {mode!r}")
        F[:, 1:] = self._inc_i @ fi + self._inc_j @ fj
        return F

    def min_distance(self, G):
        if self.r < 2:
            return np.inf
        P = G[:, :2, 2]
        diff = P[self._triu[0]] - P[self._triu[1]]
        return float(np.sqrt(np.min(np.einsum("ek,ek->e", diff, diff))))
