"""Reduced necessary conditions for the multi-agent optimal control problem.

Two equivalent formulations are provided:

* Lagrangian split (actuated controls ``u`` and unactuated multipliers ``lam``)::

      W u_dot   = [ad*_u lam]_r      - F_r
      lam_dot   = [ad*_u (W u)]_s    - F_s

* Hamiltonian (PMP costate ``mu``)::

      u*        = W^{-1} mu_r
      mu_dot    = ad*_{u*} mu - F

with ``g_dot = g hat(u)`` and ``F_i = sum_{j in N_i}`` of the body-frame
gradient of ``V_ij`` with respect to ``g_i``.  Both are linked by the map
``mu = W u + lam`` and the flow conserves
``h = sum_i 1/2 mu_r^T W^{-1} mu_r + 1/2 sum_i sum_j V_ij``.
"""
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import lie_core, se2
from .errors import InputError
from .interaction import InteractionGraph, PairTable, PotentialParams
from .lie_core import CostMetric, Decomposition, project

LAGRANGIAN = "lagrangian"
HAMILTONIAN = "hamiltonian"
GAMMA_MODES = ("oracle", "paper")


def optimal_control(mu, W, d=None):
    """Maximizer of ``<mu, u> - C(u)`` over u in the actuated subspace."""
    return W.inverse_on_r(np.asarray(mu, dtype=float))


def legendre(u, lam, W, d=None, tol=0.0):
    """``mu = W u + lam`` for u on the r block and lam on the s block."""
    d = d or W.decomposition
    u = np.asarray(u, dtype=float)
    lam = np.asarray(lam, dtype=float)
    s_mask, r_mask = d.mask("s"), d.mask("r")
    if np.any(np.abs(u[..., s_mask]) > tol):
        raise InputError("u must vanish on the unactuated block")
    if np.any(np.abs(lam[..., r_mask]) > tol):
        raise InputError("lam must vanish on the actuated block")
    return u @ W.W.T + lam


def legendre_inverse(mu, W, d=None):
    d = d or W.decomposition
    mu = np.asarray(mu, dtype=float)
    return W.inverse_on_r(mu), project(mu, d, "s")


@dataclass
class MultiAgentSystem:
    """Everything the vector fields need apart from the state itself."""

    graph: InteractionGraph
    params: PotentialParams
    metrics: Sequence[CostMetric]
    structure: lie_core.StructureConstants = se2.STRUCTURE
    decomposition: Decomposition = se2.DECOMPOSITION
    gamma_mode: str = "oracle"
    _pairs: PairTable = field(init=False, repr=False)

    def __post_init__(self):
        if self.gamma_mode not in GAMMA_MODES:
            raise InputError(f"gamma_mode must be one of {GAMMA_MODES}, got {self.gamma_mode!r}")
        if len(self.metrics) != self.graph.r:
            raise InputError(f"need one cost metric per agent ({self.graph.r}), got {len(self.metrics)}")
        # a fully actuated split (empty s) needs no bracket inclusions: lam stays 0
        if self.decomposition.s_indices and not lie_core.check_decomposition(self.structure, self.decomposition):
            raise InputError("decomposition does not satisfy the bracket inclusions")
        for W in self.metrics:
            if W.decomposition != self.decomposition:
                raise InputError("all cost metrics must use the system decomposition")
        self._pairs = PairTable(self.graph, self.params)
        self._W = np.stack([W.W for W in self.metrics])
        self._r = self.decomposition.mask("r")
        self._s = self.decomposition.mask("s")
        r = list(self.decomposition.r_indices)
        self._Wrr_inv = np.stack([np.linalg.inv(W.W[np.ix_(r, r)]) for W in self.metrics])
        # inverse on the r block padded with zeros, so controls are one matmul
        self._W_pinv = np.zeros_like(self._W)
        for a, inv in enumerate(self._Wrr_inv):
            self._W_pinv[a][np.ix_(r, r)] = inv

    @classmethod
    def uniform(cls, r, sigma=1.0, d=0.1, W=None, graph=None, gamma_mode="oracle", safety_radius=0.0):
        graph = graph or InteractionGraph.complete(r)
        metric = CostMetric(se2.DEFAULT_METRIC if W is None else W, se2.DECOMPOSITION)
        return cls(
            graph=graph,
            params=PotentialParams.uniform(graph, sigma, d, safety_radius),
            metrics=[metric] * r,
            gamma_mode=gamma_mode,
        )

    @property
    def n_agents(self):
        return self.graph.r

    @property
    def pairs(self):
        return self._pairs

    # stacked helpers -------------------------------------------------------

    def coupling(self, G):
        """``F_i`` for every agent, shape (r, n)."""
        return self._pairs.forces(G, self.gamma_mode)

    def controls(self, mu):
        """Row-wise optimal controls for stacked costates."""
        return (self._W_pinv @ mu[:, :, None])[:, :, 0]

    def legendre(self, u, lam):
        return (self._W @ np.asarray(u)[:, :, None])[:, :, 0] + lam

    def legendre_inverse(self, mu):
        return self.controls(mu), np.where(self._s, mu, 0.0)

    # vector fields -----------------------------------------------------------

    def hamiltonian_rhs(self, G, mu):
        """Returns ``(xi, mu_dot)``; ``xi`` is the body velocity of each agent."""
        u = self.controls(mu)
        dmu = lie_core.ad_star_batch(self.structure, u, mu) - self.coupling(G)
        return u, dmu

    def lagrangian_rhs(self, G, u, lam):
        """Returns ``(xi, u_dot, lam_dot)`` for the split system."""
        F = self.coupling(G)
        Wu = (self._W @ u[:, :, None])[:, :, 0]
        # under the inclusions ad*_u(Wu) lies in s* and ad*_u lam in r*, so the
        # projections below reproduce the split system; with s empty they give
        # d/dt(Wu) = ad*_u(Wu) - F
        a = lie_core.ad_star_batch(self.structure, u, Wu + lam) - F
        du = (self._W_pinv @ a[:, :, None])[:, :, 0]
        dlam = np.where(self._s, a, 0.0)
        return u, du, dlam

    def kinetic_energy(self, mu):
        r = self._r
        mr = mu[:, r]
        return 0.5 * float(np.einsum("ai,aij,aj->", mr, self._Wrr_inv, mr))

    def reduced_hamiltonian(self, G, mu):
        return self.kinetic_energy(mu) + self._pairs.potential_energy(G)


@dataclass
class LagrangianState:
    g: np.ndarray
    u: np.ndarray
    lam: np.ndarray
    formulation: str = field(default=LAGRANGIAN, init=False)

    def vector(self):
        return np.concatenate([self.u, self.lam], axis=1)


@dataclass
class HamiltonianState:
    g: np.ndarray
    mu: np.ndarray
    formulation: str = field(default=HAMILTONIAN, init=False)

    def vector(self):
        return self.mu


def check_state(system, state, tol=0.0):
    """Validate shapes and the support conditions of a Lagrangian state."""
    r, n = system.n_agents, system.decomposition.n
    g = np.asarray(state.g, dtype=float)
    if g.shape != (r, 3, 3):
        raise InputError(f"poses must have shape ({r}, 3, 3), got {g.shape}")
    if isinstance(state, LagrangianState):
        for name in ("u", "lam"):
            v = np.asarray(getattr(state, name))
            if v.shape != (r, n):
                raise InputError(f"{name} must have shape ({r}, {n}), got {v.shape}")
        if np.any(np.abs(state.u[:, system._s]) > tol):
            raise InputError("u must vanish on the unactuated block")
        if np.any(np.abs(state.lam[:, system._r]) > tol):
            raise InputError("lam must vanish on the actuated block")
    else:
        if np.asarray(state.mu).shape != (r, n):
            raise InputError(f"mu must have shape ({r}, {n})")
    return state


def to_hamiltonian(system, state):
    """Map a Lagrangian state to the costate form via ``mu = W u + lam``."""
    return HamiltonianState(np.array(state.g, dtype=float), system.legendre(state.u, state.lam))


def to_lagrangian(system, state):
    u, lam = system.legendre_inverse(state.mu)
    return LagrangianState(np.array(state.g, dtype=float), u, lam)


def lagrangian_rhs(system, state):
    return system.lagrangian_rhs(np.asarray(state.g, dtype=float), state.u, state.lam)


def hamiltonian_rhs(system, state):
    return system.hamiltonian_rhs(np.asarray(state.g, dtype=float), state.mu)


def reduced_hamiltonian(system, state):
    if isinstance(state, LagrangianState):
        state = to_hamiltonian(system, state)
    return system.reduced_hamiltonian(np.asarray(state.g, dtype=float), state.mu)


__all__ = [
    "HAMILTONIAN",
    "LAGRANGIAN",
    "HamiltonianState",
    "LagrangianState",
    "MultiAgentSystem",
    "check_state",
    "hamiltonian_rhs",
    "lagrangian_rhs",
    "legendre",
    "legendre_inverse",
    "optimal_control",
    "reduced_hamiltonian",
    "to_hamiltonian",
    "to_lagrangian",
]
