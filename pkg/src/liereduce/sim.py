"""Time integration of the reduced systems with trajectory recording.

Three one-step maps are available:

``euler_matrix``
    explicit Euler on the matrix entries, ``g <- g + h g hat(xi)``.
``lie_euler``
    ``g <- g exp(h xi)``; costates by explicit Euler.
``rk4_chart``
    classical RK4 in the exponential chart around the current pose
    (Munthe-Kaas form, stage velocities corrected by ``dexp^{-1}``).
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import se2
from .dynamics import HAMILTONIAN, LAGRANGIAN, HamiltonianState, LagrangianState
from .errors import CollisionError, InputError, NumericalError

log = logging.getLogger(__name__)

METHODS = ("euler_matrix", "lie_euler", "rk4_chart")


@dataclass(frozen=True)
class IntegratorSpec:
    method: str = "rk4_chart"
    h: float = 1e-3
    N: int = 1000

    def __post_init__(self):
        if self.method not in METHODS:
            raise InputError(f"method must be one of {METHODS}, got {self.method!r}")
        if not (np.isfinite(self.h) and self.h > 0):
            raise InputError(f"step size must be positive, got {self.h}")
        if int(self.N) != self.N or self.N < 1:
            raise InputError(f"number of steps must be a positive integer, got {self.N}")


class VectorField:
    """Adapter exposing either formulation as ``(G, z) -> (xi, z_dot)``.

    For the Lagrangian form ``z = [u | lam]`` (shape (r, 2n)); for the
    Hamiltonian form ``z = mu``.
    """

    def __init__(self, system, formulation):
        if formulation not in (LAGRANGIAN, HAMILTONIAN):
            raise InputError(f"unknown formulation {formulation!r}")
        self.system = system
        self.formulation = formulation
        self.n = system.decomposition.n

    def __call__(self, G, z):
        if self.formulation == HAMILTONIAN:
            return self.system.hamiltonian_rhs(G, z)
        n = self.n
        xi, du, dlam = self.system.lagrangian_rhs(G, z[:, :n], z[:, n:])
        return xi, np.concatenate([du, dlam], axis=1)

    def pack(self, state):
        return np.array(state.vector(), dtype=float)

    def unpack(self, G, z):
        if self.formulation == HAMILTONIAN:
            return HamiltonianState(G, z)
        return LagrangianState(G, z[:, : self.n], z[:, self.n :])

    def costate(self, z):
        """Hamiltonian costate for monitoring, whatever the formulation."""
        if self.formulation == HAMILTONIAN:
            return z
        return self.system.legendre(z[:, : self.n], z[:, self.n :])

    def controls(self, z):
        if self.formulation == HAMILTONIAN:
            return self.system.controls(z)
        return z[:, : self.n]


def euler_matrix_step(f, G, z, h):
    xi, dz = f(G, z)
    return G + h * (G @ se2.hat(xi)), z + h * dz


def lie_euler_step(f, G, z, h):
    xi, dz = f(G, z)
    return G @ se2.exp(h * xi), z + h * dz


def rk4_chart_step(f, G, z, h):
    xi1, k1 = f(G, z)
    th = 0.5 * h * xi1
    xi2, k2 = f(G @ se2.exp(th), z + 0.5 * h * k1)
    c2 = se2.dexpinv(th, xi2)
    th = 0.5 * h * c2
    xi3, k3 = f(G @ se2.exp(th), z + 0.5 * h * k2)
    c3 = se2.dexpinv(th, xi3)
    th = h * c3
    xi4, k4 = f(G @ se2.exp(th), z + h * k3)
    c4 = se2.dexpinv(th, xi4)
    theta = (h / 6.0) * (xi1 + 2.0 * c2 + 2.0 * c3 + c4)
    return G @ se2.exp(theta), z + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


_STEPPERS = {
    "euler_matrix": euler_matrix_step,
    "lie_euler": lie_euler_step,
    "rk4_chart": rk4_chart_step,
}


def _state_step(stepper, system, state, h):
    f = VectorField(system, state.formulation)
    G, z = stepper(f, np.asarray(state.g, dtype=float), f.pack(state), h)
    return f.unpack(G, z)


def step_euler_matrix(system, state, h):
    return _state_step(euler_matrix_step, system, state, h)


def step_lie_euler(system, state, h):
    return _state_step(lie_euler_step, system, state, h)


def step_rk4_chart(system, state, h):
    return _state_step(rk4_chart_step, system, state, h)


@dataclass
class TrajectoryRecord:
    """Recorded samples of one run.

    ``states`` holds ``[u | lam]`` rows (Lagrangian) or ``mu`` (Hamiltonian);
    ``controls`` always holds the body velocities that drove the poses.
    """

    formulation: str
    times: np.ndarray
    poses: np.ndarray  # (K, r, 3, 3)
    states: np.ndarray
    controls: np.ndarray
    min_distance: np.ndarray
    hamiltonian: np.ndarray
    orth_defect: np.ndarray
    steps_completed: int
    steps_requested: int
    error: Optional[dict] = None
    meta: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.error is None

    @property
    def n_agents(self):
        return self.poses.shape[1]

    def pose_triples(self):
        """(K, r, 3) array of (x, y, theta)."""
        P = self.poses
        return np.stack([P[..., 0, 2], P[..., 1, 2], np.arctan2(P[..., 1, 0], P[..., 0, 0])], axis=-1)

    def __len__(self):
        return len(self.times)


def integrate(system, state, spec, stride=1, reorthonormalize=False):
    """Integrate ``spec.N`` steps from ``state``; stop at the first collision or NaN.

    Samples every ``stride``-th step (and always the last completed one).
    """
    stride = int(stride)
    if stride < 1:
        raise InputError("record stride must be >= 1")
    f = VectorField(system, state.formulation)
    stepper = _STEPPERS[spec.method]
    pairs = system.pairs
    h = float(spec.h)

    G = np.array(state.g, dtype=float)
    z = f.pack(state)
    rows = []

    def sample(k, G, z):
        mu = f.costate(z)
        rows.append(
            (
                k * h,
                G.copy(),
                z.copy(),
                f.controls(z),
                pairs.min_distance(G),
                system.reduced_hamiltonian(G, mu),
                float(np.max(se2.orthogonality_defect(G))),
            )
        )

    error = None
    k = 0
    try:
        sample(0, G, z)
        for k in range(1, spec.N + 1):
            G, z = stepper(f, G, z, h)
            if reorthonormalize:
                G = se2.project_to_group(G)
            if not (np.all(np.isfinite(G)) and np.all(np.isfinite(z))):
                raise NumericalError(f"non-finite state at step {k}", step=k, time=k * h)
            if k % stride == 0 or k == spec.N:
                sample(k, G, z)
        completed = spec.N
    except CollisionError as exc:
        completed = k - 1 if rows else 0
        exc.step, exc.time = k, k * h
        error = {"kind": "collision", "message": str(exc), "step": k, "time": k * h, "pair": exc.pair}
    except NumericalError as exc:
        completed = k - 1
        error = {"kind": "numerical", "message": str(exc), "step": k, "time": k * h}

    if error is not None:
        log.warning("integration stopped at step %d: %s", error["step"], error["message"])

    r, width = G.shape[0], z.shape[1]
    n = f.n
    if rows:
        t, Gs, zs, us, dmin, ham, orth = zip(*rows)
    else:
        t, Gs, zs, us, dmin, ham, orth = (), np.empty((0, r, 3, 3)), np.empty((0, r, width)), np.empty((0, r, n)), (), (), ()
    return TrajectoryRecord(
        formulation=state.formulation,
        times=np.array(t, dtype=float),
        poses=np.array(Gs, dtype=float).reshape(-1, r, 3, 3),
        states=np.array(zs, dtype=float).reshape(-1, r, width),
        controls=np.array(us, dtype=float).reshape(-1, r, n),
        min_distance=np.array(dmin, dtype=float),
        hamiltonian=np.array(ham, dtype=float),
        orth_defect=np.array(orth, dtype=float),
        steps_completed=completed,
        steps_requested=int(spec.N),
        error=error,
    )


def run(config):
    """Integrate a validated scenario configuration."""
    system = config.system()
    state = config.initial_state()
    rec = integrate(
        system,
        state,
        config.integrator,
        stride=config.stride,
        reorthonormalize=config.reorthonormalize_enabled,
    )
    rec.meta.update(scenario=config.name, gamma_mode=config.gamma_mode, method=config.integrator.method)
    return rec
