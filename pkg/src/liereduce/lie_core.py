"""Basis-level Lie algebra arithmetic driven by structure constants.

Algebra elements and their duals are plain coefficient vectors with respect to
a fixed basis ``e_1..e_n`` and its dual basis, normalized so that
``<e^i, e_j> = delta_ij``.  Indices are zero-based throughout the code.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import InputError

VALIDATION_TOL = 1e-12


def _as_vector(v, n, name):
    v = np.asarray(v, dtype=float)
    if v.shape != (n,):
        raise InputError(f"{name} must have shape ({n},), got {v.shape}")
    return v


class StructureConstants:
    """Structure constants ``C[k, i, j]``: coefficient of ``e_k`` in ``[e_i, e_j]``.

    Antisymmetry and the Jacobi identity are checked on construction.
    """

    def __init__(self, C, tol=VALIDATION_TOL):
        C = np.array(C, dtype=float)
        if C.ndim != 3 or not (C.shape[0] == C.shape[1] == C.shape[2]) or C.shape[0] == 0:
            raise InputError(f"structure constants must be an (n, n, n) array, got {C.shape}")
        if not np.all(np.isfinite(C)):
            raise InputError("structure constants must be finite")
        antisym = np.max(np.abs(C + C.transpose(0, 2, 1)))
        if antisym > tol:
            raise InputError(f"structure constants are not antisymmetric (defect {antisym:.3g})")
        jac = jacobi_defect(C)
        if jac > tol:
            raise InputError(f"structure constants violate the Jacobi identity (defect {jac:.3g})")
        C.setflags(write=False)
        self.C = C

    @property
    def n(self):
        return self.C.shape[0]

    def __repr__(self):
        return f"StructureConstants(n={self.n})"


def jacobi_defect(C):
    """Largest absolute entry of the cyclic Jacobi sum over all basis triples."""
    C = np.asarray(C, dtype=float)
    # J[l,i,j,k] = sum_m C[m,i,j] C[l,m,k]  (i.e. coefficient of e_l in [[e_i,e_j],e_k])
    J = np.einsum("mij,lmk->lijk", C, C)
    cyc = J + J.transpose(0, 2, 3, 1) + J.transpose(0, 3, 1, 2)
    return float(np.max(np.abs(cyc))) if cyc.size else 0.0


def bracket(sc, xi, eta):
    """Lie bracket ``[xi, eta]`` of two algebra coefficient vectors."""
    xi = _as_vector(xi, sc.n, "xi")
    eta = _as_vector(eta, sc.n, "eta")
    return np.einsum("kij,i,j->k", sc.C, xi, eta)


def ad_star(sc, xi, mu):
    """Coadjoint action: ``<ad*_xi mu, eta> = <mu, [xi, eta]>`` for every eta."""
    xi = _as_vector(xi, sc.n, "xi")
    mu = _as_vector(mu, sc.n, "mu")
    return np.einsum("mik,m,i->k", sc.C, mu, xi)


def ad_star_batch(sc, xi, mu):
    """Row-wise :func:`ad_star` for stacked ``(r, n)`` arrays; no validation."""
    n = sc.n
    M = (mu @ sc.C.reshape(n, n * n)).reshape(-1, n, n)  # M[a, i, k] = sum_m mu_am C[m, i, k]
    return (xi[:, None, :] @ M)[:, 0, :]


def pairing(mu, xi):
    """Natural pairing of a dual vector with an algebra vector."""
    mu = np.asarray(mu, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if mu.shape != xi.shape or mu.ndim != 1:
        raise InputError(f"pairing needs equal-length vectors, got {mu.shape} and {xi.shape}")
    return float(mu @ xi)


@dataclass(frozen=True)
class Decomposition:
    """Split of the basis indices into actuated ``r`` and unactuated ``s`` parts."""

    r_indices: Tuple[int, ...]
    s_indices: Tuple[int, ...]

    def __post_init__(self):
        r = tuple(int(i) for i in self.r_indices)
        s = tuple(int(i) for i in self.s_indices)
        object.__setattr__(self, "r_indices", r)
        object.__setattr__(self, "s_indices", s)
        if set(r) & set(s):
            raise InputError("decomposition index sets must be disjoint")
        if len(set(r)) != len(r) or len(set(s)) != len(s):
            raise InputError("decomposition index sets contain duplicates")
        if not r:
            raise InputError("actuated part must be non-empty")
        if sorted(r + s) != list(range(len(r) + len(s))):
            raise InputError("decomposition must cover 0..n-1 exactly")

    @property
    def n(self):
        return len(self.r_indices) + len(self.s_indices)

    @property
    def m(self):
        return len(self.r_indices)

    def mask(self, part):
        idx = self._indices(part)
        out = np.zeros(self.n, dtype=bool)
        out[list(idx)] = True
        return out

    def _indices(self, part):
        part = str(part).lower()
        if part == "r":
            return self.r_indices
        if part == "s":
            return self.s_indices
        raise InputError(f"part must be 'r' or 's', got {part!r}")


def check_decomposition(sc, d):
    """True iff ``[s,s] <= s``, ``[s,r] <= r`` and ``[r,r] <= s`` on basis brackets."""
    if d.n != sc.n:
        return False
    C = sc.C
    r, s = list(d.r_indices), list(d.s_indices)

    def inside(i_set, j_set, target):
        outside = [k for k in range(sc.n) if k not in target]
        if not i_set or not j_set or not outside:
            return True
        block = C[np.ix_(outside, i_set, j_set)]
        return bool(np.all(block == 0.0))

    return inside(s, s, s) and inside(s, r, r) and inside(r, r, s)


def project(v, d, part):
    """Zero the coefficients outside the ``part`` ('r' or 's') index set.

    Works on a single vector or on stacked rows (last axis is the algebra axis).
    """
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != d.n:
        raise InputError(f"vector length {v.shape[-1]} does not match decomposition size {d.n}")
    return np.where(d.mask(part), v, 0.0)


class CostMetric:
    """Quadratic control cost ``C(u) = 1/2 u^T W u`` with W supported on the r block."""

    def __init__(self, W, decomposition):
        W = np.array(W, dtype=float)
        d = decomposition
        if W.shape != (d.n, d.n):
            raise InputError(f"W must be {d.n}x{d.n}, got {W.shape}")
        if not np.all(np.isfinite(W)):
            raise InputError("W must be finite")
        if np.max(np.abs(W - W.T)) > VALIDATION_TOL:
            raise InputError("W must be symmetric")
        s = list(d.s_indices)
        if s and (np.any(W[s, :] != 0.0) or np.any(W[:, s] != 0.0)):
            raise InputError("W must vanish on unactuated rows and columns")
        r = list(d.r_indices)
        W_rr = W[np.ix_(r, r)]
        try:
            np.linalg.cholesky(W_rr)
        except np.linalg.LinAlgError:
            raise InputError("W restricted to the actuated block must be positive definite") from None
        W.setflags(write=False)
        self.W = W
        self.decomposition = d
        self._r = r
        self._W_rr_inv = np.linalg.inv(W_rr)

    def cost(self, u):
        u = np.asarray(u, dtype=float)
        return 0.5 * float(u @ self.W @ u)

    def inverse_on_r(self, nu):
        """Solve ``W u = project(nu, r)`` for u supported on the r block."""
        nu = np.asarray(nu, dtype=float)
        u = np.zeros_like(nu)
        u[..., self._r] = nu[..., self._r] @ self._W_rr_inv.T
        return u

    def __repr__(self):
        return f"CostMetric(W={self.W.tolist()!r})"


def cost_gradient(W, u, tol=0.0):
    """``dC/du = W u`` for u supported on the actuated part."""
    d = W.decomposition
    u = _as_vector(u, d.n, "u")
    s = list(d.s_indices)
    if s and np.any(np.abs(u[s]) > tol):
        raise InputError("u has nonzero unactuated components")
    return W.W @ u
