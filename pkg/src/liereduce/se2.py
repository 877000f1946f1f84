"""SE(2) as 3x3 homogeneous matrices.

Algebra coordinates follow the basis

    e1 = rotation generator, e2 = body-x translation, e3 = body-y translation,

so ``xi = (omega, v1, v2)`` and ``[e1, e2] = e3``, ``[e3, e1] = e2``,
``[e2, e3] = 0``.  Dual basis matrices are paired with the trace,
``<alpha, xi> = tr(alpha @ xi)``.
"""
import numpy as np

from .errors import DomainError, GroupStateError, InputError
from .lie_core import Decomposition, StructureConstants

EPS_GROUP = 1e-9
SPAN_TOL = 1e-12
FD_STEP = 1e-6
CUT_LOCUS_TOL = 1e-9

BASIS = np.array(
    [
        [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
        [[0.0, 0.0, 1.0], [0.0, 0.0, 0.0], [0.0, 0.0, 0.0]],
        [[0.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]],
    ]
)
DUAL_BASIS = np.array(
    [
        [[0.0, 0.5, 0.0], [-0.5, 0.0, 0.0], [0.0, 0.0, 0.0]],
        [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
        [[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 1.0, 0.0]],
    ]
)
for _m in (BASIS, DUAL_BASIS):
    _m.setflags(write=False)

_C = np.zeros((3, 3, 3))
_C[2, 0, 1], _C[2, 1, 0] = 1.0, -1.0  # [e1, e2] = e3
_C[1, 2, 0], _C[1, 0, 2] = 1.0, -1.0  # [e3, e1] = e2
STRUCTURE = StructureConstants(_C)
DECOMPOSITION = Decomposition((0, 1), (2,))
DEFAULT_METRIC = np.diag([2.0, 1.0, 0.0])


def from_pose(x, y, theta):
    vals = np.array([x, y, theta], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise InputError(f"pose must be finite, got {(x, y, theta)}")
    c, s = np.cos(vals[2]), np.sin(vals[2])
    return np.array([[c, -s, vals[0]], [s, c, vals[1]], [0.0, 0.0, 1.0]])


def to_pose(g):
    """``(x, y, theta)`` with theta from atan2 of the rotation block's first column."""
    g = np.asarray(g, dtype=float)
    return np.array([g[..., 0, 2], g[..., 1, 2], np.arctan2(g[..., 1, 0], g[..., 0, 0])]).T


def orthogonality_defect(g):
    """Frobenius norm of ``R^T R - I`` for the rotation block (batched on leading axes)."""
    R = np.asarray(g, dtype=float)[..., :2, :2]
    D = np.swapaxes(R, -1, -2) @ R - np.eye(2)
    return np.sqrt(np.sum(D * D, axis=(-1, -2)))


def group_defect(g):
    """Largest violation of the SE(2) invariants: bottom row, orthogonality, det = 1."""
    g = np.asarray(g, dtype=float)
    bottom = np.max(np.abs(g[..., 2, :] - np.array([0.0, 0.0, 1.0])), axis=-1)
    det = np.abs(np.linalg.det(g[..., :2, :2]) - 1.0)
    return np.maximum(np.maximum(bottom, det), orthogonality_defect(g))


def check_group(g, tol=EPS_GROUP):
    g = np.asarray(g, dtype=float)
    if g.shape[-2:] != (3, 3):
        raise InputError(f"expected 3x3 matrices, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise GroupStateError("matrix has non-finite entries")
    defect = np.max(group_defect(g))
    if defect > tol:
        raise GroupStateError(f"matrix is not in SE(2) (defect {defect:.3g} > {tol:g})")
    return g


def is_group(g, tol=EPS_GROUP):
    try:
        check_group(g, tol)
    except (GroupStateError, InputError):
        return False
    return True


def project_to_group(g):
    """Nearest SE(2) element in the Frobenius sense (polar factor of the rotation block)."""
    g = np.array(g, dtype=float)
    R = g[..., :2, :2]
    phi = np.arctan2(R[..., 1, 0] - R[..., 0, 1], R[..., 0, 0] + R[..., 1, 1])
    c, s = np.cos(phi), np.sin(phi)
    g[..., 0, 0], g[..., 0, 1] = c, -s
    g[..., 1, 0], g[..., 1, 1] = s, c
    g[..., 2, :] = (0.0, 0.0, 1.0)
    return g


def compose(g, h, tol=EPS_GROUP):
    return check_group(g, tol) @ check_group(h, tol)


def inverse(g, tol=EPS_GROUP):
    g = check_group(g, tol)
    R, t = g[:2, :2], g[:2, 2]
    out = np.eye(3)
    out[:2, :2] = R.T
    out[:2, 2] = -R.T @ t
    return out


def identity():
    return np.eye(3)


def hat(xi):
    """Matrix ``sum_k xi_k e_k``; accepts a 3-vector or stacked ``(..., 3)`` rows."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != 3:
        raise InputError(f"se(2) vectors have 3 components, got shape {xi.shape}")
    X = np.zeros(xi.shape[:-1] + (3, 3))
    X[..., 0, 1] = -xi[..., 0]
    X[..., 1, 0] = xi[..., 0]
    X[..., 0, 2] = xi[..., 1]
    X[..., 1, 2] = xi[..., 2]
    return X


def vee(X, tol=SPAN_TOL):
    X = np.asarray(X, dtype=float)
    if X.shape != (3, 3):
        raise InputError(f"vee expects a 3x3 matrix, got {X.shape}")
    xi = np.array([X[1, 0], X[0, 2], X[1, 2]])
    if np.max(np.abs(hat(xi) - X)) > tol:
        raise InputError("matrix is not in span{e1, e2, e3}")
    return xi


def _sinc_terms(w):
    """``(sin w / w, (1 - cos w) / w)``, finite and accurate through w = 0."""
    w = np.asarray(w, dtype=float)
    half = 0.5 * w
    return np.sinc(w / np.pi), np.sin(half) * np.sinc(half / np.pi)


def exp(xi):
    """Closed-form exponential; accepts a 3-vector or stacked rows."""
    xi = np.asarray(xi, dtype=float)
    if xi.shape[-1] != 3:
        raise InputError(f"se(2) vectors have 3 components, got shape {xi.shape}")
    w, v1, v2 = xi[..., 0], xi[..., 1], xi[..., 2]
    a, b = _sinc_terms(w)
    c, s = np.cos(w), np.sin(w)
    g = np.zeros(xi.shape[:-1] + (3, 3))
    g[..., 0, 0], g[..., 0, 1] = c, -s
    g[..., 1, 0], g[..., 1, 1] = s, c
    g[..., 0, 2] = a * v1 - b * v2
    g[..., 1, 2] = b * v1 + a * v2
    g[..., 2, 2] = 1.0
    return g


def log(g, tol=EPS_GROUP):
    g = check_group(g, tol)
    w = np.arctan2(g[1, 0], g[0, 0])
    if np.pi - abs(w) <= CUT_LOCUS_TOL:
        raise DomainError("log is undefined at rotation angle +-pi")
    a, b = _sinc_terms(w)
    det = a * a + b * b
    t1, t2 = g[0, 2], g[1, 2]
    return np.array([w, (a * t1 + b * t2) / det, (-b * t1 + a * t2) / det])


def dexpinv(theta, xi):
    """Chart velocity for ``g = g0 exp(theta)`` with body velocity ``xi``.

    Solves ``theta' = dexp^{-1}_{-theta}(xi)``, truncated after the
    double-commutator term (sufficient for fourth-order Munthe-Kaas stages).
    """
    ad1 = _ad(theta, xi)
    ad2 = _ad(theta, ad1)
    return xi + 0.5 * ad1 + ad2 / 12.0


def _ad(a, b):
    # [a, b] in se(2) coordinates, batched over leading axes
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., 0] = 0.0
    out[..., 1] = a[..., 2] * b[..., 0] - a[..., 0] * b[..., 2]
    out[..., 2] = a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]
    return out


def body_gradient(g, F, step=FD_STEP, analytic=None):
    """Left-trivialized differential of a scalar function on SE(2).

    Component k is ``d/dt F(g exp(t e_k))`` at ``t = 0``.  If ``analytic`` is
    given it is called as ``analytic(g)`` instead of differencing.
    """
    g = np.asarray(g, dtype=float)
    if analytic is not None:
        return np.asarray(analytic(g), dtype=float)
    out = np.empty(3)
    for k in range(3):
        e = np.zeros(3)
        e[k] = step
        out[k] = (F(g @ exp(e)) - F(g @ exp(-e))) / (2.0 * step)
    return out
