import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from liereduce import interaction, lie_core, se2
from liereduce.config import PAPER_INITIAL_MATRICES
from liereduce.errors import DomainError, GroupStateError, InputError

from conftest import random_pose

angle = st.floats(-np.pi + 1e-6, np.pi - 1e-6)
coord = st.floats(-50, 50)


def series_exp(X, terms=20):
    out, term = np.eye(3), np.eye(3)
    for k in range(1, terms):
        term = term @ X / k
        out = out + term
    return out


def test_from_pose_identity_and_reference_g1():
    assert np.array_equal(se2.from_pose(0, 0, 0), np.eye(3))
    g1 = se2.from_pose(-0.25, 0.0, np.pi / 4)
    assert np.allclose(g1, PAPER_INITIAL_MATRICES[0], atol=1e-15)


@given(coord, coord, angle)
def test_pose_roundtrip(x, y, th):
    assert np.allclose(se2.to_pose(se2.from_pose(x, y, th)), (x, y, th), atol=1e-12)


def test_group_checks():
    bad = np.array(PAPER_INITIAL_MATRICES[1])
    assert not se2.is_group(bad)
    with pytest.raises(GroupStateError):
        se2.check_group(bad)
    with pytest.raises(GroupStateError):
        se2.compose(bad, np.eye(3))
    shifted = np.eye(3)
    shifted[2, 0] = 1e-3
    assert not se2.is_group(shifted)


def test_compose_and_inverse(rng):
    g = se2.compose(se2.from_pose(1, 0, 0), se2.from_pose(0, 1, np.pi / 2))
    assert np.allclose(g, se2.from_pose(1, 1, np.pi / 2), atol=1e-15)
    for _ in range(100):
        g, h = random_pose(rng), random_pose(rng)
        assert np.allclose(se2.compose(g, se2.inverse(g)), np.eye(3), atol=1e-12)
        assert np.array_equal(se2.compose(se2.identity(), g), g)
        assert se2.group_defect(se2.compose(g, h)) <= 1e-12


def test_hat_vee(rng):
    assert np.array_equal(se2.hat([1, 0, 0]), se2.BASIS[0])
    assert np.array_equal(se2.vee(se2.BASIS[1]), [0, 1, 0])
    for xi in rng.normal(size=(50, 3)):
        assert np.array_equal(se2.vee(se2.hat(xi)), xi)
    with pytest.raises(InputError):
        se2.vee(np.eye(3))


def test_exp_closed_form_against_series(rng):
    assert np.array_equal(se2.exp(np.zeros(3)), np.eye(3))
    quarter = se2.exp([np.pi / 2, 0, 0])
    assert np.allclose(quarter, series_exp(se2.hat([np.pi / 2, 0, 0]), 20), atol=1e-14)
    assert np.allclose(quarter, se2.from_pose(0, 0, np.pi / 2), atol=1e-15)
    assert np.allclose(se2.exp([0, 0.3, -1.2]), se2.from_pose(0.3, -1.2, 0), atol=1e-15)
    for xi in rng.uniform(-2, 2, size=(50, 3)):
        assert np.allclose(se2.exp(xi), series_exp(se2.hat(xi), 40), atol=1e-12)


def test_exp_small_angle_is_smooth():
    for w in (1e-9, 1e-12, 0.0):
        g = se2.exp([w, 1.0, 2.0])
        assert np.allclose(g[:2, 2], [1.0, 2.0], atol=1e-8)


def test_log():
    assert np.array_equal(se2.log(np.eye(3)), np.zeros(3))
    assert np.allclose(se2.log(se2.from_pose(0, 0, np.pi / 2)), [np.pi / 2, 0, 0], atol=1e-15)
    with pytest.raises(DomainError):
        se2.log(se2.from_pose(1, 0, np.pi))


def test_exp_log_roundtrip(rng):
    n = 0
    while n < 1000:
        xi = rng.uniform(-3, 3, 3)
        if np.linalg.norm(xi) > 3 or abs(xi[0]) >= np.pi - 0.1:
            continue
        assert np.linalg.norm(se2.log(se2.exp(xi)) - xi) <= 1e-10
        n += 1


def test_exp_batched(rng):
    xi = rng.normal(size=(4, 5, 3))
    batch = se2.exp(xi)
    assert batch.shape == (4, 5, 3, 3)
    assert np.allclose(batch[2, 3], se2.exp(xi[2, 3]))


def test_project_to_group(rng):
    g = random_pose(rng)
    noisy = g + 1e-4 * rng.normal(size=(3, 3)) * np.array([[1, 1, 0], [1, 1, 0], [0, 0, 0]])
    fixed = se2.project_to_group(noisy)
    assert se2.orthogonality_defect(fixed) <= 1e-14
    assert np.allclose(fixed[:2, 2], g[:2, 2])


def test_body_gradient_examples(rng):
    assert np.array_equal(se2.body_gradient(np.eye(3), lambda g: 4.2), np.zeros(3))
    for _ in range(20):
        g = random_pose(rng)
        th = se2.to_pose(g)[2]
        grad = se2.body_gradient(g, lambda q: q[0, 2])
        # body-frame y translation moves x by -sin(theta)
        assert np.allclose(grad, [0.0, np.cos(th), -np.sin(th)], atol=1e-9)


def test_body_gradient_matches_coupling_force_at_paper_start(paper_cfg):
    edge = interaction.EdgeParams(1.0, 0.1)
    G = paper_cfg.poses
    for i in range(3):
        for j in range(3):
            if i != j:
                fd = se2.body_gradient(G[i], lambda g: interaction.potential(edge, g, G[j]))
                assert np.allclose(fd, interaction.coupling_force(edge, G[i], G[j]), rtol=1e-7, atol=1e-9)


def test_body_gradient_left_invariance(rng):
    h = random_pose(rng)
    target = se2.from_pose(0.3, -0.2, 1.0)

    def F(g):
        return float(np.sum((g[:2, 2] - target[:2, 2]) ** 2) + g[0, 0])

    def F_moved(g):
        return F(se2.inverse(h) @ g)

    for _ in range(10):
        g = random_pose(rng)
        assert np.allclose(se2.body_gradient(g, F), se2.body_gradient(h @ g, F_moved), atol=1e-8)


def test_body_gradient_analytic_hook():
    out = se2.body_gradient(np.eye(3), None, analytic=lambda g: [1.0, 2.0, 3.0])
    assert np.array_equal(out, [1.0, 2.0, 3.0])


def test_dexpinv_zero_chart_is_identity(rng):
    xi = rng.normal(size=3)
    assert np.array_equal(se2.dexpinv(np.zeros(3), xi), xi)
    theta = rng.normal(size=3)
    lin = se2.dexpinv(theta, xi) - xi - 0.5 * lie_core.bracket(se2.STRUCTURE, theta, xi)
    assert np.linalg.norm(lin) <= np.linalg.norm(theta) ** 2 * np.linalg.norm(xi)
