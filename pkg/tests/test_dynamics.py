import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from liereduce import dynamics, interaction, lie_core, se2
from liereduce.dynamics import HamiltonianState, LagrangianState, MultiAgentSystem
from liereduce.errors import InputError
from liereduce.interaction import InteractionGraph, PotentialParams
from liereduce.lie_core import CostMetric, Decomposition

W = CostMetric(se2.DEFAULT_METRIC, se2.DECOMPOSITION)
real = st.floats(-5, 5)


def lone_agent(gamma_mode="oracle"):
    return MultiAgentSystem.uniform(1, sigma=0.0, gamma_mode=gamma_mode)


@given(real, real, real)
def test_lagrangian_rhs_single_agent(u1, u2, l3):
    sys_ = lone_agent()
    xi, du, dlam = sys_.lagrangian_rhs(np.eye(3)[None], np.array([[u1, u2, 0.0]]), np.array([[0, 0, l3]]))
    assert np.allclose(du[0], [-u2 * l3 / 2, u1 * l3, 0.0], atol=1e-12)
    assert np.allclose(dlam[0], [0.0, 0.0, -u1 * u2], atol=1e-12)
    assert np.array_equal(xi[0], [u1, u2, 0.0])


def test_equilibrium():
    sys_ = lone_agent()
    _, du, dlam = sys_.lagrangian_rhs(np.eye(3)[None], np.zeros((1, 3)), np.zeros((1, 3)))
    assert not du.any() and not dlam.any()
    u, dmu = sys_.hamiltonian_rhs(np.eye(3)[None], np.zeros((1, 3)))
    assert not u.any() and not dmu.any()


def test_hamiltonian_rhs_paper_form(paper_cfg):
    sys_ = paper_cfg.system()
    G = paper_cfg.poses
    mu = np.random.default_rng(7).normal(size=(3, 3))
    _, dmu = sys_.hamiltonian_rhs(G, mu)
    for i in range(3):
        gam = sum(interaction.paper_gamma(sys_.params[i, j], G[i], G[j])[0] for j in sys_.graph.neighbors(i))
        gam_t = sum(interaction.paper_gamma(sys_.params[i, j], G[i], G[j])[1] for j in sys_.graph.neighbors(i))
        m1, m2, m3 = mu[i]
        expected = [-m2 * m3, 0.5 * m1 * m3 - gam, -0.5 * m1 * m2 + gam_t]
        assert np.allclose(dmu[i], expected, rtol=1e-12, atol=1e-12)


def test_formulations_agree_at_initial_data(unicycles_cfg):
    sys_ = unicycles_cfg.system()
    G, u, lam = unicycles_cfg.poses, unicycles_cfg.u0, unicycles_cfg.lam0
    xi_l, du, dlam = sys_.lagrangian_rhs(G, u, lam)
    xi_h, dmu = sys_.hamiltonian_rhs(G, sys_.legendre(u, lam))
    assert np.allclose(xi_l, xi_h, atol=1e-15)
    assert np.allclose(sys_.legendre(du, dlam), dmu, atol=1e-12)


def test_support_preserved(unicycles_cfg):
    sys_ = unicycles_cfg.system()
    rng = np.random.default_rng(3)
    u = rng.normal(size=(3, 3))
    u[:, 2] = 0.0
    lam = np.zeros((3, 3))
    lam[:, 2] = rng.normal(size=3)
    _, du, dlam = sys_.lagrangian_rhs(unicycles_cfg.poses, u, lam)
    assert np.all(du[:, 2] == 0.0)
    assert np.all(dlam[:, :2] == 0.0)


def test_optimal_control_examples():
    assert np.array_equal(dynamics.optimal_control(np.array([3.0, -1.0, 7.0]), W), [1.5, -1.0, 0.0])
    assert np.array_equal(dynamics.optimal_control(np.zeros(3), W), np.zeros(3))


def test_optimal_control_maximizes_pmp_hamiltonian(rng):
    for _ in range(20):
        mu = rng.normal(size=3)
        us = dynamics.optimal_control(mu, W)
        best = mu @ us - W.cost(us)
        for _ in range(100):
            u = np.append(rng.normal(scale=3, size=2), 0.0)
            assert mu @ u - W.cost(u) <= best + 1e-12


@given(real, real, real)
def test_legendre_roundtrip(u1, u2, l3):
    u, lam = np.array([u1, u2, 0.0]), np.array([0.0, 0.0, l3])
    mu = dynamics.legendre(u, lam, W)
    assert np.array_equal(mu, [2 * u1, u2, l3])
    u_back, lam_back = dynamics.legendre_inverse(mu, W)
    assert np.array_equal(u_back, u) and np.array_equal(lam_back, lam)


def test_legendre_checks_support():
    assert np.array_equal(dynamics.legendre(np.zeros(3), np.zeros(3), W), np.zeros(3))
    with pytest.raises(InputError):
        dynamics.legendre(np.array([1.0, 0, 1.0]), np.zeros(3), W)
    with pytest.raises(InputError):
        dynamics.legendre(np.zeros(3), np.array([1.0, 0, 0]), W)


def test_reduced_hamiltonian_kinetic_part(rng):
    sys_ = MultiAgentSystem.uniform(3, sigma=0.0)
    G = np.array([se2.from_pose(k, 0, 0) for k in range(3)])
    mu = rng.normal(size=(3, 3))
    expected = np.sum(mu[:, 0] ** 2 / 4 + mu[:, 1] ** 2 / 2)
    assert np.isclose(sys_.reduced_hamiltonian(G, mu), expected)
    assert sys_.reduced_hamiltonian(G, np.zeros((3, 3))) == 0.0


def test_reduced_hamiltonian_potential_counts_each_edge_once():
    sys_ = MultiAgentSystem.uniform(2, sigma=1.0, d=0.1)
    G = np.array([se2.from_pose(0, 0, 0), se2.from_pose(0.5, 0, 0)])
    assert np.isclose(sys_.reduced_hamiltonian(G, np.zeros((2, 3))), 25 / 12)


def test_state_helpers(unicycles_cfg):
    sys_ = unicycles_cfg.system()
    lag = LagrangianState(unicycles_cfg.poses, unicycles_cfg.u0, unicycles_cfg.lam0)
    dynamics.check_state(sys_, lag)
    ham = dynamics.to_hamiltonian(sys_, lag)
    back = dynamics.to_lagrangian(sys_, ham)
    assert np.array_equal(back.u, lag.u) and np.array_equal(back.lam, lag.lam)
    assert np.isclose(dynamics.reduced_hamiltonian(sys_, lag), dynamics.reduced_hamiltonian(sys_, ham))
    bad = LagrangianState(unicycles_cfg.poses, unicycles_cfg.u0 + [0, 0, 1], unicycles_cfg.lam0)
    with pytest.raises(InputError):
        dynamics.check_state(sys_, bad)
    with pytest.raises(InputError):
        dynamics.check_state(sys_, HamiltonianState(unicycles_cfg.poses[:2], np.zeros((2, 3))))


def test_fully_actuated_split():
    full = Decomposition((0, 1, 2), ())
    Wf = CostMetric(np.diag([2.0, 1.0, 3.0]), full)
    g = InteractionGraph.complete(1)
    sys_ = MultiAgentSystem(g, PotentialParams.uniform(g, 1.0, 0.1), [Wf], decomposition=full)
    u = np.array([[0.4, -1.0, 2.0]])
    _, du, dlam = sys_.lagrangian_rhs(np.eye(3)[None], u, np.zeros((1, 3)))
    expected = np.linalg.solve(Wf.W, lie_core.ad_star(se2.STRUCTURE, u[0], Wf.W @ u[0]))
    assert np.allclose(du[0], expected)
    assert not dlam.any()
    _, dmu = sys_.hamiltonian_rhs(np.eye(3)[None], sys_.legendre(u, np.zeros((1, 3))))
    assert np.allclose(dmu[0], Wf.W @ du[0])


def test_invalid_split_rejected():
    bad = Decomposition((0,), (1, 2))
    g = InteractionGraph.complete(1)
    Wb = CostMetric(np.diag([1.0, 0.0, 0.0]), bad)
    with pytest.raises(InputError):
        MultiAgentSystem(g, PotentialParams.uniform(g, 1.0, 0.1), [Wb], decomposition=bad)


def test_unknown_gamma_mode():
    with pytest.raises(InputError):
        MultiAgentSystem.uniform(2, gamma_mode="printed")
