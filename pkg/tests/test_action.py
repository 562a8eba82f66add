import numpy as np
import pytest
from scipy.integrate import quad

from freetime.action import (DiscretePath, action, action_gradient, constant_path,
                             mean_energy, straight_path, uniform_times)
from freetime.central import homothetic_action, homothetic_path
from freetime.configuration import MassSystem, grad_potential, kinetic, potential
from freetime.errors import CollisionError, DimensionMismatch

from conftest import TWO_BODY_ACTION_1_8, random_config


def random_path(rng, sys, n_nodes, tau=1.3):
    x = random_config(rng, sys)
    y = random_config(rng, sys)
    p = straight_path(x, y, tau, n_nodes)
    nodes = p.nodes + 0.2 * rng.standard_normal(p.nodes.shape)
    return DiscretePath(p.times, nodes)


def test_path_validation():
    with pytest.raises(ValueError):
        DiscretePath([0.0, 0.0, 1.0], np.zeros((3, 2, 2)))
    with pytest.raises(DimensionMismatch):
        DiscretePath([0.0, 1.0], np.zeros((3, 2, 2)))
    p = DiscretePath([0.5, 1.0, 2.0], np.ones((3, 2, 2)))
    assert p.duration() == 1.5


def test_constant_path_action(two_body):
    x = np.array([[0.3, 0.1], [-0.4, 0.2]])
    p = constant_path(two_body, x, 2.5, 17)
    assert action(two_body, p) == pytest.approx(2.5 * potential(two_body, x), rel=1e-14)


def test_collision_node_gives_inf(two_body):
    p = straight_path([[1.0, 0], [-1.0, 0]], [[-1.0, 0], [1.0, 0]], 1.0, 5)
    assert action(two_body, p) == np.inf
    with pytest.raises(CollisionError):
        action_gradient(two_body, p)


def test_homothetic_action_oracle(ray, two_body):
    path = homothetic_path(ray, 1.0, 8.0, 4000)
    exact = homothetic_action(ray, 1.0, 8.0)
    assert exact == pytest.approx(TWO_BODY_ACTION_1_8, rel=1e-14)
    assert action(two_body, path) == pytest.approx(exact, rel=1e-4)


def test_straight_line_matches_quadrature(two_body):
    x = np.array([[1.0, 0.3], [-1.0, -0.3]])
    y = np.array([[-0.5, 1.2], [0.5, -1.2]])
    tau = 2.0
    v = (y - x) / tau

    def lagrangian(t):
        return kinetic(two_body, v) + potential(two_body, x + t * v)

    oracle, _ = quad(lagrangian, 0, tau, epsabs=0, epsrel=1e-13, limit=200)
    discrete = action(two_body, straight_path(x, y, tau, 4001))
    assert discrete == pytest.approx(oracle, rel=1e-6)


def test_gradient_matches_finite_differences(rng):
    sys = MassSystem((1.0, 2.0, 0.5), 2)
    eps = 1e-6
    for _ in range(10):
        p = random_path(rng, sys, 8)
        g = action_gradient(sys, p)
        fd = np.zeros_like(g)
        for idx in np.ndindex(g.shape):
            nodes = p.nodes.copy()
            k = (idx[0] + 1,) + idx[1:]
            nodes[k] += eps
            up = action(sys, DiscretePath(p.times, nodes))
            nodes[k] -= 2 * eps
            down = action(sys, DiscretePath(p.times, nodes))
            fd[idx] = (up - down) / (2 * eps)
        scale = np.abs(g).max()
        assert np.all(np.abs(fd - g) <= 1e-6 * np.maximum(np.abs(g), 1e-2 * scale))


def test_gradient_nonuniform_grid(rng, three_body):
    p = random_path(rng, three_body, 6)
    times = np.array([0.0, 0.1, 0.35, 0.4, 0.9, 1.3])
    p = DiscretePath(times, p.nodes)
    g = action_gradient(three_body, p)
    eps = 1e-6
    nodes = p.nodes.copy()
    nodes[2, 1, 0] += eps
    up = action(three_body, DiscretePath(times, nodes))
    nodes[2, 1, 0] -= 2 * eps
    down = action(three_body, DiscretePath(times, nodes))
    assert (up - down) / (2 * eps) == pytest.approx(g[1, 1, 0], rel=1e-6)


def test_translated_constant_path_has_only_potential_gradient(three_body, rng):
    x = random_config(rng, three_body)
    c = np.array([3.0, -1.0])
    p = constant_path(three_body, x + c, 1.0, 6)
    g = action_gradient(three_body, p)
    dt = p.dt[0]
    expected = dt * three_body.m * grad_potential(three_body, x)
    assert np.allclose(g, expected[None], rtol=1e-12, atol=1e-14)
    q = random_path(rng, three_body, 7)
    shifted = DiscretePath(q.times, q.nodes + c)
    assert np.allclose(action_gradient(three_body, shifted), action_gradient(three_body, q),
                       atol=1e-11)


def test_action_positive(rng, three_body):
    for _ in range(5):
        assert action(three_body, random_path(rng, three_body, 12)) > 0


def test_grid_refinement_homothetic(ray, two_body):
    exact = homothetic_action(ray, 1.0, 8.0)
    errors = [abs(action(two_body, homothetic_path(ray, 1.0, 8.0, n)) - exact)
              for n in (65, 129, 257, 513)]
    assert all(b < a for a, b in zip(errors, errors[1:]))
    # second order: halving the step cuts the error roughly fourfold
    assert errors[-2] / errors[-1] > 3.5


def test_mean_energy_is_minus_tau_derivative(rng, three_body):
    p = random_path(rng, three_body, 40)
    h = mean_energy(three_body, p)
    assert abs(h) > 1e-2

    def stretched(alpha):
        return action(three_body, DiscretePath(alpha * p.times, p.nodes))

    eps = 1e-5
    dA = (stretched(1 + eps) - stretched(1 - eps)) / (2 * eps * p.duration())
    assert dA == pytest.approx(-h, rel=1e-7)


def test_uniform_times():
    t = uniform_times(2.0, 5, t0=1.0)
    assert np.allclose(t, [1.0, 1.5, 2.0, 2.5, 3.0])
