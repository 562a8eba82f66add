import numpy as np
import pytest

from freetime.action import action, action_gradient, node_separations
from freetime.central import homothetic_action
from freetime.configuration import MassSystem, max_body_distance, potential
from freetime.errors import CollisionTrapped, NonConvergence, UnsupportedDimension
from freetime.minimize import MinimizeOptions, minimize_fixed_time, phi_tau

from conftest import random_config


@pytest.fixture(scope="module")
def tonelli():
    from freetime.central import HomotheticSpec
    from conftest import TWO_BODY_A0
    sys = MassSystem.equal(2, 2)
    ray = HomotheticSpec.from_configuration(sys, TWO_BODY_A0)
    report = minimize_fixed_time(sys, ray.position(1.0), ray.position(8.0), 7.0, 512)
    return sys, ray, report


def test_tonelli_recovers_homothetic_arc(tonelli):
    sys, ray, r = tonelli
    assert r.converged and r.grad_norm <= 1e-8
    exact = homothetic_action(ray, 1.0, 8.0)
    assert r.action_value == pytest.approx(exact, rel=1e-4)
    t = 1.0 + r.path.times
    arc = ray.mu0 * t[:, None, None] ** (2 / 3) * ray.a0[None]
    assert np.abs(r.path.nodes - arc).max() < 1e-3


def test_tonelli_gradient_is_small(tonelli):
    sys, _, r = tonelli
    assert np.linalg.norm(action_gradient(sys, r.path)) <= 1e-8


def test_scaled_problem_scales_action(tonelli):
    sys, ray, r = tonelli
    lam = 4.0
    scaled = minimize_fixed_time(sys, lam * ray.position(1.0), lam * ray.position(8.0),
                                 lam**1.5 * 7.0, 512)
    assert scaled.action_value == pytest.approx(2.0 * r.action_value, rel=1e-6)


@pytest.mark.parametrize("lam", [0.5, 2.0, 4.0])
def test_rescaled_minimizer_is_critical(tonelli, lam):
    sys, _, r = tonelli
    g = np.linalg.norm(action_gradient(sys, r.path.rescaled(lam)))
    assert g == pytest.approx(lam**-0.5 * r.grad_norm, rel=1e-6, abs=1e-13)
    assert g <= max(1.0, lam**-0.5) * 1e-8


def test_loop_beats_constant_path():
    sys = MassSystem((1.0, 2.0, 1.5), 2)
    x = np.array([[1.0, 0.0], [-0.5, 0.3], [0.2, -0.9]])
    tau = 0.05
    r = minimize_fixed_time(sys, x, x, tau, 16)
    assert r.converged
    assert r.action_value <= tau * potential(sys, x)
    assert np.abs(r.path.nodes - x).max() < 1e-2


def test_phi_tau_homothetic(tonelli):
    sys, ray, _ = tonelli
    val = phi_tau(sys, ray.position(1.0), ray.position(8.0), 7.0, 512,
                  MinimizeOptions(restarts=2))
    assert val == pytest.approx(homothetic_action(ray, 1.0, 8.0), rel=1e-4)


@pytest.mark.parametrize("lam", [0.5, 2.0])
def test_phi_tau_scaling(rng, three_body, lam):
    x, y = random_config(rng, three_body), random_config(rng, three_body)
    opts = MinimizeOptions(restarts=2, rng_seed=3)
    base = phi_tau(three_body, x, y, 1.5, 64, opts)
    scaled = phi_tau(three_body, lam * x, lam * y, lam**1.5 * 1.5, 64, opts)
    assert scaled == pytest.approx(lam**0.5 * base, rel=1e-4)


def test_phi_tau_lower_bound(rng):
    sys = MassSystem((1.0, 0.4, 2.0), 2)
    for k in range(4):
        x, y = random_config(rng, sys), random_config(rng, sys)
        tau = 0.5 + k
        A = phi_tau(sys, x, y, tau, 48, MinimizeOptions(restarts=1))
        assert 2 * A * tau >= sys.min_mass * max_body_distance(x, y) ** 2


def test_discrete_holder_bound(rng, three_body):
    x, y = random_config(rng, three_body), random_config(rng, three_body)
    r = minimize_fixed_time(three_body, x, y, 2.0, 64)
    nodes, t = r.path.nodes, r.path.times
    diff = nodes[:, None] - nodes[None, :]
    dist = np.sqrt(np.sum(three_body.m[None, None] * diff**2, axis=(2, 3)))
    bound = np.sqrt(2 * r.action_value * np.abs(t[:, None] - t[None, :]))
    assert np.all(dist <= bound + 1e-12)


def test_swap_avoids_collision(two_body):
    x = np.array([[1.0, 0.0], [-1.0, 0.0]])
    r = minimize_fixed_time(two_body, x, -x, 3.0, 64)
    assert r.converged
    assert r.min_separation > 0.1
    assert node_separations(r.path.nodes).min() == pytest.approx(r.min_separation)


def test_dimension_one_refused():
    sys = MassSystem.equal(2, 1)
    with pytest.raises(UnsupportedDimension):
        minimize_fixed_time(sys, [[1.0], [-1.0]], [[2.0], [-2.0]], 1.0, 8)
    from freetime.action import straight_path
    p = straight_path([[1.0], [-1.0]], [[2.0], [-2.0]], 1.0, 8)
    assert np.isfinite(action(sys, p))
    assert action_gradient(sys, p).shape == (6, 2, 1)


def test_argument_checks(two_body):
    x = np.array([[1.0, 0.0], [-1.0, 0.0]])
    with pytest.raises(ValueError):
        minimize_fixed_time(two_body, x, 2 * x, 0.0, 8)
    with pytest.raises(ValueError):
        minimize_fixed_time(two_body, x, 2 * x, 1.0, 2)


def test_non_convergence_reports_best(two_body):
    x = np.array([[1.0, 0.0], [-1.0, 0.3]])
    with pytest.raises(NonConvergence) as info:
        minimize_fixed_time(two_body, x, 3 * x, 2.0, 64, MinimizeOptions(max_iters=2))
    assert info.value.report is not None
    assert not info.value.report.converged


def test_collision_trapped_when_guard_is_unreachable(two_body):
    x = np.array([[1.0, 0.0], [-1.0, 0.0]])
    opts = MinimizeOptions(collision_guard=100.0, restarts=2)
    with pytest.raises(CollisionTrapped):
        minimize_fixed_time(two_body, x, 2 * x, 1.0, 16, opts)


def test_deterministic_for_fixed_seed(rng, three_body):
    x, y = random_config(rng, three_body), random_config(rng, three_body)
    a = minimize_fixed_time(three_body, x, y, 1.0, 32, MinimizeOptions(rng_seed=11))
    b = minimize_fixed_time(three_body, x, y, 1.0, 32, MinimizeOptions(rng_seed=11))
    assert a.action_value == b.action_value
    assert np.array_equal(a.path.nodes, b.path.nodes)
