import numpy as np
import pytest

from freetime.central import HomotheticSpec, find_minimal_configuration
from freetime.configuration import MassSystem, kinetic, potential
from freetime.dynamics import (DiagnosticsSeries, diagnostics, fit_power_law, g_monotonicity,
                               integrate_newton, lagrange_jacobi_residual,
                               parabolic_diagnostic, second_difference)
from freetime.errors import CollisionError

from conftest import TWO_BODY_A0


@pytest.fixture(scope="module")
def homothetic_run():
    sys = MassSystem.equal(2, 2)
    spec = HomotheticSpec.from_configuration(sys, TWO_BODY_A0)
    t = np.geomspace(1.0, 100.0, 2001)
    traj = integrate_newton(sys, spec.position(1.0), spec.velocity(1.0), (1.0, 100.0), t_eval=t)
    return sys, spec, traj, diagnostics(sys, traj)


def _circular(sys):
    # two unit masses at distance 2 orbit the origin with speed 1/2
    x = np.array([[1.0, 0.0], [-1.0, 0.0]])
    v = np.array([[0.0, 0.5], [0.0, -0.5]])
    return x, v


def test_homothetic_tracking(homothetic_run):
    _, spec, traj, _ = homothetic_run
    exact = np.stack([spec.position(t) for t in traj.times])
    err = np.abs(traj.positions - exact).max() / np.abs(exact).max()
    assert err < 1e-6
    assert traj.max_energy_drift < 1e-9
    assert not traj.collision_approach


def test_circular_orbit_period(two_body):
    x, v = _circular(two_body)
    period = 4 * np.pi
    traj = integrate_newton(two_body, x, v, (0.0, 3 * period), t_eval=[0.0, period, 3 * period])
    assert np.allclose(traj.positions[-1], x, atol=1e-8)
    radii = np.linalg.norm(traj.positions, axis=2)
    assert np.allclose(radii, 1.0, atol=1e-9)
    assert traj.energy0 == pytest.approx(0.25 - 0.5)


def test_energy_drift_small_for_three_bodies(three_body, rng):
    x = np.array([[1.0, 0.0], [-0.5, 0.9], [-0.4, -1.0]])
    v = 0.3 * rng.standard_normal((3, 2))
    v -= v.mean(axis=0)
    traj = integrate_newton(three_body, x, v, (0.0, 5.0))
    assert traj.max_energy_drift < 1e-9 * max(1.0, abs(traj.energy0))


def test_initial_collision_rejected(two_body):
    with pytest.raises(CollisionError):
        integrate_newton(two_body, np.zeros((2, 2)), np.zeros((2, 2)), (0.0, 1.0))


def test_collision_approach_stops_integration(two_body):
    x = np.array([[1.0, 0.0], [-1.0, 0.0]])
    traj = integrate_newton(two_body, x, np.zeros((2, 2)), (0.0, 10.0))
    assert traj.collision_approach
    # relative coordinate r'' = -2 / r^2 from rest at r = 2 collides at t = pi / sqrt 2
    assert traj.times[-1] == pytest.approx(np.pi / 2**0.5, rel=1e-6)


def test_diagnostics_closed_forms(homothetic_run):
    _, spec, traj, s = homothetic_run
    mu, t = spec.mu0, s.times
    assert np.allclose(s.I, mu**2 * t ** (4 / 3), rtol=1e-9)
    assert np.allclose(s.I_dot, 4 / 3 * mu**2 * t ** (1 / 3), rtol=1e-9)
    assert np.allclose(s.U, 2 / 9 * mu**2 * t ** (-2 / 3), rtol=1e-9)
    assert np.allclose(s.T, s.U, rtol=1e-9)
    assert np.allclose(s.g, 4 / 3 * mu**1.5, rtol=1e-9)
    assert s.com.max() <= 1e-12
    assert np.abs(s.h).max() < 1e-9


def test_lagrange_jacobi(homothetic_run):
    sys, _, traj, s = homothetic_run
    assert lagrange_jacobi_residual(sys, traj, s) < 1e-4
    bad = DiagnosticsSeries(s.times, 1.1 * s.I, s.U, s.T, s.g, s.h, s.com, s.I_dot)
    assert lagrange_jacobi_residual(sys, traj, bad) > 0.05


def test_second_difference_exact_on_quadratics():
    t = np.sort(np.random.default_rng(3).uniform(0, 5, 40))
    assert np.allclose(second_difference(t, 3 * t**2 - t + 2), 6.0, rtol=1e-9)


def test_g_constant_on_homothetic(homothetic_run):
    rep = g_monotonicity(homothetic_run[3])
    assert rep.is_nondecreasing
    assert rep.min_increment >= -1e-8


def test_g_nondecreasing_on_zero_energy_motion():
    sys = MassSystem.equal(3, 2)
    a0 = find_minimal_configuration(sys, seed=3).a0
    spec = HomotheticSpec.from_configuration(sys, a0)
    rng = np.random.default_rng(8)
    x = spec.position(1.0) + 0.05 * rng.standard_normal((3, 2))
    v = spec.velocity(1.0) + 0.05 * rng.standard_normal((3, 2))
    x -= x.mean(axis=0)
    v -= v.mean(axis=0)
    v *= np.sqrt(potential(sys, x) / kinetic(sys, v))  # zero energy
    traj = integrate_newton(sys, x, v, (1.0, 30.0), t_eval=np.linspace(1.0, 30.0, 3001))
    s = diagnostics(sys, traj)
    assert abs(traj.energy0) < 1e-12
    assert g_monotonicity(s).is_nondecreasing
    # Cauchy-Schwarz bound used by the monotonicity argument
    assert np.all(s.I_dot**2 <= 8 * s.I * s.T * (1 + 1e-10))


def test_g_decreases_somewhere_with_negative_energy(two_body):
    x, v = _circular(two_body)
    v = v * 1.2  # bound elliptic orbit, I oscillates
    traj = integrate_newton(two_body, x, v, (0.0, 30.0), t_eval=np.linspace(0, 30, 3001))
    assert not g_monotonicity(diagnostics(two_body, traj)).is_nondecreasing


def test_power_law_fit_exact():
    t = np.linspace(1, 50, 500)
    fit = fit_power_law(t, 5 * t**2)
    assert fit.exponent == pytest.approx(2.0, abs=1e-12)
    assert fit.coefficient == pytest.approx(5.0, rel=1e-10)
    assert fit.r_squared == pytest.approx(1.0)
    assert fit.window == (25.5, 50.0)
    with pytest.raises(ValueError):
        fit_power_law(t, 5 * t**2, window=(1.0, 1.05))


def test_power_law_asymptotics(homothetic_run):
    _, spec, _, s = homothetic_run
    fI, fU = fit_power_law(s.times, s.I), fit_power_law(s.times, s.U)
    assert fI.exponent == pytest.approx(4 / 3, abs=1e-4)
    assert fU.exponent == pytest.approx(-2 / 3, abs=1e-4)
    assert fI.coefficient / fU.coefficient == pytest.approx(4.5, rel=1e-2)
    assert fI.coefficient == pytest.approx(spec.mu0**2, rel=1e-6)


def test_parabolic_diagnostic(homothetic_run, two_body):
    _, spec, traj, s = homothetic_run
    rep = parabolic_diagnostic(s)
    assert rep.decreasing
    t_tail = rep.tail_start
    assert rep.T_tail_max == pytest.approx(2 / 9 * spec.mu0**2 * t_tail ** (-2 / 3), rel=1e-4)

    x, v = _circular(two_body)
    circ = diagnostics(two_body, integrate_newton(two_body, x, v, (0.0, 20.0),
                                                  t_eval=np.linspace(0, 20, 401)))
    assert not parabolic_diagnostic(circ).decreasing

    hyper = diagnostics(two_body, integrate_newton(two_body, x, 3 * v, (0.0, 200.0),
                                                   t_eval=np.linspace(0, 200, 401)))
    rep = parabolic_diagnostic(hyper)
    # kinetic energy tends to the positive energy, not to zero
    assert rep.T_tail_max > hyper.h[0] > 0
    with pytest.raises(ValueError):
        parabolic_diagnostic(s, tail_fraction=1.0)
