"""Integration of Newton's equations and asymptotic diagnostics.

The diagnostics follow the zero-energy picture: the Lagrange-Jacobi identity
``I'' = 2U + 4h``, the function ``g = I' I^{-1/4}`` (nondecreasing on
zero-energy motions, constant exactly on homothetic ones), power laws
``I ~ c t^{4/3}``, ``U ~ alpha t^{-2/3}`` with ``c = (9/2) alpha``, and the
vanishing of all velocities along completely parabolic motions.
"""
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .action import node_accelerations, node_potentials, node_separations
from .configuration import as_config, has_collision
from .errors import CollisionError

# stop when a pair gets closer than this fraction of the initial minimal separation
COLLISION_APPROACH_RATIO = 1e-6


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    positions: np.ndarray  # (K, N, d)
    velocities: np.ndarray  # (K, N, d)
    energy0: float
    max_energy_drift: float
    collision_approach: bool = False
    message: str = ""


@dataclass(frozen=True)
class DiagnosticsSeries:
    times: np.ndarray
    I: np.ndarray
    U: np.ndarray
    T: np.ndarray
    g: np.ndarray
    h: np.ndarray
    com: np.ndarray
    I_dot: np.ndarray


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    coefficient: float
    r_squared: float
    window: tuple


@dataclass(frozen=True)
class MonotonicityReport:
    min_increment: float
    is_nondecreasing: bool


@dataclass(frozen=True)
class ParabolicReport:
    T_tail_max: float
    decreasing: bool
    tail_start: float


def _energy(sys, x, v):
    m = sys.m
    T = 0.5 * np.sum(m[None] * v * v, axis=(1, 2))
    return T - node_potentials(sys, x)


def integrate_newton(sys, x0, v0, t_span, tol=1e-12, t_eval=None):
    """Adaptive 8th-order Runge-Kutta (Dormand-Prince) solution of ``x'' = grad U(x)``.

    Integration stops early when some pair separation drops below
    ``COLLISION_APPROACH_RATIO`` times the initial minimal separation; the
    partial trajectory is returned with ``collision_approach`` set.
    """
    x0, v0 = as_config(sys, x0), as_config(sys, v0)
    if has_collision(sys, x0):
        raise CollisionError("initial configuration has a collision")
    shape = sys.shape
    n = x0.size
    threshold = COLLISION_APPROACH_RATIO * node_separations(x0[None])[0]

    def rhs(t, z):
        x = z[:n].reshape((1,) + shape)
        return np.concatenate([z[n:], node_accelerations(sys, x).ravel()])

    def approach(t, z):
        return node_separations(z[:n].reshape((1,) + shape))[0] - threshold

    approach.terminal = True
    approach.direction = -1

    scale = max(np.abs(x0).max(), np.abs(v0).max(), 1e-300)
    sol = solve_ivp(rhs, t_span, np.concatenate([x0.ravel(), v0.ravel()]),
                    method="DOP853", rtol=tol, atol=tol * scale * 1e-3,
                    t_eval=t_eval, events=approach)
    if sol.status == -1:
        raise RuntimeError(sol.message)
    K = sol.y.shape[1]
    x = sol.y[:n].T.reshape((K,) + shape)
    v = sol.y[n:].T.reshape((K,) + shape)
    E = _energy(sys, x, v)
    E0 = float(_energy(sys, x0[None], v0[None])[0])
    hit = sol.status == 1
    return Trajectory(
        times=sol.t, positions=x, velocities=v, energy0=E0,
        max_energy_drift=float(np.max(np.abs(E - E0))) if K else 0.0,
        collision_approach=hit,
        message="collision approach" if hit else sol.message,
    )


def diagnostics(sys, traj):
    x, v = traj.positions, traj.velocities
    m = sys.m[None]
    I = np.sum(m * x * x, axis=(1, 2))
    I_dot = 2 * np.sum(m * x * v, axis=(1, 2))
    T = 0.5 * np.sum(m * v * v, axis=(1, 2))
    U = node_potentials(sys, x)
    G = np.sum(m * x, axis=1) / sys.total_mass
    with np.errstate(divide="ignore", invalid="ignore"):
        g = np.where(I > 0, I_dot * I**-0.25, np.nan)
    return DiagnosticsSeries(
        times=np.asarray(traj.times), I=I, U=U, T=T, g=g, h=T - U,
        com=np.linalg.norm(G - G[0], axis=1), I_dot=I_dot,
    )


def second_difference(t, y):
    """Three-point second derivative on a possibly non-uniform grid (interior points)."""
    h0 = t[1:-1] - t[:-2]
    h1 = t[2:] - t[1:-1]
    return 2 * (h0 * y[2:] - (h0 + h1) * y[1:-1] + h1 * y[:-2]) / (h0 * h1 * (h0 + h1))


def lagrange_jacobi_residual(sys, traj, series=None):
    """``max |I''_fd - 2U - 4h|`` over interior samples, over ``max(1, max 2U)``."""
    s = series if series is not None else diagnostics(sys, traj)
    if len(s.times) < 5:
        raise ValueError("need at least five samples")
    I_dd = second_difference(s.times, s.I)
    resid = np.abs(I_dd - 2 * s.U[1:-1] - 4 * s.h[1:-1])
    return float(resid.max() / max(1.0, 2 * s.U.max()))


def g_monotonicity(series, tol_g=1e-8):
    inc = np.diff(series.g)
    lo = float(inc.min())
    return MonotonicityReport(min_increment=lo, is_nondecreasing=lo >= -tol_g)


def default_window(times):
    t = np.asarray(times)
    return (t[0] + 0.5 * (t[-1] - t[0]), t[-1])


def fit_power_law(times, values, window=None, max_points=200):
    """Least-squares fit of ``values ~ coefficient * times**exponent`` in log-log space.

    Without an explicit window the last half of the time span is used.
    Samples inside the window are thinned to at most ``max_points``
    roughly log-spaced points so dense early sampling does not dominate.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    window = tuple(window) if window is not None else default_window(t)
    sel = np.flatnonzero((t >= window[0]) & (t <= window[1]) & (t > 0))
    if len(sel) < 10:
        raise ValueError(f"only {len(sel)} samples in window {window}; need 10")
    if np.any(y[sel] <= 0):
        raise ValueError("power-law fit needs positive values in the window")
    if len(sel) > max_points:
        targets = np.geomspace(t[sel[0]], t[sel[-1]], max_points)
        sel = np.unique(sel[np.clip(np.searchsorted(t[sel], targets), 0, len(sel) - 1)])
    lx, ly = np.log(t[sel]), np.log(y[sel])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    ss_tot = np.sum((ly - ly.mean()) ** 2)
    r2 = 1.0 - np.sum(resid**2) / ss_tot if ss_tot > 0 else 1.0
    return PowerLawFit(exponent=float(slope), coefficient=float(np.exp(intercept)),
                       r_squared=float(np.clip(r2, 0.0, 1.0)), window=window)


def parabolic_diagnostic(series, tail_fraction=0.5):
    """Largest kinetic energy on the trailing samples, and whether it strictly decreases there."""
    if not 0 < tail_fraction < 1:
        raise ValueError("tail_fraction must lie in (0, 1)")
    n = len(series.times)
    start = min(int(np.floor(n * (1 - tail_fraction))), n - 1)
    tail = series.T[start:]
    if len(tail) == 0:
        raise ValueError("empty tail window")
    return ParabolicReport(T_tail_max=float(tail.max()),
                           decreasing=bool(len(tail) > 1 and np.all(np.diff(tail) < 0)),
                           tail_start=float(series.times[start]))
