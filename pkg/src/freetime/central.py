"""Minimal central configurations and their parabolic homothetic motions.

A minimal configuration minimizes U on the ellipsoid {I = 1}; it generates
the zero-energy homothetic ejection ``gamma(t) = mu0 t^{2/3} a0`` with
``mu0 = (9 U0 / 2)^{1/3}``, which is a free time minimizer on ``[0, inf)``.
Along the ray the motion reduces to the Kepler problem in the half-line with
Lagrangian ``rho'^2 / 2 + U0 / rho``.
"""
import warnings
from dataclasses import dataclass

import numpy as np

from .action import DiscretePath
from .configuration import (as_config, center, grad_potential,
                            mass_inner, mass_norm, min_separation,
                            moment_of_inertia, potential)
from .errors import NonConvergence
from .minimize import MinimizeOptions


@dataclass(frozen=True)
class CentralConfigResult:
    a0: np.ndarray
    U0: float
    tangent_residual: float
    central_residual: float
    iterations: int = 0


@dataclass(frozen=True)
class HomotheticSpec:
    a0: np.ndarray
    mu0: float
    U0: float

    @classmethod
    def from_configuration(cls, sys, a0):
        """Normalize ``a0`` to ``I = 1`` and derive ``U0`` and ``mu0``."""
        a0 = as_config(sys, a0)
        a0 = a0 / moment_of_inertia(sys, a0) ** 0.5
        U0 = potential(sys, a0)
        return cls(a0=a0, mu0=homothetic_mu(U0), U0=U0)

    def position(self, t):
        return self.mu0 * t ** (2.0 / 3.0) * self.a0

    def velocity(self, t):
        return (2.0 / 3.0) * self.mu0 * t ** (-1.0 / 3.0) * self.a0

    def time_at_radius(self, rho):
        """Time at which ``I^{1/2} = rho`` along the ray."""
        return (rho / self.mu0) ** 1.5


def _normalize(sys, x):
    x = center(sys, x)
    return x / moment_of_inertia(sys, x) ** 0.5


def _tangent_gradient(sys, x):
    g = grad_potential(sys, x)
    return g - mass_inner(sys, g, x) * x


def central_residual(sys, a):
    """``|grad U(a) + U(a) a|`` for a normalized configuration (mass norm)."""
    return mass_norm(sys, grad_potential(sys, a) + potential(sys, a) * a)


def _descend_sphere(sys, x, grad_tol, max_iters, guard):
    """Projected gradient descent of U on {I = 1, G = 0} with Barzilai-Borwein steps."""
    U = potential(sys, x)
    g = _tangent_gradient(sys, x)
    step = 0.1 / max(mass_norm(sys, g), 1e-300)
    x_prev = g_prev = None
    for it in range(max_iters):
        gnorm = mass_norm(sys, g)
        if gnorm <= grad_tol:
            return x, U, gnorm, it
        if x_prev is not None:
            s, y = x - x_prev, g - g_prev
            sy = mass_inner(sys, s, y)
            if sy > 0:
                step = mass_inner(sys, s, s) / sy
        for _ in range(60):
            xt = _normalize(sys, x - step * g)
            if min_separation(xt) >= guard:
                Ut = potential(sys, xt)
                if Ut <= U - 1e-4 * step * gnorm**2:
                    break
            step *= 0.5
        else:
            return x, U, gnorm, it
        x_prev, g_prev = x, g
        x, U = xt, Ut
        g = _tangent_gradient(sys, x)
    return x, U, mass_norm(sys, g), max_iters


def find_minimal_configuration(sys, seed=0, opts=None):
    """Multi-start search for the minimum of U on {I = 1, G = 0}.

    Returns the best critical point found (by U value).  Results are only
    defined up to rotations and reflections; no gauge is fixed.
    """
    opts = opts or MinimizeOptions(grad_tol=1e-10)
    if sys.dim == 1:
        warnings.warn("collinear central configurations are computed but carry no "
                      "minimality claim in dimension one", stacklevel=2)
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(opts.restarts + 1):
        x = _normalize(sys, rng.standard_normal(sys.shape))
        x, U, gnorm, iters = _descend_sphere(sys, x, opts.grad_tol, opts.max_iters,
                                             opts.collision_guard)
        if gnorm > opts.grad_tol:
            continue
        if best is None or U < best.U0:
            best = CentralConfigResult(a0=x, U0=U, tangent_residual=gnorm,
                                       central_residual=central_residual(sys, x),
                                       iterations=iters)
    if best is None:
        raise NonConvergence(f"no start reached tangent residual {opts.grad_tol:g}")
    return best


def homothetic_mu(U0):
    """Expansion constant ``(9 U0 / 2)^{1/3}`` of the parabolic homothetic motion."""
    if not U0 > 0:
        raise ValueError("U0 must be positive")
    return (4.5 * U0) ** (1.0 / 3.0)


def homothetic_path(spec, t0, t1, n_nodes):
    if not 0 < t0 < t1:
        raise ValueError("need 0 < t0 < t1")
    t = np.linspace(t0, t1, n_nodes)
    return DiscretePath(t, spec.mu0 * t[:, None, None] ** (2.0 / 3.0) * spec.a0[None])


def homothetic_action(spec, t0, t1):
    """Closed-form action ``(4/3) mu0^2 (t1^{1/3} - t0^{1/3})`` of the ray on ``[t0, t1]``."""
    if t0 < 0 or t1 < t0:
        raise ValueError("need 0 <= t0 <= t1")
    return 4.0 / 3.0 * spec.mu0**2 * (np.cbrt(t1) - np.cbrt(t0))


def kepler_free_time_value(U0, rho_a, rho_b):
    """Free-time action of the zero-energy arc of ``rho'^2/2 + U0/rho`` from rho_a to rho_b."""
    if not 0 <= rho_a < rho_b:
        raise ValueError("need 0 <= rho_a < rho_b")
    spec = HomotheticSpec(a0=np.zeros((1, 1)), mu0=homothetic_mu(U0), U0=U0)
    return homothetic_action(spec, spec.time_at_radius(rho_a), spec.time_at_radius(rho_b))
