"""Fixed-time action minimizers (Tonelli minimizers) between two configurations."""
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import solve_banded

from .action import (DiscretePath, action, action_gradient, node_separations,
                     straight_path, uniform_times)
from .configuration import as_config, mass_norm, moment_of_inertia
from .errors import CollisionTrapped, NonConvergence, UnsupportedDimension
from .optimize import lbfgs


@dataclass(frozen=True)
class MinimizeOptions:
    max_iters: int = 5000
    grad_tol: float = 1e-8
    restarts: int = 4
    rng_seed: int = 0
    collision_guard: float = 1e-9

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if self.restarts < 0:
            raise ValueError("restarts must be non-negative")
        if not self.collision_guard > 0:
            raise ValueError("collision_guard must be positive")


@dataclass(frozen=True)
class MinimizeReport:
    path: DiscretePath
    action_value: float
    grad_norm: float
    iterations: int
    converged: bool
    min_separation: float


def _kinetic_preconditioner(sys, dt):
    """Solve with the Hessian of the kinetic part of the action (block tridiagonal)."""
    inv = 1.0 / dt
    n = len(dt) - 1
    ab = np.zeros((3, n))
    ab[0, 1:] = -inv[1:-1]
    ab[1] = inv[:-1] + inv[1:]
    ab[2, :-1] = -inv[1:-1]
    m = sys.m
    shape = (n,) + sys.shape

    def apply(g):
        rhs = (g.reshape(shape) / m[None]).reshape(n, -1)
        return solve_banded((1, 1), ab, rhs, check_finite=False).ravel()

    return apply


def _descend(sys, start, opts):
    """Run one L-BFGS descent from the node array of ``start`` (endpoints fixed)."""
    times = start.times
    nodes = start.nodes.copy()
    shape = nodes[1:-1].shape
    guard = opts.collision_guard

    def path_of(z):
        nodes[1:-1] = z.reshape(shape)
        return DiscretePath(times, nodes.copy())

    def fun_grad(z):
        p = path_of(z)
        f = action(sys, p)
        if not np.isfinite(f):
            return np.inf, None
        return f, action_gradient(sys, p).ravel()

    def feasible(z):
        return node_separations(z.reshape(shape)).min() >= guard

    res = lbfgs(fun_grad, nodes[1:-1].ravel(),
                precondition=_kinetic_preconditioner(sys, np.diff(times)),
                feasible=feasible, grad_tol=opts.grad_tol, max_iters=opts.max_iters)
    path = path_of(res.x)
    report = MinimizeReport(
        path=path,
        action_value=float(res.f),
        grad_norm=res.grad_norm,
        iterations=res.iterations,
        converged=res.converged,
        min_separation=float(node_separations(path.nodes[1:-1]).min()),
    )
    trapped = not res.converged and (res.guard_blocked or report.min_separation < 10 * guard)
    return report, trapped


def _random_direction(sys, rng, x, y):
    """A unit (mass norm) perturbation with zero center of mass."""
    w = rng.standard_normal(sys.shape)
    w -= np.sum(sys.m * w, axis=0) / sys.total_mass
    return w / mass_norm(sys, w)


def initial_path(sys, x, y, tau, n_nodes, rng, bow=0.0):
    """Straight segment from x to y plus small seeded noise, optionally bowed.

    ``bow`` is the amplitude of a half-sine arc in a random direction,
    relative to the endpoint scale; it is used to escape collision basins.
    """
    path = straight_path(x, y, tau, n_nodes)
    sep = mass_norm(sys, y - x)
    scale = max(sep, moment_of_inertia(sys, 0.5 * (x + y)) ** 0.5)
    nodes = path.nodes.copy()
    noise = rng.standard_normal(nodes[1:-1].shape)
    nodes[1:-1] += 1e-3 * sep * noise
    if bow:
        s = np.linspace(0.0, 1.0, n_nodes)[1:-1, None, None]
        nodes[1:-1] += bow * scale * np.sin(np.pi * s) * _random_direction(sys, rng, x, y)
    return DiscretePath(path.times, nodes)


def _validate(sys, x, y, tau, n_nodes):
    if sys.dim < 2:
        raise UnsupportedDimension(
            "fixed-time minimization needs dim >= 2; in dimension one minimizers may collide")
    if not tau > 0:
        raise ValueError("tau must be positive")
    if n_nodes < 3:
        raise ValueError("need at least three nodes")
    return as_config(sys, x), as_config(sys, y)


def minimize_fixed_time(sys, x, y, tau, n_nodes, opts=None, init=None):
    """Local minimizer of the discrete action among paths from x to y in time tau.

    ``init`` may supply a starting node array (or path) with ``n_nodes`` nodes;
    its endpoints are overwritten with x and y.  When a descent stalls against
    the collision guard, it is restarted from an arc bowed away from the
    collision, up to ``opts.restarts`` times.
    """
    opts = opts or MinimizeOptions()
    x, y = _validate(sys, x, y, tau, n_nodes)
    rng = np.random.default_rng(opts.rng_seed)
    if init is None:
        start = initial_path(sys, x, y, tau, n_nodes, rng)
    else:
        nodes = np.array(init.nodes if isinstance(init, DiscretePath) else init, dtype=float)
        if nodes.shape != (n_nodes,) + sys.shape:
            raise ValueError(f"init has shape {nodes.shape}, expected {(n_nodes,) + sys.shape}")
        nodes[0], nodes[-1] = x, y
        start = DiscretePath(uniform_times(tau, n_nodes), nodes)

    best = None
    for attempt in range(opts.restarts + 1):
        report, trapped = _descend(sys, start, opts)
        if best is None or report.action_value < best.action_value:
            best = report
        if report.converged:
            return report
        if not trapped:
            raise NonConvergence(
                f"no convergence after {report.iterations} iterations "
                f"(grad norm {report.grad_norm:.3e})", best)
        start = initial_path(sys, x, y, tau, n_nodes, rng, bow=0.5 * (attempt + 1))
    raise CollisionTrapped(
        f"all {opts.restarts + 1} starts stalled against the collision guard", best)


def phi_tau(sys, x, y, tau, n_nodes, opts=None, return_report=False):
    """Best discrete action over ``opts.restarts + 1`` randomized starts.

    An upper approximation of the fixed-time critical action ``phi(x, y, tau)``.
    The first start is the noisy straight segment, the others are bowed arcs.
    """
    opts = opts or MinimizeOptions()
    x, y = _validate(sys, x, y, tau, n_nodes)
    rng = np.random.default_rng(opts.rng_seed)
    single = replace(opts, restarts=0)
    best, failure = None, None
    for k in range(opts.restarts + 1):
        start = initial_path(sys, x, y, tau, n_nodes, rng, bow=0.0 if k == 0 else 0.3 * k)
        try:
            report = minimize_fixed_time(sys, x, y, tau, n_nodes,
                                         replace(single, rng_seed=opts.rng_seed + k),
                                         init=start.nodes)
        except (NonConvergence, CollisionTrapped) as exc:
            failure = exc
            continue
        if best is None or report.action_value < best.action_value:
            best = report
    if best is None:
        raise failure
    return best if return_report else best.action_value
