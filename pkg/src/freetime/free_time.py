"""Free time minimizers and the critical action potential phi(x, y).

The transfer time is optimized on top of the fixed-time solver.  Stretching
time by a factor alpha multiplies the kinetic part of the action by 1/alpha
and the potential part by alpha, so along a family of fixed-time minimizers

    d phi(x, y, tau) / d tau = -h(tau),   h = mean of (T - U)

and the optimal transfer time is a zero of the mean energy h.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .action import (DiscretePath, action, action_gradient, interval_energy,
                     mean_energy, node_potentials,
                     node_separations, straight_path)
from .configuration import (as_config, center_of_mass, mass_norm,
                            max_body_distance)
from .errors import (CollisionError, CollisionTrapped, DegenerateEndpoints,
                     NonConvergence, UnsupportedDimension)
from .minimize import MinimizeOptions, minimize_fixed_time, phi_tau
from .optimize import bisect_sign_change, golden_section

SCAN_POINTS = 8
BISECTION_ITERS = 15


@dataclass(frozen=True)
class TauBracket:
    t_lo: float
    t_hi: float

    def __post_init__(self):
        if not 0 < self.t_lo < self.t_hi:
            raise ValueError(f"invalid bracket [{self.t_lo}, {self.t_hi}]")


@dataclass(frozen=True)
class Probe:
    tau: float
    phi: float
    mean_energy: float
    converged: bool


@dataclass(frozen=True)
class FreeTimeResult:
    path: DiscretePath
    tau_star: float
    phi_value: float
    energy_residual: float
    report: object
    bracket: TauBracket = None
    probes: tuple = ()
    method: str = "bisection"


def tau_bracket(sys, x, y, action_upper_bound):
    """Interval of transfer times that can carry action below the given bound.

    The lower end follows from ``2 A tau >= m0 d^2`` with ``d`` the largest
    body displacement.  The upper end is the largest tau for which a curve
    confined to the ball reachable with action A still has potential
    contribution ``tau m0^2 / (2 (|x| + (2 A tau / m0)^{1/2}))`` below A,
    doubled as a safety margin.
    """
    x, y = as_config(sys, x), as_config(sys, y)
    d = max_body_distance(x, y)
    if d == 0:
        raise DegenerateEndpoints("x and y coincide")
    A = float(action_upper_bound)
    if not A > 0:
        raise ValueError("action bound must be positive")
    m0 = sys.min_mass
    t_lo = m0 * d**2 / (2 * A)
    radius = float(np.max(np.linalg.norm(x, axis=1)))

    def excess(tau):
        return tau * m0**2 / (2 * (radius + (2 * A * tau / m0) ** 0.5)) - A

    hi = max(t_lo, 1e-300)
    while excess(hi) < 0:
        hi *= 2
    root = brentq(excess, hi / 2 if hi > t_lo else 0.0, hi, xtol=1e-14 * hi, rtol=1e-12)
    return TauBracket(t_lo=t_lo, t_hi=max(2 * root, 2 * t_lo))


def _probe_time(sys, x, y, n_nodes):
    """Transfer time minimizing the action of the straight segment, ``sqrt(K1 / P1)``."""
    seg = straight_path(x, y, 1.0, n_nodes)
    U = node_potentials(sys, seg.nodes)
    if not np.all(np.isfinite(U)):
        U = node_potentials(sys, np.stack([x, y]))
    P1 = float(np.mean(U))
    K1 = 0.5 * mass_norm(sys, y - x) ** 2
    return (K1 / P1) ** 0.5


def energy_residual(sys, path):
    """Time average of ``|T - U|`` over the intervals of the path."""
    dt = path.dt
    return float(np.sum(np.abs(interval_energy(sys, path)) * dt) / path.duration())


class _TauSolver:
    """Fixed-time solves along tau, warm-started from the nearest solved tau."""

    def __init__(self, sys, x, y, n_nodes, opts):
        self.sys, self.x, self.y, self.n_nodes, self.opts = sys, x, y, n_nodes, opts
        self.solved = {}

    def solve(self, tau):
        if tau in self.solved:
            return self.solved[tau]
        init = None
        if self.solved:
            near = min(self.solved, key=lambda t: abs(np.log(t / tau)))
            init = self.solved[near].path.nodes
        try:
            report = minimize_fixed_time(self.sys, self.x, self.y, tau, self.n_nodes,
                                         self.opts, init=init)
        except NonConvergence as exc:
            if exc.report is None:
                raise
            report = exc.report
        self.solved[tau] = report
        return report

    def h(self, tau):
        return mean_energy(self.sys, self.solve(tau).path)

    def phi(self, tau):
        return self.solve(tau).action_value

    def probes(self):
        return tuple(Probe(tau=t, phi=r.action_value,
                           mean_energy=mean_energy(self.sys, r.path), converged=r.converged)
                     for t, r in sorted(self.solved.items()))


def minimize_free_time(sys, x, y, n_nodes, opts=None):
    """Minimize the discrete action over paths from x to y and over the transfer time.

    The optimal time is located by bisection on the mean energy inside the
    a-priori bracket; if the mean energy does not change sign exactly once
    on a log-spaced scan, golden-section search on ``tau -> phi(x, y, tau)``
    is used instead.
    """
    opts = opts or MinimizeOptions()
    x, y = as_config(sys, x), as_config(sys, y)
    if np.array_equal(x, y):
        raise DegenerateEndpoints("the free time infimum between equal configurations is not attained")
    if sys.dim < 2:
        raise UnsupportedDimension("free time minimization needs dim >= 2")

    solver = _TauSolver(sys, x, y, n_nodes, opts)
    tau_p = _probe_time(sys, x, y, n_nodes)
    bracket = tau_bracket(sys, x, y, solver.phi(tau_p))

    scan = np.geomspace(bracket.t_lo, bracket.t_hi, SCAN_POINTS)
    # solve outward from the probe so every warm start is a near neighbour
    for tau in sorted(scan, key=lambda t: abs(np.log(t / tau_p))):
        solver.solve(float(tau))
    h_scan = np.array([solver.h(float(t)) for t in scan])
    changes = np.flatnonzero(np.diff(np.sign(h_scan)) != 0)

    if len(changes) == 1 and h_scan[changes[0]] > 0:
        k = changes[0]
        tau_star, _ = bisect_sign_change(solver.h, float(scan[k]), float(scan[k + 1]),
                                         h_scan[k], h_scan[k + 1], max_iters=BISECTION_ITERS)
        method = "bisection"
    else:
        phis = np.array([solver.phi(float(t)) for t in scan])
        k = int(np.argmin(phis))
        lo, hi = np.log(scan[max(k - 1, 0)]), np.log(scan[min(k + 1, len(scan) - 1)])
        s_best, _, _ = golden_section(lambda s: solver.phi(float(np.exp(s))), lo, hi,
                                      tol=1e-6, max_iters=40)
        tau_star = float(np.exp(s_best))
        method = "golden-section"

    report = solver.solve(float(tau_star))
    best_tau = min(solver.solved, key=lambda t: solver.solved[t].action_value)
    if solver.solved[best_tau].action_value < report.action_value:
        tau_star, report = best_tau, solver.solved[best_tau]
    return FreeTimeResult(
        path=report.path,
        tau_star=float(report.path.duration()),
        phi_value=report.action_value,
        energy_residual=energy_residual(sys, report.path),
        report=report,
        bracket=bracket,
        probes=solver.probes(),
        method=method,
    )


def phi(sys, x, y, n_nodes, opts=None):
    """Critical action potential; exactly 0 when x = y."""
    x, y = as_config(sys, x), as_config(sys, y)
    if np.array_equal(x, y):
        return 0.0
    return minimize_free_time(sys, x, y, n_nodes, opts).phi_value


@dataclass(frozen=True)
class ToleranceSet:
    euler_lagrange: float = 1e-6  # relative to 1 + |A|
    energy: float = 1e-3  # relative to U at the middle node
    separation: float = 1e-6  # relative to the largest node size
    subinterval_slack: float = 1e-3  # relative to the restricted action
    n_subintervals: int = 8
    subinterval_nodes: int = 65
    center_of_mass: float = 1e-8  # relative to the largest node size
    seed: int = 0


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: float
    tolerance: float


@dataclass(frozen=True)
class VerificationReport:
    checks: tuple = field(default_factory=tuple)

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def __getitem__(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failed(self):
        return [c.name for c in self.checks if not c.passed]


def _subintervals(n, K, max_nodes, rng):
    """K random node-index pairs with at least three nodes each."""
    out = []
    for _ in range(K):
        i = int(rng.integers(0, n - 2))
        j = int(rng.integers(i + 2, n))
        stride = max(1, int(np.ceil((j - i) / (max_nodes - 1))))
        j = i + stride * ((j - i) // stride)
        if j - i < 2 * stride:
            stride = 1
        out.append((i, j, stride))
    return out


def verify_free_time_minimizer(sys, path, tol_set=None, opts=None):
    """Numerical certificate that a discrete path behaves as a free time minimizer.

    Checks, each reported with its value and tolerance:

    - ``euler_lagrange``: norm of the discrete action gradient
    - ``zero_energy``: max over intervals of ``|T - U|``
    - ``collision_free``: smallest interior pairwise separation
    - ``subinterval_minimal``: restricted action minus a fresh fixed-time
      minimum between the same endpoints, worst case over random subintervals
    - ``center_of_mass``: deviation of the center of mass from uniform motion
    """
    tol = tol_set or ToleranceSet()
    opts = opts or MinimizeOptions(restarts=1, grad_tol=1e-9)
    if len(path) < 5:
        raise ValueError("verification needs at least five nodes")
    nodes = path.nodes
    size = float(np.max(np.linalg.norm(nodes, axis=2)))
    checks = []

    A = action(sys, path)
    try:
        gnorm = float(np.linalg.norm(action_gradient(sys, path)))
    except CollisionError:
        gnorm = np.inf
    el_tol = tol.euler_lagrange * (1 + abs(A)) if np.isfinite(A) else 0.0
    checks.append(Check("euler_lagrange", gnorm <= el_tol, gnorm, el_tol))

    mid = node_potentials(sys, nodes[len(nodes) // 2][None])[0]
    with np.errstate(invalid="ignore"):
        e = np.abs(interval_energy(sys, path))
    e_max = float(np.max(e)) if np.all(np.isfinite(e)) else np.inf
    e_tol = tol.energy * mid if np.isfinite(mid) else 0.0
    checks.append(Check("zero_energy", e_max <= e_tol, e_max, e_tol))

    sep = float(node_separations(nodes[1:-1]).min())
    sep_tol = tol.separation * size
    checks.append(Check("collision_free", sep >= sep_tol, sep, sep_tol))

    rng = np.random.default_rng(tol.seed)
    worst = -np.inf
    if checks[-1].passed and sys.dim >= 2:
        for i, j, stride in _subintervals(len(path), tol.n_subintervals,
                                          tol.subinterval_nodes, rng):
            sub = DiscretePath(path.times[i:j + 1:stride], nodes[i:j + 1:stride])
            A_sub = action(sys, sub)
            try:
                best = phi_tau(sys, sub.nodes[0], sub.nodes[-1], sub.duration(), len(sub), opts)
            except (NonConvergence, CollisionTrapped) as exc:
                best = exc.report.action_value if exc.report is not None else -np.inf
            worst = max(worst, (A_sub - best) / max(abs(A_sub), 1e-300))
    else:
        worst = np.inf
    checks.append(Check("subinterval_minimal", worst <= tol.subinterval_slack,
                        float(worst), tol.subinterval_slack))

    G = np.array([center_of_mass(sys, z) for z in nodes])
    s = ((path.times - path.times[0]) / path.duration())[:, None]
    drift = float(np.max(np.linalg.norm(G - ((1 - s) * G[0] + s * G[-1]), axis=1)))
    com_tol = tol.center_of_mass * max(size, 1.0)
    checks.append(Check("center_of_mass", drift <= com_tol, drift, com_tol))
    return VerificationReport(tuple(checks))
