"""Discrete paths and the discretized Lagrangian action.

The action of a path with nodes ``x_0..x_n`` at times ``t_0..t_n`` is

    A = sum_k  |x_{k+1} - x_k|^2 / (2 dt_k)  +  dt_k (U(x_k) + U(x_{k+1})) / 2

with ``|.|`` the mass norm.  This is the Lagrangian of a trapezoidal
variational integrator, so its critical points satisfy a discrete form of
Newton's equations.
"""
from dataclasses import dataclass

import numpy as np

from .configuration import COLLISION_RTOL, as_config
from .errors import CollisionError, DimensionMismatch


@dataclass(frozen=True)
class DiscretePath:
    times: np.ndarray
    nodes: np.ndarray  # (n+1, N, d)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        nodes = np.asarray(self.nodes, dtype=float)
        if times.ndim != 1 or len(times) < 2:
            raise ValueError("a path needs at least two time values")
        if nodes.ndim != 3 or nodes.shape[0] != len(times):
            raise DimensionMismatch(
                f"{len(times)} times but node array of shape {nodes.shape}")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "nodes", nodes)

    def __len__(self):
        return len(self.times)

    def duration(self):
        return float(self.times[-1] - self.times[0])

    @property
    def dt(self):
        return np.diff(self.times)

    def restrict(self, i, j):
        """Sub-path on nodes ``i..j`` inclusive."""
        return DiscretePath(self.times[i:j + 1], self.nodes[i:j + 1])

    def rescaled(self, lam):
        """Apply ``x -> lam x``, ``t -> lam^{3/2} t``; the action scales by ``lam^{1/2}``."""
        return DiscretePath(lam**1.5 * self.times, lam * self.nodes)

    def shifted(self, t_start=0.0):
        return DiscretePath(self.times - self.times[0] + t_start, self.nodes)


def uniform_times(tau, n_nodes, t0=0.0):
    return t0 + tau * np.linspace(0.0, 1.0, n_nodes)


def straight_path(x, y, tau, n_nodes, t0=0.0):
    s = np.linspace(0.0, 1.0, n_nodes)[:, None, None]
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return DiscretePath(uniform_times(tau, n_nodes, t0), (1 - s) * x + s * y)


def _check(sys, path):
    if path.nodes.shape[1:] != sys.shape:
        raise DimensionMismatch(
            f"path nodes have shape {path.nodes.shape[1:]}, system expects {sys.shape}")


def node_separations(nodes):
    """Minimal pairwise distance at every node of an ``(K, N, d)`` array."""
    i, j = np.triu_indices(nodes.shape[1], k=1)
    r = np.linalg.norm(nodes[:, i] - nodes[:, j], axis=-1)
    return r.min(axis=1)


def node_potentials(sys, nodes):
    """U at every node; ``inf`` where a node collides."""
    i, j = np.triu_indices(sys.n_bodies, k=1)
    r = np.linalg.norm(nodes[:, i] - nodes[:, j], axis=-1)
    m = np.asarray(sys.masses)
    scale = COLLISION_RTOL * (1.0 + np.linalg.norm(nodes.reshape(len(nodes), -1), axis=1))
    with np.errstate(divide="ignore"):
        U = np.sum(m[i] * m[j] / r, axis=1)
    U[r.min(axis=1) < scale] = np.inf
    return U


def node_accelerations(sys, nodes):
    """Newtonian accelerations at every node, shape ``(K, N, d)``."""
    diff = nodes[:, None, :, :] - nodes[:, :, None, :]  # [k, i, j] = r_j - r_i
    r = np.linalg.norm(diff, axis=-1)
    idx = np.arange(sys.n_bodies)
    r[:, idx, idx] = np.inf
    w = np.asarray(sys.masses)[None, None, :] / r**3
    return np.einsum("kij,kijd->kid", w, diff)


def interval_kinetic(sys, path):
    """Chordal kinetic energy on each interval, ``|dx|^2 / (2 dt^2)``."""
    _check(sys, path)
    dx = np.diff(path.nodes, axis=0)
    return 0.5 * np.sum(sys.m[None] * dx * dx, axis=(1, 2)) / path.dt**2


def interval_potential(sys, path):
    """Trapezoidal average of U on each interval."""
    _check(sys, path)
    U = node_potentials(sys, path.nodes)
    return 0.5 * (U[:-1] + U[1:])


def interval_energy(sys, path):
    """Discrete energy ``T - U`` on each interval."""
    return interval_kinetic(sys, path) - interval_potential(sys, path)


def action_parts(sys, path):
    """Kinetic and potential contributions ``(K, P)`` with ``A = K + P``."""
    dt = path.dt
    K = float(np.sum(interval_kinetic(sys, path) * dt))
    P = float(np.sum(interval_potential(sys, path) * dt))
    return K, P


def action(sys, path):
    """Discrete Lagrangian action; ``inf`` when any node collides."""
    K, P = action_parts(sys, path)
    return K + P


def mean_energy(sys, path):
    """Time average of ``T - U``.

    For a fixed-time minimizer on a uniform grid this is ``-d phi / d tau``:
    stretching time by ``alpha`` multiplies K by ``1/alpha`` and P by ``alpha``.
    """
    K, P = action_parts(sys, path)
    return (K - P) / path.duration()


def action_gradient(sys, path):
    """Exact gradient of :func:`action` with respect to the interior nodes.

    Returns an ``(n-1, N, d)`` array of plain coordinate partial derivatives;
    the endpoints are held fixed.
    """
    _check(sys, path)
    nodes = path.nodes
    interior = nodes[1:-1]
    if np.any(node_separations(interior) < COLLISION_RTOL * (1.0 + np.abs(interior).max())):
        raise CollisionError("action is not differentiable at a colliding node")
    dt = path.dt
    vel = np.diff(nodes, axis=0) / dt[:, None, None]
    grad = sys.m[None] * (vel[:-1] - vel[1:])
    weight = 0.5 * (dt[:-1] + dt[1:])
    grad += weight[:, None, None] * sys.m[None] * node_accelerations(sys, interior)
    return grad


def path_at(path, t):
    """Linear interpolation of the node configurations at time ``t``."""
    k = int(np.clip(np.searchsorted(path.times, t) - 1, 0, len(path) - 2))
    s = (t - path.times[k]) / (path.times[k + 1] - path.times[k])
    return (1 - s) * path.nodes[k] + s * path.nodes[k + 1]


def constant_path(sys, x, tau, n_nodes):
    x = as_config(sys, x)
    return DiscretePath(uniform_times(tau, n_nodes), np.repeat(x[None], n_nodes, axis=0))
