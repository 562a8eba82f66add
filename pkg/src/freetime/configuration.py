"""Configuration-space primitives for the Newtonian N-body problem.

A configuration is an ``(N, d)`` float array holding the body positions.
Every metric quantity here uses the mass inner product
``x . y = sum_i m_i <r_i, s_i>``, so that ``I(x) = x . x`` and Newton's
equations read ``x'' = grad U(x)``.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import CollisionError, DimensionMismatch

# relative threshold below which two bodies count as collided
COLLISION_RTOL = 1e-12


@dataclass(frozen=True)
class MassSystem:
    masses: tuple
    dim: int
    total_mass: float = field(init=False)
    min_mass: float = field(init=False)

    def __post_init__(self):
        masses = tuple(float(m) for m in self.masses)
        if len(masses) < 2:
            raise ValueError("need at least two bodies")
        if not all(np.isfinite(m) and m > 0 for m in masses):
            raise ValueError(f"masses must be positive and finite, got {masses}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "total_mass", float(sum(masses)))
        object.__setattr__(self, "min_mass", float(min(masses)))

    @classmethod
    def equal(cls, n, dim=2, mass=1.0):
        return cls((mass,) * n, dim)

    @property
    def n_bodies(self):
        return len(self.masses)

    @property
    def m(self):
        """Masses as an ``(N, 1)`` column, ready to broadcast over coordinates."""
        return np.asarray(self.masses)[:, None]

    @property
    def shape(self):
        return (self.n_bodies, self.dim)


@dataclass(frozen=True)
class PolarDecomposition:
    rho: float
    u: np.ndarray


def as_config(sys, x):
    """Return ``x`` as a float array of shape ``(N, d)`` or raise DimensionMismatch."""
    x = np.asarray(x, dtype=float)
    if x.shape != sys.shape:
        raise DimensionMismatch(f"expected configuration of shape {sys.shape}, got {x.shape}")
    return x


def pair_distances(x):
    """Condensed vector of ``|r_i - r_j|`` over ``i < j``."""
    i, j = np.triu_indices(x.shape[0], k=1)
    return np.linalg.norm(x[i] - x[j], axis=-1)


def min_separation(x):
    return float(pair_distances(np.asarray(x, dtype=float)).min())


def collision_threshold(x):
    return COLLISION_RTOL * (1.0 + float(np.linalg.norm(x)))


def has_collision(sys, x):
    x = as_config(sys, x)
    return min_separation(x) < collision_threshold(x)


def potential(sys, x):
    """Newtonian force function ``U = sum_{i<j} m_i m_j / r_ij``; ``inf`` at collisions."""
    x = as_config(sys, x)
    r = pair_distances(x)
    if r.min() < collision_threshold(x):
        return np.inf
    i, j = np.triu_indices(sys.n_bodies, k=1)
    m = np.asarray(sys.masses)
    return float(np.sum(m[i] * m[j] / r))


def kinetic(sys, v):
    v = as_config(sys, v)
    return 0.5 * float(np.sum(sys.m * v * v))


def mass_inner(sys, x, y):
    x = as_config(sys, x)
    y = as_config(sys, y)
    return float(np.sum(sys.m * x * y))


def mass_norm(sys, x):
    return mass_inner(sys, x, x) ** 0.5


def moment_of_inertia(sys, x):
    return mass_inner(sys, x, x)


def center_of_mass(sys, x):
    x = as_config(sys, x)
    return np.sum(sys.m * x, axis=0) / sys.total_mass


def center(sys, x):
    """Translate ``x`` so that its center of mass sits at the origin."""
    x = as_config(sys, x)
    return x - center_of_mass(sys, x)


def grad_potential(sys, x):
    """Gradient of U in the mass metric, i.e. the Newtonian accelerations.

    Row i is ``sum_{j != i} m_j (r_j - r_i) / |r_ij|^3``.
    """
    x = as_config(sys, x)
    if has_collision(sys, x):
        raise CollisionError("potential gradient undefined at a collision")
    diff = x[None, :, :] - x[:, None, :]  # diff[i, j] = r_j - r_i
    r = np.linalg.norm(diff, axis=-1)
    np.fill_diagonal(r, np.inf)
    w = np.asarray(sys.masses)[None, :] / r**3
    return np.einsum("ij,ijk->ik", w, diff)


def polar_decompose(sys, x):
    x = as_config(sys, x)
    inertia = moment_of_inertia(sys, x)
    if not inertia > 0:
        raise CollisionError("total collision at the origin has no polar decomposition")
    rho = inertia**0.5
    return PolarDecomposition(rho=rho, u=x / rho)


def max_body_distance(x, y):
    """``max_i |r_i - s_i|``, the body-wise sup norm of ``x - y``."""
    return float(np.max(np.linalg.norm(np.asarray(x) - np.asarray(y), axis=-1)))
