# %% [markdown]
# # The homothetic parabolic ray
#
# Among all configurations of fixed size I = 1 the minima of the potential
# U generate the simplest zero-energy motions: every body moves radially,
# x(t) = mu0 t^{2/3} a0, with mu0^3 = (9/2) U0.  Starting at total collision
# at t = 0, these motions are free time minimizers, so their action has a
# closed form.  This script finds a0, builds the ray, and compares the
# discrete action against the exact one.

# %%
import numpy as np

from freetime.action import action
from freetime.central import (HomotheticSpec, find_minimal_configuration,
                              homothetic_action, homothetic_path)
from freetime.configuration import MassSystem, pair_distances

# %% [markdown]
# ## Minimal configurations
# Two equal masses: a segment of length sqrt 2.  Three equal masses in the
# plane: the equilateral triangle with unit sides, U0 = 3.

# %%
for n, dim in [(2, 2), (3, 2), (4, 3)]:
    sys = MassSystem.equal(n, dim)
    r = find_minimal_configuration(sys, seed=0)
    print(f"N={n} d={dim}: U0 = {r.U0:.10f}  central residual = {r.central_residual:.1e}  "
          f"distances = {np.round(pair_distances(r.a0), 6)}")

# %% [markdown]
# ## The ray and its action
# For two unit masses the action between t = 1 and t = 8 is
# (4/3) mu0^2 (8^{1/3} - 1) = (4/3) mu0^2.

# %%
sys = MassSystem.equal(2, 2)
a0 = find_minimal_configuration(sys, seed=0).a0
ray = HomotheticSpec.from_configuration(sys, a0)
exact = homothetic_action(ray, 1.0, 8.0)
print(f"mu0 = {ray.mu0:.12f}, exact action on [1, 8] = {exact:.12f}")

# %% [markdown]
# The discrete action (chordal kinetic term, trapezoidal potential) converges
# to the exact value at second order in the node spacing.

# %%
print(f"{'nodes':>6} {'discrete':>16} {'rel. error':>11}")
for n in (63, 125, 250, 500, 1000, 2000, 4000):
    A = action(sys, homothetic_path(ray, 1.0, 8.0, n))
    print(f"{n:6d} {A:16.12f} {abs(A - exact) / exact:11.2e}")
