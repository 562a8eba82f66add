# %% [markdown]
# # Zero-energy motions at large times
#
# Integrating Newton's equations from homothetic initial data reproduces the
# ray; along any zero-energy motion I grows like t^{4/3}, U decays like
# t^{-2/3}, and g = I' I^{-1/4} never decreases.  The coefficients of the
# two power laws are tied: c_I = (9/2) c_U.

# %%
import numpy as np

from freetime.central import HomotheticSpec, find_minimal_configuration
from freetime.configuration import MassSystem, kinetic, potential
from freetime.dynamics import (diagnostics, fit_power_law, g_monotonicity, integrate_newton,
                               lagrange_jacobi_residual, parabolic_diagnostic)

# %% [markdown]
# ## The exact ray, integrated

# %%
sys = MassSystem.equal(3, 2)
ray = HomotheticSpec.from_configuration(sys, find_minimal_configuration(sys, seed=0).a0)
t = np.geomspace(1.0, 100.0, 2001)
traj = integrate_newton(sys, ray.position(1.0), ray.velocity(1.0), (1.0, 100.0), t_eval=t)
s = diagnostics(sys, traj)
exact = np.stack([ray.position(tk) for tk in t])
print(f"tracking error {np.abs(traj.positions - exact).max() / np.abs(exact).max():.1e}, "
      f"energy drift {traj.max_energy_drift:.1e}")
print(f"Lagrange-Jacobi residual {lagrange_jacobi_residual(sys, traj, s):.1e}")
fI, fU = fit_power_law(s.times, s.I), fit_power_law(s.times, s.U)
print(f"I ~ {fI.coefficient:.6f} t^{fI.exponent:.6f},  U ~ {fU.coefficient:.6f} t^{fU.exponent:.6f}")
print(f"c_I / c_U = {fI.coefficient / fU.coefficient:.6f}  (9/2 expected)")
print(f"g is constant on the ray: spread {np.ptp(s.g):.1e}")

# %% [markdown]
# ## A perturbed zero-energy motion
# Kick the ray, then rescale velocities so the energy is exactly zero.  The
# motion is no longer homothetic; g now grows, and the Cauchy-Schwarz bound
# I'^2 <= 8 I T behind that monotonicity is visible in the data.

# %%
rng = np.random.default_rng(2)
x0 = ray.position(1.0) + 0.1 * rng.standard_normal((3, 2))
v0 = ray.velocity(1.0) + 0.1 * rng.standard_normal((3, 2))
x0 -= x0.mean(axis=0)
v0 -= v0.mean(axis=0)
v0 *= np.sqrt(potential(sys, x0) / kinetic(sys, v0))
traj = integrate_newton(sys, x0, v0, (1.0, 200.0), t_eval=np.geomspace(1.0, 200.0, 4001))
s = diagnostics(sys, traj)
mono = g_monotonicity(s)
print(f"energy {traj.energy0:.1e}; g from {s.g[0]:.4f} to {s.g[-1]:.4f}, "
      f"min increment {mono.min_increment:.1e}")
print(f"max of I'^2 / (8 I T) = {np.max(s.I_dot**2 / (8 * s.I * s.T)):.6f}")
fI = fit_power_law(s.times, s.I)
print(f"late-time I exponent {fI.exponent:.4f}")
par = parabolic_diagnostic(s)
print(f"kinetic energy on the tail: max {par.T_tail_max:.3e}, decreasing = {par.decreasing}")
