# %% [markdown]
# # Certifying free time minimizers
#
# A discrete path is accepted as a free time minimizer when it is critical
# for the discrete action, has zero energy pointwise, avoids collisions,
# keeps a uniformly moving center of mass, and every sub-arc is at least as
# good as a fresh fixed-time solve between the same endpoints.

# %%
import numpy as np

from freetime.action import DiscretePath
from freetime.central import HomotheticSpec, find_minimal_configuration, homothetic_path
from freetime.configuration import MassSystem
from freetime.free_time import verify_free_time_minimizer

sys = MassSystem.equal(2, 2)
ray = HomotheticSpec.from_configuration(sys, find_minimal_configuration(sys).a0)


def show(title, report):
    print(title)
    for c in report.checks:
        print(f"  {'pass' if c.passed else 'FAIL'}  {c.name:20s} value {c.value:10.3e}  "
              f"tolerance {c.tolerance:.3e}")


# %%
path = homothetic_path(ray, 1.0, 8.0, 2001)
show("homothetic arc on [1, 8]", verify_free_time_minimizer(sys, path))
show("same arc rescaled by 4", verify_free_time_minimizer(sys, path.rescaled(4.0)))

# %% [markdown]
# A straight segment at constant speed has constant T but varying U.

# %%
s = np.linspace(0, 1, 101)
x, y = np.array([[-1.0, 0], [1.0, 0]]), np.array([[-2.0, 0], [2.0, 0]])
line = DiscretePath(3 * s, (1 - s)[:, None, None] * x + s[:, None, None] * y)
show("straight line", verify_free_time_minimizer(sys, line))

# %% [markdown]
# The time-reversed ray run through total collision and out again.

# %%
t = np.linspace(-2.0, 1.0, 61)
through = DiscretePath(t, np.stack([ray.mu0 * abs(tk) ** (2 / 3) * ray.a0 for tk in t]))
show("through collision", verify_free_time_minimizer(sys, through))
