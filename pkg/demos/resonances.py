# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # Resonances of a small negative-contrast particle
#
# The particle density contrast is ``c(Omega) = -alpha + i beta Omega``. The
# static condition ``tau(Omega) = 0`` then has one purely imaginary root per
# retained mode. A second-order size correction with coefficient ``rho`` turns
# each condition into a cubic. We solve that cubic in closed form and check
# every root by its residual.

# %%
import numpy as np

from elastomode import resonance as rs
from elastomode import spectral as sp
from elastomode.errors import ParameterConditionViolated
from elastomode.media import ElasticMedium, Quasiparticle
from elastomode.sphere_basis import SphereGrid

medium = ElasticMedium(1.0, 1.0)
N = 6

# %% [markdown]
# ## Admissible contrast
#
# All static roots lie in the lower half plane only when ``alpha`` exceeds a bound set
# by the largest NP eigenvalue among the retained modes.

# %%
print("alpha bound", rs.alpha_bound(medium, N))
try:
    rs.static_resonances(medium, Quasiparticle((0, 0, 0), 1e-2, 2.0, 1.0), N)
except ParameterConditionViolated as exc:
    print("rejected:", exc)

# %% [markdown]
# ## Static resonances

# %%
particle = Quasiparticle((0, 0, 0), 1e-2, 10.0, 1.0)
static = rs.static_resonances(medium, particle, N)
for r in static.roots()[:6]:
    print(f"{r.family}{r.n}: Omega = {r.omega.imag:+.6f} i, residual {r.residual:.1e}")
print("radius", rs.static_radius(medium, particle, N))

# %% [markdown]
# ## Second-order corrections
#
# ``rho`` is the real number ``<A_1 b, b>``. Here it is computed from the assembled operators
# with the ``m = 0`` member of each mode. The factored form
# ``(lambda - 1/2) <S^-1 P b, b>`` is an independent route to the same value.

# %%
grid = SphereGrid(12)
table = sp.varrho_table(medium, grid, N)
for (f, n), v in list(table.items())[:8]:
    direct, factored = sp.varrho_forms(medium, grid, f, n)
    print(f"{f}{n}: rho = {v:+.12f}   factored {factored.real:+.12f}")

# %% [markdown]
# ## Corrected roots
#
# Modes with positive ``rho`` use Cardano's formula, which gives two complex
# roots and one imaginary root. Modes with negative ``rho`` use the trigonometric
# form with three imaginary roots. The near root tracks the static value. The
# far roots scale like ``1/delta``.

# %%
for delta in (1e-2, 1e-3):
    part = Quasiparticle((0, 0, 0), delta, 10.0, 1.0)
    cor = rs.corrected_resonances(medium, part, N, table)
    print(f"delta = {delta}: {len(cor.roots())} roots, worst relative residual {cor.max_residual():.1e}")
    for mr in cor.modes[:3]:
        print("  ", mr.family, mr.n, mr.case, [complex(np.round(r.omega, 4)) for r in mr.roots])
