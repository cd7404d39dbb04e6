# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#     text_representation:
#       extension: .py
#       format_name: percent
# ---

# %% [markdown]
# # Neumann-Poincare spectrum on the unit sphere
#
# The static double-layer adjoint ``K*`` for the Lame system acts diagonally
# on three families of vector spherical harmonics. ``T`` eigenvalues do not
# depend on the medium. ``M`` and ``N`` eigenvalues do.
# Here the closed forms are compared with Rayleigh quotients of the assembled
# Galerkin operator. We also check that ``K*`` is Hermitian in the orthonormal
# coefficient basis.

# %%
import numpy as np

from elastomode import boundary_ops as bo
from elastomode import spectral as sp
from elastomode.media import ElasticMedium
from elastomode.sphere_basis import SphereGrid, mode_indices, normalize_basis

medium = ElasticMedium(lam=1.0, mu=1.0)
print(f"c_p = {medium.cp:.6f}, c_s = {medium.cs:.6f}")

# %% [markdown]
# ## Closed forms
#
# ``T_1`` sits at ``1/2``. ``M_1`` shares that value, and ``N_n``
# approaches ``mu / (2 (lam + 2 mu))`` for large ``n``.

# %%
for n in range(1, 6):
    vals = [sp.np_eigenvalue(medium, f, n) for f in "TMN"]
    print(n, "  ".join(f"{v:+.6f}" for v in vals))

# %% [markdown]
# ## Rayleigh quotients
#
# Each normalized basis field is projected onto the grid, and
# ``<K* b, b>`` is compared with the closed form. The error sits at round-off
# already for a moderate grid.

# %%
grid = SphereGrid(16)
K = bo.assemble_np(medium, grid, 0.0).matrix
for idx in mode_indices(3):
    if idx.m != 0:
        continue
    b, _ = normalize_basis(medium, idx, grid)
    c = grid.analysis(b).reshape(-1)
    rq = np.vdot(c, K @ c).real
    exact = sp.np_eigenvalue(medium, idx.family, idx.n)
    print(f"{idx.family}{idx.n}: quotient {rq:+.12f}  closed form {exact:+.12f}  diff {abs(rq - exact):.1e}")

# %% [markdown]
# ## Hermitian structure
#
# For a Hermitian ``K*`` the eigenvalues of the matrix reproduce the closed forms.
# Their multiplicities are ``2n + 1`` for ``T`` and ``M`` and ``2n - 1`` for ``N``.
# Coincident values add up: for ``lam = mu`` the ``N_2`` eigenvalue ``1/6`` equals
# the ``T_4`` one, so 3 + 9 = 12 eigenvalues share it.

# %%
print("adjoint defect", np.abs(K - K.conj().T).max())
ev = np.linalg.eigvalsh(0.5 * (K + K.conj().T))
for f, n in [("T", 2), ("M", 2), ("N", 2)]:
    lam = sp.np_eigenvalue(medium, f, n)
    print(f, n, "multiplicity", int(np.sum(np.abs(ev - lam) < 1e-9)))

# %% [markdown]
# ## Jump relation
#
# Approaching the surface from outside, the traction of the single layer tends to
# ``(1/2 + K*)[phi]``. The residual at three offsets is Richardson-extrapolated.

# %%
b, _ = normalize_basis(medium, sp.ModeIndex("T", 2, 1), SphereGrid(12))
rep = bo.jump_test(medium, SphereGrid(12), 0.0, b, offsets=(1e-2, 5e-3, 2.5e-3))
print("extrapolated jump residual", rep.max_extrapolated)
