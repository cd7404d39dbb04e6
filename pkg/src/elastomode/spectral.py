"""Closed-form NP spectrum, transmission eigenvalues and modal synthesis.

Modal amplitudes follow the scaled transmission problem on the reference
sphere: the density solving ``A psi = F / delta`` has coefficients
``<psi, b> = <F, b> / (delta tau)`` on each normalized basis field ``b``,
and the scattered field is ``u_sca(x) = delta S^{omega delta}[psi]((x - z) / delta)``.
Inner products conjugate their second argument.
"""
import csv
from dataclasses import dataclass, field

import numpy as np

from . import boundary_ops as bo
from .errors import AtResonance, DegreeTooLow, ExteriorViolation, IndexOutOfRange, RealityViolation
from .media import contrast
from .sphere_basis import FAMILIES, ModeIndex, component_degree, inner_product, mode_indices, normalize_basis

__all__ = [
    "np_eigenvalue",
    "tau_static",
    "tau_perturbed",
    "TauValue",
    "varrho",
    "varrho_forms",
    "varrho_table",
    "ModalExpansion",
    "solve_modal",
    "solve_modal_static",
    "scattered_field_freq",
    "modal_coefficients",
    "resonance_threshold",
    "decay_exponent",
]

REALITY_TOL = 1e-8


def np_eigenvalue(medium, family, n):
    """Eigenvalue of the static NP operator on the unit sphere for the family ``T``, ``M`` or ``N``."""
    if family not in FAMILIES:
        raise IndexOutOfRange(f"unknown family {family!r}")
    if int(n) != n or n < 1:
        raise IndexOutOfRange(f"degree n must be a positive integer, got {n!r}")
    lam, mu = medium.lam, medium.mu
    if family == "T":
        return 3.0 / (2.0 * (2 * n + 1))
    d = 2.0 * (lam + 2 * mu) * (4 * n * n - 1)
    if family == "M":
        return (3 * lam - 2 * mu * (2 * n * n - 2 * n - 3)) / d
    return (-3 * lam + 2 * mu * (2 * n * n + 2 * n - 3)) / d


def tau_static(c, lam_in):
    """``-(c + 1)/2 + (c - 1) lambda``."""
    return -(c + 1) / 2 + (c - 1) * lam_in


def tau_perturbed(c, lam_in, omega_delta, rho):
    """``tau + (c - 1) (omega delta)^2 rho``; equals the static value at ``omega = 0``."""
    return tau_static(c, lam_in) + (c - 1) * omega_delta**2 * rho


def resonance_threshold(c):
    return 1e-10 * (1 + abs(c))


@dataclass(frozen=True)
class TauValue:
    mode: ModeIndex
    tau_static: complex
    varrho: float
    tau_perturbed: complex


def _basis_coefs(medium, idx, grid):
    b, _ = normalize_basis(medium, idx, grid)
    return b, grid.analysis(b).reshape(-1)


def varrho_forms(medium, grid, family, n, m=0):
    """Second-order correction computed two ways.

    Returns
    -------
    (complex, complex)
        ``<A1 b, b>`` with ``A1 = (-I/2 + K*) S^-1 P``, and the factored
        ``(lambda - 1/2) <S^-1 P b, b>``.
    """
    idx = ModeIndex(family, n, m)
    _, c = _basis_coefs(medium, idx, grid)
    S = bo.cached_operator(medium, grid, "S", 0.0).matrix
    K = bo.cached_operator(medium, grid, "K", 0.0).matrix
    P = bo.cached_operator(medium, grid, "P").matrix
    y, _ = bo.solve_dense(S, P @ c)
    a1 = np.vdot(c, K @ y - 0.5 * y)
    fac = (np_eigenvalue(medium, family, n) - 0.5) * np.vdot(c, y)
    return complex(a1), complex(fac)


def varrho(medium, particle, grid, family, n, m=0, tol=REALITY_TOL):
    """Real correction ``rho_{i,n} = <A1 b, b>``.

    ``particle`` is accepted for interface symmetry; the value depends only on
    the medium and the mode.

    Raises
    ------
    RealityViolation
        If the imaginary part exceeds ``tol``.
    """
    a1, _ = varrho_forms(medium, grid, family, n, m)
    if abs(a1.imag) > tol:
        raise RealityViolation(f"Im rho_{family},{n} = {a1.imag:.3e} exceeds {tol:.1e}")
    return a1.real


def varrho_table(medium, grid, N, families=FAMILIES):
    """``{(family, n): rho}`` for ``n <= N`` using the ``m = 0`` representative."""
    return {(f, n): varrho(medium, None, grid, f, n) for f in families for n in range(1, N + 1)}


def _usable_modes(N, grid):
    keep, dropped = [], []
    for idx in mode_indices(N):
        (keep if component_degree(idx.family, idx.n) <= grid.band else dropped).append(idx)
    return keep, dropped


@dataclass
class ModalExpansion:
    """Modal solution of the scaled transmission problem.

    Attributes
    ----------
    N : int
    delta : float
    omega : complex
    rhs : dict
        ``ModeIndex -> <F, b>``.
    tau : dict
        ``ModeIndex -> tau`` used in the denominator.
    coefficients : dict
        ``ModeIndex -> <psi, b> = <F, b> / (delta tau)``.
    dropped : tuple
        Modes with ``n <= N`` the grid cannot resolve.
    """

    N: int
    delta: float
    omega: complex
    rhs: dict
    tau: dict
    coefficients: dict
    dropped: tuple = ()
    basis: dict = field(default_factory=dict, repr=False)

    def density(self):
        """Nodal density ``sum coefficient * b`` on the grid."""
        vals = [self.coefficients[k] * self.basis[k] for k in self.coefficients]
        return np.sum(vals, axis=0)

    def to_csv(self, path, header=None):
        """One row per mode: family, n, m, Re/Im coefficient, Re/Im tau."""
        with open(path, "w", newline="") as fh:
            if header:
                fh.write(f"# {header}\n")
            w = csv.writer(fh)
            w.writerow(["family", "n", "m", "coef_re", "coef_im", "tau_re", "tau_im"])
            for k in sorted(self.coefficients):
                c, t = self.coefficients[k], self.tau[k]
                w.writerow([k.family, k.n, k.m] + [f"{v:.17g}" for v in (c.real, c.imag, t.real, t.imag)])


def modal_coefficients(medium, grid, F, N):
    """``{ModeIndex: <F, b>}`` and the normalized basis fields for ``n <= N``."""
    modes, dropped = _usable_modes(N, grid)
    rhs, basis = {}, {}
    for idx in modes:
        b, _ = normalize_basis(medium, idx, grid)
        basis[idx] = b
        rhs[idx] = complex(inner_product(F, b, grid))
    return rhs, basis, tuple(dropped)


def _taus(medium, particle, grid, modes, omega, tau_mode, rho_table):
    c, _ = contrast(particle, omega)
    od = omega * particle.delta
    out = {}
    if tau_mode == "rayleigh" and omega != 0:
        A = bo.assemble_A(medium, particle, grid, omega).matrix
    for idx in modes:
        lam_in = np_eigenvalue(medium, idx.family, idx.n)
        if tau_mode == "static" or omega == 0:
            t = tau_static(c, lam_in)
        elif tau_mode == "second_order":
            key = (idx.family, idx.n)
            r = rho_table[key] if rho_table is not None and key in rho_table else varrho(medium, particle, grid, idx.family, idx.n)
            t = tau_perturbed(c, lam_in, od, r)
        elif tau_mode == "rayleigh":
            b, _ = normalize_basis(medium, idx, grid)
            cb = grid.analysis(b).reshape(-1)
            t = complex(np.vdot(cb, A @ cb))
        else:
            raise ValueError(f"unknown tau mode {tau_mode!r}")
        if abs(t) < resonance_threshold(c):
            raise AtResonance(f"|tau| = {abs(t):.3e} for mode {idx}", mode=idx)
        out[idx] = complex(t)
    return out


def solve_modal(medium, particle, source, grid, N, omega, rhs="exact", tau="second_order", rho_table=None):
    """Modal expansion at frequency ``omega``.

    Parameters
    ----------
    rhs : {"exact", "asymptotic"}
        Right-hand side from the exact traces or the leading-order small-particle form.
    tau : {"second_order", "rayleigh", "static"}
        ``tau + (c - 1)(omega delta)^2 rho``, the diagonal entry ``<A b, b>`` of
        the assembled transmission operator, or the static value.
    """
    if rhs == "exact":
        F = bo.rhs_exact(medium, particle, source, grid, omega)
    elif rhs == "asymptotic":
        F = bo.rhs_asymptotic(medium, particle, source, grid, omega)
    else:
        raise ValueError(f"unknown rhs {rhs!r}")
    coefs, basis, dropped = modal_coefficients(medium, grid, F, N)
    taus = _taus(medium, particle, grid, list(coefs), omega, tau, rho_table)
    d = particle.delta
    amp = {k: coefs[k] / (d * taus[k]) for k in coefs}
    return ModalExpansion(N, d, complex(omega), coefs, taus, amp, dropped, basis)


def solve_modal_static(medium, particle, source, grid, N):
    """Static modal solution ``<psi, b> = <F, b> / (delta tau)`` with ``F`` from the Kelvin traces."""
    return solve_modal(medium, particle, source, grid, N, 0.0, rhs="exact", tau="static")


def _exterior_points(particle, x):
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if np.any(particle.contains(x, closed=True)):
        raise ExteriorViolation("observation point inside the closed particle")
    return x


def scattered_field_freq(medium, particle, source, grid, N, omega, x, rhs="exact", tau="second_order", rho_table=None):
    """Modal scattered field ``u_sca(x)`` at frequency ``omega``.

    Returns
    -------
    ndarray, shape (P, 3) or (3,) for a single point
    """
    single = np.ndim(x) == 1
    pts = _exterior_points(particle, x)
    exp = solve_modal(medium, particle, source, grid, N, omega, rhs=rhs, tau=tau, rho_table=rho_table)
    u = field_from_density(medium, particle, grid, omega, exp.density(), pts)
    return u[0] if single else u


def field_from_density(medium, particle, grid, omega, psi, x):
    """``delta S^{omega delta}[psi]((x - z) / delta)`` for a density on the reference sphere."""
    d = particle.delta
    X = (np.atleast_2d(x) - particle.z) / d
    return d * bo.layer_potential(medium, grid, omega * d, psi, X)


def oracle_field(medium, particle, source, grid, omega, x):
    """Scattered field from the dense block solve."""
    sol = bo.oracle_solve(medium, particle, source, grid, omega)
    pts = _exterior_points(particle, x)
    return field_from_density(medium, particle, grid, omega, sol.psi, pts)


def check_grid(grid, N):
    """Raise :class:`DegreeTooLow` if any ``n <= N`` mode is unresolved."""
    _, dropped = _usable_modes(N, grid)
    if dropped:
        raise DegreeTooLow(f"grid degree {grid.degree} cannot resolve {dropped[0]}")


def decay_exponent(values):
    """Least-squares exponent ``p`` in ``max_{family, m} |value| ~ n^-p``.

    Parameters
    ----------
    values : dict
        ``ModeIndex -> complex`` such as ``ModalExpansion.rhs``.
    """
    peak = {}
    for k, v in values.items():
        peak[k.n] = max(peak.get(k.n, 0.0), abs(v))
    ns = np.array(sorted(peak), dtype=float)
    a = np.array([peak[int(n)] for n in ns])
    keep = a > 0
    if keep.sum() < 2:
        raise ValueError("need at least two degrees with nonzero coefficients")
    return float(-np.polyfit(np.log(ns[keep]), np.log(a[keep]), 1)[0])
