"""Discretized layer potentials and boundary operators on a sphere.

Discretization
--------------
Surface densities are band-limited: each Cartesian component is expanded in
spherical harmonics of degree at most ``grid.band``. An operator is stored as
the dense matrix acting on these coefficients, flattened with index
``3 * harmonic_index + component``. Nodal values and coefficients are related
by :meth:`SphereGrid.analysis` and :meth:`SphereGrid.synthesis`.

Matrix entries are

    M[(c, a), (c', b)] = sum_i w_i conj(Y_c(x_i)) integral K_ab(x_i, y) Y_c'(y) dsigma(y),

where the inner integral uses a polar product rule in coordinates whose pole
is the target ``x_i``: Gauss-Legendre in the geodesic angle and the
trapezoidal rule in azimuth. The area element ``sin(theta')`` cancels the
``1/|x - y|`` singularity, and the symmetric azimuthal rule removes the odd
Cauchy part of the conormal kernel exactly, so the same rule serves every
kernel including the principal-value one.

The grid is invariant under rotations about the z axis by multiples of
``2 pi / nphi`` and every kernel is rotation equivariant, so the inner
integrals are computed for one target per ring only. In the helicity basis
``(e_+, e_z, e_-)`` the azimuthal sum then reduces to a selection rule.
"""
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg as sla

from . import kernels
from .errors import GridMismatch, SingularSystem
from .media import contrast
from .sphere_basis import SphereGrid, sph_harm_all

__all__ = [
    "COND_LIMIT",
    "BoundaryOperator",
    "polar_rule",
    "graded_polar_rule",
    "assemble",
    "assemble_single_layer",
    "assemble_np",
    "assemble_P",
    "assemble_Q",
    "assemble_R",
    "assemble_A",
    "assemble_A1",
    "identity",
    "solve_dense",
    "invert_single_layer",
    "series_inverse_coefficients",
    "ring_moments",
    "apply_ring_moments",
    "layer_potential",
    "jump_test",
    "JumpReport",
    "incident_field",
    "incident_traces",
    "OracleSolution",
    "oracle_solve",
    "rhs_exact",
    "rhs_asymptotic",
    "write_binary",
    "read_binary",
    "loglog_slope",
    "series_remainders",
    "perturbation_remainders",
    "inverse_taylor_coefficient",
]

COND_LIMIT = 1e12

_HEL = np.array([[1.0, 0.0, 1.0], [1j, 0.0, -1j], [0.0, np.sqrt(2.0), 0.0]]) / np.sqrt(2.0)
_MU = np.array([1, 0, -1])


def _rot_z(alpha):
    c, s = np.cos(alpha), np.sin(alpha)
    R = np.zeros(np.shape(alpha) + (3, 3))
    R[..., 0, 0] = c
    R[..., 0, 1] = -s
    R[..., 1, 0] = s
    R[..., 1, 1] = c
    R[..., 2, 2] = 1.0
    return R


def _rot_y(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


@dataclass(frozen=True)
class PolarRule:
    """Quadrature on the unit sphere in coordinates with pole at ``e_z``."""

    points: np.ndarray
    weights: np.ndarray


def polar_rule(ntheta, nphi):
    """Gauss-Legendre in the polar angle on ``[0, pi]`` times trapezoid in azimuth."""
    x, w = np.polynomial.legendre.leggauss(ntheta)
    th = 0.5 * np.pi * (x + 1.0)
    wt = 0.5 * np.pi * w * np.sin(th)
    return _product_rule(th, wt, nphi)


def graded_polar_rule(h, nphi, nodes_per_panel=16, ratio=2.0):
    """Polar rule refined geometrically toward the pole, for targets at distance ``h``."""
    edges = [0.0]
    e = 0.5 * h
    while e < np.pi:
        edges.append(e)
        e *= ratio
    edges.append(np.pi)
    x, w = np.polynomial.legendre.leggauss(nodes_per_panel)
    th, wt = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        t = 0.5 * (b - a) * (x + 1.0) + a
        th.append(t)
        wt.append(0.5 * (b - a) * w * np.sin(t))
    return _product_rule(np.concatenate(th), np.concatenate(wt), nphi)


def _product_rule(th, wt, nphi):
    ph = 2 * np.pi * (np.arange(nphi) + 0.5) / nphi
    st, ct = np.sin(th)[:, None], np.cos(th)[:, None]
    pts = np.stack([st * np.cos(ph), st * np.sin(ph), ct * np.ones_like(ph)], axis=-1).reshape(-1, 3)
    wts = (wt[:, None] * np.full(nphi, 2 * np.pi / nphi)).reshape(-1)
    return PolarRule(pts, wts)


def default_rule(grid):
    """Rotated polar rule resolving products of band-limited densities and kernels."""
    L = grid.band
    nphi = 2 * ((L + 8) // 2)
    return polar_rule(L + 12, nphi)


# ----------------------------------------------------------------------------
# kernels on the sphere


def _radial(medium, kind, r, omega):
    if kind in ("S", "K"):
        return kernels.radial_kupradze(medium, r, omega)
    if kind in ("P", "Q"):
        return kernels.radial_lambda(medium, r)
    raise ValueError(f"unknown kernel kind {kind!r}")


def _kernel_block(medium, kind, omega, x, ys, nu, radius):
    """Kernel matrices ``K(radius x, radius y)`` for one target and many sources."""
    if kind == "R":
        return np.broadcast_to(medium.gamma3 * np.eye(3, dtype=complex), (ys.shape[0], 3, 3))
    d = radius * (x[None, :] - ys)
    r = np.linalg.norm(d, axis=-1)
    xhat = d / r[:, None]
    F, G, dF, dG = _radial(medium, kind, r, omega)
    if kind in ("S", "P"):
        return kernels.kernel_value(xhat, F, G)
    D = kernels.kernel_gradient(xhat, r, F, G, dF, dG)
    return kernels.conormal(medium, D, nu)


def ring_moments(medium, grid, kind, omega, radius=1.0, target_scale=1.0, rule=None):
    """Kernel moments against harmonics for the first target of every ring.

    ``H[r, a, b, c] = integral K_ab(x_r, y) Y_c(y) dsigma(y)`` over the sphere of
    the given radius, where ``x_r = target_scale * (first node of ring r)``.

    Returns
    -------
    ndarray, shape (rings, 3, 3, ncoef)
    """
    rule = rule or default_rule(grid)
    L = grid.band
    H = np.empty((grid.degree, 3, 3, grid.ncoef), dtype=complex)
    for ir, th in enumerate(grid.ring_theta):
        R = _rot_y(th)
        pts = rule.points @ R.T
        xr = R[:, 2]
        Y = sph_harm_all(L, pts)
        K = _kernel_block(medium, kind, omega, target_scale * xr, pts, xr, radius)
        H[ir] = np.einsum("q,qab,qc->abc", rule.weights * radius**2, K, Y, optimize=True)
    return H


def _moments_to_matrix(grid, H):
    """Galerkin-type coefficient matrix from the ring moments."""
    L = grid.band
    nphi = grid.nphi
    Nc = grid.ncoef
    m_of = np.concatenate([np.arange(-n, n + 1) for n in range(L + 1)])
    Yr = grid.ring_harmonics()  # (rings, Nc)
    test = (Yr.conj() * grid.ring_weights[:, None]).T  # (Nc, rings)
    Hh = np.einsum("am,rabc,bn->rmnc", _HEL.conj(), H, _HEL, optimize=True)
    M = np.zeros((Nc, 3, Nc, 3), dtype=complex)
    for i, mu in enumerate(_MU):
        for j, nu in enumerate(_MU):
            C = nphi * (test @ Hh[:, i, j, :])
            keep = ((m_of[None, :] + nu) - (m_of[:, None] + mu)) % nphi == 0
            C = np.where(keep, C, 0.0)
            for a in range(3):
                for b in range(3):
                    coef = _HEL[a, i] * np.conj(_HEL[b, j])
                    if coef != 0:
                        M[:, a, :, b] += coef * C
    return M.reshape(3 * Nc, 3 * Nc)


def apply_ring_moments(grid, H, coefs):
    """Evaluate ``integral K(x, y) phi(y)`` at every (rotated) ring target.

    Parameters
    ----------
    H : ndarray, shape (rings, 3, 3, ncoef)
    coefs : ndarray, shape (ncoef, 3)
        Harmonic coefficients of the density components.

    Returns
    -------
    ndarray, shape (nodes, 3)
    """
    L = grid.band
    m_of = np.concatenate([np.arange(-n, n + 1) for n in range(L + 1)])
    Rs = _rot_z(grid.phi)  # (nphi, 3, 3)
    phase = np.exp(1j * np.outer(grid.phi, m_of))  # (nphi, Nc)
    rotated = np.einsum("sba,cb->sca", Rs, coefs) * phase[:, :, None]  # R_s^T phi_c e^{i m alpha}
    out = np.einsum("rabc,scb->rsa", H, rotated, optimize=True)
    out = np.einsum("sab,rsb->rsa", Rs, out)
    return out.reshape(-1, 3)


# ----------------------------------------------------------------------------
# operators


@dataclass
class BoundaryOperator:
    """Dense operator on band-limited vector densities over a sphere.

    Attributes
    ----------
    matrix : ndarray, shape (3 ncoef, 3 ncoef)
    kind : str
    omega : complex or None
    grid : SphereGrid
    radius : float
    """

    matrix: np.ndarray
    kind: str
    omega: complex
    grid: SphereGrid
    radius: float = 1.0
    meta: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.matrix.shape

    def apply_coef(self, coefs):
        coefs = np.asarray(coefs)
        return (self.matrix @ coefs.reshape(-1)).reshape(coefs.shape)

    def apply(self, values):
        """Apply to nodal values of shape (nodes, 3); returns nodal values."""
        c = self.grid.analysis(values)
        return self.grid.synthesis(self.apply_coef(c))

    def adjoint_defect(self):
        """``||M - M^H|| / ||M||`` in the Frobenius norm."""
        M = self.matrix
        return float(np.linalg.norm(M - M.conj().T) / np.linalg.norm(M))

    def _check(self, other):
        if self.grid != other.grid:
            raise GridMismatch("operators live on different grids")

    def __add__(self, other):
        self._check(other)
        return BoundaryOperator(self.matrix + other.matrix, f"({self.kind}+{other.kind})", self.omega, self.grid, self.radius)

    def __sub__(self, other):
        self._check(other)
        return BoundaryOperator(self.matrix - other.matrix, f"({self.kind}-{other.kind})", self.omega, self.grid, self.radius)

    def __rmul__(self, scalar):
        return BoundaryOperator(scalar * self.matrix, self.kind, self.omega, self.grid, self.radius)

    def __matmul__(self, other):
        self._check(other)
        return BoundaryOperator(self.matrix @ other.matrix, f"{self.kind}{other.kind}", self.omega, self.grid, self.radius)


def identity(grid):
    return BoundaryOperator(np.eye(3 * grid.ncoef, dtype=complex), "I", None, grid)


def assemble(medium, grid, kind, omega=0.0, radius=1.0, rule=None):
    """Assemble one of the operators ``S``, ``K`` (the NP operator), ``P``, ``Q``, ``R``.

    Parameters
    ----------
    medium : ElasticMedium
    grid : SphereGrid
    kind : {"S", "K", "P", "Q", "R"}
    omega : complex
        Frequency; ignored for ``P``, ``Q``, ``R``.
    radius : float
        Sphere radius (1 for the reference sphere).
    """
    H = ring_moments(medium, grid, kind, omega, radius=radius, rule=rule)
    M = _moments_to_matrix(grid, H)
    om = complex(omega) if kind in ("S", "K") else None
    return BoundaryOperator(M, kind, om, grid, radius)


def assemble_single_layer(medium, grid, omega=0.0, radius=1.0):
    """Single layer ``S^omega`` on the sphere of the given radius."""
    return assemble(medium, grid, "S", omega, radius)


def assemble_np(medium, grid, omega=0.0, radius=1.0):
    """Neumann-Poincare operator ``K^{omega,*}`` (principal value)."""
    return assemble(medium, grid, "K", omega, radius)


def assemble_P(medium, grid):
    """Second-order coefficient of the single layer (kernel ``Lambda``)."""
    return assemble(medium, grid, "P")


def assemble_Q(medium, grid):
    """Second-order coefficient of the NP operator (conormal derivative of ``Lambda``)."""
    return assemble(medium, grid, "Q")


def assemble_R(medium, grid):
    """First-order coefficient of the single layer, ``gamma3 * integral``."""
    return assemble(medium, grid, "R")


@lru_cache(maxsize=64)
def _cached(medium, degree, kind, omega, radius):
    return assemble(medium, SphereGrid(degree), kind, omega, radius)


def cached_operator(medium, grid, kind, omega=0.0, radius=1.0):
    """Memoized :func:`assemble` keyed by medium, grid degree, kind, omega and radius."""
    om = complex(omega) if kind in ("S", "K") else 0j
    op = _cached(medium, grid.degree, kind, om, float(radius))
    return op


# ----------------------------------------------------------------------------
# dense solves


def solve_dense(A, b, limit=COND_LIMIT):
    """LU solve with a 1-norm condition estimate.

    Returns
    -------
    x : ndarray
    cond : float
        Estimated 1-norm condition number.

    Raises
    ------
    SingularSystem
        If the estimate exceeds ``limit``.
    """
    A = np.asarray(A, dtype=complex)
    anorm = np.linalg.norm(A, 1)
    with warnings.catch_warnings():
        # singularity is reported through the condition estimate below
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(A, check_finite=True)
    rcond, info = sla.lapack.zgecon(lu, anorm, norm="1")
    cond = np.inf if rcond == 0 else 1.0 / rcond
    if not cond <= limit:
        raise SingularSystem(f"condition estimate {cond:.3e} exceeds {limit:.1e}", condition=cond)
    shape = np.shape(b)
    x = sla.lu_solve((lu, piv), np.asarray(b, dtype=complex).reshape(A.shape[0], -1))
    return x.reshape(shape), cond


def invert_single_layer(op, rhs):
    """Solve ``S[phi] = rhs`` for nodal values; returns ``(phi, cond)``."""
    grid = op.grid
    c = grid.analysis(rhs)
    x, cond = solve_dense(op.matrix, c.reshape(-1))
    return grid.synthesis(x.reshape(c.shape)), cond


def _inverse(op):
    inv, _ = solve_dense(op.matrix, np.eye(op.shape[0], dtype=complex))
    return inv


def series_inverse_coefficients(S, R, P):
    """Matrices ``S^-1``, ``R1 = -S^-1 R S^-1`` and ``P1 = -S^-1 P S^-1 + S^-1 R S^-1 R S^-1``."""
    Si = _inverse(S)
    R1 = -Si @ R.matrix @ Si
    P1 = -Si @ P.matrix @ Si + Si @ R.matrix @ Si @ R.matrix @ Si
    return Si, R1, P1


def assemble_A(medium, particle, grid, omega):
    """Transmission operator ``c(-I/2 + K1) S1^-1 S2 - (I/2 + K2)`` on the reference sphere.

    ``S1, K1`` are at frequency ``omega_1 delta`` and ``S2, K2`` at ``omega delta``.
    At ``omega = 0`` this is ``-(c + 1)/2 I + (c - 1) K*``.
    """
    c, w1 = contrast(particle, omega)
    d = particle.delta
    I = np.eye(3 * grid.ncoef)
    if omega == 0:
        K = cached_operator(medium, grid, "K", 0.0).matrix
        return BoundaryOperator(-(c + 1) / 2 * I + (c - 1) * K, "A", 0j, grid)
    S1 = cached_operator(medium, grid, "S", w1 * d).matrix
    K1 = cached_operator(medium, grid, "K", w1 * d).matrix
    S2 = cached_operator(medium, grid, "S", omega * d).matrix
    K2 = cached_operator(medium, grid, "K", omega * d).matrix
    X, _ = solve_dense(S1, S2)
    A = c * (-0.5 * I + K1) @ X - (0.5 * I + K2)
    return BoundaryOperator(A, "A", complex(omega), grid)


def assemble_A1(medium, grid):
    """Second-order coefficient ``(-I/2 + K*) S^-1 P`` of the transmission operator."""
    I = np.eye(3 * grid.ncoef)
    S = cached_operator(medium, grid, "S", 0.0).matrix
    K = cached_operator(medium, grid, "K", 0.0).matrix
    P = cached_operator(medium, grid, "P").matrix
    X, _ = solve_dense(S, P)
    return BoundaryOperator((-0.5 * I + K) @ X, "A1", 0j, grid)


# ----------------------------------------------------------------------------
# potentials away from the surface


def layer_potential(medium, grid, omega, density, points, center=(0.0, 0.0, 0.0), radius=1.0, normals=None):
    """Single layer potential (or its conormal derivative) at arbitrary points.

    Parameters
    ----------
    density : ndarray, shape (nodes, 3)
        Nodal density on the sphere ``center + radius * B``.
    points : ndarray, shape (P, 3)
        Evaluation points off the surface.
    normals : ndarray, shape (P, 3), optional
        When given, the conormal derivative with these normals is returned.

    Notes
    -----
    Points farther than half a radius from the surface use the grid rule;
    closer points use a graded polar rule about the nearest surface point
    with the density interpolated from its harmonic coefficients.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    center = np.asarray(center, dtype=float)
    density = grid.check(density)
    rel = (points - center) / radius
    dist = np.abs(np.linalg.norm(rel, axis=1) - 1.0)
    out = np.empty((points.shape[0], 3), dtype=complex)
    kind = "S" if normals is None else "K"
    far = dist >= 0.5
    if np.any(far):
        ys = grid.nodes
        w = grid.weights * radius**2
        for i in np.nonzero(far)[0]:
            nu = None if normals is None else normals[i]
            K = _kernel_block(medium, kind, omega, rel[i], ys, nu, radius)
            out[i] = np.einsum("q,qab,qb->a", w, K, density)
    near = np.nonzero(~far)[0]
    if near.size:
        coefs = grid.analysis(density)
        nphi = 2 * ((grid.band + 8) // 2)
        for i in near:
            rr = np.linalg.norm(rel[i])
            xhat = rel[i] / rr
            rule = graded_polar_rule(max(dist[i], 1e-6), nphi)
            R = _frame(xhat)
            pts = rule.points @ R.T
            Y = sph_harm_all(grid.band, pts)
            nu = None if normals is None else normals[i]
            K = _kernel_block(medium, kind, omega, rel[i], pts, nu, radius)
            dens = Y @ coefs
            out[i] = np.einsum("q,qab,qb->a", rule.weights * radius**2, K, dens)
    return out


def _frame(v):
    """A rotation taking ``e_z`` to the unit vector ``v``."""
    v = v / np.linalg.norm(v)
    a = np.array([1.0, 0.0, 0.0]) if abs(v[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = a - v * (a @ v)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(v, e1)
    return np.column_stack([e1, e2, v])


@dataclass
class JumpReport:
    offsets: tuple
    residual_exterior: tuple
    residual_interior: tuple
    extrapolated_exterior: float
    extrapolated_interior: float
    difference_residual: float

    @property
    def max_extrapolated(self):
        return max(self.extrapolated_exterior, self.extrapolated_interior)


def _extrapolate(values, offsets):
    """Polynomial extrapolation of nodal residual vectors to offset zero."""
    h = np.asarray(offsets, dtype=float)
    V = np.vander(h, len(h), increasing=True)
    w = np.linalg.solve(V.T, np.eye(len(h))[:, 0])
    return sum(wi * v for wi, v in zip(w, values))


def jump_test(medium, grid, omega, density, offsets=(1e-2, 5e-3, 2.5e-3)):
    """Compare conormal derivatives of ``S[phi]`` at ``x +- h nu`` with ``(+-I/2 + K*)[phi]``.

    Returns
    -------
    JumpReport
        Max-norm residuals per offset and the residual of the pointwise
        polynomial extrapolation to ``h = 0``.
    """
    density = grid.check(density)
    coefs = grid.analysis(density)
    K = cached_operator(medium, grid, "K", omega)
    Kphi = K.apply(density)
    nphi = 2 * ((grid.band + 8) // 2)
    res = {1: [], -1: []}
    vals = {1: [], -1: []}
    for h in offsets:
        rule = graded_polar_rule(h, nphi)
        for sgn in (1, -1):
            H = ring_moments(medium, grid, "K", omega, target_scale=1.0 + sgn * h, rule=rule)
            trace = apply_ring_moments(grid, H, coefs)
            r = trace - (sgn * 0.5 * density + Kphi)
            vals[sgn].append(trace)
            res[sgn].append(r)
    ext = {s: np.abs(_extrapolate(res[s], offsets)).max() for s in (1, -1)}
    diff = np.abs(_extrapolate([a - b for a, b in zip(vals[1], vals[-1])], offsets) - density).max()
    return JumpReport(
        offsets=tuple(offsets),
        residual_exterior=tuple(float(np.abs(r).max()) for r in res[1]),
        residual_interior=tuple(float(np.abs(r).max()) for r in res[-1]),
        extrapolated_exterior=float(ext[1]),
        extrapolated_interior=float(ext[-1]),
        difference_residual=float(diff),
    )


# ----------------------------------------------------------------------------
# incident field and the transmission problem


def incident_field(medium, source, x, omega):
    """``u_in(x) = f(omega) Gamma^omega(x - s) p``."""
    x = np.atleast_2d(x)
    G = kernels.kupradze(medium, x - source.s, omega)
    return source.amplitude(omega) * (G @ source.p)


def incident_traces(medium, particle, source, grid, omega):
    """Scaled traces ``F1 = u_in(z + delta X)`` and ``F2 = delta * traction of u_in`` on the grid."""
    X = grid.nodes
    x = particle.z + particle.delta * X
    f = source.amplitude(omega)
    F1 = f * (kernels.kupradze(medium, x - source.s, omega) @ source.p)
    T = kernels.traction_kupradze(medium, x, source.s, X, omega)
    F2 = particle.delta * f * (T @ source.p)
    return F1, F2


def rhs_exact(medium, particle, source, grid, omega):
    """``F = F2 - c (-I/2 + K1) S1^-1 F1`` as nodal values (coefficients band-limited)."""
    c, w1 = contrast(particle, omega)
    d = particle.delta
    F1, F2 = incident_traces(medium, particle, source, grid, omega)
    c1 = grid.analysis(F1).reshape(-1)
    c2 = grid.analysis(F2).reshape(-1)
    S1 = cached_operator(medium, grid, "S", w1 * d).matrix
    K1 = cached_operator(medium, grid, "K", w1 * d).matrix
    y, _ = solve_dense(S1, c1)
    F = c2 - c * ((K1 @ y) - 0.5 * y)
    return grid.synthesis(F.reshape(-1, 3))


def rhs_asymptotic(medium, particle, source, grid, omega):
    """Leading-order right-hand side for a small particle.

    ``F(X) = delta f(omega) (1 - c) [lambda tr(D) nu + mu (D + D^T) nu]``
    with ``D_ij = sum_l d_j Gamma_il(z - s) p_l``.
    """
    c, _ = contrast(particle, omega)
    Dg = kernels.grad_kupradze(medium, particle.z, source.s, omega)  # [k, i, l]
    D = np.einsum("jil,l->ij", Dg, source.p)
    nu = grid.nodes
    tr = np.trace(D)
    vec = medium.lam * tr * nu + medium.mu * nu @ (D + D.T).T
    return particle.delta * source.amplitude(omega) * (1 - c) * vec


@dataclass
class OracleSolution:
    phi: np.ndarray
    psi: np.ndarray
    psi_reduced: np.ndarray
    cond_block: float
    cond_reduced: float
    agreement: float


def oracle_solve(medium, particle, source, grid, omega, check=1e-8):
    """Dense solve of the scaled transmission system on the reference sphere.

    Solves

        S1 phi - S2 psi = F1 / delta,
        c (-I/2 + K1) phi - (I/2 + K2) psi = F2 / delta,

    and independently the reduced system ``A psi = F / delta``.

    Returns
    -------
    OracleSolution
        Nodal densities and the relative difference of the two ``psi``.
    """
    c, w1 = contrast(particle, omega)
    d = particle.delta
    n3 = 3 * grid.ncoef
    I = np.eye(n3)
    S1 = cached_operator(medium, grid, "S", w1 * d).matrix
    K1 = cached_operator(medium, grid, "K", w1 * d).matrix
    S2 = cached_operator(medium, grid, "S", omega * d).matrix
    K2 = cached_operator(medium, grid, "K", omega * d).matrix
    F1, F2 = incident_traces(medium, particle, source, grid, omega)
    c1 = grid.analysis(F1).reshape(-1)
    c2 = grid.analysis(F2).reshape(-1)
    block = np.block([[S1, -S2], [c * (-0.5 * I + K1), -(0.5 * I + K2)]])
    sol, cond_b = solve_dense(block, np.concatenate([c1, c2]) / d)
    phi, psi = sol[:n3], sol[n3:]
    X, _ = solve_dense(S1, np.column_stack([S2, c1]))
    A = c * (-0.5 * I + K1) @ X[:, :n3] - (0.5 * I + K2)
    F = c2 - c * (-0.5 * I + K1) @ X[:, n3]
    psi_r, cond_r = solve_dense(A, F / d)
    agree = float(np.linalg.norm(psi - psi_r) / np.linalg.norm(psi))
    if check is not None and agree > check:
        raise SingularSystem(f"block and reduced solutions differ by {agree:.2e}", condition=cond_b)
    syn = grid.synthesis
    return OracleSolution(
        phi=syn(phi.reshape(-1, 3)),
        psi=syn(psi.reshape(-1, 3)),
        psi_reduced=syn(psi_r.reshape(-1, 3)),
        cond_block=cond_b,
        cond_reduced=cond_r,
        agreement=agree,
    )


# ----------------------------------------------------------------------------
# export


def write_binary(op, path):
    """Write ``rows, cols`` as little-endian int64 followed by row-major complex128 pairs."""
    M = np.ascontiguousarray(op.matrix, dtype="<c16")
    with open(path, "wb") as fh:
        np.array(M.shape, dtype="<i8").tofile(fh)
        M.tofile(fh)


def read_binary(path):
    with open(path, "rb") as fh:
        shape = tuple(np.fromfile(fh, dtype="<i8", count=2))
        M = np.fromfile(fh, dtype="<c16").reshape(shape)
    return M


# ----------------------------------------------------------------------------
# low-frequency remainders


def loglog_slope(x, y):
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(x, dtype=float)), np.log(np.asarray(y, dtype=float)), 1)[0])


def series_remainders(medium, grid, omegas):
    """Spectral norms of ``S^w - S - w R - w^2 P`` and ``K^w - K - w^2 Q``.

    Returns
    -------
    dict
        ``{"S": [...], "K": [...]}`` in the order of ``omegas``.
    """
    S0 = cached_operator(medium, grid, "S", 0.0).matrix
    K0 = cached_operator(medium, grid, "K", 0.0).matrix
    R = cached_operator(medium, grid, "R").matrix
    P = cached_operator(medium, grid, "P").matrix
    Q = cached_operator(medium, grid, "Q").matrix
    out = {"S": [], "K": []}
    for w in omegas:
        out["S"].append(float(np.linalg.norm(assemble(medium, grid, "S", w).matrix - S0 - w * R - w * w * P, 2)))
        out["K"].append(float(np.linalg.norm(assemble(medium, grid, "K", w).matrix - K0 - w * w * Q, 2)))
    return out


def perturbation_remainders(medium, particle, grid, omega_deltas):
    """Spectral norms of ``A^{w delta} - A^0 - (c - 1)(w delta)^2 A1`` with ``c = c(w)``."""
    K0 = cached_operator(medium, grid, "K", 0.0).matrix
    A1 = assemble_A1(medium, grid).matrix
    I = np.eye(K0.shape[0])
    out = []
    for od in omega_deltas:
        om = od / particle.delta
        c = particle.c(om)
        A = assemble_A(medium, particle, grid, om).matrix
        A0 = -(c + 1) / 2 * I + (c - 1) * K0
        out.append(float(np.linalg.norm(A - A0 - (c - 1) * od**2 * A1, 2)))
    return out


def inverse_taylor_coefficient(medium, grid, order, radius=0.05, nodes=16):
    """Taylor coefficient of ``(S^w)^-1`` at ``w = 0`` by a trapezoidal Cauchy integral.

    Independent of :func:`series_inverse_coefficients`: only dense inverses of
    ``S^w`` on the circle ``|w| = radius`` enter.
    """
    acc = 0
    for k in range(nodes):
        w = radius * np.exp(2j * np.pi * (k + 0.5) / nodes)
        acc = acc + np.linalg.inv(assemble(medium, grid, "S", w).matrix) / w**order
    return acc / nodes
