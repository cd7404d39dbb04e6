"""Spherical harmonics, the T/M/N vector trace basis and quadrature on the unit sphere.

Scalar harmonics are orthonormal and carry the Condon-Shortley phase,

    Y_n^m(theta, phi) = Pbar_n^m(cos theta) exp(i m phi),
    Y_n^{-m} = (-1)^m conj(Y_n^m).

Harmonics are stored flat with index ``n**2 + n + m``.

The vector traces are

    T_n^m = grad_S Y_n^m x nu,
    M_n^m = grad_S Y_n^m + n Y_n^m nu,
    N_n^m = a_n / (2n - 1) (-grad_S Y_{n-1}^m + n Y_{n-1}^m nu),

with ``a_n = (2(n-1) lambda + 2(3n-2) mu) / ((n+2) lambda + (n+4) mu)``.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DegreeTooLow, GridMismatch, IndexOutOfRange

__all__ = [
    "FAMILIES",
    "ModeIndex",
    "SphereGrid",
    "harmonic_index",
    "legendre_tables",
    "sph_harm",
    "sph_harm_all",
    "sph_harm_with_gradient",
    "a_coefficient",
    "component_degree",
    "basis_eval",
    "normalize_basis",
    "inner_product",
    "norm",
    "rescale_inner_product",
    "rescale_norm",
    "mode_indices",
]

FAMILIES = ("T", "M", "N")


def harmonic_index(n, m):
    return n * n + n + m


@dataclass(frozen=True, order=True)
class ModeIndex:
    """Index ``(family, n, m)`` of a vector trace."""

    family: str
    n: int
    m: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise IndexOutOfRange(f"unknown family {self.family!r}")
        if self.n < 1:
            raise IndexOutOfRange(f"n must be >= 1, got {self.n}")
        bound = self.n - 1 if self.family == "N" else self.n
        if abs(self.m) > bound:
            raise IndexOutOfRange(f"|m| <= {bound} required for {self.family}_{self.n}, got m = {self.m}")

    def __str__(self):
        return f"{self.family}{self.n},{self.m}"


def mode_indices(N, families=FAMILIES, n_min=1):
    """All admissible mode indices with ``n_min <= n <= N``."""
    out = []
    for fam in families:
        for n in range(n_min, N + 1):
            bound = n - 1 if fam == "N" else n
            out.extend(ModeIndex(fam, n, m) for m in range(-bound, bound + 1))
    return out


def component_degree(family, n):
    """Polynomial degree of the Cartesian components of a trace."""
    return n - 1 if family == "M" else n


def legendre_tables(L, theta):
    """Normalized associated Legendre values and their theta-derivatives.

    Parameters
    ----------
    L : int
        Highest degree.
    theta : ndarray, shape (P,)
        Polar angles.

    Returns
    -------
    P : ndarray, shape (L + 1, L + 1, P)
        ``P[n, m] = Pbar_n^m(cos theta)`` for ``0 <= m <= n``, zero otherwise.
    Q : ndarray, shape (L + 1, L + 1, P)
        ``Pbar_n^m / sin theta`` for ``m >= 1``; row ``m = 0`` is zero.
    dP : ndarray, shape (L + 1, L + 1, P)
        ``d Pbar_n^m / d theta``.

    Notes
    -----
    ``Q`` is produced by the same recurrence as ``P`` started from the
    diagonal without its last factor of ``sin theta``, so it is finite at the
    poles.
    """
    theta = np.asarray(theta, dtype=float)
    x = np.cos(theta)
    s = np.sin(theta)
    shape = (L + 1, L + 1) + theta.shape
    P = np.zeros(shape)
    Q = np.zeros(shape)
    dP = np.zeros(shape)
    P[0, 0] = 1.0 / np.sqrt(4 * np.pi)
    for m in range(1, L + 1):
        fac = -np.sqrt((2 * m + 1) / (2.0 * m))
        Q[m, m] = fac * P[m - 1, m - 1]
        P[m, m] = Q[m, m] * s
    for m in range(L + 1):
        if m + 1 <= L:
            f = np.sqrt(2 * m + 3.0)
            P[m + 1, m] = f * x * P[m, m]
            Q[m + 1, m] = f * x * Q[m, m]
        for n in range(m + 2, L + 1):
            a = np.sqrt((4.0 * n * n - 1) / (n * n - m * m))
            b = np.sqrt(((n - 1.0) ** 2 - m * m) / (4.0 * (n - 1) ** 2 - 1))
            P[n, m] = a * (x * P[n - 1, m] - b * P[n - 2, m])
            Q[n, m] = a * (x * Q[n - 1, m] - b * Q[n - 2, m])
    for n in range(1, L + 1):
        dP[n, 0] = np.sqrt(n * (n + 1.0)) * P[n, 1]
        for m in range(1, n + 1):
            c = np.sqrt((2 * n + 1.0) / (2 * n - 1) * (n * n - m * m))
            dP[n, m] = n * x * Q[n, m] - c * Q[n - 1, m]
    return P, Q, dP


def _angles(points):
    points = np.asarray(points, dtype=float)
    theta = np.arccos(np.clip(points[..., 2] / np.linalg.norm(points, axis=-1), -1.0, 1.0))
    phi = np.arctan2(points[..., 1], points[..., 0])
    return theta, phi


def sph_harm_all(L, points):
    """All ``Y_n^m`` with ``n <= L`` at the given directions.

    Returns
    -------
    ndarray, shape (P, (L + 1)**2), complex
    """
    points = np.atleast_2d(points)
    theta, phi = _angles(points)
    P, _, _ = legendre_tables(L, theta)
    out = np.empty((points.shape[0], (L + 1) ** 2), dtype=complex)
    for m in range(L + 1):
        e = np.exp(1j * m * phi)
        sign = (-1) ** m
        for n in range(m, L + 1):
            y = P[n, m] * e
            out[:, harmonic_index(n, m)] = y
            if m:
                out[:, harmonic_index(n, -m)] = sign * np.conj(y)
    return out


def sph_harm_with_gradient(L, points):
    """Harmonics and their surface gradients at the given directions.

    Returns
    -------
    Y : ndarray, shape (P, (L + 1)**2)
    gradY : ndarray, shape (P, (L + 1)**2, 3)
    """
    points = np.atleast_2d(points)
    theta, phi = _angles(points)
    P, Q, dP = legendre_tables(L, theta)
    ct, st, cp, sp = np.cos(theta), np.sin(theta), np.cos(phi), np.sin(phi)
    e_theta = np.stack([ct * cp, ct * sp, -st], axis=-1)
    e_phi = np.stack([-sp, cp, np.zeros_like(cp)], axis=-1)
    npts = points.shape[0]
    Y = np.empty((npts, (L + 1) ** 2), dtype=complex)
    G = np.empty((npts, (L + 1) ** 2, 3), dtype=complex)
    for m in range(L + 1):
        e = np.exp(1j * m * phi)
        sign = (-1) ** m
        for n in range(m, L + 1):
            y = P[n, m] * e
            g = (dP[n, m] * e)[:, None] * e_theta + (1j * m * Q[n, m] * e)[:, None] * e_phi
            Y[:, harmonic_index(n, m)] = y
            G[:, harmonic_index(n, m)] = g
            if m:
                Y[:, harmonic_index(n, -m)] = sign * np.conj(y)
                G[:, harmonic_index(n, -m)] = sign * np.conj(g)
    return Y, G


def sph_harm(n, m, direction):
    """Orthonormal complex spherical harmonic ``Y_n^m`` at one or more directions."""
    if n < 0 or abs(m) > n:
        raise IndexOutOfRange(f"|m| <= n required, got n = {n}, m = {m}")
    direction = np.asarray(direction, dtype=float)
    single = direction.ndim == 1
    val = sph_harm_all(n, np.atleast_2d(direction))[:, harmonic_index(n, m)]
    return val[0] if single else val


def a_coefficient(medium, n):
    """Weight ``a_n`` of the N family (independent of the order m)."""
    lam, mu = medium.lam, medium.mu
    return (2 * (n - 1) * lam + 2 * (3 * n - 2) * mu) / ((n + 2) * lam + (n + 4) * mu)


def basis_eval(medium, idx, nodes):
    """Un-normalized trace ``T``, ``M`` or ``N`` at unit vectors ``nodes``.

    Returns
    -------
    ndarray, shape (P, 3), complex (or (3,) for a single node)
    """
    if not isinstance(idx, ModeIndex):
        idx = ModeIndex(*idx)
    nodes = np.asarray(nodes, dtype=float)
    single = nodes.ndim == 1
    pts = np.atleast_2d(nodes)
    nu = pts / np.linalg.norm(pts, axis=-1)[:, None]
    fam, n, m = idx.family, idx.n, idx.m
    deg = n - 1 if fam == "N" else n
    Y, G = sph_harm_with_gradient(deg, pts)
    k = harmonic_index(deg, m)
    y, g = Y[:, k], G[:, k]
    if fam == "T":
        out = np.cross(g, nu)
    elif fam == "M":
        out = g + n * y[:, None] * nu
    else:
        out = a_coefficient(medium, n) / (2 * n - 1) * (-g + n * y[:, None] * nu)
    return out[0] if single else out


class SphereGrid:
    """Gauss-Legendre (in cos theta) times uniform-azimuth product grid.

    With ``degree = t`` the grid has ``t`` rings of ``2t`` nodes and
    integrates spherical harmonics exactly up to degree ``2t - 1``. Fields
    whose Cartesian components have degree at most ``band = t - 1`` are
    reproduced exactly by :meth:`analysis` followed by :meth:`synthesis`.

    Nodes are ordered ring by ring, ``index = ring * nphi + k``.
    """

    def __init__(self, degree):
        degree = int(degree)
        if degree < 1:
            raise DegreeTooLow("grid degree must be at least 1")
        self.degree = degree
        self.band = degree - 1
        x, w = np.polynomial.legendre.leggauss(degree)
        self.ring_theta = np.arccos(x)
        self.ring_weights = w * (np.pi / degree)
        self.nphi = 2 * degree
        self.phi = 2 * np.pi * np.arange(self.nphi) / self.nphi
        st = np.sin(self.ring_theta)[:, None]
        ct = np.cos(self.ring_theta)[:, None]
        nodes = np.stack(
            [st * np.cos(self.phi)[None, :], st * np.sin(self.phi)[None, :], ct * np.ones(self.nphi)[None, :]],
            axis=-1,
        )
        self.nodes = nodes.reshape(-1, 3)
        self.weights = np.repeat(self.ring_weights, self.nphi)
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def normals(self):
        return self.nodes

    @property
    def size(self):
        return self.nodes.shape[0]

    @property
    def ncoef(self):
        return (self.band + 1) ** 2

    @property
    def key(self):
        return ("gl-uniform", self.degree)

    def __eq__(self, other):
        return isinstance(other, SphereGrid) and other.degree == self.degree

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"SphereGrid(degree={self.degree}, nodes={self.size})"

    @cached_property
    def harmonics(self):
        """``Y_n^m`` (n <= band) at the nodes, shape (nodes, ncoef)."""
        Y = sph_harm_all(self.band, self.nodes)
        Y.setflags(write=False)
        return Y

    def ring_harmonics(self):
        """Harmonics at the first node of each ring, shape (rings, ncoef)."""
        return self.harmonics[:: self.nphi]

    def analysis(self, values):
        """Spherical-harmonic coefficients of each Cartesian component.

        Parameters
        ----------
        values : ndarray, shape (nodes,) or (nodes, k)

        Returns
        -------
        ndarray, shape (ncoef,) or (ncoef, k)
        """
        values = self.check(values)
        wv = values * (self.weights if values.ndim == 1 else self.weights[:, None])
        return self.harmonics.conj().T @ wv

    def synthesis(self, coefs):
        return self.harmonics @ np.asarray(coefs)

    def project(self, values):
        """Band-limit a nodal field to degree ``band``."""
        return self.synthesis(self.analysis(values))

    def check(self, values):
        values = np.asarray(values)
        if values.shape[0] != self.size:
            raise GridMismatch(f"field has {values.shape[0]} rows, grid has {self.size} nodes")
        return values

    def to_csv(self, path):
        """Write ``x, y, z, weight`` rows for inspection."""
        data = np.column_stack([self.nodes, self.weights])
        header = f"grid degree={self.degree} nodes={self.size}\nx,y,z,weight"
        np.savetxt(path, data, delimiter=",", header=header, fmt="%.17g")


def inner_product(f, g, grid):
    """``sum_k w_k f(x_k) . conj(g(x_k))`` over the grid."""
    f = grid.check(f)
    g = grid.check(g)
    if f.shape != g.shape:
        raise GridMismatch("fields have different shapes")
    if f.ndim == 1:
        return np.sum(grid.weights * f * np.conj(g))
    return np.sum(grid.weights[:, None] * f * np.conj(g))


def norm(f, grid):
    return float(np.sqrt(inner_product(f, f, grid).real))


def rescale_inner_product(value, delta):
    """Inner product over ``z + delta B`` from the one over ``B``."""
    return delta**2 * value


def rescale_norm(value, delta):
    return delta * value


def normalize_basis(medium, idx, grid):
    """Trace evaluated on the grid and scaled to unit quadrature norm.

    Returns
    -------
    field : ndarray, shape (nodes, 3)
    norm : float
        Norm of the un-normalized trace.

    Raises
    ------
    DegreeTooLow
        If the components of the trace exceed the band the grid resolves.
    """
    if not isinstance(idx, ModeIndex):
        idx = ModeIndex(*idx)
    if component_degree(idx.family, idx.n) > grid.band:
        raise DegreeTooLow(f"{idx} needs grid degree >= {component_degree(idx.family, idx.n) + 1}, got {grid.degree}")
    field = basis_eval(medium, idx, grid.nodes)
    nrm = norm(field, grid)
    return field / nrm, nrm
