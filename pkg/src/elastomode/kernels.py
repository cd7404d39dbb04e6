"""Kupradze and Kelvin fundamental matrices, their gradients and auxiliary kernels.

Every isotropic kernel used here has the form

    K(x) = F(r) I + G(r) xhat xhat^T,    r = |x|,

so a kernel is described by the radial profiles ``F, G`` and their
derivatives ``F', G'``. Values, gradients and conormal derivatives are all
built from these four arrays.

For ``omega != 0`` the Kupradze matrix is written as

    Gamma(x) = -exp(i k_s r) A / (4 pi omega^2 r) - exp(i k_p r) B / (4 pi omega^2 r)

with ``A, B`` polynomial in ``omega``. Near ``omega r = 0`` the division by
``omega^2`` cancels catastrophically, so there the low-frequency series is
summed instead.
"""
from math import factorial

import numpy as np

from .errors import SingularPoint

__all__ = [
    "SERIES_THRESHOLD",
    "SERIES_ORDER",
    "radial_kupradze",
    "radial_series",
    "radial_lambda",
    "kernel_value",
    "kernel_gradient",
    "conormal",
    "kupradze",
    "kupradze_series",
    "kelvin",
    "grad_kupradze",
    "traction_kupradze",
    "lambda_kernel",
    "grad_lambda_kernel",
    "factor_matrices",
    "factor_gradient_matrices",
]

SERIES_THRESHOLD = 0.1
SERIES_ORDER = 12


def _series_coefficients(medium, J):
    """Coefficients of ``omega^j r^(j-1)`` in ``F`` and ``G`` for ``j = 0..J``."""
    cs, cp = medium.cs, medium.cp
    cf = np.empty(J + 1, dtype=complex)
    cg = np.empty(J + 1, dtype=complex)
    for j in range(J + 1):
        w = 1j**j / ((j + 2) * factorial(j))
        cf[j] = -w * ((j + 1) / cs ** (j + 2) + 1.0 / cp ** (j + 2)) / (4 * np.pi)
        cg[j] = w * (j - 1) * (1.0 / cs ** (j + 2) - 1.0 / cp ** (j + 2)) / (4 * np.pi)
    return cf, cg


def radial_series(medium, r, omega, J=SERIES_ORDER):
    """Radial profiles of the Kupradze matrix from its low-frequency series.

    Parameters
    ----------
    medium : ElasticMedium
    r : ndarray
        Distances, all positive.
    omega : complex
    J : int
        Highest power of ``omega`` retained.

    Returns
    -------
    F, G, dF, dG : ndarray of complex
    """
    r = np.asarray(r, dtype=float)
    cf, cg = _series_coefficients(medium, J)
    F = np.zeros(r.shape, dtype=complex)
    G = np.zeros(r.shape, dtype=complex)
    dF = np.zeros(r.shape, dtype=complex)
    dG = np.zeros(r.shape, dtype=complex)
    wr = np.ones(r.shape, dtype=complex)  # (omega r)^j
    for j in range(J + 1):
        # omega^j r^(j-1) = (omega r)^j / r and its r-derivative (j-1)(omega r)^j / r^2
        t = wr / r
        dt = (j - 1) * t / r
        F += cf[j] * t
        G += cg[j] * t
        dF += cf[j] * dt
        dG += cg[j] * dt
        wr = wr * (omega * r)
    return F, G, dF, dG


def _wave_parts(k, r):
    """Scalar pieces of the factor matrices for one wave number.

    Returns ``a, b, da, db`` with ``A = a I + b xhat xhat^T`` for the shear
    factor, evaluated at wave number ``k``.
    """
    ikr = 1j * k * r
    r2 = r * r
    r3 = r2 * r
    a = (ikr - 1.0) / r2 + k * k
    b = (3.0 - 3.0 * ikr + (ikr) ** 2) / r2
    da = (2.0 - ikr) / r3
    db = (3.0 * ikr - 6.0) / r3
    return a, b, da, db


def _closed_form(medium, r, omega):
    ks = omega / medium.cs
    kp = omega / medium.cp
    a_s, b_s, da_s, db_s = _wave_parts(ks, r)
    a_p, b_p, da_p, db_p = _wave_parts(kp, r)
    # B is minus the shear factor without the k^2 I term
    a_p = -(a_p - kp * kp)
    b_p, da_p, db_p = -b_p, -da_p, -db_p
    es = np.exp(1j * ks * r)
    ep = np.exp(1j * kp * r)
    pref = -1.0 / (4 * np.pi * omega * omega * r)
    F = pref * (es * a_s + ep * a_p)
    G = pref * (es * b_s + ep * b_p)
    # d/dr [exp(i k r) g(r) / r] = exp(i k r) / r [(i k - 1/r) g + g']
    dF = pref * (es * ((1j * ks - 1.0 / r) * a_s + da_s) + ep * ((1j * kp - 1.0 / r) * a_p + da_p))
    dG = pref * (es * ((1j * ks - 1.0 / r) * b_s + db_s) + ep * ((1j * kp - 1.0 / r) * b_p + db_p))
    return F, G, dF, dG


def radial_kupradze(medium, r, omega, J=SERIES_ORDER, threshold=SERIES_THRESHOLD):
    """Radial profiles ``F, G, F', G'`` of the Kupradze matrix.

    Points with ``|omega| r / c_s < threshold`` use the series, the rest the
    factorized closed form.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise SingularPoint("kernel evaluated at coincident points")
    omega = complex(omega)
    small = abs(omega) * r / medium.cs < threshold
    if np.all(small):
        return radial_series(medium, r, omega, J)
    if not np.any(small):
        return _closed_form(medium, r, omega)
    out = [np.empty(r.shape, dtype=complex) for _ in range(4)]
    for o, v in zip(out, radial_series(medium, r[small], omega, J)):
        o[small] = v
    for o, v in zip(out, _closed_form(medium, r[~small], omega)):
        o[~small] = v
    return tuple(out)


def radial_lambda(medium, r):
    """Radial profiles of the second-order kernel ``Lambda``."""
    r = np.asarray(r, dtype=float)
    c4 = medium.gamma4 / (16 * np.pi)
    c5 = medium.gamma5 / (16 * np.pi)
    F = c4 * r
    G = -c5 * r
    return F, G, np.full(r.shape, c4), np.full(r.shape, -c5)


def _split(x):
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0):
        raise SingularPoint("kernel evaluated at coincident points")
    return x / r[..., None], r


def kernel_value(xhat, F, G):
    """Assemble ``F I + G xhat xhat^T`` with shape ``(..., 3, 3)``."""
    F, G = np.asarray(F), np.asarray(G)
    out = G[..., None, None] * xhat[..., :, None] * xhat[..., None, :]
    out[..., 0, 0] += F
    out[..., 1, 1] += F
    out[..., 2, 2] += F
    return out


def kernel_gradient(xhat, r, F, G, dF, dG):
    """Gradient tensor ``D[..., k, i, j] = d_k K_ij``."""
    eye = np.eye(3)
    F, G, dF, dG = (np.asarray(v) for v in (F, G, dF, dG))
    g = G / r
    xk = xhat[..., :, None, None]
    xi = xhat[..., None, :, None]
    xj = xhat[..., None, None, :]
    xxx = xk * xi * xj
    D = dF[..., None, None, None] * xk * eye
    D = D + (dG - 2 * g)[..., None, None, None] * xxx
    D = D + g[..., None, None, None] * (eye[:, :, None] * xj + eye[:, None, :] * xi)
    return D


def conormal(medium, D, nu):
    """Conormal derivative of each kernel column, from the gradient tensor.

    For the displacement ``u = K e_j`` the traction is
    ``lambda (div u) nu + mu (grad u + grad u^T) nu``.

    Parameters
    ----------
    D : ndarray, shape (..., 3, 3, 3)
        ``D[..., k, i, j] = d_k K_ij``.
    nu : ndarray, shape (..., 3) or (3,)
    """
    nu = np.asarray(nu, dtype=float)
    div = np.einsum("...kkj->...j", D)
    t1 = np.einsum("...k,...kij->...ij", nu, D)
    t2 = np.einsum("...k,...ikj->...ij", nu, D)
    return medium.lam * nu[..., :, None] * div[..., None, :] + medium.mu * (t1 + t2)


def kupradze(medium, x, omega):
    """Kupradze matrix ``Gamma^omega(x)``; the Kelvin matrix when ``omega = 0``.

    Parameters
    ----------
    medium : ElasticMedium
    x : array_like, shape (..., 3)
        Nonzero separation vectors.
    omega : complex

    Returns
    -------
    ndarray, shape (..., 3, 3), complex
    """
    xhat, r = _split(x)
    F, G, _, _ = radial_kupradze(medium, r, omega)
    return kernel_value(xhat, F, G)


def kelvin(medium, x):
    """Kelvin matrix ``-gamma1 I / (4 pi r) - gamma2 x x^T / (4 pi r^3)``."""
    xhat, r = _split(x)
    F = -medium.gamma1 / (4 * np.pi * r)
    G = -medium.gamma2 / (4 * np.pi * r)
    return kernel_value(xhat, F, G).real


def kupradze_series(medium, x, omega, J):
    """Partial sum of the low-frequency series of ``Gamma^omega(x)`` up to ``omega^J``."""
    if J < 0:
        raise ValueError("J must be nonnegative")
    xhat, r = _split(x)
    F, G, _, _ = radial_series(medium, r, complex(omega), J)
    return kernel_value(xhat, F, G)


def grad_kupradze(medium, x, s, omega, k=None):
    """Gradient of ``Gamma^omega(x - s)`` with respect to ``x``.

    Returns ``d_k Gamma`` with shape ``(..., 3, 3)`` when ``k`` is given and
    the full tensor ``(..., 3, 3, 3)`` indexed ``[k, i, j]`` otherwise.
    """
    d = np.asarray(x, dtype=float) - np.asarray(s, dtype=float)
    xhat, r = _split(d)
    F, G, dF, dG = radial_kupradze(medium, r, omega)
    D = kernel_gradient(xhat, r, F, G, dF, dG)
    if k is None:
        return D
    return D[..., k, :, :]


def traction_kupradze(medium, x, s, nu, omega):
    """Conormal derivative at ``x`` (normal ``nu``) of ``Gamma^omega(x - s)``."""
    return conormal(medium, grad_kupradze(medium, x, s, omega), nu)


def lambda_kernel(medium, x):
    """``Lambda(x) = gamma4 |x| I / (16 pi) - gamma5 x x^T / (16 pi |x|)``; zero at the origin."""
    x = np.asarray(x, dtype=float)
    r = np.linalg.norm(x, axis=-1)
    safe = np.where(r > 0, r, 1.0)
    xx = x[..., :, None] * x[..., None, :] / safe[..., None, None]
    out = -medium.gamma5 / (16 * np.pi) * xx
    out = out + (medium.gamma4 / (16 * np.pi) * r)[..., None, None] * np.eye(3)
    return out


def grad_lambda_kernel(medium, x):
    """Gradient tensor ``[k, i, j]`` of ``Lambda`` (defined for ``x != 0``)."""
    xhat, r = _split(x)
    return kernel_gradient(xhat, r, *radial_lambda(medium, r))


def factor_matrices(medium, x, omega):
    """Polynomial factor matrices ``A, B`` of the Kupradze matrix.

    ``Gamma^omega(x) = -exp(i k_s r) A / (4 pi omega^2 r) - exp(i k_p r) B / (4 pi omega^2 r)``.
    """
    xhat, r = _split(x)
    ks = omega / medium.cs
    kp = omega / medium.cp
    a_s, b_s, _, _ = _wave_parts(ks, r)
    a_p, b_p, _, _ = _wave_parts(kp, r)
    A = kernel_value(xhat, a_s, b_s)
    B = -kernel_value(xhat, a_p - kp * kp, b_p)
    return A, B


def factor_gradient_matrices(medium, x, s, omega, k):
    """Factor matrices of ``d_k Gamma^omega(x - s)``.

    ``d_k Gamma = -exp(i k_s r) A_k / (4 pi omega^2 r) - exp(i k_p r) B_k / (4 pi omega^2 r)``.
    """
    d = np.asarray(x, dtype=float) - np.asarray(s, dtype=float)
    xhat, r = _split(d)
    out = []
    for sign, kw, drop in ((1.0, omega / medium.cs, 0.0), (-1.0, omega / medium.cp, 1.0)):
        a, b, da, db = _wave_parts(kw, r)
        a = a - drop * kw * kw
        # d_k [exp(i k r) (a I + b xhat xhat^T) / r] = exp(i k r) / r * M_k
        D = kernel_gradient(xhat, r, a, b, da, db)[..., k, :, :]
        M = D + ((1j * kw - 1.0 / r) * xhat[..., k])[..., None, None] * kernel_value(xhat, a, b)
        out.append(sign * M)
    return out[0], out[1]
