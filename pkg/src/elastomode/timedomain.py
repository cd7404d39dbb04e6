"""Wide-band signals, band-limited time-domain scattering and the residue expansion.

Fourier conventions: ``f(omega) = (1/2pi) int fhat(t) exp(i omega t) dt`` and
``fhat(t) = int f(omega) exp(-i omega t) d omega``. The band-limited field is
``P_rho[u](t) = int_{-rho}^{rho} u(omega) exp(-i omega t) d omega``.

The scattered field is modelled with the static modal denominators and the
leading-order small-particle right-hand side, so each mode contributes
``<F(omega), b> S^{omega delta}[b](X) / tau(omega)``. Its only singularities in
the lower half plane are the simple static poles ``i Omega''`` and the
residue theorem turns ``P_rho`` into a sum of damped exponentials.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad_vec

from . import boundary_ops as bo
from . import kernels
from .errors import PreconditionViolated, QuadratureFailure, SingularPoint
from .resonance import check_parameters, residue_constant, static_omega
from .sphere_basis import mode_indices, normalize_basis
from .spectral import np_eigenvalue, tau_static

__all__ = [
    "SignalSpec",
    "design_signal",
    "band_check",
    "BandReport",
    "TimeWindow",
    "time_window",
    "incident_time_field",
    "stokes_time_field",
    "ModalFrequencyModel",
    "truncated_scattered_time",
    "ModeTimeField",
    "ResidueExpansion",
    "mode_time_fields",
    "residue_expansion",
    "decay_rate",
    "error_envelope",
    "arc_remainder",
    "OracleComparison",
    "oracle_comparison",
]

GK_TOL = 1e-9


# ----------------------------------------------------------------------------
# signals


def _bump(t, C1, omega0):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = (t > 0) & (t < C1)
    ti = t[inside]
    out[inside] = np.exp(-1.0 / (ti * (C1 - ti)))
    if omega0:
        out = out * np.cos(omega0 * t)
    return out


@dataclass
class SignalSpec:
    """Smooth compactly supported signal ``fhat`` on ``[0, C1]`` and its transform.

    Attributes
    ----------
    C1 : float
        Support length.
    omega0 : float
        Modulation frequency; ``fhat = exp(-1/(t (C1 - t))) cos(omega0 t)``.
    t_samples, fhat_samples : ndarray
        Uniform samples of ``fhat`` over ``[0, C1]``.
    nodes, weights : ndarray
        Composite Gauss-Legendre rule on ``[0, C1]`` used for the transform.
    """

    C1: float
    omega0: float
    t_samples: np.ndarray
    fhat_samples: np.ndarray
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def fhat(self, t):
        return _bump(t, self.C1, self.omega0)

    def transform(self, omega):
        """``f(omega)`` for real or complex ``omega`` (any shape)."""
        om = np.asarray(omega, dtype=complex)
        flat = om.reshape(-1)
        vals = self.weights * self.fhat(self.nodes)
        out = np.empty(flat.shape, dtype=complex)
        step = max(1, 2_000_000 // self.nodes.size)
        for i in range(0, flat.size, step):
            ph = np.exp(1j * np.outer(flat[i : i + step], self.nodes))
            out[i : i + step] = ph @ vals
        return (out / (2 * np.pi)).reshape(om.shape)

    def energy(self):
        """``int |f|^2 d omega = (1/2pi) int |fhat|^2 dt``."""
        return float(np.sum(self.weights * self.fhat(self.nodes) ** 2) / (2 * np.pi))

    def inverse(self, t, bandlimit, tol=1e-11):
        """``int_{-W}^{W} f(omega) exp(-i omega t) d omega`` by adaptive quadrature."""
        t = np.atleast_1d(np.asarray(t, dtype=float))

        def g(w):
            return 2 * (self.transform(w) * np.exp(-1j * w * t)).real

        res, err = quad_vec(g, 0.0, bandlimit, epsabs=tol, epsrel=tol, limit=4000)
        return res


def design_signal(C1, omega0=0.0, nsamples=1001, panels=None, order=24):
    """Bump signal ``fhat(t) = exp(-1/(t (C1 - t))) cos(omega0 t)`` on ``(0, C1)``.

    Parameters
    ----------
    C1 : float
        Support length, positive.
    omega0 : float
        Optional modulation frequency.
    panels : int, optional
        Gauss-Legendre panels for the transform; defaults to ``4 ceil(C1) + 16``.
    """
    if not C1 > 0:
        raise PreconditionViolated("C1 must be positive")
    if panels is None:
        panels = 4 * int(np.ceil(C1)) + 16
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, C1, panels + 1)
    h = np.diff(edges)
    nodes = (edges[:-1, None] + 0.5 * h[:, None] * (x[None, :] + 1)).reshape(-1)
    weights = (0.5 * h[:, None] * w[None, :]).reshape(-1)
    ts = np.linspace(0.0, C1, nsamples)
    return SignalSpec(float(C1), float(omega0), ts, _bump(ts, C1, omega0), nodes, weights)


@dataclass(frozen=True)
class BandReport:
    eta1: float
    ok: bool
    rho_delta: float
    size_ok: bool
    delta_max: float


def band_check(signal, rho, eta1=1e-2, eta2=None, delta=None):
    """Out-of-band energy ``int_{|omega| > rho} |f|^2`` and the size condition.

    Returns
    -------
    BandReport
        ``ok`` compares the out-of-band energy with ``eta1``; when ``eta2``
        is given ``delta_max = eta2 / rho`` and ``size_ok`` is ``delta <= delta_max``.
    """
    if not rho > 0:
        raise PreconditionViolated("rho must be positive")
    inband, _ = quad_vec(lambda w: np.abs(signal.transform(w)) ** 2, 0.0, rho, epsabs=1e-15, epsrel=1e-12, limit=2000)
    out = max(signal.energy() - 2 * float(inband), 0.0)
    dmax = eta2 / rho if eta2 is not None else np.inf
    rd = rho * delta if delta is not None else np.nan
    size_ok = True if delta is None or eta2 is None else bool(delta <= dmax * (1 + 1e-12))
    return BandReport(out, bool(out <= eta1), rd, size_ok, dmax)


# ----------------------------------------------------------------------------
# time window


@dataclass(frozen=True)
class TimeWindow:
    t_minus: np.ndarray
    t_plus: np.ndarray


def time_window(medium, particle, source, x, C1=None):
    """``t0-`` and ``t0+`` for each observation point.

    ``t0- = |z - s|/c_p + |x - z|/c_p - delta/c_p - C1`` and
    ``t0+ = |z - s|/c_s + |x - z|/c_s + delta/c_s + C1``.
    """
    if C1 is None:
        C1 = source.signal.C1
    x = np.atleast_2d(np.asarray(x, dtype=float))
    a = np.linalg.norm(particle.z - source.s)
    b = np.linalg.norm(x - particle.z, axis=1)
    d = particle.delta
    tm = (a + b - d) / medium.cp - C1
    tp = (a + b + d) / medium.cs + C1
    return TimeWindow(tm, tp)


# ----------------------------------------------------------------------------
# incident field


def _support_band(signal, rel=1e-13):
    """Frequency beyond which ``|f| < rel max |f|`` on a coarse scan."""
    w = np.linspace(0.0, 400.0 / max(signal.C1, 1e-3) + 4 * abs(signal.omega0) + 50, 4001)
    a = np.abs(signal.transform(w))
    big = np.nonzero(a > rel * a.max())[0]
    return float(w[big[-1]] * 1.1 + 1.0)


def incident_time_field(medium, source, x, t, tol=1e-10):
    """Incident displacement ``int f(omega) Gamma^omega(x - s) p exp(-i omega t) d omega``.

    The shear retarded term ``-fhat(t - r/c_s) p / (4 pi mu r)`` is evaluated
    exactly; the remainder, whose kernel ``Gamma^omega + exp(i omega r/c_s) I / (4 pi mu r)``
    is regular at ``omega = 0``, by adaptive quadrature.

    Returns
    -------
    ndarray, shape (T, 3), real
    """
    x = np.asarray(x, dtype=float)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    d = x - source.s
    r = float(np.linalg.norm(d))
    if r == 0:
        raise SingularPoint("observation point at the source")
    sig = source.signal
    p = source.p
    s_term = -sig.fhat(t - r / medium.cs)[:, None] * p[None, :] / (4 * np.pi * medium.mu * r)
    W = _support_band(sig)

    def g(w):
        G = kernels.kupradze(medium, d, w) + np.exp(1j * w * r / medium.cs) / (4 * np.pi * medium.mu * r) * np.eye(3)
        v = sig.transform(w) * (G @ p)
        return 2 * (v[None, :] * np.exp(-1j * w * t)[:, None]).real

    rest, _ = quad_vec(g, 0.0, W, epsabs=tol, epsrel=tol, limit=8000)
    return s_term + rest


def stokes_time_field(medium, source, x, t, nodes=64):
    """Closed-form retarded solution for a point force, used as an independent check.

    With ``gamma = (x - s)/r``::

        u = -[ (3 gamma gamma^T - I) / (4 pi r^3) int_{r/c_p}^{r/c_s} s fhat(t - s) ds
               + gamma gamma^T fhat(t - r/c_p) / (4 pi c_p^2 r)
               - (gamma gamma^T - I) fhat(t - r/c_s) / (4 pi c_s^2 r) ] p
    """
    x = np.asarray(x, dtype=float)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    d = x - source.s
    r = float(np.linalg.norm(d))
    g = d / r
    gg = np.outer(g, g)
    I = np.eye(3)
    sig = source.signal
    a, b = r / medium.cp, r / medium.cs
    xs, ws = np.polynomial.legendre.leggauss(nodes)
    # panels aligned with the signal support keep the rule accurate
    edges = np.linspace(a, b, 33)
    ss = (edges[:-1, None] + 0.5 * np.diff(edges)[:, None] * (xs + 1)).reshape(-1)
    wq = (0.5 * np.diff(edges)[:, None] * ws).reshape(-1)
    conv = np.array([np.sum(wq * ss * sig.fhat(tt - ss)) for tt in t])
    p = source.p
    u = (
        conv[:, None] * ((3 * gg - I) @ p)[None, :] / (4 * np.pi * r**3)
        + sig.fhat(t - a)[:, None] * (gg @ p)[None, :] / (4 * np.pi * medium.cp**2 * r)
        - sig.fhat(t - b)[:, None] * ((gg - I) @ p)[None, :] / (4 * np.pi * medium.cs**2 * r)
    )
    return -u


# ----------------------------------------------------------------------------
# frequency-domain modal model


class ModalFrequencyModel:
    """Modal scattered field with static ``tau`` and the leading-order right-hand side.

    Vectorised form of :func:`elastomode.spectral.scattered_field_freq` with
    ``rhs="asymptotic"`` and ``tau="static"`` for a fixed set of observation
    points.
    """

    def __init__(self, medium, particle, source, grid, N, x):
        self.medium, self.particle, self.source, self.grid, self.N = medium, particle, source, grid, N
        self.x = np.atleast_2d(np.asarray(x, dtype=float))
        self.X = (self.x - particle.z) / particle.delta
        if np.any(np.linalg.norm(self.X, axis=1) <= 1.0):
            raise PreconditionViolated("observation point inside the closed particle")
        self.modes = [k for k in mode_indices(N) if _resolved(k, grid)]
        self.basis = np.array([normalize_basis(medium, k, grid)[0] for k in self.modes])
        self.lams = np.array([np_eigenvalue(medium, k.family, k.n) for k in self.modes])
        # <nu_j e_i, b> for the linear right-hand side
        nu = grid.nodes
        w = grid.weights
        self._proj = np.einsum("q,qj,kqi->kij", w, nu, np.conj(self.basis))
        self._cache = {}

    def strain_matrix(self, omega):
        """``lambda tr(D) I + mu (D + D^T)`` with ``D_ij = d_j Gamma_il(z - s) p_l``."""
        Dg = kernels.grad_kupradze(self.medium, self.particle.z, self.source.s, omega)
        D = np.einsum("jil,l->ij", Dg, self.source.p)
        return self.medium.lam * np.trace(D) * np.eye(3) + self.medium.mu * (D + D.T)

    def projections(self, omega):
        """``<F(omega), b>`` for every mode."""
        c = self.particle.c(omega)
        A = self.strain_matrix(omega)
        pref = self.particle.delta * self.source.amplitude(omega) * (1 - c)
        return pref * np.einsum("ij,kij->k", A, self._proj)

    def taus(self, omega):
        return tau_static(self.particle.c(omega), self.lams)

    def field(self, omega):
        """Scattered field at the observation points, shape ``(P, 3)``."""
        key = complex(omega)
        if key in self._cache:
            return self._cache[key]
        amp = self.projections(omega) / (self.particle.delta * self.taus(omega))
        psi = np.einsum("k,kqi->qi", amp, self.basis)
        d = self.particle.delta
        u = d * bo.layer_potential(self.medium, self.grid, omega * d, psi, self.X)
        if len(self._cache) < 20000:
            self._cache[key] = u
        return u


def _resolved(idx, grid):
    from .sphere_basis import component_degree

    return component_degree(idx.family, idx.n) <= grid.band


def truncated_scattered_time(medium, particle, source, grid, N, rho, x, t, model=None, symmetric=True, tol=GK_TOL):
    """Band-limited scattered field ``P_rho[u_sca](x, t)``.

    Adaptive Gauss-Kronrod quadrature over ``[-rho, rho]``. With ``symmetric``
    the conjugate symmetry ``u(-omega) = conj u(omega)`` is first asserted at
    sample frequencies and the integral is folded onto ``[0, rho]``.

    Returns
    -------
    ndarray, shape (T, P, 3), complex
    """
    if model is None:
        model = ModalFrequencyModel(medium, particle, source, grid, N, x)
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if symmetric:
        for w in (0.13 * rho, 0.57 * rho, 0.91 * rho):
            a, b = model.field(w), model.field(-w)
            scale = max(np.abs(a).max(), 1e-300)
            if np.abs(b - np.conj(a)).max() > 1e-9 * scale:
                raise PreconditionViolated("scattered field is not conjugate symmetric in omega")

        def g(w):
            u = model.field(w)
            return 2 * (u[None] * np.exp(-1j * w * t)[:, None, None]).real

        lo = 0.0
    else:

        def g(w):
            return model.field(w)[None] * np.exp(-1j * w * t)[:, None, None]

        lo = -rho
    scale = np.abs(model.field(0.5 * rho)).max() + np.abs(model.field(0.0)).max()
    res, err, info = quad_vec(g, lo, rho, epsabs=tol * scale, epsrel=tol, limit=20000, full_output=True)
    if not info.success:
        raise QuadratureFailure(f"band-limited transform did not converge: {info.message}")
    return np.asarray(res, dtype=complex)


# ----------------------------------------------------------------------------
# residue expansion


@dataclass
class ModeTimeField:
    """Resonant data of one mode at the observation points.

    Attributes
    ----------
    omega2 : float
        Static decay rate ``Omega''``.
    amplitude : complex
        ``<F^{i Omega''}, b>`` on the reference sphere.
    e : ndarray, shape (P, 3)
        ``S^{i Omega'' delta}[b]((x - z)/delta)``.
    E : ndarray, shape (P, 3)
        ``e exp(Omega'' |x - z| / c_s)``.
    weight : complex
        ``2 pi / (beta (1/2 - lambda)) <F, b>``, the factor multiplying ``e exp(Omega'' t)``.
    C : ndarray, shape (P,)
        Normalized coefficient ``weight exp(Omega'' (|z - s|/c_s + delta/c_s + C1))``.
    """

    mode: object
    omega2: float
    amplitude: complex
    e: np.ndarray
    E: np.ndarray
    weight: complex
    C: complex

    def term(self, t):
        """Mode contribution ``weight e exp(Omega'' t)``, shape (T, P, 3)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return self.weight * np.exp(self.omega2 * t)[:, None, None] * self.e[None]

    def normalized_term(self, t, t_plus):
        """Same contribution as ``C E exp(Omega'' (t - t0+))``."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return self.C * self.E[None] * np.exp(self.omega2 * (t[:, None] - t_plus[None, :]))[..., None]


@dataclass
class ResidueExpansion:
    t: np.ndarray
    total: np.ndarray
    modes: list
    window: TimeWindow

    def per_mode(self):
        return {m.mode: m.term(self.t) for m in self.modes}


def mode_time_fields(medium, particle, source, grid, N, x, skip_zero=0.0):
    """Resonant mode data for ``T, M`` from ``n = 2`` and ``N`` from ``n = 1``."""
    check_parameters(medium, particle, N)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    X = (x - particle.z) / particle.delta
    d = particle.delta
    C1 = source.signal.C1
    a = np.linalg.norm(particle.z - source.s)
    rxz = np.linalg.norm(x - particle.z, axis=1)
    out = []
    for idx in mode_indices(N):
        if idx.family in ("T", "M") and idx.n == 1:
            continue
        if not _resolved(idx, grid):
            continue
        lam = np_eigenvalue(medium, idx.family, idx.n)
        o2 = static_omega(lam, particle.alpha, particle.beta)
        b, _ = normalize_basis(medium, idx, grid)
        F = bo.rhs_asymptotic(medium, particle, source, grid, 1j * o2)
        amp = complex(np.sum(grid.weights[:, None] * F * np.conj(b)))
        if abs(amp) <= skip_zero:
            continue
        # residue of 1/tau at i Omega'' closed clockwise in the lower half plane
        wgt = -2j * np.pi * amp / residue_constant(lam, particle.beta)
        e = bo.layer_potential(medium, grid, 1j * o2 * d, b, X)
        E = e * np.exp(o2 * rxz / medium.cs)[:, None]
        C = wgt * np.exp(o2 * (a / medium.cs + d / medium.cs + C1))
        out.append(ModeTimeField(idx, o2, amp, e, E, wgt, C))
    return out


def residue_expansion(medium, particle, source, grid, N, x, t, fields=None, enforce_window=True):
    """Resonant modal expansion of ``P_rho[u_sca](x, t)`` for ``t >= t0+``.

    Each mode contributes ``2 pi / (beta (1/2 - lambda)) <F^{i Omega''}, b> e(x) exp(Omega'' t)``.

    Raises
    ------
    PreconditionViolated
        If some ``t`` precedes ``t0+`` at some observation point.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    win = time_window(medium, particle, source, x)
    if enforce_window and t.min() < win.t_plus.max() - 1e-12:
        raise PreconditionViolated(f"t = {t.min():.6g} precedes t0+ = {win.t_plus.max():.6g}")
    if fields is None:
        fields = mode_time_fields(medium, particle, source, grid, N, x)
    total = np.zeros((t.size, x.shape[0], 3), dtype=complex)
    for m in fields:
        total += m.term(t)
    return ResidueExpansion(t, total, fields, win)


def decay_rate(t, values):
    """Least-squares slope of ``log |values|`` against ``t``."""
    y = np.log(np.abs(values))
    A = np.vstack([t, np.ones_like(t)]).T
    return float(np.linalg.lstsq(A, y, rcond=None)[0][0])


def error_envelope(t, err, period):
    """Running maximum of ``|err|`` over windows of one ``period`` centred at ``t``."""
    t = np.asarray(t)
    mag = np.abs(err)
    out = np.empty_like(t, dtype=float)
    for i, ti in enumerate(t):
        sel = np.abs(t - ti) <= period / 2
        out[i] = mag[sel].max()
    return out


def arc_remainder(model, rho, t, tol=1e-11):
    """``int u(omega) exp(-i omega t) d omega`` over the lower half circle ``|omega| = rho``.

    Traversed from ``rho`` to ``-rho``; adding it to ``P_rho`` closes the
    contour clockwise, so the sum equals the residue expansion exactly when all
    enclosed poles are included.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))

    def g(th):
        w = rho * np.exp(1j * th)
        return model.field(w)[None] * np.exp(-1j * w * t)[:, None, None] * (1j * w)

    res, _ = quad_vec(g, 0.0, -np.pi, epsrel=tol, epsabs=0.0, limit=5000)
    return res


@dataclass
class OracleComparison:
    """Residue expansion against the band-limited oracle at one observation point.

    Attributes
    ----------
    quiescent_ratio : float
        ``max_{t <= t0-} |P_rho u| / max_{t0+ <= t <= t0+ + 5} |P_rho u|``.
    l2_relative : float
        Relative L2 error of the residue expansion over ``[t0+, t0+ + 10]``.
    error_ratio : float
        Envelope of the error at ``t1`` over the envelope at ``2 t1``.
    """

    window: TimeWindow
    rho: float
    quiescent_ratio: float
    l2_relative: float
    t1: float
    error_ratio: float
    t: np.ndarray = field(repr=False)
    oracle: np.ndarray = field(repr=False)
    residue: np.ndarray = field(repr=False)


def oracle_comparison(medium, particle, source, grid, N, rho, x, t1=None, samples_per_unit=40):
    """Quiescent-past ratio, oracle agreement and the ``1/t`` error law at ``x``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))[:1]
    win = time_window(medium, particle, source, x)
    tm, tp = float(win.t_minus[0]), float(win.t_plus[0])
    if t1 is None:
        t1 = 4.0 * tp
    period = 2 * np.pi / rho
    n = lambda a, b: max(int((b - a) * samples_per_unit), 8) + 1
    t_pre = np.linspace(tm - 10.0, tm, n(tm - 10.0, tm))
    t_post = np.linspace(tp, tp + 10.0, n(tp, tp + 10.0))
    t_a = np.linspace(t1 - period, t1 + period, 81)
    t_b = np.linspace(2 * t1 - period, 2 * t1 + period, 81)
    tt = np.concatenate([t_pre, t_post, t_a, t_b])
    model = ModalFrequencyModel(medium, particle, source, grid, N, x)
    P = truncated_scattered_time(medium, particle, source, grid, N, rho, x, tt, model=model)[:, 0]
    fields = mode_time_fields(medium, particle, source, grid, N, x)
    t_res = tt[t_pre.size :]
    R = residue_expansion(medium, particle, source, grid, N, x, t_res, fields=fields).total[:, 0]
    i0 = t_pre.size
    i1 = i0 + t_post.size
    mag = np.linalg.norm(P, axis=1)
    late = t_post <= tp + 5.0
    quiet = float(mag[:i0].max() / mag[i0:i1][late].max())
    err = np.linalg.norm(R - P[i0:], axis=1)
    l2 = float(np.sqrt(np.sum(err[: t_post.size] ** 2) / np.sum(mag[i0:i1] ** 2)))
    na = t_post.size + t_a.size
    ratio = float(err[t_post.size : na].max() / err[na:].max())
    return OracleComparison(win, rho, quiet, l2, t1, ratio, tt, P, R)
