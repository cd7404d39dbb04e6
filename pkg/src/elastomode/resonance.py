"""Static and first-order corrected polariton resonances.

With ``c(Omega) = -alpha + i beta Omega`` the static condition ``tau_{i,n}(Omega) = 0``
has the single root ``Omega = i Omega''``. Adding the correction
``(c - 1)(Omega delta)^2 rho`` turns it into a cubic; its roots follow from
Cardano's formula when the discriminant is positive and from the
trigonometric form when it is negative.
"""
import csv
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DiscriminantSignUnexpected, ParameterConditionViolated, ResidualTooLarge
from .sphere_basis import FAMILIES
from .spectral import np_eigenvalue, tau_static

__all__ = [
    "Resonance",
    "ModeResonances",
    "ResonanceSet",
    "retained_modes",
    "alpha_bound",
    "check_parameters",
    "static_omega",
    "static_resonances",
    "corrected_resonances",
    "resonance_radius",
    "static_radius",
    "corrected_system",
    "residue_constant",
]

STATIC_TOL = 1e-12
CORRECTED_TOL = 1e-8
RHO_ZERO = 1e-12


@dataclass(frozen=True)
class Resonance:
    family: str
    n: int
    k: int
    omega: complex
    case: str
    branch: str
    residual: float


@dataclass
class ModeResonances:
    family: str
    n: int
    lam: float
    varrho: float
    case: str
    roots: list = field(default_factory=list)
    delta1: float = float("nan")
    delta2: float = float("nan")
    theta: float = float("nan")
    theta_prime: float = float("nan")


@dataclass
class ResonanceSet:
    kind: str
    delta: float
    alpha: float
    beta: float
    modes: list

    def roots(self):
        return [r for m in self.modes for r in m.roots]

    def by_mode(self):
        return {(m.family, m.n): m for m in self.modes}

    def max_residual(self):
        return max((r.residual for r in self.roots()), default=0.0)

    def to_csv(self, path, header=None):
        """Columns: family, n, k, case, branch, Re Omega, Im Omega, residual."""
        with open(path, "w", newline="") as fh:
            if header:
                fh.write(f"# {header}\n")
            w = csv.writer(fh)
            w.writerow(["family", "n", "k", "case", "branch", "omega_re", "omega_im", "residual"])
            for r in self.roots():
                w.writerow([r.family, r.n, r.k, r.case, r.branch, f"{r.omega.real:.17g}", f"{r.omega.imag:.17g}", f"{r.residual:.17g}"])


def _half_pole(family, n):
    """Modes with ``lambda = 1/2`` (T1 and M1)."""
    return family in ("T", "M") and n == 1


def retained_modes(N, families=FAMILIES):
    """``(family, n)`` pairs with a static resonance: T and M from n = 2, N from n = 1."""
    return [(f, n) for f in families for n in range(1, N + 1) if not _half_pole(f, n)]


def alpha_bound(medium, N):
    """``max (1/2 + lambda) / (1/2 - lambda)`` over the retained modes."""
    vals = []
    for f, n in retained_modes(N):
        lam = np_eigenvalue(medium, f, n)
        vals.append((0.5 + lam) / (0.5 - lam))
    return max(vals)


def check_parameters(medium, particle, N):
    """Require ``alpha`` above :func:`alpha_bound` and ``beta > 0``."""
    if not particle.beta > 0:
        raise ParameterConditionViolated(f"beta must be positive, got {particle.beta!r}")
    worst, bound = None, -np.inf
    for f, n in retained_modes(N):
        lam = np_eigenvalue(medium, f, n)
        r = (0.5 + lam) / (0.5 - lam)
        if r > bound:
            worst, bound = (f, n), r
    if not particle.alpha > bound:
        raise ParameterConditionViolated(
            f"alpha = {particle.alpha!r} must exceed {bound:.6g} (attained by mode {worst[0]}{worst[1]})", mode=worst
        )


def static_omega(lam, alpha, beta):
    """``Omega''`` of the static resonance (``Omega' = 0``)."""
    return (-alpha * (0.5 - lam) + (0.5 + lam)) / (beta * (0.5 - lam))


def _static_residual(omega, lam, alpha, beta):
    c = -alpha + 1j * beta * omega
    return abs(tau_static(c, lam))


def static_resonances(medium, particle, N):
    """Static resonances ``Omega = i Omega''`` for every retained mode.

    Raises
    ------
    ParameterConditionViolated
        If the sign conditions on ``alpha`` and ``beta`` fail.
    ResidualTooLarge
        If a root misses ``|tau(Omega)| <= 1e-12``.
    """
    check_parameters(medium, particle, N)
    a, b = particle.alpha, particle.beta
    modes = []
    for f, n in retained_modes(N):
        lam = np_eigenvalue(medium, f, n)
        om = 1j * static_omega(lam, a, b)
        res = _static_residual(om, lam, a, b)
        if res > STATIC_TOL:
            raise ResidualTooLarge(f"static residual {res:.3e} for {f}{n}")
        if not om.imag < 0:
            raise ParameterConditionViolated(f"Omega'' = {om.imag} is not negative for {f}{n}", mode=(f, n))
        mr = ModeResonances(f, n, lam, 0.0, "static")
        mr.roots.append(Resonance(f, n, 1, om, "static", "static", res))
        modes.append(mr)
    return ResonanceSet("static", particle.delta, a, b, modes)


def corrected_system(op, opp, lam, rho, alpha, beta, delta):
    """Real and imaginary parts of the corrected condition, split as two real equations.

    Returns
    -------
    (eq1, eq2, scale1, scale2)
        Equation values and the sums of absolute values of their terms.
    """
    d2r = delta**2 * rho
    h = 0.5 - lam
    t1 = [
        beta * d2r * opp**3,
        -3 * beta * d2r * op**2 * opp,
        -(alpha + 1) * d2r * (op**2 - opp**2),
        beta * h * opp,
        alpha * h,
        -(0.5 + lam),
    ]
    t2 = [beta * d2r * op**3, -3 * beta * d2r * opp**2 * op, -2 * (alpha + 1) * d2r * opp * op, -beta * h * op]
    return sum(t1), sum(t2), sum(abs(t) for t in t1), sum(abs(t) for t in t2)


def _relative_residual(omega, lam, rho, alpha, beta, delta):
    e1, e2, s1, s2 = corrected_system(omega.real, omega.imag, lam, rho, alpha, beta, delta)
    return max(abs(e1) / max(s1, 1e-300), abs(e2) / max(s2, 1e-300))


def _discriminants(lam, rho, alpha, beta, delta):
    d2r = delta**2 * rho
    h = 0.5 - lam
    a1 = alpha + 1
    q1 = (3 - 2 * a1 * h) / (48 * beta * d2r) - a1**3 / (216 * beta**3)
    p1 = h / (12 * d2r) - a1**2 / (36 * beta**2)
    q2 = (alpha * h - (1 + lam)) / (3 * beta * d2r) + a1**3 / (27 * beta**3)
    p2 = h / (3 * d2r) - a1**2 / (9 * beta**2)
    return q1, p1, q1**2 + p1**3, q2, p2, q2**2 + p2**3


def corrected_resonances(medium, particle, N, varrho_table, tol=CORRECTED_TOL):
    """First-order corrected resonances for every mode ``n <= N``.

    Parameters
    ----------
    varrho_table : dict
        ``(family, n) -> rho``; missing keys are taken as zero.

    Raises
    ------
    DiscriminantSignUnexpected
        If a discriminant contradicts the small-``delta`` case analysis.
    ResidualTooLarge
        If a root misses the relative residual ``tol``.
    """
    check_parameters(medium, particle, N)
    a, b, d = particle.alpha, particle.beta, particle.delta
    shift = (a + 1) / (3 * b)
    modes = []
    for f in FAMILIES:
        for n in range(1, N + 1):
            lam = np_eigenvalue(medium, f, n)
            rho = float(varrho_table.get((f, n), 0.0))
            half = _half_pole(f, n)
            if abs(rho) <= RHO_ZERO:
                if half:
                    continue
                mr = ModeResonances(f, n, lam, rho, "i")
                om = 1j * static_omega(lam, a, b)
                mr.roots.append(Resonance(f, n, 1, om, "i", "static", _static_residual(om, lam, a, b)))
                modes.append(mr)
                continue
            q1, p1, D1, q2, p2, D2 = _discriminants(lam, rho, a, b, d)
            if rho > 0 or half:
                mr = ModeResonances(f, n, lam, rho, "ii", delta1=D1, delta2=D2)
                if not D1 > 0:
                    raise DiscriminantSignUnexpected(
                        f"Delta_1 = {D1:.3e} <= 0 for {f}{n} at delta = {d}; reduce delta"
                    )
                s1 = np.sqrt(D1)
                opp = np.cbrt(-q1 + s1) + np.cbrt(-q1 - s1) - shift
                op2 = 3 * opp**2 + 2 * (a + 1) / b * opp + (0.5 - lam) / (d**2 * rho)
                if op2 > 0:
                    op = np.sqrt(op2)
                    mr.roots.append(Resonance(f, n, 1, complex(op, opp), "ii", "delta1", 0.0))
                    mr.roots.append(Resonance(f, n, 2, complex(-op, opp), "ii", "delta1", 0.0))
                if not D2 > 0:
                    raise DiscriminantSignUnexpected(
                        f"Delta_2 = {D2:.3e} <= 0 for {f}{n} at delta = {d}; reduce delta"
                    )
                s2 = np.sqrt(D2)
                opp3 = np.cbrt(-q2 + s2) + np.cbrt(-q2 - s2) - shift
                mr.roots.append(Resonance(f, n, 3, complex(0.0, opp3), "ii", "delta2", 0.0))
            else:
                mr = ModeResonances(f, n, lam, rho, "iii", delta1=D1, delta2=D2)
                if not D2 < 0:
                    raise DiscriminantSignUnexpected(
                        f"Delta_2 = {D2:.3e} >= 0 for {f}{n} at delta = {d}; reduce delta"
                    )
                r = np.sqrt(-p2)
                arg = np.clip(-q2 / r**3, -1.0, 1.0)
                th = np.arccos(arg)
                mr.theta_prime = float(th)
                r1 = np.sqrt(-p1) if p1 < 0 else np.nan
                if np.isfinite(r1):
                    mr.theta = float(np.arccos(np.clip(-q1 / r1**3, -1.0, 1.0)))
                for k in range(3):
                    opp = 2 * r * np.cos((th + 2 * np.pi * k) / 3) - shift
                    mr.roots.append(Resonance(f, n, k + 1, complex(0.0, opp), "iii", "trig", 0.0))
            checked = []
            for root in mr.roots:
                res = _relative_residual(root.omega, lam, rho, a, b, d)
                if res > tol:
                    raise ResidualTooLarge(f"relative residual {res:.3e} for {f}{n} root {root.k}")
                checked.append(Resonance(root.family, root.n, root.k, root.omega, root.case, root.branch, res))
            mr.roots = checked
            modes.append(mr)
    return ResonanceSet("corrected", d, a, b, modes)


def static_radius(medium, particle, N):
    """Closed-form ``max (alpha (1/2 - lambda) - (1/2 + lambda)) / (beta (1/2 - lambda))``."""
    a, b = particle.alpha, particle.beta
    return max(
        (a * (0.5 - lam) - (0.5 + lam)) / (b * (0.5 - lam))
        for lam in (np_eigenvalue(medium, f, n) for f, n in retained_modes(N))
    )


def resonance_radius(rset, particle=None):
    """Largest ``|Re Omega|`` or ``|Im Omega|`` over the set.

    Returns
    -------
    (R, self_consistent)
        ``self_consistent`` is ``R delta < 1/2``.
    """
    roots = rset.roots()
    if not roots:
        raise ValueError("empty resonance set")
    R = max(max(abs(r.omega.real), abs(r.omega.imag)) for r in roots)
    delta = particle.delta if particle is not None else rset.delta
    ok = bool(R * delta < 0.5)
    if not ok:
        warnings.warn(f"resonance radius {R:.4g} times delta {delta:.3g} is not below 1/2", RuntimeWarning, stacklevel=2)
    return float(R), ok


def residue_constant(lam, beta):
    """``d tau / d Omega = -i beta (1/2 - lambda)`` at a static resonance."""
    return -1j * beta * (0.5 - lam)
