"""Elastic background media, quasiparticle geometry and the Kelvin-Voigt contrast.

Mass density is normalized to one throughout, so the wave speeds are
``c_s = sqrt(mu)`` and ``c_p = sqrt(lambda + 2 mu)``.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import ContrastZero, PreconditionViolated

__all__ = [
    "ElasticMedium",
    "ValidationReport",
    "Quasiparticle",
    "SourceSpec",
    "validate_medium",
    "contrast",
    "wave_numbers",
]


@dataclass(frozen=True)
class ElasticMedium:
    """Isotropic homogeneous elastic medium with unit density.

    Parameters
    ----------
    lam : float
        First Lame parameter.
    mu : float
        Shear modulus.
    """

    lam: float
    mu: float

    @property
    def cs(self):
        """Shear wave speed."""
        return float(np.sqrt(self.mu))

    @property
    def cp(self):
        """Compressional wave speed."""
        return float(np.sqrt(self.lam + 2.0 * self.mu))

    @property
    def kappa0(self):
        """``mu / (2 (lambda + 2 mu))``; the static spectrum accumulates at -kappa0 and +kappa0."""
        return self.mu / (2.0 * (self.lam + 2.0 * self.mu))

    @property
    def gamma1(self):
        return 0.5 * (1.0 / self.mu + 1.0 / (self.lam + 2.0 * self.mu))

    @property
    def gamma2(self):
        return 0.5 * (1.0 / self.mu - 1.0 / (self.lam + 2.0 * self.mu))

    @property
    def gamma3(self):
        """Coefficient of the rank-one first-order term of the single layer."""
        return -1j / (12.0 * np.pi) * (2.0 / self.cs**3 + 1.0 / self.cp**3)

    @property
    def gamma4(self):
        return 0.5 * (3.0 / self.cs**4 + 1.0 / self.cp**4)

    @property
    def gamma5(self):
        return 0.5 * (1.0 / self.cs**4 - 1.0 / self.cp**4)

    def require_valid(self):
        """Raise :class:`PreconditionViolated` unless the medium is strongly convex."""
        report = validate_medium(self)
        if not report.valid:
            raise PreconditionViolated("invalid medium: " + "; ".join(report.violations))
        return self


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    violations: tuple = ()


def validate_medium(medium):
    """Check the strong convexity conditions ``mu > 0`` and ``3 lambda + 2 mu > 0``.

    Returns
    -------
    ValidationReport
        ``valid`` is True iff both conditions hold; ``violations`` lists each
        failed condition as text.
    """
    violations = []
    lam, mu = medium.lam, medium.mu
    if not (np.isfinite(lam) and np.isfinite(mu)):
        violations.append("lambda and mu must be finite")
    else:
        if not mu > 0:
            violations.append(f"mu > 0 fails (mu = {mu!r})")
        if not 3 * lam + 2 * mu > 0:
            violations.append(f"3*lambda + 2*mu > 0 fails (3*lambda + 2*mu = {3 * lam + 2 * mu!r})")
    return ValidationReport(valid=not violations, violations=tuple(violations))


@dataclass(frozen=True)
class Quasiparticle:
    """Sphere ``D = z + delta B`` filled with a Kelvin-Voigt negative material.

    Parameters
    ----------
    center : array_like, shape (3,)
    radius : float
        The size ``delta``.
    alpha, beta : float
        Contrast parameters of ``c(omega) = -alpha + i beta omega``.
    """

    center: tuple
    radius: float
    alpha: float
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(v) for v in np.asarray(self.center, dtype=float).reshape(3)))
        if not self.radius > 0:
            raise PreconditionViolated("particle radius must be positive")
        if self.alpha == 0 or self.beta == 0:
            raise PreconditionViolated("alpha and beta must be nonzero")

    @property
    def z(self):
        return np.array(self.center)

    @property
    def delta(self):
        return float(self.radius)

    def c(self, omega):
        return -self.alpha + 1j * self.beta * omega

    def contains(self, x, closed=True):
        """True where ``x`` lies inside (or on, if ``closed``) the particle."""
        d = np.linalg.norm(np.asarray(x, dtype=float) - self.z, axis=-1)
        return d <= self.delta if closed else d < self.delta


@dataclass(frozen=True)
class SourceSpec:
    """Point force ``delta_s(x) fhat(t) p``.

    ``signal`` is any object exposing ``transform(omega)``, normally a
    :class:`elastomode.timedomain.SignalSpec`. When it is None the frequency
    profile is taken to be ``f(omega) = 1``.
    """

    location: tuple
    polarization: tuple
    signal: object = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "location", tuple(float(v) for v in np.asarray(self.location, dtype=float).reshape(3)))
        object.__setattr__(
            self, "polarization", tuple(float(v) for v in np.asarray(self.polarization, dtype=float).reshape(3))
        )
        if not np.linalg.norm(self.polarization) > 0:
            raise PreconditionViolated("polarization must be nonzero")

    @property
    def s(self):
        return np.array(self.location)

    @property
    def p(self):
        return np.array(self.polarization)

    def amplitude(self, omega):
        if self.signal is None:
            return np.ones_like(np.asarray(omega, dtype=complex))
        return self.signal.transform(omega)

    def check_exterior(self, particle):
        if particle.contains(self.s, closed=True):
            raise PreconditionViolated("source must lie outside the closed particle")
        return self


def contrast(particle, omega):
    """Contrast ``c(omega)`` and the interior frequency ``omega_1 = omega / sqrt(c)``.

    The principal branch of the square root is used.

    Raises
    ------
    ContrastZero
        If ``c(omega) = 0``.
    """
    c = complex(particle.c(omega))
    if c == 0:
        raise ContrastZero(f"c(omega) vanishes at omega = {omega!r}")
    omega1 = complex(omega) / np.sqrt(c)
    return c, omega1


def wave_numbers(medium, omega):
    """Shear and compressional wave numbers ``(omega / c_s, omega / c_p)``."""
    return omega / medium.cs, omega / medium.cp
