"""
.. module:: bornstat_analytic
    :platform: Linux
    :synopsis: Free-fermion closed forms for the post-selected rate function

Reference values for ``f(+...+) = -(1/L) ln |<+...+|e^{-iHz}|+...+>|^2``.
Each momentum pair contributes the factor
``g(k) = cos^2 phi_k + sin^2 phi_k e^{-2i eps(k) z}``; the vacuum-energy
phase is dropped, so complex-time values agree with the state-vector
oracle on the real axis only.

.. moduleauthor:: bornstat developers
"""
import cmath
import logging
import math
import warnings
from collections import namedtuple
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .bornstat_errors import ConfigError, DomainError, PoleError
from .bornstat_evolution import ComplexTime

#######
# Log #
#######

LOG = logging.getLogger(__name__)
LOG.addHandler(logging.NullHandler())

#############
# Constants #
#############

#: Absolute tolerance of the thermodynamic-limit quadrature
QUAD_EPSABS = 1e-8

#: Subinterval limit; 21-point Gauss-Kronrod keeps evaluations <= 2^20
QUAD_LIMIT = (1 << 20) // 21

#: Magnitudes below this are clamped before the logarithm
LOG_FLOOR = 1e-300

#: Safety factor c in n_min = c / (L delta_f)
MOMENT_SAFETY_FACTOR = 10.0

#: Tolerance for tan(phi) being treated as zero or infinite
_POLE_TOL = 1e-14

#: In-band quadrature result with a convergence flag
QuadratureResult = namedtuple("QuadratureResult",
                              ["value", "abserr", "converged"])


def dispersion(k, J: float = 1.0, h: float = 0.2):
    """ eps(k) = 2 sqrt((h - J cos k)^2 + (J sin k)^2) """
    k = np.asarray(k, dtype=float)
    value = 2.0 * np.hypot(h - J * np.cos(k), J * np.sin(k))
    return float(value) if value.ndim == 0 else value


def bogoliubov_angle(k, h: float, J: float = 1.0):
    """
    Returns (theta, phi) with theta = atan2(J sin k, h - J cos k) / 2 and
    phi = -theta, continuous on (0, pi).
    """
    k = np.asarray(k, dtype=float)
    theta = 0.5 * np.arctan2(J * np.sin(k), h - J * np.cos(k))
    if theta.ndim == 0:
        return float(theta), float(-theta)
    return theta, -theta


def _pair_factor(k, z: complex, J: float, h: float):
    """ cos^2 phi + sin^2 phi e^{-2i eps z} for every k """
    _, phi = bogoliubov_angle(k, h, J)
    eps = dispersion(k, J, h)
    return np.cos(phi) ** 2 + np.sin(phi) ** 2 * np.exp(-2j * eps * z)


def _log_magnitude(k, z: complex, J: float, h: float):
    return np.log(np.maximum(np.abs(_pair_factor(k, z, J, h)), LOG_FLOOR))


def rate_fn_thermo(z, J: float = 1.0, h: float = 0.2,
                   epsabs: float = QUAD_EPSABS) -> QuadratureResult:
    """
    Thermodynamic-limit rate function -(1/pi) int_0^pi ln|g(k)| dk by
    adaptive Gauss-Kronrod quadrature.

    Non-convergence is reported in-band through ``converged``.
    """
    z = ComplexTime.of(z).value
    if z == 0:
        return QuadratureResult(0.0, 0.0, True)
    points = None
    ratio = h / J
    if abs(ratio) < 1:
        points = [math.acos(ratio)]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(lambda k: float(_log_magnitude(k, z, J, h)),
                             0.0, math.pi, epsabs=epsabs, epsrel=0.0,
                             limit=QUAD_LIMIT, points=points, full_output=1)
    value, abserr = out[0], out[1]
    converged = len(out) < 4 and abserr <= 10 * epsabs
    if not converged:
        LOG.warning("Quadrature did not converge at z=%s (abserr=%.3g)", z,
                    abserr)
    return QuadratureResult(-value / math.pi, abserr / math.pi, converged)


def finite_momenta(L: int):
    """ Antiperiodic momenta k_m = (2m+1) pi / L, m = 0 .. L/2 - 1 """
    if L < 2 or L % 2:
        raise ConfigError("Finite-L momenta need even L >= 2, got {0}".format(
            L))
    return (2 * np.arange(L // 2) + 1) * math.pi / L


def rate_fn_finite(z, J: float = 1.0, h: float = 0.2, L: int = 12) -> float:
    """ -(2/L) sum_m ln|g(k_m)| over the antiperiodic momenta """
    z = ComplexTime.of(z).value
    ks = finite_momenta(L)
    return float(-2.0 / L * np.sum(_log_magnitude(ks, z, J, h)))


def _log_or_inf(magnitude: float, L: int, scale: float) -> float:
    if magnitude <= LOG_FLOOR:
        return math.inf
    return -scale / L * math.log(magnitude)


def rate_fn_h0_pbc(t, L: int, J: float = 1.0) -> float:
    """
    Zero-field periodic chain: -(2/L) ln|cos^L(Jt) + (i sin Jt)^L|, which
    is -(2/L) ln|cos^L t + sin^L t| when L is a multiple of 4.
    """
    z = ComplexTime.of(t).value * J
    amplitude = cmath.cos(z) ** L + (1j * cmath.sin(z)) ** L
    return _log_or_inf(abs(amplitude), L, 2.0)


def rate_fn_h0_obc(t, L: int, J: float = 1.0) -> float:
    """ Zero-field open chain: -(2(L-1)/L) ln|cos Jt| (L - 1 bonds) """
    z = ComplexTime.of(t).value * J
    return _log_or_inf(abs(cmath.cos(z)), L, 2.0 * (L - 1))


@dataclass(frozen=True)
class ZeroLine(object):
    """ One Yang-Lee-Fisher zero z_m(k) of the Loschmidt amplitude """
    m: int
    k: float
    z: ComplexTime


def ylf_zero(m: int, k: float, J: float = 1.0, h: float = 0.2) -> ComplexTime:
    """
    Complex time z = t + i tau where g(k) vanishes:
    t = pi (2m+1) / (2 eps), tau = -ln(tan^2 phi) / (2 eps).

    ``ComplexTime.boltzmann()`` of the result is
    [ln(tan^2 phi) + i pi (2m+1)] / (2 eps).

    :raises PoleError: when tan(phi) is zero or infinite
    """
    _, phi = bogoliubov_angle(k, h, J)
    sin, cos = math.sin(phi), math.cos(phi)
    if abs(sin) < _POLE_TOL or abs(cos) < _POLE_TOL:
        raise PoleError("tan(phi_k) is {0} at k={1}".format(
            "zero" if abs(sin) < _POLE_TOL else "infinite", k))
    eps = dispersion(k, J, h)
    return ComplexTime(math.pi * (2 * m + 1) / (2 * eps),
                       -math.log((sin / cos) ** 2) / (2 * eps))


def zero_lines(m_values, ks, J: float = 1.0, h: float = 0.2) -> list:
    """ ZeroLine for every (m, k); momenta at poles are skipped """
    lines = []
    for m in m_values:
        for k in ks:
            try:
                lines.append(ZeroLine(int(m), float(k), ylf_zero(m, k, J, h)))
            except PoleError as err:
                LOG.debug("Skipping pole: %s", err)
    return lines


def critical_times(h: float, m: int = 0, J: float = 1.0) -> float:
    """
    Real critical time (2m+1) t*/2 with period t* = pi / (2 sqrt(1 - (h/J)^2)).

    :raises DomainError: for h >= |J| (no real critical time)
    """
    ratio = abs(h / J)
    if ratio >= 1:
        raise DomainError("No real critical times for h/J = {0} >= 1".format(
            ratio))
    if m < 0:
        raise ConfigError("m must be >= 0")
    period = math.pi / (2 * abs(J) * math.sqrt(1 - ratio ** 2))
    return (2 * m + 1) * period / 2


def critical_moment_bound(L: int, delta_f: float,
                          c: float = MOMENT_SAFETY_FACTOR) -> float:
    """
    Smallest moment order n with excited-level weight e^{-n L delta_f}
    below e^{-c}.

    :raises DomainError: for delta_f <= 0
    """
    if delta_f <= 0:
        raise DomainError("Level gap must be > 0, got {0}".format(delta_f))
    return c / (L * delta_f)


def h0_pbc_zeros(L: int, t_range, tau_range, J: float = 1.0) -> list:
    """
    Complex times solving cos^L(Jz) + (i sin Jz)^L = 0 inside the window.

    With w^L = -1 the roots satisfy tan(Jz) = -i w; w = +-1 give no root.
    """
    t_lo, t_hi = min(t_range), max(t_range)
    tau_lo, tau_hi = min(tau_range), max(tau_range)
    roots = []
    for j in range(L):
        w = cmath.exp(1j * math.pi * (2 * j + 1) / L)
        target = -1j * w
        if abs(target - 1j) < 1e-12 or abs(target + 1j) < 1e-12:
            continue
        base = complex(np.arctan(target))
        lo = int(math.floor((t_lo * J - base.real) / math.pi)) - 1
        hi = int(math.ceil((t_hi * J - base.real) / math.pi)) + 1
        for n in range(lo, hi + 1):
            z = (base + n * math.pi) / J
            if t_lo <= z.real <= t_hi and tau_lo <= z.imag <= tau_hi:
                roots.append(ComplexTime(z.real, z.imag))
    roots.sort(key=lambda root: (root.t, root.tau))
    return roots
