"""Complex special functions: e(u), log-gamma and the chi-factor.

Everything here is vectorised over numpy arrays and pure. Scalars in give
scalars out.

The chi-factor is the factor in ``zeta(s) = chi(s) zeta(1 - s)``::

    chi(s) = pi**(s - 1/2) * Gamma((1 - s)/2) / Gamma(s/2)
           = 2 * (2 pi)**(s - 1) * Gamma(1 - s) * sin(pi s / 2)

and is always evaluated as the exponential of a sum of logarithms, since
the gamma values themselves overflow once ``|Im s|`` passes a few hundred.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import DomainError, PoleError

TWO_PI = 2.0 * np.pi
# 2*pi = TWO_PI_HI + TWO_PI_LO to ~32 digits
TWO_PI_HI = 6.283185307179586
TWO_PI_LO = 2.4492935982947064e-16
LOG_PI = float(np.log(np.pi))
LOG_2PI = float(np.log(TWO_PI))
HALF_LOG_2PI = 0.5 * LOG_2PI
LOG_2PI_E = LOG_2PI + 1.0

_BERNOULLI = (
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
    Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510),
    Fraction(43867, 798), Fraction(-174611, 330),
)
# B_2k / (2k (2k - 1)), highest order first for Horner
_STIRLING = tuple(
    float(b / (2 * k * (2 * k - 1))) for k, b in reversed(list(enumerate(_BERNOULLI, 1)))
)
# below this modulus the argument is shifted up by the recurrence
_STIRLING_MIN = 10.0


def _out(x, scalar: bool):
    return x[()] if scalar else x


# ---------------------------------------------------------------------------
# extended-precision phase reduction


def _split(a):
    c = 134217729.0 * a  # 2**27 + 1
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    """Return ``(p, e)`` with ``p = fl(a*b)`` and ``a*b = p + e`` exactly."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def mul_mod_2pi(a, b):
    """``a*b`` reduced into ``[-pi, pi)`` with the product kept in double-double.

    The product ``a*b`` can reach 1e7; reducing the rounded product loses
    about 8 digits, reducing the exact one does not.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    scalar = a.ndim == 0 and b.ndim == 0
    p, e = two_prod(a, b)
    k = np.round(p / TWO_PI)
    q, qe = two_prod(k, TWO_PI_HI)
    r = (p - q) + (e - qe) - k * TWO_PI_LO
    r = np.where(r >= np.pi, r - TWO_PI, r)
    r = np.where(r < -np.pi, r + TWO_PI, r)
    return _out(r, scalar)


# ---------------------------------------------------------------------------
# e(u) = exp(2 pi i u)


def e_of(u):
    """``exp(2*pi*i*u)`` with ``u`` reduced mod 1 before scaling by 2*pi."""
    u = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(u)):
        raise DomainError("e_of: argument must be finite")
    r = u - np.round(u)  # exact in binary64
    ang = TWO_PI * r
    return _out(np.cos(ang) + 1j * np.sin(ang), u.ndim == 0)


# ---------------------------------------------------------------------------
# log-gamma


def _stirling(z):
    w = 1.0 / z
    w2 = w * w
    s = np.zeros_like(z)
    for c in _STIRLING:
        s = s * w2 + c
    return (z - 0.5) * np.log(z) - z + HALF_LOG_2PI + s * w


def _log_gamma_right(z):
    # Re z >= 1/2: shift up until |z| >= _STIRLING_MIN, log Gamma(z) = log Gamma(z+k) - sum log(z+j)
    k = np.where(np.abs(z) < _STIRLING_MIN, np.ceil(_STIRLING_MIN - z.real), 0.0).astype(int)
    acc = np.zeros_like(z)
    zz = z.copy()
    for j in range(int(k.max(initial=0))):
        m = k > j
        acc[m] += np.log(zz[m])
        zz[m] += 1.0
    return _stirling(zz) - acc


def log_sin_pi(z):
    """``log(sin(pi*z))`` without overflow for large ``|Im z|``.

    Principal branch of log applied to ``sin(pi z)``; the scaling by
    ``exp(-pi|y|)`` is by a positive real, so the argument is unchanged.
    """
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    ay = np.abs(y)
    e = np.exp(-TWO_PI * ay)
    sy = np.where(y < 0, -1.0, 1.0)
    w = np.sin(np.pi * x) * (1.0 + e) * 0.5 + 1j * np.cos(np.pi * x) * sy * (1.0 - e) * 0.5
    with np.errstate(divide="ignore"):
        return _out(np.log(w) + np.pi * ay, z.ndim == 0)


def log_gamma(z):
    """Principal branch of log Gamma.

    Stirling series (10 Bernoulli terms) on ``|z| >= 10``, upward recurrence
    below that, and the reflection formula for ``Re z < 1/2`` with the
    ``2*pi*i`` branch correction that keeps the result on the branch that is
    continuous away from the negative real axis.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if not np.all(np.isfinite(z)):
        raise DomainError("log_gamma: argument must be finite")
    pole = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(pole):
        raise PoleError(f"log_gamma: pole at z = {z[pole][0].real:g}")
    out = np.empty_like(z)
    right = z.real >= 0.5
    if np.any(right):
        out[right] = _log_gamma_right(z[right])
    left = ~right
    if np.any(left):
        zl = z[left]
        x, y = zl.real, zl.imag
        branch = 2j * np.pi * np.sign(y) * np.floor(0.5 * x + 0.25)
        out[left] = LOG_PI - log_sin_pi(zl) - _log_gamma_right(1.0 - zl) + branch
    return out[0] if scalar else out


# ---------------------------------------------------------------------------
# chi-factor


def _check_finite(s):
    if not np.all(np.isfinite(s)):
        raise DomainError("chi: argument must be finite")


def log_chi(s):
    """``log chi(s)`` from the gamma-quotient form (branch unspecified)."""
    s = np.asarray(s, dtype=complex)
    _check_finite(s)
    return (s - 0.5) * LOG_PI + log_gamma(0.5 - 0.5 * s) - log_gamma(0.5 * s)


def chi_factor(s):
    """The chi-factor ``chi(s)``, so that ``chi(1 - s) = 1/chi(s)``."""
    return np.exp(log_chi(s))


def chi_factor_cosine(s):
    """``chi(s)`` from the second closed form, ``2 (2pi)^(s-1) Gamma(1-s) sin(pi s/2)``.

    Independent of :func:`chi_factor` except for sharing :func:`log_gamma`.
    """
    s = np.asarray(s, dtype=complex)
    _check_finite(s)
    lg = log_gamma(1.0 - s)
    # log Gamma(s/2) pole check keeps the domain identical to chi_factor
    log_gamma(0.5 * s)
    with np.errstate(divide="ignore"):
        return np.exp(np.log(2.0) + (s - 1.0) * LOG_2PI + lg + log_sin_pi(0.5 * s))


def _asymptotic(s, exponent_sign: float):
    s = np.asarray(s, dtype=complex)
    _check_finite(s)
    sigma, t = s.real, s.imag
    if np.any(t < 1.0):
        raise DomainError("chi asymptotics need Im s >= 1")
    phase = mul_mod_2pi(t, np.log(t) - LOG_2PI_E) - 0.25 * np.pi
    modulus = (t / TWO_PI) ** (exponent_sign * (sigma - 0.5))
    return modulus * (np.cos(phase) + 1j * np.sin(phase))


def chi_asymptotic_1ms(s):
    """Main term of ``chi(1 - s)`` for ``t = Im s >= 1``::

        e^{-i pi/4} (t/2pi)^{sigma - 1/2} exp(i t log(t / (2 pi e)))
    """
    return _asymptotic(s, +1.0)


def chi_asymptotic_conj(s):
    """Main term of ``chi(conj(s))``: as :func:`chi_asymptotic_1ms` with exponent ``1/2 - sigma``."""
    return _asymptotic(s, -1.0)
