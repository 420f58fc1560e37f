"""Zero sums, twisted prime sums, character sums and the Gonek integral.

Every sum is evaluated over fixed index chunks (see :mod:`zgl.parallel`),
so the value does not depend on the number of worker threads.

Zeros are taken as simple and only positive ordinates enter the sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .arith import Character, RationalPhase, VonMangoldtTable, gauss_sum
from .bump import TestFunction
from .errors import ConvergenceError, CoverageError, DomainError
from .parallel import compensated_sum
from .special import TWO_PI, chi_asymptotic_1ms, chi_factor, mul_mod_2pi
from .zeros import ZeroTable

SCALES = ("per_eq_1_1", "per_cor_3_2")
CHI_PATHS = ("exact", "asymptotic")
SHARP_MIN_T = 100.0


@dataclass(frozen=True)
class SumValue:
    value: complex
    term_count: int
    compensation_residue: float

    def __abs__(self) -> float:
        return abs(self.value)


def _xi_real(xi) -> float:
    x = xi.value if isinstance(xi, RationalPhase) else float(xi)
    if not (x > 0 and math.isfinite(x)):
        raise DomainError(f"xi must be positive and finite, got {xi}")
    return x


def _zero_terms(gamma: np.ndarray, xi: float, chi: str) -> np.ndarray:
    """``xi^{-rho} chi(1 - rho)`` for ``rho = 1/2 + i gamma``."""
    if chi not in CHI_PATHS:
        raise DomainError(f"unknown chi path {chi!r}")
    ang = mul_mod_2pi(-gamma, math.log(xi))
    power = xi**-0.5 * (np.cos(ang) + 1j * np.sin(ang))
    if chi == "exact":
        x = chi_factor(0.5 - 1j * gamma)
    else:
        x = chi_asymptotic_1ms(0.5 + 1j * gamma)
    return power * x


def _covered(zeros: ZeroTable, lo: float, hi: float) -> None:
    zeros.require(hi)
    if zeros.min_height > max(lo, 14.0):
        raise CoverageError(
            f"zero table starts at gamma = {zeros.min_height:.6g}, need gamma from {lo:.6g}"
        )


def _sum_over(values: np.ndarray, weights_fn, *, workers: int) -> SumValue:
    def terms(lo, hi):
        return weights_fn(values[lo:hi])

    v, res = compensated_sum(terms, values.size, workers=workers)
    return SumValue(v, int(values.size), res)


# ---------------------------------------------------------------------------
# sharp sums


def zero_sum_sharp_unchecked(xi, T: float, zeros: ZeroTable, *, chi: str = "exact",
                             workers: int = 1) -> SumValue:
    """As :func:`zero_sum_sharp` without the ``T >= 100`` floor."""
    x = _xi_real(xi)
    _covered(zeros, 0.0, T)
    gamma = zeros.upto(T)
    return _sum_over(gamma, lambda g: _zero_terms(g, x, chi), workers=workers)


def zero_sum_sharp(xi, T: float, zeros: ZeroTable, *, chi: str = "exact",
                   workers: int = 1) -> SumValue:
    """``Sigma_1(T) = sum_{0 < gamma <= T} xi^{-rho} chi(1 - rho)``."""
    if T < SHARP_MIN_T:
        raise DomainError(f"zero_sum_sharp needs T >= {SHARP_MIN_T:g}, got {T}")
    return zero_sum_sharp_unchecked(xi, T, zeros, chi=chi, workers=workers)


def _prime_range(lam: VonMangoldtTable, lo: float, hi: float) -> np.ndarray:
    """Prime powers ``n`` with ``lo <= n <= hi``; capacity checked against ``hi``."""
    lam.require(math.floor(hi))
    sup = lam.support
    i = int(np.searchsorted(sup, math.ceil(lo), side="left"))
    j = int(np.searchsorted(sup, math.floor(hi), side="right"))
    return sup[i:j]


def twisted_cheby(xi: RationalPhase, u: float, lam: VonMangoldtTable, *,
                  workers: int = 1) -> SumValue:
    """``Sigma_2(u) = sum_{1 < n <= u} Lambda(n) e(-n xi)`` with integer phase residues."""
    if not isinstance(xi, RationalPhase):
        raise DomainError("twisted_cheby needs a rational xi = m/q")
    n = _prime_range(lam, 2, u) if u >= 2 else np.zeros(0, dtype=np.int64)
    vals = lam.values
    return _sum_over(n, lambda k: vals[k] * xi.twist(k), workers=workers)


# ---------------------------------------------------------------------------
# smoothed sums


def zero_window(xi, X: float, scale: str, B: TestFunction) -> tuple[float, float, float]:
    """``(factor, lo, hi)``: gamma enters as ``B(gamma / factor)``, so ``gamma`` in ``[lo, hi]``."""
    if scale not in SCALES:
        raise DomainError(f"unknown scale {scale!r}; expected one of {SCALES}")
    x = _xi_real(xi)
    factor = TWO_PI * X * (x if scale == "per_cor_3_2" else 1.0)
    return factor, factor * B.support_lo, factor * B.support_hi


def zero_sum_smooth_unchecked(xi, X: float, scale: str, B: TestFunction, zeros: ZeroTable, *,
                              chi: str = "exact", workers: int = 1) -> SumValue:
    """As :func:`zero_sum_smooth` without the ``X > 100/xi`` floor."""
    x = _xi_real(xi)
    factor, lo, hi = zero_window(xi, X, scale, B)
    try:
        _covered(zeros, lo, hi)
    except CoverageError as exc:
        raise CoverageError(f"{exc} (window for X={X:g}, scale={scale})") from None
    gamma = zeros.window(lo, hi)
    return _sum_over(gamma, lambda g: _zero_terms(g, x, chi) * B(g / factor), workers=workers)


def zero_sum_smooth(xi, X: float, scale: str, B: TestFunction, zeros: ZeroTable, *,
                    chi: str = "exact", workers: int = 1) -> SumValue:
    """``sum_rho xi^{-rho} chi(1 - rho) B(gamma / (2 pi xi X))`` (or ``2 pi X`` for ``per_eq_1_1``)."""
    x = _xi_real(xi)
    if not X > 100.0 / x:
        raise DomainError(f"need X > 100/xi = {100.0 / x:.6g}, got X = {X}")
    return zero_sum_smooth_unchecked(xi, X, scale, B, zeros, chi=chi, workers=workers)


def _smooth_primes(X: float, B: TestFunction, lam: VonMangoldtTable, coef, workers: int) -> SumValue:
    if X <= 0:
        raise DomainError("X must be positive")
    n = _prime_range(lam, X * B.support_lo, X * B.support_hi)
    vals = lam.values
    return _sum_over(n, lambda k: vals[k] * coef(k) * B(k / X), workers=workers)


def prime_sum_smooth(xi: RationalPhase, X: float, B: TestFunction, lam: VonMangoldtTable, *,
                     workers: int = 1) -> SumValue:
    """``sum_n Lambda(n) e(-n xi) B(n / X)``."""
    if not isinstance(xi, RationalPhase):
        raise DomainError("prime_sum_smooth needs a rational xi = m/q")
    return _smooth_primes(X, B, lam, xi.twist, workers)


def plain_smooth(X: float, B: TestFunction, lam: VonMangoldtTable, *, workers: int = 1) -> SumValue:
    """``sum_n Lambda(n) B(n / X)``."""
    return _smooth_primes(X, B, lam, lambda k: 1.0, workers)


def char_sum_smooth(chi: Character, X: float, B: TestFunction, lam: VonMangoldtTable, *,
                    workers: int = 1) -> SumValue:
    """``sum_n Lambda(n) chi(n) B(n / X)``."""
    return _smooth_primes(X, B, lam, chi, workers)


def char_sum_via_twists(chi: Character, X: float, B: TestFunction, lam: VonMangoldtTable, *,
                        workers: int = 1) -> complex:
    """``(tau(chi)/q) sum_m conj(chi(m)) prime_sum_smooth(m/q)``; equals the direct sum for primitive chi."""
    q = chi.modulus
    tau = gauss_sum(chi)
    parts = []
    for m in range(1, q):
        if math.gcd(m, q) != 1:
            continue
        s = prime_sum_smooth(RationalPhase(m, q), X, B, lam, workers=workers).value
        parts.append(np.conj(complex(chi(m))) * s)
    total = complex(math.fsum(p.real for p in parts), math.fsum(p.imag for p in parts))
    return tau / q * total


# ---------------------------------------------------------------------------
# Gonek integral


@dataclass(frozen=True)
class QuadratureValue:
    value: complex
    error_estimate: float
    panels: int


_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)


def gonek_panel_width(r: float, T: float) -> float:
    return min(0.25, 1.0 / (4.0 * abs(math.log(T / (TWO_PI * r * math.e))) + 1.0))


def _gonek_panels(r: float, c: float, T: float, panels: int) -> complex:
    edges = np.linspace(1.0, T, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    t = (mid[:, None] + half[:, None] * _GL_X[None, :]).ravel()
    w = (half[:, None] * _GL_W[None, :]).ravel()
    ang = mul_mod_2pi(-t, math.log(r))
    f = r**-c * (np.cos(ang) + 1j * np.sin(ang)) * chi_factor(1.0 - c - 1j * t)
    v = w * f
    # ds = i dt cancels the i in 1/(2 pi i)
    return complex(math.fsum(v.real), math.fsum(v.imag)) / TWO_PI


def gonek_integral(r: float, c: float, T: float, *, tol: float = 1e-6,
                   max_doublings: int = 8) -> QuadratureValue:
    """``(1/2 pi i) int_{c+i}^{c+iT} r^{-s} chi(1 - s) ds`` by panelled Gauss-Legendre.

    The panel count is doubled until successive values differ by at most ``tol``.
    """
    if not r > 0:
        raise DomainError("r must be positive")
    if not 0.01 <= c <= 2:
        raise DomainError("need 1/100 <= c <= 2")
    if T < 10:
        raise DomainError("need T >= 10")
    panels = max(1, math.ceil((T - 1.0) / gonek_panel_width(r, T)))
    prev = _gonek_panels(r, c, T, panels)
    for _ in range(max_doublings):
        panels *= 2
        cur = _gonek_panels(r, c, T, panels)
        err = abs(cur - prev)
        if err <= tol:
            return QuadratureValue(cur, err, panels)
        prev = cur
    raise ConvergenceError(f"Gonek integral did not settle to {tol:g} (r={r}, c={c}, T={T})")


def gonek_main_term(r: float, T: float) -> complex:
    """``e(-r)`` when ``r <= T / 2 pi``, else 0."""
    if r <= T / TWO_PI:
        ang = -TWO_PI * (r - round(r))
        return complex(math.cos(ang), math.sin(ang))
    return 0j


def gonek_envelope(r: float, c: float, T: float, constant: float = 1.0) -> float:
    """``K (T^{c-1/2} + T^{c+1/2} / (|T - 2 pi r| + T^{1/2})) r^{-c}``."""
    E = T ** (c - 0.5) + T ** (c + 0.5) / (abs(T - TWO_PI * r) + math.sqrt(T))
    return constant * E * r**-c
