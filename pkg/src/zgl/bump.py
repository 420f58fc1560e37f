"""Smooth compactly supported test functions on the positive half-line.

Two built-in kinds:

* ``canonical_mollifier``: ``exp(-1/((u - a)(b - u)))`` on ``(a, b)``.
* ``plateau``: equal to 1 on ``[c, d]``, joined to 0 at ``a`` and ``b`` by
  the C-infinity step ``S(x) = f(x) / (f(x) + f(1 - x))``, ``f(x) = exp(-1/x)``.

``user_supplied`` wraps an evaluator/derivative pair given in-process.
Every kind can be dilated (``B(u/lam)``) and scaled (``c B``).
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .errors import ConvergenceError, DomainError

KINDS = ("canonical_mollifier", "plateau", "user_supplied")
QUAD_TOL = 1e-12
QUAD_MAX_DEPTH = 50


def _f(x):
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)


def _step(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.clip(x, 0.0, 1.0)
    fa, fb = _f(x), _f(1.0 - x)
    return fa / (fa + fb)


def _step_deriv(x):
    inside = (x > 0) & (x < 1)
    xs = np.where(inside, x, 0.5)
    fa, fb = _f(xs), _f(1.0 - xs)
    d = (fa / xs**2 * fb + fa * fb / (1.0 - xs) ** 2) / (fa + fb) ** 2
    return np.where(inside, d, 0.0)


@dataclass(frozen=True)
class TestFunction:
    """A bump ``amplitude * base(u / dilation)`` with ``base`` supported on ``[a, b]``."""

    __test__ = False  # not a pytest class

    kind: str
    a: float
    b: float
    params: tuple[float, ...] = ()
    amplitude: float = 1.0
    dilation: float = 1.0
    user_eval: Callable | None = field(default=None, compare=False, repr=False)
    user_deriv: Callable | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown bump kind {self.kind!r}")
        if not (self.a > 0 and self.b > self.a):
            raise DomainError(f"invalid support [{self.a}, {self.b}]: need 0 < lo < hi")
        if self.dilation <= 0:
            raise DomainError("dilation must be positive")
        if self.kind == "plateau":
            c, d = self.params
            if not (self.a < c <= d < self.b):
                raise DomainError(f"plateau [{c}, {d}] must lie strictly inside [{self.a}, {self.b}]")
        if self.kind == "user_supplied" and (self.user_eval is None or self.user_deriv is None):
            raise DomainError("user_supplied bump needs user_eval and user_deriv")

    @property
    def support_lo(self) -> float:
        return self.a * self.dilation

    @property
    def support_hi(self) -> float:
        return self.b * self.dilation

    # -- base function in its own coordinate ---------------------------------

    def _base(self, x):
        a, b = self.a, self.b
        inside = (x > a) & (x < b)
        if self.kind == "canonical_mollifier":
            g = np.where(inside, (x - a) * (b - x), 1.0)
            return np.where(inside, np.exp(-1.0 / g), 0.0)
        if self.kind == "plateau":
            c, d = self.params
            up = _step((x - a) / (c - a))
            down = _step((b - x) / (b - d))
            return np.where(inside, np.minimum(up, down), 0.0)
        return np.where(inside, self.user_eval(x), 0.0)

    def _base_deriv(self, x):
        a, b = self.a, self.b
        inside = (x > a) & (x < b)
        if self.kind == "canonical_mollifier":
            g = np.where(inside, (x - a) * (b - x), 1.0)
            val = np.exp(-1.0 / g) * (a + b - 2.0 * x) / g**2
            return np.where(inside, val, 0.0)
        if self.kind == "plateau":
            c, d = self.params
            left = (x > a) & (x < c)
            right = (x > d) & (x < b)
            return np.where(left, _step_deriv((x - a) / (c - a)) / (c - a),
                            np.where(right, -_step_deriv((b - x) / (b - d)) / (b - d), 0.0))
        return np.where(inside, self.user_deriv(x), 0.0)

    # -- public --------------------------------------------------------------

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        v = self.amplitude * self._base(u / self.dilation)
        return v[()] if u.ndim == 0 else v

    def deriv(self, u):
        u = np.asarray(u, dtype=float)
        v = self.amplitude / self.dilation * self._base_deriv(u / self.dilation)
        return v[()] if u.ndim == 0 else v

    def dilate(self, lam: float) -> TestFunction:
        """``u -> B(u / lam)``."""
        return replace(self, dilation=self.dilation * lam)

    def scale(self, c: float) -> TestFunction:
        return replace(self, amplitude=self.amplitude * c)

    @cached_property
    def _base_integral(self) -> float:
        return adaptive_simpson(self._base, self.a, self.b, QUAD_TOL / max(self.dilation, 1.0))

    @property
    def integral(self) -> float:
        """``C_B``, the integral over the support (base integral cached on first use)."""
        return self.amplitude * self.dilation * self._base_integral


def canonical_bump(a: float = 1.0, b: float = 2.0) -> TestFunction:
    return TestFunction("canonical_mollifier", float(a), float(b))


def plateau_bump(a: float, b: float, flat_lo: float, flat_hi: float) -> TestFunction:
    return TestFunction("plateau", float(a), float(b), (float(flat_lo), float(flat_hi)))


def user_bump(a: float, b: float, func: Callable, deriv: Callable) -> TestFunction:
    return TestFunction("user_supplied", float(a), float(b), user_eval=func, user_deriv=deriv)


def make_bump(kind: str = "canonical_mollifier", lo: float = 1.0, hi: float = 2.0,
              flat_lo: float | None = None, flat_hi: float | None = None) -> TestFunction:
    """Build a bump from config values (``bump.kind``, ``bump.lo``, ``bump.hi``)."""
    if kind in ("canonical", "canonical_mollifier"):
        return canonical_bump(lo, hi)
    if kind == "plateau":
        w = hi - lo
        c = lo + 0.2 * w if flat_lo is None else flat_lo
        d = hi - 0.2 * w if flat_hi is None else flat_hi
        return plateau_bump(lo, hi, c, d)
    raise DomainError(f"bump kind {kind!r} cannot be built from config")


def eval(f: TestFunction, u):  # noqa: A001 - mirrors the operation name
    return f(u)


def eval_deriv(f: TestFunction, u):
    return f.deriv(u)


def integral(f: TestFunction) -> float:
    return f.integral


# ---------------------------------------------------------------------------
# quadrature


def adaptive_simpson(fn: Callable, a: float, b: float, tol: float = QUAD_TOL,
                     max_depth: int = QUAD_MAX_DEPTH) -> float:
    """Adaptive Simpson with Richardson correction, all open panels refined together.

    A panel is accepted when ``|S_left + S_right - S_whole| <= 15 tol_panel``;
    children inherit half the tolerance.
    """
    lo = np.array([a], dtype=float)
    hi = np.array([b], dtype=float)
    flo, fhi = fn(lo), fn(hi)
    fmid = fn(0.5 * (lo + hi))
    whole = (hi - lo) / 6.0 * (flo + 4 * fmid + fhi)
    tols = np.array([tol])
    accepted_x: list[np.ndarray] = []
    accepted_v: list[np.ndarray] = []
    for depth in range(max_depth + 1):
        if lo.size == 0:
            break
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = fn(lm), fn(rm)
        left = (mid - lo) / 6.0 * (flo + 4 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4 * frm + fhi)
        diff = left + right - whole
        # the first two levels are always split so that a symmetric bump cannot fool the test
        ok = (np.abs(diff) <= 15.0 * tols) & (depth >= 2)
        if np.any(ok):
            accepted_x.append(lo[ok])
            accepted_v.append((left + right + diff / 15.0)[ok])
        keep = ~ok
        if depth == max_depth and np.any(keep):
            raise ConvergenceError(f"adaptive Simpson did not converge on [{a}, {b}]")
        lo, mid, hi = lo[keep], mid[keep], hi[keep]
        flo, flm, fmid, frm, fhi = flo[keep], flm[keep], fmid[keep], frm[keep], fhi[keep]
        left, right, tols = left[keep], right[keep], tols[keep]
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        flo, fhi = np.concatenate([flo, fmid]), np.concatenate([fmid, fhi])
        fmid = np.concatenate([flm, frm])
        whole = np.concatenate([left, right])
        tols = np.concatenate([tols, tols]) / 2.0
    if not accepted_x:
        return 0.0
    xs = np.concatenate(accepted_x)
    vs = np.concatenate(accepted_v)
    return math.fsum(vs[np.argsort(xs, kind="stable")])
