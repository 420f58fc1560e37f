"""Ordinates of the nontrivial zeros of zeta on the critical line.

Zeros are located as sign changes of Hardy's Z function on a uniform grid
and refined by bisection. Z is evaluated with the Riemann-Siegel formula
(main sum plus the correction terms C0..C4) for t >= 100 and with
Euler-Maclaurin summation of zeta(1/2 + it) below that.

All ordinates are taken to lie on the critical line.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import (
    CoverageError,
    DomainError,
    EmptyTableError,
    MissedZeroError,
    MonotonicityError,
    ParseError,
)
from .parallel import chunked_map
from .special import LOG_PI, TWO_PI, log_gamma

COMPUTED_CEILING = 1e5
RS_MIN_T = 100.0
COUNT_SLACK = 3.0
DEFAULT_PRECISION = 1e-8
BISECT_TOL = 1e-9
FIRST_ZERO_FLOOR = 14.0

SOURCES = ("computed", "imported", "merged")


@dataclass(frozen=True, eq=False)
class ZeroTable:
    """Ascending ordinates ``gamma`` of zeros ``1/2 + i gamma``.

    ``max_height`` is the height up to which the table is complete; it is
    at least the last ordinate. ``min_height`` is where completeness starts
    (0 for a table that begins at the first zero).
    """

    ordinates: np.ndarray
    max_height: float
    source: str = "computed"
    precision_hint: float = DEFAULT_PRECISION
    min_height: float = 0.0
    # reserved for multiplicities; every zero is treated as simple
    multiplicity: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        g = np.array(self.ordinates, dtype=float)
        g.setflags(write=False)
        object.__setattr__(self, "ordinates", g)
        object.__setattr__(self, "max_height", float(self.max_height))
        if self.source not in SOURCES:
            raise ValueError(f"unknown source {self.source!r}")
        if g.size:
            if g[0] <= FIRST_ZERO_FLOOR:
                raise MonotonicityError(f"ordinate {g[0]} is below the first zero")
            gaps = np.diff(g)
            if np.any(gaps <= 0):
                i = int(np.argmax(gaps <= 0))
                raise MonotonicityError(f"ordinates not strictly ascending at index {i + 1}")
            if np.any(gaps <= self.precision_hint):
                raise MonotonicityError("duplicate ordinate within precision_hint")
            if self.max_height < g[-1]:
                raise ValueError("max_height below last ordinate")

    def __len__(self) -> int:
        return int(self.ordinates.size)

    def count(self, T: float) -> int:
        """``N(T)``: number of ordinates ``<= T``."""
        return int(np.searchsorted(self.ordinates, T, side="right"))

    def upto(self, T: float) -> np.ndarray:
        return self.ordinates[: self.count(T)]

    def window(self, lo: float, hi: float) -> np.ndarray:
        i = int(np.searchsorted(self.ordinates, lo, side="left"))
        j = int(np.searchsorted(self.ordinates, hi, side="right"))
        return self.ordinates[i:j]

    def truncate(self, height: float) -> ZeroTable:
        return ZeroTable(self.upto(height), min(height, self.max_height), self.source,
                         self.precision_hint, self.min_height)

    def require(self, height: float) -> None:
        if self.max_height < height:
            raise CoverageError(
                f"zero table covers gamma <= {self.max_height:.6g}, need gamma <= {height:.6g}"
            )


# ---------------------------------------------------------------------------
# theta and Z


def riemann_siegel_theta(t):
    """``theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi`` for ``t >= 1``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 1.0):
        raise DomainError("theta needs t >= 1")
    th = log_gamma(0.25 + 0.5j * t).imag - 0.5 * t * LOG_PI
    return th[()] if t.ndim == 0 else th


@lru_cache(maxsize=1)
def _rs_polys():
    # Taylor coefficients of Psi(p) = cos(2pi(p^2 - p - 1/16)) / cos(2pi p) about p = 1/2,
    # i.e. of -cos(2pi z^2 - 5pi/8) / cos(2pi z), via a Cauchy integral on |z| = 1
    m = 256
    z = np.exp(2j * np.pi * np.arange(m) / m)
    psi = -np.cos(2 * np.pi * z**2 - 5 * np.pi / 8) / np.cos(2 * np.pi * z)
    a = (np.fft.fft(psi) / m).real[:64]
    a[1::2] = 0.0  # Psi is even in z
    P = np.polynomial.Polynomial(a)
    d = [P.deriv(k) if k else P for k in range(13)]
    pi = np.pi
    return (
        d[0],
        -d[3] / (96 * pi**2),
        d[2] / (64 * pi**2) + d[6] / (18432 * pi**4),
        -d[1] / (64 * pi**2) - d[5] / (3840 * pi**4) - d[9] / (5308416 * pi**6),
        d[0] / (128 * pi**2) + d[4] * (19 / (24576 * pi**4)) + d[8] * (11 / (5898240 * pi**6))
        + d[12] / (2038431744 * pi**8),
    )


def _z_riemann_siegel(t):
    a = np.sqrt(t / TWO_PI)
    n_terms = np.floor(a).astype(np.int64)
    th = riemann_siegel_theta(t)
    acc = np.zeros_like(t)
    for n in range(1, int(n_terms.max(initial=0)) + 1):
        term = np.cos(th - t * math.log(n)) / math.sqrt(n)
        acc += np.where(n <= n_terms, term, 0.0)
    z = a - n_terms - 0.5
    polys = _rs_polys()
    corr = np.zeros_like(t)
    inv_a = 1.0 / a
    for k in range(len(polys) - 1, -1, -1):
        corr = corr * inv_a + polys[k](z)
    sign = np.where(n_terms % 2 == 1, 1.0, -1.0)
    return 2.0 * acc + sign * corr / np.sqrt(a)


_EM_N = 110
_EM_COEF = tuple(
    float(b / math.factorial(2 * k))
    for k, b in enumerate(
        (Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30), Fraction(5, 66),
         Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510)), 1)
)


def zeta_critical_em(t):
    """``zeta(1/2 + it)`` by Euler-Maclaurin with a fixed cut at N = 110 (accurate for t < ~300)."""
    t = np.asarray(t, dtype=float)
    s = 0.5 + 1j * t
    acc = np.zeros_like(s)
    for n in range(1, _EM_N):
        acc += np.exp(-s * math.log(n))
    N = float(_EM_N)
    n_pow = np.exp(-s * math.log(N))  # N^{-s}
    acc += N * n_pow / (s - 1.0) + 0.5 * n_pow
    rising = s
    for k, c in enumerate(_EM_COEF, 1):
        acc += c * rising * n_pow / N ** (2 * k - 1)
        rising = rising * (s + 2 * k - 1) * (s + 2 * k)
    return acc


def _z_euler_maclaurin(t):
    th = riemann_siegel_theta(t)
    return (np.exp(1j * th) * zeta_critical_em(t)).real


def _hardy_z(t):
    out = np.empty_like(t)
    hi = t >= RS_MIN_T
    if np.any(hi):
        out[hi] = _z_riemann_siegel(t[hi])
    if np.any(~hi):
        out[~hi] = _z_euler_maclaurin(t[~hi])
    return out


def hardy_z(t):
    """Hardy's ``Z(t) = exp(i theta(t)) zeta(1/2 + it)``, real, for ``t >= 2``."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 2.0):
        raise DomainError("hardy_z needs t >= 2")
    out = _hardy_z(np.atleast_1d(t))
    return out[0] if t.ndim == 0 else out


# ---------------------------------------------------------------------------
# zero search


@dataclass(frozen=True)
class CountReport:
    T: float
    count: int
    main_term: float
    difference: float
    passed: bool


def count_check(T: float, table: ZeroTable, slack: float = COUNT_SLACK) -> CountReport:
    """Compare ``N(T)`` with ``theta(T)/pi + 1``; fails when they differ by more than ``slack``."""
    if table.max_height < T:
        raise CoverageError(f"zero table covers gamma <= {table.max_height:.6g}, need {T:.6g}")
    if table.min_height > FIRST_ZERO_FLOOR:
        raise CoverageError("count_check needs a table starting below the first zero")
    n = table.count(T)
    main = float(riemann_siegel_theta(max(T, 1.0))) / math.pi + 1.0
    diff = n - main
    return CountReport(T, n, main, diff, abs(diff) <= slack)


def _eval_grid(grid: np.ndarray, workers: int) -> np.ndarray:
    parts = chunked_map(lambda lo, hi: _hardy_z(grid[lo:hi]), grid.size, workers=workers)
    return np.concatenate(parts) if parts else np.empty(0)


def _bisect(lo: np.ndarray, hi: np.ndarray, zlo: np.ndarray, workers: int) -> np.ndarray:
    def run(i, j):
        a, b, za = lo[i:j].copy(), hi[i:j].copy(), zlo[i:j].copy()
        while np.any(b - a > 2 * BISECT_TOL):
            m = 0.5 * (a + b)
            zm = _hardy_z(m)
            left = np.sign(zm) == np.sign(za)
            a = np.where(left, m, a)
            za = np.where(left, zm, za)
            b = np.where(left, b, m)
            exact = zm == 0
            a = np.where(exact, m, a)
            b = np.where(exact, m, b)
        return 0.5 * (a + b)

    parts = chunked_map(run, lo.size, workers=workers, chunk=2048)
    return np.concatenate(parts) if parts else np.empty(0)


def _hidden_pairs(grid: np.ndarray, z: np.ndarray, workers: int):
    """Brackets for pairs of zeros that fall between two grid points.

    A local minimum of ``|Z|`` on the grid whose three-point parabola dips
    toward zero is probed by golden-section search for the extremum of Z; if
    the extremum has the opposite sign, two brackets are returned.
    """
    if z.size < 3:
        return np.empty(0), np.empty(0)
    az = np.abs(z)
    zl, zc, zr = z[:-2], z[1:-1], z[2:]
    same = (np.sign(zl) == np.sign(zc)) & (np.sign(zc) == np.sign(zr))
    local_min = same & (az[1:-1] <= az[:-2]) & (az[1:-1] <= az[2:])
    # parabola through the three points, evaluated at its vertex (unit spacing)
    curv = zl - 2 * zc + zr
    with np.errstate(divide="ignore", invalid="ignore"):
        vertex = zc - (zr - zl) ** 2 / (8 * curv)
    dips = local_min & (np.sign(zc) * vertex < 0.5 * az[1:-1])
    idx = np.nonzero(dips)[0] + 1
    if idx.size == 0:
        return np.empty(0), np.empty(0)
    sgn = np.sign(z[idx])
    a, b = grid[idx - 1].copy(), grid[idx + 1].copy()
    invphi = (math.sqrt(5) - 1) / 2
    best_val = np.full(idx.size, np.inf)
    best_pos = grid[idx].copy()
    for _ in range(40):
        c = b - invphi * (b - a)
        d = a + invphi * (b - a)
        fc, fd = sgn * _hardy_z(c), sgn * _hardy_z(d)
        left = fc < fd
        val = np.where(left, fc, fd)
        better = val < best_val
        best_val = np.where(better, val, best_val)
        best_pos = np.where(better, np.where(left, c, d), best_pos)
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        if np.all((best_val < 0) | (b - a < 1e-7)):
            break
    m = best_pos
    hit = best_val < 0
    lo = np.concatenate([grid[idx - 1][hit], m[hit]])
    hi = np.concatenate([m[hit], grid[idx + 1][hit]])
    return lo, hi


def _search(t_min: float, t_max: float, step: float, workers: int) -> np.ndarray:
    n = max(1, math.ceil((t_max - t_min) / step))
    grid = t_min + (t_max - t_min) * (np.arange(n + 1) / n)
    z = _eval_grid(grid, workers)
    exact = np.nonzero(z == 0)[0]
    change = np.nonzero(z[:-1] * z[1:] < 0)[0]
    lo, hi = grid[change], grid[change + 1]
    plo, phi = _hidden_pairs(grid, z, workers)
    lo = np.concatenate([lo, plo])
    hi = np.concatenate([hi, phi])
    order = np.argsort(lo, kind="stable")
    lo, hi = lo[order], hi[order]
    zeros = _bisect(lo, hi, _hardy_z(lo) if lo.size else lo, workers)
    return np.sort(np.concatenate([zeros, grid[exact]]))


def _interval_ok(t_min: float, t_max: float, found: int) -> bool:
    if t_min <= FIRST_ZERO_FLOOR:
        main = float(riemann_siegel_theta(t_max)) / math.pi + 1.0
    else:
        main = float(riemann_siegel_theta(t_max) - riemann_siegel_theta(t_min)) / math.pi
    return abs(found - main) <= COUNT_SLACK


def find_zeros(t_min: float, t_max: float, *, step: float = 0.05, workers: int = 1) -> ZeroTable:
    """All zeros with ``t_min < gamma <= t_max``, each to within 1e-9.

    The grid is refined four-fold once if the count disagrees with the
    theta main term by more than the slack; a second failure raises
    :class:`MissedZeroError`.
    """
    if not (2.0 <= t_min < t_max <= COMPUTED_CEILING):
        raise DomainError(f"find_zeros needs 2 <= t_min < t_max <= {COMPUTED_CEILING:g}")
    if step > 0.05:
        raise DomainError("grid step must be <= 0.05")
    for attempt, h in enumerate((step, step / 4)):
        g = _search(t_min, t_max, h, workers)
        g = g[(g > t_min) & (g <= t_max)]
        if _interval_ok(t_min, t_max, g.size):
            break
        if attempt == 1:
            raise MissedZeroError(
                f"found {g.size} zeros in ({t_min:g}, {t_max:g}], inconsistent with theta main term"
            )
    return ZeroTable(g, t_max, "computed", BISECT_TOL, min_height=t_min)


# ---------------------------------------------------------------------------
# text tables

_HEADER = re.compile(r"#\s*zeta-zeros\s+v1\b(.*)")


def load_zero_table(path) -> ZeroTable:
    """Read a zero table: ``#`` header lines, then one ordinate per line, ascending."""
    path = Path(path)
    precision = DEFAULT_PRECISION
    height = None
    source = "imported"
    values: list[float] = []
    prev = -math.inf
    with path.open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                m = re.search(r"precision\s*=\s*(\S+)", line)
                if m:
                    try:
                        precision = float(m.group(1))
                    except ValueError:
                        raise ParseError(f"bad precision {m.group(1)!r}", lineno) from None
                h = _HEADER.match(line)
                if h:
                    kv = dict(re.findall(r"(\w+)=(\S+)", h.group(1)))
                    if "height" in kv:
                        height = float(kv["height"])
                    if kv.get("source") in SOURCES:
                        source = kv["source"]
                continue
            try:
                x = float(line)
            except ValueError:
                raise ParseError(f"not a number: {line!r}", lineno) from None
            if not math.isfinite(x):
                raise ParseError(f"non-finite ordinate {line!r}", lineno)
            if x <= prev:
                raise MonotonicityError(f"ordinate {x} does not exceed previous {prev}", lineno)
            values.append(x)
            prev = x
    if not values:
        raise EmptyTableError(f"{path}: no ordinates")
    if height is None or height < values[-1]:
        height = values[-1]
    return ZeroTable(np.array(values), height, source, precision)


def save_zero_table(table: ZeroTable, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    src = "computed" if table.source == "computed" else "imported"
    lines = [
        f"# zeta-zeros v1 count={len(table)} height={table.max_height!r} source={src}",
        f"# precision={table.precision_hint!r}",
    ]
    lines += [repr(float(x)) for x in table.ordinates]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def default_data_dir() -> Path:
    return Path(os.environ.get("ZGL_DATA_DIR", "zgl-data"))


def ensure_zeros(height: float, cache_dir=None, *, workers: int = 1) -> ZeroTable:
    """A table complete up to ``height``, from the cache or freshly computed and cached."""
    cache = Path(cache_dir) if cache_dir is not None else default_data_dir() / "cache"
    best = None
    if cache.is_dir():
        for f in sorted(cache.glob("zeros-*.txt")):
            try:
                t = load_zero_table(f)
            except (ParseError, EmptyTableError):
                continue
            if t.max_height >= height and (best is None or t.max_height < best.max_height):
                best = t
    if best is None:
        best = find_zeros(10.0, float(height), workers=workers)
        best = ZeroTable(best.ordinates, best.max_height, "computed", best.precision_hint)
        save_zero_table(best, cache / f"zeros-{int(math.ceil(height))}.txt")
    return best.truncate(height)
