"""Residual series, exponent fits and the experiment runners.

Each runner evaluates a residual on a grid of scales and fits
``log residual = slope * log scale + intercept``. A slope at or below the
cap (0.75 by default) is the desk-scale stand-in for a square-root bound
with logarithmic losses.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, NamedTuple

import numpy as np

from .arith import (
    Character,
    RationalPhase,
    VonMangoldtTable,
    character_group,
    character_sum_conj,
    euler_phi,
    gauss_identity_residual,
    gauss_sum,
    mobius,
)
from .bump import TestFunction
from .errors import DegenerateFitError, DomainError
from .special import TWO_PI, chi_asymptotic_1ms, chi_asymptotic_conj, chi_factor
from .sums import (
    char_sum_smooth,
    gonek_envelope,
    gonek_integral,
    gonek_main_term,
    plain_smooth,
    prime_sum_smooth,
    twisted_cheby,
    zero_sum_sharp,
    zero_sum_smooth,
)
from .zeros import ZeroTable

EXPERIMENTS = (
    "lemma23", "lemma24", "thm31", "cor32", "bound11", "lemma22", "gonek", "stirling", "gauss-check",
)
SLOPE_CAP = 0.75
FLOOR = 1e-300
MIN_FIT_POINTS = 5
PER_DECADE = 12


def log_grid(lo: float, hi: float, per_decade: int = PER_DECADE) -> np.ndarray:
    """Log-spaced grid from ``lo`` to ``hi`` inclusive, about ``per_decade`` points per decade."""
    if not 0 < lo < hi:
        raise DomainError(f"grid needs 0 < lo < hi, got {lo}, {hi}")
    n = max(2, math.ceil(per_decade * math.log10(hi / lo)) + 1)
    return np.geomspace(lo, hi, n)


def sqrt_log2(x):
    x = np.asarray(x, dtype=float)
    return np.sqrt(x) * np.log(x) ** 2


# ---------------------------------------------------------------------------
# fitting


class ExponentFit(NamedTuple):
    slope: float
    intercept: float
    normalized_slope: float  # slope after dividing out log^2(scale)
    floored: tuple[int, ...]  # indices whose residual was replaced by FLOOR


def fit_exponent(points: Sequence[tuple[float, float]]) -> ExponentFit:
    """Least squares on ``(log scale, log residual)``.

    Zero residuals are lifted to ``FLOOR`` and reported in ``floored``.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or len(pts) < MIN_FIT_POINTS:
        raise DegenerateFitError(f"need at least {MIN_FIT_POINTS} points to fit")
    s, r = pts[:, 0], pts[:, 1]
    if np.any(s <= 0) or np.any(np.diff(s) <= 0):
        raise DegenerateFitError("scales must be positive and strictly increasing")
    if np.any(r < 0):
        raise DegenerateFitError("residuals must be non-negative")
    low = r < FLOOR
    if np.all(low):
        raise DegenerateFitError("every residual is at the floor")
    r = np.where(low, FLOOR, r)
    ls, lr = np.log(s), np.log(r)
    slope, intercept = np.polyfit(ls, lr, 1)
    with np.errstate(divide="ignore"):
        norm = lr - 2.0 * np.log(np.abs(ls))
    nslope = np.polyfit(ls, norm, 1)[0] if np.all(np.isfinite(norm)) else float("nan")
    return ExponentFit(float(slope), float(intercept), float(nslope), tuple(int(i) for i in np.flatnonzero(low)))


# ---------------------------------------------------------------------------
# result type


@dataclass(frozen=True)
class ResidualSeries:
    experiment_id: str
    points: tuple[tuple[float, float], ...]
    fitted_slope: float | None
    fitted_intercept: float | None
    normalizer: str = "sqrt_log2"
    normalized_slope: float | None = None
    cap: float | None = SLOPE_CAP
    checks: dict[str, bool] = field(default_factory=dict)
    extras: dict[str, Any] = field(default_factory=dict)
    floored: tuple[int, ...] = ()

    def __post_init__(self):
        if self.experiment_id not in EXPERIMENTS:
            raise DomainError(f"unknown experiment {self.experiment_id!r}")
        scales = [p[0] for p in self.points]
        if any(b <= a for a, b in zip(scales, scales[1:])):
            raise DomainError("scales must be strictly increasing")
        if any(p[1] < 0 for p in self.points):
            raise DomainError("residuals must be non-negative")

    @property
    def scales(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def residuals(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])

    @property
    def normalized(self) -> np.ndarray:
        if self.normalizer == "sqrt_log2":
            return self.residuals / sqrt_log2(self.scales)
        return self.residuals

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def _series(experiment_id: str, scales, residuals, *, cap: float | None = SLOPE_CAP,
            normalizer: str = "sqrt_log2", checks: dict | None = None, extras: dict | None = None,
            fit: bool = True) -> ResidualSeries:
    points = tuple((float(s), float(r)) for s, r in zip(scales, residuals))
    checks = dict(checks or {})
    slope = intercept = nslope = None
    floored: tuple[int, ...] = ()
    if fit and len(points) >= MIN_FIT_POINTS:
        f = fit_exponent(points)
        slope, intercept, nslope, floored = f.slope, f.intercept, f.normalized_slope, f.floored
        if cap is not None:
            checks["slope_le_cap"] = slope <= cap
        if len(points) > MIN_FIT_POINTS:
            # diagnostic: how much the fit leans on its last point
            extras = dict(extras or {})
            extras["slope_without_last"] = fit_exponent(points[:-1]).slope
    return ResidualSeries(experiment_id, points, slope, intercept, normalizer, nslope,
                          cap if fit else None, checks, dict(extras or {}), floored)


def main_coefficient(xi: RationalPhase) -> float:
    """``mu(q) / phi(q)``."""
    return mobius(xi.q) / euler_phi(xi.q)


# ---------------------------------------------------------------------------
# runners


def run_thm31(xi: RationalPhase, T_grid, zeros: ZeroTable, lam: VonMangoldtTable, *,
              workers: int = 1, cap: float = SLOPE_CAP) -> ResidualSeries:
    """``|Sigma_1(T) + Sigma_2(T / 2 pi xi)|`` over ``T``."""
    T_grid = np.asarray(T_grid, dtype=float)
    zeros.require(T_grid[-1])
    lam.require(math.floor(T_grid[-1] / (TWO_PI * xi.value)))
    res, s1, s2 = [], [], []
    for T in T_grid:
        a = zero_sum_sharp(xi, T, zeros, workers=workers).value
        b = twisted_cheby(xi, T / (TWO_PI * xi.value), lam, workers=workers).value
        res.append(abs(a + b))
        s1.append(abs(a))
        s2.append(abs(b))
    # cancellation at the largest T: the residual is 10x below each sum on its own
    cancel = 10.0 * res[-1] <= min(s1[-1], s2[-1])
    extras = {"xi": str(xi), "sigma1_modulus": s1, "sigma2_modulus": s2}
    return _series("thm31", T_grid, res, cap=cap, checks={"cancellation": cancel}, extras=extras)


def run_cor32(xi, X_grid, B: TestFunction, zeros: ZeroTable, lam: VonMangoldtTable, *,
              workers: int = 1, cap: float = SLOPE_CAP) -> ResidualSeries:
    """``|zero_sum_smooth(per_cor_3_2) + prime_sum_smooth|`` over ``X``."""
    vals = [
        zero_sum_smooth(xi, X, "per_cor_3_2", B, zeros, workers=workers).value
        + prime_sum_smooth(xi, X, B, lam, workers=workers).value
        for X in X_grid
    ]
    extras = {"xi": str(xi), "values": [[v.real, v.imag] for v in vals]}
    return _series("cor32", X_grid, np.abs(vals), cap=cap, extras=extras)


def run_lemma24(xi: RationalPhase, X_grid, B: TestFunction, lam: VonMangoldtTable, *,
                workers: int = 1, cap: float = SLOPE_CAP) -> ResidualSeries:
    """``|prime_sum_smooth - (mu(q)/phi(q)) C_B X|``."""
    coef = main_coefficient(xi)
    vals = [prime_sum_smooth(xi, X, B, lam, workers=workers).value - coef * B.integral * X for X in X_grid]
    extras = {"xi": str(xi), "main_coefficient": coef, "values": [[v.real, v.imag] for v in vals]}
    return _series("lemma24", X_grid, np.abs(vals), cap=cap, extras=extras)


def run_bound11(xi: RationalPhase, X_grid, B: TestFunction, scale: str, zeros: ZeroTable,
                lam: VonMangoldtTable | None = None, *, workers: int = 1,
                cap: float = SLOPE_CAP, recombine_tol: float = 1e-8) -> ResidualSeries:
    """``|zero_sum_smooth + (mu(q)/phi(q)) C_B X|`` under either bump scaling.

    With ``per_cor_3_2`` and a von Mangoldt table, the value is also checked
    against ``cor32 - lemma24``, which equals it identically.
    """
    coef = main_coefficient(xi)
    vals = [zero_sum_smooth(xi, X, scale, B, zeros, workers=workers).value + coef * B.integral * X
            for X in X_grid]
    checks: dict[str, bool] = {}
    extras: dict[str, Any] = {"xi": str(xi), "scale": scale, "main_coefficient": coef,
                              "values": [[v.real, v.imag] for v in vals]}
    if scale == "per_eq_1_1":
        # B(gamma / 2 pi X) is the per_cor_3_2 window at X / xi, whose main term scales accordingly
        alt = [abs(v - coef * B.integral * X + coef * B.integral * X / xi.value) for v, X in zip(vals, X_grid)]
        extras["residual_main_over_xi"] = alt
        if len(alt) >= MIN_FIT_POINTS:
            extras["slope_main_over_xi"] = fit_exponent(list(zip(map(float, X_grid), alt))).slope
    if scale == "per_cor_3_2" and lam is not None:
        c32 = run_cor32(xi, X_grid, B, zeros, lam, workers=workers, cap=cap)
        l24 = run_lemma24(xi, X_grid, B, lam, workers=workers, cap=cap)
        c = np.array([complex(*v) for v in c32.extras["values"]])
        lv = np.array([complex(*v) for v in l24.extras["values"]])
        gap = np.abs(np.array(vals) - (c - lv))
        spread = np.abs(np.abs(vals) - np.abs(c))
        extras["recombination_gap"] = gap.tolist()
        checks["recombination"] = bool(np.all(gap <= recombine_tol * np.maximum(1.0, np.abs(c)))
                                       and np.all(spread <= recombine_tol + np.abs(lv)))
    return _series("bound11", X_grid, np.abs(vals), cap=cap, checks=checks, extras=extras)


def run_lemma23(X_grid, B: TestFunction, lam: VonMangoldtTable, *, workers: int = 1,
                cap: float = SLOPE_CAP, bound_constant: float = 4.0) -> ResidualSeries:
    """``|plain_smooth - C_B X|``, also checked pointwise against ``4 sqrt(X) log^2 X``."""
    X_grid = np.asarray(X_grid, dtype=float)
    res = np.array([abs(plain_smooth(X, B, lam, workers=workers).value - B.integral * X) for X in X_grid])
    within = bool(np.all(res <= bound_constant * sqrt_log2(X_grid)))
    return _series("lemma23", X_grid, res, cap=cap, checks={"pointwise_bound": within},
                   extras={"C_B": B.integral})


def run_lemma22(chi: Character, X_grid, B: TestFunction, lam: VonMangoldtTable, *,
                workers: int = 1, cap: float = SLOPE_CAP) -> ResidualSeries:
    """``|sum Lambda(n) chi(n) B(n/X)|`` for a primitive character."""
    if not chi.is_primitive:
        raise DomainError(f"{chi!r} is not primitive")
    res = [abs(char_sum_smooth(chi, X, B, lam, workers=workers).value) for X in X_grid]
    return _series("lemma22", X_grid, res, cap=cap,
                   extras={"modulus": chi.modulus, "index": list(chi.index)})


def run_stirling_scan(t_grid, sigmas=(-1.0, 0.0, 0.5, 1.0, 2.0), *, limit: float = 10.0) -> ResidualSeries:
    """``max_sigma t |exact / asymptotic - 1|`` for both chi(1-s) and chi(conj s)."""
    t = np.asarray(t_grid, dtype=float)
    worst = np.zeros_like(t)
    for sigma in sigmas:
        s = sigma + 1j * t
        a = np.abs(chi_factor(1.0 - s) / chi_asymptotic_1ms(s) - 1.0)
        b = np.abs(chi_factor(np.conj(s)) / chi_asymptotic_conj(s) - 1.0)
        worst = np.maximum(worst, t * np.maximum(a, b))
    return _series("stirling", t, worst, cap=None, normalizer="none",
                   checks={"within_limit": bool(np.all(worst <= limit))},
                   extras={"sigmas": list(sigmas), "limit": limit})


def run_gonek_scan(r: float = 2.0, c: float = 1.0, T_grid=(50.0, 100.0, 200.0, 400.0), *,
                   second_r: float = 100.0, second_T: float = 100.0) -> ResidualSeries:
    """``|I(r, c, T) - e(-r)|`` across ``T``.

    The envelope constant is calibrated on the smallest ``T`` only; each later
    point must either not increase or stay inside ``K * envelope(T)``.
    """
    T_grid = [float(T) for T in T_grid]
    vals = [gonek_integral(r, c, T) for T in T_grid]
    err = [abs(v.value - gonek_main_term(r, T)) for v, T in zip(vals, T_grid)]
    env = [gonek_envelope(r, c, T) for T in T_grid]
    K = err[0] / env[0]
    ok = all(e1 <= e0 or e1 <= K * v for e0, e1, v in zip(err, err[1:], env[1:]))
    first = abs(gonek_integral(r, c, second_T).value)
    second = abs(gonek_integral(second_r, c, second_T).value)
    checks = {"within_envelope": ok, "second_case_small": 10.0 * second <= first}
    extras = {"r": r, "c": c, "envelope_constant": K, "envelope": env,
              "quadrature_error": [v.error_estimate for v in vals],
              "first_case_modulus": first, "second_case_modulus": second}
    return _series("gonek", T_grid, err, cap=None, normalizer="none", checks=checks,
                   extras=extras, fit=False)


def run_gauss_check(qmax: int = 50, orth_qmax: int = 200, tol: float = 1e-10) -> ResidualSeries:
    """Worst identity residual per modulus over primitive characters, plus orthogonality."""
    scales, worst = [], []
    for q in range(3, qmax + 1):
        prim = character_group(q).primitive()
        if not prim:
            continue
        w = 0.0
        for chi in prim:
            tau = gauss_sum(chi)
            w = max(w, max(gauss_identity_residual(chi, n, tau) for n in range(q)))
        scales.append(q)
        worst.append(w)
    orth = 0.0
    for q in range(2, orth_qmax + 1):
        for chi in character_group(q):
            if not chi.is_principal:
                orth = max(orth, abs(character_sum_conj(chi)))
    checks = {"identity": max(worst) <= tol, "orthogonality": orth <= tol}
    return _series("gauss-check", scales, worst, cap=None, normalizer="none", checks=checks,
                   extras={"orthogonality_max": orth, "qmax": qmax, "orth_qmax": orth_qmax}, fit=False)


# ---------------------------------------------------------------------------
# persistence


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.bool_,)):
        return bool(o)
    raise TypeError(f"not serialisable: {type(o)}")


def series_csv(series: ResidualSeries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["scale", "residual", "normalized_residual"])
    for (s, r), n in zip(series.points, series.normalized):
        w.writerow([repr(float(s)), repr(float(r)), repr(float(n))])
    return buf.getvalue()


def series_json(series: ResidualSeries, config: dict) -> str:
    payload = asdict(series)
    payload["points"] = [list(p) for p in series.points]
    payload["checks"] = {k: bool(v) for k, v in series.checks.items()}
    payload["passed"] = series.passed
    payload["config"] = config
    payload["config_hash"] = config_hash(config)
    return json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n"


def write_series(series: ResidualSeries, config: dict, out_dir) -> tuple[Path, Path]:
    """Write ``<id>-<hash>.csv`` and ``.json``; identical inputs give identical bytes."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{series.experiment_id}-{config_hash(config)}"
    csv_path, json_path = out / f"{stem}.csv", out / f"{stem}.json"
    csv_path.write_text(series_csv(series), encoding="utf-8")
    json_path.write_text(series_json(series, config), encoding="utf-8")
    return csv_path, json_path
