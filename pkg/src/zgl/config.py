"""Flat ``key=value`` experiment configuration and the run orchestration.

Config files are UTF-8, one ``key=value`` per line, ``#`` starts a comment.
Keys use dots (``bump.kind``); each maps to an :class:`ExperimentConfig`
field with the dot replaced by an underscore.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .arith import RationalPhase, character_group, sieve_von_mangoldt
from .bump import make_bump
from .errors import ConfigError, CoverageError, DomainError
from .experiments import (
    EXPERIMENTS,
    ResidualSeries,
    log_grid,
    run_bound11,
    run_cor32,
    run_gauss_check,
    run_gonek_scan,
    run_lemma22,
    run_lemma23,
    run_lemma24,
    run_stirling_scan,
    run_thm31,
)
from .sums import SCALES, zero_window
from .zeros import COMPUTED_CEILING, default_data_dir, ensure_zeros, find_zeros, load_zero_table

ZERO_SOURCES = ("cache", "compute", "import")

# (lo, hi) used when grid.lo / grid.hi are not given
DEFAULT_GRIDS = {
    "thm31": (100.0, 1e4),
    "cor32": (400.0, 2e4),
    "bound11": (400.0, 2e4),
    "lemma23": (100.0, 1e5),
    "lemma24": (100.0, 1e5),
    "lemma22": (100.0, 1e5),
    "stirling": (10.0, 1e5),
}
# per_eq_1_1 windows reach 4 pi X, so its default grid stops where computed zeros end
EQ11_DEFAULT_HI = 6000.0


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


@dataclass(frozen=True)
class ExperimentConfig:
    experiment_id: str
    xi: str = "1/3"
    m: int | None = None
    q: int | None = None
    bump_kind: str = "canonical_mollifier"
    bump_lo: float = 1.0
    bump_hi: float = 2.0
    grid_lo: float | None = None
    grid_hi: float | None = None
    grid_per_decade: int = 12
    scale: str = "per_cor_3_2"
    zeros_source: str = "cache"
    zeros_path: str | None = None
    lambda_limit: int | None = None
    out: str | None = None
    workers: int = 1
    cap: float = 0.75
    chi_q: int = 3
    chi_index: int = 0
    qmax: int = 50
    orth_qmax: int = 200
    gonek_r: float = 2.0
    gonek_c: float = 1.0
    gonek_T: tuple[float, ...] = (50.0, 100.0, 200.0, 400.0)
    sigmas: tuple[float, ...] = (-1.0, 0.0, 0.5, 1.0, 2.0)

    def __post_init__(self):
        if self.experiment_id not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment_id!r}; choose from {', '.join(EXPERIMENTS)}")
        if self.scale not in SCALES:
            raise ConfigError(f"scale must be one of {SCALES}")
        if self.zeros_source not in ZERO_SOURCES:
            raise ConfigError(f"zeros.source must be one of {ZERO_SOURCES}")
        if self.zeros_source == "import" and not self.zeros_path:
            raise ConfigError("zeros.source=import needs zeros.path")
        if self.grid_lo is not None and self.grid_hi is not None and not self.grid_lo < self.grid_hi:
            raise ConfigError("grid.lo must be below grid.hi")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        try:
            self.phase
        except DomainError as exc:
            raise ConfigError(str(exc)) from None

    # -- key handling -------------------------------------------------------

    @classmethod
    def keys(cls) -> list[str]:
        return [f.name.replace("_", ".", 1) if f.name not in _UNDOTTED else f.name
                for f in fields(cls) if f.name != "experiment_id"]

    @classmethod
    def from_mapping(cls, experiment_id: str, values: dict[str, str]) -> ExperimentConfig:
        kwargs = {}
        by_key = {k: f for k, f in zip(cls.keys(), [f for f in fields(cls) if f.name != "experiment_id"])}
        for key, text in values.items():
            f = by_key.get(key)
            if f is None:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[f.name] = _convert(key, f.name, text)
        return cls(experiment_id, **kwargs)

    # -- resolved values ----------------------------------------------------

    @property
    def phase(self) -> RationalPhase:
        if self.m is not None or self.q is not None:
            if self.m is None or self.q is None:
                raise ConfigError("set both m and q, or neither")
            return RationalPhase(self.m, self.q)
        return RationalPhase.parse(self.xi)

    def grid(self):
        lo, hi = DEFAULT_GRIDS[self.experiment_id]
        if self.experiment_id in ("cor32", "bound11"):
            floor = 100.0 / self.phase.value
            if lo <= floor:
                # a quarter of a grid step above the X > 100/xi floor
                lo = floor * 10 ** (0.25 / self.grid_per_decade)
            if self.experiment_id == "bound11" and self.scale == "per_eq_1_1":
                hi = EQ11_DEFAULT_HI
        lo = self.grid_lo if self.grid_lo is not None else lo
        hi = self.grid_hi if self.grid_hi is not None else hi
        if not lo < hi:
            raise ConfigError(f"empty grid [{lo}, {hi}]")
        return log_grid(lo, hi, self.grid_per_decade)

    def bump(self):
        try:
            return make_bump(self.bump_kind, self.bump_lo, self.bump_hi)
        except DomainError as exc:
            raise ConfigError(str(exc)) from None

    def zero_height(self) -> float | None:
        e = self.experiment_id
        if e == "thm31":
            return float(self.grid()[-1])
        if e in ("cor32", "bound11"):
            scale = "per_cor_3_2" if e == "cor32" else self.scale
            return zero_window(self.phase, float(self.grid()[-1]), scale, self.bump())[2]
        return None

    def lambda_height(self) -> int | None:
        e = self.experiment_id
        if e == "thm31":
            return math.floor(self.grid()[-1] / (2 * math.pi * self.phase.value))
        if e in ("cor32", "bound11", "lemma23", "lemma24", "lemma22"):
            if e == "bound11" and self.scale != "per_cor_3_2":
                return None
            return math.floor(self.grid()[-1] * self.bump().support_hi)
        return None

    def as_dict(self) -> dict:
        """Every setting that affects results (not ``out`` or ``workers``)."""
        d = asdict(self)
        d.pop("out")
        d.pop("workers")
        d["gonek_T"] = list(self.gonek_T)
        d["sigmas"] = list(self.sigmas)
        return d

    def output_dir(self) -> Path:
        return Path(self.out) if self.out else default_data_dir() / "results"


_UNDOTTED = {"xi", "m", "q", "scale", "out", "workers", "cap", "qmax", "orth_qmax", "sigmas"}
_INT_FIELDS = {"m", "q", "grid_per_decade", "lambda_limit", "workers", "chi_q", "chi_index", "qmax", "orth_qmax"}
_FLOAT_FIELDS = {"bump_lo", "bump_hi", "grid_lo", "grid_hi", "cap", "gonek_r", "gonek_c"}
_TUPLE_FIELDS = {"gonek_T", "sigmas"}


def _convert(key: str, name: str, text: str):
    text = text.strip()
    try:
        if name in _INT_FIELDS:
            v = float(text)
            if not v.is_integer():
                raise ValueError
            return int(v)
        if name in _FLOAT_FIELDS:
            return float(text)
        if name in _TUPLE_FIELDS:
            return _floats(text)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {text!r}") from None
    return text


def parse_config_text(text: str, source: str = "<config>") -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"{source} line {lineno}: expected key=value")
        values[key.strip()] = value.strip()
    return values


def parse_overrides(items) -> dict[str, str]:
    values: dict[str, str] = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--set expects key=value, got {item!r}")
        values[key.strip()] = value.strip()
    return values


def load_config(experiment_id: str, path=None, overrides=None) -> ExperimentConfig:
    values: dict[str, str] = {}
    if path is not None:
        p = Path(path)
        try:
            text = p.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {p}: {exc.strerror}") from None
        values.update(parse_config_text(text, str(p)))
    values.update(overrides or {})
    return ExperimentConfig.from_mapping(experiment_id, values)


# ---------------------------------------------------------------------------
# orchestration


def _zeros(cfg: ExperimentConfig, height: float):
    if cfg.zeros_source == "import":
        return load_zero_table(cfg.zeros_path)
    if height > COMPUTED_CEILING:
        raise CoverageError(
            f"need zeros up to gamma = {height:.6g}, above the computed ceiling "
            f"{COMPUTED_CEILING:g}; import a table with zeros.source=import"
        )
    if cfg.zeros_source == "compute":
        return find_zeros(10.0, height, workers=cfg.workers)
    cache = Path(cfg.zeros_path) if cfg.zeros_path else None
    return ensure_zeros(height, cache, workers=cfg.workers)


def _lambda(cfg: ExperimentConfig):
    need = cfg.lambda_height()
    if need is None:
        return None
    return sieve_von_mangoldt(max(2, cfg.lambda_limit if cfg.lambda_limit is not None else need))


def run_from_config(cfg: ExperimentConfig) -> ResidualSeries:
    e, w = cfg.experiment_id, cfg.workers
    if e == "gauss-check":
        return run_gauss_check(cfg.qmax, cfg.orth_qmax)
    if e == "gonek":
        return run_gonek_scan(cfg.gonek_r, cfg.gonek_c, cfg.gonek_T)
    grid = cfg.grid()
    if e == "stirling":
        return run_stirling_scan(grid, cfg.sigmas)
    B = cfg.bump()
    lam = _lambda(cfg)
    height = cfg.zero_height()
    zeros = _zeros(cfg, height) if height is not None else None
    if e == "thm31":
        return run_thm31(cfg.phase, grid, zeros, lam, workers=w, cap=cfg.cap)
    if e == "cor32":
        return run_cor32(cfg.phase, grid, B, zeros, lam, workers=w, cap=cfg.cap)
    if e == "bound11":
        return run_bound11(cfg.phase, grid, B, cfg.scale, zeros, lam, workers=w, cap=cfg.cap)
    if e == "lemma23":
        return run_lemma23(grid, B, lam, workers=w, cap=cfg.cap)
    if e == "lemma24":
        return run_lemma24(cfg.phase, grid, B, lam, workers=w, cap=cfg.cap)
    if e == "lemma22":
        try:
            prim = character_group(cfg.chi_q).primitive()
            chi = prim[cfg.chi_index]
        except IndexError:
            raise ConfigError(f"no primitive character #{cfg.chi_index} mod {cfg.chi_q}") from None
        return run_lemma22(chi, grid, B, lam, workers=w, cap=cfg.cap)
    raise ConfigError(f"unknown experiment {e!r}")  # pragma: no cover
