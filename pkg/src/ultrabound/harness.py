"""Sweep orchestration: configuration, column-wise evaluation of |Y| and
|X| against the envelopes, empirical constants, report emission, the
projection-kernel identity, and the decay-constant fit.

A sweep is split into independent tasks, one per (d, m) column: a single
recurrence in l evaluates every pair of the column on the shared x-grid,
so the cost is one table per column instead of one recurrence per pair.
Results are merged in a fixed order, which makes the report independent
of the worker count.
"""

from __future__ import annotations

import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Optional

import numpy as np

from .envelopes import (
    RegimeParams,
    is_bessel,
    is_hermite,
    log_bessel_envelope_array,
    log_exp_small_y_array,
    log_hermite_envelope_array,
    log_hermite_main_array,
    log_universal_array,
)
from .errors import ConfigError
from .halfint import HalfInt, IndexPair, harmonic_dim, require_I_d, sphere_measure, transition_points
from .ultra import eval_X_array, y_table

CSV_HEADER = "two_ell,two_m,d,x,Y,X,envelope,ratio,regime"

DEFAULT_TOLERANCES = {
    # every per-pair sup ratio must stay below this
    "ratio_max": 100.0,
    # constant at ell_max may exceed the constant at ell_max/2 by this factor
    "stability": 1.1,
    # the stability suite is only asserted when ell_max reaches this value
    "stability_min_ell": 40.0,
    # decay fit: allowed growth of C(c) from ell_max/2 to ell_max
    "decay_growth": 0.1,
}

# empirical constants measured by a sweep
CONSTANT_KINDS = ("C_H", "C_H_main", "C_B", "C_exp", "C_univ", "C_univ_literal")
# constants whose stability under range doubling is asserted
STABILITY_KINDS = ("C_H_main", "C_B", "C_exp", "C_univ")


@dataclass
class SweepConfig:
    d_list: list = field(default_factory=lambda: [2])
    ell_max: HalfInt = field(default_factory=lambda: HalfInt.of(20))
    x_grid_size: int = 201
    epsilon: float = 0.5
    K: float = 2.0
    c: float = 0.05
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    parallelism: int = 1
    output_path: Optional[str] = None
    output_format: str = "json"
    # add {+-a, +-xbar, 0} of each pair to the shared grid
    extra_points: bool = True
    fit_c: bool = True

    def __post_init__(self):
        self.ell_max = HalfInt.of(self.ell_max)
        self.d_list = [int(d) for d in self.d_list]
        tol = dict(DEFAULT_TOLERANCES)
        tol.update({k: float(v) for k, v in self.tolerances.items()})
        self.tolerances = tol
        self.validate()

    def validate(self) -> None:
        if not self.d_list or any(d < 2 for d in self.d_list):
            raise ConfigError(f"d_list must be non-empty with every d >= 2, got {self.d_list}")
        if self.ell_max.twice < 0:
            raise ConfigError("ell_max must be >= 0")
        if self.x_grid_size < 3 or self.x_grid_size % 2 == 0:
            raise ConfigError(f"x_grid_size must be odd and >= 3, got {self.x_grid_size}")
        try:
            self.regime_params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if any(not v > 0 for v in self.tolerances.values()):
            raise ConfigError("tolerances must be positive")
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"unknown tolerances {sorted(unknown)}")
        if self.parallelism < 1:
            raise ConfigError("parallelism must be >= 1")
        if self.output_format not in ("csv", "json"):
            raise ConfigError(f"output_format must be csv or json, got {self.output_format!r}")

    def regime_params(self) -> RegimeParams:
        return RegimeParams(epsilon=self.epsilon, c=self.c, K=self.K)

    def echo(self) -> dict:
        """Configuration as reported; execution-only settings (worker
        count, output location) are left out so reports compare equal."""
        return {
            "d_list": list(self.d_list),
            "ell_max": str(self.ell_max),
            "x_grid_size": self.x_grid_size,
            "epsilon": self.epsilon,
            "K": self.K,
            "c": self.c,
            "tolerances": {k: self.tolerances[k] for k in sorted(self.tolerances)},
            "output_format": self.output_format,
            "extra_points": self.extra_points,
            "fit_c": self.fit_c,
        }

    @classmethod
    def from_mapping(cls, values: dict) -> "SweepConfig":
        """Build from string values (config file or CLI); unknown keys are errors."""
        names = {f.name for f in fields(cls)}
        kw: dict = {}
        tolerances: dict = {}
        for key, raw in values.items():
            key = key.strip().replace("-", "_")
            raw = str(raw).strip()
            try:
                if key.startswith("tol.") or key.startswith("tolerances."):
                    tolerances[key.split(".", 1)[1]] = float(raw)
                elif key not in names or key == "tolerances":
                    raise ConfigError(f"unknown configuration key {key!r}")
                elif key == "d_list":
                    kw[key] = [int(t) for t in raw.replace(" ", ",").split(",") if t]
                elif key == "ell_max":
                    kw[key] = HalfInt.of(raw)
                elif key in ("x_grid_size", "parallelism"):
                    kw[key] = int(raw)
                elif key in ("epsilon", "K", "c"):
                    kw[key] = float(raw)
                elif key in ("extra_points", "fit_c"):
                    if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                        raise ConfigError(f"{key} must be a boolean, got {raw!r}")
                    kw[key] = raw.lower() in ("true", "1", "yes")
                elif key == "output_path":
                    kw[key] = raw or None
                else:
                    kw[key] = raw
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from None
        if tolerances:
            kw["tolerances"] = tolerances
        try:
            return cls(**kw)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from None


def parse_config_file(path) -> dict:
    """Read `key = value` lines; blank lines and `#` comments are ignored."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def chebyshev_grid(n: int) -> np.ndarray:
    """n Chebyshev-Lobatto points on [-1, 1], ascending, exactly symmetric,
    containing 0 and +-1 (n odd, n >= 3)."""
    if n < 3 or n % 2 == 0:
        raise ConfigError(f"grid size must be odd and >= 3, got {n}")
    k = np.arange(n)
    x = np.sin(np.pi * (2 * k - (n - 1)) / (2 * (n - 1)))
    x[(n - 1) // 2] = 0.0
    x[0], x[-1] = -1.0, 1.0
    return x


def pair_extra_points(p: IndexPair) -> np.ndarray:
    td = transition_points(p)
    pts = [0.0, td.a, -td.a]
    if td.xbar is not None:
        pts += [td.xbar, -td.xbar]
    return np.array(pts)


# ---------------------------------------------------------------------------
# column worker

@dataclass(frozen=True)
class ColumnTask:
    d: int
    two_m: int
    two_ell_top: int
    grid: np.ndarray
    rp: RegimeParams
    extra_points: bool
    kinds: tuple
    want_rows: bool
    want_decay: bool


@dataclass
class PairResult:
    two_ell: int
    two_m: int
    d: int
    regime: str
    sup_ratio: float
    argmax_x: float
    # kind -> (max ratio, x at the max)
    constants: dict


@dataclass
class ColumnResult:
    pairs: list
    rows: list
    # (log|Y|, log|x|, log(1-x^2), l) over the decay region
    decay: Optional[tuple]


def _ratio(log_num: np.ndarray, log_env: np.ndarray) -> np.ndarray:
    """exp(log_num - log_env), with 0 wherever the numerator vanishes."""
    with np.errstate(invalid="ignore", over="ignore"):
        r = np.exp(log_num - log_env)
    return np.where(log_num == -np.inf, 0.0, r)


def _fmt(v: float) -> str:
    return repr(float(v)) if math.isfinite(v) else ("inf" if v > 0 else ("-inf" if v < 0 else "nan"))


def _fmt17(v: float) -> str:
    v = float(v)
    if not math.isfinite(v):
        return _fmt(v)
    return f"{v:.17g}"


def run_column(task: ColumnTask) -> ColumnResult:
    d, two_m, rp = task.d, task.two_m, task.rp
    m = HalfInt(two_m)
    grid = task.grid
    two_ells = list(range(two_m + 1, task.two_ell_top + 1, 2))
    if not two_ells:
        return ColumnResult([], [], None)
    pairs = [IndexPair.from_twice(te, two_m) for te in two_ells]
    extras = {}
    if task.extra_points:
        for p in pairs:
            extras[p] = pair_extra_points(p)
        x_all = np.unique(np.concatenate([grid] + list(extras.values())))
    else:
        x_all = grid
    shift = -(d - 2) / 4
    _, sign, log_x_abs = y_table(m, HalfInt(task.two_ell_top), x_all, power_shift=shift, log=True)
    omx2 = (1.0 - x_all) * (1.0 + x_all)
    with np.errstate(divide="ignore"):
        log_omx2 = np.log(omx2)
    log_w = (d - 2) / 4 * log_omx2 if d > 2 else np.zeros_like(x_all)

    grid_idx = np.searchsorted(x_all, grid)
    out_pairs, rows = [], []
    decay_parts = []
    for k, p in enumerate(pairs):
        if task.extra_points:
            idx = np.searchsorted(x_all, np.unique(np.concatenate([grid, extras[p]])))
        else:
            idx = grid_idx
        x = x_all[idx]
        lX = log_x_abs[k, idx]
        lY = lX + log_w[idx]
        hermite = is_hermite(p, rp.epsilon)
        bessel = is_bessel(p, rp.epsilon)
        regime = "hermite" if hermite else "bessel"
        logs_env = {}
        if hermite:
            logs_env["C_H"] = (lX, log_hermite_envelope_array(d, p, x, rp))
            if "C_H_main" in task.kinds:
                logs_env["C_H_main"] = (lX, log_hermite_main_array(p, x))
        if bessel:
            logs_env["C_B"] = (lX, log_bessel_envelope_array(d, p, x, rp))
            if "C_exp" in task.kinds:
                logs_env["C_exp"] = (lY, log_exp_small_y_array(p, x))
        if "C_univ" in task.kinds:
            logs_env["C_univ"] = (lY, log_universal_array(p, x))
        if "C_univ_literal" in task.kinds:
            logs_env["C_univ_literal"] = (lY, log_universal_array(p, x, literal=True))
        constants = {}
        main_kind = "C_H" if hermite else "C_B"
        main_ratio = main_env = None
        for kind, (num, env) in logs_env.items():
            r = _ratio(num, env)
            j = int(np.argmax(r))  # first maximum: smallest x
            if kind == main_kind:
                main_ratio, main_env = r, env
                sup, arg = float(r[j]), float(x[j])
            if kind in task.kinds:
                constants[kind] = (float(r[j]), float(x[j]))
        out_pairs.append(PairResult(p.ell.twice, two_m, d, regime, sup, arg, constants))
        if task.want_rows:
            s = sign[k, idx]
            with np.errstate(over="ignore"):
                Xv = s * np.exp(lX)
                Yv = s * np.exp(lY)
                env_v = np.exp(main_env)
            te = p.ell.twice
            for i in range(x.size):
                rows.append(f"{te},{two_m},{d},{_fmt17(x[i])},{_fmt17(Yv[i])},{_fmt17(Xv[i])},"
                            f"{_fmt17(env_v[i])},{_fmt17(main_ratio[i])},{regime}")
        if task.want_decay and hermite:
            a = transition_points(p).a
            ax = np.abs(x)
            sel = (ax >= rp.K * a) & (ax < 1.0) & (ax > 0.0) & (lY > -np.inf)
            if np.any(sel):
                decay_parts.append((lY[sel], np.log(ax[sel]), log_omx2[idx][sel],
                                    np.full(int(sel.sum()), float(p.ell))))
    decay = None
    if decay_parts:
        decay = tuple(np.concatenate([part[i] for part in decay_parts]) for i in range(4))
    return ColumnResult(out_pairs, rows, decay)


def _column_tasks(d: int, ell_max: HalfInt, grid: np.ndarray, rp: RegimeParams, extra_points: bool,
                  kinds: tuple, want_rows: bool, want_decay: bool, hermite_only: bool = False) -> list:
    tasks = []
    top = ell_max.twice
    # l in N + (d-1)/2 -> the largest admissible 2l not above 2*ell_max
    if (top - (d - 1)) % 2:
        top -= 1
    for two_m in range(d - 2, top, 2):
        two_top = top
        if hermite_only:
            # m >= eps l  <=>  2l <= 2m / eps
            lim = int(math.floor(two_m / rp.epsilon + 1e-12))
            lim -= (lim - two_m - 1) % 2
            two_top = min(top, lim)
            if two_top <= two_m:
                continue
        tasks.append(ColumnTask(d, two_m, two_top, grid, rp, extra_points, kinds, want_rows, want_decay))
    return tasks


def _run_tasks(tasks: list, parallelism: int) -> list:
    if parallelism <= 1 or len(tasks) <= 1:
        return [run_column(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(run_column, tasks, chunksize=1))


# ---------------------------------------------------------------------------
# decay-constant fit

@dataclass
class DecayFit:
    status: str  # "ok", "empty-region", "short-range", "not-found"
    c: Optional[float]
    C: Optional[float]
    d: int
    ell_max: float
    epsilon: float
    K: float
    n_pairs: int
    n_points: int
    monotone: Optional[bool]

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _fit_from_data(decay: Optional[tuple], n_pairs: int, d: int, ell_max: float, epsilon: float,
                   K: float, growth: float, c_floor: float = 1e-6) -> DecayFit:
    def result(status, c=None, C=None, n_points=0, monotone=None):
        return DecayFit(status, c, C, d, ell_max, epsilon, K, n_pairs, n_points, monotone)

    if decay is None or decay[0].size == 0:
        return result("empty-region")
    lY, lx, lw, ell = decay
    half = ell <= ell_max / 2
    if not np.any(half):
        return result("short-range", n_points=lY.size)
    m0 = (d - 2) / 2
    base = lY + 0.5 * lx

    def log_C(c, mask=None):
        v = base - np.maximum(c * epsilon * ell, m0) / 2 * lw
        return float(np.max(v if mask is None else v[mask]))

    slack = math.log1p(growth)

    def holds(c):
        return log_C(c) <= log_C(c, half) + slack

    if not holds(c_floor):
        return result("not-found", c=0.0, n_points=lY.size)
    lo, hi = c_floor, 1.0
    if holds(hi - 1e-12):
        lo = hi - 1e-12
    else:
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if holds(mid):
                lo = mid
            else:
                hi = mid
    monotone = all(holds(lo * k / 8) for k in range(1, 8))
    return result("ok", c=lo, C=math.exp(log_C(lo)), n_points=lY.size, monotone=monotone)


def fit_decay_constant(d: int, ell_max, epsilon: float = 0.5, K: float = 2.0,
                       grid_size: int = 2001, growth: float = DEFAULT_TOLERANCES["decay_growth"],
                       parallelism: int = 1) -> DecayFit:
    """Largest c in (0,1) such that the constant of

        |Y| <= C |x|^{-1/2} (1-x^2)^{max(c eps l, (d-2)/2)/2},  K a <= |x| < 1, m >= eps l,

    measured over l <= ell_max, exceeds the one measured over
    l <= ell_max/2 by at most the factor 1 + growth (bisection on c).
    """
    ell_max = HalfInt.of(ell_max)
    rp = RegimeParams(epsilon=epsilon, c=0.5, K=K)
    grid = chebyshev_grid(grid_size)
    tasks = _column_tasks(d, ell_max, grid, rp, False, (), False, True, hermite_only=True)
    results = _run_tasks(tasks, parallelism)
    parts = [r.decay for r in results if r.decay is not None]
    n_pairs = sum(1 for r in results for pr in r.pairs if pr.regime == "hermite")
    decay = tuple(np.concatenate([p[i] for p in parts]) for i in range(4)) if parts else None
    return _fit_from_data(decay, n_pairs, d, float(ell_max), epsilon, K, growth)


# ---------------------------------------------------------------------------
# projection-kernel identity

def projection_lhs(d: int, ell, x) -> np.ndarray:
    """sum over m in N_{d-1}, m < l of X^2_{l,m}(x) dim H^m(S^{d-1}) / sigma_{d-1}."""
    ell = HalfInt.of(ell)
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    s = sphere_measure(d - 1)
    for two_m in range(d - 2, ell.twice, 2):
        p = IndexPair(ell, HalfInt(two_m))
        total = total + eval_X_array(d, p, x) ** 2 * (harmonic_dim(d - 1, p.m) / s)
    return total


def projection_rhs(d: int, ell) -> float:
    return harmonic_dim(d, HalfInt.of(ell)) / sphere_measure(d)


def projection_identity_check(d: int, ell, x: float) -> tuple[float, float]:
    ell = HalfInt.of(ell)
    require_I_d(IndexPair(ell, HalfInt(d - 2)), d)
    return float(projection_lhs(d, ell, np.array([x]))[0]), projection_rhs(d, ell)


# ---------------------------------------------------------------------------
# sweep

@dataclass
class SuiteResult:
    name: str
    passed: bool
    metrics: dict = field(default_factory=dict)
    message: str = ""

    def to_dict(self) -> dict:
        return {"passed": self.passed, "metrics": _jsonable(self.metrics), "message": self.message}


@dataclass
class SweepReport:
    config: dict
    per_pair: list
    global_: dict
    suites: dict
    wall_time_ms: float
    rows: list = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites.values())

    def failing(self) -> list:
        return [name for name, s in self.suites.items() if not s.passed]

    def to_dict(self, wall_time: bool = True) -> dict:
        out = {
            "config": self.config,
            "per_pair": self.per_pair,
            "global": self.global_,
            "suites": {k: self.suites[k].to_dict() for k in self.suites},
        }
        if wall_time:
            out["wall_time_ms"] = self.wall_time_ms
        return out

    def to_json(self, wall_time: bool = True) -> str:
        return json.dumps(_jsonable(self.to_dict(wall_time)), indent=2, allow_nan=False) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO(newline="")
        buf.write(CSV_HEADER + "\n")
        for r in self.rows:
            buf.write(r + "\n")
        return buf.getvalue()


def _jsonable(obj):
    """Non-finite floats become null; tuples become lists."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _reduce_constants(pairs: list, ell_limit: Optional[float] = None) -> dict:
    """Max of each constant over pairs (tie-break: smallest x, then pair order)."""
    best: dict = {}
    for pr in pairs:
        if ell_limit is not None and pr.two_ell / 2 > ell_limit:
            continue
        for kind, (v, x) in pr.constants.items():
            cur = best.get(kind)
            if cur is None or v > cur["value"] or (v == cur["value"] and x < cur["x"]):
                best[kind] = {"value": v, "two_ell": pr.two_ell, "two_m": pr.two_m, "x": x}
    return {k: best.get(k) for k in CONSTANT_KINDS}


def run_sweep(cfg: SweepConfig) -> SweepReport:
    t0 = time.perf_counter()
    rp = cfg.regime_params()
    grid = chebyshev_grid(cfg.x_grid_size)
    want_rows = cfg.output_format == "csv"
    all_tasks = []
    for d in cfg.d_list:
        all_tasks += _column_tasks(d, cfg.ell_max, grid, rp, cfg.extra_points, CONSTANT_KINDS,
                                   want_rows, cfg.fit_c)
    results = _run_tasks(all_tasks, cfg.parallelism)

    per_pair_results = {d: [] for d in cfg.d_list}
    decay_parts = {d: [] for d in cfg.d_list}
    rows = []
    for task, res in zip(all_tasks, results):
        per_pair_results[task.d] += res.pairs
        rows += res.rows
        if res.decay is not None:
            decay_parts[task.d].append(res.decay)

    per_pair = []
    global_ = {}
    ell_max = float(cfg.ell_max)
    tol = cfg.tolerances
    finite_ok, worst = True, None
    stab_metrics = {}
    stab_ok = True
    stab_asserted = ell_max >= tol["stability_min_ell"]
    for d in cfg.d_list:
        prs = sorted(per_pair_results[d], key=lambda r: (r.two_ell, r.two_m))
        for pr in prs:
            per_pair.append({"two_ell": pr.two_ell, "two_m": pr.two_m, "d": pr.d, "regime": pr.regime,
                             "sup_ratio": pr.sup_ratio, "argmax_x": pr.argmax_x})
            if not (math.isfinite(pr.sup_ratio) and pr.sup_ratio <= tol["ratio_max"]):
                finite_ok = False
            if worst is None or pr.sup_ratio > worst["sup_ratio"]:
                worst = per_pair[-1]
        full = _reduce_constants(prs)
        half = _reduce_constants(prs, ell_max / 2)
        entry = {"grid_size": cfg.x_grid_size, "n_pairs": len(prs), "constants": full,
                 "constants_half_range": half}
        if cfg.fit_c:
            parts = decay_parts[d]
            decay = tuple(np.concatenate([p[i] for p in parts]) for i in range(4)) if parts else None
            n_herm = sum(1 for pr in prs if pr.regime == "hermite")
            fit = _fit_from_data(decay, n_herm, d, ell_max, cfg.epsilon, cfg.K, tol["decay_growth"])
            entry["fitted_c"] = fit.to_dict()
        global_[str(d)] = entry
        for kind in STABILITY_KINDS:
            f, h = full[kind], half[kind]
            if f is None or h is None:
                continue
            ratio = f["value"] / h["value"] if h["value"] > 0 else math.inf
            stab_metrics[f"d={d}:{kind}"] = ratio
            if stab_asserted and not ratio <= tol["stability"]:
                stab_ok = False

    suites = {
        "finite_ratios": SuiteResult(
            "finite_ratios", finite_ok,
            {"ratio_max": tol["ratio_max"], "worst": worst},
            "" if finite_ok else "a per-pair sup ratio is non-finite or above ratio_max"),
        "stability": SuiteResult(
            "stability", stab_ok,
            {"asserted": stab_asserted, "limit": tol["stability"], "ratios": stab_metrics},
            "" if stab_asserted else f"not asserted below ell_max = {tol['stability_min_ell']:g}"),
    }
    wall = (time.perf_counter() - t0) * 1000.0
    return SweepReport(cfg.echo(), per_pair, global_, suites, wall, rows)


def write_report(report: SweepReport, cfg: SweepConfig) -> None:
    """Write to cfg.output_path in cfg.output_format (LF line endings)."""
    text = report.to_csv() if cfg.output_format == "csv" else report.to_json()
    with open(cfg.output_path, "w", newline="\n") as fh:
        fh.write(text)


def reduce_csv(text: str) -> dict:
    """Re-reduce CSV rows: (two_ell, two_m, d) -> (sup ratio, argmax x)."""
    lines = text.split("\n")
    if lines[0] != CSV_HEADER:
        raise ValueError("unexpected CSV header")
    out: dict = {}
    for line in lines[1:]:
        if not line:
            continue
        f = line.split(",")
        key = (int(f[0]), int(f[1]), int(f[2]))
        x, r = float(f[3]), float(f[7])
        cur = out.get(key)
        if cur is None or r > cur[0] or (r == cur[0] and x < cur[1]):
            out[key] = (r, x)
    return out
