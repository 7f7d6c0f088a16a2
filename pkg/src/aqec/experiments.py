"""CSV experiment drivers behind the command-line interface.

Each run_* function takes an ExperimentConfig and returns the CSV text it
produced, writing it to config.out when set. Output is a deterministic
function of (config, seed): rows computed in parallel are buffered and
emitted in index order, and float cells use shortest round-trip formatting,
so repeated runs yield byte-identical text.
"""

from __future__ import annotations

import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from ._core import BACKEND
from .channel import (
    ERROR_KINDS,
    RateProfile,
    apply_channel,
    error_probabilities,
    kraus_set,
    subsets_by_weight,
)
from .codes import (
    Code,
    code_from_preset,
    probe_state,
    repetition_code,
    rotated_code,
    transform_code,
)
from .exceptions import ConfigError
from .linalg import haar_unitary, kron
from .metrics import deviation, initial_rate, kl_check, negativity, regime_inequality
from .optimize import OBJECTIVE_KINDS, optimize_code
from .recovery import RecoveryParams, recovery_error_set

# grouped-probability time grids used by the reference tables
TABLE_TIMES = {
    3: (0.0, 0.1, 0.2, 0.4, 0.6),
    4: (0.0, 0.05, 0.1, 0.2, 0.3, 0.4),
}

_HADAMARD_1Q = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


def _parse_int(key: str, value) -> int:
    try:
        return int(str(value).strip())
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {value!r}") from None


def _parse_float(key: str, value) -> float:
    try:
        return float(str(value).strip())
    except ValueError:
        raise ConfigError(f"{key} must be a number, got {value!r}") from None


def _parse_floats(key: str, value) -> tuple:
    if isinstance(value, (tuple, list, np.ndarray)):
        return tuple(float(v) for v in value)
    parts = [p for p in re.split(r"[,\s]+", str(value).strip()) if p]
    if not parts:
        raise ConfigError(f"{key} must list at least one number")
    return tuple(_parse_float(key, p) for p in parts)


def _parse_names(key: str, value) -> tuple:
    if isinstance(value, (tuple, list)):
        parts = [str(v).strip() for v in value]
    else:
        parts = [p.strip() for p in str(value).split(",")]
    parts = [p for p in parts if p]
    if not parts:
        raise ConfigError(f"{key} must list at least one name")
    return tuple(parts)


def _parse_str(key: str, value) -> str:
    return str(value).strip()


_FIELD_PARSERS = {
    "n": _parse_int,
    "gamma": _parse_floats,
    "kind": _parse_str,
    "code": _parse_names,
    "tmax": _parse_float,
    "steps": _parse_int,
    "samples": _parse_int,
    "seed": _parse_int,
    "out": _parse_str,
    "times": _parse_floats,
    "objective": _parse_str,
    "tstar": _parse_float,
    "restarts": _parse_int,
    "h": _parse_float,
    "dt": _parse_float,
    "axis1": _parse_str,
    "axis2": _parse_str,
    "qsteps": _parse_int,
    "workers": _parse_int,
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated knobs for every subcommand; field names double as CLI flags."""

    n: int = 3
    gamma: tuple = (0.2, 0.2, 1.0)
    kind: str = "dephasing"
    code: tuple = ("repetition", "rotated")
    tmax: float = 3.0
    steps: int = 301
    samples: int = 1000
    seed: int = 0
    out: str | None = None
    times: tuple | None = None
    objective: str = "neg_at_t"
    tstar: float = 0.5
    restarts: int = 8
    h: float = 1e-3
    dt: float = 1e-3
    axis1: str = "gamma1:0.05:1.0:8"
    axis2: str = "gamma3:0.05:1.0:8"
    qsteps: int = 5
    workers: int = 0

    def __post_init__(self):
        if self.kind not in ERROR_KINDS:
            raise ConfigError(f"kind must be one of {ERROR_KINDS}, got {self.kind!r}")
        if self.objective not in OBJECTIVE_KINDS:
            raise ConfigError(
                f"objective must be one of {OBJECTIVE_KINDS}, got {self.objective!r}"
            )
        try:
            RateProfile(n=self.n, gamma=self.gamma, kind=self.kind)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        for name, minimum in (
            ("tmax", None), ("tstar", None), ("h", None), ("dt", None),
            ("steps", 2), ("samples", 1), ("qsteps", 2),
            ("seed", 0), ("restarts", 1), ("workers", 0),
        ):
            value = getattr(self, name)
            if minimum is None:
                if not (math.isfinite(value) and value > 0):
                    raise ConfigError(f"{name} must be positive, got {value!r}")
            elif value < minimum:
                raise ConfigError(f"{name} must be at least {minimum}, got {value!r}")
        if not self.code:
            raise ConfigError("code must list at least one preset")
        if self.times is not None and any(t < 0 for t in self.times):
            raise ConfigError(f"times must be nonnegative, got {self.times!r}")

    @classmethod
    def from_mapping(cls, mapping) -> "ExperimentConfig":
        """Build a config from string-valued key=value pairs (file or flags)."""
        kwargs = {}
        for key, raw in mapping.items():
            if raw is None:
                continue
            parser = _FIELD_PARSERS.get(key)
            if parser is None:
                known = ", ".join(sorted(_FIELD_PARSERS))
                raise ConfigError(f"unknown config key {key!r} (known: {known})")
            kwargs[key] = parser(key, raw)
        return cls(**kwargs)

    def profile(self) -> RateProfile:
        return RateProfile(n=self.n, gamma=self.gamma, kind=self.kind)

    def time_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.tmax, self.steps)

    def resolved_workers(self) -> int:
        if self.workers > 0:
            return self.workers
        return min(8, os.cpu_count() or 1)


def _fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return str(float(value))
    return str(value)


def _render(meta: dict, header: list, rows) -> str:
    lines = [f"# {key}={value}" for key, value in meta.items()]
    lines.append(",".join(header))
    lines.extend(",".join(_fmt(cell) for cell in row) for row in rows)
    return "\n".join(lines) + "\n"


def _meta(config: ExperimentConfig, command: str, **extra) -> dict:
    meta = {
        "tool": "aqec",
        "version": __version__,
        "backend": BACKEND,
        "command": command,
        "n": config.n,
        "gamma": ",".join(str(float(g)) for g in config.gamma),
        "kind": config.kind,
        "seed": config.seed,
    }
    meta.update(extra)
    return meta


def _emit(config: ExperimentConfig, text: str) -> str:
    if config.out:
        Path(config.out).write_text(text)
    return text


def _ordered_map(fn, items, workers: int) -> list:
    # results come back in input order, whatever the completion order
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _label(preset: str) -> str:
    return re.sub(r"[^a-z0-9]+", "_", preset.lower()).strip("_")


def oriented_code(code: Code, kind: str) -> Code:
    """The code matched to the error basis; bitflip runs use the X-basis twin."""
    if kind == "dephasing":
        return code
    u = kron(*([_HADAMARD_1Q] * code.n))
    return transform_code(code, u, label=f"{code.label}-x")


def _codes_for(config: ExperimentConfig) -> list:
    out = []
    counts = {}
    for preset in config.code:
        try:
            built = code_from_preset(preset, config.n)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        label = _label(preset)
        counts[label] = counts.get(label, 0) + 1
        if counts[label] > 1:
            label = f"{label}_{counts[label]}"
        out.append((label, oriented_code(built, config.kind)))
    return out


def _subset_name(subset, kind: str) -> str:
    if not subset:
        return "I"
    letter = "Z" if kind == "dephasing" else "X"
    return "".join(f"{letter}{q}" for q in subset)


def run_probabilities(config: ExperimentConfig) -> str:
    """Per-weight and grouped error probabilities over the time grid."""
    profile = config.profile()
    index_map = ";".join(
        f"{i}:{_subset_name(s, config.kind)}"
        for i, s in enumerate(subsets_by_weight(config.n))
    )

    def one_row(t):
        probs = error_probabilities(profile, float(t))
        return [float(t), *probs.p.tolist(), *probs.grouped().tolist()]

    rows = _ordered_map(one_row, config.time_grid(), config.resolved_workers())
    weights = range(config.n + 1)
    header = (
        ["t"]
        + [f"p_{w}" for w in weights]
        + [f"grouped_{w}" for w in weights]
    )
    meta = _meta(
        config, "probabilities",
        tmax=config.tmax, steps=config.steps, kraus_index_map=index_map,
    )
    return _emit(config, _render(meta, header, rows))


def run_decay(config: ExperimentConfig) -> str:
    """Negativity and deviation-functional curves for the configured codes."""
    profile = config.profile()
    entries = [
        (label, code, probe_state(code)) for label, code in _codes_for(config)
    ]

    def one_row(t):
        t = float(t)
        kset = kraus_set(profile, t)
        row = [t]
        for _, _, probe in entries:
            noisy = apply_channel(probe.rho, kset, probe.split)
            row.append(negativity(noisy, probe.split))
        for _, code, _ in entries:
            row.append(deviation(code.reduced_state(), kset).delta_c)
        return row

    rows = _ordered_map(one_row, config.time_grid(), config.resolved_workers())
    header = (
        ["t"]
        + [f"neg_{label}" for label, _, _ in entries]
        + [f"delta_{label}" for label, _, _ in entries]
    )
    meta = _meta(
        config, "decay",
        code=",".join(config.code), tmax=config.tmax, steps=config.steps,
    )
    return _emit(config, _render(meta, header, rows))


def scatter_sample(profile: RateProfile, base_code: Code, u, h: float = 1e-3,
                   kset_cache: dict | None = None):
    """Initial rates (deviation growth, negativity change) for one transform.

    The deviation functional is evaluated on the transformed code's reduced
    probe state, the negativity on the full probe; both curves start exactly
    at their t=0 values so the forward difference needs no offset handling.
    """
    code = transform_code(base_code, u)
    reduced = code.reduced_state()
    probe = probe_state(code)

    def kset_at(t):
        if kset_cache is not None:
            hit = kset_cache.get(t)
            if hit is not None:
                return hit
        built = kraus_set(profile, t)
        if kset_cache is not None:
            kset_cache[t] = built
        return built

    def delta_curve(t):
        return deviation(reduced, kset_at(t)).delta_c

    def neg_curve(t):
        noisy = apply_channel(probe.rho, kset_at(t), probe.split)
        return negativity(noisy, probe.split)

    d_delta = initial_rate(delta_curve, h).forward
    d_neg = initial_rate(neg_curve, h).forward
    return d_delta, d_neg


def pearson_r(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float(xc @ xc) * float(yc @ yc))
    if denom == 0.0:
        return 0.0
    return float(xc @ yc) / denom


def run_scatter(config: ExperimentConfig) -> str:
    """Haar-sampled cloud of initial deviation vs negativity rates.

    Sample i transforms the base code by a Haar unitary drawn from
    default_rng([seed, i]); the summary row reports the Pearson correlation
    between deviation growth and negativity decay (sign-flipped rate).
    """
    if config.samples < 2:
        raise ConfigError(f"samples must be at least 2 for scatter, got {config.samples}")
    profile = config.profile()
    base = _codes_for(config)[0][1]
    cache = {}
    for t in (0.0, config.h / 2.0, config.h):
        warm = kraus_set(profile, t)
        warm.extended(2)
        cache[t] = warm

    def one_sample(i):
        rng = np.random.default_rng([config.seed, i])
        u = haar_unitary(profile.dim, rng)
        d_delta, d_neg = scatter_sample(profile, base, u, h=config.h, kset_cache=cache)
        return [i, d_delta, d_neg]

    rows = _ordered_map(one_sample, range(config.samples), config.resolved_workers())
    d_delta = np.array([row[1] for row in rows])
    d_neg = np.array([row[2] for row in rows])
    correlation = pearson_r(d_delta, -d_neg)
    rows.append(["pearson_r", correlation, ""])
    meta = _meta(
        config, "scatter",
        code=config.code[0], samples=config.samples, h=config.h,
    )
    return _emit(config, _render(meta, ["sample", "ddelta_dt", "dneg_dt"], rows))


def run_tables(config: ExperimentConfig) -> str:
    """Grouped probabilities on the reference grids, exact and 2-decimal."""
    if config.n not in TABLE_TIMES:
        raise ConfigError(f"tables is defined for n in (3, 4), got {config.n}")
    times = config.times if config.times is not None else TABLE_TIMES[config.n]
    profile = config.profile()
    weights = range(config.n + 1)

    rows = []
    for t in times:
        grouped = error_probabilities(profile, float(t)).grouped()
        rows.append(
            [float(t), *grouped.tolist(), *(f"{v:.2f}" for v in grouped)]
        )
    header = (
        ["t"]
        + [f"grouped_{w}" for w in weights]
        + [f"rounded_{w}" for w in weights]
    )
    meta = _meta(config, "tables", times=",".join(str(float(t)) for t in times))
    return _emit(config, _render(meta, header, rows))


_AXIS_RE = re.compile(r"^gamma(\d+):([^:]+):([^:]+):(\d+)$")


def _parse_axis(key: str, spec: str, n: int):
    m = _AXIS_RE.match(spec.strip())
    if m is None:
        raise ConfigError(f"{key} must look like gammaK:lo:hi:steps, got {spec!r}")
    k = int(m.group(1))
    if not 1 <= k <= n:
        raise ConfigError(f"{key} rate index {k} is out of range for n={n}")
    lo = _parse_float(key, m.group(2))
    hi = _parse_float(key, m.group(3))
    npts = int(m.group(4))
    if npts < 2:
        raise ConfigError(f"{key} needs at least 2 grid points, got {npts}")
    if lo < 0 or hi < lo:
        raise ConfigError(f"{key} range must satisfy 0 <= lo <= hi, got {spec!r}")
    return k - 1, np.linspace(lo, hi, npts)


def run_regime_map(config: ExperimentConfig) -> str:
    """Regime inequality over a 2-axis rate grid at the configured times."""
    idx1, vals1 = _parse_axis("axis1", config.axis1, config.n)
    idx2, vals2 = _parse_axis("axis2", config.axis2, config.n)
    if idx1 == idx2:
        raise ConfigError("axis1 and axis2 must sweep different rate indices")
    times = config.times if config.times is not None else (0.1,)
    base = list(config.gamma)
    points = [(a, b, t) for a in vals1 for b in vals2 for t in times]

    def one_point(point):
        a, b, t = point
        gamma = list(base)
        gamma[idx1] = float(a)
        gamma[idx2] = float(b)
        profile = RateProfile(n=config.n, gamma=tuple(gamma), kind=config.kind)
        report = regime_inequality(error_probabilities(profile, float(t)))
        return [float(a), float(b), float(t), report.lhs, report.rhs,
                report.rotated_optimal]

    rows = _ordered_map(one_point, points, config.resolved_workers())
    header = [f"gamma{idx1 + 1}", f"gamma{idx2 + 1}", "t", "lhs", "rhs",
              "rotated_optimal"]
    meta = _meta(
        config, "regime-map",
        axis1=config.axis1, axis2=config.axis2,
        times=",".join(str(float(t)) for t in times),
    )
    return _emit(config, _render(meta, header, rows))


def run_recovery_check(config: ExperimentConfig) -> str:
    """Correctability verdicts for the parameterized recovery set on a grid.

    The grid walks the interior of the valid (q2, q3) region, staying off
    the degenerate corners where a radicand vanishes.
    """
    if config.n != 3:
        raise ConfigError(f"recovery-check is defined for n=3, got n={config.n}")
    rep = oriented_code(repetition_code(3), config.kind)
    rot = oriented_code(rotated_code(3), config.kind)
    s_grid = np.linspace(1.05, 1.95, config.qsteps)
    q3_grid = np.linspace(0.05, 0.95, config.qsteps)
    points = [(s, q3) for s in s_grid for q3 in q3_grid]

    def one_point(point):
        s, q3 = point
        params = RecoveryParams(q2=float((s - q3) / 3.0), q3=float(q3))
        errors = recovery_error_set(params, kind=config.kind)
        rot_result = kl_check(rot, errors)
        rep_result = kl_check(rep, errors)
        return [params.q2, params.q3, rot_result.ok, rot_result.max_violation,
                rep_result.ok, rep_result.max_violation]

    rows = _ordered_map(one_point, points, config.resolved_workers())
    header = ["q2", "q3", "rotated_ok", "rotated_max_violation",
              "repetition_ok", "repetition_max_violation"]
    meta = _meta(config, "recovery-check", qsteps=config.qsteps)
    return _emit(config, _render(meta, header, rows))


def run_optimize(config: ExperimentConfig) -> str:
    """Optimizer result row plus the replayed negativity curves."""
    profile = config.profile()
    base = _codes_for(config)[0][1]
    result = optimize_code(
        profile, base,
        kind=config.objective, tstar=config.tstar, restarts=config.restarts,
        seed=config.seed, h=config.h, workers=config.resolved_workers(),
    )
    best_code = transform_code(base, result.best_unitary, label="optimized")
    replay = [("optimized", best_code)] + _codes_for(config)
    entries = [(label, probe_state(code)) for label, code in replay]

    def one_row(t):
        t = float(t)
        kset = kraus_set(profile, t)
        row = [t]
        for _, probe in entries:
            noisy = apply_channel(probe.rho, kset, probe.split)
            row.append(negativity(noisy, probe.split))
        return row

    rows = _ordered_map(one_row, config.time_grid(), config.resolved_workers())
    starts = ";".join(f"{label}:{_fmt(value)}" for label, value in result.start_values)
    meta = _meta(
        config, "optimize",
        code=config.code[0], objective=config.objective, start_values=starts,
    )
    result_block = _render(
        meta,
        ["objective", "tstar", "restarts", "seed", "evaluations", "best_objective"],
        [[config.objective, config.tstar, config.restarts, config.seed,
          result.evaluations, result.best_objective]],
    )
    replay_block = _render(
        {}, ["t"] + [f"neg_{label}" for label, _ in entries], rows
    )
    return _emit(config, result_block + "# replay\n" + replay_block)


RUNNERS = {
    "probabilities": run_probabilities,
    "decay": run_decay,
    "scatter": run_scatter,
    "tables": run_tables,
    "regime-map": run_regime_map,
    "recovery-check": run_recovery_check,
    "optimize": run_optimize,
}
