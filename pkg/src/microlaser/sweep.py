"""Parameter sweeps, CSV emission and point validation.

Sweep configurations are flat "key = value" text files (# comments allowed),
one sweep per file.  A sweep fixes all but one of the dimensionless knobs
(N, kappa_over_g, gamma_over_g and D or g_tau) and walks the remaining axis
over a grid, solving the steady state at every point.  Sweeping D at fixed
N varies the flight time (g_tau = D / sqrt(N)); sweeping N at fixed g_tau
exposes the intensity saturation with pump flux.

Grid points that violate the one-atom-at-a-time regime (R*tau >= 1) are
emitted as skipped rows rather than aborting the sweep, as are per-point
solver failures.  CSV output is deterministic byte-for-byte: 12 significant
digits, header naming exactly the row fields.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .lindblad import simulate_steady_state
from .params import (
    MicrolaserParams,
    SingleAtomRegimeViolation,
    from_dimensionless,
    to_dimensionless,
)
from .steady_state import moments, photon_distribution

SWEEP_AXES = ("D", "g_tau", "N", "kappa_over_g", "gamma_over_g")
FIXED_KEYS = ("N", "kappa_over_g", "gamma_over_g", "D", "g_tau")
CSV_COLUMNS = ("axis_value", "D", "mean_n", "v", "classification",
               "negative_weights", "n_max", "skipped", "note")


class ParseError(ValueError):
    """Malformed config text; carries (line number, message) pairs."""

    def __init__(self, errors):
        self.errors = list(errors)
        lines = "; ".join(f"line {ln}: {msg}" for ln, msg in self.errors)
        super().__init__(f"config parse failed: {lines}")


class ValidationError(ValueError):
    """Config parsed but describes an unusable sweep or point."""


class CapacityError(RuntimeError):
    """Oracle validation refused: instance too large for desk-scale runs."""


@dataclass(frozen=True)
class OracleSettings:
    """Monte-Carlo settings used by point validation."""

    n_trajectories: int = 10
    n_atoms: int = 2200
    burn_in: int = 200
    n_fock: int = 0  # 0 -> max(6N, 30)
    seed: int = 20260809
    sampling: str = "post_gap"
    gap_law: str = "dead_time"


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: a swept axis, its grid, and the fixed remaining knobs."""

    axis: str
    grid: np.ndarray
    fixed: dict
    outputs: tuple = ("mean_n", "v")
    oracle: OracleSettings = field(default_factory=OracleSettings)


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    D: float
    mean_n: float | None
    v: float | None
    classification: str
    negative_weights: int | None
    n_max: int | None
    skipped: bool
    note: str = ""


@dataclass(frozen=True)
class ValidationReport:
    """Continued-fraction vs Monte-Carlo comparison at one point."""

    params: MicrolaserParams
    tv_distance: float
    threshold: float
    stderr_sum: float
    z_scores: np.ndarray
    passed: bool
    oracle: OracleSettings


# ---------------------------------------------------------------------------
# config parsing


def _parse_items(text: str):
    """key = value pairs with line numbers; collects malformed lines."""
    items = {}
    errors = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append((ln, f"expected 'key = value', got {line!r}"))
            continue
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            errors.append((ln, f"expected 'key = value', got {line!r}"))
            continue
        if key in items:
            errors.append((ln, f"duplicate key {key!r}"))
            continue
        items[key] = (ln, value)
    return items, errors


def _parse_float(key, ln, value, errors):
    try:
        return float(value)
    except ValueError:
        errors.append((ln, f"{key}: not a number: {value!r}"))
        return None


def _parse_grid(ln, value, errors):
    if ":" in value:
        parts = [s.strip() for s in value.split(":")]
        if len(parts) != 3:
            errors.append((ln, f"grid: expected 'start : stop : step', got {value!r}"))
            return None
        try:
            start, stop, step = (float(s) for s in parts)
        except ValueError:
            errors.append((ln, f"grid: not numeric: {value!r}"))
            return None
        if step <= 0 or stop < start:
            errors.append((ln, "grid: need step > 0 and stop >= start"))
            return None
        count = int(math.floor((stop - start) / step + 1e-9))
        return start + step * np.arange(count + 1)
    try:
        grid = np.array([float(s) for s in value.split(",") if s.strip()])
    except ValueError:
        errors.append((ln, f"grid: not numeric: {value!r}"))
        return None
    if grid.size == 0:
        errors.append((ln, "grid: empty"))
        return None
    return grid


_ORACLE_KEYS = {
    "oracle_trajectories": ("n_trajectories", int),
    "oracle_atoms": ("n_atoms", int),
    "oracle_burn_in": ("burn_in", int),
    "oracle_n_fock": ("n_fock", int),
    "oracle_seed": ("seed", int),
    "oracle_sampling": ("sampling", str),
    "oracle_gap_law": ("gap_law", str),
}


def _parse_oracle(items, errors) -> OracleSettings:
    settings = OracleSettings()
    for key, (attr, conv) in _ORACLE_KEYS.items():
        if key in items:
            ln, value = items.pop(key)
            try:
                settings = replace(settings, **{attr: conv(value)})
            except ValueError:
                errors.append((ln, f"{key}: expected {conv.__name__}, got {value!r}"))
    return settings


def parse_config(text: str) -> SweepSpec:
    """Parse and validate a sweep config; raises ParseError / ValidationError."""
    items, errors = _parse_items(text)
    oracle = _parse_oracle(items, errors)

    axis = None
    if "axis" not in items:
        errors.append((0, "missing required key 'axis'"))
    else:
        ln, value = items.pop("axis")
        if value not in SWEEP_AXES:
            errors.append((ln, f"axis must be one of {SWEEP_AXES}, got {value!r}"))
        else:
            axis = value

    grid = None
    if "grid" not in items:
        errors.append((0, "missing required key 'grid'"))
    else:
        ln, value = items.pop("grid")
        grid = _parse_grid(ln, value, errors)

    outputs = ("mean_n", "v")
    if "outputs" in items:
        ln, value = items.pop("outputs")
        outputs = tuple(s.strip() for s in value.split(",") if s.strip())

    fixed = {}
    for key in list(items):
        ln, value = items.pop(key)
        if key not in FIXED_KEYS:
            errors.append((ln, f"unknown key {key!r}"))
            continue
        x = _parse_float(key, ln, value, errors)
        if x is not None:
            fixed[key] = x
    if errors:
        raise ParseError(errors)

    if axis in fixed:
        raise ValidationError(f"swept axis {axis!r} is also fixed")
    if grid.size == 0:
        raise ValidationError("empty grid")
    if np.any(np.diff(grid) <= 0):
        raise ValidationError("grid must be strictly increasing")
    _require_complete(axis, fixed)
    return SweepSpec(axis=axis, grid=grid, fixed=fixed, outputs=outputs,
                     oracle=oracle)


def _require_complete(axis, fixed):
    needed = {"N", "kappa_over_g", "gamma_over_g"} - {axis}
    missing = sorted(needed - fixed.keys())
    if missing:
        raise ValidationError(f"missing fixed parameter(s): {', '.join(missing)}")
    has_time = axis in ("D", "g_tau") or ("D" in fixed) != ("g_tau" in fixed)
    if not has_time:
        if "D" in fixed and "g_tau" in fixed:
            raise ValidationError("give only one of D and g_tau")
        raise ValidationError("need one of D or g_tau")
    if axis in ("D", "g_tau") and ("D" in fixed or "g_tau" in fixed):
        raise ValidationError("time axis swept: fix neither D nor g_tau")


def parse_point_config(text: str):
    """Parse a single-point config (N, kappa_over_g, gamma_over_g, D|g_tau);
    returns (MicrolaserParams, OracleSettings)."""
    items, errors = _parse_items(text)
    oracle = _parse_oracle(items, errors)
    values = {}
    for key in list(items):
        ln, value = items.pop(key)
        if key not in FIXED_KEYS:
            errors.append((ln, f"unknown key {key!r}"))
            continue
        x = _parse_float(key, ln, value, errors)
        if x is not None:
            values[key] = x
    if errors:
        raise ParseError(errors)
    missing = sorted({"N", "kappa_over_g", "gamma_over_g"} - values.keys())
    if missing:
        raise ValidationError(f"missing parameter(s): {', '.join(missing)}")
    if ("D" in values) == ("g_tau" in values):
        raise ValidationError("give exactly one of D and g_tau")
    g_tau = values.get("g_tau", values.get("D", 0.0) / math.sqrt(values["N"]))
    p = from_dimensionless(values["N"], values["kappa_over_g"],
                           values["gamma_over_g"], g_tau)
    return p, oracle


# ---------------------------------------------------------------------------
# sweeping


def _solve_row(args) -> SweepRow:
    axis, x, fixed, rel_tol = args
    vals = dict(fixed)
    vals[axis] = x
    N = vals["N"]
    g_tau = vals["g_tau"] if "g_tau" in vals else vals["D"] / math.sqrt(N)
    D = math.sqrt(N) * g_tau
    try:
        p = from_dimensionless(N, vals["kappa_over_g"], vals["gamma_over_g"], g_tau)
    except SingleAtomRegimeViolation as e:
        return SweepRow(axis_value=x, D=D, mean_n=None, v=None, classification="",
                        negative_weights=None, n_max=None, skipped=True, note=str(e))
    try:
        d = photon_distribution(p, rel_tol)
    except Exception as e:  # per-point failures never abort the sweep
        return SweepRow(axis_value=x, D=D, mean_n=None, v=None, classification="",
                        negative_weights=None, n_max=None, skipped=True,
                        note=f"{type(e).__name__}: {e}")
    m = moments(d)
    return SweepRow(axis_value=x, D=D, mean_n=m.mean_n, v=m.variance_ratio_v,
                    classification=m.classification,
                    negative_weights=len(d.negative_weights), n_max=d.n_max,
                    skipped=False)


def run_sweep(spec: SweepSpec, rel_tol: float = 1e-10, workers: int = 1) -> list[SweepRow]:
    """Solve every grid point, in grid order; rows for guard-violating or
    failing points carry skipped=True and a note.  Output is identical for
    any worker count."""
    jobs = [(spec.axis, float(x), spec.fixed, rel_tol) for x in spec.grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_solve_row, jobs, chunksize=16))
    return [_solve_row(job) for job in jobs]


# ---------------------------------------------------------------------------
# CSV emission


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def emit_csv(rows: list[SweepRow], destination) -> int:
    """Write sweep rows as CSV; returns the byte count written."""
    if not rows:
        raise ValueError("no rows to emit")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow([_fmt(getattr(r, col)) for col in CSV_COLUMNS])
    return _write_bytes(buf.getvalue().encode(), destination)


def emit_distribution(p: MicrolaserParams, destination, rel_tol: float = 1e-10) -> int:
    """Write the solved P_n as two-column CSV over the support."""
    d = photon_distribution(p, rel_tol)
    probs = d.probabilities()
    support = np.flatnonzero(probs > 0.0)
    last = int(support[-1]) if support.size else 0
    buf = io.StringIO()
    buf.write("n,P_n\n")
    for n in range(last + 1):
        buf.write(f"{n},{probs[n]:.12g}\n")
    return _write_bytes(buf.getvalue().encode(), destination)


def _write_bytes(payload: bytes, destination) -> int:
    try:
        with open(destination, "wb") as f:
            f.write(payload)
    except OSError as e:
        raise OSError(f"writing {destination!s} failed: {e}") from e
    return len(payload)


# ---------------------------------------------------------------------------
# oracle validation


def validate_point(p: MicrolaserParams, oracle_cfg: OracleSettings) -> ValidationReport:
    """Compare the continued-fraction steady state against the Monte-Carlo
    master-equation estimate at one (desk-scale) parameter point."""
    N = to_dimensionless(p).N
    n_fock = oracle_cfg.n_fock or max(int(math.ceil(6 * N)), 30)
    if N > 20 or n_fock > 200:
        raise CapacityError(
            f"validation refused: N = {N:g}, n_fock = {n_fock} exceeds the "
            f"desk-scale limits (N <= 20, n_fock <= 200)"
        )
    est = simulate_steady_state(
        p, n_atoms=oracle_cfg.n_atoms, burn_in=oracle_cfg.burn_in,
        n_trajectories=oracle_cfg.n_trajectories, n_fock=n_fock,
        seed=oracle_cfg.seed, sampling=oracle_cfg.sampling,
        gap_law=oracle_cfg.gap_law)
    probs = photon_distribution(p).probabilities()
    size = max(probs.size, est.p_hat.size)
    a = np.pad(probs, (0, size - probs.size))
    b = np.pad(est.p_hat, (0, size - est.p_hat.size))
    tv = 0.5 * float(np.abs(a - b).sum())
    stderr_sum = float(est.stderr.sum())
    threshold = 0.02 + 3.0 * stderr_sum
    stderr = np.pad(est.stderr, (0, size - est.stderr.size))
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(stderr > 0, (a - b) / stderr, np.where(a == b, 0.0, np.inf))
    return ValidationReport(params=p, tv_distance=tv, threshold=threshold,
                            stderr_sum=stderr_sum, z_scores=z,
                            passed=tv < threshold, oracle=replace(
                                oracle_cfg, n_fock=n_fock))
