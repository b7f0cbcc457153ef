"""Parameter-sweep CLI with bit-stable CSV output.

One axis (spacing, receive angle, loss ratio, or element count) is swept
over a fixed LOS scenario and every requested method is evaluated at
every grid point.  Failed grid points (conditioning gate, singular
network) become rows with a status token instead of aborting the sweep.

Config files are flat ``key = value`` text; every key is also available
as a command-line flag, and flags override the file.  Exit codes:
0 success, 2 schema error, 3 if any grid point failed.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .coupling import EIG_FLOOR, condition_number, coupling_real_part
from .errors import IllConditioned, SchemaError, SingularNetwork
from .network import Scenario, effective_channels
from .optimize import (
    Method,
    bd_gain,
    closed_form_diagonal_gain,
    gradient_coupled_baseline,
    ignore_mc_baseline,
)

AXES = ("spacing_d", "angle_rx", "loss_gamma", "elements_N")
METHOD_ORDER = tuple(m.value for m in Method)
CSV_COLUMNS = (
    "axis_value",
    "method",
    "array_gain",
    "channel_gain",
    "iterations",
    "converged",
    "condition_number",
    "status",
)

_CONFIG_KEYS = {
    "axis", "from", "to", "steps", "values",
    "n", "d", "alpha_tx", "alpha_rx", "gamma",
    "r", "gamma_dr", "gamma_rs", "z_ds",
    "methods", "output", "seed", "max_iters", "tol", "eig_floor",
}


@dataclass(frozen=True)
class SweepSpec:
    """Validated sweep description: one axis plus the fixed scenario."""

    axis: str
    values: tuple[float, ...]
    n: int
    d: float
    alpha_tx: float
    alpha_rx: float
    gamma: float
    r: float
    gamma_dr: float
    gamma_rs: float
    z_ds: complex
    methods: tuple[str, ...]
    output: str | None
    seed: int
    max_iters: int
    tol: float
    eig_floor: float


def parse_config_text(text: str) -> dict[str, str]:
    """Parse flat ``key = value`` lines; '#' starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        for sep in ("=", ":"):
            if sep in line:
                key, value = line.split(sep, 1)
                break
        else:
            raise SchemaError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key = key.strip().lower()
        if key not in _CONFIG_KEYS:
            raise SchemaError(f"line {lineno}: unknown key {key!r}")
        out[key] = value.strip()
    return out


def _parse_float(raw: str, key: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise SchemaError(f"{key}: expected a number, got {raw!r}") from None


def _parse_int(raw: str, key: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise SchemaError(f"{key}: expected an integer, got {raw!r}") from None


def _axis_canonical(raw: str) -> str:
    for axis in AXES:
        if raw.strip().lower() == axis.lower():
            return axis
    raise SchemaError(f"axis: must be one of {', '.join(AXES)}, got {raw!r}")


def _parse_methods(raw: str) -> tuple[str, ...]:
    names = [part.strip() for part in raw.split(",") if part.strip()]
    if not names:
        raise SchemaError("methods: must name at least one method")
    for name in names:
        if name not in METHOD_ORDER:
            raise SchemaError(
                f"methods: unknown method {name!r}; valid: {', '.join(METHOD_ORDER)}"
            )
    # fixed canonical order regardless of how the user listed them
    return tuple(m for m in METHOD_ORDER if m in names)


def _axis_values(entries: dict[str, str], axis: str) -> tuple[float, ...]:
    if "values" in entries:
        try:
            vals = tuple(float(v) for v in entries["values"].split(",") if v.strip())
        except ValueError:
            raise SchemaError(f"values: expected comma-separated numbers, got {entries['values']!r}") from None
        if not vals:
            raise SchemaError("values: must contain at least one number")
    else:
        missing = [k for k in ("from", "to", "steps") if k not in entries]
        if missing:
            raise SchemaError(f"{missing[0]}: required (axis grid needs from/to/steps or values)")
        lo = _parse_float(entries["from"], "from")
        hi = _parse_float(entries["to"], "to")
        steps = _parse_int(entries["steps"], "steps")
        if steps < 1:
            raise SchemaError(f"steps: must be >= 1, got {steps}")
        if lo > hi:
            raise SchemaError(f"from: must be <= to, got {lo} > {hi}")
        vals = tuple(float(v) for v in np.linspace(lo, hi, steps))
    for v in vals:
        if axis == "spacing_d" and v <= 0:
            raise SchemaError(f"values: spacing must be positive, got {v}")
        if axis == "angle_rx" and not (0.0 <= v <= np.pi):
            raise SchemaError(f"values: angle must lie in [0, pi], got {v}")
        if axis == "loss_gamma" and v < 0:
            raise SchemaError(f"values: loss ratio must be nonnegative, got {v}")
        if axis == "elements_N" and (v < 1 or v != int(v)):
            raise SchemaError(f"values: element count must be a positive integer, got {v}")
    return vals


def build_spec(entries: dict[str, str]) -> SweepSpec:
    """Validate raw key/value entries into a fully-defaulted SweepSpec."""
    unknown = set(entries) - _CONFIG_KEYS
    if unknown:
        raise SchemaError(f"{sorted(unknown)[0]}: unknown key")
    if "axis" not in entries:
        raise SchemaError("axis: required")
    axis = _axis_canonical(entries["axis"])
    values = _axis_values(entries, axis)

    if axis != "elements_N":
        if "n" not in entries:
            raise SchemaError("n: required unless axis is elements_N")
        n = _parse_int(entries["n"], "n")
    else:
        n = _parse_int(entries.get("n", "1"), "n")
    if n < 1:
        raise SchemaError(f"n: element count must be >= 1, got {n}")

    if axis != "spacing_d":
        if "d" not in entries:
            raise SchemaError("d: required unless axis is spacing_d")
        d = _parse_float(entries["d"], "d")
    else:
        d = _parse_float(entries.get("d", "0.5"), "d")
    if d <= 0:
        raise SchemaError(f"d: spacing must be positive, got {d}")

    alpha_tx = _parse_float(entries.get("alpha_tx", "0.0"), "alpha_tx")
    alpha_rx = _parse_float(entries.get("alpha_rx", repr(float(np.pi))), "alpha_rx")
    for key, val in (("alpha_tx", alpha_tx), ("alpha_rx", alpha_rx)):
        if not (0.0 <= val <= np.pi):
            raise SchemaError(f"{key}: angle must lie in [0, pi], got {val}")
    gamma = _parse_float(entries.get("gamma", "0.0"), "gamma")
    if gamma < 0:
        raise SchemaError(f"gamma: loss ratio must be nonnegative, got {gamma}")
    r = _parse_float(entries.get("r", "1.0"), "r")
    if r <= 0:
        raise SchemaError(f"r: reference resistance must be positive, got {r}")
    gamma_dr = _parse_float(entries.get("gamma_dr", "1.0"), "gamma_dr")
    gamma_rs = _parse_float(entries.get("gamma_rs", "1.0"), "gamma_rs")
    if gamma_dr < 0 or gamma_rs < 0:
        raise SchemaError("gamma_dr: pathloss factors must be nonnegative")
    try:
        z_ds = complex(entries.get("z_ds", "0"))
    except ValueError:
        raise SchemaError(f"z_ds: expected a complex number, got {entries['z_ds']!r}") from None

    methods = _parse_methods(entries.get("methods", "decoupled_diag,bd,uncoupled"))
    seed = _parse_int(entries.get("seed", "0"), "seed")
    max_iters = _parse_int(entries.get("max_iters", "10000"), "max_iters")
    if max_iters < 1:
        raise SchemaError(f"max_iters: must be >= 1, got {max_iters}")
    tol = _parse_float(entries.get("tol", "1e-9"), "tol")
    if tol <= 0:
        raise SchemaError(f"tol: must be positive, got {tol}")
    eig_floor = _parse_float(entries.get("eig_floor", repr(EIG_FLOOR)), "eig_floor")
    if eig_floor <= 0:
        raise SchemaError(f"eig_floor: must be positive, got {eig_floor}")

    return SweepSpec(
        axis=axis,
        values=values,
        n=n,
        d=d,
        alpha_tx=alpha_tx,
        alpha_rx=alpha_rx,
        gamma=gamma,
        r=r,
        gamma_dr=gamma_dr,
        gamma_rs=gamma_rs,
        z_ds=z_ds,
        methods=methods,
        output=entries.get("output"),
        seed=seed,
        max_iters=max_iters,
        tol=tol,
        eig_floor=eig_floor,
    )


def validate_and_load(path: str) -> SweepSpec:
    """Load and validate a config file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemaError(f"config: cannot read {path!r}: {exc}") from None
    return build_spec(parse_config_text(text))


def _scenario_at(spec: SweepSpec, axis_value: float) -> Scenario:
    scn = Scenario(
        n=spec.n, d=spec.d, alpha_tx=spec.alpha_tx, alpha_rx=spec.alpha_rx,
        gamma=spec.gamma, r=spec.r, gamma_dr=spec.gamma_dr,
        gamma_rs=spec.gamma_rs, z_ds=spec.z_ds,
    )
    field = {
        "spacing_d": "d",
        "angle_rx": "alpha_rx",
        "loss_gamma": "gamma",
        "elements_N": "n",
    }[spec.axis]
    value = int(axis_value) if spec.axis == "elements_N" else axis_value
    return replace(scn, **{field: value})


def _blank_row(axis_value: float, method: str, cond: float, status: str) -> dict:
    return {
        "axis_value": axis_value,
        "method": method,
        "array_gain": np.nan,
        "channel_gain": np.nan,
        "iterations": 0,
        "converged": False,
        "condition_number": cond,
        "status": status,
    }


_STATUS = {IllConditioned: "ill_conditioned", SingularNetwork: "singular_network"}


def evaluate_point(spec: SweepSpec, axis_value: float) -> list[dict]:
    """Rows for all requested methods at one grid point, in fixed order."""
    scn = _scenario_at(spec, axis_value)
    z_r = scn.coupling()
    cond = condition_number(coupling_real_part(z_r))
    triple = scn.triple()
    effective = None
    rows = []
    for method in spec.methods:
        try:
            if method in (Method.DECOUPLED_DIAG.value, Method.BD.value):
                if effective is None:
                    effective = effective_channels(triple, z_r)
                if method == Method.DECOUPLED_DIAG.value:
                    res = closed_form_diagonal_gain(effective, scn.r)
                else:
                    res = bd_gain(effective, scn.r)
            elif method == Method.UNCOUPLED.value:
                res = closed_form_diagonal_gain(triple, scn.r, method=Method.UNCOUPLED)
            elif method == Method.IGNORE_MC.value:
                res = ignore_mc_baseline(triple, z_r)
            else:
                res = gradient_coupled_baseline(
                    triple, z_r, max_iters=spec.max_iters, tol=spec.tol
                )
        except (IllConditioned, SingularNetwork) as exc:
            rows.append(_blank_row(axis_value, method, cond, _STATUS[type(exc)]))
            continue
        rows.append({
            "axis_value": axis_value,
            "method": method,
            "array_gain": res.array_gain,
            "channel_gain": res.channel_gain,
            "iterations": res.iterations,
            "converged": res.converged,
            "condition_number": cond,
            "status": "ok",
        })
    return rows


def run_sweep(spec: SweepSpec, threads: int = 1) -> list[dict]:
    """Evaluate the whole grid; row order is axis-major, then method."""
    if threads < 1:
        raise SchemaError(f"threads: must be >= 1, got {threads}")
    if threads == 1 or len(spec.values) <= 1:
        chunks = [evaluate_point(spec, v) for v in spec.values]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(lambda v: evaluate_point(spec, v), spec.values))
    return [row for chunk in chunks for row in chunk]


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def render_csv(rows: list[dict], spec: SweepSpec) -> str:
    """Deterministic CSV text: 17 significant digits, '\\n' endings.

    Units: spacing in wavelengths, angles in radians, array_gain
    dimensionless, channel_gain in Ohm^2.
    """
    lines = [
        f"# axis: {spec.axis}",
        "# units: spacing_d in wavelengths, angle_rx in radians, loss_gamma dimensionless, "
        "elements_N count; array_gain dimensionless, channel_gain in Ohm^2",
        ",".join(CSV_COLUMNS),
    ]
    for row in rows:
        lines.append(",".join(_fmt(row[col]) for col in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sweep",
        description="Sweep one scenario axis and emit per-method channel/array gains as CSV.",
    )
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--output", help="CSV output path (default: stdout)")
    parser.add_argument("--threads", type=int, help="worker threads (default: $SWEEP_THREADS or 1)")
    parser.add_argument("--seed", type=int, help="seed for randomized baselines")
    parser.add_argument("--axis", help=f"sweep axis: one of {', '.join(AXES)}")
    parser.add_argument("--from", dest="from_", metavar="FROM", help="axis start")
    parser.add_argument("--to", help="axis end")
    parser.add_argument("--steps", help="number of grid points")
    parser.add_argument("--values", help="explicit comma-separated axis values")
    parser.add_argument("--n", help="element count")
    parser.add_argument("--d", help="element spacing in wavelengths")
    parser.add_argument("--alpha-tx", dest="alpha_tx", help="transmit angle in radians")
    parser.add_argument("--alpha-rx", dest="alpha_rx", help="receive angle in radians")
    parser.add_argument("--gamma", help="ohmic loss ratio R_d/R")
    parser.add_argument("--r", help="reference resistance in Ohms")
    parser.add_argument("--gamma-dr", dest="gamma_dr", help="RIS-to-user pathloss factor")
    parser.add_argument("--gamma-rs", dest="gamma_rs", help="BS-to-RIS pathloss factor")
    parser.add_argument("--z-ds", dest="z_ds", help="direct channel in Ohms (complex)")
    parser.add_argument("--methods", help=f"comma-separated subset of {', '.join(METHOD_ORDER)}")
    parser.add_argument("--max-iters", dest="max_iters", help="gradient iteration cap")
    parser.add_argument("--tol", help="gradient relative-improvement stop")
    parser.add_argument("--eig-floor", dest="eig_floor", help="relative eigenvalue conditioning gate")
    return parser


_FLAG_KEYS = (
    ("axis", "axis"), ("from_", "from"), ("to", "to"), ("steps", "steps"),
    ("values", "values"), ("n", "n"), ("d", "d"), ("alpha_tx", "alpha_tx"),
    ("alpha_rx", "alpha_rx"), ("gamma", "gamma"), ("r", "r"),
    ("gamma_dr", "gamma_dr"), ("gamma_rs", "gamma_rs"), ("z_ds", "z_ds"),
    ("methods", "methods"), ("output", "output"), ("max_iters", "max_iters"),
    ("tol", "tol"), ("eig_floor", "eig_floor"),
)


def _resolve_threads(flag_value: int | None) -> int:
    if flag_value is not None:
        if flag_value < 1:
            raise SchemaError(f"threads: must be >= 1, got {flag_value}")
        return flag_value
    env = os.environ.get("SWEEP_THREADS")
    if env is None:
        return 1
    try:
        threads = int(env)
    except ValueError:
        raise SchemaError(f"SWEEP_THREADS: expected an integer, got {env!r}") from None
    if threads < 1:
        raise SchemaError(f"SWEEP_THREADS: must be >= 1, got {threads}")
    return threads


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        entries: dict[str, str] = {}
        if args.config:
            with open(args.config, "r", encoding="utf-8") as fh:
                entries = parse_config_text(fh.read())
        for attr, key in _FLAG_KEYS:
            value = getattr(args, attr)
            if value is not None:
                entries[key] = str(value)
        if args.seed is not None:
            entries["seed"] = str(args.seed)
        spec = build_spec(entries)
        threads = _resolve_threads(args.threads)
    except SchemaError as exc:
        print(f"sweep: schema error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"sweep: schema error: config: {exc}", file=sys.stderr)
        return 2

    rows = run_sweep(spec, threads=threads)
    text = render_csv(rows, spec)
    if spec.output:
        with open(spec.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 3 if any(row["status"] != "ok" for row in rows) else 0


if __name__ == "__main__":
    sys.exit(main())
