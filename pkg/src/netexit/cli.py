"""Command-line front end.

Commands: ``analytic``, ``transform``, ``cdf``, ``simulate`` and ``compare``.
Every value can come from a flag or from a ``--config`` file of ``key = value``
lines (keys are flag names without the dashes); flags win over the file.

Exit status: 0 on success, 1 when a validation check fails, 2 on a usage or
parameter error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field

import numpy as np

from .analytic.cdf import crossing_time_cdf_curve
from .analytic.transforms import (
    TransformQuery,
    joint_functional,
    lst_time,
    lst_weight,
    mean_nodes_at_crossing,
    mean_weight_at_crossing,
    pgf_nodes,
)
from .errors import ModelError
from .model import ModelParams
from .simulator import RealizationConfig, Strategy, simulate_batch
from .validate import pass_fraction, reconstructible_rows, reproduce_table

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

COMMANDS = ("analytic", "transform", "cdf", "simulate", "compare")
FORMATS = ("csv", "json-lines", "text")
KINDS = ("pgf", "lst-weight", "lst-time", "joint")
MODEL_FLAGS = ("lambda", "mu", "a", "xi", "M", "V")
PASS_FRACTION = 0.95
DEFAULT_RUNS = 1000

# axis each transform kind is evaluated over
_KIND_AXES = {
    "pgf": ("z",),
    "lst-weight": ("v",),
    "lst-time": ("theta",),
    "joint": ("z", "v", "theta"),
}
_AXIS_DEFAULTS = {"z": 1.0, "v": 0.0, "theta": 0.0}


class UsageError(Exception):
    """Bad command line or config; ``flag`` names the offending option."""

    def __init__(self, message: str, flag: str | None = None):
        super().__init__(message)
        self.flag = flag


def _flag_for(param: str | None) -> str | None:
    if param is None:
        return None
    return {"lam": "--lambda", "m_beta": "--m-beta"}.get(param, f"--{param}")


def _float(flag, raw):
    try:
        value = float(raw)
    except ValueError:
        raise UsageError(f"{flag}: expected a number, got {raw!r}", flag) from None
    if not math.isfinite(value):
        raise UsageError(f"{flag}: expected a finite number, got {raw!r}", flag)
    return value


def _int(flag, raw):
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{flag}: expected an integer, got {raw!r}", flag) from None


def _positive_int(flag, raw):
    value = _int(flag, raw)
    if value < 1:
        raise UsageError(f"{flag}: must be >= 1, got {value}", flag)
    return value


def _seed(flag, raw):
    value = _int(flag, raw)
    if not 0 <= value < 2**64:
        raise UsageError(f"{flag}: must be an unsigned 64-bit integer, got {value}", flag)
    return value


def _range(flag, raw):
    """``start:stop:step``, inclusive of ``stop`` when it falls on the grid."""
    parts = raw.split(":")
    if len(parts) != 3:
        raise UsageError(f"{flag}: expected start:stop:step, got {raw!r}", flag)
    start, stop, step = (_float(flag, s) for s in parts)
    if step <= 0:
        raise UsageError(f"{flag}: step must be > 0, got {step!r}", flag)
    if stop < start:
        raise UsageError(f"{flag}: stop must be >= start, got {raw!r}", flag)
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(float(start + k * step) for k in range(count))


def _axis(flag, raw):
    """A single value, a comma-separated list or a ``start:stop:step`` range."""
    if ":" in raw:
        return _range(flag, raw)
    return tuple(_float(flag, s) for s in raw.split(","))


def _choice(options):
    def convert(flag, raw):
        if raw not in options:
            raise UsageError(f"{flag}: expected one of {', '.join(options)}, got {raw!r}", flag)
        return raw

    return convert


def _path(flag, raw):
    if not raw:
        raise UsageError(f"{flag}: empty path", flag)
    return raw


def _bool(flag, raw):
    if isinstance(raw, bool):
        return raw
    lowered = raw.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise UsageError(f"{flag}: expected true or false, got {raw!r}", flag)


# flag name -> converter; the flag name doubles as the config-file key
_CONVERTERS = {
    "lambda": _float,
    "mu": _float,
    "a": _float,
    "xi": _float,
    "M": _int,
    "V": _float,
    "m-beta": _float,
    "runs": _positive_int,
    "seed": _seed,
    "grid": _range,
    "z": _axis,
    "v": _axis,
    "theta": _axis,
    "kind": _choice(KINDS),
    "format": _choice(FORMATS),
    "output": _path,
    "strategy": _choice(tuple(s.value for s in Strategy)),
    "workers": _positive_int,
    "unsafe": _bool,
}

_COMMON = ("lambda", "mu", "a", "xi", "M", "V", "m-beta", "format", "output")
_COMMAND_FLAGS = {
    "analytic": _COMMON,
    "transform": _COMMON + ("z", "v", "theta", "kind"),
    "cdf": _COMMON + ("grid", "unsafe"),
    "simulate": _COMMON + ("runs", "seed", "strategy", "workers"),
    "compare": _COMMON + ("runs", "seed", "workers"),
}


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: ModelParams | None  # None: compare over the built-in table
    n_runs: int = DEFAULT_RUNS
    seed: int | None = None
    grid: tuple | None = None
    output_format: str = "csv"
    output_path: str | None = None
    kind: str = "joint"
    axes: dict = field(default_factory=dict)
    strategy: Strategy = Strategy.EPOCH_FIRST
    workers: int = 1
    unsafe: bool = False


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser():
    parser = _Parser(prog="netexit", allow_abbrev=False, description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    for command in COMMANDS:
        p = sub.add_parser(command, allow_abbrev=False)
        p.add_argument("--config", metavar="PATH")
        for name in _COMMAND_FLAGS[command]:
            if name == "unsafe":
                p.add_argument("--unsafe", action="store_const", const=True, default=None)
            else:
                p.add_argument(f"--{name}", dest=name, metavar=name.upper())
    return parser


def read_config(path: str) -> dict:
    """``key = value`` lines; blank lines and ``#`` comments are skipped."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise UsageError(f"--config: cannot read {path!r}: {exc.strerror}", "--config") from None
    values = {}
    for lineno, line in enumerate(lines, start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        key, sep, value = text.partition("=")
        key = key.strip().replace("_", "-")
        if not sep or not key:
            raise UsageError(f"--config: line {lineno}: expected key = value", "--config")
        if key not in _CONVERTERS:
            raise UsageError(f"--config: line {lineno}: unknown key {key!r}", "--config")
        values[key] = value.strip()
    return values


def _model_params(values: dict, required: bool):
    present = [name for name in MODEL_FLAGS if name in values]
    if not required and not present:
        return None
    for name in MODEL_FLAGS:
        if name not in values:
            raise UsageError(f"--{name}: required", f"--{name}")
    try:
        return ModelParams(
            lam=values["lambda"],
            mu=values["mu"],
            a=values["a"],
            xi=values["xi"],
            M=values["M"],
            V=values["V"],
            m_beta=values.get("m-beta", 1.0),
        )
    except ModelError as exc:
        flag = _flag_for(exc.param)
        raise UsageError(f"{flag}: {exc}" if flag else str(exc), flag) from None


def parse_args(argv) -> RunConfig:
    """Validated run configuration; raises :class:`UsageError` on bad input."""
    ns = _build_parser().parse_args(list(argv))
    command = ns.command
    allowed = _COMMAND_FLAGS[command]

    raw = read_config(ns.config) if ns.config else {}
    raw = {k: v for k, v in raw.items() if k in allowed}
    for name in allowed:
        value = getattr(ns, name)
        if value is not None:
            raw[name] = value
    values = {name: _CONVERTERS[name](f"--{name}", value) for name, value in raw.items()}

    params = _model_params(values, required=command != "compare")
    if command in ("simulate", "compare") and "seed" not in values:
        raise UsageError("--seed: required", "--seed")
    if command == "cdf" and "grid" not in values:
        raise UsageError("--grid: required", "--grid")

    kind = values.get("kind", "joint")
    axes = {}
    if command == "transform":
        for name in ("z", "v", "theta"):
            if name not in _KIND_AXES[kind]:
                if name in values:
                    raise UsageError(f"--{name}: not used by --kind {kind}", f"--{name}")
                continue
            axes[name] = values.get(name, (_AXIS_DEFAULTS[name],))
            try:
                for x in axes[name]:
                    TransformQuery(**{name: x})
            except ModelError as exc:
                raise UsageError(f"--{name}: {exc}", f"--{name}") from None

    return RunConfig(
        command=command,
        params=params,
        n_runs=values.get("runs", DEFAULT_RUNS),
        seed=values.get("seed"),
        grid=values.get("grid"),
        output_format=values.get("format", "csv"),
        output_path=values.get("output"),
        kind=kind,
        axes=axes,
        strategy=Strategy(values.get("strategy", Strategy.EPOCH_FIRST.value)),
        workers=values.get("workers", 1),
        unsafe=values.get("unsafe", False),
    )


@dataclass
class Table:
    name: str
    columns: tuple
    rows: list


def _params_row(p: ModelParams):
    return [p.lam, p.mu, p.a, p.xi, p.M, p.V]


_PARAM_COLUMNS = ("lambda", "mu", "a", "xi", "M", "V")


def _analytic(cfg):
    p = cfg.params
    row = _params_row(p) + [mean_nodes_at_crossing(p), mean_weight_at_crossing(p)]
    return EXIT_OK, [Table("analytic", _PARAM_COLUMNS + ("E_N", "E_W"), [row])], None


def _transform(cfg):
    p, kind, axes = cfg.params, cfg.kind, cfg.axes
    if kind == "pgf":
        zs = np.array(axes["z"])
        rows = [[z, v] for z, v in zip(axes["z"], np.atleast_1d(pgf_nodes(zs, p)))]
        return EXIT_OK, [Table(kind, ("z", "value"), rows)], None
    if kind == "lst-weight":
        vs = np.array(axes["v"])
        rows = [[v, f] for v, f in zip(axes["v"], np.atleast_1d(lst_weight(vs, p)))]
        return EXIT_OK, [Table(kind, ("v", "value"), rows)], None
    if kind == "lst-time":
        ts = np.array(axes["theta"])
        rows = [[t, f] for t, f in zip(axes["theta"], np.atleast_1d(lst_time(ts, p)))]
        return EXIT_OK, [Table(kind, ("theta", "value"), rows)], None
    rows = []
    for z in axes["z"]:
        for v in axes["v"]:
            for t in axes["theta"]:
                value = joint_functional(TransformQuery(z, v, t), p)
                rows.append([z, v, t, p.m_beta, value])
    return EXIT_OK, [Table(kind, ("z", "v", "theta", "m_beta", "value"), rows)], None


def _cdf(cfg):
    curve = crossing_time_cdf_curve(cfg.grid, cfg.params, unsafe=cfg.unsafe)
    table = Table("cdf", ("theta", "F"), [list(r) for r in zip(curve.thetas, curve.values)])
    values = curve.values
    problems = []
    if np.any(np.diff(values) < 0):
        problems.append("F is not non-decreasing on the grid")
    if np.any((values < 0) | (values > 1)):
        problems.append("F leaves [0, 1]")
    if np.any(values[curve.thetas == 0.0] != 0.0):
        problems.append("F(0) != 0")
    status = EXIT_CHECK_FAILED if problems else EXIT_OK
    return status, [table], "; ".join(problems) or None


_RECORD_COLUMNS = (
    "index", "rho", "tau_pre", "tau_post", "nodes_pre", "nodes_post", "weight_pre", "weight_post",
)
_SUMMARY_COLUMNS = (
    "count", "mean_nodes", "mean_weight", "mean_tau", "se_nodes", "se_weight", "se_tau",
)


def _simulate(cfg):
    run_cfg = RealizationConfig(cfg.params, cfg.seed, cfg.strategy)
    summary, records = simulate_batch(run_cfg, cfg.n_runs, cfg.workers)
    rows = [
        [i, r.rho, r.tau_pre, r.tau_post, r.nodes_pre, r.nodes_post, r.weight_pre, r.weight_post]
        for i, r in enumerate(records)
    ]
    summary_row = [getattr(summary, c) for c in _SUMMARY_COLUMNS]
    tables = [
        Table("record", _RECORD_COLUMNS, rows),
        Table("summary", _SUMMARY_COLUMNS, [summary_row]),
    ]
    return EXIT_OK, tables, None


_COMPARE_COLUMNS = _PARAM_COLUMNS + (
    "analytic_N", "sample_N", "err_N", "analytic_W", "sample_W", "err_W", "pass",
)


def _compare(cfg):
    if cfg.params is None:
        rows = [row.model() for row in reconstructible_rows()]
    else:
        rows = [cfg.params]
    results = reproduce_table(rows, cfg.n_runs, cfg.seed, cfg.workers)
    out = [
        _params_row(r.params)
        + [r.analytic_nodes, r.sample_nodes, r.error_nodes]
        + [r.analytic_weight, r.sample_weight, r.error_weight, r.passed]
        for r in results
    ]
    fraction = pass_fraction(results)
    threshold = PASS_FRACTION if len(results) > 1 else 1.0
    if fraction >= threshold:
        return EXIT_OK, [Table("compare", _COMPARE_COLUMNS, out)], None
    message = f"{fraction:.0%} of rows within the 3-SE band, need {threshold:.0%}"
    return EXIT_CHECK_FAILED, [Table("compare", _COMPARE_COLUMNS, out)], message


_HANDLERS = {
    "analytic": _analytic,
    "transform": _transform,
    "cdf": _cdf,
    "simulate": _simulate,
    "compare": _compare,
}


def format_value(x) -> str:
    """Shortest round-trip text for floats, plain digits for integers."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return repr(float(x))


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    return float(x)


def render(tables, fmt: str) -> str:
    buf = io.StringIO()
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        for i, table in enumerate(tables):
            if i:
                buf.write("\n")
            writer.writerow(table.columns)
            writer.writerows([format_value(x) for x in row] for row in table.rows)
    elif fmt == "json-lines":
        for table in tables:
            for row in table.rows:
                obj = {"table": table.name}
                obj.update((c, _json_value(x)) for c, x in zip(table.columns, row))
                buf.write(json.dumps(obj) + "\n")
    else:
        for i, table in enumerate(tables):
            if i:
                buf.write("\n")
            cells = [list(table.columns)] + [[format_value(x) for x in row] for row in table.rows]
            widths = [max(len(r[j]) for r in cells) for j in range(len(table.columns))]
            buf.write(f"# {table.name}\n")
            for r in cells:
                buf.write("  ".join(s.rjust(w) for s, w in zip(r, widths)).rstrip() + "\n")
    return buf.getvalue()


def run(cfg: RunConfig):
    """(exit status, serialized output, diagnostic or None)."""
    try:
        status, tables, message = _HANDLERS[cfg.command](cfg)
    except ModelError as exc:
        flag = _flag_for(exc.param)
        return EXIT_USAGE, "", f"{flag}: {exc}" if flag else str(exc)
    return status, render(tables, cfg.output_format), message


def write_atomic(path: str, text: str):
    """Write through a temporary file in the same directory, then rename over ``path``."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".netexit-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_args(argv)
    except UsageError as exc:
        print(f"netexit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    status, text, message = run(cfg)
    if message:
        print(f"netexit: {message}", file=sys.stderr)
    if status == EXIT_USAGE:
        return status
    if cfg.output_path:
        try:
            write_atomic(cfg.output_path, text)
        except OSError as exc:
            print(f"netexit: error: --output: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        sys.stdout.write(text)
    return status
