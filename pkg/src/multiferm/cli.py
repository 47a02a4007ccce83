"""Command-line driver: run verification suites and write JSON or CSV reports.

Exit status: 0 if every check passes, 1 if any check fails, 2 on a
configuration or resource error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import platform
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np
import scipy

from . import modular as mod
from . import suites
from .suites import CheckRecord

COMMANDS = {
    "verify-iso": "isomorphism",
    "symmetries": "symmetries",
    "modular": "modular",
    "ramond": "ramond",
}
DEFAULT_CUTOFF = {"isomorphism": Fraction(11, 2), "symmetries": Fraction(15, 2), "ramond": Fraction(10)}
DEFAULT_SAMPLES = {"isomorphism": 200, "modular": 100, "ramond": 50}

# conventions fixed by the normalization audits
CONSTANTS = {
    "current_smearing": "j(f) = oint f(z) j(z) dz/(2 pi i); j(1) = j_0",
    "virasoro_from_fourier": "L_n = 2 pi T_n",
    "gauge_field": "psi_sa(z) = sqrt(z) psi_hat(z), Im z > 0",
    "diffeo_generator": "f(Z) = Z^(m+1) acts as -[L_m, .]",
    "ramond_estimator": "weight (1 - x^2)^6, R = floor(cutoff/2), leading Euler-Maclaurin term removed",
    "stress_mode_charge_shift": 1 / 32,
}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "multiferm verification report",
    "type": "object",
    "required": ["format_version", "suites", "config", "records", "summary", "environment", "constants", "tables"],
    "additionalProperties": False,
    "properties": {
        "format_version": {"const": 1},
        "suites": {"type": "array", "items": {"enum": list(suites.SUITES)}},
        "config": {
            "type": "object",
            "required": ["n", "cutoff", "tolerances", "intervals", "samples", "seed"],
            "additionalProperties": False,
            "properties": {
                "n": {"type": ["integer", "null"]},
                "cutoff": {"type": ["string", "null"]},
                "tolerances": {"type": "object", "additionalProperties": {"type": "number", "exclusiveMinimum": 0}},
                "intervals": {"type": ["array", "null"], "items": {"type": "number"}},
                "samples": {"type": ["integer", "null"]},
                "seed": {"type": "integer"},
            },
        },
        "records": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["suite", "check_id", "anchor", "value", "expected", "tol", "passed", "status", "note"],
                "additionalProperties": False,
                "properties": {
                    "suite": {"type": "string"},
                    "check_id": {"type": "string"},
                    "anchor": {"type": "string", "minLength": 1},
                    "value": {"type": ["number", "null"]},
                    "expected": {"type": "number"},
                    "tol": {"type": "number", "minimum": 0},
                    "passed": {"type": "boolean"},
                    "status": {"enum": ["pass", "fail", "error"]},
                    "note": {"type": "string"},
                },
            },
        },
        "summary": {
            "type": "object",
            "required": ["total", "passed", "failed", "errors", "exit_code"],
            "additionalProperties": False,
            "properties": {
                "total": {"type": "integer"},
                "passed": {"type": "integer"},
                "failed": {"type": "integer"},
                "errors": {"type": "integer"},
                "exit_code": {"enum": [0, 1, 2]},
            },
        },
        "environment": {"type": "object", "additionalProperties": {"type": "string"}},
        "constants": {"type": "object"},
        "tables": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["header", "rows"],
                "properties": {
                    "header": {"type": "array", "items": {"type": "string"}},
                    "rows": {"type": "array", "items": {"type": "array", "items": {"type": ["number", "null"]}}},
                },
            },
        },
    },
}


class ConfigError(ValueError):
    pass


@dataclass
class SuiteConfig:
    suites: tuple = suites.SUITES
    n: int | None = None
    cutoff: Fraction | None = None
    tolerances: dict = field(default_factory=dict)
    intervals: tuple | None = None  # endpoint phases u1, v1, u2, v2, ...
    samples: int | None = None
    seed: int = 0
    out: str | None = None
    fmt: str = "json"

    def __post_init__(self):
        for k, v in self.tolerances.items():
            if not v > 0:
                raise ConfigError(f"tolerance {k} must be positive")
        if self.samples is not None and self.samples < 1:
            raise ConfigError("samples must be positive")
        if self.n is not None and not 1 <= self.n <= 8:
            raise ConfigError("n must lie in 1..8")
        if self.fmt not in ("json", "csv"):
            raise ConfigError("format must be json or csv")
        if self.intervals is not None:
            self.family()  # validates

    def family(self) -> mod.IntervalFamily | None:
        if self.intervals is None:
            return None
        ph = list(self.intervals)
        if len(ph) < 2 or len(ph) % 2:
            raise ConfigError("--intervals needs an even number of endpoint phases")
        try:
            return mod.IntervalFamily(tuple(zip(ph[0::2], ph[1::2])))
        except mod.IntervalError as exc:
            raise ConfigError(str(exc)) from exc

    def as_dict(self) -> dict:
        return {"n": self.n, "cutoff": None if self.cutoff is None else str(self.cutoff),
                "tolerances": dict(sorted(self.tolerances.items())),
                "intervals": None if self.intervals is None else [float(x) for x in self.intervals],
                "samples": self.samples, "seed": self.seed}


@dataclass
class Report:
    suites: tuple
    config: dict
    records: list  # (suite, CheckRecord)
    tables: dict = field(default_factory=dict)  # name -> (header, rows)

    @property
    def exit_code(self) -> int:
        if any(r.status == "error" for _, r in self.records):
            return 2
        return 0 if all(r.passed for _, r in self.records) else 1

    def summary(self) -> dict:
        recs = [r for _, r in self.records]
        return {"total": len(recs), "passed": sum(r.passed for r in recs),
                "failed": sum(r.status == "fail" for r in recs),
                "errors": sum(r.status == "error" for r in recs), "exit_code": self.exit_code}

    def as_dict(self) -> dict:
        records = []
        for suite, r in self.records:
            d = r.as_dict()
            d["suite"] = suite
            records.append(d)
        return {
            "format_version": 1,
            "suites": list(self.suites),
            "config": self.config,
            "records": records,
            "summary": self.summary(),
            "environment": environment(),
            "constants": CONSTANTS,
            "tables": {k: {"header": h, "rows": rows} for k, (h, rows) in sorted(self.tables.items())},
        }


def environment() -> dict:
    return {"python": platform.python_version(), "numpy": np.__version__, "scipy": scipy.__version__,
            "machine": platform.machine(), "system": platform.system()}


# ------------------------------------------------------------ serialization

def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if "e" not in s and "." not in s and "n" not in s:
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """Deterministic JSON: sorted keys, floats with 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(obj[k], indent, _level + 1)}" for k in sorted(obj)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def records_csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["suite", "check_id", "anchor", "value", "expected", "tol", "status", "note"])
    for suite, r in report.records:
        w.writerow([suite, r.check_id, r.anchor, _fmt_float(r.value), _fmt_float(r.expected),
                    _fmt_float(r.tol), r.status, r.resource_error or r.note])
    return buf.getvalue()


def table_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt_float(float(v)) for v in row])
    return buf.getvalue()


# ------------------------------------------------------------ running

def run_suite(config: SuiteConfig) -> Report:
    records: list = []
    tables: dict = {}
    tol = config.tolerances
    for name in config.suites:
        samples = config.samples or DEFAULT_SAMPLES.get(name)
        cutoff = config.cutoff if config.cutoff is not None else DEFAULT_CUTOFF.get(name)
        if name == "isomorphism":
            ns = (config.n,) if config.n else (2, 3)
            recs = suites.suite_isomorphism(ns, cutoff, samples, config.seed, tol)
        elif name == "symmetries":
            recs = suites.suite_symmetries(cutoff, tols=tol)
        elif name == "modular":
            fam = config.family()
            ns = (config.n,) if config.n else (2, 3)
            fams = [fam] if fam else suites.default_families(ns)
            recs = suites.suite_modular(ns, fams, samples, config.seed, tol)
            for f in fams:
                geo = mod.ModularGeometry(f)
                geo.prepare(geo.X0 * 10 ** -0.7, geo.X0 * 10 ** 1.2)
                n = f.n
                header = ["X"] + [f"O_{i + 1}{j + 1}" for i in range(n) for j in range(n)]
                tag = f"n{n}" + ("" if f.symmetric else "_general")
                tables[f"modular_O_{tag}"] = (header, suites.trajectory(geo))
        elif name == "ramond":
            if cutoff.denominator != 1:
                raise ConfigError("the Ramond cutoff is an integer")
            rows: list = []
            recs = suites.suite_ramond(int(cutoff), samples, config.seed, tol, table=rows)
            tables["ramond_L0"] = (["cutoff", "raw", "correction", "value", "abs_error"], rows)
        else:
            raise ConfigError(f"unknown suite {name}")
        records.extend((name, r) for r in recs)
    return Report(tuple(config.suites), config.as_dict(), records, tables)


def _parse_cutoff(s: str) -> Fraction:
    try:
        c = Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad cutoff {s!r}") from exc
    if c <= 0 or (2 * c).denominator != 1:
        raise argparse.ArgumentTypeError("cutoff must be a positive multiple of 1/2")
    return c


def _parse_tol(items) -> dict:
    out = {}
    for item in items or []:
        key, _, val = item.rpartition("=")
        try:
            out[key or "*"] = float(val)
        except ValueError as exc:
            raise ConfigError(f"bad tolerance {item!r}") from exc
    return out


def _parse_intervals(s: str | None):
    if s is None:
        return None
    try:
        return tuple(float(x) for x in s.split(","))
    except ValueError as exc:
        raise ConfigError(f"bad --intervals {s!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="multiferm", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for cmd in list(COMMANDS) + ["report-all"]:
        q = sub.add_parser(cmd)
        q.add_argument("--n", type=int)
        q.add_argument("--cutoff", type=_parse_cutoff)
        q.add_argument("--tol", action="append", metavar="[KEY=]VALUE",
                       help="tolerance override; a bare value applies to every check")
        q.add_argument("--intervals", metavar="u1,v1,...", help="arc endpoint phases in radians")
        q.add_argument("--samples", type=int)
        q.add_argument("--seed", type=int, default=0)
        q.add_argument("--out", help="output file (default: stdout)")
        q.add_argument("--format", choices=("json", "csv"), default="json")
    return p


def config_from_args(args) -> SuiteConfig:
    names = suites.SUITES if args.command == "report-all" else (COMMANDS[args.command],)
    return SuiteConfig(suites=tuple(names), n=args.n, cutoff=args.cutoff, tolerances=_parse_tol(args.tol),
                       intervals=_parse_intervals(args.intervals), samples=args.samples, seed=args.seed,
                       out=args.out, fmt=args.format)


def write_report(report: Report, config: SuiteConfig) -> None:
    if config.fmt == "json":
        text = dumps(report.as_dict()) + "\n"
        if config.out:
            Path(config.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
        return
    text = records_csv(report)
    if config.out:
        out = Path(config.out)
        out.write_text(text, encoding="utf-8")
        for name, (header, rows) in sorted(report.tables.items()):
            out.with_name(f"{out.stem}_{name}.csv").write_text(table_csv(header, rows), encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    try:
        config = config_from_args(args)
        report = run_suite(config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    write_report(report, config)
    s = report.summary()
    print(f"{s['passed']}/{s['total']} checks passed, {s['failed']} failed, {s['errors']} errors",
          file=sys.stderr)
    for suite, r in report.records:
        if not r.passed:
            print(f"  {r.status.upper()} {r.check_id} [{r.anchor}]: value {r.value:.6g}, expected "
                  f"{r.expected:.6g}, tol {r.tol:.1e}", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
