"""Command-line front end: a thin client over the in-process job runner.

Subcommands: ``solve``, ``sweep``, ``export`` (each taking a JSON config file
path or ``-`` for stdin, with flags overriding file values), ``catalog``
(lists built-in problems), and ``serve`` (runs the HTTP service).

Exit codes: 0 success; 2 config/parse errors; 3 solver degeneracy (a report
is still written, with failing rows marked in their status column); 4 I/O
errors.  Wall-clock timing goes to stderr so report bytes stay deterministic.
"""

import argparse
import json
import sys
import time
from pathlib import Path

from pydantic import ValidationError

from . import jobs, problems
from ._version import __version__
from .schemas import JobConfig

__all__ = ["main", "entrypoint"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4


class _CliConfigError(Exception):
    pass


def _parse_sweep_flag(text):
    # param=from:to:count
    try:
        param, rest = text.split("=", 1)
        lo, hi, count = rest.split(":")
        return {"param": param.strip(), "from": float(lo), "to": float(hi), "count": int(count)}
    except ValueError:
        raise _CliConfigError(
            f"bad --sweep {text!r}; expected param=from:to:count"
        ) from None


def _parse_param_flag(text):
    try:
        key, value = text.split("=", 1)
        return key.strip(), float(value)
    except ValueError:
        raise _CliConfigError(f"bad --param {text!r}; expected name=value") from None


def _read_config_data(path):
    if path is None:
        return {}
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise _CliConfigError(f"cannot read config {path!r}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _CliConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise _CliConfigError("config must be a JSON object")
    return data


def _load_config(args):
    data = _read_config_data(args.config)
    if getattr(args, "problem", None):
        data["problem"] = {"name": args.problem, "params": {}}
    if getattr(args, "param", None):
        problem = data.setdefault("problem", {})
        params = problem.setdefault("params", {})
        for text in args.param:
            key, value = _parse_param_flag(text)
            params[key] = value
    if getattr(args, "method", None):
        data["method"] = args.method
    if getattr(args, "n", None) is not None:
        data["n"] = args.n
    if getattr(args, "steps", None) is not None:
        data["steps"] = args.steps
    if getattr(args, "sweep", None):
        data["sweep"] = _parse_sweep_flag(args.sweep)
    if getattr(args, "out", None) or getattr(args, "format", None):
        output = data.setdefault("output", {})
        if args.out:
            output["path"] = args.out
        if getattr(args, "format", None):
            output["format"] = args.format
        output.setdefault("format", "json")
        if "path" not in output:
            raise _CliConfigError("--format without --out or an output.path in the config")
    try:
        return JobConfig.model_validate(data)
    except ValidationError as exc:
        raise _CliConfigError(str(exc)) from exc


def _emit(text, cfg):
    path = cfg.output.path if cfg.output is not None else None
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).write_text(text)
    print(f"wrote {path}", file=sys.stderr)


def _render_report(report, cfg):
    fmt = cfg.output.format if cfg.output is not None else "json"
    return jobs.report_json(report) if fmt == "json" else jobs.report_csv(report)


def _run_report_command(args, runner):
    cfg = _load_config(args)
    t0 = time.perf_counter()
    report = runner(cfg)
    dt = time.perf_counter() - t0
    print(f"completed in {dt:.3f}s", file=sys.stderr)
    _emit(_render_report(report, cfg), cfg)
    return EXIT_OK if report.meta.status == "ok" else EXIT_SOLVER


def _cmd_solve(args):
    return _run_report_command(args, jobs.run_job)


def _cmd_sweep(args):
    return _run_report_command(args, jobs.run_sweep)


def _cmd_export(args):
    cfg = _load_config(args)
    t0 = time.perf_counter()
    csv = jobs.export_solution(cfg, periods=args.periods, points_per_period=args.points)
    dt = time.perf_counter() - t0
    print(f"completed in {dt:.3f}s", file=sys.stderr)
    _emit(csv, cfg)
    return EXIT_OK


def _cmd_catalog(args):
    for name, params in sorted(problems.catalog_entries().items()):
        sys.stdout.write(f"{name}({', '.join(params)})\n" if params else f"{name}\n")
    return EXIT_OK


def _cmd_serve(args):
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def _add_common_flags(p, sweep_flag):
    p.add_argument("config", nargs="?", help="JSON config file path, or - for stdin")
    p.add_argument("--problem", help="catalog problem name (instead of a config file)")
    p.add_argument(
        "--param", action="append", metavar="NAME=VALUE", help="catalog parameter (repeatable)"
    )
    p.add_argument("--method", choices=["hb", "monodromy", "commuting", "all"])
    p.add_argument("--n", type=int, help="harmonic-balance order")
    p.add_argument("--steps", type=int, help="RK4 steps per period")
    p.add_argument("--out", help="output file path (default: stdout)")
    if sweep_flag:
        p.add_argument("--sweep", metavar="PARAM=FROM:TO:COUNT", help="sweep grid")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="floquet-hb",
        description="Floquet exponents of periodic linear ODEs by harmonic "
        "balance, with monodromy and closed-form cross-checks.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one problem and emit a report")
    _add_common_flags(p, sweep_flag=False)
    p.add_argument("--format", choices=["json", "csv"], help="report format (with --out)")
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("sweep", help="solve over a parameter grid")
    _add_common_flags(p, sweep_flag=True)
    p.add_argument("--format", choices=["json", "csv"], help="report format (with --out)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("export", help="sample the solution against the reference")
    _add_common_flags(p, sweep_flag=False)
    p.add_argument("--periods", type=int, default=1, help="periods to cover (default 1)")
    p.add_argument(
        "--points", type=int, default=1024, help="grid points per period (default 1024)"
    )
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("catalog", help="list built-in problems")
    p.set_defaults(func=_cmd_catalog)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors and 0 on --help/--version
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (_CliConfigError, jobs.ConfigError, problems.ProblemError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


def entrypoint():
    raise SystemExit(main())
