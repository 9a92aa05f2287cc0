"""Job orchestration: dispatch solver methods, assemble deterministic reports.

A job names a problem and a method set; the runner cross-tabulates the
harmonic-balance exponents, the monodromy baseline at the configured step
count, an "exact" reference defined operationally as monodromy at 10x the
steps, the commuting closed form when the structure is detected, the second
moment S^2 of the decaying harmonic-balance branch against an
initial-condition-matched RK4 trajectory, and the scalar boundedness
classification when a Hill form exists.

Reports serialize through a canonical emitter (17 significant digits, LF,
fixed key order) so identical configs produce byte-identical output.  Wall
times never enter the report body; the CLI prints them to stderr.
"""

import json
import math

import numpy as np

from . import commuting as commuting_mod
from . import harmonic_balance as hb
from . import monodromy
from . import problems
from ._version import __version__
from .schemas import (
    CommutingReport,
    ComplexVal,
    FloquetReport,
    JobConfig,
    MonodromyReport,
    ReferenceReport,
    Report,
    ReportMeta,
    SolveRow,
)

__all__ = [
    "ConfigError",
    "build_problem",
    "scalar_form",
    "integrable_form",
    "planar_form",
    "run_job",
    "run_sweep",
    "export_solution",
    "report_json",
    "report_csv",
    "canonical_json",
]

_SAMPLES_PER_PERIOD = 1024


class ConfigError(ValueError):
    """Configuration is syntactically valid but semantically unusable."""


def build_problem(spec):
    try:
        return spec.build()
    except problems.ProblemError as exc:
        raise ConfigError(str(exc)) from exc


def scalar_form(problem):
    """The scalar second-order view (identity, or off-diagonal elimination)."""
    if isinstance(problem, problems.ScalarODE):
        return problem
    return problems.system_to_scalar(problem)


def integrable_form(problem):
    """A system with evaluable ``A(t)`` for RK4, preserving the input states."""
    if isinstance(problem, problems.PlanarSystem):
        return problem
    if problem.leading_constant() is not None:
        return problems.scalar_to_system(problem)
    return problems.CompanionForm(problem)


def planar_form(problem):
    """Trig-polynomial planar view for structure detection, or None."""
    if isinstance(problem, problems.PlanarSystem):
        return problem
    if problem.leading_constant() is not None:
        return problems.scalar_to_system(problem)
    return None


def _companion_of(ode):
    """System whose states are (x, x') for the given scalar ODE."""
    if ode.leading_constant() is not None:
        return problems.scalar_to_system(ode)
    return problems.CompanionForm(ode)


def _initial_state(sol):
    """Complex (x(0), x'(0)) of the reconstructed solution eta(t) e^{lambda t}."""
    eta0 = sol.eta.evaluate(0.0)
    deta0 = sol.eta.differentiate().evaluate(0.0)
    return np.array([eta0, deta0 + sol.lambda_ * eta0], dtype=complex)


def _matched_reference(ode, sol, grid, steps):
    """RK4 trajectory of (x, x') with initial conditions matched to ``sol``."""
    per_interval = max(4, math.ceil(10.0 * steps / max(grid.size - 1, 1)))
    phi = monodromy.fundamental_on_grid(_companion_of(ode), grid, per_interval)
    return phi.astype(complex) @ _initial_state(sol)


def _second_moment_row(ode, sols, steps):
    decaying = min(sols, key=lambda s: s.lambda_.real)
    T = ode.period
    grid = np.linspace(0.0, T, _SAMPLES_PER_PERIOD + 1)
    xa = hb.reconstruct(decaying, grid)
    xref = _matched_reference(ode, decaying, grid, steps)[:, 0]
    return hb.second_moment(xa, xref, grid)


def _sorted_pair(pair):
    return sorted((complex(z) for z in pair), key=lambda z: (z.real, z.imag))


def _solve_row(problem, cfg):
    run_hb = cfg.method in ("hb", "all")
    run_mono = cfg.method in ("monodromy", "all")
    run_comm = cfg.method in ("commuting", "all")
    row = SolveRow()
    failures = []

    ode = None
    try:
        ode = scalar_form(problem)
    except problems.ProblemError as exc:
        if run_hb:
            failures.append(f"hb: {exc}")
        run_hb = False

    sols = None
    if run_hb:
        try:
            sols = hb.select_exponents(ode, cfg.n)
            row.hb = [FloquetReport.of(s) for s in sols]
        except Exception as exc:
            failures.append(f"hb: {exc}")

    if run_mono:
        try:
            sysm = integrable_form(problem)
            row.monodromy = MonodromyReport.of(monodromy.monodromy_matrix(sysm, cfg.steps))
            ref = monodromy.monodromy_matrix(sysm, 10 * cfg.steps)
            row.reference = ReferenceReport(
                exponents=[ComplexVal.of(z) for z in _sorted_pair(ref.exponents)],
                steps=ref.steps,
            )
        except Exception as exc:
            failures.append(f"monodromy: {exc}")

    if run_comm:
        ps = planar_form(problem)
        cs = commuting_mod.detect_structure(ps) if ps is not None else None
        if cs is not None:
            lam_plus, lam_minus = commuting_mod.closed_form_exponents(cs)
            row.commuting = CommutingReport(
                alpha=cs.alpha,
                beta=cs.beta,
                gamma=ComplexVal.of(cs.gamma),
                exponents=[ComplexVal.of(z) for z in _sorted_pair((lam_plus, lam_minus))],
                classification=commuting_mod.classify(cs).value,
            )
        elif cfg.method == "commuting":
            failures.append("commuting: structure not detected (not of the commuting family)")

    if sols is not None and ode is not None:
        try:
            row.s_squared = _second_moment_row(ode, sols, cfg.steps)
        except Exception as exc:
            failures.append(f"s_squared: {exc}")

    if ode is not None and ode.leading_constant() is not None:
        try:
            hill = problems.hill_transform(ode)
            row.boundedness = problems.boundedness_criterion(hill.f).value
        except problems.ProblemError:
            pass  # complex-valued f: no classification

    row.status = "ok" if not failures else "; ".join(failures)
    return row


def _meta(rows):
    ok = all(r.status == "ok" for r in rows)
    return ReportMeta(package="floquet-hb", version=__version__, status="ok" if ok else "partial")


def run_job(cfg: JobConfig) -> Report:
    if cfg.sweep is not None:
        raise ConfigError("config has a sweep block; use the sweep entry point")
    problem = build_problem(cfg.problem)
    rows = [_solve_row(problem, cfg)]
    return Report(config=cfg, rows=rows, meta=_meta(rows))


def run_sweep(cfg: JobConfig) -> Report:
    if cfg.sweep is None:
        raise ConfigError("sweep block missing")
    if cfg.problem.name is None:
        raise ConfigError("sweeps need a named catalog problem with parameters")
    entries = problems.catalog_entries()
    if cfg.problem.name not in entries:
        raise ConfigError(f"unknown catalog problem {cfg.problem.name!r}")
    allowed = entries[cfg.problem.name]
    if cfg.sweep.param not in allowed:
        raise ConfigError(
            f"sweep parameter {cfg.sweep.param!r} is not a parameter of "
            f"{cfg.problem.name!r} (has: {', '.join(allowed) or 'none'})"
        )
    values = np.linspace(cfg.sweep.start, cfg.sweep.stop, cfg.sweep.count)
    rows = []
    for v in sorted(float(v) for v in values):
        params = dict(cfg.problem.params)
        params[cfg.sweep.param] = v
        try:
            problem = problems.catalog(cfg.problem.name, **params)
            row = _solve_row(problem, cfg)
        except Exception as exc:
            row = SolveRow(status=f"error: {exc}")
        row.param = {cfg.sweep.param: v}
        rows.append(row)
    return Report(config=cfg, rows=rows, meta=_meta(rows))


def export_solution(cfg: JobConfig, periods=1, points_per_period=_SAMPLES_PER_PERIOD) -> str:
    """CSV of the decaying HB branch against the matched reference trajectory.

    Columns: t, Re/Im of x_A, Re/Im of x_ref, |x_A - x_ref|, over
    ``[0, periods*T]``.
    """
    if cfg.sweep is not None:
        raise ConfigError("export takes a single problem, not a sweep")
    problem = build_problem(cfg.problem)
    ode = scalar_form(problem)
    sols = hb.select_exponents(ode, cfg.n)
    decaying = min(sols, key=lambda s: s.lambda_.real)
    grid = np.linspace(0.0, periods * ode.period, periods * points_per_period + 1)
    xa = hb.reconstruct(decaying, grid)
    xref = _matched_reference(ode, decaying, grid, cfg.steps)[:, 0]
    lines = ["t,x_a_re,x_a_im,x_ref_re,x_ref_im,abs_error"]
    err = np.abs(xa - xref)
    for i in range(grid.size):
        lines.append(
            ",".join(
                _fmt(v)
                for v in (
                    grid[i],
                    xa[i].real,
                    xa[i].imag,
                    xref[i].real,
                    xref[i].imag,
                    err[i],
                )
            )
        )
    return "\n".join(lines) + "\n"


# -- serialization -------------------------------------------------------------


def _fmt(x):
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise ValueError("non-finite value in report")
    return format(x, ".17g")


def canonical_json(data, _indent=0) -> str:
    """Deterministic JSON: insertion-ordered keys, 17-significant-digit floats."""
    pad = "  " * _indent
    inner = "  " * (_indent + 1)
    if isinstance(data, dict):
        if not data:
            return "{}"
        parts = [
            f"{inner}{json.dumps(str(k))}: {canonical_json(v, _indent + 1)}"
            for k, v in data.items()
        ]
        return "{\n" + ",\n".join(parts) + "\n" + pad + "}"
    if isinstance(data, (list, tuple)):
        if not data:
            return "[]"
        parts = [f"{inner}{canonical_json(v, _indent + 1)}" for v in data]
        return "[\n" + ",\n".join(parts) + "\n" + pad + "]"
    if isinstance(data, bool):
        return "true" if data else "false"
    if data is None:
        return "null"
    if isinstance(data, int):
        return str(data)
    if isinstance(data, float):
        return _fmt(data)
    if isinstance(data, str):
        return json.dumps(data)
    raise TypeError(f"cannot serialize {type(data).__name__}")


def report_json(report: Report) -> str:
    return canonical_json(report.model_dump(by_alias=True)) + "\n"


_CSV_COLUMNS = (
    "lambda_e1_re",
    "lambda_e1_im",
    "lambda_e2_re",
    "lambda_e2_im",
    "lambda_A1_re",
    "lambda_A1_im",
    "lambda_A2_re",
    "lambda_A2_im",
    "lambda_num1_re",
    "lambda_num1_im",
    "lambda_num2_re",
    "lambda_num2_im",
    "S2",
    "E1",
    "E2",
    "status",
)


def report_csv(report: Report) -> str:
    """Table-shaped view: sweep parameter, reference / HB / monodromy exponent
    pairs (each sorted by real part), S^2 and per-branch residuals."""
    param_name = report.config.sweep.param if report.config.sweep else None
    header = ([param_name] if param_name else []) + list(_CSV_COLUMNS)
    lines = [",".join(header)]
    for row in report.rows:
        cells = []
        if param_name:
            cells.append(_fmt(row.param.get(param_name, math.nan)))
        if row.reference is not None:
            for z in row.reference.exponents:
                cells += [_fmt(z.re), _fmt(z.im)]
        else:
            cells += [""] * 4
        if row.hb is not None:
            for rep in row.hb:
                cells += [_fmt(rep.lambda_re), _fmt(rep.lambda_im)]
        else:
            cells += [""] * 4
        if row.monodromy is not None:
            for z in row.monodromy.exponents:
                cells += [_fmt(z.re), _fmt(z.im)]
        else:
            cells += [""] * 4
        cells.append(_fmt(row.s_squared) if row.s_squared is not None else "")
        if row.hb is not None:
            cells += [_fmt(rep.E) for rep in row.hb]
        else:
            cells += ["", ""]
        status = row.status.replace('"', "'")
        cells.append(f'"{status}"' if ("," in status or " " in status) else status)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"
