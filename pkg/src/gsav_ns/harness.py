"""Time-step sweeps, observed rates, table/CSV output and stability probes."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .grid import GridSpec, l2_norm_velocity
from .linsolve import DEFAULT_TOL
from .mms import ErrorNorms, error_norms, eval_exact, get_example
from .stepper import (FlowState, RunAborted, SolverConfig, StepRecord,
                      initialize, initialize_exact, mms_config, run)

CSV_FIELDS = ("dt", "e_u_linf", "rate_u", "grad_e_u_linf", "rate_gu",
              "e_p_linf", "rate_p", "grad_e_p_l2", "rate_gp")
NORM_FIELDS = ("e_u_linf", "grad_e_u_linf", "e_p_linf", "grad_e_p_l2")


def compute_rate(e_coarse: float, e_fine: float) -> float:
    """Observed order for a halved step, ``log2(e_coarse / e_fine)``."""
    if not (e_coarse > 0 and e_fine > 0):
        raise ValueError(f"rates need positive errors, got {e_coarse}, {e_fine}")
    return math.log2(e_coarse / e_fine)


@dataclass(frozen=True)
class TableNorms:
    e_u_linf: float
    grad_e_u_linf: float
    e_p_linf: float
    grad_e_p_l2: float


def accumulate_norms(trace: Sequence[ErrorNorms], dt: float) -> TableNorms:
    """Max-in-time of the spatial norms, except ``sqrt(dt * sum)`` for the pressure gradient."""
    if not trace:
        raise ValueError("cannot accumulate an empty error trace")
    return TableNorms(
        e_u_linf=max(e.e_u for e in trace),
        grad_e_u_linf=max(e.grad_e_u for e in trace),
        e_p_linf=max(e.e_p for e in trace),
        grad_e_p_l2=math.sqrt(dt * sum(e.grad_e_p ** 2 for e in trace)),
    )


@dataclass(frozen=True)
class MonitorSummary:
    min_xi: float
    max_xi: float
    max_one_minus_xi: float
    min_r: float
    # R strictly decreases on every step
    r_monotone: bool
    # R decreases exactly on the steps where g < 0
    r_tracks_dissipation: bool
    max_u_norm: float
    all_finite: bool


def summarize_monitors(records: Sequence[StepRecord], r0: float,
                       u_norms: Sequence[float] = ()) -> MonitorSummary:
    rs = np.array([r0] + [rec.r for rec in records])
    xis = np.array([rec.xi for rec in records]) if records else np.array([1.0])
    gs = np.array([rec.g for rec in records])
    dec = rs[1:] < rs[:-1]
    return MonitorSummary(
        min_xi=float(xis.min()),
        max_xi=float(xis.max()),
        max_one_minus_xi=float(np.abs(1.0 - xis).max()),
        min_r=float(rs.min()),
        r_monotone=bool(dec.all()),
        r_tracks_dissipation=bool(np.all(dec[gs < 0]) and np.all(~dec[gs > 0])),
        max_u_norm=float(max(u_norms)) if len(u_norms) else float("nan"),
        all_finite=bool(np.isfinite(rs).all() and np.isfinite(xis).all()
                        and np.isfinite(list(u_norms)).all()),
    )


@dataclass
class SweepConfig:
    example: str = "1"
    nu: float = 1.0
    nx: int = 250
    dt_list: Sequence[float] = (1 / 10, 1 / 20, 1 / 40, 1 / 80)
    t_final: float = 1.0
    k0: float = 1.0
    lin_tol: float = DEFAULT_TOL
    preconditioner: str = "spectral"
    jobs: int = 1

    def __post_init__(self):
        dts = list(self.dt_list)
        if not dts:
            raise ValueError("dt_list is empty")
        if any(b >= a for a, b in zip(dts, dts[1:])):
            raise ValueError("dt_list must be strictly decreasing")
        for dt in dts:
            ratio = self.t_final / dt
            if abs(ratio - round(ratio)) > 1e-12 * max(1.0, ratio):
                raise ValueError(f"t_final/dt = {ratio!r} is not integral")
        get_example(self.example)
        GridSpec(self.nx, self.nx)


@dataclass
class SweepRow:
    dt: float
    norms: Optional[TableNorms] = None
    monitors: Optional[MonitorSummary] = None
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


@dataclass
class ConvergenceReport:
    config: SweepConfig
    rows: list[SweepRow] = field(default_factory=list)

    def rates(self, name: str) -> list[Optional[float]]:
        """Per-row rates for one norm column; ``None`` where undefined."""
        out: list[Optional[float]] = [None]
        for prev, cur in zip(self.rows, self.rows[1:]):
            if prev.failed or cur.failed:
                out.append(None)
            else:
                out.append(compute_rate(getattr(prev.norms, name), getattr(cur.norms, name)))
        return out

    def column(self, name: str) -> list[Optional[float]]:
        return [None if r.failed else getattr(r.norms, name) for r in self.rows]

    @property
    def any_failed(self) -> bool:
        return any(r.failed for r in self.rows)


def run_case(example, nu: float, nx: int, dt: float, t_final: float, k0: float,
             lin_tol: float, preconditioner: str = "spectral"):
    """One manufactured-solution run; returns ``(TableNorms, MonitorSummary, records)``."""
    ex = get_example(example)
    cfg = mms_config(ex, GridSpec(nx, nx), nu, dt, t_final, k0=k0, lin_tol=lin_tol,
                     preconditioner=preconditioner)
    state = initialize_exact(cfg, ex)
    errs: list[ErrorNorms] = []
    u_norms: list[float] = []

    def collect(s: FlowState, _rec):
        errs.append(error_norms(s, ex, s.t))
        u_norms.append(l2_norm_velocity(s.u))

    _, records = run(cfg, state, callback=collect)
    return (accumulate_norms(errs, dt), summarize_monitors(records, state.sav.r, u_norms),
            records)


def _sweep_row(cfg: SweepConfig, dt: float) -> SweepRow:
    try:
        norms, mon, _ = run_case(cfg.example, cfg.nu, cfg.nx, dt, cfg.t_final, cfg.k0,
                                 cfg.lin_tol, cfg.preconditioner)
    except (RunAborted, ValueError, ArithmeticError) as exc:
        return SweepRow(dt=dt, error=str(exc))
    return SweepRow(dt=dt, norms=norms, monitors=mon)


def run_sweep(cfg: SweepConfig) -> ConvergenceReport:
    """Run every step size of the sweep; failed rows are recorded, not raised."""
    dts = list(cfg.dt_list)
    if cfg.jobs > 1 and len(dts) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(_sweep_row, [cfg] * len(dts), dts))
    else:
        rows = [_sweep_row(cfg, dt) for dt in dts]
    return ConvergenceReport(config=cfg, rows=rows)


def _fmt_e(x: Optional[float]) -> str:
    return "" if x is None else f"{x:.6e}"


def _fmt_rate(x: Optional[float]) -> str:
    return "" if x is None else f"{x:.4f}"


def emit_report(report: ConvergenceReport, fmt: str = "csv") -> str:
    """Render as CSV (``CSV_FIELDS`` header) or as a fixed-width table."""
    rates = {name: report.rates(name) for name in NORM_FIELDS}
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_FIELDS)
        for k, row in enumerate(report.rows):
            cells = [f"{row.dt:.6e}"]
            for name in NORM_FIELDS:
                cells.append(_fmt_e(None if row.failed else getattr(row.norms, name)))
                cells.append(_fmt_rate(rates[name][k]))
            writer.writerow(cells)
        return buf.getvalue()
    if fmt == "text":
        head = ("dt", "|e_u|_linf", "Rate", "|grad e_u|_linf", "Rate",
                "|e_p|_linf", "Rate", "|grad e_p|_l2", "Rate")
        widths = (8, 12, 6, 16, 6, 12, 6, 14, 6)
        lines = ["  ".join(h.ljust(w) for h, w in zip(head, widths))]
        for k, row in enumerate(report.rows):
            n = round(1.0 / row.dt)
            dt_s = f"1/{n}" if abs(n * row.dt - 1.0) < 1e-12 else f"{row.dt:.4g}"
            if row.failed:
                lines.append(f"{dt_s.ljust(widths[0])}  FAILED: {row.error}")
                continue
            cells = [dt_s]
            for name in NORM_FIELDS:
                cells.append(f"{getattr(row.norms, name):.2E}")
                r = rates[name][k]
                cells.append("---" if r is None else f"{r:.2f}")
            lines.append("  ".join(c.ljust(w) for c, w in zip(cells, widths)))
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown report format {fmt!r}")


def read_report_csv(text: str) -> list[dict[str, Optional[float]]]:
    """Parse :func:`emit_report` CSV output; blank cells become ``None``."""
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_FIELDS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return [{k: (float(v) if v != "" else None) for k, v in row.items()} for row in reader]


TRACE_FIELDS = ("n", "t", "R", "xi", "eta", "energy", "grad_norm")


def emit_trace(records: Sequence[StepRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TRACE_FIELDS)
    for r in records:
        writer.writerow([r.n, f"{r.t:.12g}", f"{r.r:.16e}", f"{r.xi:.16e}", f"{r.eta:.16e}",
                         f"{r.energy:.16e}", f"{r.grad_norm:.16e}"])
    return buf.getvalue()


@dataclass
class StabilityReport:
    summary: Optional[MonitorSummary]
    records: list[StepRecord]
    steps_completed: int
    hypothesis_violation: Optional[str] = None

    @property
    def stable(self) -> bool:
        s = self.summary
        return (self.hypothesis_violation is None and s is not None and s.all_finite
                and s.min_r > 0 and s.min_xi > 0 and s.r_tracks_dissipation)


def stability_probe(cfg: SolverConfig, init: FlowState) -> StabilityReport:
    """Run ``cfg`` from ``init`` and summarise the SAV monitors.

    A nonpositive SAV denominator or any other step failure is reported as a
    hypothesis violation rather than raised.
    """
    u_norms: list[float] = []
    try:
        _, records = run(cfg, init, callback=lambda s, _r: u_norms.append(l2_norm_velocity(s.u)))
    except RunAborted as exc:
        records = exc.records
        summary = summarize_monitors(records, init.sav.r, u_norms) if records else None
        return StabilityReport(summary, records, len(records), str(exc))
    return StabilityReport(summarize_monitors(records, init.sav.r, u_norms), records,
                           len(records))


def stability_setup(example="2", nu=0.01, nx=64, dt=0.25, t_final=10.0, k0=1.0,
                    forcing_scale=1.0, init_time=0.0, lin_tol=DEFAULT_TOL):
    """Config and initial state for a probe driven by a manufactured solution.

    ``forcing_scale`` multiplies the forcing (0 gives unforced decay) and
    ``init_time`` selects the exact velocity used as the initial field.
    """
    ex = get_example(example)
    base = mms_config(ex, GridSpec(nx, nx), nu, dt, t_final, k0=k0, lin_tol=lin_tol)
    if forcing_scale == 0.0:
        cfg = SolverConfig(base.grid, nu, dt, t_final, k0=k0, lin_tol=lin_tol)
    elif forcing_scale == 1.0:
        cfg = base
    else:
        f = base.forcing
        cfg = SolverConfig(base.grid, nu, dt, t_final, k0=k0, lin_tol=lin_tol,
                           forcing=lambda t: forcing_scale * f(t))
    if init_time == 0.0:
        init = initialize_exact(cfg, ex)
    else:
        u0, _ = eval_exact(ex, init_time, cfg.grid)
        init = initialize(cfg, u0)
    return cfg, init
