"""Experiment orchestration: convergence sweeps, order fits, CSV output."""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import filters as flt
from .exceptions import ConfigurationError, DivergenceError, EstimationError, NormGuardError
from .integrator import IntegratorConfig, StatePair, evolve
from .problem import ProblemSpec, power_law_initial_data
from .reference import ReferenceConfig, error_h2h1, reference_solution, _fit_degree

STATUS_OK = "ok"
STATUS_DIVERGED = "diverged"
STATUS_GUARD = "guard"

CSV_HEADER = ("filter", "K", "tau", "err_h2h1", "status")


def worker_count() -> int:
    """Bounded worker pool size; QLWAVE_THREADS overrides the default."""
    env = os.environ.get("QLWAVE_THREADS", "")
    if env.strip():
        try:
            n = int(env)
        except ValueError as exc:
            raise ConfigurationError(f"QLWAVE_THREADS must be an integer, got {env!r}") from exc
        return max(1, n)
    return max(1, min(4, os.cpu_count() or 1))


@dataclass(frozen=True)
class ExperimentPlan:
    """One convergence study: problem, degrees, steps, horizon, filters."""

    problem: ProblemSpec
    K_list: Sequence[int]
    tau_list: Sequence[float]
    T: float
    filters: Sequence[flt.FilterSpec]
    out_dir: Optional[str] = None
    max_norm: float = 1e6

    def __post_init__(self):
        if not self.K_list or not self.tau_list or not self.filters:
            raise ConfigurationError("K, tau and filter lists must be non-empty")
        if self.T <= 0:
            raise ConfigurationError("T must be positive")
        for tau in self.tau_list:
            n = self.T / tau
            if abs(n - round(n)) > 1e-9 * max(1.0, n):
                raise ConfigurationError(
                    f"T/tau must be an integer; T={self.T}, tau={tau} gives {n}"
                )


@dataclass(frozen=True)
class ConvergenceRow:
    """One sweep cell: error at the final time, or its failure mode."""

    filter: str
    K: int
    tau: float
    err: float
    status: str = STATUS_OK


def _n_steps(T: float, tau: float) -> int:
    return round(T / tau)


def _initial_state(K: int) -> StatePair:
    u0, ud0 = power_law_initial_data(K)
    return StatePair(u0, ud0)


def _run_cell(plan: ExperimentPlan, spec: flt.FilterSpec, K: int, tau: float,
              ref: StatePair) -> ConvergenceRow:
    cfg = IntegratorConfig(tau=tau, K=K, filter=spec, max_norm=plan.max_norm,
                           admissibility_policy="ignore")
    try:
        final = evolve(_initial_state(K), plan.problem, cfg, _n_steps(plan.T, tau))
    except NormGuardError:
        return ConvergenceRow(spec.label, K, tau, math.nan, STATUS_GUARD)
    except DivergenceError:
        return ConvergenceRow(spec.label, K, tau, math.nan, STATUS_DIVERGED)
    return ConvergenceRow(spec.label, K, tau, error_h2h1(final, ref), STATUS_OK)


def run_convergence_time(
    plan: ExperimentPlan, ref_cfg: Optional[ReferenceConfig] = None
) -> list[ConvergenceRow]:
    """Temporal convergence study: error vs tau against a same-degree reference.

    Cells run on a bounded worker pool; rows are ordered by
    (filter, K, tau) regardless of completion order, and divergent cells
    are recorded rather than fatal.
    """
    if ref_cfg is None:
        ref_cfg = ReferenceConfig()
    tau_min = min(plan.tau_list)
    references: dict[int, StatePair] = {}
    for K in plan.K_list:
        references[K] = reference_solution(
            plan.problem, _initial_state(K), plan.T, K, ref_cfg, tau_min=tau_min
        )
    cells = [
        (spec, K, tau)
        for spec in plan.filters
        for K in plan.K_list
        for tau in sorted(plan.tau_list)
    ]
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        rows = list(
            pool.map(lambda c: _run_cell(plan, c[0], c[1], c[2], references[c[1]]), cells)
        )
    return sorted(rows, key=lambda r: (r.filter, r.K, r.tau))


def run_convergence_space(plan: ExperimentPlan, K_ref: int) -> list[ConvergenceRow]:
    """Spatial convergence study against a high-degree reference run.

    Uses the single (small) tau of the plan for every degree; each run is
    zero-extended to the reference degree and compared in the full
    H^2 x H^1 norm, so the resolved-tail truncation error is part of the
    measurement.
    """
    if K_ref < 4 * max(plan.K_list):
        raise ConfigurationError(
            f"reference degree {K_ref} must be >= 4x the largest degree {max(plan.K_list)}"
        )
    if len(plan.tau_list) != 1:
        raise ConfigurationError("spatial sweeps use exactly one (small) tau")
    tau = plan.tau_list[0]
    n = _n_steps(plan.T, tau)

    references: dict[str, StatePair] = {}
    for spec in plan.filters:
        cfg = IntegratorConfig(tau=tau, K=K_ref, filter=spec, max_norm=plan.max_norm,
                               admissibility_policy="ignore")
        references[spec.label] = evolve(_initial_state(K_ref), plan.problem, cfg, n)

    def cell(args) -> ConvergenceRow:
        spec, K = args
        cfg = IntegratorConfig(tau=tau, K=K, filter=spec, max_norm=plan.max_norm,
                               admissibility_policy="ignore")
        try:
            final = evolve(_initial_state(K), plan.problem, cfg, n)
        except NormGuardError:
            return ConvergenceRow(spec.label, K, tau, math.nan, STATUS_GUARD)
        except DivergenceError:
            return ConvergenceRow(spec.label, K, tau, math.nan, STATUS_DIVERGED)
        err = error_h2h1(_fit_degree(final, K_ref), references[spec.label])
        return ConvergenceRow(spec.label, K, tau, err, STATUS_OK)

    cells = [(spec, K) for spec in plan.filters for K in plan.K_list]
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        rows = list(pool.map(cell, cells))
    return sorted(rows, key=lambda r: (r.filter, r.K, r.tau))


@dataclass(frozen=True)
class OrderEstimate:
    """Least-squares slope of log(err) vs log(x) with fit diagnostics."""

    slope: float
    intercept: float
    r_squared: float
    n_points: int
    span: float


def _loglog_fit(x: np.ndarray, y: np.ndarray) -> OrderEstimate:
    lx, ly = np.log(x), np.log(y)
    slope, intercept = np.polyfit(lx, ly, 1)
    fit = slope * lx + intercept
    ss_res = float(np.sum((ly - fit) ** 2))
    ss_tot = float(np.sum((ly - np.mean(ly)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return OrderEstimate(
        slope=float(slope),
        intercept=float(intercept),
        r_squared=r2,
        n_points=int(x.size),
        span=float(np.max(x) / np.min(x)),
    )


def estimate_order(rows: Sequence[ConvergenceRow]) -> OrderEstimate:
    """Temporal order from the ok rows of one (filter, K) series.

    Needs at least 3 usable rows spanning at least a factor 4 in tau;
    rows with non-ok status or non-positive error are excluded.
    """
    ok = [r for r in rows if r.status == STATUS_OK and r.err > 0 and math.isfinite(r.err)]
    if len(ok) < 3:
        raise EstimationError(f"need >= 3 usable rows, got {len(ok)}")
    tau = np.array([r.tau for r in ok])
    err = np.array([r.err for r in ok])
    if np.max(tau) / np.min(tau) < 4.0:
        raise EstimationError("tau range must span at least a factor of 4")
    return _loglog_fit(tau, err)


def estimate_spatial_order(rows: Sequence[ConvergenceRow]) -> OrderEstimate:
    """Spatial order (positive for decaying error) of one filter series."""
    ok = [r for r in rows if r.status == STATUS_OK and r.err > 0 and math.isfinite(r.err)]
    if len(ok) < 3:
        raise EstimationError(f"need >= 3 usable rows, got {len(ok)}")
    K = np.array([r.K for r in ok], dtype=float)
    err = np.array([r.err for r in ok])
    if np.max(K) / np.min(K) < 4.0:
        raise EstimationError("K range must span at least a factor of 4")
    fit = _loglog_fit(K, err)
    return OrderEstimate(
        slope=-fit.slope,
        intercept=fit.intercept,
        r_squared=fit.r_squared,
        n_points=fit.n_points,
        span=fit.span,
    )


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def write_rows_csv(rows: Sequence[ConvergenceRow], path: str) -> None:
    """Emit sweep rows with a stable ordering and 17-significant-digit floats."""
    ordered = sorted(rows, key=lambda r: (r.filter, r.K, r.tau))
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in ordered:
            writer.writerow([r.filter, r.K, _fmt(r.tau), _fmt(r.err), r.status])


def rows_by_series(rows: Sequence[ConvergenceRow]) -> dict[tuple[str, int], list[ConvergenceRow]]:
    """Group rows by (filter, K)."""
    series: dict[tuple[str, int], list[ConvergenceRow]] = {}
    for r in rows:
        series.setdefault((r.filter, r.K), []).append(r)
    return series
