"""Task-dependent grasp quality metric.

``local_metric`` solves one scenario: the optimal eta is the largest wrench
magnitude the grasp can apply along the task screw (force magnitude for a
finite-pitch screw, torque magnitude for an infinite-pitch one).
``global_metric`` takes the minimum over a discretized motion path, and
``metric_sweep`` tabulates eta over a parameter grid, tolerating per-point
failures (a sweep routinely runs past the pose where the task becomes
infeasible).
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .problem import ConicProgram, GraspProblem, compile_program
from .solver import SolveResult, SolveSettings, solve

ACTIVE_TOL = 1e-6


@dataclass(frozen=True)
class MetricResult:
    """Outcome of one metric solve.

    ``eta`` is present only for Optimal solves.  A negative eta means the
    grasp cannot even null the external wrench along the task direction; it
    is reported as-is with ``warning`` set rather than clamped.
    """

    eta: float | None
    direction: int
    status: str
    active_constraints: tuple[str, ...]
    iterations: int
    wall_ms: float
    warning: str | None = None
    solve_result: SolveResult | None = None


@dataclass(frozen=True)
class PathPoint:
    """One pose on a discretized motion path."""

    parameter: float
    problem: GraspProblem
    label: str = ""


@dataclass(frozen=True)
class GlobalMetricResult:
    """Minimum of the local metric over a path.

    ``eta_star`` is defined only when every point solved to optimality;
    otherwise the failing labels are listed in ``failures``.
    """

    eta_star: float | None
    argmin: str | None
    per_point: tuple[MetricResult, ...]
    failures: tuple[str, ...]


def active_constraints(prog: ConicProgram, x, tol: float = ACTIVE_TOL) -> tuple[str, ...]:
    """Names of the bounds and cones that are tight at the primal point x."""
    names = prog.layout.variable_names()
    active: list[str] = []
    for j in range(prog.n_vars):
        if np.isfinite(prog.lb[j]) and x[j] - prog.lb[j] <= tol * max(1.0, abs(prog.lb[j])):
            active.append(f"{names[j]} >= {prog.lb[j]:g}")
        if np.isfinite(prog.ub[j]) and prog.ub[j] - x[j] <= tol * max(1.0, abs(prog.ub[j])):
            active.append(f"{names[j]} <= {prog.ub[j]:g}")
    for blk in prog.socs:
        slack = (blk.c @ x + blk.d) - np.linalg.norm(blk.A @ x + blk.b)
        if slack <= tol * max(1.0, abs(blk.c @ x + blk.d)):
            active.append(blk.label or "cone")
    return tuple(active)


def local_metric(
    p: GraspProblem, direction: int = +1, settings: SolveSettings | None = None, trace=None
) -> MetricResult:
    """Compile and solve one scenario along +/- the task screw."""
    settings = settings or SolveSettings()
    t0 = time.perf_counter()
    prog = compile_program(p, direction=direction)
    res = solve(prog, settings, trace=trace)
    wall_ms = (time.perf_counter() - t0) * 1e3
    eta = res.objective if res.status == "Optimal" else None
    warning = None
    if eta is not None and eta < 0:
        warning = "eta < 0: the grasp cannot null the external wrench along the task screw"
    actives = ()
    if res.primal is not None and res.status == "Optimal":
        actives = active_constraints(prog, res.primal)
    return MetricResult(
        eta=eta,
        direction=direction,
        status=res.status,
        active_constraints=actives,
        iterations=res.iterations,
        wall_ms=wall_ms,
        warning=warning,
        solve_result=res,
    )


def global_metric(
    path: list[PathPoint], direction: int = +1, settings: SolveSettings | None = None
) -> GlobalMetricResult:
    """Minimum local metric over a discretized path (the whole-task metric)."""
    if not path:
        raise ValueError("path must contain at least one point")
    per_point = tuple(local_metric(pt.problem, direction, settings) for pt in path)
    failures = tuple(pt.label or f"#{i}" for i, (pt, r) in enumerate(zip(path, per_point))
                     if r.status != "Optimal")
    if failures:
        return GlobalMetricResult(eta_star=None, argmin=None, per_point=per_point, failures=failures)
    i_min = min(range(len(path)), key=lambda i: per_point[i].eta)
    return GlobalMetricResult(
        eta_star=per_point[i_min].eta,
        argmin=path[i_min].label or f"#{i_min}",
        per_point=per_point,
        failures=(),
    )


@dataclass(frozen=True)
class SweepRow:
    parameter: float
    eta: float | None
    status: str
    iterations: int
    wall_ms: float


def metric_sweep(
    family,
    grid,
    direction: int = +1,
    settings: SolveSettings | None = None,
    parallelism: int | None = None,
) -> list[SweepRow]:
    """Evaluate ``family(value)`` at every grid value.

    ``family`` maps a parameter value to a GraspProblem.  Points run
    concurrently (``parallelism`` threads) but rows come back in grid order;
    a point that fails to build or solve is recorded, not fatal.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("parameter grid must be nonempty")

    def one(value: float) -> SweepRow:
        t0 = time.perf_counter()
        try:
            problem = family(value)
            r = local_metric(problem, direction, settings)
            return SweepRow(value, r.eta, r.status, r.iterations, r.wall_ms)
        except Exception as exc:  # per-point failures must not kill the sweep
            return SweepRow(value, None, f"error: {exc}", 0, (time.perf_counter() - t0) * 1e3)

    if parallelism is not None and parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        return list(pool.map(one, grid))
