import numpy as np
import pytest

from conftest import mkprog, soc
from screwgrasp.errors import SolverDataError, UnsupportedProgramError
from screwgrasp.problem import compile_program
from screwgrasp.scenarios import DoorHandleParams, make_door_handle
from screwgrasp.solver import Residuals, SolveSettings, solve, solve_with_oracle

TIGHT = SolveSettings(feasibility_tol=1e-9, duality_gap_tol=1e-10)


def box_only():
    """maximize eta s.t. eta <= 3"""
    return mkprog([1.0], np.zeros((0, 1)), [], ub=[3.0])


def disk():
    """maximize x + y s.t. ||(x, y)|| <= 1; optimum sqrt(2) at x = y"""
    return mkprog([1.0, 1.0], np.zeros((0, 2)), [], socs=[soc(np.eye(2), np.zeros(2), np.zeros(2), 1.0)])


def unsupported_load():
    """a cone that can only push +n asked to balance a -n load: infeasible"""
    # x0 >= 0 (cone surrogate), equality x0 = -5
    return mkprog([0.0, 1.0], [[1.0, 0.0]], [-5.0], lb=[0.0, -np.inf], ub=[np.inf, 3.0])


def free_ray():
    """maximize eta with eta = f_n, f_n >= 0 uncapped: unbounded"""
    return mkprog([0.0, 1.0], [[1.0, -1.0]], [0.0], lb=[0.0, -np.inf])


class TestClosedFormPrograms:
    def test_box(self):
        r = solve(box_only(), TIGHT)
        assert r.status == "Optimal"
        assert abs(r.objective - 3.0) <= 1e-8

    def test_disk(self):
        r = solve(disk(), TIGHT)
        assert r.status == "Optimal"
        assert abs(r.objective - np.sqrt(2.0)) <= 1e-8
        assert np.allclose(r.primal, [1 / np.sqrt(2)] * 2, atol=1e-6)

    def test_forced_eta_through_redundant_equalities(self):
        w = np.array([0.0, 0, 1, 0, 0, 0])
        prog = mkprog([1.0], (-w).reshape(6, 1), -2.0 * w)
        r = solve(prog, TIGHT)
        assert r.status == "Optimal"
        assert abs(r.objective - 2.0) <= 1e-8

    def test_infeasible(self):
        assert solve(unsupported_load(), TIGHT).status == "Infeasible"

    def test_unbounded(self):
        r = solve(free_ray(), TIGHT)
        assert r.status == "Unbounded"
        assert r.certificate is not None


class TestResultContracts:
    def test_optimal_residuals_certified(self):
        p = make_door_handle(DoorHandleParams(x_c=0.05))
        prog = compile_program(p)
        r = solve(prog, SolveSettings())
        assert r.status == "Optimal"
        # re-derive the residuals straight from the primal and program data
        eq = np.max(np.abs(prog.F @ r.primal - prog.g)) / (1 + np.max(np.abs(prog.g)))
        assert eq <= SolveSettings().feasibility_tol
        for blk in prog.socs:
            viol = np.linalg.norm(blk.A @ r.primal + blk.b) - (blk.c @ r.primal + blk.d)
            assert viol <= SolveSettings().feasibility_tol
        lo = np.where(np.isfinite(prog.lb), prog.lb - r.primal, -np.inf)
        hi = np.where(np.isfinite(prog.ub), r.primal - prog.ub, -np.inf)
        assert max(lo.max(), hi.max()) <= SolveSettings().feasibility_tol
        assert isinstance(r.residuals, Residuals)
        assert r.residuals.gap <= SolveSettings().duality_gap_tol

    def test_determinism(self):
        prog = compile_program(make_door_handle(DoorHandleParams(x_c=0.1, theta=0.2)))
        a = solve(prog, TIGHT)
        b = solve(prog, TIGHT)
        assert a.status == b.status
        assert a.objective == b.objective  # bitwise identical path
        assert np.array_equal(a.primal, b.primal)

    def test_iteration_limit_is_not_silent_optimal(self):
        r = solve(disk(), SolveSettings(max_iterations=2))
        assert r.status == "IterationLimit"
        assert r.objective is not None  # best iterate reported

    def test_nan_input_is_data_error(self):
        prog = mkprog([np.nan], np.zeros((0, 1)), [])
        with pytest.raises(SolverDataError):
            solve(prog)

    def test_inf_bound_crossing_is_data_error(self):
        prog = mkprog([1.0], np.zeros((0, 1)), [], lb=[2.0], ub=[1.0])
        with pytest.raises(SolverDataError):
            solve(prog)

    def test_trace_callback(self):
        seen = []
        solve(disk(), SolveSettings(), trace=seen.append)
        assert seen and {"iteration", "mu", "relgap"} <= set(seen[0])

    def test_objective_threshold_reports_unbounded(self):
        prog = mkprog([1.0], np.zeros((0, 1)), [], ub=[1e12])
        r = solve(prog, SolveSettings(unboundedness_threshold=1e10))
        assert r.status == "Unbounded"

    def test_backend_seam(self):
        from screwgrasp.solver import Residuals, SolveResult

        def fake_backend(prog, settings, trace):
            return SolveResult("Optimal", 42.0, np.zeros(prog.n_vars),
                               Residuals(0.0, 0.0, 0.0), 0)

        r = solve(box_only(), TIGHT, backend=fake_backend)
        assert r.objective == 42.0

    def test_certificates_carry_residual_magnitudes(self):
        infeasible = solve(unsupported_load(), TIGHT)
        assert "Farkas" in infeasible.certificate and "=" in infeasible.certificate
        unbounded = solve(free_ray(), TIGHT)
        assert "ray" in unbounded.certificate


class TestOracle:
    def test_lower_bound_and_monotone_facets(self):
        prog = compile_program(make_door_handle(DoorHandleParams(x_c=0.05, theta=0.1)))
        socp = solve(prog, TIGHT)
        prev = -np.inf
        for facets in (8, 16, 32, 64):
            lp = solve_with_oracle(prog, facets)
            assert lp.status == "Optimal"
            assert lp.objective <= socp.objective + 1e-8
            assert lp.objective >= prev - 1e-9
            prev = lp.objective
        assert (socp.objective - prev) / abs(socp.objective) <= 0.02

    def test_oracle_solution_is_cone_feasible(self):
        prog = compile_program(make_door_handle(DoorHandleParams(x_c=0.05)))
        lp = solve_with_oracle(prog, 16)
        assert lp.residuals.cone <= 1e-7  # inscribed rays stay inside the true cones
        assert lp.residuals.primal <= 1e-7

    def test_untagged_cone_rejected(self):
        with pytest.raises(UnsupportedProgramError):
            solve_with_oracle(disk(), 8)

    def test_agreement_on_infeasible(self):
        prog = unsupported_load()
        assert solve(prog).status == "Infeasible"
        assert solve_with_oracle(prog, 8).status == "Infeasible"

    def test_facet_floor(self):
        with pytest.raises(ValueError):
            solve_with_oracle(unsupported_load(), 3)
