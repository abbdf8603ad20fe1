"""Randomized cross-validation of the solve pipeline.

Random contact layouts, cone parameters, loads and tasks, solved by both the
interior-point path and the polyhedral LP oracle.  The oracle must never
exceed the SOCP optimum, and the two paths must never produce an impossible
status combination.
"""

import numpy as np

from screwgrasp.contacts import (
    EnvironmentContact,
    FixedSupport,
    ManipulatorContact,
    Pcwf,
    PcwfParams,
    SfceParams,
)
from screwgrasp.problem import ExternalWrench, GraspProblem, compile_program
from screwgrasp.screws import INFINITE_PITCH, TaskScrew
from screwgrasp.solver import SolveSettings, solve, solve_with_oracle

TIGHT = SolveSettings(duality_gap_tol=1e-9)


def random_rotation(rng):
    A = rng.normal(size=(3, 3))
    Q, R = np.linalg.qr(A)
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] *= -1
    return Q


def random_problem(rng) -> GraspProblem | None:
    n_m = int(rng.integers(0, 4))
    n_e = int(rng.integers(0, 3))
    manips = tuple(
        ManipulatorContact(
            rotation=random_rotation(rng),
            position=rng.uniform(-0.3, 0.3, 3),
            cone=SfceParams(mu=rng.uniform(0.1, 1.0), e_t=rng.uniform(0.5, 2.0),
                            e_o=rng.uniform(0.5, 2.0), e_n=rng.uniform(0.01, 0.2)),
            f_n_max=rng.uniform(5.0, 50.0),
        )
        for _ in range(n_m)
    )
    envs = []
    for _ in range(n_e):
        if rng.random() < 0.7:
            envs.append(EnvironmentContact(
                rotation=random_rotation(rng), position=rng.uniform(-0.3, 0.3, 3),
                model=Pcwf(PcwfParams(mu=rng.uniform(0.1, 1.0))),
                f_n_max=rng.uniform(10.0, 60.0),
            ))
        else:
            prescribed = {comp: float(rng.uniform(-1, 1))
                          for comp in ("f_t", "f_o", "f_n", "m_t", "m_o", "m_n")
                          if rng.random() < 0.7}
            envs.append(EnvironmentContact(
                rotation=random_rotation(rng), position=rng.uniform(-0.3, 0.3, 3),
                model=FixedSupport(prescribed=prescribed),
            ))
    external = ExternalWrench(force=rng.uniform(-10, 10, 3), moment=rng.uniform(-1, 1, 3),
                              application_point=rng.uniform(-0.2, 0.2, 3))
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    if rng.random() < 0.5:
        task = TaskScrew(l=axis, pitch=INFINITE_PITCH)
    else:
        task = TaskScrew(l=axis, q=rng.uniform(-0.2, 0.2, 3), pitch=float(rng.uniform(-0.1, 0.1)))
    if n_m + n_e == 0 and external.is_zero():
        return None
    return GraspProblem(manipulator_contacts=manips, environment_contacts=tuple(envs),
                        external=external, task=task)


def test_random_battery_against_oracle():
    rng = np.random.default_rng(42)
    seen = {"Optimal": 0, "Infeasible": 0, "Unbounded": 0}
    for trial in range(120):
        problem = random_problem(rng)
        if problem is None:
            continue
        prog = compile_program(problem, +1 if rng.random() < 0.5 else -1)
        res = solve(prog, TIGHT)
        assert res.status in seen, f"trial {trial}: solver returned {res.status} ({res.certificate})"
        seen[res.status] += 1
        lp = solve_with_oracle(prog, 32)
        if res.status == "Optimal" and lp.status == "Optimal":
            assert lp.objective <= res.objective + 1e-7 * max(1.0, abs(res.objective)), trial
        elif res.status == "Infeasible":
            # the inscribed feasible set is a subset: it can only agree or
            # fail numerically, never report a solution
            assert lp.status != "Optimal", trial
        elif res.status == "Unbounded":
            assert lp.status != "Infeasible", trial
    # the draw actually exercises every branch
    assert seen["Optimal"] > 10
    assert seen["Infeasible"] > 10
