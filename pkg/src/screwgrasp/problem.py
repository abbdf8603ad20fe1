"""Assembly of a grasp scenario into a conic program.

The program maximizes the wrench magnitude eta that the whole system
(manipulator contacts, environment contacts, external wrench) can apply along
the task screw:

    maximize  eta
    s.t.      G_c f_c + G_e f_e + f_ext = eta * w_task
              each contact wrench in its friction cone
              0 <= f_n <= f_n_max per manipulator contact
              tau + J^T f_c = tau_g,  tau_min <= tau <= tau_max  (if present)
              optional environment normal-force bounds

Structurally zero wrench components (tangential moments at SFCE contacts,
all moments at PCWF contacts, prescribed FixedSupport components) are
eliminated from the variable vector; the layout descriptor records what
remains and where.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .contacts import (
    LOCAL_COMPONENTS,
    EnvironmentContact,
    FixedSupport,
    ManipulatorContact,
    Pcwf,
    PcwfParams,
    SfceParams,
)
from .errors import CompileError, ScrewGraspError
from .screws import TaskScrew, Wrench, adjoint_matrix, check_rotation, screw_to_unit_wrench

_SFCE_KEEP = ("f_t", "f_o", "f_n", "m_n")
_PCWF_KEEP = ("f_t", "f_o", "f_n")


@dataclass(frozen=True)
class ExternalWrench:
    """Constant external load: force (N) at ``application_point`` (m) plus a
    free moment (N.m), all in the body frame."""

    force: np.ndarray = field(default_factory=lambda: np.zeros(3))
    moment: np.ndarray = field(default_factory=lambda: np.zeros(3))
    application_point: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        for name in ("force", "moment", "application_point"):
            v = np.asarray(getattr(self, name), dtype=float).reshape(3).copy()
            if not np.all(np.isfinite(v)):
                raise ScrewGraspError(f"external wrench {name} must be finite")
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    def is_zero(self) -> bool:
        return not (np.any(self.force) or np.any(self.moment))


def external_wrench_in_b(e: ExternalWrench, frame: str = "b") -> Wrench:
    """Resolve the external load about the body-frame origin."""
    return Wrench(
        force=e.force,
        moment=np.cross(e.application_point, e.force) + e.moment,
        frame=frame,
    )


@dataclass(frozen=True)
class TorqueModel:
    """Joint-space view of the manipulator contacts.

    ``jacobian`` (6n x l) maps joint rates to contact-frame twists, blocks
    stacked per contact in local component order; torques obey
    tau = tau_g - J^T f_c with bounds [tau_min, tau_max].  ``dofs`` optionally
    gives the per-manipulator joint counts for block-structure validation.
    """

    jacobian: np.ndarray
    tau_g: np.ndarray
    tau_min: np.ndarray
    tau_max: np.ndarray
    dofs: tuple[int, ...] | None = None

    def __post_init__(self):
        J = np.asarray(self.jacobian, dtype=float)
        if J.ndim != 2:
            raise ScrewGraspError("jacobian must be a 2-D matrix")
        l = J.shape[1]
        for name in ("tau_g", "tau_min", "tau_max"):
            v = np.asarray(getattr(self, name), dtype=float).reshape(l).copy()
            if not np.all(np.isfinite(v)):
                raise ScrewGraspError(f"torque model {name} must be finite")
            v.setflags(write=False)
            object.__setattr__(self, name, v)
        if np.any(self.tau_min > self.tau_max):
            raise ScrewGraspError("tau_min must not exceed tau_max componentwise")
        if not np.all(np.isfinite(J)):
            raise ScrewGraspError("jacobian must be finite")
        if self.dofs is not None:
            dofs = tuple(int(d) for d in self.dofs)
            if sum(dofs) != l:
                raise ScrewGraspError("dofs must sum to the jacobian column count")
            if J.shape[0] != 6 * len(dofs):
                raise ScrewGraspError("jacobian row count must be 6 per manipulator")
            col = 0
            for i, d in enumerate(dofs):
                block_rows = slice(6 * i, 6 * i + 6)
                outside = np.delete(J[:, col : col + d], block_rows, axis=0)
                if np.any(outside != 0.0):
                    raise ScrewGraspError("jacobian is not block-diagonal per manipulator")
                col += d
            object.__setattr__(self, "dofs", dofs)
        J = J.copy()
        J.setflags(write=False)
        object.__setattr__(self, "jacobian", J)

    @property
    def n_joints(self) -> int:
        return self.jacobian.shape[1]


@dataclass(frozen=True)
class GraspProblem:
    """A complete scenario: contacts, external load, torque data, task."""

    manipulator_contacts: tuple[ManipulatorContact, ...]
    environment_contacts: tuple[EnvironmentContact, ...]
    external: ExternalWrench
    task: TaskScrew
    torque_model: TorqueModel | None = None
    frame: str = "b"

    def __post_init__(self):
        object.__setattr__(self, "manipulator_contacts", tuple(self.manipulator_contacts))
        object.__setattr__(self, "environment_contacts", tuple(self.environment_contacts))
        n = len(self.manipulator_contacts)
        m = len(self.environment_contacts)
        if n + m == 0 and self.external.is_zero():
            raise ScrewGraspError(
                "scenario needs at least one contact or a nonzero external wrench"
            )
        if self.torque_model is not None and self.torque_model.jacobian.shape[0] != 6 * n:
            raise ScrewGraspError(
                f"jacobian has {self.torque_model.jacobian.shape[0]} rows, "
                f"expected 6 x {n} manipulator contacts"
            )


def grasp_map(contacts) -> np.ndarray:
    """Stacked 6x6k adjoint matrix of k contact poses.

    Accepts any sequence of objects with ``rotation``/``position`` (or
    (rotation, position) pairs); column block i carries local wrench i into
    the body frame.
    """
    blocks = []
    for c in contacts:
        if hasattr(c, "rotation"):
            R, p = c.rotation, c.position
        else:
            R, p = c
        blocks.append(adjoint_matrix(check_rotation(R), p))
    if not blocks:
        return np.zeros((6, 0))
    return np.hstack(blocks)


# ---------------------------------------------------------------------------
# Compiled program representation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ContactSlice:
    """Where one contact's surviving wrench components live in x."""

    group: str  # "manipulator" | "environment"
    index: int
    kind: str  # "sfce" | "pcwf" | "fixed" | "frictionless"
    start: int
    components: tuple[str, ...]

    @property
    def stop(self) -> int:
        return self.start + len(self.components)

    def position_of(self, component: str) -> int:
        return self.start + self.components.index(component)


@dataclass(frozen=True)
class VariableLayout:
    contacts: tuple[ContactSlice, ...]
    torque_start: int
    n_torques: int
    eta_index: int
    n_vars: int

    def variable_names(self) -> list[str]:
        names = [""] * self.n_vars
        for cs in self.contacts:
            tag = "m" if cs.group == "manipulator" else "e"
            for k, comp in enumerate(cs.components):
                names[cs.start + k] = f"{tag}{cs.index}.{comp}"
        for j in range(self.n_torques):
            names[self.torque_start + j] = f"tau[{j}]"
        names[self.eta_index] = "eta"
        return names


@dataclass(frozen=True)
class ConeTag:
    """Links a SOC block back to the contact cone it encodes (used by the
    polyhedral LP oracle)."""

    kind: str  # "sfce" | "pcwf"
    params: SfceParams | PcwfParams
    var_of: dict[str, int]  # local component name -> index in x


@dataclass(frozen=True)
class SocBlock:
    """One second-order cone constraint ||A x + b|| <= c'x + d."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: float
    tag: ConeTag | None = None
    label: str = ""


@dataclass(frozen=True)
class ConicProgram:
    """Standard-shape conic program: maximize f'x subject to F x = g, SOC
    blocks, and box bounds (+-inf where absent)."""

    f: np.ndarray
    F: np.ndarray
    g: np.ndarray
    socs: tuple[SocBlock, ...]
    lb: np.ndarray
    ub: np.ndarray
    layout: VariableLayout

    @property
    def n_vars(self) -> int:
        return self.f.shape[0]

    def __post_init__(self):
        n = self.f.shape[0]
        if self.F.shape != (self.g.shape[0], n) or self.lb.shape != (n,) or self.ub.shape != (n,):
            raise CompileError("inconsistent conic program dimensions")
        for blk in self.socs:
            if blk.A.shape[1] != n or blk.c.shape != (n,) or blk.b.shape != (blk.A.shape[0],):
                raise CompileError(f"inconsistent SOC block dimensions ({blk.label})")
        if self.layout.n_vars != n:
            raise CompileError("layout does not cover the variable vector")


def _kept_components(contact) -> tuple[str, tuple[str, ...]]:
    """(kind, surviving local components) for a contact."""
    if isinstance(contact, ManipulatorContact):
        if contact.cone is None:
            return "frictionless", ("f_n",)
        return "sfce", _SFCE_KEEP
    model = contact.model
    if isinstance(model, Pcwf):
        if model.params is None:
            return "frictionless", ("f_n",)
        return "pcwf", _PCWF_KEEP
    if isinstance(model, FixedSupport):
        kept = tuple(c for c in LOCAL_COMPONENTS if c not in model.prescribed)
        return "fixed", kept
    raise CompileError(f"unknown environment contact model {type(model).__name__}")


def compile_program(p: GraspProblem, direction: int = +1) -> ConicProgram:
    """Compile a grasp scenario into a conic program.

    ``direction`` (+1/-1) selects the sense of the task screw; the paired
    curves of a task (CW/CCW, +X/-X) are two compilations of one scenario.
    """
    if direction not in (+1, -1):
        raise CompileError("direction must be +1 or -1")

    slices: list[ContactSlice] = []
    cursor = 0
    all_contacts = [("manipulator", i, c) for i, c in enumerate(p.manipulator_contacts)]
    all_contacts += [("environment", j, c) for j, c in enumerate(p.environment_contacts)]
    for group, idx, contact in all_contacts:
        kind, comps = _kept_components(contact)
        slices.append(ContactSlice(group=group, index=idx, kind=kind, start=cursor, components=comps))
        cursor += len(comps)

    n_tau = p.torque_model.n_joints if p.torque_model is not None else 0
    torque_start = cursor
    cursor += n_tau
    eta_index = cursor
    n = cursor + 1
    layout = VariableLayout(
        contacts=tuple(slices),
        torque_start=torque_start,
        n_torques=n_tau,
        eta_index=eta_index,
        n_vars=n,
    )

    w_task = direction * screw_to_unit_wrench(p.task).as_array()

    n_eq = 6 + n_tau
    F = np.zeros((n_eq, n))
    g = np.zeros(n_eq)
    g[:6] = -external_wrench_in_b(p.external).as_array()
    F[:6, eta_index] = -w_task

    lb = np.full(n, -np.inf)
    ub = np.full(n, np.inf)
    socs: list[SocBlock] = []

    for cs, (group, idx, contact) in zip(slices, all_contacts):
        G6 = adjoint_matrix(contact.rotation, contact.position)
        for k, comp in enumerate(cs.components):
            F[:6, cs.start + k] = G6[:, LOCAL_COMPONENTS.index(comp)]
        if cs.kind == "fixed":
            for comp, value in contact.model.prescribed.items():
                g[:6] -= G6[:, LOCAL_COMPONENTS.index(comp)] * value
        if "f_n" in cs.components:
            i_fn = cs.position_of("f_n")
            if group == "manipulator":
                lb[i_fn] = 0.0
                ub[i_fn] = contact.f_n_max
            elif cs.kind in ("pcwf", "frictionless"):
                lb[i_fn] = max(0.0, contact.f_n_min or 0.0)
                if contact.f_n_max is not None:
                    ub[i_fn] = contact.f_n_max
            else:  # bilateral fixed support: bound only if asked
                if contact.f_n_min is not None:
                    lb[i_fn] = contact.f_n_min
                if contact.f_n_max is not None:
                    ub[i_fn] = contact.f_n_max
        if cs.kind == "sfce":
            sfce: SfceParams = contact.cone
            A = np.zeros((3, n))
            A[0, cs.position_of("f_t")] = 1.0 / (sfce.mu * sfce.e_t)
            A[1, cs.position_of("f_o")] = 1.0 / (sfce.mu * sfce.e_o)
            A[2, cs.position_of("m_n")] = 1.0 / (sfce.mu * sfce.e_n)
            c = np.zeros(n)
            c[cs.position_of("f_n")] = 1.0
            tag = ConeTag(
                kind="sfce",
                params=sfce,
                var_of={comp: cs.position_of(comp) for comp in _SFCE_KEEP},
            )
            socs.append(SocBlock(A=A, b=np.zeros(3), c=c, d=0.0, tag=tag, label=f"m{idx}.cone"))
        elif cs.kind == "pcwf":
            pcwf: PcwfParams = contact.model.params
            A = np.zeros((2, n))
            A[0, cs.position_of("f_t")] = 1.0 / (pcwf.mu * pcwf.e_t)
            A[1, cs.position_of("f_o")] = 1.0 / (pcwf.mu * pcwf.e_o)
            c = np.zeros(n)
            c[cs.position_of("f_n")] = 1.0
            tag = ConeTag(
                kind="pcwf",
                params=pcwf,
                var_of={comp: cs.position_of(comp) for comp in _PCWF_KEEP},
            )
            socs.append(SocBlock(A=A, b=np.zeros(2), c=c, d=0.0, tag=tag, label=f"e{idx}.cone"))

    if p.torque_model is not None:
        tm = p.torque_model
        JT = tm.jacobian.T  # l x 6n, columns in local component order per contact
        rows = slice(6, 6 + n_tau)
        for cs in slices:
            if cs.group != "manipulator":
                continue
            for k, comp in enumerate(cs.components):
                F[rows, cs.start + k] = JT[:, 6 * cs.index + LOCAL_COMPONENTS.index(comp)]
        F[rows, torque_start : torque_start + n_tau] = np.eye(n_tau)
        g[rows] = tm.tau_g
        lb[torque_start : torque_start + n_tau] = tm.tau_min
        ub[torque_start : torque_start + n_tau] = tm.tau_max

    f = np.zeros(n)
    f[eta_index] = 1.0
    return ConicProgram(f=f, F=F, g=g, socs=tuple(socs), lb=lb, ub=ub, layout=layout)


# ---------------------------------------------------------------------------
# Scenario-level transforms (used by invariance/scaling checks and sweeps)
# ---------------------------------------------------------------------------

def transform_problem(p: GraspProblem, R0: np.ndarray, t0: np.ndarray) -> GraspProblem:
    """Re-express the whole scenario in a rigidly transformed body frame.

    (R0, t0) is the pose of the old frame in the new one; the optimal eta is
    invariant under this map.
    """
    R0 = check_rotation(R0)
    t0 = np.asarray(t0, dtype=float).reshape(3)

    def move_manip(c: ManipulatorContact) -> ManipulatorContact:
        return replace(c, rotation=R0 @ c.rotation, position=R0 @ c.position + t0)

    def move_env(c: EnvironmentContact) -> EnvironmentContact:
        return replace(c, rotation=R0 @ c.rotation, position=R0 @ c.position + t0)

    ext = ExternalWrench(
        force=R0 @ p.external.force,
        moment=R0 @ p.external.moment,
        application_point=R0 @ p.external.application_point + t0,
    )
    task = TaskScrew(l=R0 @ p.task.l, q=R0 @ p.task.q + t0, pitch=p.task.pitch)
    return replace(
        p,
        manipulator_contacts=tuple(move_manip(c) for c in p.manipulator_contacts),
        environment_contacts=tuple(move_env(c) for c in p.environment_contacts),
        external=ext,
        task=task,
    )


def scale_problem(p: GraspProblem, k: float) -> GraspProblem:
    """Scale every force/torque bound, prescribed component and external load
    by ``k`` > 0; the optimal eta scales by exactly ``k``."""
    if not (np.isfinite(k) and k > 0):
        raise ScrewGraspError("scale factor must be positive")

    def scale_manip(c: ManipulatorContact) -> ManipulatorContact:
        return replace(c, f_n_max=k * c.f_n_max)

    def scale_env(c: EnvironmentContact) -> EnvironmentContact:
        model = c.model
        if isinstance(model, FixedSupport) and model.prescribed:
            model = FixedSupport({key: k * v for key, v in model.prescribed.items()})
        return replace(
            c,
            model=model,
            f_n_min=None if c.f_n_min is None else k * c.f_n_min,
            f_n_max=None if c.f_n_max is None else k * c.f_n_max,
        )

    ext = ExternalWrench(
        force=k * p.external.force,
        moment=k * p.external.moment,
        application_point=p.external.application_point,
    )
    tm = p.torque_model
    if tm is not None:
        tm = TorqueModel(
            jacobian=tm.jacobian,
            tau_g=k * tm.tau_g,
            tau_min=k * tm.tau_min,
            tau_max=k * tm.tau_max,
            dofs=tm.dofs,
        )
    return replace(
        p,
        manipulator_contacts=tuple(scale_manip(c) for c in p.manipulator_contacts),
        environment_contacts=tuple(scale_env(c) for c in p.environment_contacts),
        external=ext,
        torque_model=tm,
    )


@dataclass(frozen=True)
class RaySupport:
    """Support of the grasp wrench space along one screw direction."""

    screw: TaskScrew
    eta: float | None
    status: str


def gws_sample(p: GraspProblem, directions, settings=None) -> list[RaySupport]:
    """Boundary of the grasp wrench space along a set of screw directions.

    Each direction is solved independently; failed rays are tagged with their
    solver status instead of aborting the sweep.
    """
    from .solver import SolveSettings, solve

    settings = settings or SolveSettings()
    out: list[RaySupport] = []
    for screw in directions:
        prob = replace(p, task=screw)
        try:
            res = solve(compile_program(prob, direction=+1), settings)
        except ScrewGraspError as exc:
            out.append(RaySupport(screw=screw, eta=None, status=f"error: {exc}"))
            continue
        eta = res.objective if res.status == "Optimal" else None
        out.append(RaySupport(screw=screw, eta=eta, status=res.status))
    return out
