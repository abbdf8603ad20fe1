"""Scenario schema, file I/O and built-in scenario generators.

A scenario file is a JSON document (versioned, SI units throughout: m, rad,
N, N.m; rotation matrices row-major) describing contacts, external load,
optional torque model and one or more labeled task screws.  Files written by
``save_scenario`` are canonical: loading and re-saving reproduces them byte
for byte.

Three builtin generators reproduce the bundled golden scenarios:

  * ``door_handle`` — a two-finger antipodal grasp turning a lever handle
    against a torsion spring at its hinge;
  * ``cuboid_pivot`` / ``cuboid_slide`` — two fingers pinching a box that
    rests tilted on a support edge, pivoting it about the edge or sliding it
    along the surface.

Frame conventions of the generators (fixed here and encoded in the golden
files):

  door handle: body frame {b} at the hinge, z along the hinge axis, handle
  along +x at theta = 0.  The task turns the handle about -z; theta measures
  how far it has turned, so the handle frame is rotated by -theta about z and
  the spring reaction at the hinge is the prescribed moment +k_t*theta about
  z.  Contacts pinch the handle faces at y = +-W/2, offset x_c from the
  hinge, at mid-height.  Handle weight is neglected.

  cuboid: body frame {b} at the centroid, axes world-aligned (gravity is
  -z).  The support edge is the object edge at x = -L/2, z = -H/2, running
  along y; tilting by alpha rotates the object by -alpha about y (the +x side
  lifts).  Fingers pinch the faces y = +-W/2 at offset x_E from the centroid;
  the edge is modeled as two PCWF contacts at its vertices.  The pivot task
  is a pure moment about y ("+" lowers the object, "-" lifts it); the slide
  task is a horizontal force through the centroid whose axis points toward
  the support edge, so "+" is the better-resisted sense (loading the edge
  raises its normal forces and with them the available friction).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

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
from .errors import (
    ScenarioParseError,
    ScenarioPhysicsError,
    ScenarioSchemaError,
    ScenarioVersionError,
    ScrewGraspError,
)
from .problem import ExternalWrench, GraspProblem, TorqueModel
from .screws import INFINITE_PITCH, TaskScrew

SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# Scenario container
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FamilyRef:
    """Names the builtin generator and parameter values a scenario came from,
    so sweeps can rebuild it at other parameter values."""

    generator: str
    params: dict


@dataclass(frozen=True)
class Scenario:
    """A loaded or generated scenario: shared contacts plus labeled tasks."""

    name: str
    manipulator_contacts: tuple[ManipulatorContact, ...]
    environment_contacts: tuple[EnvironmentContact, ...]
    external: ExternalWrench
    tasks: tuple[tuple[str, TaskScrew], ...]
    torque_model: TorqueModel | None = None
    family: FamilyRef | None = None
    description: str = ""

    def task_labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.tasks)

    def task(self, label: str | None = None) -> TaskScrew:
        if label is None:
            return self.tasks[0][1]
        for name, screw in self.tasks:
            if name == label:
                return screw
        raise ScrewGraspError(f"unknown task {label!r}; available: {self.task_labels()}")

    def problem(self, task: str | None = None) -> GraspProblem:
        return GraspProblem(
            manipulator_contacts=self.manipulator_contacts,
            environment_contacts=self.environment_contacts,
            external=self.external,
            task=self.task(task),
            torque_model=self.torque_model,
        )


# ---------------------------------------------------------------------------
# Built-in generators
# ---------------------------------------------------------------------------

def _rot_z(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def _rot_y(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


# contact frame axes (t, o, n) as columns, for a pinch along -+y:
# the face at +y gets inward normal -y, the face at -y gets +y.
_PINCH_PLUS_Y_FACE = np.column_stack([[1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [0.0, -1.0, 0.0]])
_PINCH_MINUS_Y_FACE = np.column_stack([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])


@dataclass(frozen=True)
class DoorHandleParams:
    """Lever-handle task parameters (defaults are the reference setup)."""

    L: float = 0.20  # handle length (m)
    H: float = 0.04  # handle cross-section height (m)
    W: float = 0.03  # handle cross-section width (m)
    mu_c: float = 0.20
    e_t: float = 1.0
    e_o: float = 1.0
    e_n: float = 0.03  # torsional length (m)
    f_n_max: float = 20.0  # per contact (N)
    k_t: float = 0.6  # hinge spring constant (N.m/rad)
    x_c: float = 0.0  # contact offset along the handle (m)
    theta: float = 0.0  # handle angle from horizontal (rad)

    def __post_init__(self):
        for name in ("L", "H", "W", "mu_c", "e_t", "e_o", "e_n", "f_n_max"):
            if not getattr(self, name) > 0:
                raise ScrewGraspError(f"{name} must be positive")
        if self.k_t < 0:
            raise ScrewGraspError("k_t must be nonnegative")
        if not 0.0 <= self.x_c <= self.L:
            raise ScrewGraspError(f"x_c must lie on the handle: 0 <= {self.x_c} <= {self.L}")
        if not np.isfinite(self.theta):
            raise ScrewGraspError("theta must be finite")


def door_handle_scenario(p: DoorHandleParams = DoorHandleParams()) -> Scenario:
    """Antipodal two-finger grasp on a spring-loaded lever handle."""
    Rh = _rot_z(-p.theta)  # handle has turned theta about the task axis -z
    cone = SfceParams(mu=p.mu_c, e_t=p.e_t, e_o=p.e_o, e_n=p.e_n)
    c1 = ManipulatorContact(
        rotation=Rh @ _PINCH_PLUS_Y_FACE,
        position=Rh @ np.array([p.x_c, +p.W / 2, 0.0]),
        cone=cone,
        f_n_max=p.f_n_max,
    )
    c2 = ManipulatorContact(
        rotation=Rh @ _PINCH_MINUS_Y_FACE,
        position=Rh @ np.array([p.x_c, -p.W / 2, 0.0]),
        cone=cone,
        f_n_max=p.f_n_max,
    )
    # hinge: free reaction except the spring moment about z opposing the turn
    support = EnvironmentContact(
        rotation=np.eye(3),
        position=np.zeros(3),
        model=FixedSupport(prescribed={"m_n": p.k_t * p.theta}),
    )
    task = TaskScrew(l=np.array([0.0, 0.0, -1.0]), q=np.zeros(3), pitch=INFINITE_PITCH)
    return Scenario(
        name="door_handle",
        description="turn a spring-loaded lever handle with an antipodal pinch",
        manipulator_contacts=(c1, c2),
        environment_contacts=(support,),
        external=ExternalWrench(),
        tasks=(("S", task),),
        family=FamilyRef("door_handle", asdict(p)),
    )


def make_door_handle(p: DoorHandleParams = DoorHandleParams()) -> GraspProblem:
    """The lever-handle grasp problem (task: moment about the hinge axis)."""
    return door_handle_scenario(p).problem()


@dataclass(frozen=True)
class CuboidParams:
    """Box-on-edge task parameters (defaults are the reference setup)."""

    weight: float = 9.81  # N
    L: float = 0.3
    W: float = 0.2
    H: float = 0.1
    mu_e: float = 0.25
    mu_c: float = 0.15
    e_cn: float = 0.06  # finger torsional length (m)
    e_t: float = 1.0
    e_o: float = 1.0
    f_n_max_1: float = 25.0
    f_n_max_2: float = 30.0
    alpha: float = 0.0  # tilt about the support edge (rad)
    x_E: float = 0.12  # finger offset from the centroid (m)

    def __post_init__(self):
        for name in ("weight", "L", "W", "H", "mu_e", "mu_c", "e_cn", "e_t", "e_o",
                     "f_n_max_1", "f_n_max_2"):
            if not getattr(self, name) > 0:
                raise ScrewGraspError(f"{name} must be positive")
        if not 0.0 < self.x_E <= self.L / 2:
            raise ScrewGraspError(f"x_E must satisfy 0 < x_E <= L/2, got {self.x_E}")
        if not 0.0 <= self.alpha <= np.pi / 2:
            raise ScrewGraspError("alpha must lie in [0, pi/2]")


def cuboid_scenario(p: CuboidParams = CuboidParams()) -> Scenario:
    """Two fingers pinching a box resting on a support edge.

    Carries both tasks: "S1" pivots about the edge (infinite pitch), "S2"
    slides along the surface (zero pitch through the centroid).
    """
    Robj = _rot_y(-p.alpha)  # lifts the +x side, edge at x = -L/2 stays down
    cone = SfceParams(mu=p.mu_c, e_t=p.e_t, e_o=p.e_o, e_n=p.e_cn)
    c1 = ManipulatorContact(
        rotation=Robj @ _PINCH_PLUS_Y_FACE,
        position=Robj @ np.array([p.x_E, +p.W / 2, 0.0]),
        cone=cone,
        f_n_max=p.f_n_max_1,
    )
    c2 = ManipulatorContact(
        rotation=Robj @ _PINCH_MINUS_Y_FACE,
        position=Robj @ np.array([p.x_E, -p.W / 2, 0.0]),
        cone=cone,
        f_n_max=p.f_n_max_2,
    )
    pcwf = PcwfParams(mu=p.mu_e, e_t=p.e_t, e_o=p.e_o)
    # edge contact = two point contacts at the edge vertices; support normal
    # is world +z (into the object)
    edge = [
        EnvironmentContact(
            rotation=np.eye(3),
            position=Robj @ np.array([-p.L / 2, sy * p.W / 2, -p.H / 2]),
            model=Pcwf(pcwf),
        )
        for sy in (+1.0, -1.0)
    ]
    gravity = ExternalWrench(force=np.array([0.0, 0.0, -p.weight]))
    edge_mid = Robj @ np.array([-p.L / 2, 0.0, -p.H / 2])
    pivot = TaskScrew(l=np.array([0.0, 1.0, 0.0]), q=edge_mid, pitch=INFINITE_PITCH)
    slide = TaskScrew(l=np.array([-1.0, 0.0, 0.0]), q=np.zeros(3), pitch=0.0)
    return Scenario(
        name="cuboid",
        description="pivot or slide a box resting on a support edge",
        manipulator_contacts=(c1, c2),
        environment_contacts=tuple(edge),
        external=gravity,
        tasks=(("S1", pivot), ("S2", slide)),
        family=FamilyRef("cuboid", asdict(p)),
    )


def make_cuboid(p: CuboidParams = CuboidParams(), task: str = "pivot") -> GraspProblem:
    """The box-on-edge grasp problem for task "pivot" (S1) or "slide" (S2)."""
    if task not in ("pivot", "slide"):
        raise ScrewGraspError(f"task must be 'pivot' or 'slide', got {task!r}")
    return cuboid_scenario(p).problem("S1" if task == "pivot" else "S2")


@dataclass(frozen=True)
class Builtin:
    """Registry entry for a generator-backed scenario family."""

    name: str
    params_cls: type
    build: object  # callable(params) -> Scenario


def _door_build(p: DoorHandleParams) -> Scenario:
    return door_handle_scenario(p)


def _cuboid_pivot_build(p: CuboidParams) -> Scenario:
    s = cuboid_scenario(p)
    return replace(s, name="cuboid_pivot", tasks=(s.tasks[0],),
                   family=FamilyRef("cuboid_pivot", asdict(p)))


def _cuboid_slide_build(p: CuboidParams) -> Scenario:
    s = cuboid_scenario(p)
    return replace(s, name="cuboid_slide", tasks=(s.tasks[1],),
                   family=FamilyRef("cuboid_slide", asdict(p)))


BUILTINS: dict[str, Builtin] = {
    "door_handle": Builtin("door_handle", DoorHandleParams, _door_build),
    "cuboid_pivot": Builtin("cuboid_pivot", CuboidParams, _cuboid_pivot_build),
    "cuboid_slide": Builtin("cuboid_slide", CuboidParams, _cuboid_slide_build),
}


def builtin_scenario(name: str, **overrides) -> Scenario:
    """Instantiate a builtin scenario with parameter overrides."""
    if name not in BUILTINS:
        raise ScrewGraspError(f"unknown builtin scenario {name!r}; available: {sorted(BUILTINS)}")
    spec = BUILTINS[name]
    valid = {f.name for f in fields(spec.params_cls)}
    unknown = set(overrides) - valid
    if unknown:
        raise ScrewGraspError(f"unknown parameter(s) {sorted(unknown)} for {name}; "
                              f"valid: {sorted(valid)}")
    return spec.build(spec.params_cls(**overrides))


def scenario_family(scenario: Scenario, parameter: str, task: str | None = None):
    """Callable mapping a parameter value to a GraspProblem, for sweeps.

    Requires the scenario to carry family information (builtin-generated or
    loaded from a file with a family block).
    """
    if scenario.family is None:
        raise ScrewGraspError("scenario has no generator family; cannot sweep a parameter")
    gen = scenario.family.generator
    if gen == "cuboid":
        gen = "cuboid_pivot" if (task or scenario.tasks[0][0]) == "S1" else "cuboid_slide"
    base = dict(scenario.family.params)
    if parameter not in base:
        raise ScrewGraspError(f"unknown parameter {parameter!r}; valid: {sorted(base)}")

    def build(value: float) -> GraspProblem:
        params = dict(base)
        params[parameter] = value
        return builtin_scenario(gen, **params).problem(task)

    build(base[parameter])  # fail fast on an invalid base scenario or task
    return build


# ---------------------------------------------------------------------------
# File I/O
# ---------------------------------------------------------------------------

def _mat_list(M: np.ndarray) -> list[list[float]]:
    return [[float(v) for v in row] for row in np.asarray(M)]


def _vec_list(v: np.ndarray) -> list[float]:
    return [float(x) for x in np.asarray(v)]


def scenario_to_dict(s: Scenario) -> dict:
    doc: dict = {
        "schema_version": SCHEMA_VERSION,
        "units": "SI",
        "name": s.name,
    }
    if s.description:
        doc["description"] = s.description
    if s.family is not None:
        doc["family"] = {"generator": s.family.generator,
                         "params": {k: float(v) for k, v in s.family.params.items()}}
    doc["manipulator_contacts"] = [
        {
            "rotation": _mat_list(c.rotation),
            "position": _vec_list(c.position),
            "cone": None if c.cone is None else {
                "mu": c.cone.mu, "e_t": c.cone.e_t, "e_o": c.cone.e_o, "e_n": c.cone.e_n,
            },
            "f_n_max": float(c.f_n_max),
        }
        for c in s.manipulator_contacts
    ]
    env = []
    for c in s.environment_contacts:
        if isinstance(c.model, Pcwf):
            if c.model.params is None:
                model = {"type": "pcwf", "frictionless": True}
            else:
                model = {"type": "pcwf", "mu": c.model.params.mu,
                         "e_t": c.model.params.e_t, "e_o": c.model.params.e_o}
        else:
            model = {"type": "fixed_support",
                     "prescribed": {k: float(v) for k, v in c.model.prescribed.items()}}
        entry = {"rotation": _mat_list(c.rotation), "position": _vec_list(c.position),
                 "model": model}
        if c.f_n_min is not None:
            entry["f_n_min"] = float(c.f_n_min)
        if c.f_n_max is not None:
            entry["f_n_max"] = float(c.f_n_max)
        env.append(entry)
    doc["environment_contacts"] = env
    doc["external_wrench"] = {
        "force": _vec_list(s.external.force),
        "moment": _vec_list(s.external.moment),
        "application_point": _vec_list(s.external.application_point),
    }
    if s.torque_model is not None:
        tm = s.torque_model
        doc["torque_model"] = {
            "jacobian": _mat_list(tm.jacobian),
            "tau_g": _vec_list(tm.tau_g),
            "tau_min": _vec_list(tm.tau_min),
            "tau_max": _vec_list(tm.tau_max),
        }
        if tm.dofs is not None:
            doc["torque_model"]["dofs"] = list(tm.dofs)
    doc["tasks"] = [
        {
            "label": label,
            "axis": _vec_list(screw.l),
            "point": _vec_list(screw.q),
            "pitch": "infinite" if screw.infinite_pitch else float(screw.pitch),
        }
        for label, screw in s.tasks
    ]
    return doc


def save_scenario(s: Scenario, path) -> None:
    """Write a scenario file; the output validates and round-trips exactly."""
    Path(path).write_text(json.dumps(scenario_to_dict(s), indent=2) + "\n", encoding="utf-8")


class _Reader:
    """Walks the parsed document, raising schema errors that name the field."""

    def __init__(self, doc):
        self.doc = doc

    def get(self, container, key, kind, path, required=True, default=None):
        if key not in container:
            if required:
                raise ScenarioSchemaError(f"{path}.{key}: missing required field")
            return default
        value = container[key]
        if kind is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ScenarioSchemaError(f"{path}.{key}: expected a number, got {type(value).__name__}")
            return float(value)
        if not isinstance(value, kind):
            raise ScenarioSchemaError(f"{path}.{key}: expected {kind.__name__}, got {type(value).__name__}")
        return value

    def vec3(self, container, key, path):
        raw = self.get(container, key, list, path)
        if len(raw) != 3 or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in raw):
            raise ScenarioSchemaError(f"{path}.{key}: expected a list of 3 numbers")
        v = np.asarray(raw, dtype=float)
        if not np.all(np.isfinite(v)):
            raise ScenarioSchemaError(f"{path}.{key}: entries must be finite")
        return v

    def mat3(self, container, key, path):
        raw = self.get(container, key, list, path)
        try:
            M = np.asarray(raw, dtype=float)
        except (TypeError, ValueError):
            raise ScenarioSchemaError(f"{path}.{key}: expected a 3x3 matrix") from None
        if M.shape != (3, 3) or not np.all(np.isfinite(M)):
            raise ScenarioSchemaError(f"{path}.{key}: expected a finite 3x3 matrix")
        return M


def _orthonormalize(M: np.ndarray, path: str) -> np.ndarray:
    err = np.max(np.abs(M.T @ M - np.eye(3)))
    if err > 1e-6 or np.linalg.det(M) < 0:
        raise ScenarioPhysicsError(f"{path}: not a rotation matrix (|R'R - I| = {err:.2e})")
    if err <= 1e-12:  # already exact; keep bytes stable across save/load
        return M
    U, _, Vt = np.linalg.svd(M)
    R = U @ Vt
    if np.linalg.det(R) < 0:
        R = U @ np.diag([1.0, 1.0, -1.0]) @ Vt
    return R


def _unit(v: np.ndarray, path: str) -> np.ndarray:
    n = np.linalg.norm(v)
    if abs(n - 1.0) > 1e-6:
        raise ScenarioPhysicsError(f"{path}: expected a unit vector, |v| = {n:.8f}")
    return v / n


def _positive_field(value: float, path: str) -> float:
    if not value > 0:
        raise ScenarioPhysicsError(f"{path}: must be strictly positive, got {value}")
    return value


def scenario_from_dict(doc: dict) -> Scenario:
    rd = _Reader(doc)
    if not isinstance(doc, dict):
        raise ScenarioSchemaError("top level: expected an object")
    version = rd.get(doc, "schema_version", int, "$")
    if version != SCHEMA_VERSION:
        raise ScenarioVersionError(
            f"$.schema_version: file declares version {version}, this reader supports {SCHEMA_VERSION}"
        )
    units = rd.get(doc, "units", str, "$")
    if units != "SI":
        raise ScenarioSchemaError(f"$.units: only 'SI' is supported, got {units!r}")
    name = rd.get(doc, "name", str, "$")

    manips = []
    raw_list = rd.get(doc, "manipulator_contacts", list, "$")
    for i, raw in enumerate(raw_list):
        path = f"$.manipulator_contacts[{i}]"
        R = _orthonormalize(rd.mat3(raw, "rotation", path), f"{path}.rotation")
        pos = rd.vec3(raw, "position", path)
        if "cone" not in raw:
            raise ScenarioSchemaError(f"{path}.cone: missing required field (null = frictionless)")
        cone_raw = raw["cone"]
        if cone_raw is not None and not isinstance(cone_raw, dict):
            raise ScenarioSchemaError(f"{path}.cone: expected an object or null")
        cone = None
        if cone_raw is not None:
            cone = SfceParams(
                mu=_positive_field(rd.get(cone_raw, "mu", float, f"{path}.cone"), f"{path}.cone.mu"),
                e_t=_positive_field(rd.get(cone_raw, "e_t", float, f"{path}.cone"), f"{path}.cone.e_t"),
                e_o=_positive_field(rd.get(cone_raw, "e_o", float, f"{path}.cone"), f"{path}.cone.e_o"),
                e_n=_positive_field(rd.get(cone_raw, "e_n", float, f"{path}.cone"), f"{path}.cone.e_n"),
            )
        f_n_max = _positive_field(rd.get(raw, "f_n_max", float, path), f"{path}.f_n_max")
        manips.append(ManipulatorContact(rotation=R, position=pos, cone=cone, f_n_max=f_n_max))

    envs = []
    raw_list = rd.get(doc, "environment_contacts", list, "$")
    for j, raw in enumerate(raw_list):
        path = f"$.environment_contacts[{j}]"
        R = _orthonormalize(rd.mat3(raw, "rotation", path), f"{path}.rotation")
        pos = rd.vec3(raw, "position", path)
        model_raw = rd.get(raw, "model", dict, path)
        mtype = rd.get(model_raw, "type", str, f"{path}.model")
        if mtype == "pcwf":
            if model_raw.get("frictionless"):
                model = Pcwf(None)
            else:
                model = Pcwf(PcwfParams(
                    mu=_positive_field(rd.get(model_raw, "mu", float, f"{path}.model"), f"{path}.model.mu"),
                    e_t=_positive_field(rd.get(model_raw, "e_t", float, f"{path}.model"), f"{path}.model.e_t"),
                    e_o=_positive_field(rd.get(model_raw, "e_o", float, f"{path}.model"), f"{path}.model.e_o"),
                ))
        elif mtype == "fixed_support":
            prescribed_raw = rd.get(model_raw, "prescribed", dict, f"{path}.model", required=False, default={})
            for key in prescribed_raw:
                if key not in LOCAL_COMPONENTS:
                    raise ScenarioSchemaError(
                        f"{path}.model.prescribed.{key}: unknown wrench component"
                    )
            model = FixedSupport({k: rd.get(prescribed_raw, k, float, f"{path}.model.prescribed")
                                  for k in prescribed_raw})
        else:
            raise ScenarioSchemaError(f"{path}.model.type: unknown contact model {mtype!r}")
        f_n_min = rd.get(raw, "f_n_min", float, path, required=False)
        f_n_max = rd.get(raw, "f_n_max", float, path, required=False)
        if f_n_min is not None and f_n_min < 0:
            raise ScenarioPhysicsError(f"{path}.f_n_min: must be >= 0")
        if f_n_max is not None:
            _positive_field(f_n_max, f"{path}.f_n_max")
        if f_n_min is not None and f_n_max is not None and f_n_min > f_n_max:
            raise ScenarioPhysicsError(f"{path}: f_n_min exceeds f_n_max")
        envs.append(EnvironmentContact(rotation=R, position=pos, model=model,
                                       f_n_min=f_n_min, f_n_max=f_n_max))

    ext_raw = rd.get(doc, "external_wrench", dict, "$")
    external = ExternalWrench(
        force=rd.vec3(ext_raw, "force", "$.external_wrench"),
        moment=rd.vec3(ext_raw, "moment", "$.external_wrench"),
        application_point=rd.vec3(ext_raw, "application_point", "$.external_wrench"),
    )

    torque_model = None
    if doc.get("torque_model") is not None:
        tm_raw = rd.get(doc, "torque_model", dict, "$")
        path = "$.torque_model"
        J_raw = rd.get(tm_raw, "jacobian", list, path)
        try:
            J = np.asarray(J_raw, dtype=float)
        except (TypeError, ValueError):
            raise ScenarioSchemaError(f"{path}.jacobian: expected a numeric matrix") from None
        if J.ndim != 2 or not np.all(np.isfinite(J)):
            raise ScenarioSchemaError(f"{path}.jacobian: expected a finite 2-D matrix")
        l = J.shape[1]

        def tvec(key):
            raw = rd.get(tm_raw, key, list, path)
            if len(raw) != l:
                raise ScenarioSchemaError(f"{path}.{key}: expected {l} entries")
            return np.asarray(raw, dtype=float)

        dofs = tm_raw.get("dofs")
        try:
            torque_model = TorqueModel(jacobian=J, tau_g=tvec("tau_g"), tau_min=tvec("tau_min"),
                                       tau_max=tvec("tau_max"),
                                       dofs=None if dofs is None else tuple(dofs))
        except ScrewGraspError as exc:
            raise ScenarioPhysicsError(f"{path}: {exc}") from None

    tasks = []
    raw_list = rd.get(doc, "tasks", list, "$")
    if not raw_list:
        raise ScenarioSchemaError("$.tasks: at least one task is required")
    for k, raw in enumerate(raw_list):
        path = f"$.tasks[{k}]"
        label = rd.get(raw, "label", str, path)
        axis = _unit(rd.vec3(raw, "axis", path), f"{path}.axis")
        point = rd.vec3(raw, "point", path)
        pitch_raw = raw.get("pitch", 0.0)
        if pitch_raw == "infinite":
            pitch = INFINITE_PITCH
        elif isinstance(pitch_raw, (int, float)) and not isinstance(pitch_raw, bool):
            pitch = float(pitch_raw)
        else:
            raise ScenarioSchemaError(f"{path}.pitch: expected a number or 'infinite'")
        tasks.append((label, TaskScrew(l=axis, q=point, pitch=pitch)))

    family = None
    if doc.get("family") is not None:
        fam_raw = rd.get(doc, "family", dict, "$")
        generator = rd.get(fam_raw, "generator", str, "$.family")
        params_raw = rd.get(fam_raw, "params", dict, "$.family")
        family = FamilyRef(generator, {k: float(v) for k, v in params_raw.items()})

    return Scenario(
        name=name,
        description=doc.get("description", ""),
        manipulator_contacts=tuple(manips),
        environment_contacts=tuple(envs),
        external=external,
        tasks=tuple(tasks),
        torque_model=torque_model,
        family=family,
    )


def load_scenario(path) -> Scenario:
    """Load and fully validate a scenario file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioParseError(f"cannot read {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return scenario_from_dict(doc)


def load_bundled(name: str) -> Scenario:
    """Load one of the golden scenarios shipped with the package."""
    ref = resources.files("screwgrasp.data").joinpath(f"{name}.scenario")
    if not ref.is_file():
        raise ScrewGraspError(f"no bundled scenario {name!r}; available: {sorted(BUILTINS)}")
    return scenario_from_dict(json.loads(ref.read_text(encoding="utf-8")))
