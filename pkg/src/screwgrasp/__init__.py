"""Grasp quality along a screw axis, solved as a second-order cone program.

The metric of this package is the largest wrench magnitude a grasp system
(fingers, environment contacts, external loads) can apply along a given task
screw, under friction-cone, force-bound and joint-torque constraints.
"""

from .contacts import (
    EnvironmentContact,
    FixedSupport,
    LocalContactWrench,
    ManipulatorContact,
    Pcwf,
    PcwfParams,
    SfceParams,
    discretize_pcwf,
    discretize_sfce,
    pcwf_contains,
    sfce_contains,
)
from .errors import (
    CompileError,
    DegenerateWrenchError,
    InvalidRotationError,
    InvalidScrewError,
    ScenarioError,
    ScenarioParseError,
    ScenarioPhysicsError,
    ScenarioSchemaError,
    ScenarioVersionError,
    ScrewGraspError,
    SolverDataError,
    UnsupportedProgramError,
)
from .metric import (
    GlobalMetricResult,
    MetricResult,
    PathPoint,
    SweepRow,
    global_metric,
    local_metric,
    metric_sweep,
)
from .problem import (
    ConicProgram,
    ExternalWrench,
    GraspProblem,
    RaySupport,
    TorqueModel,
    VariableLayout,
    compile_program,
    external_wrench_in_b,
    grasp_map,
    gws_sample,
    scale_problem,
    transform_problem,
)
from .scenarios import (
    BUILTINS,
    Builtin,
    CuboidParams,
    DoorHandleParams,
    FamilyRef,
    Scenario,
    builtin_scenario,
    cuboid_scenario,
    door_handle_scenario,
    load_bundled,
    load_scenario,
    make_cuboid,
    make_door_handle,
    save_scenario,
    scenario_family,
)
from .screws import (
    INFINITE_PITCH,
    InfinitePitch,
    ScrewCoordinates,
    TaskScrew,
    Twist,
    Wrench,
    adjoint_matrix,
    adjoint_transform,
    screw_to_unit_wrench,
    wrench_to_screw,
)
from .solver import (
    Residuals,
    SolveResult,
    SolveSettings,
    interior_point_backend,
    solve,
    solve_with_oracle,
)

__version__ = "0.1.0"
