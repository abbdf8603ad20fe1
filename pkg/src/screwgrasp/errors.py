"""Exception hierarchy shared across the package."""


class ScrewGraspError(Exception):
    """Base class for all errors raised by this package."""


class InvalidRotationError(ScrewGraspError):
    """A matrix supposed to be in SO(3) is not orthonormal within tolerance."""


class DegenerateWrenchError(ScrewGraspError):
    """A zero wrench has no screw decomposition."""


class InvalidScrewError(ScrewGraspError):
    """A screw axis violates its invariants (e.g. non-unit direction)."""


class CompileError(ScrewGraspError):
    """A grasp problem could not be assembled into a conic program."""


class SolverDataError(ScrewGraspError):
    """Conic program data contains NaN/Inf or inconsistent dimensions."""


class UnsupportedProgramError(ScrewGraspError):
    """The LP oracle cannot handle this program (non-contact cone blocks)."""


class ScenarioError(ScrewGraspError):
    """Base class for scenario-file problems."""


class ScenarioParseError(ScenarioError):
    """The scenario file is not syntactically valid."""


class ScenarioSchemaError(ScenarioError):
    """The scenario file does not match the schema (missing/mistyped field)."""


class ScenarioVersionError(ScenarioSchemaError):
    """The scenario file declares an unsupported schema version."""


class ScenarioPhysicsError(ScenarioError):
    """A field is schema-valid but physically inadmissible (e.g. mu <= 0)."""
