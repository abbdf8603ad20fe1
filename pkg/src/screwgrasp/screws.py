"""Rigid-body screw/wrench algebra.

Wrenches are 6-vectors split into force (N) and moment (N.m) parts, expressed
in a named coordinate frame.  A screw is a spatial line (unit direction ``l``
through point ``q``) with a pitch ``h``; every nonzero wrench decomposes into
a magnitude along a unique screw (Poinsot decomposition), and every screw maps
back to a unit wrench.

Conventions:
  * frames are right-handed; rotations are 3x3 matrices with ``R^T R = I``,
    ``det R = +1`` within ``ROTATION_TOL``;
  * the adjoint transport of a wrench from frame {c} to frame {b}, with
    (R, p) the pose of {c} in {b}, is ``[R f ; p x (R f) + R m]``;
  * a pure moment has infinite pitch, represented by the distinguished
    ``INFINITE_PITCH`` tag (never a float, so accidental arithmetic raises).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateWrenchError, InvalidRotationError, InvalidScrewError

ROTATION_TOL = 1e-9


class InfinitePitch:
    """Tag for the pitch of a pure moment/translation screw.

    Deliberately not a float: ``h + 1`` on an infinite pitch is a TypeError,
    not a silent inf/NaN.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITE_PITCH"


INFINITE_PITCH = InfinitePitch()


def _vec3(v) -> np.ndarray:
    a = np.asarray(v, dtype=float).reshape(3).copy()
    a.setflags(write=False)
    return a


def skew(v: np.ndarray) -> np.ndarray:
    """3x3 cross-product matrix: skew(v) @ u == v x u."""
    x, y, z = np.asarray(v, dtype=float).reshape(3)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def check_rotation(R: np.ndarray, tol: float = ROTATION_TOL) -> np.ndarray:
    """Validate R in SO(3); returns R as a float array.

    Raises InvalidRotationError if ``R^T R`` deviates from identity by more
    than ``tol`` (max abs entry) or ``det R`` is not +1 within ``tol``.
    """
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        raise InvalidRotationError(f"rotation must be 3x3, got shape {R.shape}")
    if not np.all(np.isfinite(R)):
        raise InvalidRotationError("rotation contains non-finite entries")
    err = np.max(np.abs(R.T @ R - np.eye(3)))
    det = np.linalg.det(R)
    # orthonormality error of order eps enters det at the same order
    if err > tol or abs(det - 1.0) > max(tol, 10.0 * err + 1e-12):
        raise InvalidRotationError(
            f"matrix is not a rotation: |R'R - I| = {err:.3e}, det = {det:.12f}"
        )
    return R


@dataclass(frozen=True)
class Wrench:
    """Generalized force: ``force`` (N) and ``moment`` (N.m) in frame ``frame``."""

    force: np.ndarray
    moment: np.ndarray
    frame: str = "b"

    def __post_init__(self):
        object.__setattr__(self, "force", _vec3(self.force))
        object.__setattr__(self, "moment", _vec3(self.moment))
        if not (np.all(np.isfinite(self.force)) and np.all(np.isfinite(self.moment))):
            raise ValueError("wrench components must be finite")

    def as_array(self) -> np.ndarray:
        """Stacked 6-vector [force; moment]."""
        return np.concatenate([self.force, self.moment])

    @staticmethod
    def from_array(w, frame: str = "b") -> "Wrench":
        w = np.asarray(w, dtype=float).reshape(6)
        return Wrench(force=w[:3], moment=w[3:], frame=frame)


@dataclass(frozen=True)
class Twist:
    """Generalized velocity: ``linear`` (m/s) and ``angular`` (rad/s)."""

    linear: np.ndarray
    angular: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "linear", _vec3(self.linear))
        object.__setattr__(self, "angular", _vec3(self.angular))
        if not (np.all(np.isfinite(self.linear)) and np.all(np.isfinite(self.angular))):
            raise ValueError("twist components must be finite")


@dataclass(frozen=True)
class TaskScrew:
    """A screw axis: unit direction ``l`` through point ``q`` with pitch ``h``.

    ``pitch`` is either a finite float (m/rad) or INFINITE_PITCH, in which
    case ``q`` is irrelevant and ignored by all consumers.
    """

    l: np.ndarray
    q: np.ndarray = field(default_factory=lambda: np.zeros(3))
    pitch: float | InfinitePitch = 0.0

    def __post_init__(self):
        object.__setattr__(self, "l", _vec3(self.l))
        object.__setattr__(self, "q", _vec3(self.q))
        n = np.linalg.norm(self.l)
        if abs(n - 1.0) > 1e-9:
            raise InvalidScrewError(f"screw direction must be unit length, |l| = {n:.12f}")
        if not isinstance(self.pitch, InfinitePitch):
            p = float(self.pitch)
            if not np.isfinite(p):
                raise InvalidScrewError("finite pitch must be a finite float; use INFINITE_PITCH")
            object.__setattr__(self, "pitch", p)

    @property
    def infinite_pitch(self) -> bool:
        return isinstance(self.pitch, InfinitePitch)

    def negated(self) -> "TaskScrew":
        """Screw with the opposite direction (same line, same pitch)."""
        return TaskScrew(l=-self.l, q=self.q, pitch=self.pitch)


@dataclass(frozen=True)
class ScrewCoordinates:
    """Screw decomposition of a wrench: axis plus nonnegative magnitude."""

    axis: TaskScrew
    magnitude: float

    def __post_init__(self):
        if self.magnitude < 0:
            raise InvalidScrewError("screw magnitude must be nonnegative")


def adjoint_matrix(R: np.ndarray, p: np.ndarray) -> np.ndarray:
    """6x6 wrench transport for a contact at pose (R, p) in the target frame.

    Maps a local wrench [f; m] to [R f ; p x (R f) + R m].
    """
    R = check_rotation(R)
    p = np.asarray(p, dtype=float).reshape(3)
    G = np.zeros((6, 6))
    G[:3, :3] = R
    G[3:, :3] = skew(p) @ R
    G[3:, 3:] = R
    return G


def adjoint_transform(R: np.ndarray, p: np.ndarray, w: Wrench, to_frame: str = "b") -> Wrench:
    """Transport wrench ``w`` from its frame to the frame in which (R, p) is expressed."""
    G = adjoint_matrix(R, p)
    out = G @ w.as_array()
    return Wrench(force=out[:3], moment=out[3:], frame=to_frame)


def wrench_to_screw(w: Wrench) -> ScrewCoordinates:
    """Poinsot decomposition of a nonzero wrench.

    For ||f|| above the scale-aware threshold: pitch = f.m/||f||^2, axis along
    f through the point closest to the origin, magnitude ||f||.  Otherwise the
    wrench is a pure moment: infinite pitch, axis along m, magnitude ||m||.
    """
    f = w.force
    m = w.moment
    nf = np.linalg.norm(f)
    nm = np.linalg.norm(m)
    if nf == 0.0 and nm == 0.0:
        raise DegenerateWrenchError("zero wrench has no screw coordinates")
    if nf <= 1e-9 * max(1.0, nm):
        axis = TaskScrew(l=m / nm, q=np.zeros(3), pitch=INFINITE_PITCH)
        return ScrewCoordinates(axis=axis, magnitude=float(nm))
    pitch = float(f @ m) / nf**2
    q = np.cross(f, m) / nf**2
    axis = TaskScrew(l=f / nf, q=q, pitch=pitch)
    return ScrewCoordinates(axis=axis, magnitude=float(nf))


def screw_to_unit_wrench(s: TaskScrew, frame: str = "b") -> Wrench:
    """Unit wrench along a screw.

    Finite pitch: unit force along l, moment q x l + h l.
    Infinite pitch: zero force, unit moment along l.
    """
    if s.infinite_pitch:
        return Wrench(force=np.zeros(3), moment=s.l, frame=frame)
    return Wrench(force=s.l, moment=np.cross(s.q, s.l) + s.pitch * s.l, frame=frame)
