"""Friction-cone contact models.

Two cone families appear at the contacts:

  * soft-finger with elliptic approximation (SFCE) at manipulator contacts:
    tangential forces and a torsional moment about the contact normal share an
    ellipsoidal budget proportional to the normal force;
  * point contact with friction (PCWF) at environment contacts: tangential
    forces only.

Local contact wrenches are expressed in the contact frame with component
order (f_t, f_o, f_n, m_t, m_o, m_n); the frame's third axis is the contact
normal, pointing *into* the object (this convention is used for manipulator
and environment contacts alike).  A rigid environment attachment is modeled
as a FixedSupport whose wrench components are free unless prescribed.

``discretize_*`` produce extreme rays of an inscribed polyhedral cone; they
exist to support the independent LP validation path, not the main solve.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ScrewGraspError
from .screws import check_rotation

LOCAL_COMPONENTS = ("f_t", "f_o", "f_n", "m_t", "m_o", "m_n")


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (np.isfinite(value) and value > 0.0):
        raise ScrewGraspError(f"{name} must be strictly positive, got {value}")
    return value


@dataclass(frozen=True)
class SfceParams:
    """Soft-finger elliptic cone: friction coefficient mu, tangential
    anisotropies e_t/e_o (dimensionless) and torsional length e_n (m)."""

    mu: float
    e_t: float = 1.0
    e_o: float = 1.0
    e_n: float = 1.0

    def __post_init__(self):
        for name in ("mu", "e_t", "e_o", "e_n"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))


@dataclass(frozen=True)
class PcwfParams:
    """Point-contact friction cone: coefficient mu, tangential anisotropies."""

    mu: float
    e_t: float = 1.0
    e_o: float = 1.0

    def __post_init__(self):
        for name in ("mu", "e_t", "e_o"):
            object.__setattr__(self, name, _positive(name, getattr(self, name)))


@dataclass(frozen=True)
class LocalContactWrench:
    """Wrench in a contact frame, components (f_t, f_o, f_n) in N and
    (m_t, m_o, m_n) in N.m."""

    f_t: float = 0.0
    f_o: float = 0.0
    f_n: float = 0.0
    m_t: float = 0.0
    m_o: float = 0.0
    m_n: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.f_t, self.f_o, self.f_n, self.m_t, self.m_o, self.m_n])

    @staticmethod
    def from_array(w) -> "LocalContactWrench":
        w = np.asarray(w, dtype=float).reshape(6)
        return LocalContactWrench(*w)


@dataclass(frozen=True)
class Pcwf:
    """Environment contact transmitting normal + tangential force.

    ``params=None`` marks a frictionless contact: the tangential components
    are pinned to zero instead of dividing by mu = 0.
    """

    params: PcwfParams | None


@dataclass(frozen=True)
class FixedSupport:
    """Rigid environment attachment.

    ``prescribed`` maps local component names (see LOCAL_COMPONENTS) to fixed
    values; every other component is a free reaction.
    """

    prescribed: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for key, value in self.prescribed.items():
            if key not in LOCAL_COMPONENTS:
                raise ScrewGraspError(f"unknown wrench component {key!r} in FixedSupport")
            value = float(value)
            if not np.isfinite(value):
                raise ScrewGraspError(f"prescribed component {key} must be finite")
            clean[key] = value
        object.__setattr__(self, "prescribed", clean)


@dataclass(frozen=True)
class ManipulatorContact:
    """SFCE contact of a finger/manipulator with the object.

    ``rotation`` is the contact frame in the body frame (third column =
    inward normal), ``position`` the contact point (m).  ``cone=None`` marks
    a frictionless contact (f_t = f_o = m_n pinned to zero).  ``f_n_max`` is
    always enforced; the large default keeps programs bounded when no
    physical limit is known.
    """

    rotation: np.ndarray
    position: np.ndarray
    cone: SfceParams | None
    f_n_max: float = 1e6

    def __post_init__(self):
        R = check_rotation(self.rotation)
        R = R.copy()
        R.setflags(write=False)
        p = np.asarray(self.position, dtype=float).reshape(3).copy()
        if not np.all(np.isfinite(p)):
            raise ScrewGraspError("contact position must be finite")
        p.setflags(write=False)
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "position", p)
        object.__setattr__(self, "f_n_max", _positive("f_n_max", self.f_n_max))


@dataclass(frozen=True)
class EnvironmentContact:
    """Contact of the object with the environment (PCWF or fixed support).

    Optional ``f_n_min``/``f_n_max`` bound the local normal-force component
    whenever it is a free variable (all PCWF contacts; FixedSupport only if
    f_n is not prescribed).
    """

    rotation: np.ndarray
    position: np.ndarray
    model: Pcwf | FixedSupport
    f_n_min: float | None = None
    f_n_max: float | None = None

    def __post_init__(self):
        R = check_rotation(self.rotation).copy()
        R.setflags(write=False)
        p = np.asarray(self.position, dtype=float).reshape(3).copy()
        if not np.all(np.isfinite(p)):
            raise ScrewGraspError("contact position must be finite")
        p.setflags(write=False)
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "position", p)
        if self.f_n_min is not None:
            f_n_min = float(self.f_n_min)
            if not (np.isfinite(f_n_min) and f_n_min >= 0.0):
                raise ScrewGraspError("f_n_min must be finite and >= 0")
            object.__setattr__(self, "f_n_min", f_n_min)
        if self.f_n_max is not None:
            object.__setattr__(self, "f_n_max", _positive("f_n_max", self.f_n_max))
        if self.f_n_min is not None and self.f_n_max is not None and self.f_n_min > self.f_n_max:
            raise ScrewGraspError("f_n_min must not exceed f_n_max")


def sfce_contains(p: SfceParams, w: LocalContactWrench, tol: float = 1e-8) -> bool:
    """Membership in the soft-finger elliptic cone.

    True iff (1/mu) * sqrt((f_t/e_t)^2 + (f_o/e_o)^2 + (m_n/e_n)^2) <= f_n + tol.
    ``w`` must carry no tangential moments (m_t = m_o = 0).
    """
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if w.m_t != 0.0 or w.m_o != 0.0:
        raise ValueError("SFCE wrench must have m_t = m_o = 0")
    r = np.hypot(np.hypot(w.f_t / p.e_t, w.f_o / p.e_o), w.m_n / p.e_n) / p.mu
    return bool(r <= w.f_n + tol)


def pcwf_contains(p: PcwfParams, w: LocalContactWrench, tol: float = 1e-8) -> bool:
    """Membership in the point-contact friction cone (no moments allowed)."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    if w.m_t != 0.0 or w.m_o != 0.0 or w.m_n != 0.0:
        raise ValueError("PCWF wrench must have zero moment components")
    r = np.hypot(w.f_t / p.e_t, w.f_o / p.e_o) / p.mu
    return bool(r <= w.f_n + tol)


def _latitudes(facets: int) -> np.ndarray:
    """Polar-angle grid for sphere sampling; nested under facet doubling.

    facets < 8 gives the equator only; from 8 on, the grid step halves each
    time facets doubles, so the sample sets (and their hulls) are nested.
    """
    if facets < 8:
        return np.array([np.pi / 2])
    rings = 2 ** int(np.floor(np.log2(facets // 4)))
    return np.linspace(0.0, np.pi, rings + 1)


def _snap(x: float) -> float:
    """Kill trig noise so grid points that are exactly axis-aligned stay so."""
    return 0.0 if abs(x) < 1e-15 else float(x)


def discretize_sfce(p: SfceParams, f_n: float, facets: int) -> list[LocalContactWrench]:
    """Extreme rays of an inscribed polyhedral approximation of the SFCE cone.

    Samples the boundary ellipsoid at normal force ``f_n`` on a nested
    latitude/longitude grid of the (f_t/e_t, f_o/e_o, m_n/e_n) sphere; every
    returned wrench lies exactly on the cone boundary, so the convex hull of
    the rays is inscribed in the true cone.
    """
    if facets < 4:
        raise ValueError("facets must be >= 4")
    f_n = _positive("f_n", f_n)
    radius = p.mu * f_n
    phis = 2.0 * np.pi * np.arange(facets) / facets
    rays: list[LocalContactWrench] = []
    for theta in _latitudes(facets):
        s, c = _snap(np.sin(theta)), _snap(np.cos(theta))
        if s == 0.0:  # pole: all longitudes coincide
            rays.append(LocalContactWrench(f_n=f_n, m_n=radius * p.e_n * np.sign(c)))
            continue
        for phi in phis:
            rays.append(
                LocalContactWrench(
                    f_t=radius * p.e_t * _snap(s * np.cos(phi)),
                    f_o=radius * p.e_o * _snap(s * np.sin(phi)),
                    f_n=f_n,
                    m_n=radius * p.e_n * c,
                )
            )
    return rays


def discretize_pcwf(p: PcwfParams, f_n: float, facets: int) -> list[LocalContactWrench]:
    """Extreme rays of the inscribed regular-polygon approximation of PCWF."""
    if facets < 4:
        raise ValueError("facets must be >= 4")
    f_n = _positive("f_n", f_n)
    radius = p.mu * f_n
    phis = 2.0 * np.pi * np.arange(facets) / facets
    return [
        LocalContactWrench(
            f_t=radius * p.e_t * _snap(np.cos(phi)),
            f_o=radius * p.e_o * _snap(np.sin(phi)),
            f_n=f_n,
        )
        for phi in phis
    ]
