"""Points of the real projective line and their cross-ratio."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, GeometryError, IndeterminateError, ProjAnglesError
from .subspaces import Subspace

INFINITY = math.inf
DISTINCT_RTOL = 1e-10
VANISH_TOL = 1e-12


@dataclass(frozen=True)
class ProjectivePoint:
    """Homogeneous coordinates ``(lam, mu)``, defined up to nonzero scaling."""

    lam: float
    mu: float

    def __post_init__(self):
        if self.lam == 0 and self.mu == 0:
            raise ProjAnglesError("(0, 0) is not a projective point")
        if not (math.isfinite(self.lam) and math.isfinite(self.mu)):
            raise ProjAnglesError("homogeneous coordinates must be finite")

    @classmethod
    def of(cls, v) -> "ProjectivePoint":
        lam, mu = (float(t) for t in np.asarray(v, dtype=np.float64).ravel())
        return cls(lam, mu)

    def unit(self) -> np.ndarray:
        v = np.array([self.lam, self.mu])
        return v / np.linalg.norm(v)

    def perp(self) -> "ProjectivePoint":
        """The orthogonal line; ``(x1, x2)`` maps to ``(x2, -x1)``."""
        return ProjectivePoint(self.mu, -self.lam)

    def equivalent(self, other: "ProjectivePoint") -> bool:
        return abs(_det(self.unit(), other.unit())) <= DISTINCT_RTOL


def _det(p, q) -> float:
    return float(p[0] * q[1] - p[1] * q[0])


def cross_ratio(a1: ProjectivePoint, a2: ProjectivePoint, a3: ProjectivePoint, a4: ProjectivePoint) -> float:
    """``det(a3,a1) det(a4,a2) / (det(a3,a2) det(a4,a1))``.

    Returns ``math.inf`` when only the denominator vanishes and raises
    :class:`IndeterminateError` on 0/0.
    """
    u1, u2, u3, u4 = (p.unit() for p in (a1, a2, a3, a4))
    num = _det(u3, u1) * _det(u4, u2)
    den = _det(u3, u2) * _det(u4, u1)
    if abs(den) <= VANISH_TOL:
        if abs(num) <= VANISH_TOL:
            raise IndeterminateError("cross-ratio is 0/0 (too many coincident points)")
        return INFINITY
    return num / den


def cross_ratio_from_inner_products(a1, a2, a3, a4) -> float:
    """``<a1,a3><a2,a4> / (<a1,a4><a2,a3>)`` for vectors in R^2.

    Equals ``cross_ratio(span a1, span a2, (span a3)^perp, (span a4)^perp)``.
    """
    a1, a2, a3, a4 = (np.asarray(a, dtype=np.float64).ravel() for a in (a1, a2, a3, a4))
    if any(a.size != 2 for a in (a1, a2, a3, a4)):
        raise DimensionMismatchError("expected vectors in R^2")
    scale = np.prod([np.linalg.norm(a) for a in (a1, a2, a3, a4)])
    den = float(a1 @ a4) * float(a2 @ a3)
    if scale == 0 or abs(den) <= VANISH_TOL * scale:
        raise ProjAnglesError("inner-product denominator vanishes")
    return float(a1 @ a3) * float(a2 @ a4) / den


def plane_coordinates(line: Subspace, plane: Subspace, tol: float = 1e-8) -> ProjectivePoint:
    """Coordinates of ``line`` in the stored orthonormal basis of ``plane``."""
    if line.ambient_dim != plane.ambient_dim:
        raise DimensionMismatchError("line and plane live in different spaces")
    if line.dim != 1 or plane.dim != 2:
        raise GeometryError(f"need a line in a plane, got dims {line.dim} and {plane.dim}")
    d = line.basis[:, 0]
    if not plane.contains(d, tol):
        raise GeometryError("line is not contained in the plane")
    return ProjectivePoint.of(plane.basis.T @ d)
