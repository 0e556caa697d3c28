"""Linear subspaces of R^n and the angle/distance invariants between them.

A :class:`Subspace` always carries an orthonormal basis, so every
invariant here reduces to a small singular value problem.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, ZeroSubspaceError

RANK_RTOL = 1e-10
ZERO_ANGLE_TOL = 1e-8
INTERSECT_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Subspace:
    """Subspace of R^n stored as an ``(n, k)`` matrix with orthonormal columns.

    ``k == 0`` encodes the zero subspace.
    """

    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=np.float64)
        if b.ndim != 2 or b.shape[0] < 1:
            raise DimensionMismatchError(f"basis must be an (n, k) array with n >= 1, got shape {b.shape}")
        if b.shape[1] > b.shape[0]:
            raise DimensionMismatchError("more basis vectors than the ambient dimension")
        gram = b.T @ b
        if b.shape[1] and np.max(np.abs(gram - np.eye(b.shape[1]))) > 1e-12 * max(1, b.shape[0]):
            raise ValueError("basis columns are not orthonormal")
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(np.zeros((n, 0)))

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(np.eye(n))

    @classmethod
    def span(cls, *vectors) -> "Subspace":
        return orthonormalize(vectors)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def is_zero(self) -> bool:
        return self.dim == 0

    def projector(self) -> np.ndarray:
        """Orthogonal projection matrix onto the subspace."""
        return self.basis @ self.basis.T

    def distance(self, x) -> float:
        x = np.asarray(x, dtype=np.float64)
        return float(np.linalg.norm(x - self.basis @ (self.basis.T @ x)))

    def contains(self, x, tol: float = INTERSECT_TOL) -> bool:
        x = np.asarray(x, dtype=np.float64)
        return self.distance(x) <= tol * max(1.0, float(np.linalg.norm(x)))

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient_dim={self.ambient_dim})"


def orthonormalize(vectors) -> Subspace:
    """Orthonormal basis of the span of ``vectors``.

    ``vectors`` is a sequence of equal-length vectors.  Dependent inputs
    are dropped; rank is decided by singular values above
    ``1e-10 * largest``.
    """
    vecs = [np.asarray(v, dtype=np.float64).ravel() for v in vectors]
    if not vecs:
        raise DimensionMismatchError("cannot infer the ambient dimension from an empty list")
    n = vecs[0].size
    if n < 1 or any(v.size != n for v in vecs):
        raise DimensionMismatchError("vectors must share one length n >= 1")
    return from_columns(np.column_stack(vecs))


def from_columns(a) -> Subspace:
    """Column space of an ``(n, k)`` matrix."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionMismatchError("expected a 2-d array")
    n = a.shape[0]
    if a.shape[1] == 0 or not np.any(a):
        return Subspace.zero(n)
    u, s, _ = np.linalg.svd(a, full_matrices=False)
    rank = int(np.sum(s > RANK_RTOL * s[0]))
    return Subspace(u[:, :rank])


def _check_pair(s1: Subspace, s2: Subspace):
    if s1.ambient_dim != s2.ambient_dim:
        raise DimensionMismatchError(
            f"ambient dimensions differ: {s1.ambient_dim} vs {s2.ambient_dim}"
        )


def _require_nonzero(*subspaces: Subspace):
    for s in subspaces:
        if s.is_zero():
            raise ZeroSubspaceError("principal angles are undefined for the zero subspace")


def principal_angles(s1: Subspace, s2: Subspace) -> np.ndarray:
    """Principal angles in non-decreasing order, ``min(dim s1, dim s2)`` of them.

    Cosines come from the singular values of the basis inner-product
    matrix and sines from the component of the smaller basis orthogonal
    to the larger subspace; combining them with ``arctan2`` keeps small
    angles accurate where ``arccos`` alone would lose half the digits.
    """
    _check_pair(s1, s2)
    _require_nonzero(s1, s2)
    a, b = s1.basis, s2.basis
    if a.shape[1] < b.shape[1]:
        a, b = b, a
    cos = np.linalg.svd(a.T @ b, compute_uv=False)
    sin = np.linalg.svd(b - a @ (a.T @ b), compute_uv=False)
    cos = np.clip(cos, 0.0, 1.0)
    sin = np.clip(sin[::-1], 0.0, 1.0)
    return np.sort(np.arctan2(sin, cos))


def friedrichs_cosine(m: Subspace, n: Subspace) -> float:
    """Cosine of the smallest principal angle above ``1e-8`` rad.

    Returns 0 when every angle is (numerically) zero, i.e. one subspace
    contains the other; the Friedrichs angle of a containment is pi/2.
    """
    angles = principal_angles(m, n)
    nonzero = angles[angles > ZERO_ANGLE_TOL]
    if nonzero.size == 0:
        return 0.0
    return float(np.cos(nonzero[0]))


def sine_between(m: Subspace, n: Subspace) -> float:
    c = friedrichs_cosine(m, n)
    return float(np.sqrt(max(0.0, 1.0 - c * c)))


def directed_distance(m: Subspace, n: Subspace) -> float:
    """``sup { dist(x, n) : x in m, |x| = 1 }``."""
    _check_pair(m, n)
    if m.is_zero():
        raise ZeroSubspaceError("directed distance needs a nonzero first argument")
    if n.is_zero():
        return 1.0
    resid = m.basis - n.basis @ (n.basis.T @ m.basis)
    return float(min(1.0, np.linalg.norm(resid, 2)))


def intersect(s1: Subspace, s2: Subspace, tol: float = INTERSECT_TOL) -> Subspace:
    """Common subspace: directions of ``s1`` within ``tol`` of ``s2``."""
    _check_pair(s1, s2)
    if s1.is_zero() or s2.is_zero():
        return Subspace.zero(s1.ambient_dim)
    a = s1.basis
    resid = a - s2.basis @ (s2.basis.T @ a)
    _, s, vt = np.linalg.svd(resid)
    # pad: svd returns min(n, k) values but vt is k x k
    k = a.shape[1]
    sv = np.zeros(k)
    sv[: s.size] = s
    keep = vt[sv <= tol].T
    if keep.shape[1] == 0:
        return Subspace.zero(s1.ambient_dim)
    return from_columns(a @ keep)


def subspace_sum(s1: Subspace, s2: Subspace) -> Subspace:
    _check_pair(s1, s2)
    return from_columns(np.hstack([s1.basis, s2.basis]))


def orthogonal_complement(s: Subspace) -> Subspace:
    n = s.ambient_dim
    if s.is_zero():
        return Subspace.full(n)
    u, _, _ = np.linalg.svd(s.basis, full_matrices=True)
    return Subspace(u[:, s.dim:].copy())


def same_subspace(s1: Subspace, s2: Subspace, tol: float = 1e-9) -> bool:
    _check_pair(s1, s2)
    if s1.dim != s2.dim:
        return False
    if s1.is_zero():
        return True
    return np.linalg.norm(s1.projector() - s2.projector(), 2) <= tol


def direct_sum_embed(a: Subspace, b: Subspace) -> Subspace:
    """``a (+) b`` inside ``R^{m+n}`` with ``a`` on the leading coordinates."""
    m, n = a.ambient_dim, b.ambient_dim
    top = np.hstack([a.basis, np.zeros((m, b.dim))])
    bottom = np.hstack([np.zeros((n, a.dim)), b.basis])
    return Subspace(np.vstack([top, bottom]))
