"""Oblique projections, closed-form eigenvalue formulas for their products,
and the alternating iteration engine."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from . import _accel
from .errors import (
    AbsentEigenvalueError,
    ComplementarityError,
    DimensionMismatchError,
    GeometryError,
    NotAProjectionError,
    TrivialProjectionError,
    UnsupportedCaseError,
)
from .projective import ProjectivePoint, cross_ratio, plane_coordinates
from .subspaces import (
    RANK_RTOL,
    Subspace,
    direct_sum_embed,
    directed_distance,
    from_columns,
    intersect,
    principal_angles,
    subspace_sum,
)

TRIVIAL_BAND = 1e-8
DIVERGENCE_THRESHOLD = 1e12
COMPLEMENT_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ObliqueProjection:
    """Idempotent ``n x n`` matrix together with its range and kernel."""

    matrix: np.ndarray
    range: Subspace
    kernel: Subspace

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.float64)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        n = m.shape[0]
        if m.shape != (n, n) or self.range.ambient_dim != n or self.kernel.ambient_dim != n:
            raise DimensionMismatchError("matrix, range and kernel must share one dimension")
        if self.range.dim + self.kernel.dim != n:
            raise ComplementarityError("dim range + dim kernel must equal n")
        fro = np.linalg.norm(m)
        if np.linalg.norm(m @ m - m) > 1e-9 * (1 + fro):
            raise NotAProjectionError("matrix is not idempotent")
        scale = 1e-9 * (1 + fro)
        if self.range.dim and np.abs(m @ self.range.basis - self.range.basis).max() > scale:
            raise NotAProjectionError("matrix does not fix its range")
        if self.kernel.dim and np.abs(m @ self.kernel.basis).max() > scale:
            raise NotAProjectionError("matrix does not annihilate its kernel")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def rank(self) -> int:
        return self.range.dim

    def complement(self) -> "ObliqueProjection":
        """``I - P``: range and kernel swapped."""
        return ObliqueProjection(np.eye(self.n) - self.matrix, self.kernel, self.range)

    def __matmul__(self, other):
        if isinstance(other, ObliqueProjection):
            return self.matrix @ other.matrix
        return self.matrix @ other

    def __repr__(self):
        return f"ObliqueProjection(n={self.n}, rank={self.rank})"


def make_projection(range: Subspace, kernel: Subspace) -> ObliqueProjection:
    """The projection ``P(range, kernel)``: image ``range``, null space ``kernel``."""
    n = range.ambient_dim
    if kernel.ambient_dim != n:
        raise DimensionMismatchError("range and kernel live in different spaces")
    if range.dim + kernel.dim != n:
        raise ComplementarityError(
            f"dim range ({range.dim}) + dim kernel ({kernel.dim}) != {n}"
        )
    if range.dim == 0:
        return ObliqueProjection(np.zeros((n, n)), range, kernel)
    if kernel.dim == 0:
        return ObliqueProjection(np.eye(n), range, kernel)
    b = np.hstack([range.basis, kernel.basis])
    smin = np.linalg.svd(b, compute_uv=False)[-1]
    if smin <= COMPLEMENT_TOL:
        raise ComplementarityError(
            f"range and kernel are not complementary (min singular value {smin:.3e})",
            min_singular_value=float(smin),
        )
    target = np.hstack([range.basis, np.zeros((n, kernel.dim))])
    # P b = target  =>  b^T P^T = target^T
    m = np.linalg.solve(b.T, target.T).T
    return ObliqueProjection(m, range, kernel)


def projection_from_matrix(matrix, tol: float = 1e-8) -> ObliqueProjection:
    """Wrap an idempotent matrix, recovering range and kernel from its SVD."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {m.shape}")
    fro = np.linalg.norm(m)
    if np.linalg.norm(m @ m - m) > tol * (1 + fro):
        raise NotAProjectionError("matrix is not idempotent")
    u, s, vt = np.linalg.svd(m)
    rank = int(np.sum(s > RANK_RTOL * max(s[0], 1.0))) if s.size else 0
    rng = Subspace(u[:, :rank].copy())
    ker = Subspace(vt[rank:].T.copy())
    return ObliqueProjection(m, rng, ker)


def direct_sum(p: ObliqueProjection, q: ObliqueProjection) -> ObliqueProjection:
    m, n = p.n, q.n
    mat = np.zeros((m + n, m + n))
    mat[:m, :m] = p.matrix
    mat[m:, m:] = q.matrix
    return ObliqueProjection(
        mat, direct_sum_embed(p.range, q.range), direct_sum_embed(p.kernel, q.kernel)
    )


# ---------------------------------------------------------------------------
# spectra


def spectral_radius_numeric(m) -> float:
    """Largest eigenvalue modulus from a dense eigensolver."""
    m = np.asarray(m, dtype=np.float64)
    if m.size == 0:
        return 0.0
    return float(np.max(np.abs(np.linalg.eigvals(m))))


def essential_spectral_radius(m, band: float = TRIVIAL_BAND) -> float:
    """Spectral radius after discarding eigenvalues within ``band`` of 1.

    This is the radius on a complement of the fixed space, which is what
    decides convergence of the powers of ``m``.
    """
    ev = np.linalg.eigvals(np.asarray(m, dtype=np.float64))
    rest = np.abs(ev[np.abs(ev - 1.0) > band])
    return float(rest.max()) if rest.size else 0.0


def nontrivial_eigenvalues_numeric(m, band: float = TRIVIAL_BAND) -> np.ndarray:
    ev = np.linalg.eigvals(np.asarray(m, dtype=np.float64))
    keep = (np.abs(ev) > band) & (np.abs(ev - 1.0) > band)
    return ev[keep]


# ---------------------------------------------------------------------------
# two dimensions


def _require_rank1_plane(*ps: ObliqueProjection):
    for p in ps:
        if p.n != 2:
            raise DimensionMismatchError("expected projections on R^2")
        if p.rank != 1:
            raise TrivialProjectionError(f"projection of rank {p.rank} is trivial in R^2")


def _point(line: Subspace) -> ProjectivePoint:
    return ProjectivePoint.of(line.basis[:, 0])


def nonzero_eigenvalue_2d(p1: ObliqueProjection, p2: ObliqueProjection) -> float:
    """The only possibly nonzero eigenvalue of ``P1 P2``: ``[R1, R2, N2, N1]``."""
    _require_rank1_plane(p1, p2)
    return cross_ratio(_point(p1.range), _point(p2.range), _point(p2.kernel), _point(p1.kernel))


def _line_sine(a: Subspace, b: Subspace) -> float:
    # sine of the angle between two lines; 0 when they coincide
    return float(np.sin(principal_angles(a, b)[0]))


def spectral_radius_formula_2d(p1: ObliqueProjection, p2: ObliqueProjection) -> float:
    """``s(R1,N2) s(R2,N1) / (s(R1,N1) s(R2,N2))``."""
    _require_rank1_plane(p1, p2)
    r1, n1, r2, n2 = p1.range, p1.kernel, p2.range, p2.kernel
    return (_line_sine(r1, n2) * _line_sine(r2, n1)) / (_line_sine(r1, n1) * _line_sine(r2, n2))


# ---------------------------------------------------------------------------
# invariant planes


def plane_sections(p1: ObliqueProjection, p2: ObliqueProjection, plane: Subspace):
    """The lines ``plane & R1, plane & R2, plane & N1, plane & N2``.

    Raises :class:`GeometryError` unless all four are lines and no two
    of them coincide.
    """
    if plane.dim != 2:
        raise GeometryError(f"expected a plane, got dimension {plane.dim}")
    names = ("R1", "R2", "N1", "N2")
    lines = [intersect(plane, s) for s in (p1.range, p2.range, p1.kernel, p2.kernel)]
    for name, line in zip(names, lines):
        if line.dim != 1:
            raise GeometryError(f"plane meets {name} in dimension {line.dim}, expected 1")
    for (i, a), (j, b) in combinations(enumerate(lines), 2):
        if not intersect(a, b).is_zero():
            raise GeometryError(f"sections {names[i]} and {names[j]} coincide")
    return tuple(lines)


def eigen_plane(p1: ObliqueProjection, p2: ObliqueProjection, v, tol: float = 1e-8) -> Subspace:
    """``span(v, P2 v)`` for a nontrivial eigenvector ``v`` of ``P1 P2``."""
    v = np.asarray(v, dtype=np.float64).ravel()
    if p1.n != p2.n or v.size != p1.n:
        raise DimensionMismatchError("projections and vector must share one dimension")
    nv = np.linalg.norm(v)
    if nv == 0:
        raise GeometryError("zero vector is not an eigenvector")
    v = v / nv
    prod = p1.matrix @ p2.matrix
    w = prod @ v
    lam = float(v @ w)
    if np.linalg.norm(w - lam * v) > tol * max(1.0, np.linalg.norm(prod, 2)):
        raise GeometryError("vector is not an eigenvector of P1 P2")
    if abs(lam) <= TRIVIAL_BAND or abs(lam - 1.0) <= TRIVIAL_BAND:
        raise GeometryError(f"eigenvalue {lam:.3g} is trivial (0 or 1)")
    plane = from_columns(np.column_stack([v, p2.matrix @ v]))
    plane_sections(p1, p2, plane)
    return plane


def invariant_plane_eigenvalue(p1: ObliqueProjection, p2: ObliqueProjection, e: Subspace, tol: float = 1e-8) -> float:
    """Eigenvalue of ``P1 P2`` carried by an invariant plane ``e``.

    Computed as the cross-ratio ``[R1', R2', N2', N1']`` of the four
    section lines in plane coordinates.  The line ``e & R1`` is checked to
    be an eigenspace for that value.
    """
    r1, r2, n1, n2 = plane_sections(p1, p2, e)
    pts = [plane_coordinates(line, e) for line in (r1, r2, n2, n1)]
    lam = cross_ratio(*pts)
    if not np.isfinite(lam) or abs(lam) <= TRIVIAL_BAND or abs(lam - 1.0) <= TRIVIAL_BAND:
        raise GeometryError(f"plane carries a trivial eigenvalue ({lam})")
    prod = p1.matrix @ p2.matrix
    x = r1.basis[:, 0]
    if np.linalg.norm(prod @ x - lam * x) > tol * max(1.0, np.linalg.norm(prod, 2)):
        raise GeometryError("plane & R1 is not an eigenspace of P1 P2")
    return float(lam)


# ---------------------------------------------------------------------------
# three dimensions


def _candidate_plane(p1: ObliqueProjection, p2: ObliqueProjection) -> Optional[Subspace]:
    """The only plane that can carry a nontrivial eigenvalue, if any."""
    if p1.rank == 2:
        a, b = p1.kernel, p2.kernel
    else:
        a, b = p1.range, p2.range
    if not intersect(a, b).is_zero():
        return None
    plane = subspace_sum(a, b)
    try:
        plane_sections(p1, p2, plane)
    except GeometryError:
        return None
    return plane


def _check_3d_same_rank(p1: ObliqueProjection, p2: ObliqueProjection):
    if p1.n != 3 or p2.n != 3:
        raise DimensionMismatchError("expected projections on R^3")
    for p in (p1, p2):
        if p.rank in (0, 3):
            raise TrivialProjectionError(f"projection of rank {p.rank} is trivial")
    if p1.rank != p2.rank:
        raise UnsupportedCaseError("ranks differ; use mixed_case_eigenvalue")


def nontrivial_eigenvalue_3d(p1: ObliqueProjection, p2: ObliqueProjection) -> Optional[float]:
    """``|lambda|`` of the unique nontrivial eigenvalue of ``P1 P2`` in R^3, or None.

    Both projections must have rank 2 (ratio of directed distances from
    kernels to ranges) or both rank 1 (ranges and kernels swapped).
    """
    _check_3d_same_rank(p1, p2)
    if _candidate_plane(p1, p2) is None:
        return None
    r1, n1, r2, n2 = p1.range, p1.kernel, p2.range, p2.kernel
    if p1.rank == 2:
        num = directed_distance(n2, r1) * directed_distance(n1, r2)
        den = directed_distance(n1, r1) * directed_distance(n2, r2)
    else:
        num = directed_distance(r1, n2) * directed_distance(r2, n1)
        den = directed_distance(r1, n1) * directed_distance(r2, n2)
    return num / den


def signed_nontrivial_eigenvalue_3d(p1: ObliqueProjection, p2: ObliqueProjection) -> Optional[float]:
    """Same cases as :func:`nontrivial_eigenvalue_3d`, sign included."""
    _check_3d_same_rank(p1, p2)
    plane = _candidate_plane(p1, p2)
    if plane is None:
        return None
    return invariant_plane_eigenvalue(p1, p2, plane)


def mixed_case_eigenvalue(p1: ObliqueProjection, p2: ObliqueProjection) -> float:
    """Nontrivial eigenvalue of ``P1 P2`` when one range is a line and the other a plane.

    Writes it as ``1 - mu`` with ``mu`` the nontrivial eigenvalue of
    ``P(im P1, ker P1) P(ker P2, im P2)``, two rank-1 projections.
    """
    if p1.n != 3 or p2.n != 3:
        raise DimensionMismatchError("expected projections on R^3")
    ranks = (p1.rank, p2.rank)
    if ranks == (2, 1):
        # nonzero spectra of AB and BA coincide
        p1, p2 = p2, p1
    elif ranks != (1, 2):
        raise UnsupportedCaseError(f"mixed case needs ranks (1, 2), got {ranks}")
    q1, q2 = p1, p2.complement()
    if nontrivial_eigenvalue_3d(q1, q2) is None:
        raise AbsentEigenvalueError("swapped pair has no nontrivial eigenvalue")
    mu = signed_nontrivial_eigenvalue_3d(q1, q2)
    return 1.0 - mu


# ---------------------------------------------------------------------------
# iteration


@dataclass
class IterationReport:
    verdict: str
    steps: int
    step_norms: list = field(repr=False)
    radius_estimate: float
    limit: Optional[np.ndarray] = None
    last: Optional[np.ndarray] = field(default=None, repr=False)


def _radius_from_trajectory(norms: np.ndarray, window: int = 10) -> float:
    nz = norms[norms > 0][-window:]
    if nz.size < 2:
        return 0.0
    return float((nz[-1] / nz[0]) ** (1.0 / (nz.size - 1)))


def iterate_product(p1, p2, max_steps: int = 10000, tol: float = 1e-12, backend=None) -> IterationReport:
    """Follow ``A_k = (P1 P2)^k`` until successive powers agree or blow up.

    ``p1``/``p2`` may be :class:`ObliqueProjection` or plain matrices.
    """
    a = getattr(p1, "matrix", p1)
    b = getattr(p2, "matrix", p2)
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"incompatible shapes {a.shape} and {b.shape}")
    if max_steps < 1 or tol <= 0:
        raise ValueError("need max_steps >= 1 and tol > 0")
    last, steps, norms, status = _accel.power_iterate(a @ b, max_steps, tol, DIVERGENCE_THRESHOLD, backend)
    verdict = {_accel.CONVERGED: "converges", _accel.DIVERGED: "diverges"}.get(status, "inconclusive")
    return IterationReport(
        verdict=verdict,
        steps=steps,
        step_norms=norms.tolist(),
        radius_estimate=_radius_from_trajectory(norms),
        limit=last if verdict == "converges" else None,
        last=last,
    )


# ---------------------------------------------------------------------------
# closed-form prediction


def _block_split(a: np.ndarray, b: np.ndarray) -> Optional[int]:
    n = a.shape[0]
    for k in range(1, n):
        if not (np.any(a[:k, k:]) or np.any(a[k:, :k]) or np.any(b[:k, k:]) or np.any(b[k:, :k])):
            return k
    return None


def predict_radius(p1: ObliqueProjection, p2: ObliqueProjection):
    """Closed-form modulus of the eigenvalue governing ``(P1 P2)^n``.

    This is the spectral radius of ``P1 P2`` off its fixed space.  Returns
    ``(case, value)``; ``case`` is None when no closed form applies.
    """
    n = p1.n
    if p2.n != n:
        raise DimensionMismatchError("projections act on different spaces")
    if {p1.rank, p2.rank} & {0, n}:
        return "trivial", 0.0
    if n == 2:
        return "2d", spectral_radius_formula_2d(p1, p2)
    if n == 3:
        if p1.rank == p2.rank:
            val = nontrivial_eigenvalue_3d(p1, p2)
            return f"3d-rank{p1.rank}", 0.0 if val is None else val
        try:
            return "3d-mixed", abs(mixed_case_eigenvalue(p1, p2))
        except AbsentEigenvalueError:
            return "3d-mixed", 0.0
    k = _block_split(p1.matrix, p2.matrix)
    if k is None:
        return None, None
    parts = []
    for sl in (slice(0, k), slice(k, n)):
        q1 = projection_from_matrix(p1.matrix[sl, sl])
        q2 = projection_from_matrix(p2.matrix[sl, sl])
        case, val = predict_radius(q1, q2)
        if case is None:
            return None, None
        parts.append(val)
    return "direct-sum", max(parts)
