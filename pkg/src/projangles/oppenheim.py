"""Consistency projections and the Oppenheim angle between two projections.

An admissible ``P12`` is a projection onto ``Z = im P1 & im P2`` with
``P12 P1 = P12 = P12 P2``.  Equivalently, a projection onto ``Z`` whose
kernel contains ``K = ker P1 + ker P2``.  All such maps are parametrised
by linear maps ``T: D -> Z`` for a fixed complement ``D`` of ``Z + K``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.stats import norm as _gauss
from scipy.stats import qmc

from . import _accel
from .errors import ConsistencyError, DimensionMismatchError, InconsistentPairError
from .projections import ObliqueProjection, iterate_product
from .subspaces import Subspace, intersect, orthogonal_complement, subspace_sum

SAMPLE_COUNT = 10_000
NORM_ONE_TOL = 1e-9

_KIND_CODES = {
    "euclidean": _accel.NORM_EUCLIDEAN,
    "abs_sum": _accel.NORM_ABS_SUM,
    "euclid_plus_abs_sum": _accel.NORM_MIXED,
}
_ALIASES = {"l2": "euclidean", "l1": "abs_sum", "mixed": "euclid_plus_abs_sum"}


@dataclass(frozen=True)
class NormSpec:
    """A vector norm on R^n.

    ``euclidean`` is sqrt(sum x_i^2), ``abs_sum`` is sum |x_i| and
    ``euclid_plus_abs_sum`` is their sum, which is uniformly convex but
    not smooth.
    """

    kind: str = "euclidean"

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in _KIND_CODES:
            raise ValueError(f"unknown norm {self.kind!r}")
        object.__setattr__(self, "kind", kind)

    @property
    def code(self) -> int:
        return _KIND_CODES[self.kind]

    def __call__(self, x) -> float:
        return _accel.vector_norm(x, self.code)


EUCLIDEAN = NormSpec("euclidean")
ABS_SUM = NormSpec("abs_sum")
MIXED = NormSpec("euclid_plus_abs_sum")


@lru_cache(maxsize=None)
def unit_directions(n: int, count: int = SAMPLE_COUNT) -> np.ndarray:
    """Deterministic quasi-random unit vectors in R^n.

    The ``2n`` signed coordinate axes come first, followed by a Halton
    sequence pushed through the Gaussian quantile function and
    normalised.
    """
    axes = np.vstack([np.eye(n), -np.eye(n)])
    pts = qmc.Halton(d=n, scramble=False).random(count + 1)[1:]
    pts = np.clip(pts, 1e-12, 1 - 1e-12)
    g = _gauss.ppf(pts)
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    out = np.vstack([axes, g])
    out.setflags(write=False)
    return out


def operator_norm(m, norm: NormSpec = EUCLIDEAN, refine_starts: int = 4) -> float:
    """Norm of ``m`` as an operator on (R^n, norm).

    ``euclidean`` and ``abs_sum`` are exact (largest singular value and
    maximum absolute column sum).  The mixed norm has no closed form; the
    value is the best ratio over :func:`unit_directions`, polished by a
    coordinate-wise ascent from the ``refine_starts`` best samples.  That
    result is a lower bound on the true norm.
    """
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got {m.shape}")
    if norm.kind == "euclidean":
        return float(np.linalg.norm(m, 2))
    if norm.kind == "abs_sum":
        return float(np.abs(m).sum(axis=0).max())
    if not np.any(m):
        return 0.0
    dirs = unit_directions(m.shape[0])
    ratios = _accel.norm_ratios(m, dirs, norm.code)
    best = float(ratios.max())
    for idx in np.argsort(-ratios, kind="stable")[:refine_starts]:
        best = max(best, _accel.refine_norm_ratio(m, dirs[idx], norm.code))
    return best


def sampled_norm_ratio(m, norm: NormSpec, count: int = SAMPLE_COUNT) -> float:
    """Max of ``||m x|| / ||x||`` over the first ``count`` deterministic directions."""
    m = np.asarray(m, dtype=np.float64)
    dirs = unit_directions(m.shape[0], count)
    return _accel.max_norm_ratio(m, dirs, norm.code)[0]


def is_norm_one(p, norm: NormSpec, count: int = SAMPLE_COUNT) -> bool:
    return sampled_norm_ratio(getattr(p, "matrix", p), norm, count) <= 1.0 + NORM_ONE_TOL


# ---------------------------------------------------------------------------
# consistency projections


@dataclass(frozen=True)
class ConsistencyCheck:
    ok: bool
    reason: Optional[str] = None

    def __bool__(self):
        return self.ok


def check_consistency_projection(p12, p1: ObliqueProjection, p2: ObliqueProjection, tol: float = 1e-8) -> ConsistencyCheck:
    """Is ``p12`` an admissible consistency projection for ``(p1, p2)``?

    The reason names the first failed condition.
    """
    m = np.asarray(p12, dtype=np.float64)
    n = p1.n
    if m.shape != (n, n) or p2.n != n:
        return ConsistencyCheck(False, f"shape {m.shape} does not match dimension {n}")
    scale = tol * (1.0 + np.linalg.norm(m))
    if np.linalg.norm(m @ m - m) > scale:
        return ConsistencyCheck(False, "not idempotent")
    z = intersect(p1.range, p2.range)
    if np.linalg.norm(m - z.projector() @ m) > scale:
        return ConsistencyCheck(False, "image is not contained in im P1 & im P2")
    if z.dim and np.linalg.norm(m @ z.basis - z.basis) > scale:
        return ConsistencyCheck(False, "not surjective onto im P1 & im P2")
    if np.linalg.norm(m @ p1.matrix - m) > scale:
        return ConsistencyCheck(False, "P12 P1 != P12")
    if np.linalg.norm(m @ p2.matrix - m) > scale:
        return ConsistencyCheck(False, "P12 P2 != P12")
    return ConsistencyCheck(True)


@dataclass(frozen=True, eq=False)
class ConsistencyFamily:
    """All consistency projections of a pair, as an affine image of R^free_dim."""

    intersection: Subspace
    forced_kernel: Subspace
    complement: Subspace
    _inverse: np.ndarray

    @property
    def n(self) -> int:
        return self.intersection.ambient_dim

    @property
    def free_dim(self) -> int:
        return self.intersection.dim * self.complement.dim

    @property
    def base_point(self) -> np.ndarray:
        return self.matrix(np.zeros(self.free_dim))

    def matrix(self, params) -> np.ndarray:
        """The member with kernel ``K + {d + T d}``, ``T`` given row-major in ``params``."""
        z, d = self.intersection.basis, self.complement.basis
        c = np.asarray(params, dtype=np.float64).reshape(z.shape[1], d.shape[1])
        image = np.hstack([z, np.zeros((self.n, self.forced_kernel.dim)), -z @ c])
        return image @ self._inverse

    def params_of(self, p12) -> tuple[np.ndarray, float]:
        """Parameters reproducing ``p12`` and the Frobenius residual of the fit."""
        z, d = self.intersection.basis, self.complement.basis
        m = np.asarray(p12, dtype=np.float64)
        c = -(z.T @ m @ d)
        params = c.ravel()
        return params, float(np.linalg.norm(self.matrix(params) - m))


def consistency_family(p1: ObliqueProjection, p2: ObliqueProjection) -> ConsistencyFamily:
    if p1.n != p2.n:
        raise DimensionMismatchError("projections act on different spaces")
    z = intersect(p1.range, p2.range)
    k = subspace_sum(p1.kernel, p2.kernel)
    if not intersect(z, k).is_zero():
        raise InconsistentPairError("im P1 & im P2 meets ker P1 + ker P2; no consistency projection exists")
    d = orthogonal_complement(subspace_sum(z, k))
    b = np.hstack([z.basis, k.basis, d.basis])
    return ConsistencyFamily(z, k, d, np.linalg.inv(b))


# ---------------------------------------------------------------------------
# Oppenheim cosine


def _cos_value(p1, p2, p12, norm):
    a = p1.matrix @ (p2.matrix - p12)
    b = p2.matrix @ (p1.matrix - p12)
    return max(operator_norm(a, norm), operator_norm(b, norm))


def oppenheim_cos_given(p1: ObliqueProjection, p2: ObliqueProjection, p12, norm: NormSpec = EUCLIDEAN) -> float:
    """``max(||P1 (P2 - P12)||, ||P2 (P1 - P12)||)`` for an admissible ``P12``."""
    check = check_consistency_projection(p12, p1, p2, tol=1e-8)
    if not check:
        raise ConsistencyError(f"P12 is not admissible: {check.reason}")
    return _cos_value(p1, p2, np.asarray(p12, dtype=np.float64), norm)


@dataclass
class InfimumResult:
    value: float
    minimizer: np.ndarray
    params: np.ndarray
    base_value: float
    start_index: int
    evaluations: int


def _coordinate_search(f, x0, step0=1.0, min_step=1e-6, max_evals=20000):
    x = np.array(x0, dtype=np.float64)
    fx = f(x)
    evals = 1
    step = step0
    while step >= min_step and evals < max_evals:
        improved = False
        for i in range(x.size):
            for sgn in (1.0, -1.0):
                y = x.copy()
                y[i] += sgn * step
                fy = f(y)
                evals += 1
                if fy < fx:
                    x, fx, improved = y, fy, True
                    break
        if not improved:
            step *= 0.5
    return x, fx, evals


def oppenheim_cos_inf(
    p1: ObliqueProjection,
    p2: ObliqueProjection,
    norm: NormSpec = EUCLIDEAN,
    starts: int = 32,
    min_step: float = 1e-6,
    seed: int = 0,
) -> InfimumResult:
    """Smallest Oppenheim cosine found over the consistency family.

    Multi-start coordinate search; start 0 is the base point and the rest
    are seeded Gaussian draws at three scales.  The value is an upper
    bound on the true infimum.
    """
    fam = consistency_family(p1, p2)
    base = fam.base_point
    base_value = _cos_value(p1, p2, base, norm)
    if fam.free_dim == 0:
        return InfimumResult(base_value, base, np.zeros(0), base_value, 0, 1)

    def objective(params):
        return _cos_value(p1, p2, fam.matrix(params), norm)

    rng = np.random.default_rng(seed)
    scales = (0.1, 1.0, 10.0)
    best = None
    total = 0
    for i in range(starts):
        x0 = np.zeros(fam.free_dim) if i == 0 else scales[i % 3] * rng.standard_normal(fam.free_dim)
        x, fx, evals = _coordinate_search(objective, x0, min_step=min_step)
        total += evals
        if best is None or fx < best[1]:
            best = (x, fx, i)
    x, fx, i = best
    return InfimumResult(fx, fam.matrix(x), x, base_value, i, total)


@dataclass
class AlternatingLimits:
    forward: Optional[np.ndarray]
    backward: Optional[np.ndarray]
    forward_verdict: str
    backward_verdict: str
    p1_norm_one: bool
    p2_norm_one: bool


def alternating_limits(
    p1: ObliqueProjection,
    p2: ObliqueProjection,
    norm: NormSpec = EUCLIDEAN,
    max_steps: int = 10000,
    tol: float = 1e-12,
) -> AlternatingLimits:
    """Limits of ``(P1 P2)^n`` and ``(P2 P1)^n`` (None unless convergent).

    ``norm`` only drives the sampled norm-one flags for the inputs.
    """
    fwd = iterate_product(p1, p2, max_steps, tol)
    bwd = iterate_product(p2, p1, max_steps, tol)
    return AlternatingLimits(
        fwd.limit,
        bwd.limit,
        fwd.verdict,
        bwd.verdict,
        is_norm_one(p1, norm),
        is_norm_one(p2, norm),
    )
