"""Random instance generators and oracles shared by the test modules."""
from __future__ import annotations

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.stats import ortho_group

from projangles import Subspace, from_columns, make_projection, principal_angles
from projangles.errors import ComplementarityError

DEGENERACY = 1e-4


def random_subspace(rng, n, k) -> Subspace:
    if k == 0:
        return Subspace.zero(n)
    return from_columns(rng.standard_normal((n, k)))


def random_projection(rng, n, r, margin=DEGENERACY):
    """Oblique projection of rank r whose range and kernel are not nearly aligned."""
    while True:
        rng_s, ker = random_subspace(rng, n, r), random_subspace(rng, n, n - r)
        if 0 < r < n and np.sin(principal_angles(rng_s, ker)[0]) < margin:
            continue
        try:
            return make_projection(rng_s, ker)
        except ComplementarityError:
            continue


def random_orthogonal(rng, n):
    return ortho_group.rvs(n, random_state=rng)


def rotate(q, s: Subspace) -> Subspace:
    return Subspace(q @ s.basis) if s.dim else Subspace.zero(s.ambient_dim)


def nontrivial_oracle(m, band=1e-8):
    """Eigenvalues of ``m`` away from 0 and 1, from the dense solver."""
    ev = np.linalg.eigvals(m)
    return ev[(np.abs(ev) > band) & (np.abs(ev - 1.0) > band)]


def match_multisets(a, b) -> float:
    """Largest distance in the optimal one-to-one matching of two point sets."""
    a, b = np.asarray(a), np.asarray(b)
    assert a.shape == b.shape
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


CASE_SHAPES = {
    "2d": (2, 1, 1),
    "3d-rank2": (3, 2, 2),
    "3d-rank1": (3, 1, 1),
    "3d-mixed": (3, 1, 2),
}


def sample_pair(rng, case, margin=DEGENERACY):
    """A random pair for ``case`` with its single nontrivial eigenvalue.

    Instances whose nontrivial eigenvalue sits within ``margin`` of 0 or 1,
    or whose subspaces nearly coincide, are rejected and redrawn.
    """
    n, r1, r2 = CASE_SHAPES[case]
    while True:
        p1, p2 = random_projection(rng, n, r1, margin), random_projection(rng, n, r2, margin)
        subspaces = (p1.range, p1.kernel, p2.range, p2.kernel)
        gaps = [
            principal_angles(a, b)[0]
            for i, a in enumerate(subspaces)
            for b in subspaces[i + 1 :]
            if a.dim + b.dim <= n
        ]
        if min(gaps) < margin:
            continue
        ev = nontrivial_oracle(p1.matrix @ p2.matrix, margin)
        if ev.size != 1 or abs(ev[0].imag) > 1e-12:
            continue
        return p1, p2, float(ev[0].real)
