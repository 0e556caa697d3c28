"""Machine-checked reproductions of the worked examples.

Each runner returns an :class:`ExampleReport` whose claims compare an
expected value against what the library computes.  A claim is
``"pass"`` or ``"fail"``, except the single ``"flagged"`` claim where
the stated value and the computation disagree and neither is enforced.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
from scipy.linalg import null_space

from .oppenheim import (
    ABS_SUM,
    EUCLIDEAN,
    MIXED,
    check_consistency_projection,
    consistency_family,
    is_norm_one,
    oppenheim_cos_given,
    operator_norm,
    sampled_norm_ratio,
)
from .projections import (
    direct_sum,
    iterate_product,
    make_projection,
    mixed_case_eigenvalue,
    nonzero_eigenvalue_2d,
    projection_from_matrix,
    spectral_radius_formula_2d,
    spectral_radius_numeric,
)
from .projective import cross_ratio, plane_coordinates
from .subspaces import Subspace, intersect, principal_angles, subspace_sum

PHI_SWEEP = (math.pi / 8, math.pi / 4, 3 * math.pi / 8)


def matrix_json(m) -> dict:
    m = np.atleast_2d(np.asarray(m, dtype=np.float64))
    return {"rows": int(m.shape[0]), "cols": int(m.shape[1]), "data": [float(x) for x in m.ravel()]}


def _plain(value):
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


@dataclass
class Claim:
    tag: str
    description: str
    expected: Any
    computed: Any
    tolerance: Optional[float]
    status: str

    def to_json(self) -> dict:
        return {
            "tag": self.tag,
            "description": self.description,
            "expected": _plain(self.expected),
            "computed": _plain(self.computed),
            "tolerance": self.tolerance,
            "status": self.status,
        }


@dataclass
class ExampleReport:
    example_id: str
    title: str
    claims: list = field(default_factory=list)
    artifacts: dict = field(default_factory=dict)

    def close(self, tag, description, expected, computed, tol):
        diff = np.max(np.abs(np.asarray(expected, dtype=float) - np.asarray(computed, dtype=float)))
        status = "pass" if diff <= tol else "fail"
        self.claims.append(Claim(tag, description, expected, computed, tol, status))

    def equal(self, tag, description, expected, computed):
        status = "pass" if expected == computed else "fail"
        self.claims.append(Claim(tag, description, expected, computed, None, status))

    def flag(self, tag, description, expected, computed):
        self.claims.append(Claim(tag, description, expected, computed, None, "flagged"))

    def add(self, name, matrix):
        self.artifacts[name] = np.asarray(matrix, dtype=np.float64)

    @property
    def failures(self):
        return [c for c in self.claims if c.status == "fail"]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "example_id": self.example_id,
            "title": self.title,
            "claims": [c.to_json() for c in self.claims],
            "artifacts": {k: matrix_json(v) for k, v in self.artifacts.items()},
        }


# ---------------------------------------------------------------------------
# planar building blocks


def _line(theta: float) -> Subspace:
    return Subspace.span([math.cos(theta), math.sin(theta)])


def planar_pairs(phi: float):
    """Planar projections of the angle counterexample for a given ``phi``.

    Returns ``(first, block1, block2)``; ``block1`` and ``block2`` map the
    sign ``s`` to the second projection of each block.
    """
    first = make_projection(_line(0.0), _line(math.pi / 2 + phi))
    block1 = {s: make_projection(_line(math.pi / 2 + s * phi), _line(math.pi / 2)) for s in (1, -1)}
    block2 = {s: make_projection(_line(math.pi / 2 - s * phi), _line(0.0)) for s in (1, -1)}
    return first, block1, block2


def r4_pair(phi: float, s: int):
    first, block1, block2 = planar_pairs(phi)
    return direct_sum(first, first), direct_sum(block1[s], block2[s])


def run_2d_angle_example(phi: float = math.pi / 4) -> ExampleReport:
    if not 0 < phi < math.pi / 2:
        raise ValueError("phi must lie in (0, pi/2)")
    rep = ExampleReport("2d", "planar projection pairs with equal angles and different spectral radii")
    for ph in sorted({phi, *PHI_SWEEP}):
        label = f"phi={ph:.6f}"
        first, block1, block2 = planar_pairs(ph)
        expected = {("1", 1): 0.0, ("1", -1): 2.0, ("2", 1): 0.0, ("2", -1): 0.0}
        for (blk, s), target in expected.items():
            second = (block1 if blk == "1" else block2)[s]
            prod = first.matrix @ second.matrix
            rho = spectral_radius_numeric(prod)
            rep.close(f"2d/{label}/block{blk}/s={s:+d}/rho", f"spectral radius of the block-{blk} product, s={s:+d}", target, rho, 1e-9)
            rep.close(
                f"2d/{label}/block{blk}/s={s:+d}/formula",
                "sine-ratio formula agrees with the eigensolver",
                rho,
                spectral_radius_formula_2d(first, second),
                1e-10,
            )
            rep.close(
                f"2d/{label}/block{blk}/s={s:+d}/cross-ratio",
                "|[R1, R2, N2, N1]| agrees with the eigensolver",
                rho,
                abs(nonzero_eigenvalue_2d(first, second)),
                1e-10,
            )
        rep.close(f"2d/{label}/block1/s=+1/zero-map", "im P2 = ker P1 makes the product vanish", 0.0,
                  np.abs(first.matrix @ block1[1].matrix).max(), 1e-12)
        for s in (1, -1):
            rep.close(f"2d/{label}/block2/s={s:+d}/containment", "range of the first map lies in the kernel of the second",
                      0.0, np.abs(block2[s].matrix @ first.matrix).max(), 1e-12)
        if ph == phi:
            rep.add("P1", first.matrix)
            for s in (1, -1):
                rep.add(f"P2_block1_s{s:+d}", block1[s].matrix)
                rep.add(f"P2_block2_s{s:+d}", block2[s].matrix)
    return rep


def _subspace_pairs(p1, p2):
    return {
        "range-range": (p1.range, p2.range),
        "range-kernel": (p1.range, p2.kernel),
        "kernel-range": (p1.kernel, p2.range),
        "kernel-kernel": (p1.kernel, p2.kernel),
    }


def run_r4_counterexample(phi: float = math.pi / 4) -> ExampleReport:
    rep = ExampleReport("r4", "R^4 pairs with identical principal angles but spectral radius 0 versus 2")
    for ph in sorted({phi, *PHI_SWEEP}):
        label = f"phi={ph:.6f}"
        p1, p2_plus = r4_pair(ph, 1)
        _, p2_minus = r4_pair(ph, -1)
        rho_plus = spectral_radius_numeric(p1.matrix @ p2_plus.matrix)
        rho_minus = spectral_radius_numeric(p1.matrix @ p2_minus.matrix)
        rep.close(f"r4/{label}/rho+", "spectral radius of P1 P2(+1)", 0.0, rho_plus, 1e-9)
        rep.close(f"r4/{label}/rho-", "spectral radius of P1 P2(-1)", 2.0, rho_minus, 1e-9)
        plus, minus = _subspace_pairs(p1, p2_plus), _subspace_pairs(p1, p2_minus)
        for key in plus:
            rep.close(
                f"r4/{label}/angles/{key}",
                f"principal angles ({key}) agree for s=+1 and s=-1",
                principal_angles(*plus[key]),
                principal_angles(*minus[key]),
                1e-9,
            )
        rep.equal(f"r4/{label}/verdict+", "iteration verdict for s=+1", "converges", iterate_product(p1, p2_plus).verdict)
        rep.equal(f"r4/{label}/verdict-", "iteration verdict for s=-1", "diverges", iterate_product(p1, p2_minus).verdict)
        if ph == phi:
            rep.add("P1", p1.matrix)
            rep.add("P2_plus", p2_plus.matrix)
            rep.add("P2_minus", p2_minus.matrix)
    return rep


# ---------------------------------------------------------------------------
# mixed-rank example in R^3

W1 = np.array([1.0, -1.0, 0.0])
W2 = np.array([1.0, 1.0, 0.0])
W3 = np.array([1.0, 3.0, 1.0])
W4 = np.array([0.0, 1.0, -1.0])
W4_ALT = np.array([1.0, 0.0, 1.0])


def _perp_plane(w) -> Subspace:
    return Subspace(null_space(np.atleast_2d(w)))


def mixed_subspaces():
    """``S1, S2`` (lines), ``S3, S4, S4'`` (planes) of the mixed example."""
    return {
        "S1": Subspace.span(W1),
        "S2": Subspace.span(W2),
        "S3": _perp_plane(W3),
        "S4": _perp_plane(W4),
        "S4'": _perp_plane(W4_ALT),
    }


def run_mixed_3d_example() -> ExampleReport:
    rep = ExampleReport("mixed3d", "mixed-rank pairs in R^3 with equal angles but different convergence")
    s = mixed_subspaces()
    for i in ("S1", "S2", "S3"):
        rep.close(f"mixed3d/angles/{i}", f"angles between S4 and {i} equal those between S4' and {i}",
                  principal_angles(s["S4"], s[i]), principal_angles(s["S4'"], s[i]), 1e-9)
    plane = subspace_sum(s["S1"], s["S2"])
    pts = {k: plane_coordinates(intersect(plane, s[k]), plane) for k in s}
    cr = cross_ratio(pts["S1"], pts["S2"], pts["S3"], pts["S4"])
    cr_alt = cross_ratio(pts["S1"], pts["S2"], pts["S3"], pts["S4'"])
    rep.close("mixed3d/cross-ratio", "[V1, V2, V3, V4]", 0.5, cr, 1e-10)
    rep.close("mixed3d/cross-ratio'", "[V1, V2, V3, V4']", -0.5, cr_alt, 1e-10)
    p2 = make_projection(s["S3"], s["S2"])
    for key, s4, lam, verdict in (("", "S4", 0.5, "converges"), ("'", "S4'", 1.5, "diverges")):
        p1 = make_projection(s["S1"], s[s4])
        rep.close(f"mixed3d/eigenvalue{key}", f"1 - mu for P(S1, {s4}) P(S3, S2)", lam, mixed_case_eigenvalue(p1, p2), 1e-10)
        rep.equal(f"mixed3d/verdict{key}", f"iteration verdict for P(S1, {s4}) P(S3, S2)", verdict, iterate_product(p1, p2).verdict)
        rep.add(f"P(S1,{s4})", p1.matrix)
    rep.add("P(S3,S2)", p2.matrix)
    return rep


# ---------------------------------------------------------------------------
# consistency projections in R^3 with the l1 norm

NONUNIQ_P1 = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
NONUNIQ_P2 = np.array([[0.0, 0.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
NONUNIQ_P12 = {
    "P12": np.diag([0.0, 0.0, 1.0]),
    "P12'": np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 1.0, 1.0]]),
    "P12''": np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [2.0, 2.0, 1.0]]),
}


def run_oppenheim_nonuniqueness() -> ExampleReport:
    rep = ExampleReport("oppenheim", "non-unique consistency projections give different Oppenheim cosines")
    p1, p2 = projection_from_matrix(NONUNIQ_P1), projection_from_matrix(NONUNIQ_P2)
    fam = consistency_family(p1, p2)
    for name, m in NONUNIQ_P12.items():
        rep.equal(f"oppenheim/admissible/{name}", f"{name} is a consistency projection", True,
                  check_consistency_projection(m, p1, p2).ok)
        rep.close(f"oppenheim/family/{name}", f"{name} lies in the parametrised family (fit residual)", 0.0,
                  fam.params_of(m)[1], 1e-9)
        rep.add(name, m)
    for name, target in (("P12", 1.0), ("P12'", 2.0)):
        m = NONUNIQ_P12[name]
        a = operator_norm(p1.matrix @ (p2.matrix - m), ABS_SUM)
        b = operator_norm(p2.matrix @ (p1.matrix - m), ABS_SUM)
        rep.close(f"oppenheim/l1/{name}/first", f"||P1 (P2 - {name})||_1", target, a, 1e-12)
        rep.close(f"oppenheim/l1/{name}/second", f"||P2 (P1 - {name})||_1", target, b, 1e-12)
        rep.close(f"oppenheim/l1/{name}/cos", f"l1 Oppenheim cosine for {name}", target,
                  oppenheim_cos_given(p1, p2, m, ABS_SUM), 1e-12)
        rep.close(f"oppenheim/l1/{name}/norm", f"||{name}||_1", 1.0, operator_norm(m, ABS_SUM), 1e-12)
    euc = {k: oppenheim_cos_given(p1, p2, m, EUCLIDEAN) for k, m in NONUNIQ_P12.items()}
    rep.flag(
        "oppenheim/euclidean/P12-vs-P12'",
        "Euclidean cosines for P12 and P12' are stated to coincide; computed values differ",
        "equal",
        [euc["P12"], euc["P12'"]],
    )
    rep.equal("oppenheim/euclidean/P12'-vs-P12''", "Euclidean cosines for P12' and P12'' differ", True,
              abs(euc["P12'"] - euc["P12''"]) > 1e-6)
    rep.add("P1", p1.matrix)
    rep.add("P2", p2.matrix)
    return rep


# ---------------------------------------------------------------------------
# uniformly convex, non-smooth norm on R^4

NONSMOOTH_P1 = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, -0.25, 0.0], [0.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 0.0]])
NONSMOOTH_P2 = np.diag([0.0, 1.0, 0.0, 1.0])


def run_nonsmooth_example() -> ExampleReport:
    rep = ExampleReport("nonsmooth", "norm-one projections whose alternating limits differ")
    p1, p2 = projection_from_matrix(NONSMOOTH_P1), projection_from_matrix(NONSMOOTH_P2)
    for name, p in (("P1", p1), ("P2", p2)):
        rep.close(f"nonsmooth/norm-one/{name}", f"sampled mixed-norm operator norm of {name}",
                  1.0, sampled_norm_ratio(p.matrix, MIXED), 1e-9)
        rep.equal(f"nonsmooth/norm-one-flag/{name}", f"{name} certified norm-one over the sample", True, is_norm_one(p, MIXED))
    fwd_expected = np.zeros((4, 4))
    fwd_expected[1, 1] = 1.0
    bwd_expected = fwd_expected.copy()
    bwd_expected[1, 2] = -0.25
    fwd = p1.matrix @ p2.matrix
    bwd = p2.matrix @ p1.matrix
    rep.close("nonsmooth/P1P2", "P1 P2 maps (x,y,z,w) to (0,y,0,0)", fwd_expected, fwd, 0.0)
    rep.close("nonsmooth/P2P1", "P2 P1 maps (x,y,z,w) to (0,y-z/4,0,0)", bwd_expected, bwd, 0.0)
    rep.close("nonsmooth/constant-forward", "(P1 P2)^2 = P1 P2", fwd, fwd @ fwd, 0.0)
    rep.close("nonsmooth/constant-backward", "(P2 P1)^2 = P2 P1", bwd, bwd @ bwd, 0.0)
    fwd_it, bwd_it = iterate_product(p1, p2), iterate_product(p2, p1)
    rep.equal("nonsmooth/steps", "both power sequences stop after one step", [1, 1], [fwd_it.steps, bwd_it.steps])
    rep.equal("nonsmooth/limits-differ", "the two alternating limits differ", True,
              fwd_it.limit is not None and bwd_it.limit is not None and not np.allclose(fwd_it.limit, bwd_it.limit))
    for name, lim in (("forward", fwd_it.limit), ("backward", bwd_it.limit)):
        rep.equal(f"nonsmooth/not-consistent/{name}", f"the {name} limit is not a consistency projection", False,
                  bool(check_consistency_projection(lim, p1, p2)))
    rep.add("P1", p1.matrix)
    rep.add("P2", p2.matrix)
    rep.add("lim(P1P2)^n", fwd_it.limit)
    rep.add("lim(P2P1)^n", bwd_it.limit)
    return rep


RUNNERS = {
    "2d": run_2d_angle_example,
    "r4": run_r4_counterexample,
    "mixed3d": run_mixed_3d_example,
    "oppenheim": run_oppenheim_nonuniqueness,
    "nonsmooth": run_nonsmooth_example,
}


def run_all(only: Optional[str] = None) -> list:
    if only is not None:
        if only not in RUNNERS:
            raise KeyError(only)
        return [RUNNERS[only]()]
    return [fn() for fn in RUNNERS.values()]
