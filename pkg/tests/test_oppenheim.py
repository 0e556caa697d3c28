import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from projangles import (
    ABS_SUM,
    EUCLIDEAN,
    MIXED,
    NormSpec,
    Subspace,
    alternating_limits,
    check_consistency_projection,
    consistency_family,
    intersect,
    is_norm_one,
    make_projection,
    operator_norm,
    oppenheim_cos_given,
    oppenheim_cos_inf,
    orthogonal_complement,
    projection_from_matrix,
    same_subspace,
    spectral_radius_numeric,
    subspace_sum,
)
from projangles.errors import ComplementarityError, ConsistencyError, DimensionMismatchError, InconsistentPairError
from projangles.gallery import NONSMOOTH_P1, NONSMOOTH_P2, NONUNIQ_P1, NONUNIQ_P2, NONUNIQ_P12
from projangles.oppenheim import sampled_norm_ratio, unit_directions

from helpers import random_projection, random_subspace

NORMS = (EUCLIDEAN, ABS_SUM, MIXED)


def orth(s):
    return make_projection(s, orthogonal_complement(s))


def consistent_pair(rng, n, zdim=1, kdim=None):
    """Random pair whose ranges share a ``zdim``-dimensional Z and whose kernels lie in one K."""
    kdim = n - zdim - 1 if kdim is None else kdim
    while True:
        basis = np.linalg.qr(rng.standard_normal((n, n)))[0]
        z, k = basis[:, :zdim], basis[:, zdim : zdim + kdim]
        ps = []
        for _ in range(2):
            r = int(rng.integers(max(zdim, n - kdim), n))
            rng_s = Subspace(np.linalg.qr(np.column_stack([z, rng.standard_normal((n, r - zdim))]))[0])
            ker = Subspace(np.linalg.qr(k @ rng.standard_normal((kdim, n - r)))[0]) if r < n else Subspace.zero(n)
            try:
                ps.append(make_projection(rng_s, ker))
            except Exception:
                break
        if len(ps) < 2:
            continue
        try:
            consistency_family(*ps)
        except InconsistentPairError:
            continue
        return ps


@pytest.fixture(scope="module")
def nonuniq():
    return projection_from_matrix(NONUNIQ_P1), projection_from_matrix(NONUNIQ_P2)


class TestNormSpec:
    def test_aliases(self):
        assert NormSpec("l1") == ABS_SUM and NormSpec("l2") == EUCLIDEAN and NormSpec("mixed") == MIXED

    def test_unknown(self):
        with pytest.raises(ValueError):
            NormSpec("sup")

    def test_values(self):
        x = np.array([3.0, -4.0])
        assert EUCLIDEAN(x) == 5.0 and ABS_SUM(x) == 7.0 and MIXED(x) == 12.0

    @given(
        st.lists(st.floats(-1e3, 1e3), min_size=4, max_size=4),
        st.lists(st.floats(-1e3, 1e3), min_size=4, max_size=4),
        st.floats(-1e3, 1e3),
    )
    def test_norm_axioms(self, x, y, a):
        x, y = np.array(x), np.array(y)
        for norm in NORMS:
            assert norm(x + y) <= norm(x) + norm(y) + 1e-9 * (1 + norm(x) + norm(y))
            assert norm(a * x) == pytest.approx(abs(a) * norm(x), rel=1e-12, abs=1e-12)
            assert norm(x) >= 0


class TestOperatorNorm:
    @pytest.mark.parametrize("norm", NORMS, ids=lambda n: n.kind)
    def test_identity(self, norm):
        assert operator_norm(np.eye(3), norm) == pytest.approx(1.0, abs=1e-12)

    def test_exact_norms(self, rng):
        m = rng.standard_normal((4, 4))
        assert operator_norm(m, EUCLIDEAN) == pytest.approx(np.linalg.svd(m, compute_uv=False)[0])
        assert operator_norm(m, ABS_SUM) == pytest.approx(np.abs(m).sum(axis=0).max())

    def test_nonuniqueness_products(self, nonuniq):
        p1, p2 = nonuniq
        assert operator_norm(p1.matrix @ (p2.matrix - NONUNIQ_P12["P12"]), ABS_SUM) == 1.0
        assert operator_norm(p1.matrix @ (p2.matrix - NONUNIQ_P12["P12'"]), ABS_SUM) == 2.0

    def test_mixed_is_lower_bound_and_close(self, rng):
        # dense brute-force search over the unit circle
        for _ in range(10):
            m = rng.standard_normal((2, 2))
            t = np.linspace(0, 2 * np.pi, 200001)
            xs = np.vstack([np.cos(t), np.sin(t)])
            mx = m @ xs
            brute = np.max((np.linalg.norm(mx, axis=0) + np.abs(mx).sum(axis=0)) / (1 + np.abs(xs).sum(axis=0)))
            val = operator_norm(m, MIXED)
            assert val <= brute + 1e-9
            assert val >= brute - 1e-3

    def test_mixed_refinement_never_lowers_sample(self, rng):
        for _ in range(10):
            m = rng.standard_normal((4, 4))
            assert operator_norm(m, MIXED) >= sampled_norm_ratio(m, MIXED) - 1e-15

    def test_zero(self):
        assert operator_norm(np.zeros((3, 3)), MIXED) == 0.0

    def test_shape(self):
        with pytest.raises(DimensionMismatchError):
            operator_norm(np.zeros((2, 3)))

    def test_directions_are_deterministic_unit_vectors(self):
        d = unit_directions(4)
        assert d.shape == (8 + 10_000, 4)
        np.testing.assert_allclose(np.linalg.norm(d, axis=1), 1.0, atol=1e-14)
        assert np.array_equal(d, unit_directions.__wrapped__(4))


class TestConsistencyCheck:
    def test_listed_candidates_admissible(self, nonuniq):
        p1, p2 = nonuniq
        for m in NONUNIQ_P12.values():
            assert check_consistency_projection(m, p1, p2)

    def test_zero_matrix_not_surjective(self, nonuniq):
        p1, p2 = nonuniq
        res = check_consistency_projection(np.zeros((3, 3)), p1, p2)
        assert not res and "surjective" in res.reason

    def test_failure_reasons(self, nonuniq):
        p1, p2 = nonuniq
        assert "idempotent" in check_consistency_projection(2 * np.eye(3), p1, p2).reason
        assert "contained" in check_consistency_projection(np.eye(3), p1, p2).reason
        assert "shape" in check_consistency_projection(np.eye(2), p1, p2).reason
        # a projection onto Z whose kernel misses ker P1 + ker P2
        bad = np.array([[0.0, 0, 0], [0, 0, 0], [1.0, 0, 1.0]])
        assert "P12 P" in check_consistency_projection(bad, p1, p2).reason

    def test_admissible_iff_kernel_contains_sum_of_kernels(self, rng):
        # projections onto Z are admissible exactly when their kernel contains K
        hits = 0
        for i in range(60):
            p1, p2 = consistent_pair(rng, 4)
            fam = consistency_family(p1, p2)
            z, kd = fam.intersection.dim, fam.forced_kernel.dim
            if i % 2:
                # a kernel built to contain K
                kernel = subspace_sum(fam.forced_kernel, random_subspace(rng, 4, 4 - z - kd))
            else:
                kernel = random_subspace(rng, 4, 4 - z)
            try:
                q = make_projection(fam.intersection, kernel)
            except ComplementarityError:
                continue
            contains = same_subspace(subspace_sum(kernel, fam.forced_kernel), kernel, 1e-8)
            hits += contains
            assert bool(check_consistency_projection(q.matrix, p1, p2)) == contains
            assert check_consistency_projection(fam.base_point, p1, p2)
        assert hits >= 20


class TestConsistencyFamily:
    def test_single_line(self):
        line = Subspace.span([1.0, 2.0])
        p = orth(line)
        fam = consistency_family(p, p)
        assert fam.free_dim == 0
        np.testing.assert_allclose(fam.base_point, p.matrix, atol=1e-14)

    def test_nonuniqueness_instance(self, nonuniq):
        p1, p2 = nonuniq
        fam = consistency_family(p1, p2)
        assert fam.intersection.dim == 1 and fam.forced_kernel.dim == 1
        # dim Z * (n - dim Z - dim K) = 1 * (3 - 1 - 1)
        assert fam.free_dim == fam.intersection.dim * (3 - fam.intersection.dim - fam.forced_kernel.dim) == 1
        for name, m in NONUNIQ_P12.items():
            params, residual = fam.params_of(m)
            assert residual <= 1e-9, name
            np.testing.assert_allclose(fam.matrix(params), m, atol=1e-9)
        steps = [fam.params_of(NONUNIQ_P12[k])[0][0] for k in ("P12", "P12'", "P12''")]
        assert np.allclose(np.diff(steps), steps[1] - steps[0]) and steps[1] != steps[0]

    def test_trivial_intersection(self, rng):
        p1, p2 = random_projection(rng, 3, 1), random_projection(rng, 3, 1)
        fam = consistency_family(p1, p2)
        assert fam.intersection.is_zero() and fam.free_dim == 0
        assert np.array_equal(fam.base_point, np.zeros((3, 3)))

    def test_soundness(self, rng):
        for _ in range(20):
            n = int(rng.integers(3, 6))
            zdim = int(rng.integers(1, n - 1))
            p1, p2 = consistent_pair(rng, n, zdim)
            fam = consistency_family(p1, p2)
            assert fam.free_dim == fam.intersection.dim * (n - fam.intersection.dim - fam.forced_kernel.dim)
            for _ in range(100):
                m = fam.matrix(rng.standard_normal(fam.free_dim) * 3)
                assert check_consistency_projection(m, p1, p2, tol=1e-9)

    def test_inconsistent_pair(self):
        # im P1 & im P2 = span(e1) lies in ker P1 + ker P2
        e1, e2, e3 = np.eye(3)
        p1 = make_projection(Subspace.span(e1, e2), Subspace.span(e1 + e3))
        p2 = make_projection(Subspace.span(e1, e2 + e3), Subspace.span(e1 - e3))
        assert intersect(p1.range, p2.range).dim == 1
        with pytest.raises(InconsistentPairError):
            consistency_family(p1, p2)

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatchError):
            consistency_family(random_projection(rng, 2, 1), random_projection(rng, 3, 1))


class TestOppenheimCosine:
    def test_given_l1(self, nonuniq):
        p1, p2 = nonuniq
        assert oppenheim_cos_given(p1, p2, NONUNIQ_P12["P12"], ABS_SUM) == 1.0
        assert oppenheim_cos_given(p1, p2, NONUNIQ_P12["P12'"], ABS_SUM) == 2.0

    def test_given_euclidean_values(self, nonuniq):
        p1, p2 = nonuniq
        vals = [oppenheim_cos_given(p1, p2, NONUNIQ_P12[k], EUCLIDEAN) for k in ("P12", "P12'", "P12''")]
        np.testing.assert_allclose(vals, [math.sqrt(2), 2.0, math.sqrt(10)], atol=1e-12)

    def test_given_rejects_inadmissible(self, nonuniq):
        p1, p2 = nonuniq
        with pytest.raises(ConsistencyError):
            oppenheim_cos_given(p1, p2, np.eye(3))

    def test_lower_bound_when_ranges_meet_trivially(self, rng):
        for _ in range(100):
            n = int(rng.integers(2, 5))
            p1 = random_projection(rng, n, 1)
            p2 = random_projection(rng, n, int(rng.integers(1, n)))
            rho = spectral_radius_numeric(p1.matrix @ p2.matrix)
            for norm in (EUCLIDEAN, ABS_SUM):
                c = oppenheim_cos_given(p1, p2, np.zeros((n, n)), norm)
                assert c >= rho - 1e-8
                a = operator_norm(p1.matrix @ p2.matrix, norm)
                b = operator_norm(p2.matrix @ p1.matrix, norm)
                assert c == pytest.approx(max(a, b), rel=1e-12)

    def test_inf_l1(self, nonuniq):
        p1, p2 = nonuniq
        res = oppenheim_cos_inf(p1, p2, ABS_SUM)
        assert res.value <= 1.0 + 1e-12
        assert res.base_value == 1.0
        assert check_consistency_projection(res.minimizer, p1, p2)

    def test_inf_euclidean(self, nonuniq):
        p1, p2 = nonuniq
        res = oppenheim_cos_inf(p1, p2, EUCLIDEAN)
        assert res.value <= math.sqrt(2) + 1e-12
        assert res.value == pytest.approx(math.sqrt(2), abs=1e-6)

    def test_inf_free_dim_zero(self, rng):
        p1, p2 = random_projection(rng, 2, 1), random_projection(rng, 2, 1)
        res = oppenheim_cos_inf(p1, p2, EUCLIDEAN)
        assert res.value == oppenheim_cos_given(p1, p2, np.zeros((2, 2)), EUCLIDEAN)
        assert res.evaluations == 1

    def test_inf_orthogonal_lines_is_friedrichs_cosine(self):
        for theta in (0.2, 0.9, 1.3):
            p1 = orth(Subspace.span([1.0, 0.0]))
            p2 = orth(Subspace.span([math.cos(theta), math.sin(theta)]))
            assert oppenheim_cos_inf(p1, p2, EUCLIDEAN).value == pytest.approx(math.cos(theta), abs=1e-12)

    def test_monotone_refinement(self, rng):
        for _ in range(5):
            p1, p2 = consistent_pair(rng, 4)
            for norm in (EUCLIDEAN, ABS_SUM):
                res = oppenheim_cos_inf(p1, p2, norm, starts=8)
                base = oppenheim_cos_given(p1, p2, consistency_family(p1, p2).base_point, norm)
                assert res.value <= base + 1e-12
                assert check_consistency_projection(res.minimizer, p1, p2)

    def test_inf_is_deterministic(self, nonuniq):
        p1, p2 = nonuniq
        a, b = oppenheim_cos_inf(p1, p2, ABS_SUM), oppenheim_cos_inf(p1, p2, ABS_SUM)
        assert a.value == b.value and np.array_equal(a.minimizer, b.minimizer) and a.start_index == b.start_index

    def test_inf_mixed_norm(self, nonuniq):
        p1, p2 = nonuniq
        res = oppenheim_cos_inf(p1, p2, MIXED, starts=4)
        assert res.value <= res.base_value + 1e-12
        assert check_consistency_projection(res.minimizer, p1, p2)


class TestAlternatingLimits:
    def test_orthogonal_planes(self):
        e1, e2, e3 = np.eye(3)
        p1, p2 = orth(Subspace.span(e1, e2)), orth(Subspace.span(e1, e2 + 2 * e3))
        lim = alternating_limits(p1, p2)
        np.testing.assert_allclose(lim.forward, np.diag([1.0, 0, 0]), atol=1e-10)
        np.testing.assert_allclose(lim.backward, np.diag([1.0, 0, 0]), atol=1e-10)
        assert lim.p1_norm_one and lim.p2_norm_one

    def test_nonsmooth_pair(self):
        p1, p2 = projection_from_matrix(NONSMOOTH_P1), projection_from_matrix(NONSMOOTH_P2)
        lim = alternating_limits(p1, p2, MIXED)
        e = np.zeros((4, 4))
        e[1, 1] = 1.0
        np.testing.assert_array_equal(lim.forward, e)
        e[1, 2] = -0.25
        np.testing.assert_array_equal(lim.backward, e)
        assert lim.p1_norm_one and lim.p2_norm_one
        assert not is_norm_one(p1, EUCLIDEAN)

    def test_equal_inputs(self, rng):
        p = random_projection(rng, 3, 2)
        lim = alternating_limits(p, p)
        np.testing.assert_allclose(lim.forward, p.matrix, atol=1e-12)
        np.testing.assert_allclose(lim.backward, p.matrix, atol=1e-12)

    def test_divergent_limits_absent(self):
        from projangles.gallery import r4_pair

        p1, p2 = r4_pair(math.pi / 4, -1)
        lim = alternating_limits(p1, p2)
        assert lim.forward is None and lim.forward_verdict == "diverges"
