"""Composed foliations: specs, leaf classes, cone metric, ambient distances."""

import numpy as np
import pytest

from clifford_foliations.algebra import haar_rotation, rng_from, sample_unit_vectors
from clifford_foliations.clifford import build_system
from clifford_foliations.composed import (
    builtin_spec,
    composed_class,
    composed_quotient_distance,
    leaf_to_leaf_ambient_distance,
    same_leaf,
    signed_svd_triple,
    tensor_orbit_distance,
)
from clifford_foliations.foliation import (
    boundary_fiber_sample,
    fiber_sample,
    fkm_f0,
    mplus_sample,
    pi_c,
    quotient_distance,
)

# ---------------------------------------------------------------------------
# Oracles, independent of the implementation paths they validate
# ---------------------------------------------------------------------------

def signed_triple_oracle(mat):
    """Signed ordered singular values via the eigendecomposition of M^T M."""
    mat = np.asarray(mat, dtype=float).reshape(3, 3)
    evals = np.linalg.eigvalsh(mat.T @ mat)[::-1]
    tau = np.sqrt(np.clip(evals, 0.0, None))
    if np.linalg.det(mat) < 0:
        tau[2] = -tau[2]
    return tau


def orbit_distance_search_oracle(a, b, restarts=12, iters=40, seed=0):
    """Minimize arccos <a, U b V^T> over sampled rotations with local refinement.

    Alternating best-rotation updates on tr(a^T U b V^T) from random starts;
    each half-step is a one-sided alignment solved in closed form by an SVD.
    """
    a = np.asarray(a, dtype=float).reshape(3, 3)
    b = np.asarray(b, dtype=float).reshape(3, 3)
    rng = rng_from(seed)

    def best_rotation(m):
        u, _, vt = np.linalg.svd(m)
        return u @ np.diag([1.0, 1.0, np.linalg.det(u @ vt)]) @ vt

    best = -1.0
    for _ in range(restarts):
        u = haar_rotation(rng, 3)
        v = haar_rotation(rng, 3)
        for _ in range(iters):
            u = best_rotation(b @ v.T @ a.T).T
            v = best_rotation(a.T @ u @ b)
        best = max(best, float(np.sum(a * (u @ b @ v.T))))
    return float(np.arccos(np.clip(best, -1.0, 1.0)))


@pytest.fixture(scope="module")
def s22():
    return build_system(2, 2)


@pytest.fixture(scope="module")
def s82():
    return build_system(8, 2)


class TestBuiltinSpecs:
    def test_points_is_identity(self):
        spec = builtin_spec("points", 4)
        v = sample_unit_vectors(rng_from(0), 5, 1)[0]
        np.testing.assert_array_equal(spec.invariant_map(v), v)
        assert spec.has_zero_dim_leaves

    def test_one_leaf_constant(self):
        spec = builtin_spec("one_leaf", 3)
        u, v = sample_unit_vectors(rng_from(1), 4, 2)
        np.testing.assert_array_equal(spec.invariant_map(u), spec.invariant_map(v))
        assert not spec.has_zero_dim_leaves
        assert spec.quotient_distance(u, v) == 0.0

    def test_height_leaves_and_sampler(self):
        spec = builtin_spec("height", 2)
        rng = rng_from(2)
        v = sample_unit_vectors(rng, 3, 1)[0]
        for _ in range(10):
            w = spec.leaf_sampler(v, rng)
            assert abs(np.linalg.norm(w) - 1.0) <= 1e-12
            np.testing.assert_allclose(spec.invariant_map(w), spec.invariant_map(v),
                                       atol=1e-12)

    def test_tensor_restricted_to_nine_dims(self):
        with pytest.raises(ValueError):
            builtin_spec("tensor_svd", 4)

    def test_unknown_name(self):
        with pytest.raises(ValueError):
            builtin_spec("nonsense", 2)


class TestSignedTriple:
    def test_isotropic_matrix(self):
        np.testing.assert_allclose(signed_svd_triple(np.eye(3) / np.sqrt(3)),
                                   np.full(3, 1 / np.sqrt(3)), atol=1e-14)

    def test_matches_eigen_oracle(self):
        rng = rng_from(3)
        for _ in range(100):
            mat = rng.standard_normal((3, 3))
            np.testing.assert_allclose(signed_svd_triple(mat), signed_triple_oracle(mat),
                                       atol=1e-10)

    def test_rotation_invariance(self):
        rng = rng_from(4)
        mat = rng.standard_normal((3, 3))
        mat /= np.linalg.norm(mat)
        tau = signed_svd_triple(mat)
        for _ in range(200):
            u, v = haar_rotation(rng, 3), haar_rotation(rng, 3)
            np.testing.assert_allclose(signed_svd_triple(u @ mat @ v.T), tau, atol=1e-10)


class TestTensorOrbitDistance:
    def test_zero_and_symmetry(self):
        rng = rng_from(5)
        a = rng.standard_normal((3, 3))
        a /= np.linalg.norm(a)
        b = rng.standard_normal((3, 3))
        b /= np.linalg.norm(b)
        assert tensor_orbit_distance(a, a) <= 1e-7
        assert abs(tensor_orbit_distance(a, b) - tensor_orbit_distance(b, a)) <= 1e-12

    def test_frozen_closed_form(self):
        a = np.zeros((3, 3))
        a[0, 0] = 1.0
        b = np.eye(3) / np.sqrt(3)
        assert abs(tensor_orbit_distance(a, b) - np.arccos(1 / np.sqrt(3))) <= 1e-12

    def test_matches_rotation_search_oracle(self):
        rng = rng_from(6)
        for trial in range(8):
            a = rng.standard_normal((3, 3))
            a /= np.linalg.norm(a)
            b = rng.standard_normal((3, 3))
            b /= np.linalg.norm(b)
            formula = tensor_orbit_distance(a, b)
            searched = orbit_distance_search_oracle(a, b, seed=trial)
            assert abs(formula - searched) <= 1e-3
            # the searched distance can only overshoot the true minimum
            assert searched >= formula - 1e-9


class TestComposedClasses:
    def test_points_class_carries_full_value(self, s22):
        spec = builtin_spec("points", 2)
        v = np.array([0.2, -0.4, 0.1])
        x = fiber_sample(s22, v, 1, 7)[0]
        cls = composed_class(s22, spec, x)
        assert abs(cls.radius - np.linalg.norm(v)) <= 1e-12
        np.testing.assert_allclose(cls.tail, v / np.linalg.norm(v), atol=1e-10)

    def test_origin_class_has_no_tail(self, s22):
        for name in ("points", "one_leaf", "height"):
            spec = builtin_spec(name, 2)
            cls = composed_class(s22, spec, mplus_sample(s22, 1, 8)[0])
            assert cls.tail is None and cls.radius <= 1e-10

    def test_dimension_mismatch_rejected(self, s22):
        with pytest.raises(ValueError):
            composed_class(s22, builtin_spec("points", 3), mplus_sample(s22, 1, 9)[0])


class TestSameLeaf:
    def test_membership_families(self, s22):
        pts = builtin_spec("points", 2)
        one = builtin_spec("one_leaf", 2)
        rng = rng_from(10)
        for i in range(10):
            dirs = sample_unit_vectors(rng, 3, 2)
            r = float(rng.uniform(0.2, 0.9))
            a = fiber_sample(s22, r * dirs[0], 2, 100 + i)
            b = fiber_sample(s22, r * dirs[1], 1, 200 + i)[0]
            assert same_leaf(s22, pts, a[0], a[1])
            assert same_leaf(s22, pts, a[0], -a[0])
            assert not same_leaf(s22, pts, a[0], b)
            assert same_leaf(s22, one, a[0], b)
            c = fiber_sample(s22, (r / 2) * dirs[1], 1, 300 + i)[0]
            assert not same_leaf(s22, one, a[0], c)

    def test_equal_radius_law(self, s22):
        one = builtin_spec("one_leaf", 2)
        rng = rng_from(11)
        for i in range(10):
            dirs = sample_unit_vectors(rng, 3, 2)
            r = float(rng.uniform(0.2, 0.9))
            x = fiber_sample(s22, r * dirs[0], 1, 400 + i)[0]
            y = fiber_sample(s22, r * dirs[1], 1, 500 + i)[0]
            assert same_leaf(s22, one, x, y)
            assert abs(fkm_f0(s22, x)[1] - fkm_f0(s22, y)[1]) <= 2e-9


class TestConeMetric:
    def test_points_spec_reduces_to_disk_metric(self, s22):
        pts = builtin_spec("points", 2)
        x = sample_unit_vectors(rng_from(12), s22.dim, 40)
        for i in range(0, 40, 2):
            d1 = composed_quotient_distance(s22, pts, x[i], x[i + 1])
            d2 = quotient_distance(pi_c(s22, x[i]), pi_c(s22, x[i + 1]))
            assert abs(d1 - d2) <= 1e-9

    def test_same_leaf_distance_zero(self, s22):
        hgt = builtin_spec("height", 2)
        v = np.array([0.4, 0.1, 0.2])
        x = fiber_sample(s22, v, 2, 13)
        assert composed_quotient_distance(s22, hgt, x[0], x[1]) <= 1e-9

    def test_apex_to_boundary(self, s22):
        one = builtin_spec("one_leaf", 2)
        x = mplus_sample(s22, 1, 14)[0]
        y = boundary_fiber_sample(s22, np.array([1.0, 0, 0]), 1, 15)[0]
        assert abs(composed_quotient_distance(s22, one, x, y) - np.pi / 4) <= 1e-7

    def test_one_leaf_is_radius_difference(self, s22):
        one = builtin_spec("one_leaf", 2)
        rng = rng_from(16)
        for i in range(10):
            dirs = sample_unit_vectors(rng, 3, 2)
            r1, r2 = rng.uniform(0.1, 0.95, size=2)
            x = fiber_sample(s22, r1 * dirs[0], 1, 600 + i)[0]
            y = fiber_sample(s22, r2 * dirs[1], 1, 700 + i)[0]
            expected = 0.5 * abs(np.arcsin(r1) - np.arcsin(r2))
            assert abs(composed_quotient_distance(s22, one, x, y) - expected) <= 1e-9

    def test_missing_leaf_metric_rejected(self, s22):
        from clifford_foliations.composed import FoliationSpec
        bare = FoliationSpec("bare", 3, lambda v: np.zeros(1), False)
        x = sample_unit_vectors(rng_from(17), s22.dim, 2)
        with pytest.raises(ValueError):
            composed_quotient_distance(s22, bare, x[0], x[1])


class TestAmbientLeafDistance:
    def test_same_leaf_goes_to_zero(self, s22):
        pts = builtin_spec("points", 2)
        x = fiber_sample(s22, np.array([0.3, 0.2, -0.1]), 2, 18)
        assert leaf_to_leaf_ambient_distance(s22, pts, x[0], x[1], 1500, 19) <= 1e-6

    def test_opposite_boundary_fibers(self, s22):
        pts = builtin_spec("points", 2)
        p = np.array([0.0, 1.0, 0.0])
        x = boundary_fiber_sample(s22, p, 1, 20)[0]
        y = boundary_fiber_sample(s22, -p, 1, 21)[0]
        d = leaf_to_leaf_ambient_distance(s22, pts, x, y, 200, 22)
        assert abs(d - np.pi / 2) <= 1e-3

    def test_distance_to_focal_manifold(self, s22):
        # the origin class is one leaf; its distance from any point equals
        # the cone distance to the apex, half the arcsine of the radius
        pts = builtin_spec("points", 2)
        one = builtin_spec("one_leaf", 2)
        focal = mplus_sample(s22, 1, 31)[0]
        for i, r in enumerate((0.35, 0.7)):
            x = fiber_sample(s22, np.array([r, 0.0, 0.0]), 1, 32 + i)[0]
            expected = 0.5 * np.arcsin(r)
            for spec in (pts, one):
                d = leaf_to_leaf_ambient_distance(s22, spec, x, focal, 2000, 33 + i)
                assert d >= expected - 1e-9
                assert abs(d - expected) <= 1e-3

    def test_matches_cone_metric(self, s22):
        pts = builtin_spec("points", 2)
        hgt = builtin_spec("height", 2)
        rng = rng_from(23)
        for i in range(4):
            va = sample_unit_vectors(rng, 3, 1)[0] * float(rng.uniform(0.2, 0.85))
            vb = sample_unit_vectors(rng, 3, 1)[0] * float(rng.uniform(0.2, 0.85))
            xa = fiber_sample(s22, va, 1, 800 + i)[0]
            xb = fiber_sample(s22, vb, 1, 900 + i)[0]
            dp = leaf_to_leaf_ambient_distance(s22, pts, xa, xb, 4000, 1000 + i, starts=6)
            assert abs(dp - composed_quotient_distance(s22, pts, xa, xb)) <= 1e-3
            dh = leaf_to_leaf_ambient_distance(s22, hgt, xa, xb, 4000, 1100 + i, starts=6)
            assert abs(dh - composed_quotient_distance(s22, hgt, xa, xb)) <= 1e-2

    def test_monotone_in_budget(self, s22):
        # descent starts are fixed beyond the 2048-sample prefix, so larger
        # budgets can only tighten the sampled floor
        hgt = builtin_spec("height", 2)
        xa = fiber_sample(s22, np.array([0.5, 0.0, 0.2]), 1, 24)[0]
        xb = fiber_sample(s22, np.array([-0.1, 0.45, 0.0]), 1, 25)[0]
        estimates = [leaf_to_leaf_ambient_distance(s22, hgt, xa, xb, b, 26)
                     for b in (2048, 4096, 6144, 8192)]
        for small, large in zip(estimates, estimates[1:]):
            assert large <= small + 1e-15


class TestDiameterScenario:
    def test_disk_quotient_attains_pi_over_four(self, s82):
        ten = builtin_spec("tensor_svd", 8)
        x = mplus_sample(s82, 10, 27)
        y = boundary_fiber_sample(s82, np.eye(9)[0], 10, 28)
        rng = rng_from(29)
        z = sample_unit_vectors(rng, s82.dim, 40)
        pool = np.concatenate([x, y, z])
        sup = 0.0
        for i in range(len(pool)):
            for j in range(i + 1, min(i + 8, len(pool))):
                sup = max(sup, composed_quotient_distance(s82, ten, pool[i], pool[j]))
        assert sup <= np.pi / 4 + 1e-6
        assert sup >= np.pi / 4 - 0.05

    def test_sphere_quotient_stays_below(self):
        s81 = build_system(8, 1)
        ten = builtin_spec("tensor_svd", 8)
        x = sample_unit_vectors(rng_from(30), 16, 60)
        sup = 0.0
        for i in range(0, 60, 2):
            sup = max(sup, composed_quotient_distance(s81, ten, x[i], x[i + 1]))
        assert sup <= np.pi / 4 + 1e-6
