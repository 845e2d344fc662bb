"""System construction, relations, invariants, equivalence, serialization."""

import json
import os

import numpy as np
import pytest

from clifford_foliations.algebra import SignedPermMatrix, haar_orthogonal, max_abs, rng_from
from clifford_foliations.clifford import (
    CliffordSystem,
    MalformedSystemError,
    build_complex_structures,
    build_system,
    conjugate_system,
    delta,
    equivalence_profile,
    sub_system,
    system_from_dict,
    system_to_dict,
    trace_invariant,
    verify_relations,
)


class TestDelta:
    def test_small_table(self):
        assert [delta(m) for m in range(1, 9)] == [1, 2, 4, 4, 8, 8, 8, 8]

    def test_recursion(self):
        assert delta(9) == 16
        assert delta(12) == 64
        assert delta(16) == 16 * delta(8) == 128
        for m in range(9, 25):
            assert delta(m) == 16 * delta(m - 8)

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            delta(0)


def assert_anticommuting_structures(structures, dim):
    eye = SignedPermMatrix.identity(dim)
    for i, j in enumerate(structures):
        assert j.n == dim
        assert j.transpose().equals(j.neg()), f"structure {i} not skew"
        assert (j @ j).equals(eye.neg()), f"structure {i} does not square to -Id"
        for other in structures[i + 1:]:
            assert j.anticommutes_with(other)


class TestComplexStructures:
    @pytest.mark.parametrize("n", [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11])
    def test_minimal_sets_exact(self, n):
        dim = delta(n + 1)
        structures = build_complex_structures(n, dim)
        assert len(structures) == n
        assert_anticommuting_structures(structures, dim)

    def test_two_by_two_forced(self):
        (j,) = build_complex_structures(1, 2)
        assert abs(j.to_dense()[1, 0]) == 1.0

    def test_multiples_are_blockwise(self):
        js = build_complex_structures(2, 12)  # three copies of the minimal R^4 block
        assert_anticommuting_structures(js, 12)
        dense = js[0].to_dense()
        assert max_abs(dense[:4, 4:]) == 0.0
        np.testing.assert_array_equal(dense[:4, :4], dense[4:8, 4:8])

    def test_rejects_inadmissible_dim(self):
        with pytest.raises(ValueError):
            build_complex_structures(3, 6)
        with pytest.raises(ValueError):
            build_complex_structures(7, 4)


ALL_PAIRS = [(m, k) for m in range(1, 13) for k in range(1, 5)
             if (m, k) != (1, 1) and 2 * k * delta(m) <= 512]


class TestBuildSystem:
    def test_rejects_degenerate_and_bad_args(self):
        with pytest.raises(ValueError):
            build_system(1, 1)
        with pytest.raises(ValueError):
            build_system(0, 2)
        with pytest.raises(ValueError):
            build_system(2, 2, flips=3)

    def test_dimension_cap(self):
        with pytest.raises(ValueError):
            build_system(12, 4, dim_cap=256)
        with pytest.raises(ValueError):
            build_system(13, 4)  # 2l = 1024 over the default cap
        os.environ["CFL_MAX_DIM"] = "1024"
        try:
            s = build_system(13, 4)  # allowed once the env override raises the cap
            assert s.dim == 8 * delta(13)
            with pytest.raises(ValueError):
                build_system(17, 4)  # 2l = 2048 > 1024
        finally:
            del os.environ["CFL_MAX_DIM"]

    def test_rank_and_dimension(self):
        s = build_system(1, 2)
        assert len(s.generators) == 2 and s.dim == 4
        s = build_system(9, 1)
        assert s.dim == 32 and len(s.generators) == 10

    @pytest.mark.parametrize("m,k", ALL_PAIRS)
    def test_relations_exact_everywhere(self, m, k):
        for flips in {0, min(1, k)}:
            report = verify_relations(build_system(m, k, flips))
            assert report.passed
            assert report.max_violation == 0.0

    def test_m4_generator_product_is_minus_identity(self):
        s = build_system(4, 1)
        prod = s.generators[0]
        for g in s.generators[1:]:
            prod = prod @ g
        np.testing.assert_array_equal(prod.to_dense(), -np.eye(8))

    def test_negating_one_generator_preserves_relations(self):
        s = build_system(3, 2)
        flipped = CliffordSystem(s.m, s.l,
                                 (s.generators[0], s.generators[1].neg()) + s.generators[2:],
                                 None)
        report = verify_relations(flipped)
        assert report.passed and report.max_violation == 0.0


class TestTraceInvariant:
    @pytest.mark.parametrize("m,k,flips,expected", [
        (4, 3, 0, 3), (4, 3, 1, 1), (4, 2, 0, 2), (4, 2, 1, 0), (4, 2, 2, 2),
        (8, 1, 0, 1), (12, 1, 0, 1), (1, 2, 0, 0), (3, 2, 0, 0), (2, 3, 1, 0),
    ])
    def test_values(self, m, k, flips, expected):
        assert trace_invariant(build_system(m, k, flips)) == pytest.approx(expected, abs=1e-12)

    def test_class_count(self):
        # k=3 flips sweep gives floor(3/2)+1 = 2 distinct values
        values = {round(trace_invariant(build_system(4, 3, j))) for j in range(4)}
        assert values == {1, 3}


class TestEquivalence:
    def test_profiles_distinguish_flips_mod4(self):
        a = equivalence_profile(build_system(4, 3, 0))
        b = equivalence_profile(build_system(4, 3, 1))
        assert a.as_tuple() == (4, 3, 3)
        assert b.as_tuple() == (4, 3, 1)
        assert a.as_tuple() != b.as_tuple()

    def test_flip_insensitive_off_mod4(self):
        a = equivalence_profile(build_system(3, 2, 0))
        b = equivalence_profile(build_system(3, 2, 1))
        assert a.as_tuple() == b.as_tuple() == (3, 2, None)

    def test_inferred_multiplicity(self):
        s = build_system(2, 3)
        s2 = sub_system(s, range(3))  # same generators, provenance dropped
        assert equivalence_profile(s2).as_tuple() == (2, 3, None)

    def test_malformed_dimension(self):
        s = build_system(3, 1)  # l = 4
        bad = sub_system(s, [0, 1, 2])  # m = 2 needs delta = 2 | 4: fine
        assert equivalence_profile(bad).k == 2
        worse = sub_system(build_system(3, 1), [0])  # m = 0 invalid for delta
        with pytest.raises(ValueError):
            equivalence_profile(worse)


class TestConjugation:
    def test_identity_and_generator_conjugation(self):
        s = build_system(2, 2)
        same = conjugate_system(s, np.eye(s.dim))
        for i in range(3):
            np.testing.assert_array_equal(same.dense_generator(i), s.dense_generator(i))
        # conjugating by P0 flips the sign of every other generator
        by_p0 = conjugate_system(s, s.dense_generator(0))
        np.testing.assert_allclose(by_p0.dense_generator(0), s.dense_generator(0), atol=1e-14)
        for i in (1, 2):
            np.testing.assert_allclose(by_p0.dense_generator(i), -s.dense_generator(i), atol=1e-14)

    def test_haar_conjugation_keeps_relations_and_profile(self):
        s = build_system(4, 2, 1)
        base = trace_invariant(s)
        for i in range(5):
            a = haar_orthogonal(rng_from(50 + i), s.dim)
            c = conjugate_system(s, a)
            rep = verify_relations(c)
            assert rep.passed and rep.max_violation <= 1e-12
            assert abs(trace_invariant(c) - base) <= 1e-9
            assert equivalence_profile(c).as_tuple() == equivalence_profile(s).as_tuple()

    def test_rejects_non_orthogonal(self):
        s = build_system(2, 1)
        with pytest.raises(ValueError):
            conjugate_system(s, np.eye(s.dim) * 1.001)


class TestSubSystem:
    def test_keep_all_is_identity(self):
        s = build_system(3, 1)
        t = sub_system(s, range(4))
        assert t.m == 3 and all(a.equals(b) for a, b in zip(t.generators, s.generators))

    def test_restriction_gives_disconnected_case(self):
        s = sub_system(build_system(2, 1), [0, 1])
        assert (s.m, s.l) == (1, 2)  # l = m + 1
        assert verify_relations(s).max_violation == 0.0

    def test_drop_one_from_rank_nine(self):
        s = sub_system(build_system(8, 1), range(8))
        assert s.m == 7
        assert verify_relations(s).max_violation == 0.0

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            sub_system(build_system(2, 1), [])


class TestSerialization:
    def test_signed_perm_roundtrip_lossless(self):
        s = build_system(5, 2, 1)
        blob = json.dumps(system_to_dict(s))
        t = system_from_dict(json.loads(blob))
        assert t.m == s.m and t.l == s.l
        assert t.provenance == s.provenance
        for a, b in zip(s.generators, t.generators):
            assert a.equals(b)
        assert json.dumps(system_to_dict(t)) == blob

    def test_dense_roundtrip(self):
        s = conjugate_system(build_system(2, 1), haar_orthogonal(rng_from(9), 4))
        t = system_from_dict(json.loads(json.dumps(system_to_dict(s))))
        for i in range(3):
            np.testing.assert_array_equal(t.dense_generator(i), s.dense_generator(i))

    def test_bad_payload(self):
        d = system_to_dict(build_system(2, 1))
        d["generators"] = d["generators"][:-1]
        with pytest.raises(MalformedSystemError):
            system_from_dict(d)
