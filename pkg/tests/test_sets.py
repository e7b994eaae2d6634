import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from banachproj.harness import random_direction, random_set, random_set_point
from banachproj.sets import (
    Ball,
    Box,
    SetSchemaError,
    Translate,
    VPolytope,
    contains,
    from_dict,
    linear_min_oracle,
    materialize,
    max_norm,
    membership,
    support,
    support_many,
    to_dict,
    translate,
    vertex_array,
)
from banachproj.space import SpaceSpec, dual_pairing

P2 = SpaceSpec(2, 2.0)


class TestDescriptors:
    def test_box_order(self):
        with pytest.raises(SetSchemaError, match="lower <= upper"):
            Box([0, 1], [1, 0])

    def test_ball_radius(self):
        with pytest.raises(SetSchemaError, match="radius"):
            Ball([0, 0], 0.0)

    def test_empty_polytope(self):
        with pytest.raises(SetSchemaError, match="vertices"):
            VPolytope(np.zeros((0, 2)))

    def test_immutable(self):
        b = Box([0, 0], [1, 1])
        with pytest.raises(ValueError):
            b.lower[0] = 5.0

    def test_input_not_aliased(self):
        lo = np.array([0.0, 0.0])
        b = Box(lo, [1, 1])
        lo[0] = -3.0
        assert b.lower[0] == 0.0


class TestMembership:
    def test_box_interior(self):
        assert membership(P2, Box([0, 0], [1, 1]), [0.5, 0.5])

    def test_ball_p3(self):
        assert not membership(SpaceSpec(2, 3.0), Ball([0, 0], 1.0), [2, 0])

    def test_polytope_outside(self):
        assert not membership(P2, VPolytope([[0, 0], [1, 0], [0, 1]]), [1, 1])

    def test_polytope_tolerance(self):
        tri = VPolytope([[0, 0], [1, 0], [0, 1]])
        assert membership(P2, tri, [0.5 + 1e-11, 0.5], tol=1e-9)
        assert not membership(P2, tri, [0.5 + 1e-6, 0.5], tol=1e-9)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            membership(P2, Box([0, 0, 0], [1, 1, 1]), [0, 0, 0])


class TestOracle:
    def test_box(self):
        np.testing.assert_array_equal(linear_min_oracle(P2, Box([0, 0], [1, 1]), [1, -1]), [0, 1])

    def test_polytope(self):
        np.testing.assert_array_equal(linear_min_oracle(P2, VPolytope([[0, 0], [2, 0], [0, 2]]), [-1, 0]), [2, 0])

    def test_ball_euclidean(self):
        z = linear_min_oracle(P2, Ball([0, 0], 1.0), [3, 4])
        np.testing.assert_allclose(z, [-0.6, -0.8], atol=1e-15)
        # no point of the circle does better
        th = np.linspace(0, 2 * np.pi, 10000)
        circle = np.stack([np.cos(th), np.sin(th)], axis=1)
        assert np.dot([3, 4], z) <= (circle @ [3, 4]).min() + 1e-12

    def test_translate(self):
        s = Translate(Box([0, 0], [1, 1]), [5, 5])
        np.testing.assert_array_equal(linear_min_oracle(P2, s, [1, 1]), [5, 5])

    def test_zero_direction(self):
        with pytest.raises(ValueError, match="nonzero"):
            linear_min_oracle(P2, Box([0, 0], [1, 1]), [0, 0])

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([1.5, 2.0, 3.0, 4.0]), st.integers(2, 4))
    def test_optimal_against_samples(self, seed, p, dim):
        rng = np.random.default_rng(seed)
        space = SpaceSpec(dim, p)
        s = random_set(rng, dim)
        c = rng.standard_normal(dim)
        z = linear_min_oracle(space, s, c)
        assert membership(space, s, z, 1e-9)
        pts = np.array([random_set_point(rng, s, p) for _ in range(200)])
        assert dual_pairing(c, z) <= (pts @ c).min() + 1e-9

    def test_support_many_matches_scalar(self):
        rng = np.random.default_rng(4)
        for p in (1.5, 2.0, 3.0):
            space = SpaceSpec(3, p)
            for s in (Box([0, -1, 2], [1, 1, 3]), Ball([1, 2, 3], 0.7), VPolytope(rng.uniform(-1, 1, (6, 3)))):
                w = rng.standard_normal((50, 3))
                expect = [support(space, s, row) for row in w]
                np.testing.assert_allclose(support_many(space, s, w), expect, rtol=1e-12, atol=1e-12)


class TestTranslate:
    def test_zero_shift(self):
        s = Ball([1, 2], 3.0)
        assert to_dict(translate(s, [0, 0])) == to_dict(s)

    def test_box(self):
        t = translate(Box([0, 0], [1, 1]), [1, 1])
        assert isinstance(t, Box)
        np.testing.assert_array_equal(t.lower, [1, 1])
        np.testing.assert_array_equal(t.upper, [2, 2])

    def test_nested_translate(self):
        s = Translate(Translate(Box([0, 0], [1, 1]), [1, 0]), [0, 2])
        m = materialize(s)
        np.testing.assert_array_equal(m.lower, [1, 2])

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 2**32 - 1), st.sampled_from([1.5, 2.0, 3.0]))
    def test_membership_commutes(self, seed, p):
        rng = np.random.default_rng(seed)
        space = SpaceSpec(2, p)
        s = random_set(rng, 2)
        t = rng.uniform(-3, 3, 2)
        x = rng.uniform(-6, 6, 2)
        assert membership(space, translate(s, t), x + t) == membership(space, s, x)
        assert membership(space, Translate(s, t), x + t) == membership(space, s, x)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            translate(Box([0, 0], [1, 1]), [1, 1, 1])


class TestSchema:
    @pytest.mark.parametrize(
        "s",
        [
            Box([0, 0], [1, 2]),
            Ball([1, -1], 2.5),
            VPolytope([[0, 0], [1, 0], [0, 1]]),
            Translate(Ball([0, 0], 1.0), [3, 4]),
        ],
    )
    def test_round_trip(self, s):
        again = from_dict(json.loads(json.dumps(to_dict(s))))
        assert to_dict(again) == to_dict(s)

    @pytest.mark.parametrize(
        "d, field",
        [
            ({"kind": "box", "lower": [0, 0], "upper": "x"}, "upper"),
            ({"kind": "box", "lower": [0, 0]}, "upper"),
            ({"kind": "ball", "center": [0, 0], "radius": -1}, "radius"),
            ({"kind": "sphere"}, "kind"),
            ({"kind": "vpolytope", "vertices": [1, 2]}, "vertices"),
            ({"kind": "box", "lower": [0], "upper": [1], "color": 1}, "color"),
            ({"kind": "translate", "inner": {"kind": "ball", "center": [0], "radius": 1}, "shift": [1, 2]}, "shift"),
        ],
    )
    def test_errors_name_field(self, d, field):
        with pytest.raises(SetSchemaError, match=f"'{field}'"):
            from_dict(d)


class TestHelpers:
    def test_box_vertices(self):
        v = vertex_array(Box([0, 0], [1, 2]))
        assert {tuple(r) for r in v} == {(0, 0), (1, 0), (0, 2), (1, 2)}

    def test_ball_has_no_vertices(self):
        assert vertex_array(Ball([0, 0], 1.0)) is None

    def test_max_norm(self):
        assert max_norm(P2, Ball([3, 4], 1.0)) == pytest.approx(6.0)

    def test_contains_exact(self):
        assert contains(P2, VPolytope([[0, 0], [2, 0], [0, 2]]), np.array([1.0, 1.0]))

    def test_random_direction_unit(self):
        rng = np.random.default_rng(0)
        for p in (1.5, 3.0):
            u = random_direction(rng, 5, p)
            assert np.sum(np.abs(u) ** p) == pytest.approx(1.0, rel=1e-12)
