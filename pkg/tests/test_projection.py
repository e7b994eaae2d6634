import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from banachproj.harness import find_nonexpansive_violation, random_set, random_set_point
from banachproj.projection import brute_force_project, project, vi_residual
from banachproj.sets import Ball, Box, Translate, VPolytope, membership
from banachproj.space import SpaceSpec, lp_norm

EXPONENTS = [1.5, 2.0, 3.0, 4.0]
seeds = st.integers(0, 2**32 - 1)


def test_point_inside_is_fixed():
    s = VPolytope([[0, 0], [2, 0], [0, 2]])
    res = project(SpaceSpec(2, 3.0), s, [0.5, 0.5])
    np.testing.assert_array_equal(res.point, [0.5, 0.5])
    assert res.distance == 0.0 and res.converged


@pytest.mark.parametrize("p", EXPONENTS)
def test_box_clamp(p):
    rng = np.random.default_rng(1)
    for _ in range(20):
        lo = rng.uniform(-3, 0, 4)
        box = Box(lo, lo + rng.uniform(0.1, 3, 4))
        x = rng.uniform(-6, 6, 4)
        res = project(SpaceSpec(4, p), box, x)
        np.testing.assert_array_equal(res.point, np.clip(x, box.lower, box.upper))
        assert res.converged


@pytest.mark.parametrize("p", [2.0, 3.0, 4.0])
def test_box_by_conditional_gradient(p):
    rng = np.random.default_rng(2)
    for _ in range(10):
        box = Box([-1, -1, -1], [1, 2, 0.5])
        x = rng.uniform(-4, 4, 3)
        res = project(SpaceSpec(3, p), box, x, method="fw")
        assert res.converged
        clamp = np.clip(x, box.lower, box.upper)
        # a tiny certificate pins the point down to roughly tol^(1/(p-1))
        assert lp_norm(res.point - clamp, p) <= 1e-3


@pytest.mark.parametrize("p", EXPONENTS)
def test_ball_radial_against_sphere_samples(p):
    space = SpaceSpec(2, p)
    ball = Ball([0, 0], 1.5)
    th = np.linspace(0, 2 * np.pi, 200001)
    circ = np.stack([np.cos(th), np.sin(th)], axis=1)
    circ = 1.5 * circ / np.sum(np.abs(circ) ** p, axis=1, keepdims=True) ** (1 / p)
    for x in ([3.0, 1.0], [-2.0, 4.0], [0.2, -5.0]):
        x = np.asarray(x)
        res = project(space, ball, x)
        np.testing.assert_allclose(res.point, 1.5 * x / lp_norm(x, p), rtol=1e-14)
        sampled = np.sum(np.abs(circ - x) ** p, axis=1) ** (1 / p)
        assert res.distance <= sampled.min() + 1e-12
        assert res.distance >= sampled.min() - 1e-6


@pytest.mark.parametrize("p", [1.5, 2.0, 3.0])
def test_ball_by_conditional_gradient(p):
    space = SpaceSpec(3, p)
    ball = Ball([1, 0, -1], 2.0)
    x = np.array([4.0, 3.0, -2.0])
    res = project(space, ball, x, method="fw", tol=1e-9)
    closed = project(space, ball, x)
    assert res.converged
    assert abs(res.distance - closed.distance) <= 1e-6


def test_translate_matches_shifted_problem():
    space = SpaceSpec(2, 3.0)
    inner = VPolytope([[0, 0], [1, 0], [0, 1]])
    t = np.array([2.0, -1.0])
    x = np.array([4.0, 3.0])
    a = project(space, Translate(inner, t), x)
    b = project(space, inner, x - t)
    np.testing.assert_allclose(a.point, b.point + t, atol=1e-9)


def test_distance_matches_point():
    rng = np.random.default_rng(3)
    for p in EXPONENTS:
        space = SpaceSpec(3, p)
        for _ in range(10):
            s = random_set(rng, 3)
            x = rng.uniform(-8, 8, 3)
            res = project(space, s, x)
            assert abs(res.distance - lp_norm(x - res.point, p)) <= 1e-12
            assert membership(space, s, res.point, 1e-9)


def test_nonconvergence_is_reported():
    s = VPolytope([[0, 0], [1, 0.001], [2, 0], [1, 3]])
    res = project(SpaceSpec(2, 3.0), s, [1.0, -2.0], max_iter=1)
    assert not res.converged
    assert res.vi_residual > 1e-10


def test_thin_polytope_regression():
    # pairwise steps crawl on this near-degenerate face without the corrective step
    verts = [
        [1.64274955e00, 1.87345781e-01, -4.01053388e00],
        [4.25675047e00, -1.16716750e00, -9.92810015e-01],
        [-4.64949446e00, 4.85797743e00, -2.82852921e00],
        [1.52131076e00, -3.40312809e00, 1.21327369e00],
        [2.55585137e00, 8.56866799e-01, -4.78533244e00],
        [-1.89593005e00, -3.57024726e00, -1.66687903e-04],
        [-4.45057655e00, 2.01936894e00, -5.13207565e-02],
        [3.26370896e-01, 3.34096705e00, -5.09877763e-01],
    ]
    res = project(SpaceSpec(3, 3.0), VPolytope(verts), [2.20542777, -1.65754404, -1.32971613])
    assert res.converged
    assert res.iterations < 5000


def test_bad_arguments():
    space = SpaceSpec(2, 2.0)
    box = Box([0, 0], [1, 1])
    with pytest.raises(ValueError):
        project(space, box, [1, 2, 3])
    with pytest.raises(ValueError):
        project(space, box, [1, 2], tol=0)
    with pytest.raises(ValueError):
        project(space, box, [1, 2], method="newton")


class TestCertificate:
    def test_inside(self):
        s = Box([0, 0], [1, 1])
        assert vi_residual(SpaceSpec(2, 3.0), [0.3, 0.3], [0.3, 0.3], s) == 0.0

    def test_hilbert_clamp(self):
        rng = np.random.default_rng(5)
        space = SpaceSpec(3, 2.0)
        for _ in range(50):
            lo = rng.uniform(-3, 0, 3)
            box = Box(lo, lo + rng.uniform(0.1, 3, 3))
            x = rng.uniform(-6, 6, 3)
            assert vi_residual(space, x, np.clip(x, box.lower, box.upper), box) <= 1e-10

    def test_wrong_vertex_detected(self):
        space = SpaceSpec(2, 3.0)
        s = VPolytope([[0, 0], [4, 0], [0, 4]])
        x = np.array([-1.0, -0.5])
        right = project(space, s, x)
        np.testing.assert_allclose(right.point, [0, 0], atol=1e-12)
        assert vi_residual(space, x, [4.0, 0.0], s) > 0.1

    def test_outside_point_rejected(self):
        with pytest.raises(ValueError, match="not in the set"):
            vi_residual(SpaceSpec(2, 2.0), [3, 3], [2, 2], Box([0, 0], [1, 1]))


class TestBruteForce:
    def test_box_matches_clamp(self):
        space = SpaceSpec(2, 3.0)
        box = Box([0, 0], [1, 2])
        bf = brute_force_project(space, box, [3.0, -1.0], grid=101)
        assert lp_norm(bf.point - [1.0, 0.0], 3.0) <= bf.resolution

    def test_idempotent_on_set_points(self):
        space = SpaceSpec(2, 2.0)
        s = VPolytope([[0, 0], [3, 0], [1, 2]])
        z = np.array([1.2, 0.7])
        bf = brute_force_project(space, s, z, grid=100)
        assert bf.distance <= bf.resolution

    def test_dimension_limit(self):
        with pytest.raises(ValueError, match="too large"):
            brute_force_project(SpaceSpec(4, 2.0), Box(np.zeros(4), np.ones(4)), np.ones(4))

    def test_segment_polytope(self):
        space = SpaceSpec(2, 2.0)
        seg = VPolytope([[0, 0], [2, 0]])
        bf = brute_force_project(space, seg, [1.0, 1.0], grid=50)
        assert bf.distance == pytest.approx(1.0)

    @settings(max_examples=40, deadline=None)
    @given(seeds, st.sampled_from(EXPONENTS))
    def test_agrees_with_solver(self, seed, p):
        rng = np.random.default_rng(seed)
        space = SpaceSpec(2, p)
        s = random_set(rng, 2, kinds=("box", "vpolytope"))
        x = rng.uniform(-8, 8, 2)
        res = project(space, s, x)
        bf = brute_force_project(space, s, x, grid=120)
        assert res.converged
        assert lp_norm(res.point - bf.point, p) <= 2 * bf.resolution
        assert res.distance <= bf.distance + 1e-12


@settings(max_examples=80, deadline=None)
@given(seeds, st.integers(2, 5))
def test_hilbert_properties(seed, dim):
    rng = np.random.default_rng(seed)
    space = SpaceSpec(dim, 2.0)
    s = random_set(rng, dim)
    x = rng.uniform(-8, 8, dim)
    y = rng.uniform(-8, 8, dim)
    px, py = project(space, s, x), project(space, s, y)
    assert px.converged and py.converged
    a, b = px.point, py.point
    # monotone
    assert np.dot(a - b, x - y) >= -1e-6
    # nonexpansive
    assert np.linalg.norm(a - b) <= np.linalg.norm(x - y) + 1e-6
    # absolutely best approximation
    for _ in range(10):
        xi = random_set_point(rng, s, 2.0)
        assert np.sum((a - xi) ** 2) <= np.sum((x - xi) ** 2) - np.sum((x - a) ** 2) + 1e-6


@pytest.mark.parametrize("p", [1.5, 3.0, 4.0])
def test_nonexpansiveness_fails_off_hilbert(p):
    found = find_nonexpansive_violation(p)
    assert found is not None
    assert found["ratio"] > 1.0
    space = SpaceSpec(2, p)
    seg = VPolytope(found["set"]["vertices"])
    px = project(space, seg, found["x"]).point
    py = project(space, seg, found["y"]).point
    assert lp_norm(px - py, p) > lp_norm(np.subtract(found["x"], found["y"]), p)


def test_hilbert_search_finds_nothing():
    assert find_nonexpansive_violation(2.0, attempts=300) is None
