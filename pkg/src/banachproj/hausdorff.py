"""Hausdorff distance between bounded convex sets in the ambient p-norm.

Two facts do the work.  The distance to a convex set is a convex function,
so its supremum over a polytope is attained at a vertex.  And the one-sided
deviation equals ``sup_{||w||_q = 1} h_A(w) - h_B(w)`` in terms of support
functions, so any unit dual vector gives an exact lower bound.  Every result
is an interval ``[lower, upper]``; ``upper`` is always a guaranteed bound.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .projection import DEFAULT_TOL, UnconvergedProjectionError, project
from .sets import Ball, Box, ConvexSet, VPolytope, _check_dims, materialize, same_descriptor, support_many, vertex_array
from .space import SpaceSpec, duality_map, lp_norm

DEFAULT_SAMPLES = 2000


class HausdorffEstimate(NamedTuple):
    lower: float
    upper: float


@dataclass(frozen=True)
class SetPair:
    """Two sets and a verified upper bound ``sigma`` on their Hausdorff distance."""

    omega1: ConvexSet
    omega2: ConvexSet
    sigma: float

    def __post_init__(self):
        if not (self.sigma >= 0.0):
            raise ValueError(f"sigma must be nonnegative, got {self.sigma!r}")

    @classmethod
    def certified(cls, space: SpaceSpec, omega1: ConvexSet, omega2: ConvexSet, tol: float = DEFAULT_TOL) -> "SetPair":
        return cls(omega1, omega2, hausdorff_distance(space, omega1, omega2, tol))


def _distance_interval(space: SpaceSpec, s, z: np.ndarray, tol: float) -> tuple[float, float, np.ndarray]:
    """Bracket for dist(z, s) plus the computed nearest point."""
    res = project(space, s, z, tol=tol)
    d = res.distance
    if d == 0.0 or isinstance(s, (Box, Ball)):
        return d, d, res.point
    # f(z) - f* <= raw gap = vi * d^(p-2) for f = ||.||^p / p
    p = space.p
    lo_pow = d**p - p * res.vi_residual * d ** (p - 2.0)
    return max(lo_pow, 0.0) ** (1.0 / p), d, res.point


def _translation_offset(a, b) -> np.ndarray | None:
    if isinstance(a, Box) and isinstance(b, Box):
        t = b.lower - a.lower
        if np.array_equal(a.upper + t, b.upper):
            return t
    elif isinstance(a, Ball) and isinstance(b, Ball):
        if a.radius == b.radius:
            return b.center - a.center
    elif isinstance(a, VPolytope) and isinstance(b, VPolytope):
        if a.vertices.shape == b.vertices.shape:
            t = b.vertices[0] - a.vertices[0]
            if np.allclose(a.vertices + t, b.vertices, rtol=0.0, atol=1e-14):
                return t
    return None


def _box_deviation(space: SpaceSpec, a: Box, b: Box) -> float:
    # separable: each coordinate picks the worse endpoint of a
    lo_gap = np.maximum(b.lower - a.lower, 0.0)
    hi_gap = np.maximum(a.upper - b.upper, 0.0)
    return lp_norm(np.maximum(lo_gap, hi_gap), space.p)


def _anchor(space: SpaceSpec, a) -> tuple[np.ndarray, float]:
    """A point of ``a`` and the radius of ``a`` around it."""
    if isinstance(a, Ball):
        return a.center, a.radius
    if isinstance(a, Box):
        return 0.5 * (a.lower + a.upper), lp_norm(0.5 * (a.upper - a.lower), space.p)
    c = a.vertices.mean(axis=0)
    return c, max(lp_norm(v - c, space.p) for v in a.vertices)


def _one_sided(space: SpaceSpec, a, b, tol: float, samples: int, seed: int) -> HausdorffEstimate:
    """Bracket for sup_{z in a} dist(z, b)."""
    if isinstance(a, Box) and isinstance(b, Box):
        d = _box_deviation(space, a, b)
        return HausdorffEstimate(d, d)
    verts = vertex_array(a)
    if verts is not None:
        lo = up = 0.0
        for v in verts:
            dl, du, _ = _distance_interval(space, b, v, tol)
            lo, up = max(lo, dl), max(up, du)
        return HausdorffEstimate(lo, up)
    anchor, radius = _anchor(space, a)
    dl, du, near = _distance_interval(space, b, anchor, tol)
    upper = du + radius
    rng = np.random.default_rng(seed)
    dirs = rng.standard_normal((samples, space.dim))
    if du > 0.0:
        dirs = np.vstack([duality_map(space, anchor - near), dirs])
    dirs = dirs[np.any(dirs != 0.0, axis=1)]
    dirs = dirs / np.linalg.norm(dirs, ord=space.q, axis=1)[:, None]
    gaps = support_many(space, a, dirs) - support_many(space, b, dirs)
    lower = max(float(gaps.max(initial=0.0)), 0.0)
    return HausdorffEstimate(min(lower, upper), upper)


def hausdorff_bounds(
    space: SpaceSpec,
    s1: ConvexSet,
    s2: ConvexSet,
    tol: float = DEFAULT_TOL,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> HausdorffEstimate:
    """Interval containing the Hausdorff distance between ``s1`` and ``s2``.

    Exact (``lower == upper``) for identical sets, translates of one set,
    two balls and two boxes.  Pairs involving a polytope or a box use vertex
    enumeration with certified distance brackets.  A ball facing a polytope
    or another kind is bracketed by sampling ``samples`` dual directions for
    the lower end and by ``dist(center, other) + radius`` for the upper end.
    """
    _check_dims(space, s1)
    _check_dims(space, s2)
    a, b = materialize(s1), materialize(s2)
    if same_descriptor(a, b):
        return HausdorffEstimate(0.0, 0.0)
    t = _translation_offset(a, b)
    if t is not None:
        d = lp_norm(t, space.p)
        return HausdorffEstimate(d, d)
    if isinstance(a, Ball) and isinstance(b, Ball):
        d = lp_norm(a.center - b.center, space.p) + abs(a.radius - b.radius)
        return HausdorffEstimate(d, d)
    ab = _one_sided(space, a, b, tol, samples, seed)
    ba = _one_sided(space, b, a, tol, samples, seed)
    return HausdorffEstimate(max(ab.lower, ba.lower), max(ab.upper, ba.upper))


def hausdorff_distance(
    space: SpaceSpec,
    s1: ConvexSet,
    s2: ConvexSet,
    tol: float = DEFAULT_TOL,
    samples: int = DEFAULT_SAMPLES,
) -> float:
    """Guaranteed upper bound on the Hausdorff distance (exact where possible)."""
    return hausdorff_bounds(space, s1, s2, tol, samples).upper


def dist_to_origin(space: SpaceSpec, s: ConvexSet, tol: float = DEFAULT_TOL) -> float:
    """Distance from the origin to ``s``; 0 iff the origin lies in ``s``."""
    res = project(space, s, np.zeros(space.dim), tol=tol)
    if not res.converged:
        raise UnconvergedProjectionError(f"projection of the origin did not converge (vi={res.vi_residual:.3g})")
    return res.distance
