"""Bounded closed convex sets: boxes, p-balls, V-polytopes and translates.

Descriptors are immutable.  Each variant exposes a linear minimization
oracle, which is all the projection solver needs.  The JSON schema is::

    {"kind": "box", "lower": [...], "upper": [...]}
    {"kind": "ball", "center": [...], "radius": r}
    {"kind": "vpolytope", "vertices": [[...], ...]}
    {"kind": "translate", "inner": {...}, "shift": [...]}

Balls are taken in the ambient p-norm, so their oracle needs the exponent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.optimize import linprog

from .space import SpaceSpec, dual_exponent, lp_norm, signed_power


class SetSchemaError(ValueError):
    """Malformed set description."""


def _frozen_array(values, name: str, ndim: int = 1) -> np.ndarray:
    try:
        a = np.array(values, dtype=float)
    except (TypeError, ValueError) as exc:
        raise SetSchemaError(f"field '{name}': expected numeric array ({exc})") from None
    if a.ndim != ndim:
        raise SetSchemaError(f"field '{name}': expected {ndim}-d array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise SetSchemaError(f"field '{name}': entries must be finite")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Box:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = _frozen_array(self.lower, "lower")
        hi = _frozen_array(self.upper, "upper")
        if lo.shape != hi.shape:
            raise SetSchemaError("field 'upper': length differs from 'lower'")
        if np.any(lo > hi):
            raise SetSchemaError("field 'upper': need lower <= upper componentwise")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def lmo(self, c: np.ndarray, p: float) -> np.ndarray:
        return np.where(c > 0, self.lower, self.upper)


@dataclass(frozen=True, eq=False)
class Ball:
    """Closed ball of the ambient p-norm."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _frozen_array(self.center, "center"))
        try:
            r = float(self.radius)
        except (TypeError, ValueError):
            raise SetSchemaError("field 'radius': expected a number") from None
        if not (r > 0 and np.isfinite(r)):
            raise SetSchemaError(f"field 'radius': must be positive, got {self.radius!r}")
        object.__setattr__(self, "radius", r)

    @property
    def dim(self) -> int:
        return self.center.shape[0]

    def lmo(self, c: np.ndarray, p: float) -> np.ndarray:
        q = dual_exponent(p)
        cn = lp_norm(c, q)
        # unit vector w with <c, w> = ||c||_q
        w = signed_power(c / cn, q - 1.0)
        return self.center - self.radius * w


@dataclass(frozen=True, eq=False)
class VPolytope:
    """Convex hull of a finite vertex list (one vertex per row)."""

    vertices: np.ndarray

    def __post_init__(self):
        v = _frozen_array(self.vertices, "vertices", ndim=2)
        if v.shape[0] < 1 or v.shape[1] < 1:
            raise SetSchemaError("field 'vertices': need at least one vertex")
        object.__setattr__(self, "vertices", v)

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def lmo_index(self, c: np.ndarray) -> int:
        return int(np.argmin(self.vertices @ c))

    def lmo(self, c: np.ndarray, p: float) -> np.ndarray:
        return self.vertices[self.lmo_index(c)]

    def hull_weights(self, x: np.ndarray) -> np.ndarray | None:
        """Convex weights reproducing ``x``, or None when the LP is infeasible."""
        m = self.vertices.shape[0]
        a_eq = np.vstack([self.vertices.T, np.ones((1, m))])
        b_eq = np.append(x, 1.0)
        res = linprog(np.zeros(m), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs")
        if res.status != 0:
            return None
        w = np.clip(res.x, 0.0, None)
        return w / w.sum()


@dataclass(frozen=True, eq=False)
class Translate:
    inner: "ConvexSet"
    shift: np.ndarray

    def __post_init__(self):
        s = _frozen_array(self.shift, "shift")
        if s.shape[0] != self.inner.dim:
            raise SetSchemaError("field 'shift': length differs from the inner set dimension")
        object.__setattr__(self, "shift", s)

    @property
    def dim(self) -> int:
        return self.shift.shape[0]

    def lmo(self, c: np.ndarray, p: float) -> np.ndarray:
        return self.inner.lmo(c, p) + self.shift


ConvexSet = Union[Box, Ball, VPolytope, Translate]


def is_polytope(s: ConvexSet) -> bool:
    """True when the oracle only ever returns finitely many points."""
    if isinstance(s, Translate):
        return is_polytope(s.inner)
    return isinstance(s, (Box, VPolytope))


def _check_dims(space: SpaceSpec, s: ConvexSet, x: np.ndarray | None = None) -> None:
    if s.dim != space.dim:
        raise ValueError(f"dimension mismatch: set has dim {s.dim}, space has dim {space.dim}")
    if x is not None and (x.ndim != 1 or x.shape[0] != space.dim):
        raise ValueError(f"dimension mismatch: point has shape {x.shape}, space has dim {space.dim}")


def translate(s: ConvexSet, t) -> ConvexSet:
    """Shift a set by ``t``; boxes, balls and polytopes stay in their own variant."""
    t = np.asarray(t, dtype=float)
    if t.shape != (s.dim,):
        raise ValueError(f"dimension mismatch: shift has shape {t.shape}, set has dim {s.dim}")
    if isinstance(s, Box):
        return Box(s.lower + t, s.upper + t)
    if isinstance(s, Ball):
        return Ball(s.center + t, s.radius)
    if isinstance(s, VPolytope):
        return VPolytope(s.vertices + t)
    return Translate(s.inner, s.shift + t)


def materialize(s: ConvexSet) -> Box | Ball | VPolytope:
    """Collapse any chain of translates into a base descriptor."""
    if isinstance(s, Translate):
        return translate(materialize(s.inner), s.shift)
    return s


def linear_min_oracle(space: SpaceSpec, s: ConvexSet, c) -> np.ndarray:
    """A point of ``s`` minimizing ``<c, .>``."""
    c = np.asarray(c, dtype=float)
    _check_dims(space, s, c)
    if not np.any(c):
        raise ValueError("linear minimization oracle needs a nonzero direction")
    return np.array(s.lmo(c, space.p))


def support(space: SpaceSpec, s: ConvexSet, w) -> float:
    """Support function sup_{z in s} <w, z>."""
    w = np.asarray(w, dtype=float)
    if not np.any(w):
        return 0.0
    return float(np.dot(w, s.lmo(-w, space.p)))


def support_many(space: SpaceSpec, s: ConvexSet, w) -> np.ndarray:
    """Support function evaluated at every row of ``w``."""
    w = np.atleast_2d(np.asarray(w, dtype=float))
    s = materialize(s)
    if isinstance(s, Box):
        return np.sum(np.maximum(w * s.lower, w * s.upper), axis=1)
    if isinstance(s, Ball):
        q = dual_exponent(space.p)
        scale = np.max(np.abs(w), axis=1, keepdims=True)
        safe = np.where(scale > 0, scale, 1.0)
        wn = scale[:, 0] * np.sum(np.abs(w / safe) ** q, axis=1) ** (1.0 / q)
        return w @ s.center + s.radius * wn
    return np.max(w @ s.vertices.T, axis=1)


def contains(space: SpaceSpec, s: ConvexSet, x: np.ndarray, tol: float = 0.0) -> bool:
    """Exact-representation containment test (no projection involved).

    Boxes and balls are tested with slack ``tol`` in the p-norm; polytopes by
    LP feasibility followed by a check of the reconstructed point.
    """
    if isinstance(s, Translate):
        return contains(space, s.inner, x - s.shift, tol)
    if isinstance(s, Box):
        gap = x - np.clip(x, s.lower, s.upper)
        return lp_norm(gap, space.p) <= tol
    if isinstance(s, Ball):
        return lp_norm(x - s.center, space.p) <= s.radius + tol
    w = s.hull_weights(x)
    if w is None:
        return False
    scale = 1.0 + float(np.abs(s.vertices).max())
    return lp_norm(w @ s.vertices - x, space.p) <= max(tol, 1e-12 * scale)


def membership(space: SpaceSpec, s: ConvexSet, x, tol: float = 1e-9) -> bool:
    """True iff ``x`` lies within p-norm distance ``tol`` of ``s``."""
    x = np.asarray(x, dtype=float)
    _check_dims(space, s, x)
    if contains(space, s, x, tol):
        return True
    if isinstance(materialize(s), VPolytope):
        from .projection import project

        return project(space, s, x).distance <= tol
    return False


def vertex_array(s: ConvexSet, max_vertices: int = 4096) -> np.ndarray | None:
    """Extreme points of a polytope-like set, or None (balls, huge boxes)."""
    s = materialize(s)
    if isinstance(s, VPolytope):
        return np.array(s.vertices)
    if isinstance(s, Box):
        n = s.dim
        if 2**n > max_vertices:
            return None
        bits = (np.arange(2**n)[:, None] >> np.arange(n)) & 1
        return np.where(bits == 1, s.upper, s.lower)
    return None


def max_norm(space: SpaceSpec, s: ConvexSet) -> float:
    """Upper bound on sup_{z in s} ||z||."""
    s = materialize(s)
    if isinstance(s, Ball):
        return lp_norm(s.center, space.p) + s.radius
    if isinstance(s, Box):
        corner = np.maximum(np.abs(s.lower), np.abs(s.upper))
        return lp_norm(corner, space.p)
    return max(lp_norm(v, space.p) for v in s.vertices)


def to_dict(s: ConvexSet) -> dict:
    if isinstance(s, Box):
        return {"kind": "box", "lower": s.lower.tolist(), "upper": s.upper.tolist()}
    if isinstance(s, Ball):
        return {"kind": "ball", "center": s.center.tolist(), "radius": s.radius}
    if isinstance(s, VPolytope):
        return {"kind": "vpolytope", "vertices": s.vertices.tolist()}
    return {"kind": "translate", "inner": to_dict(s.inner), "shift": s.shift.tolist()}


_FIELDS = {
    "box": ("lower", "upper"),
    "ball": ("center", "radius"),
    "vpolytope": ("vertices",),
    "translate": ("inner", "shift"),
}


def from_dict(d) -> ConvexSet:
    """Parse the JSON schema; errors name the offending field."""
    if not isinstance(d, dict):
        raise SetSchemaError("set description must be a JSON object")
    kind = d.get("kind")
    if kind not in _FIELDS:
        raise SetSchemaError(f"field 'kind': expected one of {sorted(_FIELDS)}, got {kind!r}")
    for name in _FIELDS[kind]:
        if name not in d:
            raise SetSchemaError(f"field '{name}': missing for kind '{kind}'")
    extra = set(d) - set(_FIELDS[kind]) - {"kind"}
    if extra:
        raise SetSchemaError(f"field '{sorted(extra)[0]}': not allowed for kind '{kind}'")
    if kind == "box":
        return Box(d["lower"], d["upper"])
    if kind == "ball":
        return Ball(d["center"], d["radius"])
    if kind == "vpolytope":
        return VPolytope(d["vertices"])
    return Translate(from_dict(d["inner"]), d["shift"])


def same_descriptor(a: ConvexSet, b: ConvexSet) -> bool:
    da, db = to_dict(a), to_dict(b)
    return da == db
