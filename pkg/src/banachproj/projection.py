"""Metric projection onto bounded convex sets in the p-norm.

The projection of ``x`` minimizes ``f(z) = (1/p) sum |x_i - z_i|^p`` over the
set.  Polytopes are handled by a pairwise conditional-gradient (Frank-Wolfe)
iteration over the active vertex set; balls by plain conditional gradient.
Both use an exact line search on the segment.  Boxes and balls also have
closed forms, used by default.

Certificate
-----------
With ``r = x - z`` and ``phi(r)_i = |r_i|^(p-1) sign(r_i)`` the gradient of
``f`` is ``-phi(r)``, and ``J(r) = ||r||^(2-p) phi(r)``.  The quantity

    vi_residual = max_{s in set} <J(x - z), s - z> = ||r||^(2-p) * FW gap

is zero exactly at the projection.  The iteration stops once it is at most
``tol``, so a converged result always satisfies ``vi_residual <= tol``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq, minimize
from scipy.spatial import Delaunay

from .sets import (
    Ball,
    Box,
    ConvexSet,
    VPolytope,
    _check_dims,
    contains,
    is_polytope,
    materialize,
    membership,
    vertex_array,
)
from .space import SpaceSpec, duality_map, lp_norm, signed_power

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 50_000
LINE_SEARCH_ITER = 60
POLISH_EVERY = 50


class UnconvergedProjectionError(RuntimeError):
    pass


@dataclass(frozen=True)
class ProjectionResult:
    point: np.ndarray
    distance: float
    vi_residual: float
    iterations: int
    converged: bool

    def to_dict(self) -> dict:
        return {
            "point": self.point.tolist(),
            "distance": self.distance,
            "vi_residual": self.vi_residual,
            "iterations": self.iterations,
            "converged": self.converged,
        }


def _certificate(space: SpaceSpec, s: ConvexSet, x: np.ndarray, z: np.ndarray) -> float:
    jr = duality_map(space, x - z)
    if not np.any(jr):
        return 0.0
    far = s.lmo(-jr, space.p)
    return max(float(np.dot(jr, far - z)), 0.0)


def vi_residual(space: SpaceSpec, x, xbar, s: ConvexSet, tol: float = 1e-8) -> float:
    """Worst violation of ``<J(x - xbar), xbar - xi> >= 0`` over ``xi`` in the set.

    The maximum of the linear functional is attained at an oracle point, so
    the value is exact.  It is nonnegative and vanishes iff ``xbar`` is the
    projection of ``x``.
    """
    x = np.asarray(x, dtype=float)
    xbar = np.asarray(xbar, dtype=float)
    _check_dims(space, s, x)
    if not membership(space, s, xbar, tol):
        raise ValueError("xbar is not in the set")
    return _certificate(space, s, x, xbar)


def _line_search(r: np.ndarray, d: np.ndarray, p: float, gmax: float) -> float:
    """argmin over [0, gmax] of ||r - g d||_p^p (strictly convex in g)."""
    if p == 2.0:
        dd = float(np.dot(d, d))
        if dd == 0.0:
            return 0.0
        return min(max(float(np.dot(r, d)) / dd, 0.0), gmax)

    def slope(g):
        return -float(np.dot(signed_power(r - g * d, p - 1.0), d))

    if slope(gmax) <= 0.0:
        return gmax
    if slope(0.0) >= 0.0:
        return 0.0
    # capped at LINE_SEARCH_ITER steps; the last bracket estimate is kept
    return brentq(slope, 0.0, gmax, xtol=1e-15, maxiter=LINE_SEARCH_ITER, disp=False)


def _start(s, x: np.ndarray, p: float) -> np.ndarray:
    verts = vertex_array(s)
    if verts is not None:
        return verts[np.argmin(np.sum(np.abs(verts - x) ** p, axis=1))]
    return s.lmo(np.ones_like(x), p)


def _face_newton(x: np.ndarray, atoms: np.ndarray, p: float, start: np.ndarray, steps: int = 50) -> np.ndarray | None:
    """Minimize ||x - z||_p over the affine hull of ``atoms`` by damped Newton.

    Starts from the orthogonal projection of ``start`` onto the affine hull.
    Returns the minimizer, or None when the iteration fails.  The caller
    checks that the result actually lies in the convex hull of the atoms.
    """
    base = atoms[0]
    if len(atoms) == 1:
        return base.copy()
    u_, sv, vt = np.linalg.svd(atoms[1:] - base, full_matrices=False)
    k = int(np.sum(sv > 1e-10 * max(sv[0], 1.0)))
    q = vt[:k].T
    c = q.T @ (start - base)

    def obj(c):
        return float(np.sum(np.abs(x - base - q @ c) ** p)) / p

    fc = obj(c)
    for _ in range(steps):
        r = x - base - q @ c
        grad = -q.T @ signed_power(r, p - 1.0)
        curv = (p - 1.0) * np.maximum(np.abs(r), 1e-12) ** (p - 2.0)
        hess = q.T @ (curv[:, None] * q)
        try:
            step = -np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            return None
        t = 1.0
        while t > 1e-12:
            trial = c + t * step
            ft = obj(trial)
            if ft <= fc:
                break
            t *= 0.5
        else:
            break
        done = ft >= fc - 1e-16 * max(fc, 1e-300)
        c, fc = trial, ft
        if done:
            break
    return base + q @ c


def _corrective_weights(x: np.ndarray, atoms: np.ndarray, weights: np.ndarray, p: float) -> np.ndarray:
    """Approximate minimizer over the simplex of atom weights."""
    m = len(atoms)

    def obj(w):
        return float(np.sum(np.abs(x - w @ atoms) ** p)) / p

    def jac(w):
        return -atoms @ signed_power(x - w @ atoms, p - 1.0)

    res = minimize(
        obj,
        weights,
        jac=jac,
        bounds=[(0.0, 1.0)] * m,
        constraints={"type": "eq", "fun": lambda w: w.sum() - 1.0, "jac": lambda w: np.ones(m)},
        method="SLSQP",
        options={"ftol": 1e-20, "maxiter": 200},
    )
    return np.clip(res.x, 0.0, None)


def _face_candidate(x: np.ndarray, face: np.ndarray, p: float, start: np.ndarray):
    z = _face_newton(x, face, p, start)
    if z is None or not np.all(np.isfinite(z)):
        return None
    w = VPolytope(face).hull_weights(z)
    if w is None or lp_norm(w @ face - z, p) > 1e-12 * (1.0 + float(np.abs(face).max())):
        return None
    return w


def _polish(x: np.ndarray, atoms: np.ndarray, weights: np.ndarray, p: float):
    """Best face minimizer among the support found by a corrective solve.

    The minimizer over the simplex lies on some face, so the support itself
    and, when its affine minimizer escapes the hull, each subface one size
    down are tried.
    """
    w0 = _corrective_weights(x, atoms, weights / weights.sum(), p)
    support_ = atoms[w0 > 1e-9 * w0.max()]
    start = w0 @ atoms / w0.sum()
    faces = [support_]
    if len(support_) > 1:
        faces += [np.delete(support_, j, axis=0) for j in range(len(support_))]
    best, best_val = None, np.inf
    for face in faces:
        w = _face_candidate(x, face, p, start)
        if w is None:
            continue
        val = lp_norm(x - w @ face, p)
        if val < best_val:
            keep = w > 0.0
            best, best_val = (list(face[keep]), list(w[keep])), val
        if face is support_ and best is not None:
            break
    return best


def _frank_wolfe(space: SpaceSpec, s, x: np.ndarray, tol: float, max_iter: int):
    p = space.p
    pairwise = is_polytope(s)
    start = _start(s, x, p)
    atoms = [start]
    weights = [1.0]
    z = start.copy()
    vi = np.inf
    it = 0
    for it in range(max_iter + 1):
        r = x - z
        nr = lp_norm(r, p)
        if nr == 0.0:
            vi = 0.0
            break
        # phi is rescaled by ||r||^(1-p); only its direction matters here
        phi = signed_power(r / nr, p - 1.0)
        target = s.lmo(-phi, p)
        gap = float(np.dot(phi, target - z))
        vi = max(nr * gap, 0.0)
        if vi <= tol or it == max_iter:
            break
        if pairwise and it % POLISH_EVERY == POLISH_EVERY - 1 and len(atoms) > 1:
            # thin polytope faces make pairwise steps crawl; jump to the face minimizer
            polished = _polish(x, np.asarray(atoms), np.asarray(weights), p)
            if polished is not None:
                w = np.asarray(polished[1])
                cand = w @ np.asarray(polished[0])
                if lp_norm(x - cand, p) < nr:
                    atoms, weights, z = polished[0], polished[1], cand
                    continue
        if pairwise:
            scores = [float(np.dot(phi, a)) for a in atoms]
            k = int(np.argmin(scores))
            d = target - atoms[k]
            gmax = weights[k]
        else:
            d = target - z
            gmax = 1.0
        g = _line_search(r, d, p, gmax)
        if g <= 0.0:
            # no progress possible in floating point
            break
        if not pairwise:
            z = z + g * d
            continue
        key = target.tobytes()
        for j, a in enumerate(atoms):
            if a.tobytes() == key:
                weights[j] += g
                break
        else:
            atoms.append(target)
            weights.append(g)
        if g >= gmax:
            del atoms[k], weights[k]
        else:
            weights[k] -= g
        w = np.asarray(weights)
        z = w @ np.asarray(atoms) / w.sum()
    return z, vi, it


def _snap(space: SpaceSpec, s, x: np.ndarray, z: np.ndarray, vi: float):
    """Zero out residual coordinates that are pure rounding noise.

    For p < 2 the duality map blows up small components (``|r_i|^(p-1)``), so
    a residual coordinate of 1e-16 that should be exactly zero can keep the
    certificate far above ``tol``.  Snapping such coordinates to ``x`` is a
    move of order 1e-16; it is kept only if the point stays in the set and
    the certificate improves.
    """
    scale = 1.0 + float(np.max(np.abs(x)))
    tiny = np.abs(x - z) <= 1e-12 * scale
    if not np.any(tiny):
        return z, vi
    cand = np.where(tiny, x, z)
    if not contains(space, s, cand, 1e-12 * scale):
        return z, vi
    vi_c = _certificate(space, s, x, cand)
    return (cand, vi_c) if vi_c < vi else (z, vi)


def project(
    space: SpaceSpec,
    s: ConvexSet,
    x,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    method: str = "auto",
) -> ProjectionResult:
    """Nearest point of ``s`` to ``x`` in the p-norm.

    Parameters
    ----------
    method : {"auto", "fw"}
        ``"auto"`` uses the closed forms for boxes (clamping) and balls
        (radial scaling) and conditional gradient for polytopes; ``"fw"``
        forces conditional gradient for every variant.

    Returns
    -------
    ProjectionResult
        ``converged`` is False when ``max_iter`` was exhausted before the
        certificate dropped to ``tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if method not in ("auto", "fw"):
        raise ValueError(f"unknown method {method!r}")
    x = np.asarray(x, dtype=float)
    _check_dims(space, s, x)
    base = materialize(s)
    if contains(space, base, x):
        return ProjectionResult(x.copy(), 0.0, 0.0, 0, True)
    iterations = 0
    if method == "auto" and isinstance(base, Box):
        z = np.clip(x, base.lower, base.upper)
    elif method == "auto" and isinstance(base, Ball):
        off = x - base.center
        z = base.center + base.radius * off / lp_norm(off, space.p)
    else:
        z, _, iterations = _frank_wolfe(space, base, x, tol, max_iter)
    vi = _certificate(space, base, x, z)
    if vi > tol:
        z, vi = _snap(space, base, x, z, vi)
    return ProjectionResult(
        point=z,
        distance=lp_norm(x - z, space.p),
        vi_residual=vi,
        iterations=iterations,
        converged=bool(vi <= tol),
    )


class BruteForceResult(NamedTuple):
    point: np.ndarray
    distance: float
    resolution: float


def _lattice(n_parts: int, k: int) -> np.ndarray:
    """All (k+1)-tuples of nonnegative integers summing to n_parts."""
    rows = []
    for combo in itertools.product(range(n_parts + 1), repeat=k):
        rest = n_parts - sum(combo)
        if rest >= 0:
            rows.append(combo + (rest,))
    return np.asarray(rows, dtype=float)


def _polytope_samples(verts: np.ndarray, grid: int, p: float) -> tuple[np.ndarray, float]:
    origin = verts[0]
    centered = verts - origin
    _, sv, vt = np.linalg.svd(centered, full_matrices=False)
    scale = max(sv[0] if sv.size else 0.0, 1.0)
    k = int(np.sum(sv > 1e-10 * scale))
    if k == 0:
        return verts[:1].copy(), 0.0
    coords = centered @ vt[:k].T
    if k == 1:
        simplices = [[int(np.argmin(coords[:, 0])), int(np.argmax(coords[:, 0]))]]
    else:
        simplices = Delaunay(coords).simplices
    bary = _lattice(grid, k) / grid
    chunks = []
    res = 0.0
    for simp in simplices:
        corners = verts[list(simp)]
        chunks.append(bary @ corners)
        for a, b in itertools.combinations(range(len(corners)), 2):
            res = max(res, lp_norm(corners[a] - corners[b], p) / grid)
    return np.vstack(chunks), res


def brute_force_project(space: SpaceSpec, s: ConvexSet, x, grid: int = 200) -> BruteForceResult:
    """Exhaustive nearest point over a dense sample of ``s`` (dimension <= 3).

    ``resolution`` bounds the p-distance from any point of the set to the
    nearest sample.  Boxes use an axis grid, polytopes a barycentric lattice
    on a triangulation of the hull, and balls an axis grid over the bounding
    box with outside points mapped radially onto the sphere.
    """
    x = np.asarray(x, dtype=float)
    _check_dims(space, s, x)
    if space.dim > 3:
        raise ValueError(f"dimension {space.dim} too large for exhaustive search (max 3)")
    if grid < 2:
        raise ValueError("grid must be at least 2")
    p = space.p
    base = materialize(s)
    if isinstance(base, VPolytope):
        pts, res = _polytope_samples(np.asarray(base.vertices), grid, p)
    else:
        if isinstance(base, Box):
            lo, hi = base.lower, base.upper
        else:
            lo, hi = base.center - base.radius, base.center + base.radius
        axes = [np.linspace(a, b, grid) for a, b in zip(lo, hi)]
        pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, space.dim)
        step = (hi - lo) / (grid - 1)
        res = lp_norm(step / 2.0, p)
        if isinstance(base, Ball):
            off = pts - base.center
            nrm = np.sum(np.abs(off) ** p, axis=1) ** (1.0 / p)
            out = nrm > base.radius
            pts[out] = base.center + base.radius * off[out] / nrm[out, None]
            res = 2.0 * res
    dist = np.sum(np.abs(pts - x) ** p, axis=1) ** (1.0 / p)
    i = int(np.argmin(dist))
    return BruteForceResult(pts[i].copy(), float(dist[i]), float(res))
