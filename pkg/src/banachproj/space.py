"""Norms, the normalized duality mapping and moduli of convexity of l_p^n.

Everything here works on plain numpy vectors. A point of the primal space is
measured with the exponent ``p``, a functional of the dual with ``q``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

DEFAULT_L = 3.18
INVERSE_TOL = 1e-10

# Sentinel for an inverse-function value whose argument lies outside the
# range of the function on (0, 2].  It is +inf so that it propagates through
# the arithmetic of composite bounds.
VACUOUS = math.inf


def is_vacuous(value: float) -> bool:
    return math.isinf(value)


@dataclass(frozen=True)
class SpaceSpec:
    """The ambient space l_p^n."""

    dim: int
    p: float

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")
        if not (1.0 < self.p < math.inf):
            raise ValueError(f"exponent p must satisfy 1 < p < inf, got {self.p!r}")

    @property
    def q(self) -> float:
        return dual_exponent(self.p)

    def dual(self) -> "SpaceSpec":
        return SpaceSpec(self.dim, self.q)


def dual_exponent(p: float) -> float:
    if not (1.0 < p < math.inf):
        raise ValueError(f"exponent must satisfy 1 < p < inf, got {p!r}")
    if p == 2.0:
        return 2.0
    return p / (p - 1.0)


def check_figiel_constant(L: float) -> float:
    if not (1.0 < L <= DEFAULT_L):
        raise ValueError(f"Figiel constant must satisfy 1 < L <= {DEFAULT_L}, got {L!r}")
    return float(L)


def _as_vector(space: SpaceSpec, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] != space.dim:
        raise ValueError(f"dimension mismatch: expected length {space.dim}, got shape {x.shape}")
    return x


def lp_norm(x: np.ndarray, p: float) -> float:
    """(sum |x_i|^p)^(1/p), rescaled by max |x_i| to avoid under/overflow."""
    a = np.abs(x)
    m = a.max(initial=0.0)
    if m == 0.0:
        return 0.0
    if p == 2.0:
        return float(m * math.sqrt(np.dot(a / m, a / m)))
    return float(m * np.sum((a / m) ** p) ** (1.0 / p))


def norm(space: SpaceSpec, x) -> float:
    return lp_norm(_as_vector(space, x), space.p)


def dual_norm(space: SpaceSpec, w) -> float:
    return lp_norm(_as_vector(space, w), space.q)


def dual_pairing(w, v) -> float:
    """Pairing <w, v> between a dual vector and a point."""
    w = np.asarray(w, dtype=float)
    v = np.asarray(v, dtype=float)
    if w.shape != v.shape:
        raise ValueError(f"dimension mismatch: {w.shape} vs {v.shape}")
    return float(np.dot(w, v))


def signed_power(t: np.ndarray, e: float) -> np.ndarray:
    """Componentwise |t|^e sign(t)."""
    return np.sign(t) * np.abs(t) ** e


def duality_map(space: SpaceSpec, x) -> np.ndarray:
    """Normalized duality mapping of l_p.

    ``(Jx)_i = ||x||^(2-p) |x_i|^(p-1) sign(x_i)`` so that ``<Jx, x> = ||x||^2``
    and ``||Jx||_q = ||x||_p``.  ``J0 = 0``.
    """
    x = _as_vector(space, x)
    if space.p == 2.0:
        return x.copy()
    nx = lp_norm(x, space.p)
    if nx == 0.0:
        return np.zeros_like(x)
    # scale first so |x_i / ||x|| |^(p-1) stays in [0, 1]
    return nx * signed_power(x / nx, space.p - 1.0)


def _check_exponent(r: float) -> None:
    if not (1.0 < r < math.inf):
        raise ValueError(f"space exponent must satisfy 1 < r < inf, got {r!r}")


def _check_eps(eps, lo_open: bool = False) -> np.ndarray:
    e = np.asarray(eps, dtype=float)
    if np.any(np.isnan(e)):
        raise ValueError("eps is NaN")
    if lo_open:
        if np.any(e <= 0.0):
            raise ValueError(f"eps must be positive, got {eps!r}")
    elif np.any(e < 0.0):
        raise ValueError(f"eps must lie in [0, 2], got {eps!r}")
    if np.any(e > 2.0 + 1e-12):
        raise ValueError(f"eps must lie in [0, 2], got {eps!r}")
    return np.minimum(e, 2.0)


def modulus_convexity(r: float, eps):
    """Lower-bound modulus of convexity of l_r.

    For ``r >= 2`` the exact modulus of L_r, ``1 - (1 - (eps/2)^r)^(1/r)``;
    for ``1 < r < 2`` the estimate ``(r - 1) eps^2 / 8``.  Accepts scalars or
    arrays with entries in [0, 2].
    """
    _check_exponent(r)
    e = _check_eps(eps)
    if r >= 2.0:
        a = (e / 2.0) ** r
        with np.errstate(divide="ignore"):
            # 1 - (1 - a)^(1/r) without cancellation for small a
            val = -np.expm1(np.log1p(-a) / r)
    else:
        val = (r - 1.0) * e * e / 8.0
    if np.ndim(val) == 0:
        return float(val)
    return val


def g_fn(r: float, eps):
    """delta_r(eps) / eps on (0, 2]."""
    e = _check_eps(eps, lo_open=True)
    val = np.asarray(modulus_convexity(r, e)) / e
    if np.ndim(val) == 0:
        return float(val)
    return val


def inverse_monotone(f: Callable, v: float, tol: float = INVERSE_TOL, grid: int = 33) -> float:
    """Invert a strictly increasing function on [0, 2] by bisection.

    ``f`` must accept numpy arrays and is taken to vanish at 0.  Returns the
    upper end ``t`` of the final bracket, so ``f(t) >= v`` and the result never
    underestimates the true inverse.  Bisection stops once the spread of ``f``
    over the bracket is at most ``tol`` and its width is at most
    ``tol * min(1, t)`` (or the bracket cannot shrink further in floating
    point).

    Returns
    -------
    float
        The inverse value in [0, 2], or ``VACUOUS`` if ``v > f(2)``.

    Raises
    ------
    ValueError
        If ``v`` is negative, ``tol`` is not positive, or ``f`` is not
        strictly increasing on the bracketing grid.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if math.isnan(v) or v < 0:
        raise ValueError(f"v must be nonnegative, got {v!r}")
    if is_vacuous(v):
        return VACUOUS
    ts = np.linspace(0.0, 2.0, grid)[1:]
    fs = np.asarray(f(ts), dtype=float)
    if fs[0] <= 0.0 or np.any(np.diff(fs) <= 0.0):
        raise ValueError("function is not strictly increasing on (0, 2]")
    f2 = float(fs[-1])
    if v == 0.0:
        return 0.0
    if v > f2:
        return VACUOUS
    if v == f2:
        return 2.0
    # narrow the bracket with the grid values already computed
    k = int(np.searchsorted(fs, v))
    lo = 0.0 if k == 0 else float(ts[k - 1])
    hi = float(ts[k])
    flo = 0.0 if k == 0 else float(fs[k - 1])
    fhi = float(fs[k])
    for _ in range(4000):
        # absolute tolerance, tightened to relative for tiny inverses so the
        # result still vanishes with v
        if (hi - lo <= tol * min(1.0, hi) and fhi - flo <= tol) or fhi == v:
            break
        if lo == 0.0:
            mid = hi / 256.0
        elif hi > 4.0 * lo:
            mid = math.sqrt(lo * hi)
        else:
            mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = float(f(mid))
        if fm < v:
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return hi


def delta_inverse(r: float, v: float, tol: float = INVERSE_TOL) -> float:
    return inverse_monotone(lambda e: modulus_convexity(r, e), v, tol)


def g_inverse(r: float, v: float, tol: float = INVERSE_TOL) -> float:
    return inverse_monotone(lambda e: g_fn(r, e), v, tol)


def figiel_check(r: float, eps: float, eta: float, L: float = DEFAULT_L) -> float:
    """Margin ``eps^2 delta(eta) - eta^2 delta(eps) / (4L)`` of the scaling inequality."""
    if not (0.0 < eps <= 2.0 and 0.0 < eta <= 2.0):
        raise ValueError("eps and eta must lie in (0, 2]")
    if eta < eps:
        raise ValueError(f"need eps <= eta, got eps={eps}, eta={eta}")
    return eps * eps * modulus_convexity(r, eta) - eta * eta * modulus_convexity(r, eps) / (4.0 * L)


def _unit_rows(x: np.ndarray, p: float) -> np.ndarray:
    m = np.abs(x).max(axis=1, keepdims=True)
    y = x / m
    return y / (np.sum(np.abs(y) ** p, axis=1, keepdims=True) ** (1.0 / p))


def _row_norms(x: np.ndarray, p: float) -> np.ndarray:
    return np.sum(np.abs(x) ** p, axis=1) ** (1.0 / p)


def estimate_modulus_empirical(space: SpaceSpec, eps: float, samples: int, seed: int = 0) -> float:
    """Sampling estimate of the modulus of convexity of ``space`` at ``eps``.

    Minimizes ``1 - ||(x + y)/2||`` over random unit pairs.  Each pair is built
    by walking from ``x`` towards a random unit ``z`` with ``||x - z|| >= eps``
    along the normalized chord until ``||x - y|| = eps``, so the distance
    constraint is active.  Antipodal pairs are always included.  The result
    bounds the true modulus from above.
    """
    if samples < 1:
        raise ValueError("samples must be a positive integer")
    if not (0.0 < eps <= 2.0):
        raise ValueError(f"eps must lie in (0, 2], got {eps!r}")
    p = space.p
    rng = np.random.default_rng(seed)
    best = 1.0  # antipodal pair: ||x - (-x)|| = 2 >= eps, midpoint 0
    remaining = samples
    while remaining > 0:
        m = min(remaining, 4096)
        remaining -= m
        x = _unit_rows(rng.standard_normal((m, space.dim)), p)
        z = _unit_rows(rng.standard_normal((m, space.dim)), p)
        far = _row_norms(x - z, p)
        # reflect z to reach distance >= eps when needed
        z = np.where((far < eps)[:, None], -x + 0.05 * (z - x), z)
        z = _unit_rows(z, p)
        keep = (_row_norms(x - z, p) >= eps) & (_row_norms(x + z, p) > 1e-9)
        x, z = x[keep], z[keep]
        if len(x) == 0:
            continue
        lo = np.zeros(len(x))
        hi = np.ones(len(x))
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            y = _unit_rows((1.0 - mid)[:, None] * x + mid[:, None] * z, p)
            short = _row_norms(x - y, p) < eps
            lo = np.where(short, mid, lo)
            hi = np.where(short, hi, mid)
        y = _unit_rows((1.0 - hi)[:, None] * x + hi[:, None] * z, p)
        vals = 1.0 - _row_norms(0.5 * (x + y), p)
        best = min(best, float(vals.min()))
    return best
