"""Calculators for the continuity estimates of duality maps and projections.

Each ``*_outcome`` function returns a :class:`BoundOutcome` holding the
measured left-hand side, the right-hand side of the estimate (``inf`` when
an inverse-function argument leaves the range of the function, i.e. the
bound is vacuous) and every constant that went into it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .hausdorff import SetPair, dist_to_origin
from .projection import ProjectionResult, UnconvergedProjectionError
from .space import (
    DEFAULT_L,
    INVERSE_TOL,
    SpaceSpec,
    delta_inverse,
    dual_norm,
    dual_pairing,
    duality_map,
    g_inverse,
    is_vacuous,
    modulus_convexity,
    norm,
)


@dataclass
class BoundOutcome:
    """One evaluated estimate.

    ``sense`` is ``"upper"`` for estimates of the form ``lhs <= rhs`` and
    ``"lower"`` for ``lhs >= rhs``; ``margin`` is positive when the estimate
    holds either way.
    """

    lhs: float
    rhs: float
    constants: dict = field(default_factory=dict)
    sense: str = "upper"

    @property
    def informative(self) -> bool:
        return not is_vacuous(self.rhs)

    @property
    def margin(self) -> float | None:
        if not self.informative:
            return None
        return self.rhs - self.lhs if self.sense == "upper" else self.lhs - self.rhs

    def holds(self, tol: float) -> bool:
        """True unless the bound is informative and violated beyond ``tol``."""
        return not self.informative or self.margin >= -tol

    def to_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs if self.informative else None,
            "margin": self.margin,
            "informative": self.informative,
            "sense": self.sense,
            "constants": {k: (None if isinstance(v, float) and math.isinf(v) else v) for k, v in self.constants.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BoundOutcome":
        rhs = math.inf if d["rhs"] is None else d["rhs"]
        consts = {k: (math.inf if v is None else v) for k, v in d["constants"].items()}
        return cls(d["lhs"], rhs, consts, d.get("sense", "upper"))


def _require_converged(*results: ProjectionResult) -> None:
    for res in results:
        if not res.converged:
            raise UnconvergedProjectionError(f"unconverged projection (vi_residual={res.vi_residual:.3g})")


def _pair_constant(space: SpaceSpec, x, y) -> float:
    nx, ny = norm(space, x), norm(space, y)
    return 2.0 * max(1.0, math.sqrt(0.5 * (nx * nx + ny * ny)))


def lemma1_outcome(space: SpaceSpec, x, y, L: float = DEFAULT_L) -> BoundOutcome:
    """``<Jx - Jy, x - y> >= delta_p(||x - y|| / C1) / (2L)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c1 = _pair_constant(space, x, y)
    t = norm(space, x - y)
    arg = t / c1
    if arg > 2.0:
        raise ValueError(f"modulus argument {arg} outside [0, 2]")
    lhs = dual_pairing(duality_map(space, x) - duality_map(space, y), x - y)
    rhs = modulus_convexity(space.p, arg) / (2.0 * L)
    return BoundOutcome(lhs=lhs, rhs=rhs, constants={"C1": c1, "L": L, "t": t}, sense="lower")


def g_composite(space: SpaceSpec, C: float, t: float, L: float = DEFAULT_L, tol: float = INVERSE_TOL) -> float:
    """``C g_p^{-1}(2 L C^2 g_q^{-1}(2 C L t))`` for a fixed constant ``C``."""
    inner = g_inverse(space.q, 2.0 * C * L * t, tol)
    if is_vacuous(inner):
        return math.inf
    outer = g_inverse(space.p, 2.0 * L * C * C * inner, tol)
    return C * outer


def lemma2_outcome(space: SpaceSpec, x, y, L: float = DEFAULT_L, tol: float = INVERSE_TOL) -> BoundOutcome:
    """``||Jx - Jy||_q <= C g_q^{-1}(2 C L ||x - y||)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c = _pair_constant(space, x, y)
    t = norm(space, x - y)
    lhs = dual_norm(space, duality_map(space, x) - duality_map(space, y))
    inv = g_inverse(space.q, 2.0 * c * L * t, tol)
    rhs = c * inv
    # ||Jx|| = ||x||, so the primal and dual pair constants coincide
    return BoundOutcome(lhs=lhs, rhs=rhs, constants={"C1": c, "C2": c, "L": L, "t": t})


def theorem1_outcome(
    space: SpaceSpec,
    x,
    y,
    xbar: ProjectionResult,
    ybar: ProjectionResult,
    L: float = DEFAULT_L,
    tol: float = INVERSE_TOL,
) -> BoundOutcome:
    """Uniform continuity of the projection in its argument.

    The right-hand side uses ``C = 2 max{1, ||x - P y||, ||y - P x||}``.  The
    proof-level variant with separate constants ``C1``, ``C2`` and, when one
    of the points lies in the set, the specialized constant of the form
    ``2 max{1, 2 ||x - y||}`` are recorded in ``constants`` as well.
    """
    _require_converged(xbar, ybar)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    px, py = xbar.point, ybar.point
    t = norm(space, x - y)
    x_py = norm(space, x - py)
    y_px = norm(space, y - px)
    x_px = norm(space, x - px)
    y_py = norm(space, y - py)
    c = 2.0 * max(1.0, x_py, y_px)
    lhs = norm(space, px - py)
    rhs = g_composite(space, c, t, L, tol)

    c1 = 2.0 * max(1.0, math.sqrt(0.5 * (x_px**2 + x_py**2)))
    c2 = 2.0 * max(1.0, math.sqrt(0.5 * (x_py**2 + y_py**2)))
    inner = g_inverse(space.q, 2.0 * c2 * L * t, tol)
    if is_vacuous(inner):
        rhs_proof = math.inf
    else:
        rhs_proof = c1 * g_inverse(space.p, 2.0 * L * c1 * c2 * inner, tol)

    constants = {"C": c, "C1": c1, "C2": c2, "L": L, "t": t, "rhs_proof": rhs_proof}
    if ybar.distance == 0.0 or xbar.distance == 0.0:
        c_r3 = 2.0 * max(1.0, 2.0 * t)
        constants["C_member"] = c_r3
        constants["rhs_member"] = g_composite(space, c_r3, t, L, tol)
    return BoundOutcome(lhs=lhs, rhs=rhs, constants=constants)


def _origin_distances(space: SpaceSpec, pair: SetPair, d1, d2) -> tuple[float, float]:
    if d1 is None:
        d1 = dist_to_origin(space, pair.omega1)
    if d2 is None:
        d2 = dist_to_origin(space, pair.omega2)
    return d1, d2


def theorem2_outcome(
    space: SpaceSpec,
    pair: SetPair,
    x,
    proj1: ProjectionResult,
    proj2: ProjectionResult,
    L: float = DEFAULT_L,
    d1: float | None = None,
    d2: float | None = None,
    tol: float = INVERSE_TOL,
) -> BoundOutcome:
    """Continuity of the projection in the set, ``C1 delta^{-1}(4L(d + r) sigma)``.

    ``d1``/``d2`` are the distances from the origin to the two sets and are
    computed when omitted.  The refined bound with constants built from
    ``||x - P1 x||`` and ``||x - P2 x||`` is recorded as ``rhs_refined``.
    """
    _require_converged(proj1, proj2)
    x = np.asarray(x, dtype=float)
    d1, d2 = _origin_distances(space, pair, d1, d2)
    r = norm(space, x)
    d = max(d1, d2)
    sigma = pair.sigma
    c1 = 2.0 * max(1.0, r + d)
    lhs = norm(space, proj1.point - proj2.point)
    rhs = c1 * delta_inverse(space.p, 4.0 * L * (d + r) * sigma, tol)

    a1 = norm(space, x - proj1.point)
    a2 = norm(space, x - proj2.point)
    c1_ref = 2.0 * max(1.0, a1, a2)
    c2_ref = 2.0 * max(a1, a2)
    rhs_ref = c1_ref * delta_inverse(space.p, 4.0 * L * c2_ref * sigma, tol)
    constants = {
        "C1": c1,
        "L": L,
        "r": r,
        "d": d,
        "d1": d1,
        "d2": d2,
        "sigma": sigma,
        "C1_refined": c1_ref,
        "C2_refined": c2_ref,
        "rhs_refined": rhs_ref,
    }
    return BoundOutcome(lhs=lhs, rhs=rhs, constants=constants)


def remark5_outcome(space: SpaceSpec, pair: SetPair, x, proj1, proj2, L: float = DEFAULT_L, d1=None, d2=None) -> BoundOutcome:
    """The refined set-perturbation bound as the primary right-hand side."""
    base = theorem2_outcome(space, pair, x, proj1, proj2, L, d1, d2)
    constants = dict(base.constants)
    constants["rhs_theorem2"] = base.rhs
    return BoundOutcome(lhs=base.lhs, rhs=base.constants["rhs_refined"], constants=constants)


def hilbert_set_bounds(sigma: float, r: float, d: float) -> tuple[float, float]:
    """``(sqrt(2 sigma (r + d)), sqrt(4 sigma (2r + d) + sigma^2))``."""
    if sigma < 0 or r < 0 or d < 0:
        raise ValueError("sigma, r and d must be nonnegative")
    return math.sqrt(2.0 * sigma * (r + d)), math.sqrt(4.0 * sigma * (2.0 * r + d) + sigma * sigma)


def hilbert_f9_outcome(space: SpaceSpec, pair: SetPair, x, proj1, proj2, d1=None, d2=None) -> BoundOutcome:
    """Hilbert-space set perturbation ``||P1 x - P2 x|| <= sqrt(2 sigma (r + d))``."""
    if space.p != 2.0:
        raise ValueError("the Hilbert estimate needs p = 2")
    _require_converged(proj1, proj2)
    d1, d2 = _origin_distances(space, pair, d1, d2)
    r = norm(space, np.asarray(x, dtype=float))
    d = max(d1, d2)
    sharp, older = hilbert_set_bounds(pair.sigma, r, d)
    lhs = norm(space, proj1.point - proj2.point)
    return BoundOutcome(lhs=lhs, rhs=sharp, constants={"r": r, "d": d, "sigma": pair.sigma, "rhs_comparison": older})


def third_problem_outcome(
    space: SpaceSpec,
    pair: SetPair,
    x,
    y,
    px1: ProjectionResult,
    py1: ProjectionResult,
    py2: ProjectionResult,
    L: float = DEFAULT_L,
    d1: float | None = None,
    d2: float | None = None,
) -> BoundOutcome:
    """``||P1 x - P2 y||`` bounded by the argument term in ``omega1`` plus the set term at ``y``.

    ``px1``, ``py1`` are projections of ``x``, ``y`` onto ``omega1`` and
    ``py2`` the projection of ``y`` onto ``omega2``.
    """
    arg = theorem1_outcome(space, x, y, px1, py1, L)
    sets = theorem2_outcome(space, pair, y, py1, py2, L, d1, d2)
    lhs = norm(space, px1.point - py2.point)
    constants = {f"arg_{k}": v for k, v in arg.constants.items()}
    constants.update({f"set_{k}": v for k, v in sets.constants.items()})
    constants["rhs_argument"] = arg.rhs
    constants["rhs_set"] = sets.rhs
    return BoundOutcome(lhs=lhs, rhs=arg.rhs + sets.rhs, constants=constants)
