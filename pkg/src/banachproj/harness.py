"""Seeded randomized verification suites.

A suite evaluates one estimate on ``trials`` random instances for every
combination of exponent and dimension in its config.  Instance ``k`` is a
pure function of ``(seed, k)``, so suites can run in any order, serially or
across processes, and still produce the same report.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable

import numpy as np

from . import bounds
from .hausdorff import SetPair, dist_to_origin, hausdorff_distance
from .projection import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    UnconvergedProjectionError,
    brute_force_project,
    project,
)
from .sets import Ball, Box, ConvexSet, VPolytope, materialize, to_dict, translate
from .space import (
    DEFAULT_L,
    SpaceSpec,
    check_figiel_constant,
    dual_norm,
    dual_pairing,
    duality_map,
    figiel_check,
    lp_norm,
    modulus_convexity,
    norm,
)

log = logging.getLogger(__name__)

SUITES = (
    "lemma1",
    "lemma2",
    "figiel",
    "theorem1",
    "theorem2",
    "remark5",
    "hilbert_f9",
    "third_problem",
    "solver_oracle",
    "duality_identities",
)

# comparison tolerance on margins, per suite
DEFAULT_TOLERANCES = {
    "lemma1": 1e-9,
    "duality_identities": 0.0,
    "hilbert_f9": 1e-6,
    "figiel": 0.0,
}
CMP_TOL = 1e-7
COORD_RANGE = 5.0
FIGIEL_GRID = np.round(0.05 * np.arange(1, 41), 10)
ORACLE_GRID = 200
VI_CERT_TOL = 1e-8
IDEMPOTENCE_TOL = 1e-9
MAX_SOLVER_FAILURE_RATE = 0.01
THREADS_ENV = "BANACHPROJ_THREADS"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SuiteConfig:
    suite: str
    p: tuple = (2.0,)
    dim: tuple = (2,)
    trials: int = 100
    seed: int = 0
    perturbation_scale: float = 1e-2
    L: float = DEFAULT_L
    tolerance: float | None = None
    proj_tol: float = DEFAULT_TOL
    max_iter: int = DEFAULT_MAX_ITER
    record_trials: bool = True

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(float(v) for v in np.atleast_1d(self.p)))
        object.__setattr__(self, "dim", tuple(int(v) for v in np.atleast_1d(self.dim)))

    def validate(self) -> "SuiteConfig":
        if self.suite not in SUITES:
            raise ConfigError(f"unknown suite {self.suite!r}; choose from {', '.join(SUITES)}")
        if int(self.trials) != self.trials or self.trials < 1:
            raise ConfigError(f"trials must be a positive integer, got {self.trials!r}")
        if not self.p or any(not (1.0 < v < math.inf) for v in self.p):
            raise ConfigError(f"every p must satisfy 1 < p < inf, got {self.p!r}")
        if not self.dim or any(v < 1 for v in self.dim):
            raise ConfigError(f"every dim must be a positive integer, got {self.dim!r}")
        if not (0 <= int(self.seed) < 2**64):
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if not (self.perturbation_scale > 0):
            raise ConfigError("perturbation_scale must be positive")
        if self.tolerance is not None and self.tolerance < 0:
            raise ConfigError("tolerance must be nonnegative")
        if self.proj_tol <= 0 or self.max_iter < 1:
            raise ConfigError("proj_tol must be positive and max_iter at least 1")
        try:
            check_figiel_constant(self.L)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.suite == "hilbert_f9" and self.p != (2.0,):
            raise ConfigError("hilbert_f9 runs in Hilbert space only: use p = 2")
        if self.suite == "solver_oracle" and max(self.dim) > 3:
            raise ConfigError("solver_oracle needs dim <= 3 for the exhaustive oracle")
        return self

    @property
    def comparison_tol(self) -> float:
        if self.tolerance is not None:
            return self.tolerance
        return DEFAULT_TOLERANCES.get(self.suite, CMP_TOL)

    def combos(self) -> list[tuple[float, int]]:
        return [(p, n) for p in self.p for n in self.dim]

    @property
    def total_trials(self) -> int:
        return self.trials * len(self.combos())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["p"] = list(self.p)
        d["dim"] = list(self.dim)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SuiteConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config field(s): {', '.join(sorted(unknown))}")
        if "suite" not in d:
            raise ConfigError("config needs a 'suite' field")
        return cls(**d)


# ---------------------------------------------------------------- instances


@dataclass
class Instance:
    index: int
    p: float
    dim: int
    x: np.ndarray | None = None
    y: np.ndarray | None = None
    omega1: ConvexSet | None = None
    omega2: ConvexSet | None = None
    sigma: float | None = None
    pair_kind: str | None = None
    eps: float | None = None
    eta: float | None = None
    exponent: float | None = None

    @property
    def space(self) -> SpaceSpec:
        return SpaceSpec(self.dim, self.p)

    def summary(self) -> dict:
        out: dict[str, Any] = {"p": self.p, "dim": self.dim}
        for name in ("x", "y"):
            v = getattr(self, name)
            if v is not None:
                out[name] = v.tolist()
        for name in ("omega1", "omega2"):
            s = getattr(self, name)
            if s is not None:
                out[name] = to_dict(s)
        for name in ("sigma", "pair_kind", "eps", "eta", "exponent"):
            v = getattr(self, name)
            if v is not None:
                out[name] = v
        return out


def _rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(index)]))


def random_direction(rng: np.random.Generator, dim: int, p: float) -> np.ndarray:
    """Isotropic direction normalized to unit p-norm."""
    while True:
        u = rng.standard_normal(dim)
        n = lp_norm(u, p)
        if n > 0:
            return u / n


def random_set(rng: np.random.Generator, dim: int, kinds=("box", "ball", "vpolytope")) -> ConvexSet:
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "box":
        a = rng.uniform(-COORD_RANGE, COORD_RANGE, (2, dim))
        return Box(a.min(axis=0), a.max(axis=0))
    if kind == "ball":
        return Ball(rng.uniform(-0.8 * COORD_RANGE, 0.8 * COORD_RANGE, dim), rng.uniform(0.5, 3.0))
    m = int(rng.integers(2, dim + 11))
    return VPolytope(rng.uniform(-COORD_RANGE, COORD_RANGE, (m, dim)))


def random_set_point(rng: np.random.Generator, s: ConvexSet, p: float) -> np.ndarray:
    s = materialize(s)
    if isinstance(s, Box):
        return rng.uniform(s.lower, s.upper)
    if isinstance(s, Ball):
        return s.center + s.radius * rng.uniform() * random_direction(rng, s.dim, p)
    w = rng.dirichlet(np.ones(len(s.vertices)))
    return w @ s.vertices


def _base_point(rng, space: SpaceSpec, s: ConvexSet) -> np.ndarray:
    # half uniform in the cube, half within distance 1 of the set
    if rng.uniform() < 0.5:
        return rng.uniform(-COORD_RANGE, COORD_RANGE, space.dim)
    z = random_set_point(rng, s, space.p)
    return z + rng.uniform() * random_direction(rng, space.dim, space.p)


def _perturb(rng, x: np.ndarray, p: float, scale: float) -> np.ndarray:
    return x + rng.uniform(0.5, 1.5) * scale * random_direction(rng, len(x), p)


def _set_pair(rng, space: SpaceSpec, s: ConvexSet, scale: float, proj_tol: float) -> tuple[ConvexSet, float, str]:
    u = rng.uniform()
    if u < 0.5:
        t = _perturb(rng, np.zeros(space.dim), space.p, scale)
        # sigma = ||t|| exactly: support functions differ by <w, t>
        return translate(s, t), lp_norm(t, space.p), "translate"
    if u < 0.8 and isinstance(s, VPolytope):
        noise = np.array([_perturb(rng, np.zeros(space.dim), space.p, scale) for _ in s.vertices])
        other = VPolytope(s.vertices + noise)
        return other, hausdorff_distance(space, s, other, proj_tol), "jitter"
    other = random_set(rng, space.dim)
    return other, hausdorff_distance(space, s, other, proj_tol), "independent"


def _figiel_pairs() -> list[tuple[float, float]]:
    g = FIGIEL_GRID
    return [(float(g[i]), float(g[j])) for i in range(len(g)) for j in range(i, len(g))]


def generate_instance(config: SuiteConfig, trial_index: int) -> Instance:
    """Deterministic instance number ``trial_index`` of ``config``."""
    combos = config.combos()
    if not (0 <= trial_index < config.total_trials):
        raise IndexError(f"trial index {trial_index} out of range")
    p, dim = combos[trial_index // config.trials]
    local = trial_index % config.trials
    rng = _rng(config.seed, trial_index)
    inst = Instance(index=trial_index, p=p, dim=dim)
    space = inst.space
    suite = config.suite
    scale = config.perturbation_scale
    if suite in ("lemma1", "lemma2", "duality_identities"):
        inst.x = rng.uniform(-COORD_RANGE, COORD_RANGE, dim)
        inst.y = _perturb(rng, inst.x, p, scale)
    elif suite == "figiel":
        pairs = _figiel_pairs()
        if local < 2 * len(pairs):
            inst.eps, inst.eta = pairs[local % len(pairs)]
            inst.exponent = p if local < len(pairs) else space.q
        else:
            a, b = sorted(rng.uniform(0.0, 2.0, 2))
            inst.eps, inst.eta = max(float(a), 1e-6), max(float(b), 1e-6)
            inst.exponent = p if rng.uniform() < 0.5 else space.q
    elif suite == "solver_oracle":
        inst.omega1 = random_set(rng, dim, kinds=("box", "vpolytope"))
        inst.x = rng.uniform(-1.6 * COORD_RANGE, 1.6 * COORD_RANGE, dim)
    elif suite == "theorem1":
        inst.omega1 = random_set(rng, dim)
        inst.x = _base_point(rng, space, inst.omega1)
        inst.y = _perturb(rng, inst.x, p, scale)
    else:
        inst.omega1 = random_set(rng, dim)
        inst.omega2, inst.sigma, inst.pair_kind = _set_pair(rng, space, inst.omega1, scale, config.proj_tol)
        inst.x = _base_point(rng, space, inst.omega1)
        if suite == "third_problem":
            inst.y = _perturb(rng, inst.x, p, scale)
    return inst


# ---------------------------------------------------------------- trials


@dataclass
class TrialRecord:
    trial: int
    seed: int
    status: str  # pass | violation | vacuous | solver-failure
    instance: dict
    outcome: dict | None
    checks: dict = field(default_factory=dict)
    wall_time_s: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "TrialRecord":
        return cls(**d)


def _projector(config: SuiteConfig, space: SpaceSpec, max_iter: int) -> Callable:
    def proj(s, z):
        res = project(space, s, z, tol=config.proj_tol, max_iter=max_iter)
        if not res.converged:
            raise UnconvergedProjectionError(f"vi_residual {res.vi_residual:.3g} after {res.iterations} iterations")
        return res

    return proj


def _trial_duality(inst: Instance, config, proj) -> tuple[bounds.BoundOutcome, dict]:
    space, x = inst.space, inst.x
    jx = duality_map(space, x)
    nx = norm(space, x)
    e1 = abs(dual_pairing(jx, x) - nx * nx) / (1.0 + nx * nx)
    e2 = abs(dual_norm(space, jx) - nx) / (1.0 + nx)
    checks = {"pairing_error": e1, "norm_error": e2}
    lhs = max(e1, e2)
    if space.p == 2.0:
        checks["identity_exact"] = bool(np.array_equal(jx, x))
        if not checks["identity_exact"]:
            lhs = math.inf
    return bounds.BoundOutcome(lhs=lhs, rhs=1e-10, constants={"norm": nx}), checks


def _trial_lemma1(inst, config, proj):
    out = bounds.lemma1_outcome(inst.space, inst.x, inst.y, config.L)
    return out, {"monotone": out.lhs >= -1e-12}


def _trial_lemma2(inst, config, proj):
    return bounds.lemma2_outcome(inst.space, inst.x, inst.y, config.L), {}


def _trial_figiel(inst, config, proj):
    r, eps, eta = inst.exponent, inst.eps, inst.eta
    lhs = eta * eta * modulus_convexity(r, eps) / (4.0 * config.L)
    rhs = eps * eps * modulus_convexity(r, eta)
    margin = figiel_check(r, eps, eta, config.L)
    return bounds.BoundOutcome(lhs=lhs, rhs=rhs, constants={"exponent": r, "eps": eps, "eta": eta}), {"margin_nonnegative": margin >= 0.0}


def _trial_solver_oracle(inst, config, proj):
    space, s, x = inst.space, inst.omega1, inst.x
    res = proj(s, x)
    brute = brute_force_project(space, s, x, grid=ORACLE_GRID)
    again = proj(s, res.point)
    idem = lp_norm(again.point - res.point, space.p)
    gap = lp_norm(res.point - brute.point, space.p)
    checks = {
        "vi_residual": res.vi_residual,
        "vi_ok": res.vi_residual <= VI_CERT_TOL,
        "idempotence": idem,
        "idempotence_ok": idem <= IDEMPOTENCE_TOL,
        "iterations": res.iterations,
    }
    out = bounds.BoundOutcome(
        lhs=gap, rhs=2.0 * brute.resolution, constants={"resolution": brute.resolution, "distance": res.distance}
    )
    return out, checks


def _trial_theorem1(inst, config, proj):
    space, s = inst.space, inst.omega1
    px, py = proj(s, inst.x), proj(s, inst.y)
    out = bounds.theorem1_outcome(space, inst.x, inst.y, px, py, config.L)
    checks = {}
    if "C_member" in out.constants:
        checks["member_constant_dominates"] = out.constants["C"] <= out.constants["C_member"] * (1 + 1e-12)
        checks["member_bound_holds"] = bounds.BoundOutcome(out.lhs, out.constants["rhs_member"]).holds(config.comparison_tol)
    return out, checks


def _pair(inst) -> SetPair:
    return SetPair(inst.omega1, inst.omega2, inst.sigma)


def _origin(inst, config):
    return dist_to_origin(inst.space, inst.omega1, config.proj_tol), dist_to_origin(inst.space, inst.omega2, config.proj_tol)


# bisection brackets have width <= 1e-10; the comparison allows for that
_INVERSE_SLACK = 1e-9


def _refinement_applies(c: dict) -> bool:
    # the refined argument 4 L C2 sigma only dominates when C2 <= d + r
    return c["C2_refined"] <= c["d"] + c["r"] and c["C1_refined"] <= c["C1"]


def _trial_theorem2(inst, config, proj):
    p1, p2 = proj(inst.omega1, inst.x), proj(inst.omega2, inst.x)
    d1, d2 = _origin(inst, config)
    out = bounds.theorem2_outcome(inst.space, _pair(inst), inst.x, p1, p2, config.L, d1, d2)
    c = out.constants
    checks = {}
    if _refinement_applies(c):
        checks["refined_not_weaker"] = c["rhs_refined"] <= out.rhs + _INVERSE_SLACK * c["C1"]
    checks["refined_holds"] = bounds.BoundOutcome(out.lhs, c["rhs_refined"]).holds(config.comparison_tol)
    return out, checks


def _trial_remark5(inst, config, proj):
    p1, p2 = proj(inst.omega1, inst.x), proj(inst.omega2, inst.x)
    d1, d2 = _origin(inst, config)
    out = bounds.remark5_outcome(inst.space, _pair(inst), inst.x, p1, p2, config.L, d1, d2)
    c = out.constants
    checks = {}
    if _refinement_applies(c):
        checks["refined_not_weaker"] = out.rhs <= c["rhs_theorem2"] + _INVERSE_SLACK * c["C1"]
    return out, checks


def _trial_hilbert_f9(inst, config, proj):
    p1, p2 = proj(inst.omega1, inst.x), proj(inst.omega2, inst.x)
    d1, d2 = _origin(inst, config)
    out = bounds.hilbert_f9_outcome(inst.space, _pair(inst), inst.x, p1, p2, d1, d2)
    return out, {"sharper_than_comparison": out.rhs <= out.constants["rhs_comparison"]}


def _trial_third_problem(inst, config, proj):
    s1, s2 = inst.omega1, inst.omega2
    px1, py1, py2 = proj(s1, inst.x), proj(s1, inst.y), proj(s2, inst.y)
    d1, d2 = _origin(inst, config)
    out = bounds.third_problem_outcome(inst.space, _pair(inst), inst.x, inst.y, px1, py1, py2, config.L, d1, d2)
    return out, {}


TRIALS: dict[str, Callable] = {
    "duality_identities": _trial_duality,
    "lemma1": _trial_lemma1,
    "lemma2": _trial_lemma2,
    "figiel": _trial_figiel,
    "solver_oracle": _trial_solver_oracle,
    "theorem1": _trial_theorem1,
    "theorem2": _trial_theorem2,
    "remark5": _trial_remark5,
    "hilbert_f9": _trial_hilbert_f9,
    "third_problem": _trial_third_problem,
}


def run_trial(config: SuiteConfig, index: int) -> TrialRecord:
    """Generate and evaluate one instance.

    An unconverged projection triggers one retry with four times the
    iteration budget; a second failure marks the trial as a solver failure.
    """
    start = time.perf_counter()
    fn = TRIALS[config.suite]
    outcome = None
    checks: dict = {}
    status = "solver-failure"
    inst = None
    for budget in (config.max_iter, 4 * config.max_iter):
        try:
            inst = generate_instance(config, index)
            proj = _projector(config, inst.space, budget)
            outcome, checks = fn(inst, config, proj)
        except UnconvergedProjectionError as exc:
            log.debug("trial %d: %s (budget %d)", index, exc, budget)
            continue
        break
    if outcome is not None:
        extra_ok = all(v for v in checks.values() if isinstance(v, bool))
        if not outcome.holds(config.comparison_tol) or not extra_ok:
            status = "violation"
        elif not outcome.informative:
            status = "vacuous"
        else:
            status = "pass"
    return TrialRecord(
        trial=index,
        seed=config.seed,
        status=status,
        instance=inst.summary() if inst is not None else {},
        outcome=outcome.to_dict() if outcome is not None else None,
        checks={k: (bool(v) if isinstance(v, (bool, np.bool_)) else v) for k, v in checks.items()},
        wall_time_s=time.perf_counter() - start,
    )


def _run_chunk(args) -> list[TrialRecord]:
    config, indices = args
    return [run_trial(config, i) for i in indices]


# ---------------------------------------------------------------- reports


@dataclass
class BoundReport:
    suite: str
    config: dict
    trials_run: int
    violations: int
    worst_margin: float | None
    informative_fraction: float
    min_margin: float | None
    median_margin: float | None
    solver_failures: int
    solver_failure_rate: float
    passed: bool
    by_combo: dict
    runtime_s: float
    records: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["records"] = [r if isinstance(r, dict) else r.to_dict() for r in self.records]
        return d

    def to_json(self, with_records: bool = True) -> str:
        d = self.to_dict()
        if not with_records:
            d.pop("records")
        return json.dumps(d, sort_keys=True, indent=1, allow_nan=False)

    @classmethod
    def from_dict(cls, d: dict) -> "BoundReport":
        d = dict(d)
        d["records"] = [TrialRecord.from_dict(r) for r in d.get("records", [])]
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "BoundReport":
        return cls.from_dict(json.loads(text))

    def write_csv(self, path) -> None:
        keys = sorted({k for r in self.records if r.outcome for k in r.outcome["constants"]})
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["trial", "p", "dim", "status", "lhs", "rhs", "margin", "informative", *keys])
            for r in self.records:
                o = r.outcome or {"lhs": None, "rhs": None, "margin": None, "informative": None, "constants": {}}
                w.writerow(
                    [r.trial, r.instance.get("p"), r.instance.get("dim"), r.status, o["lhs"], o["rhs"], o["margin"], o["informative"]]
                    + [o["constants"].get(k) for k in keys]
                )


TIMING_FIELDS = ("runtime_s", "wall_time_s")


def strip_timing(d):
    """Copy of a report dict without the wall-clock fields."""
    if isinstance(d, dict):
        return {k: strip_timing(v) for k, v in d.items() if k not in TIMING_FIELDS}
    if isinstance(d, list):
        return [strip_timing(v) for v in d]
    return d


def _summarize(records: list[TrialRecord]) -> dict:
    solved = [r for r in records if r.status != "solver-failure"]
    margins = [r.outcome["margin"] for r in solved if r.outcome and r.outcome["informative"]]
    violations = [r for r in records if r.status == "violation"]
    vmargins = [r.outcome["margin"] for r in violations if r.outcome and r.outcome["margin"] is not None]
    failures = len(records) - len(solved)
    return {
        "trials_run": len(records),
        "violations": len(violations),
        "worst_margin": min(vmargins) if vmargins else (min(margins) if margins else None),
        "informative_fraction": len(margins) / len(solved) if solved else 0.0,
        "min_margin": min(margins) if margins else None,
        "median_margin": statistics.median(margins) if margins else None,
        "solver_failures": failures,
        "solver_failure_rate": failures / len(records) if records else 0.0,
    }


def worker_count() -> int:
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def run_suite(config: SuiteConfig, workers: int | None = None) -> BoundReport:
    """Run every trial of ``config`` and aggregate the results.

    ``workers`` defaults to ``$BANACHPROJ_THREADS`` or the CPU count; with a
    single worker the trials run in-process.
    """
    config.validate()
    start = time.perf_counter()
    n = config.total_trials
    workers = worker_count() if workers is None else max(1, workers)
    workers = min(workers, n)
    if workers == 1:
        records = [run_trial(config, i) for i in range(n)]
    else:
        size = max(1, math.ceil(n / (workers * 4)))
        chunks = [(config, range(i, min(i + size, n))) for i in range(0, n, size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = [r for chunk in pool.map(_run_chunk, chunks) for r in chunk]
    records.sort(key=lambda r: r.trial)

    by_combo = {}
    for k, (p, dim) in enumerate(config.combos()):
        by_combo[f"p={p:g},dim={dim}"] = _summarize(records[k * config.trials : (k + 1) * config.trials])
    summary = _summarize(records)
    passed = summary["violations"] == 0 and summary["solver_failure_rate"] < MAX_SOLVER_FAILURE_RATE
    return BoundReport(
        suite=config.suite,
        config=config.to_dict(),
        passed=passed,
        by_combo=by_combo,
        runtime_s=time.perf_counter() - start,
        records=records if config.record_trials else [],
        **summary,
    )


# ---------------------------------------------------------------- extras


def find_nonexpansive_violation(p: float, attempts: int = 2000, seed: int = 0) -> dict | None:
    """Search for a 2-D instance with ``||Px - Py|| > ||x - y||`` in l_p.

    Projections onto segments are used; in Hilbert space none exists.
    Returns the first instance found, as a plain dict, or None.
    """
    space = SpaceSpec(2, p)
    rng = np.random.default_rng(seed)
    for k in range(attempts):
        seg = VPolytope(rng.uniform(-COORD_RANGE, COORD_RANGE, (2, 2)))
        x = rng.uniform(-2 * COORD_RANGE, 2 * COORD_RANGE, 2)
        y = x + rng.uniform(0.1, 2.0) * random_direction(rng, 2, p)
        px, py = project(space, seg, x), project(space, seg, y)
        if not (px.converged and py.converged):
            continue
        ratio = lp_norm(px.point - py.point, p) / lp_norm(x - y, p)
        if ratio > 1.0 + 1e-6:
            return {
                "p": p,
                "attempt": k,
                "set": to_dict(seg),
                "x": x.tolist(),
                "y": y.tolist(),
                "px": px.point.tolist(),
                "py": py.point.tolist(),
                "ratio": ratio,
            }
    return None


def load_config(path) -> dict:
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path}: {exc}") from None
    if not isinstance(d, dict):
        raise ConfigError(f"config file {path}: expected a JSON object")
    return d


def resolve_config(file_values: dict | None, overrides: dict) -> SuiteConfig:
    """Defaults < config file < explicit overrides (None values are ignored)."""
    merged = dict(file_values or {})
    merged.update({k: v for k, v in overrides.items() if v is not None})
    cfg = SuiteConfig.from_dict(merged)
    return cfg.validate()


__all__ = [
    "SUITES",
    "SuiteConfig",
    "Instance",
    "TrialRecord",
    "BoundReport",
    "ConfigError",
    "generate_instance",
    "run_trial",
    "run_suite",
    "strip_timing",
    "find_nonexpansive_violation",
    "random_set",
    "random_set_point",
    "random_direction",
    "resolve_config",
    "load_config",
]
