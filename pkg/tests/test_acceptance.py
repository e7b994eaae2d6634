"""Acceptance criteria at full size and stated tolerances.

Each test prints one PASS/FAIL line, collected again in the terminal
summary.  Criteria that the bounds cannot meet are left failing.
"""

import itertools
import json
import math
import time

import numpy as np
import pytest

from banachproj.bounds import hilbert_set_bounds, theorem1_outcome, third_problem_outcome
from banachproj.cli import main
from banachproj.harness import SuiteConfig, generate_instance, random_set, random_set_point, run_suite, strip_timing
from banachproj.hausdorff import SetPair
from banachproj.projection import project, vi_residual
from banachproj.space import SpaceSpec, lp_norm

from conftest import ACCEPTANCE_LINES

EXPONENTS = (1.5, 2.0, 3.0, 4.0)
DIMS = (2, 8, 20)


def report(number, name, ok, detail, started):
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {name}: {detail} ({time.perf_counter() - started:.1f}s)"
    ACCEPTANCE_LINES[number] = line
    print(line)
    assert ok, line


def suite(name, **kw):
    return run_suite(SuiteConfig(name, record_trials=kw.pop("record_trials", False), **kw), workers=1)


def test_criterion_01_duality_identities():
    t0 = time.perf_counter()
    rep = suite("duality_identities", p=EXPONENTS, dim=DIMS, trials=10_000, perturbation_scale=1.0)
    ok = rep.violations == 0 and rep.solver_failures == 0 and rep.trials_run == 120_000
    report(1, "duality identities", ok, f"{rep.trials_run} trials, {rep.violations} failures", t0)


def test_criterion_02_lemma1():
    t0 = time.perf_counter()
    rep = suite("lemma1", p=EXPONENTS, dim=DIMS, trials=10_000, perturbation_scale=1.0, L=3.18, tolerance=1e-9)
    ok = rep.violations == 0 and rep.trials_run == 120_000
    report(2, "lemma 1 lower bound", ok, f"{rep.trials_run} trials, {rep.violations} violations, min margin {rep.min_margin:.3g}", t0)


def test_criterion_03_lemma2():
    t0 = time.perf_counter()
    rep = suite("lemma2", p=EXPONENTS, dim=DIMS, trials=10_000, perturbation_scale=1e-2, L=3.18)
    fractions = {}
    for scale in (1e-3, 1e-4):
        fractions[scale] = suite("lemma2", p=EXPONENTS, dim=DIMS, trials=500, perturbation_scale=scale).informative_fraction
    worst = min(rep.by_combo.items(), key=lambda kv: kv[1]["informative_fraction"])
    ok = rep.violations == 0 and rep.informative_fraction >= 0.95 and min(fractions.values()) >= 0.95
    detail = (
        f"{rep.violations} violations; informative fraction {rep.informative_fraction:.3f} at scale 1e-2 "
        f"(worst {worst[0]}: {worst[1]['informative_fraction']:.3f}), "
        f"{fractions[1e-3]:.3f} at 1e-3, {fractions[1e-4]:.3f} at 1e-4; required >= 0.95"
    )
    report(3, "lemma 2 difference bound", ok, detail, t0)


def test_criterion_04_figiel():
    t0 = time.perf_counter()
    rep = suite("figiel", p=EXPONENTS, trials=1640, L=3.18, tolerance=0.0)
    ok = rep.violations == 0 and rep.min_margin >= 0.0
    report(4, "figiel scaling inequality", ok, f"{rep.trials_run} grid points, min margin {rep.min_margin:.3g}", t0)


def test_criterion_05_solver_oracle():
    t0 = time.perf_counter()
    rep = suite("solver_oracle", p=EXPONENTS, dim=(2,), trials=200, record_trials=True)
    vi = max(r.checks["vi_residual"] for r in rep.records if r.checks)
    idem = max(r.checks["idempotence"] for r in rep.records if r.checks)
    ok = rep.violations == 0 and rep.solver_failures == 0 and vi <= 1e-8 and idem <= 1e-9
    detail = f"{rep.trials_run} instances, {rep.violations} oracle mismatches, max vi {vi:.2g}, max idempotence gap {idem:.2g}"
    report(5, "solver against exhaustive oracle", ok, detail, t0)


def test_criterion_06_hilbert_properties():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst_ne, worst_p3, worst_vi = -math.inf, -math.inf, 0.0
    for k in range(1000):
        dim = 2 + k % 4
        space = SpaceSpec(dim, 2.0)
        s = random_set(rng, dim)
        x, y = rng.uniform(-8, 8, dim), rng.uniform(-8, 8, dim)
        px, py = project(space, s, x), project(space, s, y)
        a, b = px.point, py.point
        worst_ne = max(worst_ne, np.linalg.norm(a - b) - np.linalg.norm(x - y))
        for _ in range(5):
            xi = random_set_point(rng, s, 2.0)
            worst_p3 = max(worst_p3, np.sum((a - xi) ** 2) - np.sum((x - xi) ** 2) + np.sum((x - a) ** 2))
        worst_vi = max(worst_vi, vi_residual(space, x, a, s), vi_residual(space, y, b, s))
    ok = worst_ne <= 1e-6 and worst_p3 <= 1e-6 and worst_vi <= 1e-8
    detail = f"1000 trials, nonexpansive excess {worst_ne:.2g}, best-approximation excess {worst_p3:.2g}, max vi {worst_vi:.2g}"
    report(6, "hilbert projection properties", ok, detail, t0)


def test_criterion_07_theorem1():
    t0 = time.perf_counter()
    parts, violations, failures = [], 0, 0
    fraction_1e3 = None
    for scale in (1e-3, 1e-2):
        rep = suite("theorem1", p=(2.0, 3.0), dim=(2, 3), trials=500, perturbation_scale=scale)
        violations += rep.violations
        failures += rep.solver_failures
        parts.append(f"informative {rep.informative_fraction:.3f} at {scale:g}")
        if scale == 1e-3:
            fraction_1e3 = rep.informative_fraction
    small = suite("theorem1", p=(2.0, 3.0), dim=(2, 3), trials=100, perturbation_scale=1e-5)
    violations += small.violations
    parts.append(f"{small.informative_fraction:.3f} at 1e-05")
    ok = violations == 0 and failures == 0 and fraction_1e3 >= 0.5
    report(7, "theorem 1 projection continuity", ok, f"{violations} violations; " + ", ".join(parts) + "; required >= 0.5 at 1e-3", t0)


def test_criterion_08_theorem2_remark5():
    t0 = time.perf_counter()
    details, ok = [], True
    for name in ("theorem2", "remark5"):
        rep = suite(name, p=(2.0, 3.0), dim=(2, 3), trials=500, perturbation_scale=1e-3, record_trials=True)
        kinds = {r.instance.get("pair_kind") for r in rep.records}
        ok &= rep.violations == 0 and rep.solver_failures == 0 and {"translate", "independent"} <= kinds
        details.append(f"{name} {rep.violations} violations, informative {rep.informative_fraction:.3f}")
        if name == "remark5":
            recorded = [r for r in rep.records if r.outcome and r.outcome["informative"]]
            ok &= all("rhs_theorem2" in r.outcome["constants"] for r in recorded)
    report(8, "set continuity and refinement", ok, "; ".join(details), t0)


def test_criterion_09_hilbert_f9():
    t0 = time.perf_counter()
    grid = np.linspace(0.0, 10.0, 41)
    exceptions = 0
    for sigma, r, d in itertools.product(grid, grid, grid):
        sharp, comparison = hilbert_set_bounds(sigma, r, d)
        exceptions += sharp > comparison
    rep = suite("hilbert_f9", p=(2.0,), dim=(2, 3, 5, 8), trials=250, tolerance=1e-6)
    ok = exceptions == 0 and rep.violations == 0 and rep.solver_failures == 0
    detail = f"{grid.size ** 3} grid points, {exceptions} exceptions; {rep.trials_run} instances, {rep.violations} violations"
    report(9, "hilbert set bound", ok, detail, t0)


def test_criterion_10_third_problem():
    t0 = time.perf_counter()
    rep = suite("third_problem", p=(2.0, 3.0), dim=(2, 3), trials=125, perturbation_scale=1e-5)
    cfg = SuiteConfig("theorem1", p=(2.0, 3.0), dim=(2, 3), trials=50, perturbation_scale=1e-5)
    mismatches = 0
    for k in range(cfg.total_trials):
        inst = generate_instance(cfg, k)
        space, s = inst.space, inst.omega1
        px, py = project(space, s, inst.x), project(space, s, inst.y)
        ref = theorem1_outcome(space, inst.x, inst.y, px, py)
        got = third_problem_outcome(space, SetPair(s, s, 0.0), inst.x, inst.y, px, py, py)
        same = (got.lhs, got.rhs, got.informative) == (ref.lhs, ref.rhs, ref.informative)
        mismatches += not same
    ok = rep.violations == 0 and rep.solver_failures == 0 and mismatches == 0
    detail = f"{rep.trials_run} trials, {rep.violations} violations, informative {rep.informative_fraction:.3f}; zero-sigma mismatches {mismatches}/{cfg.total_trials}"
    report(10, "composite bound", ok, detail, t0)


def test_criterion_11_determinism(tmp_path, capsys):
    t0 = time.perf_counter()
    outputs = []
    for tag in ("a", "b"):
        path = tmp_path / f"{tag}.json"
        code = main(["verify", "--suite", "third_problem", "--p", "2,3", "--dim", "2,3", "--trials", "20", "--seed", "11", "--out", str(path)])
        capsys.readouterr()
        assert code == 0
        outputs.append(strip_timing(json.loads(path.read_text())))
    ok = outputs[0] == outputs[1]
    report(11, "deterministic reports", ok, "two verify runs identical modulo timing" if ok else "reports differ", t0)
