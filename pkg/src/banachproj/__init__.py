"""Metric projections, duality maps and continuity estimates in l_p spaces."""

from .bounds import (
    BoundOutcome,
    hilbert_f9_outcome,
    hilbert_set_bounds,
    lemma1_outcome,
    lemma2_outcome,
    remark5_outcome,
    theorem1_outcome,
    theorem2_outcome,
    third_problem_outcome,
)
from .harness import BoundReport, SuiteConfig, TrialRecord, generate_instance, run_suite
from .hausdorff import HausdorffEstimate, SetPair, dist_to_origin, hausdorff_bounds, hausdorff_distance
from .projection import ProjectionResult, UnconvergedProjectionError, brute_force_project, project, vi_residual
from .sets import (
    Ball,
    Box,
    SetSchemaError,
    Translate,
    VPolytope,
    linear_min_oracle,
    membership,
    translate,
)
from .space import (
    DEFAULT_L,
    VACUOUS,
    SpaceSpec,
    dual_pairing,
    duality_map,
    estimate_modulus_empirical,
    figiel_check,
    g_fn,
    inverse_monotone,
    is_vacuous,
    modulus_convexity,
    norm,
)

__version__ = "0.1.0"
