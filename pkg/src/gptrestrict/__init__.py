"""Exact tools for meters, simulability and measurement restrictions in GPTs."""
from .core import (
    Ball,
    Effect,
    Meter,
    Polytope,
    decompose_indecomposable,
    dichotomic_meter,
    effect_set_vertices,
    evaluate,
    gbit,
    is_indecomposable,
    is_trivial,
    lambda_max,
    lambda_min,
    meter_range,
    trivial_meter,
)
from .errors import DomainError, GptError, ResourceError, UnsupportedError, ValidationError
from .simulation import (
    PostProcessing,
    certify_n_tomic,
    check_closure_axioms,
    mix,
    normalize_dichotomic,
    post_process,
    simulable,
)
from .restrictions import (
    EffectRestriction,
    MeterRestriction,
    build_r3_witness,
    classify,
    effect_restriction_validate,
    effects_of_restriction,
    in_noise_restriction,
    is_convex_closed_restriction,
    is_subalgebra,
    noise_content,
    subalgebra_closure,
    tomographic_completeness,
)
from .compatibility import are_compatible, check_compat_closure, in_compat_set

__version__ = "0.1.0"
