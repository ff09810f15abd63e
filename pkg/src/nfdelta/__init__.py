"""Number field tools for the delta-symbol circle method over number fields."""

from .nf import (
    ClassData,
    FieldElement,
    FieldError,
    NumberField,
    builtin_fields,
    field_from_config,
    field_from_name,
    field_from_quadratic,
    load_field,
    rationals,
    unit_reduce,
    vmax,
    vnorm,
    vnorm2,
    vtrace,
)
from .ideals import (
    ZERO,
    Ideal,
    IdealError,
    PrimeIdeal,
    alg1_principalize,
    alg1_uniformizer,
    denominator_ideal,
    different,
    dual_ideal,
    enumerate_ideals,
    factor_ideal,
    ideal_counts,
    primes_above,
    squarefree_squarefull_split,
)

__version__ = "0.1.0"
