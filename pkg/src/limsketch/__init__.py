"""Finite limit sketches and the reflection of presentations into models.

The package computes the reflection of a set-valued presentation along
two independent routes (a staged construction that keeps fresh free
material quotient-free, and the classical iterated completion), compares
them stage by stage, and verifies the strict universal property of the
result by explicit factorisation plus exhaustive uniqueness search.
"""

from .compare import AlphaTrace, build_alpha, reflector_iso_check
from .elim import (
    FAITHFUL,
    PRUNED,
    ReflectionTrace,
    Stage,
    StageElement,
    e_step,
    elim_stage,
    reflect_elim,
    relation_one,
    relation_two,
)
from .errors import BudgetExceeded, EngineError, InputError, PreconditionError
from .fincat import (
    Arrow,
    CatFunctor,
    FinCategory,
    ValidationReport,
    hom,
    validate_category,
    validate_functor,
)
from .kelly import KellyTrace, kelly_P, kelly_Pc, reflect_kelly
from .setops import (
    NatTransSpec,
    QuotientMap,
    SetPresentation,
    disjoint_sum,
    functorial_quotient,
    limit_of_diagram,
    make_presentation,
    pushout_classes,
    terminal_presentation,
)
from .sketchlib import (
    Cone,
    LimitSketch,
    ModelReport,
    build_sketch,
    cone_limit,
    gap_map,
    is_model,
    sketch_binary_product,
    sketch_equalizer,
    sketch_iso_forcing,
    sketch_monoid_budgeted,
    sketch_two_cover_sheaf,
    validate_cone,
)
from .universal import (
    FactorisationResult,
    check_uniqueness,
    enumerate_nat_trans,
    solve_factorisation,
)

__version__ = "0.1.0"
