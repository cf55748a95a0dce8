"""Irreducibility of affine isometric actions of finitely presented groups.

The central decision: an affine action v -> pi(g)v + b(g) is irreducible
exactly when its affine commutant consists of translations, and those
translations then run along the fixed space of pi. Everything else here
supports or exploits that decision: first cohomology, separating-class
search, restriction and induction, direct-sum analysis, and class-specific
characterizations for abelian and nilpotent groups.
"""

from .actions import (
    AffineAction,
    AffineMap,
    AffineSubspace,
    CommutantPair,
    DirectSumAnalysis,
    EquivalenceResult,
    EquivalentProjections,
    InternalCheckError,
    IrreducibilityVerdict,
    WitnessError,
    affine_commutant,
    analyze_direct_sum,
    check_equivalence,
    check_invariance,
    commutant_residual,
    conjugate_by_translation,
    decide_irreducibility,
    direct_sum,
    fixed_points,
    intertwining_residual,
    invariant_subspace_from_witness,
    project_action,
)
from .constructions import (
    InducedSetup,
    OrbitHullReport,
    PropertyReport,
    QuadraticFormResult,
    SubgroupSpec,
    check_center_translations,
    check_restriction_theorem,
    check_translation_characterization,
    induce_action,
    orbit_hull_probe,
    quadratic_form_test,
    restrict_action,
)
from .linalg import (
    COMPLEX,
    DEFAULT_TOL,
    REAL,
    AffineSolution,
    ToleranceProfile,
    hermitian_eigensystem,
    null_space_basis,
    solve_affine_system,
)
from .reps import (
    CocycleSearchResult,
    Cocycle,
    CohomologyBasis,
    Representation,
    coboundary,
    commutant_action_on_classes,
    commutant_basis,
    first_cohomology,
    fixed_subspace,
    search_irreducible_cocycle,
)
from .words import CosetTable, GroupPresentation, Word, free_presentation, validate_coset_table

__all__ = [
    "AffineAction",
    "AffineMap",
    "AffineSolution",
    "AffineSubspace",
    "COMPLEX",
    "Cocycle",
    "CocycleSearchResult",
    "CohomologyBasis",
    "CommutantPair",
    "CosetTable",
    "DEFAULT_TOL",
    "DirectSumAnalysis",
    "EquivalenceResult",
    "EquivalentProjections",
    "GroupPresentation",
    "InducedSetup",
    "InternalCheckError",
    "IrreducibilityVerdict",
    "OrbitHullReport",
    "PropertyReport",
    "QuadraticFormResult",
    "REAL",
    "Representation",
    "SubgroupSpec",
    "ToleranceProfile",
    "WitnessError",
    "Word",
    "affine_commutant",
    "analyze_direct_sum",
    "check_center_translations",
    "check_equivalence",
    "check_invariance",
    "check_restriction_theorem",
    "check_translation_characterization",
    "coboundary",
    "commutant_action_on_classes",
    "commutant_basis",
    "commutant_residual",
    "conjugate_by_translation",
    "decide_irreducibility",
    "direct_sum",
    "first_cohomology",
    "fixed_points",
    "fixed_subspace",
    "free_presentation",
    "hermitian_eigensystem",
    "induce_action",
    "intertwining_residual",
    "invariant_subspace_from_witness",
    "null_space_basis",
    "orbit_hull_probe",
    "project_action",
    "quadratic_form_test",
    "restrict_action",
    "search_irreducible_cocycle",
    "solve_affine_system",
    "validate_coset_table",
]
