"""Group neural networks on finite and discretized LCA groups, with exact density oracles."""
from .groups import (
    FiniteAbelianGroup,
    LatticeWindow,
    TorusGrid,
    WindowOverflowError,
    check_haar_invariance,
    haar_integrate,
    make_group,
    parse_group,
)
from .homs import (
    AffineMap,
    EnumerationBudgetError,
    FamilySpec,
    Homomorphism,
    LatticeAffineMap,
    apply,
    compose,
    enumerate_automorphisms,
    enumerate_family,
    enumerate_homs,
    is_automorphism,
    parse_family,
    sample_map,
    validate_hom,
)
from .fourier import (
    Character,
    SignedMeasure,
    SpectrumTable,
    character_eval,
    convolve,
    fourier_transform,
    inverse_fourier,
    pushforward,
    verify_double_dual,
)
from .netlib import (
    Activation,
    ConfigurationError,
    Dictionary,
    GroupNetwork,
    build_dictionary,
    eval_network,
    fit_coefficients,
    greedy_select,
    lp_error,
    sup_error,
)
from .density import (
    DensityReport,
    annihilator,
    counterexample_search,
    density_map,
    density_rank,
    is_discriminatory,
)

__version__ = "0.1.0"

__all__ = [
    "FiniteAbelianGroup",
    "LatticeWindow",
    "TorusGrid",
    "WindowOverflowError",
    "check_haar_invariance",
    "haar_integrate",
    "make_group",
    "parse_group",
    "AffineMap",
    "EnumerationBudgetError",
    "FamilySpec",
    "Homomorphism",
    "LatticeAffineMap",
    "apply",
    "compose",
    "enumerate_automorphisms",
    "enumerate_family",
    "enumerate_homs",
    "is_automorphism",
    "parse_family",
    "sample_map",
    "validate_hom",
    "Character",
    "SignedMeasure",
    "SpectrumTable",
    "character_eval",
    "convolve",
    "fourier_transform",
    "inverse_fourier",
    "pushforward",
    "verify_double_dual",
    "Activation",
    "ConfigurationError",
    "Dictionary",
    "GroupNetwork",
    "build_dictionary",
    "eval_network",
    "fit_coefficients",
    "greedy_select",
    "lp_error",
    "sup_error",
    "DensityReport",
    "annihilator",
    "counterexample_search",
    "density_map",
    "density_rank",
    "is_discriminatory",
]
