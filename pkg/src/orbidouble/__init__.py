"""Half-braided equivariant modules and inertia modules over prime fields.

Finite groups act on finite sets; equivariant modules over such actions are
the finite stand-in for sheaves on the quotient orbifold. The package builds
the double of that module category from phi-families, compares it with
modules on the inertia action, and checks the comparison with exact linear
algebra, a brute-force oracle, twisted quotient rings and atlas descent.
"""

from .atlas import (Atlas, Chart, ChartMorphism, CocartesianSection, RelativeDoubleSection,
                    cocartesian_lift, descend, glue_double, inertia_atlas, restrict,
                    restrict_double, validate_atlas)
from .double import (HalfBraidedModule, convolution, convolution_braiding, double_braiding, double_tensor,
                     double_unit, enumerate_half_braidings, extract, inertia_unit, tau_apply,
                     theta, theta_monoidal_iso, verify_half_braiding)
from .errors import (BudgetExceededError, IncompatibleSectionError, InvariantError,
                     MismatchError, NonSplittingFieldError, SplittingFailedError,
                     UnsupportedMapError)
from .groups import (FiniteGroup, GroupHom, centralizer, conjugacy_classes, cyclic_group,
                     dihedral_group, permutation_group, splitting_prime, symmetric_group,
                     trivial_group)
from .gsets import (EquivariantMap, GroupAction, InertiaAction, NaturalLoop, TwoMorphism,
                    double_inertia, fixed_points, inertia, is_open_embedding)
from .linalg import PrimeField, rank, rref, solve_linear
from .modules import (EquivariantModule, InertiaModule, ModuleMap, construct_simples,
                      count_simples, hom_space, projection_iso, pullback, pushforward,
                      random_module, swap, tensor, two_morphism_pullback_iso, unit)
from .rings import FunctionRing, compare_with_inertia, ring_B, twisted_quotient

__all__ = [
    "Atlas", "Chart", "ChartMorphism", "CocartesianSection", "RelativeDoubleSection",
    "cocartesian_lift", "descend", "glue_double", "inertia_atlas", "restrict",
    "restrict_double", "validate_atlas", "HalfBraidedModule", "convolution", "convolution_braiding", "double_braiding",
    "double_tensor", "double_unit", "enumerate_half_braidings", "extract", "inertia_unit",
    "tau_apply", "theta", "theta_monoidal_iso", "verify_half_braiding", "BudgetExceededError",
    "IncompatibleSectionError", "InvariantError", "MismatchError", "NonSplittingFieldError",
    "SplittingFailedError", "UnsupportedMapError", "FiniteGroup", "GroupHom", "centralizer",
    "conjugacy_classes", "cyclic_group", "dihedral_group", "permutation_group",
    "splitting_prime", "symmetric_group", "trivial_group", "EquivariantMap", "GroupAction",
    "InertiaAction", "NaturalLoop", "TwoMorphism", "double_inertia", "fixed_points", "inertia",
    "is_open_embedding", "PrimeField", "rank", "rref", "solve_linear", "EquivariantModule",
    "InertiaModule", "ModuleMap", "construct_simples", "count_simples", "hom_space",
    "projection_iso", "pullback", "pushforward", "random_module", "swap", "tensor",
    "two_morphism_pullback_iso", "unit", "FunctionRing", "compare_with_inertia", "ring_B",
    "twisted_quotient",
]
