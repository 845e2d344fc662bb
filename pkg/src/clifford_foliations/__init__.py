"""Clifford systems, their sphere foliations, and seeded verification suites."""

from ._version import __version__

from .clifford import (
    CliffordSystem,
    EquivalenceProfile,
    build_complex_structures,
    build_system,
    conjugate_system,
    delta,
    equivalence_profile,
    sub_system,
    system_from_dict,
    system_to_dict,
    trace_invariant,
    verify_relations,
)
from .composed import (
    FoliationSpec,
    builtin_spec,
    composed_class,
    composed_quotient_distance,
    leaf_to_leaf_ambient_distance,
    same_leaf,
    tensor_orbit_distance,
)
from .foliation import (
    boundary_fiber_sample,
    fiber_sample,
    fkm_f0,
    geodesic_eval,
    mplus_sample,
    pi_c,
    project_geodesic_params,
    quotient_distance,
    quotient_lift,
    reflect_symmetry,
    spin_rotate,
)
from .homogeneity import (
    classify_homogeneity,
    diagonal_act,
    normal_form,
    sample_group_element,
)
from .verify import SuiteConfig, default_plan, run_matrix, run_suite

__all__ = [
    "CliffordSystem",
    "EquivalenceProfile",
    "FoliationSpec",
    "SuiteConfig",
    "boundary_fiber_sample",
    "build_complex_structures",
    "build_system",
    "builtin_spec",
    "classify_homogeneity",
    "composed_class",
    "composed_quotient_distance",
    "conjugate_system",
    "default_plan",
    "delta",
    "diagonal_act",
    "equivalence_profile",
    "fiber_sample",
    "fkm_f0",
    "geodesic_eval",
    "leaf_to_leaf_ambient_distance",
    "mplus_sample",
    "normal_form",
    "pi_c",
    "project_geodesic_params",
    "quotient_distance",
    "quotient_lift",
    "reflect_symmetry",
    "run_matrix",
    "run_suite",
    "same_leaf",
    "sample_group_element",
    "spin_rotate",
    "sub_system",
    "system_from_dict",
    "system_to_dict",
    "tensor_orbit_distance",
    "trace_invariant",
    "verify_relations",
]
