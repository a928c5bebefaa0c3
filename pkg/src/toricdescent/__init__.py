"""Exact computations around pyramidal descent for toric matrix rings.

Modules:

* :mod:`exact_geometry` — rational polytopes, pyramids, complexity, admissible sequences
* :mod:`cone_monoid` — cones, cross-sections, Hilbert bases, affine monoids
* :mod:`lambda_ring` — the graded 2×2 matrix rings and descent instances
* :mod:`hochschild` — truncated Hochschild complexes and the descent step
* :mod:`delta_machine` — i-sequences, transformations and δ-machines
* :mod:`cli` — command-line front end
"""

from __future__ import annotations

from .cone_monoid import (
    AffineMonoid,
    Cone,
    affine_monoid,
    cone,
    cross_section,
    hilbert_basis,
    interior_membership,
    monoid_from_cone,
    monoid_membership,
    monoid_pyramidal_extension,
    normality,
    positive_grading,
)
from .exact_geometry import (
    Polytope,
    build_admissible_sequence,
    check_pyramidal_extension,
    combinatorial_type_equal,
    complexity,
    convex_hull,
    is_pyramid,
    pyramid_over,
    validate_admissible_sequence,
)
from .hochschild import (
    boundary,
    descent_step,
    homology_rank,
    induced_image_rank,
    sample_cycles,
    slice_basis,
)
from .lambda_ring import (
    BasisMonomial,
    DescentInstance,
    build_instance,
    divis_factor,
    exceptional_monomials,
    lambda_basis_slice,
)

__version__ = "0.1.0"
