"""Degenerate Neumann system: dynamics, Lax form and exact spectral curve."""

from .phase import (
    PhasePoint,
    PotentialSpec,
    group_moments,
    hamiltonian,
    make_potential,
    make_state,
    project_to_manifold,
    random_rational_state,
    random_state,
    rationalize_state,
    vector_field,
)
from .laxflow import assemble_lax, check_form_preservation, lax_rhs, plus_part
from .spectral import (
    char_poly,
    classify,
    energy_identity,
    factor_curve,
    genus_report,
    invariants,
    k_regularity,
    q_polynomial,
    spectral_summary,
    wa_decomposition,
)
from .dynamics import drift_report, integrate, integrate_lax, step

__version__ = "0.1.0"
