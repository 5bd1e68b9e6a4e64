"""Markov products of copulas: closed forms, grid algebra, Fréchet families,
process simulators, and chain-analysis tools."""

from ._core import (
    ClosedCopula,
    FrechetCoeffs,
    GridCopula,
    HomFrechetFamily,
    InhomFrechetFamily,
    archimedean_gap,
    archimedean_gap_psi,
    cdf_at,
    conditional_support_check,
    discretize,
    empirical_copula,
    frechet_coeffs_from_fg,
    frechet_product,
    generator_validate,
    idempotency_defect,
    inverse_defect,
    ks_uniform_statistic,
    markov_product,
    mixture,
    poisson_jump_copula,
    power,
    reflected_bm_cdf,
    reflected_bm_density,
    reflected_bm_grid,
    semigroup_check,
    simulate_chain,
    simulate_frechet_process,
    simulate_inhom_frechet_process,
    simulate_reflected_bm,
    spreadability_defect,
    sup_distance,
    sup_distance_analytic,
    transition_by_inversion,
    transpose,
    two_time_consistency,
)

__all__ = [
    "ClosedCopula",
    "FrechetCoeffs",
    "GridCopula",
    "HomFrechetFamily",
    "InhomFrechetFamily",
    "archimedean_gap",
    "archimedean_gap_psi",
    "cdf_at",
    "conditional_support_check",
    "discretize",
    "empirical_copula",
    "frechet_coeffs_from_fg",
    "frechet_product",
    "generator_validate",
    "idempotency_defect",
    "inverse_defect",
    "ks_uniform_statistic",
    "markov_product",
    "mixture",
    "poisson_jump_copula",
    "power",
    "reflected_bm_cdf",
    "reflected_bm_density",
    "reflected_bm_grid",
    "semigroup_check",
    "simulate_chain",
    "simulate_frechet_process",
    "simulate_inhom_frechet_process",
    "simulate_reflected_bm",
    "spreadability_defect",
    "sup_distance",
    "sup_distance_analytic",
    "transition_by_inversion",
    "transpose",
    "two_time_consistency",
]

__version__ = "0.1.0"
