"""ktree-lab: a random k-tree laboratory.

Generate the random k-tree graph process at scale, compute its exact and
asymptotic theoretical degree distribution, and verify the power-law and
concentration behaviour empirically against exact dynamic-programming
oracles.
"""

__version__ = "0.1.0"

from .errors import (
    DMaxTooSmall,
    GraphTooLarge,
    InsufficientTail,
    InternalInvariantViolation,
    InvalidParameters,
    KMismatch,
    KTreeLabError,
    MissingHistory,
    ParseError,
    ResourceExhausted,
)
from .generator import (
    KTree,
    PartialKTree,
    ProcessParams,
    TreeDecomposition,
    build_tree_decomposition,
    generate,
    generate_partial,
    new_process,
    step,
    stream_seed,
    total_cliques_for,
)
from .theory import (
    ExpectedDegreeTable,
    TheoreticalDistribution,
    TheoryCoefficients,
    attachment_probability,
    attachment_probability_fraction,
    azuma_bound,
    azuma_bound_conservative,
    azuma_lambda,
    beta_closed_form,
    beta_table,
    beta_tail_degree_mass,
    beta_tail_mass,
    cliques_containing,
    closed_form_unnormalized,
    default_d_max,
    expected_histogram_dp,
    tail_exponent,
    total_k_cliques,
)
from .analysis import (
    ConcentrationReport,
    DegreeHistogram,
    DeviationReport,
    ExponentFit,
    Lemma1Report,
    brute_force_k_cliques,
    collect_degree_counts,
    concentration_experiment,
    degree_histogram,
    deviation_report,
    fit_tail_exponent,
    run_trials_histogram,
    stored_cliques_as_sets,
    validate_tree_decomposition,
    verify_lemma1,
)

__all__ = [name for name in dir() if not name.startswith("_")]
