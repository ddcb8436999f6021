"""Generation and exact counting of hard-to-count CNF instances."""

from .cnf import (
    Assignment, Clause, CnfInstance, ContractError, eval_clause, eval_literal,
    hamming_neighbors, is_model, negate,
)
from .count import CountStats, Timeout, count_dpll, count_exhaustive, count_with_timeout
from .dimacs import parse_dimacs, read_dimacs, write_dimacs
from .generate import (
    ClusterCertificate, GenerationError, GenSpec, find_cluster_model, generate_balanced,
    generate_cluster, generate_random, generate_random_plus_solution,
    place_solution, random_assignment,
)
from .sweep import (
    SweepConfig, SweepRecord, Threshold, detect_peak, estimate_transition,
    predict_hard_m, run_sweep,
)

__version__ = "0.1.0"
