"""Random-walk insertion for d-ary cuckoo hashing, with analysis oracles."""

from cuckoowalk.bounds import (
    BoundParams,
    feasible,
    gamma,
    geometric_tail_bound,
    largest_feasible_theta,
    lower_bound_expected_path,
    nu_expectation_bound,
    upper_bound_expected_path,
)
from cuckoowalk.hash_family import FamilyConfig, LazyChoices, choices_of, lazy_reveal
from cuckoowalk.table import (
    CuckooTable,
    InsertOutcome,
    InsertTrace,
    WalkPolicy,
    build_table,
    insert_bfs,
    insert_random_walk,
    lookup,
)

__all__ = [
    "BoundParams",
    "CuckooTable",
    "FamilyConfig",
    "InsertOutcome",
    "InsertTrace",
    "LazyChoices",
    "WalkPolicy",
    "build_table",
    "choices_of",
    "feasible",
    "gamma",
    "geometric_tail_bound",
    "insert_bfs",
    "insert_random_walk",
    "largest_feasible_theta",
    "lazy_reveal",
    "lookup",
    "lower_bound_expected_path",
    "nu_expectation_bound",
    "upper_bound_expected_path",
]
