"""Fairino completes partially frozen allocations of indivisible goods fairly and efficiently."""

from .checkers import check_ef, check_ef1, check_po, check_prop, check_prop1, check_property, check_sequencible
from .mms import mms_value, mms_values
from .model import Instance, parse_allocation, parse_instance, serialize_allocation, serialize_instance
from .oracle import enumerate_completions, oracle_solve
from .reductions import extract_witness, gen_counterexample, reduce_equitable_coloring, reduce_partition
from .reductions import reduce_rainbow_coloring
from .solvers import solve
from .type_definitions import (
    AllocationError,
    BudgetExceededError,
    Budgets,
    FairnessReport,
    InstanceError,
    PartialAllocation,
    ReductionError,
    SolveOutcome,
    WrongClassError,
)


__version__ = "0.1.0"
__all__ = [
    "Instance",
    "PartialAllocation",
    "Budgets",
    "FairnessReport",
    "SolveOutcome",
    "InstanceError",
    "WrongClassError",
    "AllocationError",
    "ReductionError",
    "BudgetExceededError",
    "parse_instance",
    "parse_allocation",
    "serialize_instance",
    "serialize_allocation",
    "check_ef",
    "check_ef1",
    "check_prop",
    "check_prop1",
    "check_po",
    "check_sequencible",
    "check_property",
    "mms_value",
    "mms_values",
    "enumerate_completions",
    "oracle_solve",
    "solve",
    "reduce_partition",
    "reduce_equitable_coloring",
    "reduce_rainbow_coloring",
    "extract_witness",
    "gen_counterexample",
]
