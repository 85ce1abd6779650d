"""Exact-arithmetic toolkit for picking sequences in fair division."""
from .core import (
    INFINITY,
    Allocation,
    DomainError,
    Instance,
    Rational,
    ResourceCapExceeded,
    bundle_utility,
    default_preferences,
    ratio,
    validate_instance,
)
from .execution import egalitarian_welfare, ew, execute, is_ef1, welfare_ratio
from .mms import classify, constants, guarantee_alpha, is_best, is_irregular, is_worst, mms_exact
from .sequences import (
    PickingSequence,
    agent_pick_indices,
    enumerate_all,
    is_recursively_balanced,
    make_balanced_alternation,
    make_last_first,
    make_round_robin,
    parse_sequence,
    rounds,
)

__version__ = "0.1.0"
