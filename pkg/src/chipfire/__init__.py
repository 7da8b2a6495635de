"""Labeled chip-firing on directed k-ary trees."""
from .errors import (
    ChipFireError,
    IllegalFiringError,
    InvalidConfigurationError,
    SizeGuardError,
    UnboundedFiringError,
)
from .tree import (
    Configuration,
    FiringEvent,
    FiringPlan,
    StablePermutation,
    TreeParams,
    child,
    fire,
    initial_configuration,
    is_stable,
    layer_of,
    parent,
    stabilize,
    stabilize_with_plan,
)

__version__ = "0.1.0"
