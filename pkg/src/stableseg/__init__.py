"""Exact analysis of stable market segmentations."""

from .chains import BlockingChain, ChainVariant, build_rv_chain, check_chain
from .constructions import (
    MerTrace,
    greedy_stable_segmentation,
    mer_segmentation,
    two_value_stable,
)
from .cooperative import (
    core_description,
    core_equals_stable_check,
    harsanyi_blocks,
    in_core,
    rv_blocks,
    stable_set_check,
    strong_blocks_some_equivalent,
)
from .errors import (
    CapExceeded,
    EmptyCoalition,
    EmptyCore,
    InvalidSegment,
    MalformedChain,
    NegativeMass,
    NotApplicable,
    NotBlocking,
    ParseError,
    PartitionError,
    PlanError,
    StableSegError,
    ValidationError,
    WrongArity,
)
from .market import Coalition, Market, max_revenue, optimal_prices, revenue
from .segmentation import (
    Segment,
    Segmentation,
    TransportPlan,
    average_consumer_surplus,
    blocks,
    canonicalize,
    consumer_surplus,
    objects_to,
    pareto_dominates,
    seller_revenue,
    surplus_profile,
    trivial_segmentation,
    weak_surplus_equivalent,
    weakly_blocks,
    weakly_objects_to,
)
from .stability import (
    failing_condition,
    inefficiency_witness,
    instability_witness,
    is_efficient,
    is_fragmentation_proof,
    is_saturated,
    is_stable,
    nonsaturation_witness,
)
