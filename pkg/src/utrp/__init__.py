"""Realization probabilities, behavior nets and expected conformance for uncertain event data."""

from __future__ import annotations

from .behavior_net import (
    BehaviorNet,
    SimulationReport,
    assign_weights,
    behavior_net_for,
    construct_behavior_net,
    generative_sample,
    simulate,
    transition_name,
    weight_sums,
)
from .density import DensityPiece, PiecewiseDensity
from .errors import (
    CapExceeded,
    Deadlock,
    NotEnabled,
    NotNormalized,
    ParseError,
    TieError,
    Unalignable,
    UtrpError,
    ValidationError,
)
from .io import dump_log, loads_log, loads_net, parse_log, parse_net
from .model import (
    Certain,
    Determinate,
    Indeterminate,
    Point,
    StrongInterval,
    StrongSet,
    UncertainEvent,
    UncertainLog,
    UncertainTrace,
    WeakDensity,
    WeakDist,
    normalize_log,
    normalize_strong,
    normalize_trace,
)
from .partial_order import (
    BehaviorGraph,
    build_behavior_graph,
    enumerate_order_realizations,
    enumerate_realizations,
)
from .petri import (
    Alignment,
    ConformanceReport,
    PetriNet,
    expected_conformance,
    full_run_language,
    optimal_alignment,
    optimal_alignment_cost,
    summarize_conformance,
)
from .probability import (
    RealizationDistribution,
    activity_probability,
    order_probability,
    order_probability_integral,
    realization_distribution,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_") and name != "annotations"]
