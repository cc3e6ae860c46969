"""Distributed event-triggered distance-based formation control."""
from .controller import ARule, BroadcastTable, ControllerParams
from .engine import SimConfig, SimTrace, run
from .formation import FormationSpec, from_distances, from_target_placement
from .graph import Graph, from_edges
from .metrics import RunSummary, compare, formation_error, summarize

__all__ = [
    "ARule", "BroadcastTable", "ControllerParams", "FormationSpec", "Graph", "RunSummary",
    "SimConfig", "SimTrace", "compare", "formation_error", "from_distances", "from_edges",
    "from_target_placement", "run", "summarize",
]
