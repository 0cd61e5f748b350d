"""Bounds, witnesses and graph constructions."""
from .bounds import (BoundReport, MomentCheck, MomentRow,
                     disjoint_inequality_table, finite_moments_report,
                     image_moment_upper, moment_inequality_check,
                     view_prob_bound)
from .graphs import (EdgeGraphSpec, edge_graph_cq_rep, edge_graph_ti,
                     edge_graph_ucq_rep)
from .witnesses import Witness, max_world_check, mutual_exclusive_witness

__all__ = [
    "BoundReport", "MomentCheck", "MomentRow", "disjoint_inequality_table",
    "finite_moments_report", "image_moment_upper", "moment_inequality_check",
    "view_prob_bound", "EdgeGraphSpec", "edge_graph_cq_rep", "edge_graph_ti",
    "edge_graph_ucq_rep", "Witness", "max_world_check", "mutual_exclusive_witness",
]
