"""Compilers producing representations (TI base, optional condition, view)."""
from .assign import (DivergentAssignment, assign_divergent_probs,
                     assign_representable_probs, representable_term_identity,
                     representable_weight, subsequence_mass)
from .bid import (BidBlockReport, BidCompilationReport, bid_q, compile_bid,
                  compile_bid_to_ti)
from .conditioning import (ConditionEliminationReport, characterize,
                           eliminate_condition, eliminate_condition_rep)
from .representation import (Representation, compose_views,
                             representation_law, source_law,
                             verify_representation)
from .segmentation import (DaggerResult, SegmentationReport, SegmentEntry,
                           dagger_check, dagger_compile, segment_product)
from .sjfcq import monotone_to_sjfcq

__all__ = [
    "DivergentAssignment", "assign_divergent_probs", "assign_representable_probs",
    "representable_term_identity", "representable_weight", "subsequence_mass",
    "BidBlockReport", "BidCompilationReport", "bid_q", "compile_bid", "compile_bid_to_ti",
    "ConditionEliminationReport", "characterize", "eliminate_condition",
    "eliminate_condition_rep", "Representation", "compose_views", "representation_law",
    "source_law", "verify_representation", "DaggerResult", "SegmentationReport",
    "SegmentEntry", "dagger_check", "dagger_compile", "segment_product", "monotone_to_sjfcq",
]
