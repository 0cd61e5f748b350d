"""Probability spaces over instances: TI, BID and explicit PDBs."""
from .model import (BidPdb, ExplicitFamily, ExplicitPdb, Geometric,
                    InversePolynomial, ParametricFamily, SizeLawPdb,
                    SquareDecayPdb, Template, TiPdb, as_prob, bid_new, explicit_new, marginal,
                    schema_of_facts, ti_from_facts, ti_new)
from .moments import MomentBound, count_law, moment, moment_upper
from .radicals import (INDETERMINATE, PowProb, RadicalSum, compare, normalize)
from .worlds import (WORLD_GUARD, Comparison, Distribution,
                     condition_distribution, conditioned_worlds, distributions_equal,
                     enumerate_worlds, event_weight, pushforward, sample,
                     sample_many)

__all__ = [
    "BidPdb", "ExplicitFamily", "ExplicitPdb", "Geometric", "InversePolynomial",
    "ParametricFamily", "SizeLawPdb", "SquareDecayPdb", "Template", "TiPdb",
    "as_prob", "bid_new",
    "explicit_new", "marginal", "schema_of_facts", "ti_from_facts", "ti_new",
    "MomentBound", "count_law", "moment", "moment_upper", "INDETERMINATE",
    "PowProb", "RadicalSum", "compare", "normalize", "WORLD_GUARD", "Comparison",
    "Distribution", "condition_distribution", "conditioned_worlds", "distributions_equal",
    "enumerate_worlds", "event_weight", "pushforward", "sample", "sample_many",
]
