"""Support functions, barrier cones and separation certificates for convex sets."""
__version__ = "0.1.0"

from .barrier import (BarrierClassification, SspVerdict, classify_barrier,  # noqa: E402
                      ssp_verdict)
from .catalog import (AffineFn, Catalog1D, Catalog1DLift, ConvexQuadratic,  # noqa: E402
                      Ex53Fn, NormFn, function_from_dict)
from .cones import ConeRep, polar, recession_cone  # noqa: E402
from .errors import (BarricadeError, ConvergenceError, DimensionError,  # noqa: E402
                     EmptySetError, InconclusiveError)
from .horizon import (ConditionReport, ExistenceReport, HorizonValue,  # noqa: E402
                      certify_and_solve, check_coercive, check_cond9, check_cond10,
                      horizon, horizon_zero_cone)
from .separation import (Hyperplane, SeparationOutcome, counterexample_pair,  # noqa: E402
                         distance, embedded_pairs, separate)
from .sets import (Ball, ConvexSet, Epigraph1D, HPolyhedron, SublevelSystem,  # noqa: E402
                   VSet, contains, dimension, is_bounded_rep, project, set_from_dict)
from .support import (SupportValue, in_barrier_cone, normalized_limsup_estimate,  # noqa: E402
                      support)

__all__ = [name for name in dir() if not name.startswith("_")]
