"""Exact quantale-valued behavioural distances.

Kantorovich-style liftings of distances to polynomial functors and to
the powerset/subdistribution monads, determinization through exchange
laws, fixpoint computation of behavioural distances, and checking of
up-to certificates that witness numeric upper bounds — all in exact
rational arithmetic.
"""

from .quantale import (BOOLEAN, EXT_PLUS, INF, UNIT_OPLUS, Quantale,
                       QuantaleError, get_quantale, lattice, residuation, tensor)
from .vgraph import (Carrier, FiniteMap, VGraph, carrier, direct_image,
                     graph_leq, is_vcat, metric_closure, reindex)
from .galois import (Grid, PredSet, alpha, extension_largest, extension_smallest,
                     gamma_enum)
from .functor import (ConstF, CoprodF, IdF, ProdF, build_lambda,
                      check_compositionality, const_atoms, const_values,
                      exception_functor, fmap, kantorovich_generic, lift_closed,
                      machine_functor, pow_functor, star)
from .monadlift import (FinSubset, SubDist, dirac, ev_monad, finsubset,
                        hausdorff_directed, kantorovich_lp, monad_ops, subdist)
from .simplex import LPProblem, LinearConstraint, simplex_solve
from .distlaw import DistLaw, apply_g_carriers, apply_zeta, determinize, law_suite
from .behaviour import (Certificate, CoalgebraModel, SparseDist, beh_apply,
                        certify, kleene_gfp, trace_lower_bound, u_exact,
                        witness_bound)
from .models import (certificate_from_json, load_model_file, model_from_json,
                     model_to_json)

__version__ = "0.1.0"
