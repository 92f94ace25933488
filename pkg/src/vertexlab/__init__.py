"""vertexlab: exact computations with vertex algebras, pseudoderivations and deformed modules.

Everything is exact over the rationals.  The main entry points:

    scalars     truncated Laurent series with validity orders, Taylor jets
    va_core     vectors, modes, the vertex-algebra axioms and their checkers
    fock        the Heisenberg vertex algebra M(1) and its Fock modules
    lattice     the rank-one lattice vertex algebra V_L, L = Z alpha
    pseudo      pseudoderivations/endomorphisms, exp, Delta(h, z)
    deform      lifted and deformed module actions, module axioms, spectra
    cli         JSON run configurations and the ``vertexlab`` command
"""

from .errors import (CommutativityUnverified, ConfigError, CutoffExceeded, DeltaPreconditionViolated,
                     DeltaUnverified, JetOrderInsufficient, NonIntegralEigenvalue, NonIntegralExponent,
                     NotLocallyNilpotent, NotSemisimple, ParseError, UnknownSymbol, VertexLabError)
from .scalars import (INF, LaurentSeries, Q, TaylorJet, binomial_shift_term, first_mismatch, format_series,
                      ls_add, ls_derive, ls_mul, ls_shift_jet, ls_sum, series_inverse)
from .va_core import (AXIOMS, AxiomReport, SeriesVector, Vector, VertexAlgebra, Window, check_tensor_identity,
                      check_va_axioms, combine, d_hat, d_op, d_power, watch_truncation, y_ext_mode, y_mode,
                      yhat_mode)
from .fock import FockMonomial, HeisenbergParams, HeisenbergVertexAlgebra, fock_weight, heis_iterate_mode, heis_mode, partitions
from .lattice import LatticeMonomial, LatticeVertexAlgebra, lattice_vertex_mode, lattice_weight
from .pseudo import (DERIVATION, ENDOMORPHISM, PseudoMap, check_lie_hom, check_pseudo, compose, delta_build,
                     delta_exponent_map, delta_inverse_check, delta_preconditions, exp_unchecked, pd_bracket,
                     pd_commute_check, pd_exp, pd_extend_check, scalar_test_set, tensor_bracket, xfv_build)
from .deform import (DeformedModule, LiftedModule, ModuleAction, PlainModule, check_composition,
                     check_module_axioms, check_route_equality, deform_action, graded_spectrum, l0_matrix,
                     lift_module)
from .parsing import parse_scalar_expr, parse_vector_expr

__version__ = "0.1.0"
