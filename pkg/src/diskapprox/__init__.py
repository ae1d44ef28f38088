"""Weighted polynomial approximation on the disk plus an arc of the circle.

Measures have the form ``G(1 - |z|) dA + w dm``.  The modules cover the
radial moments, boundary weights and their sets, Poisson and Herglotz
integrals, witness families, Gram distances and annihilating tuples.
"""

from .approx import (MeasureSpec, TargetSpec, annihilator, bm_majorant, certificate, certificates, distance,
                     gram, predict_structure, splitting_profile)
from .errors import (BranchError, DiskApproxError, DomainError, EscalationExhausted, MajorizationFailure,
                     NotLogIntegrable, PrecisionUnreachable, ScenarioError, SelectionFailure,
                     StructuralError, UnsupportedProfile)
from .moments import (alpha_moment, alpha_table, envelope_k, fourier_w, moment_P, szego_mean,
                      verify_P_lower_bound)
from .poisson import herglotz_arc, outer_eval, poisson_integral, variation_sum_check
from .runner import run_scenario, sweep
from .scenario import bundled, load_scenario, parse_scenario
from .sets import Arc, CantorPart, CircleSet, FatCantorSpec, FULL_CIRCLE
from .weights import (BoundaryWeight, RadialWeight, carrier_and_residual, check_exp_dec,
                      check_loglog_int)
from .witness import build_fN, verify_conditions, vitali_select

__version__ = "0.1.0"
