"""Numerical instruments for rotation numbers of circle-diffeomorphism
families f_t = R_t o f built from trigonometric-polynomial lifts.

The package measures what the rotation number does along a one-parameter
family: certified Farey enclosures and Birkhoff estimates, mode-locking
plateaus and the devil's staircase, difference-quotient floors from
distortion control, first-return combinatorics certificates, conjugacies to
rigid rotations, and parameter-window measures.  The cli module exposes all
of it as the `rotascope` command; verify.run_suite runs the acceptance
checks.
"""

from .circle_map import (DistortionConstants, FamilyPoint, LiftDescriptor,
                         OrbitSegment, distortion_constants, eval_lift,
                         iterate)
from .cont_frac import (GOLDEN_MEAN, SQRT2_MINUS_1, ContinuedFraction,
                        cf_from_quotients, circle_distance, closest_returns,
                        continued_fraction, convergent_test, golden_mean_cf,
                        sqrt2_minus1_cf)
from .denjoy import (DistortionRatio, DynInterval, HatChainRecord,
                     ReturnPartition, distortion_ratio_check,
                     hat_ell_bound_check, return_partition)
from .derivative_probe import (BlowupProbe, QuotientRecord,
                               quotient_sequence, rational_boundary_probe)
from .errors import (BoundViolation, CapExceeded, CombinatoricsViolation,
                     DegenerateInput, DomainError, NonConvergence,
                     OrderMismatch, PreconditionFailed, QCapExceeded,
                     RangeError, RotascopeError, Unresolvable)
from .measure_conj import (BrunovskyRecord, ConjugacyEstimate,
                           ConjugatedRotationPath, InvariantAverage,
                           ReparamPath, RotationPath, birkhoff_average,
                           brunovsky_check, conjugacy_from_orbit,
                           derivative_via_conjugacy)
from .rotation import (RotationEstimate, compare_rotation_to,
                       discrepancy_extrema, rotation_birkhoff, rotation_farey)
from .staircase import (JdMeasurement, Plateau, StaircaseSweep, inverse_rho,
                        measure_Jd, plateau_endpoints, sweep)
from .verify import (BUDGETS, CHECK_IDS, CheckResult, SuiteContext,
                     VerifyReport, run_suite)

__version__ = "0.1.0"

__all__ = [
    "BUDGETS", "BlowupProbe", "BoundViolation", "BrunovskyRecord",
    "CHECK_IDS", "CapExceeded", "CheckResult", "CombinatoricsViolation",
    "ConjugacyEstimate", "ConjugatedRotationPath", "ContinuedFraction",
    "DegenerateInput", "DistortionConstants", "DistortionRatio",
    "DomainError", "DynInterval", "FamilyPoint", "GOLDEN_MEAN",
    "HatChainRecord", "InvariantAverage", "JdMeasurement", "LiftDescriptor",
    "NonConvergence", "OrbitSegment", "OrderMismatch", "Plateau",
    "PreconditionFailed", "QCapExceeded", "QuotientRecord", "RangeError",
    "ReparamPath", "ReturnPartition", "RotascopeError", "RotationEstimate",
    "RotationPath", "SQRT2_MINUS_1", "StaircaseSweep", "SuiteContext",
    "Unresolvable", "VerifyReport", "birkhoff_average", "brunovsky_check",
    "cf_from_quotients", "circle_distance", "closest_returns",
    "compare_rotation_to", "conjugacy_from_orbit", "continued_fraction",
    "convergent_test", "derivative_via_conjugacy", "discrepancy_extrema",
    "distortion_constants", "distortion_ratio_check", "eval_lift",
    "golden_mean_cf", "hat_ell_bound_check", "inverse_rho", "iterate",
    "measure_Jd", "plateau_endpoints", "quotient_sequence",
    "rational_boundary_probe", "return_partition", "rotation_birkhoff",
    "rotation_farey", "run_suite", "sqrt2_minus1_cf", "sweep",
]
