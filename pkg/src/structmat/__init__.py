"""Structured-matrix computations with explicit input-precision plans.

Toeplitz, Hankel, Vandermonde and Cauchy matrix-vector products, Vandermonde
and Cauchy system solving, polynomial multiplication, division and multipoint
evaluation. Every operation takes a target output accuracy ``ell`` and checks
that its inputs are accurate enough for the working precision it plans.
"""

from .arith import (ComplexBox, RootBounds, aggregate_separation_lower_bound, box_add,
                    box_mul, box_neg, box_recip, box_sub, eval_lower_bound,
                    integer_aggregate_separation_exponent, root_magnitude_bounds, separations,
                    to_mpc)
from .errors import (BoundViolation, CoincidentNodes, DuplicateNodes, InsufficientInputAccuracy,
                     LeadingCoefficientTooSmall, NonPositiveDiscriminant, NonUnitDiagonal,
                     StructMatError, UnknownFormula, ZeroInBox, ZeroLeadingCoefficient)
from .interp_cauchy import (CauchySpec, InterpProblem, cauchy_solve, cauchy_vec_mul,
                            lagrange_interpolate, trummer, vandermonde_solve)
from .multipoint import (NodeSet, SubproductTree, build_tree, modular_reduce_many, mul_many,
                         multipoint_eval, sum_rational, vandermonde_vec_mul)
from .plan import GUARD_BITS, PrecisionPlan, plan_precision
from .poly import (ApproxPoly, fft_eval_unity, fft_interpolate_unity, poly_mul, poly_square_times,
                   scale_to_unit_disc, unscale)
from .toeplitz import (DivisionResult, HankelMatrix, ToeplitzMatrix, TriToeplitz,
                       hankel_vec_mul, poly_divide, quotient_remainder_norm_bounds,
                       toeplitz_vec_mul, tri_toeplitz_inverse)

__version__ = "0.1.0"
