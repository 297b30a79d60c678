"""Exact generalized-polynomial calculus, IP-set tools and torus recurrence checks."""

__version__ = "0.1.0"

from .scalar import ExactScalar, Interval, PrecisionError, ScalarError
from .gpexpr import (FiniteIndexSet, GPExpr, GPSyntaxError, degree, monomial, nearest,
                     parse, to_text)
from .gpeval import eval_int, evaluate, floor_int, frac, nearest_int
from .constraints import (BudgetExceeded, ConstraintSet, NotFound, c_enumerate,
                          c_intersect, c_membership, ip_intersection_witness)
from .sgp import SGPForm, UnsupportedPattern, to_sgp_normal
from .gpstruct import (ApproxParams, WeightVector, approx_check, derivative, equivalent,
                       good, good_set, leading_sum, m_threshold, nondegenerate,
                       pet_compare, proper_set, shifted_system, weight_vector)
from .ipsets import FSGenerators, FSSet, fs_enumerate
from .dynsim import BoxRegion, SystemDescriptor, orbit_point, return_set, rotation, skew
from ._kernels import BACKEND
