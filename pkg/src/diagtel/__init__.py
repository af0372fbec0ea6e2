"""Exact diagonals of rational functions, telescoper guessing, and the
operator algebra around them: adjoints, LCLM/GCRD, exterior squares,
intertwiners, Frobenius bases, plus birational changes of variables and
the elliptic-curve Hauptmodul attached to a diagonal's denominator.

All arithmetic is exact (Fraction coefficients); series are truncated,
never floating-point.
"""

from .errors import (DiagtelError, InsufficientTerms, NoMultiTaylorExpansion,
                     NotFound, OriginNotPreserved, ParseError, RationalCurve,
                     UnsupportedConstantTerm, UnsupportedGenusShape)
from .kernel import MPoly, Poly, RatFunc
from .series import (TruncSeries, UniSeries, diag_rational, expand_power,
                     expand_rational)
from .ode import (DiffOp, RatOp, analytic_solutions, apply, exterior_square,
                  find_intertwiner, gcrd, indicial, is_mum, lclm, multiply,
                  rational_solutions, right_divide, selfdual_report)
from .guess import GuessConfig, guess_and_certify, guess_ode
from .special import (HeunSpec, PFQSpec, algebraic_root_series, heun_operator,
                      heun_series, pfq_series, pullbacked_2f1)
from .birat import (CollineationLift, HadamardLift, Monomial, TriangularScale,
                    apply_to_rational, apply_to_series, compose,
                    invariance_report, invert, preserves_product)
from .curvegeom import (HauptResult, eliminate_diag_curve,
                        hauptmodul_of_denominator, j_from_cubic,
                        j_from_quadratic_fiber)

__version__ = "0.1.0"

__all__ = [
    "DiagtelError", "InsufficientTerms", "NoMultiTaylorExpansion", "NotFound",
    "OriginNotPreserved", "ParseError", "RationalCurve",
    "UnsupportedConstantTerm", "UnsupportedGenusShape",
    "MPoly", "Poly", "RatFunc",
    "TruncSeries", "UniSeries", "diag_rational", "expand_power",
    "expand_rational",
    "DiffOp", "RatOp", "analytic_solutions", "apply", "exterior_square",
    "find_intertwiner", "gcrd", "indicial", "is_mum", "lclm", "multiply",
    "rational_solutions", "right_divide", "selfdual_report",
    "GuessConfig", "guess_and_certify", "guess_ode",
    "HeunSpec", "PFQSpec", "algebraic_root_series", "heun_operator",
    "heun_series", "pfq_series", "pullbacked_2f1",
    "CollineationLift", "HadamardLift", "Monomial", "TriangularScale",
    "apply_to_rational", "apply_to_series", "compose", "invariance_report",
    "invert", "preserves_product",
    "HauptResult", "eliminate_diag_curve", "hauptmodul_of_denominator",
    "j_from_cubic", "j_from_quadratic_fiber",
    "__version__",
]
