"""Error types shared across the package.

Each carries a stable .name used verbatim in CLI diagnostics, so scripted
consumers can match on it.
"""


class DiagtelError(Exception):
    name = "Error"

    def __str__(self):
        base = super().__str__()
        return "%s: %s" % (self.name, base) if base else self.name


class NoMultiTaylorExpansion(DiagtelError):
    """Denominator vanishes at the origin: no multi-Taylor expansion."""
    name = "NoMultiTaylorExpansion"


class UnsupportedConstantTerm(DiagtelError):
    """Rational power of a base whose constant term is not 1."""
    name = "UnsupportedConstantTerm"


class NotFound(DiagtelError):
    """Guessing exhausted the (order, degree) search space."""
    name = "NotFound"


class InsufficientTerms(DiagtelError):
    """Too few series terms for any ansatz within bounds plus margin."""
    name = "InsufficientTerms"


class OriginNotPreserved(DiagtelError):
    """Birational map does not fix the origin; no series image."""
    name = "OriginNotPreserved"


class RationalCurve(DiagtelError):
    """Eliminated curve has genus 0: no j-invariant to report."""
    name = "RationalCurve"


class UnsupportedGenusShape(DiagtelError):
    """Curve shape outside the supported genus-1 reductions."""
    name = "UnsupportedGenusShape"


class ParseError(DiagtelError):
    name = "ParseError"
