"""Recover a linear ODE from a truncated series by exact linear algebra.

The ansatz is the theta-form sum_m x^m p_m(theta) with deg_theta p_m <= r:
its action on sum c_j x^j is diagonal in j,

    out[j] = sum_m p_m(j - m) c_{j-m},

so every supplied coefficient gives one exact linear equation in the
(r+1)(m+1) unknown p-coefficients and no truncation slop enters.  We solve
on all but the last `verification_margin` equations and accept a candidate
only if the whole nullspace also satisfies the held-out ones.
"""

from fractions import Fraction

from .errors import InsufficientTerms, NotFound
from .kernel import Poly, nullspace
from .ode import DiffOp
from .series import diag_rational, expand_rational


class GuessConfig:
    """Search bounds; the defaults match the command-line defaults."""

    def __init__(self, max_order=6, max_coeff_degree=8,
                 verification_margin=10, search_order="balanced"):
        if max_order < 1:
            raise ValueError("max_order must be >= 1")
        if verification_margin < 1:
            raise ValueError("verification_margin must be >= 1")
        self.max_order = max_order
        self.max_coeff_degree = max_coeff_degree
        self.verification_margin = verification_margin
        self.search_order = search_order

    def pairs(self):
        """(order, degree) pairs in the configured enumeration order."""
        R, M = self.max_order, self.max_coeff_degree
        if self.search_order == "order-major":
            for r in range(1, R + 1):
                for m in range(M + 1):
                    yield r, m
            return
        if self.search_order != "balanced":
            raise ValueError("unknown search order %r" % (self.search_order,))
        # ascending order+degree, ties by ascending order: minimal-order
        # operators win and theta-structured ones stay canonical
        for total in range(1, R + M + 1):
            for r in range(1, min(total, R) + 1):
                m = total - r
                if m <= M:
                    yield r, m


class GuessedOperator:
    def __init__(self, operator, order, coeff_degree, terms_used,
                 terms_verified):
        self.operator = operator
        self.order = order
        self.coeff_degree = coeff_degree
        self.terms_used = terms_used
        self.terms_verified = terms_verified

    def __repr__(self):
        return "GuessedOperator(order=%d, degree=%d, terms=%d)" % (
            self.order, self.coeff_degree, self.terms_used)


def _ansatz_row(coeffs, j, r, m):
    """Equation for series index j: unknowns ordered (m, theta-power)."""
    row = [Fraction(0)] * ((r + 1) * (m + 1))
    for mm in range(min(j, m) + 1):
        cd = coeffs[j - mm]
        if not cd:
            continue
        d = j - mm
        base = mm * (r + 1)
        pw = Fraction(1)
        for k in range(r + 1):
            row[base + k] = cd * pw
            pw = pw * d
    return row


def guess_ode(s, cfg=None):
    """Minimal verified annihilator of the series, or None.

    None (no operator within bounds survives held-out verification) is a
    normal outcome; InsufficientTerms means no (order, degree) pair could
    even be attempted with the supplied coefficients.
    """
    cfg = cfg or GuessConfig()
    coeffs = list(s.c)
    navail = len(coeffs)
    margin = cfg.verification_margin
    attempted = False
    for r, m in cfg.pairs():
        unknowns = (r + 1) * (m + 1)
        if navail < unknowns + margin:
            continue
        attempted = True
        # solve on just enough equations; everything else (always at least
        # the margin) is held out for verification
        split = min(navail - margin, unknowns + margin)
        rows = [_ansatz_row(coeffs, j, r, m) for j in range(split)]
        basis = nullspace(rows, unknowns)
        if not basis:
            continue
        held = [_ansatz_row(coeffs, j, r, m) for j in range(split, navail)]
        if not all(sum(a * v for a, v in zip(row, vec)) == 0
                   for vec in basis for row in held):
            continue
        vec = basis[0]
        pms = [Poly(vec[mm * (r + 1): (mm + 1) * (r + 1)])
               for mm in range(m + 1)]
        op = DiffOp.from_theta_form(pms)
        if op.is_zero():
            continue
        # soundness is asserted, never assumed
        assert op.annihilates(s), "verified candidate fails full annihilation"
        return GuessedOperator(op, op.order(),
                               max(p.degree() for p in op.coeffs),
                               navail, margin)
    if not attempted:
        raise InsufficientTerms(
            "need at least %d coefficients for the smallest search pair"
            % (2 + margin,))
    return None


def guess_and_certify(P, Q, cfg, N):
    """expand_rational -> diagonal -> guess, then re-verify the operator
    against a fresh expansion with N increased by the margin."""
    cfg = cfg or GuessConfig()
    s = diag_rational(P, Q, N)
    g = guess_ode(s, cfg)
    if g is None:
        raise NotFound("no annihilator within the configured bounds")
    longer = diag_rational(P, Q, N + cfg.verification_margin)
    if not g.operator.annihilates(longer):
        raise NotFound("guessed operator fails on the extended expansion")
    g.terms_verified += cfg.verification_margin
    return g
