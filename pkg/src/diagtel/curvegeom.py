"""Elliptic curves behind diagonals of rational functions.

The diagonal of 1/Q in k variables is (away from apparent stuff) a period
of the fibration cut out by Q = 0 on the torus |x_1| = ... = |x_{k-1}| = r
with x_1 * ... * x_k = p.  Eliminating the last diagonal variable through
x_k = p / (x_1 ... x_{k-1}) turns the vanishing locus of Q into a plane
curve over Q(p); when that curve is (generically) elliptic its j-invariant,
as a rational function of p, pins down the pullback hidden inside the
telescoper of the diagonal.  This module performs the elimination and
computes j together with the Hauptmodul H = 1728/j.

Two routes are implemented:

* a ternary cubic is handled through its two fundamental invariants of
  degree 4 and 6 in the ten coefficients (frozen below as integer term
  lists; they were derived as the one-dimensional kernels of the
  infinitesimal sl_3 action on balanced coefficient monomials, and
  calibrated on y^2 z = x^3 + A x z^2 + B z^3 so that
  j = 6912 A^3 / (4 A^3 + 27 B^2));

* a curve quadratic in one variable is reduced to v^2 = q(u) with q the
  odd-multiplicity part of the discriminant of the fiber, and j is read
  off the classical degree-2 and degree-3 invariants of the binary
  quartic q.
"""

from fractions import Fraction
from math import gcd, lcm

from .errors import RationalCurve, UnsupportedGenusShape
from .kernel import Poly, RatFunc, format_poly, odd_multiplicity_part, poly_gcd

# Coefficient slots of a ternary cubic sum(c[i] * x^a y^b z^c), in the
# order the invariant term lists below refer to them.
_CUBIC_EXPS = (
    (3, 0, 0), (2, 1, 0), (2, 0, 1), (1, 2, 0), (1, 1, 1),
    (1, 0, 2), (0, 3, 0), (0, 2, 1), (0, 1, 2), (0, 0, 3),
)

# Degree-4 invariant: 25 terms, each a multiset of slot indices with an
# integer coefficient.  On the Weierstrass family above it evaluates to
# -48 A, whence the scale below.
_S_TERMS = (
    ((0, 3, 7, 9), 144), ((0, 3, 8, 8), -48), ((0, 4, 6, 9), -216),
    ((0, 4, 7, 8), 24), ((0, 5, 6, 8), 144), ((0, 5, 7, 7), -48),
    ((1, 1, 7, 9), -48), ((1, 1, 8, 8), 16), ((1, 2, 6, 9), 144),
    ((1, 2, 7, 8), -16), ((1, 3, 4, 9), 24), ((1, 3, 5, 8), -16),
    ((1, 4, 4, 8), -8), ((1, 4, 5, 7), 24), ((1, 5, 5, 6), -48),
    ((2, 2, 6, 8), -48), ((2, 2, 7, 7), 16), ((2, 3, 3, 9), -48),
    ((2, 3, 4, 8), 24), ((2, 3, 5, 7), -16), ((2, 4, 4, 7), -8),
    ((2, 4, 5, 6), 24), ((3, 3, 5, 5), 16), ((3, 4, 4, 5), -8),
    ((4, 4, 4, 4), 1),
)
_S_SCALE = -48

# Degree-6 invariant: 103 terms; evaluates to -864 B on the same family.
_T_TERMS = (
    ((0, 0, 6, 6, 9, 9), 5832), ((0, 0, 6, 7, 8, 9), -3888), ((0, 0, 6, 8, 8, 8), 864),
    ((0, 0, 7, 7, 7, 9), 864), ((0, 0, 7, 7, 8, 8), -216), ((0, 1, 3, 6, 9, 9), -3888),
    ((0, 1, 3, 7, 8, 9), 1296), ((0, 1, 3, 8, 8, 8), -288), ((0, 1, 4, 6, 8, 9), 1296),
    ((0, 1, 4, 7, 7, 9), -864), ((0, 1, 4, 7, 8, 8), 144), ((0, 1, 5, 6, 7, 9), 1296),
    ((0, 1, 5, 6, 8, 8), -864), ((0, 1, 5, 7, 7, 8), 144), ((0, 2, 3, 6, 8, 9), 1296),
    ((0, 2, 3, 7, 7, 9), -864), ((0, 2, 3, 7, 8, 8), 144), ((0, 2, 4, 6, 7, 9), 1296),
    ((0, 2, 4, 6, 8, 8), -864), ((0, 2, 4, 7, 7, 8), 144), ((0, 2, 5, 6, 6, 9), -3888),
    ((0, 2, 5, 6, 7, 8), 1296), ((0, 2, 5, 7, 7, 7), -288), ((0, 3, 3, 3, 9, 9), 864),
    ((0, 3, 3, 4, 8, 9), -864), ((0, 3, 3, 5, 7, 9), -864), ((0, 3, 3, 5, 8, 8), 576),
    ((0, 3, 4, 4, 7, 9), 648), ((0, 3, 4, 4, 8, 8), 72), ((0, 3, 4, 5, 6, 9), 1296),
    ((0, 3, 4, 5, 7, 8), -720), ((0, 3, 5, 5, 6, 8), -864), ((0, 3, 5, 5, 7, 7), 576),
    ((0, 4, 4, 4, 6, 9), -540), ((0, 4, 4, 4, 7, 8), -36), ((0, 4, 4, 5, 6, 8), 648),
    ((0, 4, 4, 5, 7, 7), 72), ((0, 4, 5, 5, 6, 7), -864), ((0, 5, 5, 5, 6, 6), 864),
    ((1, 1, 1, 6, 9, 9), 864), ((1, 1, 1, 7, 8, 9), -288), ((1, 1, 1, 8, 8, 8), 64),
    ((1, 1, 2, 6, 8, 9), -864), ((1, 1, 2, 7, 7, 9), 576), ((1, 1, 2, 7, 8, 8), -96),
    ((1, 1, 3, 3, 9, 9), -216), ((1, 1, 3, 4, 8, 9), 144), ((1, 1, 3, 5, 7, 9), 144),
    ((1, 1, 3, 5, 8, 8), -96), ((1, 1, 4, 4, 7, 9), 72), ((1, 1, 4, 4, 8, 8), -48),
    ((1, 1, 4, 5, 6, 9), -864), ((1, 1, 4, 5, 7, 8), 144), ((1, 1, 5, 5, 6, 8), 576),
    ((1, 1, 5, 5, 7, 7), -216), ((1, 2, 2, 6, 7, 9), -864), ((1, 2, 2, 6, 8, 8), 576),
    ((1, 2, 2, 7, 7, 8), -96), ((1, 2, 3, 3, 8, 9), 144), ((1, 2, 3, 4, 7, 9), -720),
    ((1, 2, 3, 4, 8, 8), 144), ((1, 2, 3, 5, 6, 9), 1296), ((1, 2, 3, 5, 7, 8), -48),
    ((1, 2, 4, 4, 6, 9), 648), ((1, 2, 4, 4, 7, 8), -24), ((1, 2, 4, 5, 6, 8), -720),
    ((1, 2, 4, 5, 7, 7), 144), ((1, 2, 5, 5, 6, 7), 144), ((1, 3, 3, 4, 5, 9), 144),
    ((1, 3, 3, 5, 5, 8), -96), ((1, 3, 4, 4, 4, 9), -36), ((1, 3, 4, 4, 5, 8), -24),
    ((1, 3, 4, 5, 5, 7), 144), ((1, 3, 5, 5, 5, 6), -288), ((1, 4, 4, 4, 4, 8), 12),
    ((1, 4, 4, 4, 5, 7), -36), ((1, 4, 4, 5, 5, 6), 72), ((2, 2, 2, 6, 6, 9), 864),
    ((2, 2, 2, 6, 7, 8), -288), ((2, 2, 2, 7, 7, 7), 64), ((2, 2, 3, 3, 7, 9), 576),
    ((2, 2, 3, 3, 8, 8), -216), ((2, 2, 3, 4, 6, 9), -864), ((2, 2, 3, 4, 7, 8), 144),
    ((2, 2, 3, 5, 6, 8), 144), ((2, 2, 3, 5, 7, 7), -96), ((2, 2, 4, 4, 6, 8), 72),
    ((2, 2, 4, 4, 7, 7), -48), ((2, 2, 4, 5, 6, 7), 144), ((2, 2, 5, 5, 6, 6), -216),
    ((2, 3, 3, 3, 5, 9), -288), ((2, 3, 3, 4, 4, 9), 72), ((2, 3, 3, 4, 5, 8), 144),
    ((2, 3, 3, 5, 5, 7), -96), ((2, 3, 4, 4, 4, 8), -36), ((2, 3, 4, 4, 5, 7), -24),
    ((2, 3, 4, 5, 5, 6), 144), ((2, 4, 4, 4, 4, 7), 12), ((2, 4, 4, 4, 5, 6), -36),
    ((3, 3, 3, 5, 5, 5), 64), ((3, 3, 4, 4, 5, 5), -48), ((3, 4, 4, 4, 4, 5), 12),
    ((4, 4, 4, 4, 4, 4), -1),
)
_T_SCALE = -864


class PlaneCurveQP:
    """A plane curve over Q(p): dict {(i, j): Poly in p} -> coeff of u^i v^j.

    Produced by eliminate_diag_curve; the defining polynomial is
    content-reduced (no common Q(p)-factor across coefficients, integer
    content 1, deterministic sign).  `names` records which original
    variables survived as the plane coordinates (u, v).
    """

    def __init__(self, coeffs, names, pvar="p"):
        self.d = {e: c for e, c in coeffs.items() if c.degree() >= 0}
        if not self.d:
            raise ValueError("zero defining polynomial")
        self.names = tuple(names)
        self.pvar = pvar

    def degree(self, i):
        return max((e[i] for e in self.d), default=0)

    def total_degree(self):
        return max(e[0] + e[1] for e in self.d)

    @property
    def degenerate(self):
        """True when the curve does not actually involve u or v."""
        return self.total_degree() == 0

    def fiber_coeffs(self, var):
        """Collect Polys-in-the-other-variable over Q(p), keyed by the
        power of variable `var`:  {k: Poly in u_other}."""
        other = 1 - var
        out = {}
        for e, cp in self.d.items():
            out.setdefault(e[var], {})[e[other]] = RatFunc(cp, None, self.pvar)
        zero = RatFunc.const(0, self.pvar)
        return {
            k: Poly([d.get(i, zero) for i in range(max(d) + 1)])
            for k, d in out.items()
        }

    def __repr__(self):
        u, v = (self.names + ("v",))[:2]
        parts = []
        for e in sorted(self.d):
            mono = "".join(
                "" if e[i] == 0 else (nm if e[i] == 1 else "%s^%d" % (nm, e[i]))
                for i, nm in ((0, u), (1, v))
            )
            c = format_poly(self.d[e], self.pvar)
            parts.append(("(%s)%s" % (c, mono)) if mono else "(%s)" % c)
        return " + ".join(parts)


class HauptResult:
    """j-invariant and Hauptmodul H = 1728/j of the eliminated curve,
    both reduced rational functions of p; route is "cubic" or
    "quadratic-fiber" according to which reduction produced them."""

    def __init__(self, j, H, route):
        assert j * H == 1728
        self.j = j
        self.H = H
        self.route = route

    def __repr__(self):
        return "HauptResult(route=%s, H=%s)" % (self.route, self.H)


def eliminate_diag_curve(Q, diag_vars=None, pvar="p"):
    """Substitute x_{k-1} = p / (x_0 ... x_{k-2}) into Q and clear to a
    polynomial plane curve over Q(p).

    `diag_vars` is the number k of leading slots of Q that carry the
    diagonal; remaining slots (an algebraic fiber variable, e.g. the z of
    z^2 = 1 - x - y) ride along untouched.  Default: through the last
    slot Q actually uses.  The surviving variables -- the first k-1
    diagonal ones plus any used fiber slots -- must number at most two.
    """
    n = Q.n
    used = [i for i in range(n) if Q.degree(i) > 0]
    if not used:
        raise ValueError("constant denominator has no curve attached")
    k = (used[-1] + 1) if diag_vars is None else diag_vars
    if not 2 <= k <= n:
        raise ValueError("need at least two diagonal variables inside %d slots" % n)
    elim = k - 1
    m = Q.degree(elim)
    if m == 0:
        raise ValueError("denominator does not involve the eliminated variable")

    keep = [i for i in range(elim)] + [i for i in range(k, n) if Q.degree(i) > 0]
    if len(keep) > 2:
        raise UnsupportedGenusShape(
            "elimination leaves %d variables, not a plane curve" % len(keep)
        )
    names = tuple("xyzu"[i] for i in keep)

    # x_elim^e contributes p^e / (x_0...x_{elim-1})^e; clearing the product
    # to the power m shifts every leading exponent by m - e.
    acc = {}
    for exps, c in Q.d.items():
        e = exps[elim]
        new = []
        for i in keep:
            new.append(exps[i] + (m - e) if i < elim else exps[i])
        key = tuple(new) if len(new) == 2 else (new[0], 0) if new else (0, 0)
        acc.setdefault(key, {})[e] = acc.setdefault(key, {}).get(e, 0) + c
    coeffs = {}
    for key, byp in acc.items():
        top = max(byp)
        cp = Poly.of(*(byp.get(i, 0) for i in range(top + 1)))
        if cp.degree() >= 0:
            coeffs[key] = cp
    if not coeffs:
        raise ValueError("denominator cleared to zero")

    # strip common Q(p)-content, then integer content, then fix the sign
    # at the lexicographically least surviving monomial
    g = None
    for cp in coeffs.values():
        g = cp if g is None else poly_gcd(g, cp)
    if g.degree() > 0:
        coeffs = {key: cp.divmod(g)[0] for key, cp in coeffs.items()}
    den = lcm(*(c.denominator for cp in coeffs.values() for c in cp.c))
    num = gcd(*(abs(c.numerator) for cp in coeffs.values() for c in cp.c))
    scale = Fraction(den, num or 1)
    lead = coeffs[min(coeffs)]
    if lead.lc() * scale < 0:
        scale = -scale
    coeffs = {key: cp.map(lambda c: c * scale) for key, cp in coeffs.items()}
    return PlaneCurveQP(coeffs, (names + ("v",))[:2], pvar)


def _eval_invariant(terms, coeffs, zero):
    total = zero
    for multiset, c in terms:
        t = zero + c
        for slot in multiset:
            t = t * coeffs[slot]
        total = total + t
    return total


def j_from_cubic(curve):
    """j of a smooth plane cubic over Q(p), through the degree-4/6
    invariants of its homogenization."""
    if curve.total_degree() != 3:
        raise ValueError("curve has total degree %d, not 3" % curve.total_degree())
    zero = RatFunc.const(0, curve.pvar)
    coeffs = [zero] * 10
    for e, cp in curve.d.items():
        slot = _CUBIC_EXPS.index((e[0], e[1], 3 - e[0] - e[1]))
        coeffs[slot] = RatFunc(cp, None, curve.pvar)
    S = _eval_invariant(_S_TERMS, coeffs, zero) / _S_SCALE
    T = _eval_invariant(_T_TERMS, coeffs, zero) / _T_SCALE
    disc = 4 * S ** 3 + 27 * T ** 2
    if disc.is_zero():
        raise RationalCurve("cubic is singular for every p")
    j = 6912 * S ** 3 / disc
    return HauptResult(j, 1728 / j, "cubic")


def j_from_quadratic_fiber(curve, fiber_var=1):
    """j of a curve quadratic in one plane variable, via v^2 = q(u) with
    q the odd-multiplicity part of the fiber discriminant."""
    if curve.degree(fiber_var) != 2:
        raise ValueError(
            "degree in %s is %d, need 2"
            % (curve.names[fiber_var], curve.degree(fiber_var))
        )
    f = curve.fiber_coeffs(fiber_var)
    uvar = curve.names[1 - fiber_var]
    zero = Poly()
    A, B, C = f.get(2, zero), f.get(1, zero), f.get(0, zero)
    disc = B * B - 4 * A * C
    q = odd_multiplicity_part(disc)
    dq = q.degree()
    if dq <= 2:
        raise RationalCurve(
            "discriminant reduces to degree %d in %s: genus 0" % (dq, uvar)
        )
    if dq > 4:
        raise UnsupportedGenusShape(
            "discriminant reduces to degree %d in %s" % (dq, uvar)
        )
    a0, a1, a2, a3, a4 = q[4], q[3], q[2], q[1], q[0]
    I = 12 * a0 * a4 - 3 * a1 * a3 + a2 * a2
    J = (72 * a0 * a2 * a4 - 27 * a0 * a3 * a3 - 27 * a1 * a1 * a4
         + 9 * a1 * a2 * a3 - 2 * a2 ** 3)
    disc4 = 4 * I ** 3 - J * J
    if disc4.is_zero():
        raise RationalCurve("quartic has vanishing discriminant for every p")
    j = 6912 * I ** 3 / disc4
    return HauptResult(j, 1728 / j, "quadratic-fiber")


def hauptmodul_of_denominator(Q, diag_vars=None, pvar="p"):
    """Eliminate, classify, and compute j and H for the curve attached to
    the denominator Q.  Raises RationalCurve on genus-0 shapes and
    UnsupportedGenusShape when no implemented route applies."""
    curve = eliminate_diag_curve(Q, diag_vars, pvar)
    if curve.degenerate:
        raise UnsupportedGenusShape("eliminated curve does not involve the plane variables")
    if len([i for i in (0, 1) if curve.degree(i) > 0]) < 2:
        raise RationalCurve("eliminated curve involves a single variable: genus 0")
    if curve.total_degree() <= 2:
        raise RationalCurve("eliminated curve is a line or conic: genus 0")
    if curve.total_degree() == 3:
        return j_from_cubic(curve)
    for v in (1, 0):
        if curve.degree(v) == 2:
            return j_from_quadratic_fiber(curve, v)
    raise UnsupportedGenusShape(
        "no route for degrees (%d, %d), total %d"
        % (curve.degree(0), curve.degree(1), curve.total_degree())
    )
