"""Exact series generators: pFq, HeunG, pullbacked 2F1, algebraic roots.

These are the verification oracles the rest of the package is checked
against, so everything here is deliberately close to the defining
recurrences and nothing is shared with the guessing/operator code paths.
"""

from fractions import Fraction

from .kernel import MPoly, Poly, RatFunc, to_fraction
from .series import UniSeries


class PFQSpec:
    """Generalized hypergeometric pFq(upper; lower; c x^k)."""

    def __init__(self, upper, lower, scale=1, power=1):
        self.upper = [to_fraction(a) for a in upper]
        self.lower = [to_fraction(b) for b in lower]
        for b in self.lower:
            if b.denominator == 1 and b <= 0:
                raise ValueError(
                    "lower parameter %s is a non-positive integer" % (b,))
        self.scale = to_fraction(scale)
        self.power = int(power)
        if self.power < 1:
            raise ValueError("argument power must be positive")

    def __repr__(self):
        return "PFQSpec(%s; %s; %s*x^%d)" % (
            self.upper, self.lower, self.scale, self.power)


class HeunSpec:
    """HeunG(a, q, alpha, beta, gamma, delta; c x^k)."""

    def __init__(self, a, q, alpha, beta, gamma, delta, scale=1, power=1):
        self.a = to_fraction(a)
        self.q = to_fraction(q)
        self.alpha = to_fraction(alpha)
        self.beta = to_fraction(beta)
        self.gamma = to_fraction(gamma)
        self.delta = to_fraction(delta)
        if self.gamma.denominator == 1 and self.gamma <= 0:
            raise ValueError("gamma must not be a non-positive integer")
        self.scale = to_fraction(scale)
        self.power = int(power)


def pfq_series(spec, N):
    """Sum of prod(upper)_m / prod(lower)_m / m! * (c x^k)^m through x^N."""
    k = spec.power
    out = [Fraction(0)] * (N + 1)
    t = Fraction(1)
    m = 0
    while m * k <= N:
        out[m * k] = t
        num = Fraction(1)
        for a in spec.upper:
            num *= a + m
        den = Fraction(m + 1)
        for b in spec.lower:
            den *= b + m
        t = t * num / den * spec.scale
        m += 1
    return UniSeries(out, N, "x")


def heun_series(spec, N):
    """Local HeunG solution at 0, HeunG(...; 0) = 1, from the three-term
    recurrence

      a (j+1)(j+gamma) c_{j+1}
        = { j [ (j-1+gamma)(1+a) + a delta + eps ] + q } c_j
          - (j-1+alpha)(j-1+beta) c_{j-1},

    with eps = alpha+beta+1-gamma-delta, then substituted into c x^k.
    """
    a, q = spec.a, spec.q
    al, be, ga, de = spec.alpha, spec.beta, spec.gamma, spec.delta
    eps = al + be + 1 - ga - de
    if not a:
        raise ValueError("HeunG singular-point parameter a must be nonzero")
    n_inner = N // spec.power
    c = [Fraction(1)]
    for j in range(n_inner):
        rhs = (j * ((j - 1 + ga) * (1 + a) + a * de + eps) + q) * c[j]
        if j >= 1:
            rhs -= (j - 1 + al) * (j - 1 + be) * c[j - 1]
        c.append(rhs / (a * (j + 1) * (j + ga)))
    out = [Fraction(0)] * (N + 1)
    pw = Fraction(1)
    for j, cj in enumerate(c):
        if j * spec.power > N:
            break
        out[j * spec.power] = cj * pw
        pw *= spec.scale
    return UniSeries(out, N, "x")


def heun_operator(spec):
    """The HeunG differential operator (in the plain argument x, ignoring
    scale/power): x(x-1)(x-a) D^2 + [gamma(x-1)(x-a) + delta x(x-a)
    + eps x(x-1)] D + (alpha beta x - q)."""
    from .ode import DiffOp
    a = spec.a
    al, be, ga, de = spec.alpha, spec.beta, spec.gamma, spec.delta
    eps = al + be + 1 - ga - de
    x = Poly.x()
    one = Poly.of(1)
    a2 = x * (x - one) * (x - Poly.of(a))
    a1 = (x - one) * (x - Poly.of(a)) * ga + x * (x - Poly.of(a)) * de \
        + x * (x - one) * eps
    a0 = Poly.of(-spec.q, al * be)
    return DiffOp([a0, a1, a2], normalize=False)


def ratfunc_series(f, N):
    """Taylor series of a rational function regular at 0."""
    num = UniSeries([f.num[i] for i in range(N + 1)], N, f.var)
    if not f.den.eval(Fraction(0)):
        raise ValueError("rational function has a pole at 0")
    den = UniSeries([f.den[i] for i in range(N + 1)], N, f.var)
    return num * den.reciprocal()


def pullbacked_2f1(prefactor, spec, pullback, N):
    """prefactor_base^exponent * 2F1(spec)(pullback), exact through x^N.

    prefactor: (base: RatFunc, exponent: Rational); base(0) = 1.
    pullback: RatFunc with pullback(0) = 0.
    """
    base, exponent = prefactor
    base_ser = ratfunc_series(base, N) if isinstance(base, RatFunc) \
        else base.truncate(N)
    if base_ser.c[0] != 1:
        raise ValueError("prefactor base must have constant term 1")
    pb_ser = ratfunc_series(pullback, N) if isinstance(pullback, RatFunc) \
        else pullback.truncate(N)
    if pb_ser.c[0]:
        raise ValueError("pullback must vanish at 0")
    inner = pfq_series(spec, N)
    comp = inner.compose(pb_ser)
    pre = base_ser.rational_power(to_fraction(exponent))
    return pre * comp


def _x_coeff_lists(slices):
    """{s-power: MPoly in x alone} -> {s-power: x-coefficient list}."""
    out = {}
    for i, piece in slices.items():
        coeffs = [Fraction(0)] * (max(piece.total_degree(), 0) + 1)
        for e, v in piece.d.items():
            coeffs[e[1]] = to_fraction(v)
        out[i] = coeffs
    return out


def algebraic_root_series(minpoly, seed, N):
    """Newton-lift the branch of minpoly(s, x) = 0 with s(0) = seed.

    minpoly: MPoly in two variables, index 0 = s, index 1 = x.
    Requires a simple branch: d minpoly/d s nonzero at (seed, 0).
    """
    seed = to_fraction(seed)
    if minpoly.n != 2:
        raise ValueError("minpoly must be bivariate (s, x)")
    # split P = sum_i C_i(x) s^i
    cs = _x_coeff_lists(minpoly.coeffs_in(0))
    if minpoly.eval((seed, Fraction(0))):
        raise ValueError("seed is not a root of minpoly at x = 0")
    dP0 = minpoly.diff(0).eval((seed, Fraction(0)))
    if not dP0:
        raise ValueError("singular branch: d/ds vanishes at the seed")

    def eval_poly_family(fam, S):
        # Horner: sum_i fam[i] * S^i with fam[i] a coefficient list in x
        tot = UniSeries([0], N, "x")
        for i in range(max(fam), -1, -1):
            tot = tot * S
            if i in fam:
                tot = tot + UniSeries(fam[i], N, "x")
        return tot

    dcs = _x_coeff_lists(minpoly.diff(0).coeffs_in(0))

    S = UniSeries([seed], N, "x")
    # Newton doubles correct terms each round
    steps = 0
    while True:
        val = eval_poly_family(cs, S)
        if val.is_zero():
            break
        dval = eval_poly_family(dcs, S)
        S = S - val * dval.reciprocal()
        steps += 1
        if steps > N.bit_length() + 4:
            raise ValueError("Newton iteration failed to converge")
    assert eval_poly_family(cs, S).is_zero(), "root series fails minpoly"
    return S
