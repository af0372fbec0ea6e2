"""Univariate linear differential operators over Q(x).

A DiffOp is sum a_i(x) D^i with coprime integer-polynomial coefficients
(primitive normalization, positive leading coefficient); that normal form
is what all equality tests compare.  Internally most algorithms work on
plain coefficient lists whose entries are Poly or RatFunc -- both support
+ - * / and .diff(), so composition, adjoint and Euclidean division are
written once.

theta-form: for an operator L of order r, x^r L is a polynomial in
theta = x*Dx with polynomial coefficients; we store L as

    L = x^(-c) * sum_m x^m p_m(theta),      p_0 != 0,

and p_0 is the indicial polynomial at the origin.  Guessing, series
application, Frobenius solutions and the infinity exponents all run on
this form.
"""

from fractions import Fraction
from math import comb

from .kernel import (Poly, RatFunc, format_poly, nullspace, poly_gcd,
                     poly_primitive, squarefree_part)
from .series import UniSeries


# -- small combinatorial tables ---------------------------------------------

def _stirling2(n):
    """Rows 0..n of Stirling numbers of the second kind."""
    rows = [[1]]
    for i in range(1, n + 1):
        prev = rows[-1]
        row = [0] * (i + 1)
        for k in range(1, i + 1):
            row[k] = (prev[k - 1] if k - 1 < len(prev) else 0) + \
                     k * (prev[k] if k < len(prev) else 0)
        rows.append(row)
    return rows


def falling_factorial_poly(i):
    """theta (theta-1) ... (theta-i+1) as a Poly in theta."""
    p = Poly.of(1)
    for k in range(i):
        p = p * Poly.of(-k, 1)
    return p


# -- coefficient-list helpers (entries: Poly or RatFunc) --------------------

def _trim(c):
    c = list(c)
    while c and not c[-1]:
        c.pop()
    return c


def op_compose(a, b):
    """Composition (a after b) of coefficient lists: (a o b)(y) = a(b(y))."""
    if not a or not b:
        return []
    out = [None] * (len(a) + len(b) - 1)
    for j, bj in enumerate(b):
        if not bj:
            continue
        derivs = [bj]
        for i, ai in enumerate(a):
            if not ai:
                while len(derivs) <= i:
                    derivs.append(derivs[-1].diff())
                continue
            while len(derivs) <= i:
                derivs.append(derivs[-1].diff())
            for k in range(i + 1):
                t = ai * comb(i, k) * derivs[k]
                pos = i - k + j
                out[pos] = t if out[pos] is None else out[pos] + t
    return _trim([v if v is not None else 0 for v in out])


def op_adjoint(a):
    """Formal adjoint sum (-D)^i o a_i."""
    if not a:
        return []
    out = [None] * len(a)
    for i, ai in enumerate(a):
        if not ai:
            continue
        d = ai
        for k in range(i + 1):
            # term: (-1)^i * C(i,k) * a_i^(k) * D^(i-k)
            t = d * (comb(i, k) * (-1) ** i)
            pos = i - k
            out[pos] = t if out[pos] is None else out[pos] + t
            d = d.diff()
    return _trim([v if v is not None else 0 for v in out])


def _as_ratfunc_list(coeffs):
    out = []
    for c in coeffs:
        if isinstance(c, RatFunc):
            out.append(c)
        elif isinstance(c, Poly):
            out.append(RatFunc(c))
        else:
            out.append(RatFunc(Poly.of(c)))
    return out


def op_right_divmod(a, b):
    """Euclidean right division over Q(x): a = q o b + r, ord r < ord b."""
    a = _as_ratfunc_list(a)
    b = _as_ratfunc_list(b)
    if not b:
        raise ZeroDivisionError("right division by the zero operator")
    q = []
    r = _trim(a)
    nb = len(b) - 1
    while len(r) - 1 >= nb and r:
        k = len(r) - 1 - nb
        f = r[-1] / b[-1]
        while len(q) <= k:
            q.append(RatFunc(Poly()))
        q[k] = q[k] + f
        # r -= (f D^k) o b ; the top coefficient cancels exactly
        term = op_compose([RatFunc(Poly())] * k + [f], b)
        while len(term) < len(r):
            term.append(RatFunc(Poly()))
        r = _trim([ri - ti for ri, ti in zip(r, term)])
    return _trim(q), r


# -- the normalized operator ------------------------------------------------

class DiffOp:
    """sum a_i(x) D^i, primitive integer-polynomial coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, normalize=True):
        polys = []
        for c in coeffs:
            if isinstance(c, Poly):
                polys.append(c)
            elif isinstance(c, RatFunc):
                raise TypeError("use DiffOp.from_coeffs for rational input")
            else:
                polys.append(Poly.of(c))
        polys = _trim(polys)
        if normalize and polys:
            polys = _normalize_primitive(polys)
        self.coeffs = tuple(polys)

    @classmethod
    def from_coeffs(cls, coeffs):
        """Coefficients may be Poly, RatFunc, Fraction or int."""
        lst = _as_ratfunc_list(coeffs)
        lst = _trim(lst)
        if not lst:
            return cls([])
        den = Poly.of(1)
        for c in lst:
            den = den * (c.den // poly_gcd(den, c.den))
        polys = []
        for c in lst:
            q, r = (c.num * den).divmod(c.den)
            assert not r
            polys.append(q)
        return cls(polys)

    def order(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, DiffOp) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(tuple(p.c) for p in self.coeffs))

    def lc(self):
        return self.coeffs[-1]

    def compose(self, other):
        return DiffOp(op_compose(list(self.coeffs), list(other.coeffs)))

    __mul__ = compose

    def __add__(self, other):
        a, b = list(self.coeffs), list(other.coeffs)
        n = max(len(a), len(b))
        a += [Poly()] * (n - len(a))
        b += [Poly()] * (n - len(b))
        return DiffOp([p + q for p, q in zip(a, b)])

    def adjoint(self):
        return DiffOp(op_adjoint(list(self.coeffs)))

    def theta_form(self):
        """(c, [p_0, p_1, ...]) with self = x^(-c) sum_m x^m p_m(theta)."""
        r = self.order()
        if r < 0:
            return 0, []
        acc = {}  # x-power -> Poly in theta
        for i, ai in enumerate(self.coeffs):
            if not ai:
                continue
            ff = falling_factorial_poly(i)
            for k, ak in enumerate(ai.c):
                if not ak:
                    continue
                m = r - i + k
                cur = acc.get(m)
                t = ff.scale(ak)
                acc[m] = t if cur is None else cur + t
        if not acc:
            return 0, []
        m0 = min(m for m, p in acc.items() if p)
        M = max(m for m, p in acc.items() if p)
        pms = [acc.get(m, Poly()) for m in range(m0, M + 1)]
        return r - m0, pms

    @classmethod
    def from_theta_form(cls, pms):
        """Primitive operator with theta-form sum_m x^m p_m(theta); the
        content strip in the constructor removes any left x factor."""
        S2 = _stirling2(max((p.degree() for p in pms if p), default=0))
        acc = {}
        for m, pm in enumerate(pms):
            for j, cj in enumerate(pm.c):
                if not cj:
                    continue
                for i in range(j + 1):
                    s = S2[j][i] if i < len(S2[j]) else 0
                    if not s:
                        continue
                    key = i
                    t = Poly([cj * s]).shift(m + i)
                    cur = acc.get(key)
                    acc[key] = t if cur is None else cur + t
        n = max(acc) if acc else 0
        return cls([acc.get(i, Poly()) for i in range(n + 1)])

    def theta_coefficients(self):
        """Collected form of x^c * self: [C_0(x), ..., C_r(x)] with
        x^c self = sum_k C_k(x) theta^k."""
        c, pms = self.theta_form()
        r = max((p.degree() for p in pms if p), default=0)
        out = []
        for k in range(r + 1):
            out.append(Poly([pm[k] if k <= pm.degree() else Fraction(0)
                             for pm in pms]))
        return out

    # -- series / function application --------------------------------

    def theta_apply(self, coeffs):
        """Coefficients of (x^c self)(sum coeffs[j] x^j), same length."""
        _, pms = self.theta_form()
        N = len(coeffs) - 1
        out = []
        for j in range(N + 1):
            s = Fraction(0)
            for m, pm in enumerate(pms):
                if m > j:
                    break
                v = coeffs[j - m]
                if v:
                    s += pm.eval(j - m) * v
            out.append(s)
        return out

    def annihilates(self, series, upto=None):
        vals = self.theta_apply(list(series.c if isinstance(series, UniSeries)
                                     else series))
        if upto is not None:
            vals = vals[: upto + 1]
        return not any(vals)

    def apply_series(self, series):
        """Apply to a truncated series; raises on a genuine x^(-k) term."""
        c, _ = self.theta_form()
        vals = self.theta_apply(list(series.c))
        if any(vals[:c]):
            raise ValueError("application produces negative powers of x")
        return UniSeries(vals[c:], series.N - c, series.var)

    def apply_ratfunc(self, f):
        """Apply to a rational function (exact)."""
        f = f if isinstance(f, RatFunc) else RatFunc(f)
        out = RatFunc(Poly(), Poly.of(1), f.var)
        d = f
        for i, ai in enumerate(self.coeffs):
            if ai:
                out = out + RatFunc(ai, None, f.var) * d
            d = d.diff()
        return out

    # -- local data ----------------------------------------------------

    def indicial_at_origin(self):
        _, pms = self.theta_form()
        return pms[0] if pms else Poly()

    def indicial_at_infinity(self):
        _, pms = self.theta_form()
        return pms[-1] if pms else Poly()

    def is_mum(self):
        """Maximally unipotent monodromy at 0: indicial = c * rho^order."""
        p0 = self.indicial_at_origin()
        r = self.order()
        return p0.degree() == r and not any(p0.c[:r])

    def __str__(self):
        return format_operator_d(self)

    __repr__ = __str__


def _normalize_primitive(polys):
    from math import gcd as igcd
    # common denominator and integer content
    num = 0
    den = 1
    for p in polys:
        for a in p.c:
            num = igcd(num, a.numerator)
            den = den * a.denominator // igcd(den, a.denominator)
    scale = Fraction(den, num if num else 1)
    polys = [p.scale(scale) for p in polys]
    # polynomial content
    g = Poly()
    for p in polys:
        g = poly_gcd(g, p) if g else poly_gcd(p, Poly())
        if g.degree() == 0:
            break
    if g and g.degree() > 0:
        out = []
        for p in polys:
            q, r = p.divmod(g)
            assert not r
            out.append(q)
        polys = out
        # division by the monic gcd can reintroduce rational coefficients
        num = 0
        den = 1
        for p in polys:
            for a in p.c:
                num = igcd(num, a.numerator)
                den = den * a.denominator // igcd(den, a.denominator)
        scale = Fraction(den, num if num else 1)
        polys = [p.scale(scale) for p in polys]
    # sign: leading coefficient of the indicial polynomial positive, so
    # theta-forms print the way they are usually written
    if polys and _indicial_lc(polys) < 0:
        polys = [p.scale(-1) for p in polys]
    return polys


def _indicial_lc(polys):
    r = len(polys) - 1
    m0 = None
    for i, p in enumerate(polys):
        for k, a in enumerate(p.c):
            if a and (m0 is None or r - i + k < m0):
                m0 = r - i + k
    p0 = Poly()
    for i, p in enumerate(polys):
        k = m0 - r + i
        if 0 <= k <= p.degree() and p.c[k]:
            p0 = p0 + falling_factorial_poly(i).scale(p.c[k])
    return p0.lc() if p0 else 1


# -- operators with rational-function coefficients ---------------------------

class RatOp:
    """Operator with RatFunc coefficients, not normalized.

    Division quotients/remainders and intertwiners live here: scaling them
    to primitive form would break the exact identities they come from.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = tuple(_trim(_as_ratfunc_list(coeffs)))

    @classmethod
    def of(cls, op):
        if isinstance(op, RatOp):
            return op
        return cls(list(op.coeffs))

    def order(self):
        return len(self.coeffs) - 1

    def is_zero(self):
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (DiffOp, RatOp)):
            return list(RatOp.of(self).coeffs) == list(RatOp.of(other).coeffs)
        return NotImplemented

    def compose(self, other):
        return RatOp(op_compose(list(self.coeffs),
                                list(RatOp.of(other).coeffs)))

    __mul__ = compose

    def scale(self, f):
        return RatOp([c * f for c in self.coeffs])

    def primitive(self):
        """The primitive polynomial-coefficient normalization."""
        return DiffOp.from_coeffs(list(self.coeffs))

    def apply_ratfunc(self, f):
        f = f if isinstance(f, RatFunc) else RatFunc(f)
        out = RatFunc(Poly(), None, f.var)
        d = f
        for ai in self.coeffs:
            if ai:
                out = out + ai * d
            d = d.diff()
        return out

    def apply_series(self, s):
        """Exact action on a truncated series; valuation-aware division by
        the common coefficient denominator (raises if a true pole at 0
        remains)."""
        den = Poly.of(1)
        for c in self.coeffs:
            den = den * (c.den // poly_gcd(den, c.den))
        polys = []
        for c in self.coeffs:
            q, r = (c.num * den).divmod(c.den)
            assert not r
            polys.append(q)
        num = DiffOp(polys, normalize=False).apply_series(s)
        v = 0
        while v <= den.degree() and not den.c[v]:
            v += 1
        if v:
            if any(num.c[:v]):
                raise ValueError("application produces negative powers of x")
            num = UniSeries(num.c[v:], num.N - v, num.var)
            den = Poly(den.c[v:])
        dser = UniSeries([den[i] for i in range(num.N + 1)], num.N, num.var)
        return num * dser.reciprocal()

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for i in range(self.order(), -1, -1):
            c = self.coeffs[i]
            if not c:
                continue
            if i == 0:
                parts.append("(%s)" % c)
            elif i == 1:
                parts.append("(%s)*Dx" % c)
            else:
                parts.append("(%s)*Dx^%d" % (c, i))
        return " + ".join(parts)

    __repr__ = __str__


# -- printing ----------------------------------------------------------------

def format_operator_d(op):
    if op.is_zero():
        return "0"
    parts = []
    for i in range(op.order(), -1, -1):
        p = op.coeffs[i]
        if not p:
            continue
        ps = format_poly(p, "x")
        if i == 0:
            body = "(%s)" % ps
        elif i == 1:
            body = "(%s)*Dx" % ps
        else:
            body = "(%s)*Dx^%d" % (ps, i)
        parts.append(body)
    return " + ".join(parts)


def format_operator_theta(op):
    """theta-form text of x^c o op (collected by powers of theta)."""
    cs = op.theta_coefficients()
    parts = []
    for k in range(len(cs) - 1, -1, -1):
        p = cs[k]
        if not p:
            continue
        ps = format_poly(p, "x")
        if k == 0:
            body = "(%s)" % ps
        elif k == 1:
            body = "(%s)*T" % ps
        else:
            body = "(%s)*T^%d" % (ps, k)
        parts.append(body)
    return " + ".join(parts) if parts else "0"


# -- Euclidean structure -----------------------------------------------------

def right_divide(a, b):
    """(quotient, remainder) with a = q o b + r over Q(x), as RatOps."""
    q, r = op_right_divmod(list(a.coeffs), list(b.coeffs))
    return RatOp(q), RatOp(r)


def right_divides(b, a):
    """Does b right-divide a (remainder exactly zero)?"""
    _, r = right_divide(a, b)
    return r.is_zero()


def gcrd(a, b):
    """Greatest common right divisor, primitive-normalized."""
    A, B = a, b
    while B and not B.is_zero():
        _, r = op_right_divmod(list(A.coeffs), list(B.coeffs))
        A, B = B, (DiffOp.from_coeffs(r) if r else DiffOp([]))
    return A if isinstance(A, DiffOp) else DiffOp.from_coeffs(list(A.coeffs))


def _lclm_pair(a, b):
    """Extended Euclidean syzygy: track r_k = u_k o A + v_k o B; when the
    remainder sequence hits zero the cofactor gives LCLM = u o A."""
    A = _as_ratfunc_list(list(a.coeffs))
    B = _as_ratfunc_list(list(b.coeffs))
    one = [RatFunc(Poly.of(1))]
    zero = []
    r_prev, r_cur = A, B
    u_prev, u_cur = one, zero
    while _trim(r_cur):
        q, r_next = op_right_divmod(r_prev, r_cur)
        qu = op_compose(q, u_cur) if q and u_cur else []
        n = max(len(u_prev), len(qu))
        up = list(u_prev) + [RatFunc(Poly())] * (n - len(u_prev))
        qu = list(qu) + [RatFunc(Poly())] * (n - len(qu))
        u_next = _trim([x - y for x, y in zip(up, qu)])
        r_prev, r_cur = r_cur, r_next
        u_prev, u_cur = u_cur, u_next
    # r_cur = 0: u_cur o A is the LCLM (nonzero since A, B nonzero)
    return DiffOp.from_coeffs(op_compose(u_cur, A))


def lclm(*ops):
    """Least common left multiple of two or more operators (a single list
    argument is also accepted)."""
    if len(ops) == 1 and not isinstance(ops[0], (DiffOp, RatOp)):
        ops = tuple(ops[0])
    if not ops:
        raise ValueError("lclm of nothing")
    out = ops[0]
    for op in ops[1:]:
        out = _lclm_pair(out, op)
    return out if isinstance(out, DiffOp) else DiffOp.from_coeffs(list(out.coeffs))


# -- Frobenius solutions -----------------------------------------------------

class FrobeniusBasis:
    """Log-free analytic solutions at the origin, as (exponent, series)
    pairs with unit leading coefficient at the exponent; ascending.

    indicial_roots carries the full root report of the indicial polynomial,
    blocked the integer exponents whose log-free lift fails (a log solution
    sits there).
    """

    def __init__(self, pairs, indicial_roots, blocked):
        self.pairs = pairs
        self.indicial_roots = indicial_roots
        self.blocked = blocked

    @property
    def solutions(self):
        return [s for _, s in self.pairs]

    @property
    def exponents(self):
        return [e for e, _ in self.pairs]

    def __iter__(self):
        return iter(self.pairs)

    def __len__(self):
        return len(self.pairs)


def _integer_roots(p, cap=4096):
    """Distinct nonnegative integer roots of a Fraction Poly, ascending.

    Scans the integers below min(Cauchy bound, cap); callers pass a cap
    when only roots up to a structural size (series order, feasible
    ansatz degree) can matter.  Integer Horner keeps the scan cheap even
    when the coefficients are huge.
    """
    if not p or p.degree() <= 0:
        return []
    lead = abs(p.lc())
    bound = Fraction(1)
    for a in p.c[:-1]:
        b = abs(a) / lead
        if b > bound:
            bound = b
    bound = min(int(bound) + 1, cap)
    from math import gcd
    den = 1
    for a in p.c:
        den = den * a.denominator // gcd(den, a.denominator)
    ic = [int(a * den) for a in p.c]
    out = []
    for e in range(bound + 1):
        acc = 0
        for c in reversed(ic):
            acc = acc * e + c
        if not acc:
            out.append(e)
    return out


def analytic_solutions(op, N):
    """Basis of the log-free solutions analytic at x = 0, through x^N.

    Coefficients are computed as exact rational functions of the exponent
    rho and evaluated in the limit at each nonnegative integer indicial
    root; a pole in that limit means the root carries a log solution.
    """
    _, pms = op.theta_form()
    p0 = pms[0]
    roots = _integer_roots(p0, cap=max(N, 64))
    M = len(pms) - 1
    pairs = []
    blocked = []
    for e in roots:
        # c_j(rho), j = 0..N-e, as reduced rational functions of rho;
        # the substitution rho -> rho + e keeps the interesting point at 0
        # and the reduced denominators small
        coeffs = [RatFunc(Poly.of(1), None, "rho")]
        ok = True
        for j in range(1, N - e + 1):
            s = RatFunc(Poly(), None, "rho")
            for m in range(1, min(j, M) + 1):
                pm = pms[m]
                if not pm:
                    continue
                # p_m(rho + e + j - m) * c_{j-m}
                shifted = pm.compose(Poly.of(e + j - m, 1))
                s = s + RatFunc(shifted, None, "rho") * coeffs[j - m]
            den = p0.compose(Poly.of(e + j, 1))
            coeffs.append(-s / RatFunc(den, None, "rho"))
        vals = []
        for cf in coeffs:
            d = cf.den.eval(Fraction(0))
            if not d:
                ok = False
                break
            vals.append(cf.num.eval(Fraction(0)) / d)
        if not ok:
            blocked.append(e)
            continue
        full = [Fraction(0)] * e + vals
        ser = UniSeries(full[: N + 1], N, "x")
        assert op.annihilates(ser), "Frobenius series fails annihilation"
        pairs.append((e, ser))
    return FrobeniusBasis(pairs, _poly_root_report(p0), blocked)


def _poly_root_report(p):
    """Printable root summary of the indicial polynomial: rational roots
    with multiplicity, plus the unfactored remainder if any."""
    out = []
    q = p.monic()
    # rational roots a/b: b | lc, a | constant, via integer roots of
    # q(x/t) style searches are overkill here -- report integer roots and
    # keep the cofactor symbolic
    for e in _integer_roots(p):
        mult = 0
        while q.eval(Fraction(e)) == 0:
            q2, r = q.divmod(Poly.of(-e, 1))
            assert not r
            q = q2
            mult += 1
        out.append((Fraction(e), mult))
    if q.degree() > 0:
        out.append((format_poly(q, "rho"), None))
    return out


# -- rational solutions ------------------------------------------------------

def rational_solutions(op, max_pole_order=6, max_degree=256):
    """Basis of rational-function solutions.

    Poles can only sit at roots of the leading coefficient, so the ansatz
    y = g / s^k with s the squarefree part of lc and k = max_pole_order
    captures every solution with pole orders <= k; the numerator degree
    comes from the integer exponents at infinity, scanned up to
    max_degree (both bounds are search limits, not theorems).
    """
    s = squarefree_part(op.coeffs[-1])
    s = poly_primitive(s)
    if s.degree() == 0:
        den = Poly.of(1)
    else:
        den = s ** max_pole_order
    dinv = RatFunc(Poly.of(1), den)
    conj = op_compose(_as_ratfunc_list(list(op.coeffs)), [dinv])
    M = DiffOp.from_coeffs(conj)
    # x^m p_m(theta) sends x^d to p_m(d) x^(m+d): a degree-d polynomial
    # solution needs p_top(d) = 0, so the top theta coefficient bounds d
    degs = _integer_roots(M.indicial_at_infinity(), cap=max_degree)
    if not degs:
        return []
    D = max(degs)
    _, pms = M.theta_form()
    W = len(pms) - 1
    # all coefficients of (x^c M)(g) for g = sum g_d x^d must vanish;
    # the application of an operator to a polynomial is finite, so these
    # equations are complete and kernel vectors are exact solutions
    rows = []
    ncols = D + 1
    for j in range(D + W + 1):
        row = [Fraction(0)] * ncols
        for m, pm in enumerate(pms):
            d = j - m
            if 0 <= d <= D and pm:
                row[d] += pm.eval(Fraction(d))
        rows.append(row)
    basis = nullspace(rows, ncols)
    return [RatFunc(Poly(v), den) for v in basis]


# -- exterior square ---------------------------------------------------------

def exterior_square(op):
    """Minimal operator annihilating all 2x2 Wronskians of solutions.

    Works on the theta-companion system scaled by the leading theta
    coefficient (polynomial derivation), finds the first linear dependence
    of the iterated derivatives of e_0 ^ e_1 by fraction-free elimination,
    and converts the theta-hat relation back to a D-form operator.
    """
    n = op.order()
    if n < 2:
        raise ValueError("exterior square needs order >= 2")
    if n == 2:
        a2, a1 = op.coeffs[2], op.coeffs[1]
        return DiffOp([a1, a2])
    C = op.theta_coefficients()
    Cn = C[-1]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    index = {p: k for k, p in enumerate(pairs)}
    dim = len(pairs)

    def theta_hat_state(i):
        """theta-hat of basis state v_i as {state: Poly}."""
        if i < n - 1:
            return {i + 1: Cn}
        return {k: -C[k] for k in range(n) if C[k]}

    def theta_hat_row(row):
        """row: list of Poly (coefficients on wedge basis)."""
        out = [Poly() for _ in range(dim)]
        for k, cp in enumerate(row):
            if not cp:
                continue
            i, j = pairs[k]
            # C_n * theta(c) part
            tc = Poly([a * t for t, a in enumerate(cp.c)])
            out[k] = out[k] + Cn * tc
            for s, f in theta_hat_state(i).items():
                if s == j:
                    continue
                if s < j:
                    out[index[(s, j)]] = out[index[(s, j)]] + cp * f
                else:
                    out[index[(j, s)]] = out[index[(j, s)]] - cp * f
            for s, f in theta_hat_state(j).items():
                if s == i:
                    continue
                if i < s:
                    out[index[(i, s)]] = out[index[(i, s)]] + cp * f
                else:
                    out[index[(s, i)]] = out[index[(s, i)]] - cp * f
        return out

    # iterate rows w, theta-hat w, ... with augmented identity tail;
    # eliminate over Q(x) with unit pivots -- reduced entries stay near
    # their true minor sizes, where fraction-free cross-products blow up
    w = [Poly() for _ in range(dim)]
    w[index[(0, 1)]] = Poly.of(1)
    pivots = []  # (column, RatFunc row, pivot entry normalized to 1)
    t = 0
    lam = None
    while t <= dim:
        # layout: dim wedge columns, then dim+1 lambda columns
        cur = [RatFunc(p) for p in w] + [RatFunc(Poly())] * (dim + 1)
        cur[dim + t] = RatFunc(Poly.of(1))
        for col, prow in pivots:
            f = cur[col]
            if f:
                cur = [a - f * b for a, b in zip(cur, prow)]
        lead = None
        for cidx in range(dim):
            if cur[cidx]:
                lead = cidx
                break
        if lead is None:
            lam = cur[dim:]
            break
        inv = cur[lead]
        pivots.append((lead, [a / inv for a in cur]))
        w = theta_hat_row(w)
        t += 1
    assert lam is not None, "no dependence found up to the wedge dimension"
    # clear the common denominator: a polynomial theta-hat relation
    den = Poly.of(1)
    for r in lam:
        if r:
            den = den * (r.den // poly_gcd(den, r.den))
    cleared = []
    for r in lam:
        q, rr = (r.num * den).divmod(r.den)
        assert not rr
        cleared.append(q)
    lam = cleared
    # operator sum lam_t * (Cn theta)^t, then compose with multiplication
    # by x (the wedge state is x * Wronskian)
    theta_hat_op = [RatFunc(Poly()), RatFunc(Cn * Poly.of(0, 1))]
    acc = []
    for tt in range(len(lam) - 1, -1, -1):
        acc = op_compose(acc, theta_hat_op) if acc else []
        acc = _op_add(acc, [RatFunc(lam[tt])])
    res = op_compose(acc, [RatFunc(Poly.of(0, 1))])
    return DiffOp.from_coeffs(res)


def _op_add(a, b):
    n = max(len(a), len(b))
    a = list(a) + [RatFunc(Poly())] * (n - len(a))
    b = list(b) + [RatFunc(Poly())] * (n - len(b))
    return _trim([x + y for x, y in zip(a, b)])


def _strip_row_content(row):
    from math import gcd as igcd
    g = Poly()
    num = 0
    den = 1
    for p in row:
        if p:
            g = poly_gcd(g, p) if g else poly_gcd(p, Poly())
            for a in p.c:
                num = igcd(num, a.numerator)
                den = den * a.denominator // igcd(den, a.denominator)
    if not g:
        return row
    out = []
    scale = Fraction(den, num if num else 1)
    for p in row:
        if g.degree() > 0 and p:
            q, r = p.divmod(g)
            assert not r
            out.append(q.scale(scale))
        else:
            out.append(p.scale(scale))
    return out


# -- intertwiners ------------------------------------------------------------

class Intertwiner:
    """R with target o R = S o source exactly; R maps solutions of source
    to solutions of target.  R, S are RatOps so the identity survives."""

    def __init__(self, R, S, source, target):
        self.R = R
        self.S = S
        self.source = source
        self.target = target

    def verify(self):
        lhs = op_compose(_as_ratfunc_list(list(self.target.coeffs)),
                         list(self.R.coeffs))
        rhs = op_compose(list(self.S.coeffs),
                         _as_ratfunc_list(list(self.source.coeffs)))
        return _trim(lhs) == _trim(rhs)


def find_intertwiner(source, target, max_deg, max_den_power=2):
    """Search R of order < ord(source) whose reduced coefficients have
    numerator degree <= max_deg and denominator dividing sf^k
    (k <= max_den_power, sf the squarefree singular polynomial of the
    pair).  Over the common denominator sf^k the raw numerator bound is
    max_deg + deg(sf^k), so a small reduced denominator is never penalized
    for not being the full singular polynomial.  Returns Intertwiner or
    None."""
    ns = source.order()
    sf = poly_primitive(squarefree_part(source.coeffs[-1] * target.coeffs[-1]))
    seen = set()
    dens = []
    for k in range(max_den_power + 1):
        den = sf ** k if sf.degree() > 0 else Poly.of(1)
        key = tuple(den.c)
        if key in seen:
            continue
        seen.add(key)
        dens.append(den)
    tgt = _as_ratfunc_list(list(target.coeffs))
    src = list(source.coeffs)
    # reduction table for D^j mod source, j = 0..ord(target)+ns-1; the
    # 1/den twist never raises the order, so one table serves every den
    red = _reduction_table(src, len(tgt) - 1 + ns)
    for den in dens:
        bound = max_deg + den.degree()
        tprime = op_compose(tgt, [RatFunc(Poly.of(1), den)])
        cols = []
        for i in range(ns):
            for a in range(bound + 1):
                # T' o (x^a D^i) reduced mod source
                term = op_compose(tprime, [RatFunc(Poly())] * i +
                                  [RatFunc(Poly.of(0, 1) ** a)])
                rem = [RatFunc(Poly()) for _ in range(ns)]
                for j, cj in enumerate(term):
                    if not cj:
                        continue
                    for t2, rv in enumerate(red[j]):
                        rem[t2] = rem[t2] + cj * rv
                cols.append(rem)
        # clear denominators across all columns per remainder slot
        rows = _linearize_ratfunc_columns(cols)
        ncols = len(cols)
        basis = nullspace(rows, ncols)
        best = None
        for vec in basis:
            Rcoeffs = []
            idx = 0
            for i in range(ns):
                p = Poly([vec[idx + a] for a in range(bound + 1)])
                idx += bound + 1
                Rcoeffs.append(RatFunc(p, den))
            R = RatOp(Rcoeffs)
            if R.is_zero():
                continue
            score = max(c.num.degree() for c in R.coeffs if c)
            if best is None or score < best[0]:
                best = (score, R)
        if best is not None:
            R = best[1]
            q, r = op_right_divmod(op_compose(tgt, list(R.coeffs)),
                                   _as_ratfunc_list(src))
            if not r:
                iv = Intertwiner(R, RatOp(q), source, target)
                assert iv.verify(), "intertwiner identity fails"
                return iv
    return None


def _reduction_table(src, jmax):
    """red[j] = coefficients (length ord src) of D^j reduced mod src."""
    ns = len(src) - 1
    srcr = _as_ratfunc_list(src)
    lead = srcr[-1]
    red = []
    for j in range(jmax + 1):
        if j < ns:
            row = [RatFunc(Poly()) for _ in range(ns)]
            row[j] = RatFunc(Poly.of(1))
            red.append(row)
            continue
        prev = red[j - 1]
        # D o (prev): derivative plus shift, then reduce the D^ns term
        shifted = [RatFunc(Poly())] * ns
        top = RatFunc(Poly())
        for t2, cv in enumerate(prev):
            dcv = cv.diff()
            shifted[t2] = shifted[t2] + dcv
            if t2 + 1 < ns:
                shifted[t2 + 1] = shifted[t2 + 1] + cv
            else:
                top = top + cv
        if top:
            f = top / lead
            for t2 in range(ns):
                shifted[t2] = shifted[t2] - f * srcr[t2]
        red.append(shifted)
    return red


def _linearize_ratfunc_columns(cols):
    """cols: list (per unknown) of RatFunc vectors of equal length.
    Returns scalar rows (one per x-power per slot) over Fractions."""
    nslots = len(cols[0])
    rows = []
    for s in range(nslots):
        den = Poly.of(1)
        for col in cols:
            d = col[s].den
            den = den * (d // poly_gcd(den, d))
        polys = []
        maxd = 0
        for col in cols:
            q, r = (col[s].num * den).divmod(col[s].den)
            assert not r
            polys.append(q)
            maxd = max(maxd, q.degree())
        for power in range(maxd + 1):
            row = [p[power] if power <= p.degree() else Fraction(0)
                   for p in polys]
            if any(row):
                rows.append(row)
    return rows


class SelfdualReport:
    def __init__(self, selfdual, intertwiner):
        self.selfdual = selfdual
        self.intertwiner = intertwiner


def selfdual_report(op, max_deg):
    """Is op homomorphic to its adjoint?  R maps sol(adjoint) -> sol(op)."""
    iv = find_intertwiner(op.adjoint(), op, max_deg)
    return SelfdualReport(iv is not None, iv)


# -- spec-shaped module-level entry points -----------------------------------

def apply(op, s):
    if isinstance(s, UniSeries):
        return op.apply_series(s)
    return op.apply_ratfunc(s)


def multiply(a, b):
    return a.compose(b)


def indicial(op, point="zero"):
    if point in ("zero", 0, "origin"):
        return op.indicial_at_origin()
    if point in ("infinity", "inf", "oo"):
        return op.indicial_at_infinity()
    raise ValueError("point must be 'zero' or 'infinity'")


def is_mum(op):
    return op.is_mum()
