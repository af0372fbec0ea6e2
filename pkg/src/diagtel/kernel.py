"""Exact arithmetic kernel: Q, Q[x1..xk], Q(x), and exact linear algebra.

Everything downstream (series expansion, operator algebra, guessing, curve
geometry) is built on three representations:

  * Fraction          -- rationals, straight from the stdlib
  * MPoly             -- multivariate polynomials as {exponent tuple: coeff}
  * Poly / RatFunc    -- dense univariate polynomials and reduced fractions
                         of them, over any coefficient field that supports
                         +, -, *, /, bool()

Coefficients are duck-typed so the same Poly code runs over Q and over Q(p)
(RatFunc coefficients), which is all the curve-geometry layer needs.
"""

from fractions import Fraction

Rational = Fraction


def to_fraction(c):
    if isinstance(c, Fraction):
        return c
    return Fraction(c)


# ---------------------------------------------------------------------------
# multivariate polynomials
# ---------------------------------------------------------------------------

class MPoly:
    """Multivariate polynomial, {exponent tuple: nonzero coefficient}.

    >>> x = MPoly.var(0, 2); y = MPoly.var(1, 2)
    >>> print((1 - x - y) * (1 + x))
    1 - x^2 - y - x*y
    """

    __slots__ = ("n", "d")

    def __init__(self, n, d=None):
        self.n = n
        self.d = {} if d is None else d

    @classmethod
    def const(cls, c, n):
        c = to_fraction(c) if not hasattr(c, "numer") else c
        if not c:
            return cls(n, {})
        return cls(n, {(0,) * n: c})

    @classmethod
    def var(cls, i, n):
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): Fraction(1)})

    def is_zero(self):
        return not self.d

    def __bool__(self):
        return bool(self.d)

    def constant_term(self):
        z = (0,) * self.n
        c = self.d.get(z)
        if c is None:
            for v in self.d.values():
                return v - v  # a zero of the right field
            return Fraction(0)
        return c

    def __add__(self, other):
        other = self._coerce(other)
        d = dict(self.d)
        for e, c in other.d.items():
            s = d.get(e)
            s = c if s is None else s + c
            if s:
                d[e] = s
            elif e in d:
                del d[e]
        return MPoly(self.n, d)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.n, {e: -c for e, c in self.d.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def _coerce(self, other):
        if isinstance(other, MPoly):
            return other
        return MPoly.const(other, self.n)

    def __mul__(self, other):
        if not isinstance(other, MPoly):
            other = MPoly.const(other, self.n)
        d = {}
        for e1, c1 in self.d.items():
            for e2, c2 in other.d.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = d.get(e)
                s = c1 * c2 if s is None else s + c1 * c2
                if s:
                    d[e] = s
                elif e in d:
                    del d[e]
        return MPoly(self.n, d)

    __rmul__ = __mul__

    def __pow__(self, k):
        r = MPoly.const(1, self.n)
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def __eq__(self, other):
        if isinstance(other, MPoly):
            return self.n == other.n and self.d == other.d
        return self.d == MPoly.const(other, self.n).d

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.d.items()))))

    def degree(self, i):
        return max((e[i] for e in self.d), default=-1)

    def total_degree(self):
        return max((sum(e) for e in self.d), default=-1)

    def diff(self, i):
        d = {}
        for e, c in self.d.items():
            if e[i]:
                e2 = list(e)
                e2[i] -= 1
                d[tuple(e2)] = c * e[i]
        return MPoly(self.n, d)

    def subs(self, repl):
        """Substitute repl[i] (MPoly or field constant) for variable i."""
        n2 = None
        for r in repl:
            if isinstance(r, MPoly):
                n2 = r.n
                break
        if n2 is None:
            raise ValueError("need at least one MPoly replacement")
        out = MPoly(n2, {})
        cache = [{} for _ in range(self.n)]
        for e, c in self.d.items():
            term = MPoly.const(c, n2)
            for i, k in enumerate(e):
                if not k:
                    continue
                pw = cache[i].get(k)
                if pw is None:
                    ri = repl[i]
                    if not isinstance(ri, MPoly):
                        ri = MPoly.const(ri, n2)
                    pw = ri ** k
                    cache[i][k] = pw
                term = term * pw
            out = out + term
        return out

    def eval(self, args):
        """Evaluate at field elements (returns a field element)."""
        acc = None
        for e, c in self.d.items():
            t = c
            for i, k in enumerate(e):
                for _ in range(k):
                    t = t * args[i]
            acc = t if acc is None else acc + t
        if acc is None:
            return Fraction(0)
        return acc

    def coeffs_in(self, i):
        """Split by the power of variable i: {k: MPoly without variable i}.

        The returned polynomials keep the full variable count with slot i
        zeroed out, so they can be recombined or substituted directly.
        """
        out = {}
        for e, c in self.d.items():
            k = e[i]
            e2 = list(e)
            e2[i] = 0
            out.setdefault(k, {})[tuple(e2)] = c
        return {k: MPoly(self.n, d) for k, d in out.items()}

    def map_coeffs(self, f):
        d = {}
        for e, c in self.d.items():
            v = f(c)
            if v:
                d[e] = v
        return MPoly(self.n, d)

    def __str__(self):
        return format_mpoly(self, "xyzu"[: self.n])

    __repr__ = __str__


def format_coeff(c):
    if isinstance(c, Fraction):
        return str(c)
    return "(" + str(c) + ")"


def format_mpoly(p, names):
    if not p.d:
        return "0"
    parts = []
    for e in sorted(p.d, key=lambda e: (sum(e), e)):
        c = p.d[e]
        mono = "*".join(
            n if k == 1 else "%s^%d" % (n, k) for n, k in zip(names, e) if k
        )
        cs = format_coeff(c)
        neg = cs.startswith("-")
        if neg:
            cs = cs[1:]
        if mono:
            body = mono if cs == "1" else cs + "*" + mono
        else:
            body = cs
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)


# ---------------------------------------------------------------------------
# dense univariate polynomials over a generic field
# ---------------------------------------------------------------------------

class Poly:
    """Dense univariate polynomial; coefficient list [c0, c1, ...].

    The zero polynomial has an empty list and degree -1.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        c = list(coeffs)
        while c and not c[-1]:
            c.pop()
        self.c = c

    @classmethod
    def of(cls, *coeffs):
        return cls([to_fraction(v) for v in coeffs])

    @classmethod
    def x(cls):
        return cls.of(0, 1)

    def degree(self):
        return len(self.c) - 1

    def is_zero(self):
        return not self.c

    def __bool__(self):
        return bool(self.c)

    def lc(self):
        return self.c[-1]

    def __getitem__(self, i):
        if 0 <= i < len(self.c):
            return self.c[i]
        return Fraction(0) if not self.c or isinstance(self.c[0], Fraction) else self.c[0] - self.c[0]

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.c == other.c
        if not self.c:
            return not other
        return len(self.c) == 1 and self.c[0] == other

    def __hash__(self):
        return hash(tuple(self.c))

    def __add__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other]) if other else Poly()
        n = max(len(self.c), len(other.c))
        out = []
        for i in range(n):
            a = self.c[i] if i < len(self.c) else None
            b = other.c[i] if i < len(other.c) else None
            if a is None:
                out.append(b)
            elif b is None:
                out.append(a)
            else:
                out.append(a + b)
        return Poly(out)

    __radd__ = __add__

    def __neg__(self):
        return Poly([-a for a in self.c])

    def __sub__(self, other):
        if not isinstance(other, Poly):
            other = Poly([other]) if other else Poly()
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            if not other:
                return Poly()
            return Poly([a * other for a in self.c])
        if not self.c or not other.c:
            return Poly()
        out = [None] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if not a:
                continue
            for j, b in enumerate(other.c):
                v = a * b
                out[i + j] = v if out[i + j] is None else out[i + j] + v
        z = self.c[0] - self.c[0]
        return Poly([z if v is None else v for v in out])

    __rmul__ = __mul__

    def __pow__(self, k):
        if self.c:
            r = Poly([self.c[0] / self.c[0] if self.c[0] else self.lc() / self.lc()])
        else:
            r = Poly.of(1)
        b = self
        while k:
            if k & 1:
                r = r * b
            b = b * b
            k >>= 1
        return r

    def shift(self, k):
        """Multiply by x^k."""
        if not self.c:
            return self
        z = self.c[0] - self.c[0]
        return Poly([z] * k + self.c)

    def scale(self, s):
        return Poly([a * s for a in self.c])

    def divmod(self, other):
        """Exact field division with remainder."""
        if not other.c:
            raise ZeroDivisionError("poly division by zero")
        r = list(self.c)
        d = other.degree()
        lcinv = None
        q = [None] * max(len(self.c) - d, 0)
        while len(r) - 1 >= d and any(bool(v) for v in r):
            while r and not r[-1]:
                r.pop()
            if len(r) - 1 < d:
                break
            if lcinv is None:
                lcinv = (other.c[-1] / other.c[-1]) / other.c[-1]
            f = r[-1] * lcinv
            k = len(r) - 1 - d
            q[k] = f
            for i, b in enumerate(other.c):
                r[k + i] = r[k + i] - f * b
            r.pop()
        z = (other.c[-1] - other.c[-1])
        qq = Poly([z if v is None else v for v in q])
        return qq, Poly(r)

    def __mod__(self, other):
        return self.divmod(other)[1]

    def __floordiv__(self, other):
        return self.divmod(other)[0]

    def diff(self):
        return Poly([a * i for i, a in enumerate(self.c)][1:])

    def eval(self, v):
        acc = None
        for a in reversed(self.c):
            acc = a if acc is None else acc * v + a
        if acc is None:
            return Fraction(0)
        return acc

    def compose(self, other):
        acc = Poly()
        for a in reversed(self.c):
            acc = acc * other + Poly([a])
        return acc

    def monic(self):
        if not self.c:
            return self
        inv = (self.c[-1] / self.c[-1]) / self.c[-1]
        return self.scale(inv)

    def map(self, f):
        return Poly([f(a) for a in self.c])

    def __str__(self):
        return format_poly(self, "x")

    __repr__ = __str__


def format_poly(p, name):
    if not p.c:
        return "0"
    parts = []
    for i in range(p.degree(), -1, -1):
        c = p.c[i]
        if not c:
            continue
        cs = format_coeff(c)
        neg = cs.startswith("-")
        if neg:
            cs = cs[1:]
        if i == 0:
            body = cs
        else:
            xs = name if i == 1 else "%s^%d" % (name, i)
            body = xs if cs == "1" else cs + "*" + xs
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append(("- " if neg else "+ ") + body)
    return " ".join(parts)


def poly_gcd(a, b):
    """Monic gcd over the coefficient field; gcd(p, 0) = monic(p).

    Over Q the remainder chain is content-stripped at every step (primitive
    Euclid); plain Euclid squares the integer sizes per step and becomes
    hopeless already around degree 30."""
    if (not a.c or isinstance(a.lc(), Fraction)) and \
       (not b.c or isinstance(b.lc(), Fraction)):
        a = poly_primitive(a)
        b = poly_primitive(b)
        while b:
            a, b = b, poly_primitive(a % b)
        return a.monic()
    while b:
        a, b = b, (a % b).monic()
    return a.monic()


def poly_content_int(p):
    """Content of a Fraction-coefficient polynomial: the positive rational
    c such that p/c has coprime integer coefficients, sign following lc."""
    if not p.c:
        return Fraction(0)
    from math import gcd
    num = 0
    den = 1
    for a in p.c:
        num = gcd(num, a.numerator)
        den = den * a.denominator // gcd(den, a.denominator)
    c = Fraction(num, den)
    if p.c[-1] < 0:
        c = -c
    return c

def poly_primitive(p):
    c = poly_content_int(p)
    if not c:
        return p
    return p.scale(1 / c)


def resultant(a, b):
    """Resultant by the subresultant PRS (Collins/Cohen Alg. 3.3.7).

    Exact over the coefficient field; specializes fine over Q and Q(p).
    The g/h bookkeeping keeps the pseudo-remainder growth polynomial.
    """
    if not a.c or not b.c:
        if a.c:
            return a.lc() - a.lc()
        if b.c:
            return b.lc() - b.lc()
        return Fraction(0)
    one = a.lc() / a.lc()
    s = 1
    A, B = a, b
    if A.degree() < B.degree():
        if A.degree() % 2 == 1 and B.degree() % 2 == 1:
            s = -s
        A, B = B, A
    g = one
    h = one
    while B.degree() > 0:
        d = A.degree() - B.degree()
        if A.degree() % 2 == 1 and B.degree() % 2 == 1:
            s = -s
        # pseudo-remainder: lc(B)^(d+1) * A  mod B
        R = (A.scale(B.lc() ** (d + 1))) % B
        if not R:
            return one - one  # nonconstant common factor
        A, B = B, R.scale(one / (g * (h ** d)))
        g = A.lc()
        if d == 1:
            h = g
        elif d > 1:
            h = (g ** d) * (one / (h ** (d - 1)))
        # d == 0: h unchanged
    # B is now a nonzero constant
    n = A.degree()
    res = B.lc() ** n
    if n > 1:
        res = res * (one / (h ** (n - 1)))
    return res if s == 1 else -res


def squarefree_part(p):
    """p / gcd(p, p'), made monic: each distinct root exactly once."""
    if not p.c or p.degree() == 0:
        return p.monic() if p.c else p
    g = poly_gcd(p, p.diff())
    q, r = p.divmod(g)
    assert not r
    return q.monic()


def squarefree_decomposition(p):
    """Yun's algorithm: [(factor_i, multiplicity_i)], factors monic,
    p = lc * prod factor_i^mult_i  (char 0)."""
    out = []
    if not p.c or p.degree() == 0:
        return out
    p = p.monic()
    g = poly_gcd(p, p.diff())
    w, r = p.divmod(g)
    assert not r
    y, r = p.diff().divmod(g)
    assert not r
    i = 1
    while w.degree() > 0:
        z = y - w.diff()
        f = poly_gcd(w, z)
        if f.degree() > 0:
            out.append((f, i))
        w, r = w.divmod(f)
        assert not r
        y, r = z.divmod(f)
        assert not r
        i += 1
    return out


def odd_multiplicity_part(p):
    """Product of the squarefree factors occurring to an odd power, monic.

    This is the part that matters for a hyperelliptic model w^2 = p(u):
    square factors are absorbed into w.
    """
    if not p.c:
        return p
    one = p.lc() / p.lc()
    out = Poly([one])
    for f, m in squarefree_decomposition(p):
        if m % 2 == 1:
            out = out * f
    return out.monic()


# ---------------------------------------------------------------------------
# rational functions in one named variable
# ---------------------------------------------------------------------------

class RatFunc:
    """Reduced fraction of Fraction-coefficient Polys; denominator monic."""

    __slots__ = ("num", "den", "var")

    def __init__(self, num, den=None, var="x"):
        if not isinstance(num, Poly):
            num = Poly.of(num)
        if den is None:
            den = Poly.of(1)
        elif not isinstance(den, Poly):
            den = Poly.of(den)
        if not den:
            raise ZeroDivisionError("rational function with zero denominator")
        if num:
            g = poly_gcd(num, den)
            if g.degree() > 0:
                num = num // g
                den = den // g
            l = den.lc()
            if l != 1:
                num = num.scale(1 / l)
                den = den.scale(1 / l)
        else:
            den = Poly.of(1)
        self.num = num
        self.den = den
        self.var = var

    @classmethod
    def const(cls, c, var="x"):
        return cls(Poly.of(c), None, var)

    @classmethod
    def variable(cls, var="x"):
        return cls(Poly.x(), None, var)

    def is_zero(self):
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def numer(self):
        return self.num

    def __add__(self, other):
        other = self._coerce(other)
        return RatFunc(self.num * other.den + other.num * self.den,
                       self.den * other.den, self.var)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, self.var)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, Poly):
            return RatFunc(other, None, self.var)
        return RatFunc(Poly.of(other), None, self.var)

    def __mul__(self, other):
        other = self._coerce(other)
        return RatFunc(self.num * other.num, self.den * other.den, self.var)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if not other.num:
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num, self.var)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k):
        if k < 0:
            return RatFunc(self.den, self.num, self.var) ** (-k)
        return RatFunc(self.num ** k, self.den ** k, self.var)

    def __eq__(self, other):
        if isinstance(other, RatFunc):
            return self.num == other.num and self.den == other.den
        return self.den.degree() == 0 and self.num == self._coerce(other).num

    def __hash__(self):
        return hash((tuple(self.num.c), tuple(self.den.c)))

    def diff(self):
        return RatFunc(self.num.diff() * self.den - self.num * self.den.diff(),
                       self.den * self.den, self.var)

    def eval(self, v):
        d = self.den.eval(v)
        if not d:
            raise ZeroDivisionError("pole at evaluation point")
        return self.num.eval(v) / d

    def __str__(self):
        ns = format_poly(self.num, self.var)
        if self.den.degree() == 0 and self.den.c and self.den.c[0] == 1:
            return ns
        ds = format_poly(self.den, self.var)
        return "(%s)/(%s)" % (ns, ds)

    __repr__ = __str__


def ratfunc_from_fraction_polys(num, den, var="x"):
    return RatFunc(num, den, var)


# ---------------------------------------------------------------------------
# exact linear algebra (fraction-free Bareiss)
# ---------------------------------------------------------------------------

def _rows_to_int(rows):
    from math import gcd
    out = []
    for row in rows:
        den = 1
        frow = [to_fraction(a) for a in row]
        for f in frow:
            den = den * f.denominator // gcd(den, f.denominator)
        out.append([int(f * den) for f in frow])
    return out

def nullspace(rows, ncols):
    """Basis of the right nullspace of the matrix, as lists of Fractions.

    Fraction-free forward elimination (Bareiss), then back substitution with
    one free column per basis vector.  Rows may be Fractions or ints.
    """
    m = _rows_to_int(rows)
    m = [r for r in m if any(r)]
    piv_cols = []
    piv_rows = []
    r = 0
    prev = 1
    for col in range(ncols):
        # find a pivot in column col at row >= r
        sel = None
        for i in range(r, len(m)):
            if m[i][col]:
                sel = i
                break
        if sel is None:
            continue
        m[r], m[sel] = m[sel], m[r]
        p = m[r][col]
        for i in range(r + 1, len(m)):
            mi = m[i]
            f = mi[col]
            # the f == 0 rows still get the p/prev rescale: that is what
            # keeps the Bareiss divisions exact at the next step
            for j in range(col, ncols):
                mi[j] = (p * mi[j] - f * m[r][j]) // prev
        prev = p
        piv_cols.append(col)
        piv_rows.append(r)
        r += 1
        if r == len(m):
            break
    free_cols = [c for c in range(ncols) if c not in piv_cols]
    basis = []
    for fc in free_cols:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        # back substitute over the echelon rows
        for k in range(len(piv_cols) - 1, -1, -1):
            row = m[piv_rows[k]]
            c = piv_cols[k]
            s = Fraction(0)
            for j in range(c + 1, ncols):
                if row[j] and v[j]:
                    s += Fraction(row[j]) * v[j]
            v[c] = -s / row[c]
        basis.append(v)
    return basis


def solve_unique(rows, rhs, ncols):
    """Solve A v = rhs when a solution exists; returns list of Fractions or
    None if inconsistent.  Underdetermined systems get free vars set to 0."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    ns = nullspace(aug, ncols + 1)
    for v in ns:
        if v[ncols]:
            t = v[ncols]
            return [-a / t for a in v[:ncols]]
    return None


def clear_row_denominators(row):
    """Scale a Fraction row to coprime integers (for display/tests)."""
    from math import gcd
    den = 1
    for a in row:
        den = den * a.denominator // gcd(den, a.denominator)
    num = 0
    vals = [int(a * den) for a in row]
    for v in vals:
        num = gcd(num, v)
    if num == 0:
        return vals
    return [v // num for v in vals]
