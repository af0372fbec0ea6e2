"""Box-truncated multivariate power series and diagonals.

A TruncSeries holds every coefficient with all exponents <= N (the box
truncation), for up to four variables.  The two expansion engines are

  expand_rational   P/Q by recursive division       (needs Q(0) != 0)
  expand_power      Q^r for rational r              (needs Q(0) == 1)

and the diagonal Diag(sum a_e x^e) = sum a_{m,..,m} t^m comes straight out
of the box.  The rational engine runs on plain machine integers whenever
P, Q are integral with unit constant term -- that is the common case for
every heavy acceptance fixture and is several times faster than Fractions.
"""

from fractions import Fraction
from itertools import product

from .errors import NoMultiTaylorExpansion, UnsupportedConstantTerm
from .kernel import Fraction as _F, MPoly, to_fraction

VARS = ("x", "y", "z", "u")


class UniSeries:
    """Univariate truncated series: coefficients 0..N inclusive."""

    __slots__ = ("var", "N", "c")

    def __init__(self, coeffs, N=None, var="x"):
        coeffs = [to_fraction(a) for a in coeffs]
        if N is None:
            N = len(coeffs) - 1
        if len(coeffs) < N + 1:
            coeffs = coeffs + [Fraction(0)] * (N + 1 - len(coeffs))
        self.c = coeffs[: N + 1]
        self.N = N
        self.var = var

    def __eq__(self, other):
        return isinstance(other, UniSeries) and self.c == other.c

    def __getitem__(self, i):
        return self.c[i]

    def __len__(self):
        return len(self.c)

    def truncate(self, N):
        return UniSeries(self.c[: N + 1], N, self.var)

    def __add__(self, other):
        N = min(self.N, other.N)
        return UniSeries([a + b for a, b in zip(self.c, other.c)], N, self.var)

    def __sub__(self, other):
        N = min(self.N, other.N)
        return UniSeries([a - b for a, b in zip(self.c, other.c)], N, self.var)

    def scale(self, s):
        s = to_fraction(s)
        return UniSeries([a * s for a in self.c], self.N, self.var)

    def __mul__(self, other):
        if not isinstance(other, UniSeries):
            return self.scale(other)
        N = min(self.N, other.N)
        out = [Fraction(0)] * (N + 1)
        for i, a in enumerate(self.c[: N + 1]):
            if not a:
                continue
            for j in range(0, N + 1 - i):
                b = other.c[j]
                if b:
                    out[i + j] += a * b
        return UniSeries(out, N, self.var)

    __rmul__ = __mul__

    def is_zero(self):
        return not any(self.c)

    def valuation(self):
        for i, a in enumerate(self.c):
            if a:
                return i
        return None

    def derivative(self):
        return UniSeries([self.c[i] * i for i in range(1, len(self.c))],
                         self.N - 1, self.var)

    def theta(self):
        """x * d/dx, same truncation order."""
        return UniSeries([a * i for i, a in enumerate(self.c)], self.N, self.var)

    def compose(self, inner):
        """self(inner(x)) for inner with zero constant term."""
        if inner.c and inner.c[0]:
            raise ValueError("composition needs valuation >= 1")
        N = min(self.N, inner.N)
        acc = UniSeries([0], N, self.var)
        for a in reversed(self.c[: N + 1]):
            acc = acc * inner + UniSeries([a], N, self.var)
        return acc

    def rational_power(self, r):
        """self^r for rational r; needs constant term 1."""
        r = to_fraction(r)
        if not self.c or self.c[0] != 1:
            raise UnsupportedConstantTerm("series power needs constant term 1")
        N = self.N
        out = [Fraction(1)] + [Fraction(0)] * N
        # g = f^r  <=>  f g' = r f' g
        for n in range(1, N + 1):
            s = Fraction(0)
            for k in range(1, n + 1):
                fk = self.c[k] if k < len(self.c) else Fraction(0)
                if fk:
                    s += (r * k - (n - k)) * fk * out[n - k]
            out[n] = s / n
        return UniSeries(out, N, self.var)

    def reciprocal(self):
        if not self.c or not self.c[0]:
            raise ZeroDivisionError("series reciprocal needs unit constant term")
        c0 = self.c[0]
        N = self.N
        out = [1 / c0] + [Fraction(0)] * N
        for n in range(1, N + 1):
            s = Fraction(0)
            for k in range(1, n + 1):
                fk = self.c[k] if k < len(self.c) else Fraction(0)
                if fk:
                    s += fk * out[n - k]
            out[n] = -s / c0
        return UniSeries(out, N, self.var)

    def __str__(self):
        from .kernel import Poly, format_poly
        return format_poly(Poly(self.c), self.var) + " + O(%s^%d)" % (self.var, self.N + 1)

    __repr__ = __str__


class TruncSeries:
    """Box-truncated multivariate series: {exponent tuple: coefficient},
    all exponents <= N."""

    __slots__ = ("n", "N", "d")

    def __init__(self, n, N, d=None):
        self.n = n
        self.N = N
        self.d = {} if d is None else d

    @classmethod
    def from_mpoly(cls, p, N):
        d = {}
        for e, c in p.d.items():
            if max(e, default=0) <= N and c:
                d[e] = to_fraction(c)
        return cls(p.n, N, d)

    def __getitem__(self, e):
        return self.d.get(tuple(e), Fraction(0))

    def __eq__(self, other):
        return (isinstance(other, TruncSeries) and self.n == other.n
                and self.N == other.N and self.d == other.d)

    def __add__(self, other):
        N = min(self.N, other.N)
        d = {}
        for src in (self.d, other.d):
            for e, c in src.items():
                if max(e, default=0) > N:
                    continue
                s = d.get(e, Fraction(0)) + c
                if s:
                    d[e] = s
                elif e in d:
                    del d[e]
        return TruncSeries(self.n, N, d)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, s):
        s = to_fraction(s)
        if not s:
            return TruncSeries(self.n, self.N, {})
        return TruncSeries(self.n, self.N, {e: c * s for e, c in self.d.items()})

    def __mul__(self, other):
        if not isinstance(other, TruncSeries):
            return self.scale(other)
        N = min(self.N, other.N)
        d = {}
        for e1, c1 in self.d.items():
            for e2, c2 in other.d.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                if max(e) > N:
                    continue
                s = d.get(e, Fraction(0)) + c1 * c2
                if s:
                    d[e] = s
                elif e in d:
                    del d[e]
        return TruncSeries(self.n, N, d)

    __rmul__ = __mul__

    def diagonal(self):
        N = self.N
        return UniSeries([self.d.get((m,) * self.n, Fraction(0))
                          for m in range(N + 1)], N, "x")

    def __str__(self):
        from .kernel import format_mpoly
        p = MPoly(self.n, dict(self.d))
        return format_mpoly(p, VARS[: self.n]) + " + O(box %d)" % (self.N + 1)

    __repr__ = __str__


def _mpoly_terms(p, N):
    """[(exponent tuple, coeff)] clipped to the box, constant term first."""
    out = []
    for e, c in sorted(p.d.items(), key=lambda t: (sum(t[0]), t[0])):
        if max(e, default=0) <= N and c:
            out.append((e, c))
    return out


def expand_rational(P, Q, N):
    """Multi-Taylor expansion of P/Q in the (N+1)^n coefficient box.

    P may be an MPoly or an already-expanded TruncSeries (used to divide a
    series by a further polynomial).  Raises NoMultiTaylorExpansion when
    Q(0) = 0.
    """
    n = Q.n
    q0 = Q.constant_term()
    if not q0:
        raise NoMultiTaylorExpansion("denominator vanishes at the origin")
    if isinstance(P, TruncSeries):
        pd = P.d
        p_int = all(isinstance(c, Fraction) and c.denominator == 1 for c in pd.values())
    else:
        pd = {e: c for e, c in P.d.items() if max(e, default=0) <= N}
        p_int = all(to_fraction(c).denominator == 1 for c in pd.values())
    qterms = [(e, c) for e, c in _mpoly_terms(Q, N) if any(e)]
    q_int = all(to_fraction(c).denominator == 1 for _, c in qterms)
    q0f = to_fraction(q0)
    N1 = N + 1
    strides = [N1 ** (n - 1 - i) for i in range(n)]

    int_path = p_int and q_int and q0f.denominator == 1 and abs(q0f.numerator) == 1
    if int_path:
        q0i = q0f.numerator
        qq = [(f, int(to_fraction(c)), sum(a * s for a, s in zip(f, strides)))
              for f, c in qterms]
        pget = {e: int(to_fraction(c)) for e, c in pd.items()}
        zero = 0
    else:
        q0inv = 1 / q0f
        qq = [(f, to_fraction(c), sum(a * s for a, s in zip(f, strides)))
              for f, c in qterms]
        pget = {e: to_fraction(c) for e, c in pd.items()}
        zero = Fraction(0)

    S = [zero] * (N1 ** n)
    idx = 0
    for e in product(range(N1), repeat=n):
        acc = pget.get(e, zero)
        for f, qc, off in qq:
            ok = True
            for a, b in zip(e, f):
                if a < b:
                    ok = False
                    break
            if ok:
                v = S[idx - off]
                if v:
                    acc = acc - qc * v
        if int_path:
            S[idx] = acc if q0i == 1 else -acc
        else:
            S[idx] = acc * q0inv
        idx += 1

    d = {}
    idx = 0
    for e in product(range(N1), repeat=n):
        v = S[idx]
        if v:
            d[e] = Fraction(v) if int_path else v
        idx += 1
    return TruncSeries(n, N, d)


def expand_power(Q, r, N):
    """Box expansion of Q^r for rational r; needs Q(0) = 1.

    From Q * d_i(S) = r * S * d_i(Q):
      g_i S[g] = sum_{0 != f <= g} Q[f] ((r+1) f_i - g_i) S[g-f]
    picking for each target g any axis i with g_i >= 1.
    """
    r = to_fraction(r)
    if Q.constant_term() != 1:
        raise UnsupportedConstantTerm("rational power needs constant term 1")
    n = Q.n
    qterms = [(e, to_fraction(c)) for e, c in _mpoly_terms(Q, N) if any(e)]
    d = {(0,) * n: Fraction(1)}
    for g in sorted(product(range(N + 1), repeat=n), key=lambda e: (sum(e), e)):
        if not any(g):
            continue
        i = next(k for k, gi in enumerate(g) if gi)
        acc = Fraction(0)
        for f, qc in qterms:
            ok = True
            for a, b in zip(g, f):
                if a < b:
                    ok = False
                    break
            if not ok:
                continue
            prev = d.get(tuple(a - b for a, b in zip(g, f)))
            if prev:
                acc += qc * ((r + 1) * f[i] - g[i]) * prev
        if acc:
            d[g] = acc / g[i]
    return TruncSeries(n, N, d)


def series_substitute(target, repl, N=None):
    """Compose: substitute repl[i] (TruncSeries, valuation >= 1) for
    variable i of target.  All replacements share one variable frame."""
    frame = None
    for r in repl:
        if r is not None:
            frame = r
            break
    if frame is None:
        raise ValueError("no replacement series given")
    if N is None:
        N = frame.N
    n2 = frame.n
    out = {}
    cache = [{} for _ in range(target.n)]

    def power(i, k):
        pw = cache[i].get(k)
        if pw is None:
            r = repl[i]
            if r.d.get((0,) * r.n):
                raise ValueError("substitution needs valuation >= 1")
            if k == 1:
                pw = r
            else:
                pw = power(i, k - 1) * r
            cache[i][k] = pw
        return pw

    one = TruncSeries(n2, N, {(0,) * n2: Fraction(1)})
    for e, c in target.d.items():
        term = one.scale(c)
        for i, k in enumerate(e):
            if k:
                term = term * power(i, k)
                if not term.d:
                    break
        for e2, c2 in term.d.items():
            s = out.get(e2, Fraction(0)) + c2
            if s:
                out[e2] = s
            elif e2 in out:
                del out[e2]
    return TruncSeries(n2, N, out)


def diag_rational(P, Q, N):
    """Diagonal of P/Q through t^N (expands the full box)."""
    return expand_rational(P, Q, N).diagonal()


def diag_of_ratpower(base, r, P, Q, N):
    """Diagonal of base^r * P/Q (base polynomial with constant term 1)."""
    S = expand_power(base, r, N)
    if not (isinstance(P, MPoly) and len(P.d) == 1 and P.constant_term() == 1):
        S = S * TruncSeries.from_mpoly(P, N) if isinstance(P, MPoly) else S * P
    T = expand_rational(S, Q, N)
    return T.diagonal()


def _decompose_over_groups(e, groups):
    """Exponent vector of the term in grouped variables, or None.

    groups: list of exponent tuples with disjoint 0/1 supports covering all
    variables.  A term decomposes iff within each group's support its
    exponents agree.
    """
    out = []
    for g in groups:
        vals = {e[i] for i, gi in enumerate(g) if gi}
        if len(vals) != 1:
            return None
        out.append(vals.pop())
    return tuple(out)


def effective_grouping_check(P, Q, groups, N):
    """Is Diag(P/Q) computed by the grouped sub-function?

    groups must multiply to the full variable product (each variable exactly
    once).  Terms of P and Q whose exponents do not decompose over the
    grouping monomials are invisible to the diagonal if and only if the
    diagonals agree -- which is exactly what is tested, through t^N.
    """
    n = Q.n
    total = [0] * n
    for g in groups:
        for i, gi in enumerate(g):
            total[i] += gi
    if total != [1] * n:
        raise ValueError("grouping monomials must multiply to the full "
                         "variable product")
    k = len(groups)

    def regroup(p):
        d = {}
        for e, c in p.d.items():
            e2 = _decompose_over_groups(e, groups)
            if e2 is not None:
                d[e2] = d.get(e2, Fraction(0)) + to_fraction(c)
        return MPoly(k, {e: c for e, c in d.items() if c})

    P2, Q2 = regroup(P), regroup(Q)
    if not Q2.constant_term():
        return False
    d1 = diag_rational(P, Q, N)
    d2 = diag_rational(P2, Q2, N)
    return d1.c == d2.c
