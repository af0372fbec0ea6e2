"""Structured transformations of the variable tuple (x, y, z, ...).

Every map kind is stored with enough structure that the product identity
x1'...xk' = (x1...xk)^d can be checked symbolically: each coordinate is a
pair (numerator MPoly, denominator MPoly), with a rational or series scale
q kept as an extra opaque variable so it cancels literally, no gcd needed.

Triangular scalings (x, y*q(x), z/q(x)) leave the diagonal invariant --
that is the theorem these classes exist to exercise -- monomial maps send
it to the x -> x^d reindexing, and the Hadamard-style inversion lift has
no series action at the origin at all.
"""

from fractions import Fraction
from math import gcd as _igcd

from .errors import OriginNotPreserved
from .kernel import MPoly, RatFunc, to_fraction
from .series import TruncSeries, UniSeries, expand_rational, series_substitute


class TriangularScale:
    """Keep the pivot, multiply one axis by q(pivot), divide another.

    q may be a RatFunc or a UniSeries in the pivot variable with q(0) != 0;
    only the rational form can be applied to rational functions.
    """

    def __init__(self, pivot, up, down, q, nvars=3):
        if len({pivot, up, down}) != 3:
            raise ValueError("pivot/up/down must be three distinct axes")
        self.nvars = nvars
        self.pivot = pivot
        self.up = up
        self.down = down
        self.q = q
        if isinstance(q, RatFunc):
            if not q.num.eval(Fraction(0)) or not q.den.eval(Fraction(0)):
                raise ValueError("q must be finite and nonzero at 0")
        elif isinstance(q, UniSeries):
            if not q.c or not q.c[0]:
                raise ValueError("q must be nonzero at 0")
        else:
            raise TypeError("q must be a RatFunc or a UniSeries")

    def is_rational(self):
        return isinstance(self.q, RatFunc)

    def __eq__(self, other):
        return (isinstance(other, TriangularScale)
                and (self.pivot, self.up, self.down) ==
                    (other.pivot, other.up, other.down)
                and type(self.q) is type(other.q)
                and (self.q == other.q if self.is_rational()
                     else self.q.c == other.q.c))

    def inverse(self):
        if self.is_rational():
            qi = RatFunc(self.q.den, self.q.num, self.q.var)
        else:
            qi = self.q.reciprocal()
        return TriangularScale(self.pivot, self.up, self.down, qi, self.nvars)

    def _coords_symbolic(self):
        # one extra slot (index nvars) standing for the opaque value q(pivot)
        n = self.nvars + 1
        one = MPoly.const(1, n)
        qv = MPoly.var(self.nvars, n)
        out = []
        for i in range(self.nvars):
            xi = MPoly.var(i, n)
            if i == self.up:
                out.append((xi * qv, one))
            elif i == self.down:
                out.append((xi, qv))
            else:
                out.append((xi, one))
        return out

    def coords_rational(self):
        if not self.is_rational():
            raise TypeError("series-valued q has no rational coordinates")
        n = self.nvars
        qnum = _poly_in_var(self.q.num, self.pivot, n)
        qden = _poly_in_var(self.q.den, self.pivot, n)
        out = []
        for i in range(n):
            xi = MPoly.var(i, n)
            if i == self.up:
                out.append((xi * qnum, qden))
            elif i == self.down:
                out.append((xi * qden, qnum))
            else:
                out.append((xi, MPoly.const(1, n)))
        return out

    def _q_series(self, N):
        if self.is_rational():
            num = UniSeries(list(self.q.num.c), N)
            den = UniSeries(list(self.q.den.c), N)
            return num * den.reciprocal()
        if self.q.N < N:
            raise ValueError("q known through order %d, need %d"
                             % (self.q.N, N))
        return self.q.truncate(N)

    def coords_series(self, N):
        qs = self._q_series(N)
        qup = _uniseries_trunc(qs, self.pivot, self.nvars, N)
        qdn = _uniseries_trunc(qs.reciprocal(), self.pivot, self.nvars, N)
        out = []
        for i in range(self.nvars):
            xi = TruncSeries.from_mpoly(MPoly.var(i, self.nvars), N)
            if i == self.up:
                out.append(xi * qup)
            elif i == self.down:
                out.append(xi * qdn)
            else:
                out.append(xi)
        return out


class Monomial:
    """Coordinate i maps to prod_j x_j^(M[i][j]); M integer (negative
    entries put the variable in the denominator), nonsingular."""

    def __init__(self, matrix):
        self.matrix = [list(map(int, row)) for row in matrix]
        self.nvars = len(self.matrix)
        if any(len(r) != self.nvars for r in self.matrix):
            raise ValueError("exponent matrix must be square")
        if _int_det(self.matrix) == 0:
            raise ValueError("exponent matrix must be nonsingular")

    def is_rational(self):
        return True

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.matrix == other.matrix

    def inverse(self):
        det = _int_det(self.matrix)
        if det not in (1, -1):
            raise ValueError("monomial map invertible only for det = +-1")
        adj = _int_adjugate(self.matrix)
        return Monomial([[a * det for a in row] for row in adj])

    def coords_rational(self):
        n = self.nvars
        out = []
        for row in self.matrix:
            num = MPoly.const(1, n)
            den = MPoly.const(1, n)
            for j, e in enumerate(row):
                if e > 0:
                    num = num * MPoly.var(j, n) ** e
                elif e < 0:
                    den = den * MPoly.var(j, n) ** (-e)
            out.append((num, den))
        return out

    _coords_symbolic = coords_rational

    def coords_series(self, N):
        if any(e < 0 for row in self.matrix for e in row):
            raise OriginNotPreserved(
                "monomial map with negative exponents has no series action")
        return [TruncSeries.from_mpoly(num, N)
                for num, _ in self.coords_rational()]


class HadamardLift:
    """Invert a set of axes and absorb their squares into one compensating
    axis: inverted = {0, 1}, comp = 2 is (1/x, 1/y, x^2 y^2 z).  The image
    of the origin is not the origin, so there is no series action."""

    def __init__(self, inverted, comp, nvars=3):
        self.nvars = nvars
        self.inverted = sorted(set(inverted))
        self.comp = comp
        if comp in self.inverted:
            raise ValueError("compensating axis cannot be inverted")

    def is_rational(self):
        return True

    def __eq__(self, other):
        return (isinstance(other, HadamardLift)
                and (self.inverted, self.comp) == (other.inverted, other.comp))

    def inverse(self):
        return HadamardLift(self.inverted, self.comp, self.nvars)

    def coords_rational(self):
        n = self.nvars
        one = MPoly.const(1, n)
        out = []
        for i in range(n):
            if i in self.inverted:
                out.append((one, MPoly.var(i, n)))
            elif i == self.comp:
                m = MPoly.var(i, n)
                for j in self.inverted:
                    m = m * MPoly.var(j, n) ** 2
                out.append((m, one))
            else:
                out.append((MPoly.var(i, n), one))
        return out

    _coords_symbolic = coords_rational

    def coords_series(self, N):
        raise OriginNotPreserved(
            "inversion lift does not fix the origin; no series action")


class CollineationLift:
    """(l1/l0, l2/l0, xyz l0^2/(l1 l2)) for linear forms l_i in (x, y),
    l0(0,0) != 0.  With polynomial_third the last coordinate is stored as
    z*l0^2 instead -- the two agree when l1, l2 are the plain variables."""

    def __init__(self, l0, l1, l2, polynomial_third=False):
        self.l0 = l0
        self.l1 = l1
        self.l2 = l2
        self.polynomial_third = polynomial_third
        self.nvars = 3
        if not l0.constant_term():
            raise ValueError("l0 must not vanish at the origin")
        for l in (l0, l1, l2):
            if l.is_zero() or l.total_degree() > 1:
                raise ValueError("l0, l1, l2 must be nonzero linear forms")
            if l.degree(2) > 0:
                raise ValueError("linear forms must not involve the third axis")

    def is_rational(self):
        return True

    def __eq__(self, other):
        return (isinstance(other, CollineationLift)
                and (self.l0, self.l1, self.l2, self.polynomial_third) ==
                    (other.l0, other.l1, other.l2, other.polynomial_third))

    def inverse(self):
        raise ValueError("collineation lifts are not inverted here")

    def coords_rational(self):
        x, y, z = (MPoly.var(i, 3) for i in range(3))
        one = MPoly.const(1, 3)
        if self.polynomial_third:
            third = (z * self.l0 ** 2, one)
        else:
            third = (x * y * z * self.l0 ** 2, self.l1 * self.l2)
        return [(self.l1, self.l0), (self.l2, self.l0), third]

    _coords_symbolic = coords_rational

    def coords_series(self, N):
        out = []
        for num, den in self.coords_rational():
            num, den = reduce_pair(num, den)
            if not den.constant_term():
                raise OriginNotPreserved("image coordinate has no expansion "
                                         "at the origin")
            t = TruncSeries.from_mpoly(num, N)
            t = t * _trunc_reciprocal(TruncSeries.from_mpoly(den, N), N)
            if t.d.get((0,) * 3):
                raise OriginNotPreserved("coordinate does not vanish at 0")
            out.append(t)
        return out


class Composite:
    """Ordered list, applied left to right: x -> m1(x) -> m2(m1(x)) ..."""

    def __init__(self, maps):
        flat = []
        for m in maps:
            if isinstance(m, Composite):
                flat.extend(m.maps)
            else:
                flat.append(m)
        if not flat:
            raise ValueError("empty composite")
        self.maps = flat
        self.nvars = flat[0].nvars
        if any(m.nvars != self.nvars for m in flat):
            raise ValueError("maps act on different variable counts")

    def is_rational(self):
        return all(m.is_rational() for m in self.maps)

    def __eq__(self, other):
        return isinstance(other, Composite) and self.maps == other.maps

    def inverse(self):
        return Composite([m.inverse() for m in reversed(self.maps)])


def compose(maps):
    return Composite(list(maps))


def invert(m):
    return m.inverse()


# -- helpers -----------------------------------------------------------------

def _poly_in_var(p, var, nvars):
    """Embed a univariate Poly into the given variable slot."""
    d = {}
    for k, a in enumerate(p.c):
        if a:
            e = [0] * nvars
            e[var] = k
            d[tuple(e)] = a
    return MPoly(nvars, d)


def _uniseries_trunc(s, var, nvars, N):
    d = {}
    for k, a in enumerate(s.c[: N + 1]):
        if a:
            e = [0] * nvars
            e[var] = k
            d[tuple(e)] = a
    return TruncSeries(nvars, N, d)


def _trunc_reciprocal(t, N):
    """Reciprocal of a box-truncated series with nonzero constant term."""
    c0 = t.d.get((0,) * t.n, Fraction(0))
    if not c0:
        raise ZeroDivisionError("series reciprocal needs nonzero constant")
    rest = TruncSeries(t.n, N, {e: -c / c0 for e, c in t.d.items() if any(e)})
    unit = TruncSeries(t.n, N, {(0,) * t.n: 1 / c0})
    acc = unit
    pw = unit
    for _ in range(t.n * N):  # box terms can reach total degree n*N
        pw = pw * rest
        if not pw.d:
            break
        acc = acc + pw
    return acc


def _int_det(m):
    n = len(m)
    if n == 1:
        return m[0][0]
    det = 0
    for j in range(n):
        if m[0][j]:
            minor = [[m[i][k] for k in range(n) if k != j]
                     for i in range(1, n)]
            det += (-1) ** j * m[0][j] * _int_det(minor)
    return det


def _int_adjugate(m):
    n = len(m)
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[m[r][c] for c in range(n) if c != i]
                     for r in range(n) if r != j]
            adj[i][j] = (-1) ** (i + j) * (_int_det(minor) if minor else 1)
    return adj


# -- application -------------------------------------------------------------

def _substitute_cleared(P, coords, degs):
    """P with x_i -> num_i/den_i, multiplied through by prod den_i^degs[i]."""
    n = len(coords)
    nv = coords[0][0].n
    out = MPoly(nv, {})
    ncache = [dict() for _ in range(n)]
    dcache = [dict() for _ in range(n)]

    def power(cache, base, k):
        if k not in cache:
            cache[k] = base ** k
        return cache[k]

    for e, c in P.d.items():
        term = MPoly.const(c, nv)
        for i in range(n):
            ni, di = coords[i]
            if e[i]:
                term = term * power(ncache[i], ni, e[i])
            if degs[i] - e[i]:
                term = term * power(dcache[i], di, degs[i] - e[i])
        out = out + term
    return out


def reduce_pair(num, den):
    """Strip monomial factors shared by num and den, then scale so den is
    integer-primitive with a deterministic sign."""
    n = num.n
    vmins = []
    for i in range(n):
        vm = min((e[i] for e in num.d), default=0)
        vm = min(vm, min((e[i] for e in den.d), default=0))
        vmins.append(vm)
    if any(vmins):
        def shift(p):
            return MPoly(n, {tuple(e[i] - vmins[i] for i in range(n)): c
                             for e, c in p.d.items()})
        num, den = shift(num), shift(den)
    cn, cd = 0, 1
    for c in den.d.values():
        f = to_fraction(c)
        cn = _igcd(cn, f.numerator)
        cd = cd * f.denominator // _igcd(cd, f.denominator)
    if cn:
        scale = Fraction(cd, cn)
        if den.d[min(den.d)] * scale < 0:
            scale = -scale
        num = num.map_coeffs(lambda c: c * scale)
        den = den.map_coeffs(lambda c: c * scale)
    return num, den


def same_rational(P1, Q1, P2, Q2):
    """Equality of P1/Q1 and P2/Q2 by cross-multiplication (the pairs
    returned by apply_to_rational are content-reduced, not gcd-canonical)."""
    return P1 * Q2 == P2 * Q1


def apply_to_rational(m, P, Q):
    """(P', Q') with P'/Q' = (P/Q) after the substitution, denominators
    cleared and common monomial/content factors stripped."""
    if isinstance(m, Composite):
        for part in m.maps:
            P, Q = apply_to_rational(part, P, Q)
        return P, Q
    if not m.is_rational():
        raise TypeError("map has series data; use apply_to_series")
    coords = m.coords_rational()
    n = len(coords)
    degs = [max(P.degree(i), Q.degree(i), 0) for i in range(n)]
    num = _substitute_cleared(P, coords, degs)
    den = _substitute_cleared(Q, coords, degs)
    return reduce_pair(num, den)


def apply_to_series(m, source, N):
    """Image of the source (a (P, Q) pair or an expanded TruncSeries) as a
    truncated series; the map must fix the origin."""
    if isinstance(source, TruncSeries):
        base = source
    else:
        P, Q = source
        base = expand_rational(P, Q, N)
    if isinstance(m, Composite):
        out = base
        for part in m.maps:
            out = apply_to_series(part, out, N)
        return out
    repl = m.coords_series(N)
    for r in repl:
        if r.d.get((0,) * r.n):
            raise OriginNotPreserved("map does not fix the origin")
    return series_substitute(base, repl, N)


def preserves_product(m):
    """The positive integer d with x1'...xk' = (x1...xk)^d, verified as a
    symbolic polynomial identity (a series-valued q is treated as an
    opaque extra variable, so it must cancel literally)."""
    if isinstance(m, Composite):
        d = 1
        for part in m.maps:
            d *= preserves_product(part)
        return d
    coords = m._coords_symbolic()
    nv = coords[0][0].n
    pnum = MPoly.const(1, nv)
    pden = MPoly.const(1, nv)
    for ni, di in coords:
        pnum = pnum * ni
        pden = pden * di
    dd = pnum.degree(0) - pden.degree(0)
    if dd <= 0:
        raise ValueError("product is not a positive power of the variables")
    prod = MPoly.const(1, nv)
    for i in range(m.nvars):
        prod = prod * MPoly.var(i, nv) ** dd
    if pnum != prod * pden:
        raise ValueError("coordinate product is not a pure power of x1...xk")
    return dd


class InvarianceReport:
    def __init__(self, equal, first_divergence, d):
        self.equal = equal
        self.first_divergence = first_divergence
        self.d = d


def invariance_report(P, Q, m, N):
    """Compare Diag(P/Q) against the diagonal of the image through x^N.

    Maps with product power d are compared against the source diagonal
    reindexed x -> x^d (d = 1 is plain equality).
    """
    d = preserves_product(m)
    src = expand_rational(P, Q, N).diagonal()
    if isinstance(m, Composite) or not m.is_rational():
        img = apply_to_series(m, (P, Q), N)
    else:
        P2, Q2 = apply_to_rational(m, P, Q)
        img = expand_rational(P2, Q2, N)
    idiag = img.diagonal()
    expect = [Fraction(0)] * (N + 1)
    for i, a in enumerate(src.c):
        if i * d > N:
            break
        expect[i * d] = a
    first = None
    for i in range(N + 1):
        if idiag.c[i] != expect[i]:
            first = i
            break
    return InvarianceReport(first is None, first, d)
