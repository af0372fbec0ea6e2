"""Text formats: expressions, operators, and the small spec grammars.

The expression grammar is conventional (precedence ^ > unary minus > * /
> + -, everything left-associative, parentheses as usual):

    expr     :=  term {('+' | '-') term}
    term     :=  unary {('*' | '/') unary}
    unary    :=  '-' unary | power
    power    :=  atom ['^' exponent]
    exponent :=  INT | '-' INT | '(' ['-'] INT ['/' INT] ')'
    atom     :=  INT | NAME | NAME '(' expr {',' expr} ')' | '(' expr ')'

A quotient of two integer literals is folded into a single rational
constant, so `40/9*x` means (40/9)x.  Rational exponents must be written
with parentheses, `(1-y-z)^(1/3)`.  Variables are drawn from x, y, z, u;
`cos` and `exp` act as truncated series on arguments vanishing at 0.

Operator files use the same tokens with one extra symbol: `Dx` for the
derivative, as in `(27*x^2 - x)*Dx^2 + (54*x - 1)*Dx + 6`, or `T` for
theta = x*Dx, as in `(1)*T^2 + (-27*x)*T^2 + ...`; the two symbols must
not be mixed in one file.  Coefficients are written to the left of the
symbol and the text is read as a commutative polynomial in it, which is
faithful for this shape.
"""

import re
from fractions import Fraction

from .errors import ParseError
from .kernel import MPoly, Poly, RatFunc, format_poly, poly_gcd
from .ode import DiffOp
from .series import TruncSeries, UniSeries, expand_power, expand_rational

VARS = ("x", "y", "z", "u")

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def tokenize(text):
    """[(kind, value, position)]; kind in num/name/op."""
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        if m.group(1) is not None:
            out.append(("num", int(m.group(1)), m.start(1)))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), m.start(2)))
        else:
            ch = m.group(3)
            if ch not in "+-*/^(),;[]":
                raise ParseError("unexpected character %r at position %d"
                                 % (ch, m.start(3)))
            out.append(("op", ch, m.start(3)))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens, text):
        self.toks = tokens
        self.i = 0
        self.text = text

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else ("end", None, len(self.text))

    def take(self):
        t = self.peek()
        self.i += 1
        return t

    def expect(self, value):
        kind, v, pos = self.take()
        if kind != "op" or v != value:
            raise ParseError("expected %r at position %d" % (value, pos))

    def fail(self, what):
        kind, v, pos = self.peek()
        raise ParseError("%s at position %d (found %r)" % (what, pos, v))

    def expr(self):
        node = self.term()
        while True:
            kind, v, _ = self.peek()
            if kind == "op" and v in "+-":
                self.take()
                rhs = self.term()
                node = (("add" if v == "+" else "sub"), node, rhs)
            else:
                return node

    def term(self):
        node = self.unary()
        while True:
            kind, v, _ = self.peek()
            if kind == "op" and v in "*/":
                self.take()
                rhs = self.unary()
                if v == "/" and node[0] == "num" and rhs[0] == "num":
                    if not rhs[1]:
                        raise ParseError("division by the literal zero")
                    node = ("num", node[1] / rhs[1])
                else:
                    node = (("mul" if v == "*" else "div"), node, rhs)
            else:
                return node

    def unary(self):
        kind, v, _ = self.peek()
        if kind == "op" and v == "-":
            self.take()
            node = self.unary()
            if node[0] == "num":
                return ("num", -node[1])
            return ("neg", node)
        return self.power()

    def power(self):
        node = self.atom()
        kind, v, _ = self.peek()
        if kind == "op" and v == "^":
            self.take()
            return ("pow", node, self.exponent())
        return node

    def exponent(self):
        kind, v, pos = self.take()
        if kind == "num":
            return Fraction(v)
        if kind == "op" and v == "-":
            kind, v, pos = self.take()
            if kind != "num":
                raise ParseError("expected integer exponent at position %d" % pos)
            return Fraction(-v)
        if kind == "op" and v == "(":
            sign = 1
            kind, v, pos = self.take()
            if kind == "op" and v == "-":
                sign = -1
                kind, v, pos = self.take()
            if kind != "num":
                raise ParseError("expected integer at position %d" % pos)
            num = v
            den = 1
            kind, v, pos = self.take()
            if kind == "op" and v == "/":
                kind, v, pos = self.take()
                if kind != "num" or v == 0:
                    raise ParseError("expected nonzero integer at position %d" % pos)
                den = v
                kind, v, pos = self.take()
            if kind != "op" or v != ")":
                raise ParseError("expected ')' at position %d" % pos)
            return Fraction(sign * num, den)
        raise ParseError("expected exponent at position %d" % pos)

    def atom(self):
        kind, v, pos = self.take()
        if kind == "num":
            return ("num", Fraction(v))
        if kind == "name":
            k2, v2, _ = self.peek()
            if k2 == "op" and v2 == "(":
                self.take()
                args = [self.expr()]
                while True:
                    k3, v3, p3 = self.take()
                    if k3 == "op" and v3 == ",":
                        args.append(self.expr())
                    elif k3 == "op" and v3 == ")":
                        break
                    else:
                        raise ParseError("expected ',' or ')' at position %d" % p3)
                return ("call", v, tuple(args))
            return ("var", v)
        if kind == "op" and v == "(":
            node = self.expr()
            self.expect(")")
            return node
        raise ParseError("expected a value at position %d" % pos)


def parse_expr(text):
    p = _Parser(tokenize(text), text)
    node = p.expr()
    kind, v, pos = p.peek()
    if kind != "end":
        raise ParseError("trailing input at position %d (%r)" % (pos, v))
    return node


# -- printing, inverse of parsing -------------------------------------------

_LEVEL_ADD, _LEVEL_MUL, _LEVEL_NEG, _LEVEL_POW, _LEVEL_ATOM = 1, 2, 3, 4, 5


def _level(node):
    h = node[0]
    if h in ("add", "sub"):
        return _LEVEL_ADD
    if h in ("mul", "div"):
        return _LEVEL_MUL
    if h == "neg":
        return _LEVEL_NEG
    if h == "pow":
        return _LEVEL_POW
    if h == "num":
        if node[1] < 0:
            # force parentheses right of any binary operator
            return _LEVEL_ADD
        return _LEVEL_MUL if node[1].denominator > 1 else _LEVEL_ATOM
    return _LEVEL_ATOM


def _wrap(node, floor):
    s = format_expr(node)
    return "(" + s + ")" if _level(node) < floor else s


def format_expr(node):
    """Text that reparses to an equal tree (the round-trip invariant)."""
    h = node[0]
    if h == "num":
        return str(node[1])
    if h == "var":
        return node[1]
    if h in ("add", "sub"):
        op = " + " if h == "add" else " - "
        return _wrap(node[1], _LEVEL_ADD) + op + _wrap(node[2], _LEVEL_ADD + 1)
    if h in ("mul", "div"):
        op = "*" if h == "mul" else "/"
        return _wrap(node[1], _LEVEL_MUL) + op + _wrap(node[2], _LEVEL_MUL + 1)
    if h == "neg":
        return "-" + _wrap(node[1], _LEVEL_NEG)
    if h == "pow":
        r = node[2]
        if r.denominator == 1 and r >= 0:
            e = "^%d" % r
        else:
            e = "^(%s)" % r
        return _wrap(node[1], _LEVEL_ATOM) + e
    if h == "call":
        return "%s(%s)" % (node[1], ", ".join(format_expr(a) for a in node[2]))
    raise ValueError("unknown node %r" % (h,))


def variable_names(node):
    h = node[0]
    if h == "var":
        return {node[1]}
    if h in ("add", "sub", "mul", "div"):
        return variable_names(node[1]) | variable_names(node[2])
    if h in ("neg",):
        return variable_names(node[1])
    if h == "pow":
        return variable_names(node[1])
    if h == "call":
        out = set()
        for a in node[2]:
            out |= variable_names(a)
        return out
    return set()


def _nvars_for(node):
    names = variable_names(node)
    for nm in names:
        if nm not in VARS:
            raise ValueError("unknown variable %r (have x, y, z, u)" % nm)
    return max((VARS.index(nm) for nm in names), default=0) + 1


# -- exact rational evaluation ----------------------------------------------

class _NonRational(Exception):
    pass


def to_rational(node, nvars=None):
    """(numerator, denominator) MPoly pair; ValueError when the tree has a
    genuinely non-rational node (rational power, cos, exp)."""
    n = _nvars_for(node) if nvars is None else nvars
    try:
        num, den = _rat(node, n)
    except _NonRational as e:
        raise ValueError(str(e))
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    return num, den


def _rat(node, n):
    h = node[0]
    one = MPoly.const(1, n)
    if h == "num":
        return MPoly.const(node[1], n), one
    if h == "var":
        if node[1] not in VARS[:n]:
            raise ValueError("unknown variable %r" % node[1])
        return MPoly.var(VARS.index(node[1]), n), one
    if h == "neg":
        a, b = _rat(node[1], n)
        return -a, b
    if h in ("add", "sub"):
        a1, b1 = _rat(node[1], n)
        a2, b2 = _rat(node[2], n)
        a2 = -a2 if h == "sub" else a2
        return a1 * b2 + a2 * b1, b1 * b2
    if h == "mul":
        a1, b1 = _rat(node[1], n)
        a2, b2 = _rat(node[2], n)
        return a1 * a2, b1 * b2
    if h == "div":
        a1, b1 = _rat(node[1], n)
        a2, b2 = _rat(node[2], n)
        if a2.is_zero():
            raise ZeroDivisionError("division by zero")
        return a1 * b2, b1 * a2
    if h == "pow":
        r = node[2]
        if r.denominator != 1:
            raise _NonRational("rational power is not a rational function")
        a, b = _rat(node[1], n)
        k = int(r)
        if k < 0:
            a, b, k = b, a, -k
            if a.is_zero():
                raise ZeroDivisionError("negative power of zero")
        return a ** k, b ** k
    if h == "call":
        raise _NonRational("%s(...) is not a rational function" % node[1])
    raise ValueError("unknown node %r" % (h,))


def to_mpoly(node, nvars=None):
    """Polynomial evaluation; rejects division by non-constants."""
    num, den = to_rational(node, nvars)
    if den.total_degree() > 0:
        raise ValueError("expression is not polynomial")
    c = den.constant_term()
    return num.map_coeffs(lambda v: v / c) if c != 1 else num


def to_ratfunc(node, var="x"):
    """Univariate rational function of `var`."""
    names = variable_names(node)
    if not names <= {var}:
        raise ValueError("expected a function of %s only, found %s"
                         % (var, ", ".join(sorted(names - {var}))))
    sub = _rename(node, var, "x")
    num, den = to_rational(sub, nvars=1)
    return RatFunc(_poly1(num), _poly1(den), var)


def _rename(node, old, new):
    h = node[0]
    if h == "var":
        return ("var", new) if node[1] == old else node
    if h in ("add", "sub", "mul", "div"):
        return (h, _rename(node[1], old, new), _rename(node[2], old, new))
    if h == "neg":
        return (h, _rename(node[1], old, new))
    if h == "pow":
        return (h, _rename(node[1], old, new), node[2])
    if h == "call":
        return (h, node[1], tuple(_rename(a, old, new) for a in node[2]))
    return node


def _poly1(m):
    c = [Fraction(0)] * (m.degree(0) + 1)
    for e, v in m.d.items():
        c[e[0]] = v
    return Poly(c)


# -- series evaluation -------------------------------------------------------

def to_series(node, N, nvars=None):
    """Box-truncated multivariate series of the expression through
    exponent N in every variable."""
    n = _nvars_for(node) if nvars is None else nvars
    num, den = _ser(node, N, n)
    if isinstance(num, MPoly) and den.total_degree() == 0:
        c = den.constant_term()
        return TruncSeries.from_mpoly(num, N).scale(1 / c)
    return expand_rational(num, den, N)


def _has_series_node(node):
    h = node[0]
    if h == "call":
        return True
    if h == "pow":
        return node[2].denominator != 1 or _has_series_node(node[1])
    if h in ("add", "sub", "mul", "div"):
        return _has_series_node(node[1]) or _has_series_node(node[2])
    if h == "neg":
        return _has_series_node(node[1])
    return False


def _invert_node(node):
    """Structural reciprocal, used to move series factors out of
    denominators: 1/(f^(1/3) * g) -> f^(-1/3) * (1/g)."""
    h = node[0]
    if h == "num":
        if not node[1]:
            raise ZeroDivisionError("division by zero")
        return ("num", 1 / node[1])
    if h == "neg":
        return ("neg", _invert_node(node[1]))
    if h == "pow":
        return ("pow", node[1], -node[2])
    if h == "mul":
        return ("mul", _invert_node(node[1]), _invert_node(node[2]))
    if h == "div":
        return ("div", node[2], node[1])
    return None


def _ser(node, N, n):
    h = node[0]
    one = MPoly.const(1, n)
    if h in ("num", "var"):
        return _rat(node, n)
    if h == "neg":
        a, b = _ser(node[1], N, n)
        return (a.scale(-1) if isinstance(a, TruncSeries) else -a), b
    if h in ("add", "sub", "mul", "div", "pow"):
        if not _has_series_node(node):
            try:
                return _rat(node, n)
            except _NonRational:  # pragma: no cover - guarded by the check
                pass
    if h in ("add", "sub"):
        a1, b1 = _ser(node[1], N, n)
        a2, b2 = _ser(node[2], N, n)
        left = _mul_any(a1, b2, N)
        right = _mul_any(a2, b1, N)
        if h == "sub":
            right = right.scale(-1) if isinstance(right, TruncSeries) else -right
        if isinstance(left, MPoly) and isinstance(right, MPoly):
            return left + right, b1 * b2
        return _lift(left, N) + _lift(right, N), b1 * b2
    if h == "mul":
        a1, b1 = _ser(node[1], N, n)
        a2, b2 = _ser(node[2], N, n)
        return _mul_any(a1, a2, N), b1 * b2
    if h == "div":
        if _has_series_node(node[2]):
            inv = _invert_node(node[2])
            if inv is None:
                raise ValueError("cannot divide by a truncated series; "
                                 "rewrite with a negative exponent")
            return _ser(("mul", node[1], inv), N, n)
        a1, b1 = _ser(node[1], N, n)
        a2, b2 = _rat(node[2], n)
        if a2.is_zero():
            raise ZeroDivisionError("division by zero")
        return _mul_any(a1, b2, N), b1 * a2
    if h == "pow":
        r = node[2]
        if r.denominator == 1:
            k = int(r)
            a, b = _ser(node[1], N, n)
            if k < 0:
                if isinstance(a, TruncSeries):
                    raise ValueError("negative power of a truncated series")
                a, b, k = b, a, -k
            if isinstance(a, MPoly):
                return a ** k, b ** k
            out = TruncSeries.from_mpoly(one, N)
            for _ in range(k):
                out = out * a
            return out, b ** k
        base_num, base_den = _rat_base(node[1], n)
        s = expand_power(base_num, r, N)
        if base_den.total_degree() > 0 or base_den.constant_term() != 1:
            s = s * expand_power(base_den, -r, N)
        return s, one
    if h == "call":
        return _call_series(node, N, n), one
    raise ValueError("unknown node %r" % (h,))


def _rat_base(node, n):
    try:
        return _rat(node, n)
    except _NonRational:
        raise ValueError("rational power needs a rational base")


def _lift(v, N):
    return v if isinstance(v, TruncSeries) else TruncSeries.from_mpoly(v, N)


def _mul_any(a, b, N):
    if isinstance(a, MPoly) and isinstance(b, MPoly):
        return a * b
    return _lift(a, N) * _lift(b, N)


def _call_series(node, N, n):
    name, args = node[1], node[2]
    if name not in ("cos", "exp") or len(args) != 1:
        raise ValueError("unknown function %s/%d" % (name, len(args)))
    s = to_series(args[0], N, n)
    if s[(0,) * n]:
        raise ValueError("%s(...) needs an argument vanishing at the origin"
                         % name)
    acc = TruncSeries.from_mpoly(MPoly.const(1, n), N)
    p = s
    k = 1
    fact = Fraction(1)
    while p.d and k <= n * N:
        fact *= k
        if name == "exp":
            acc = acc + p.scale(1 / fact)
        elif k % 2 == 0:
            acc = acc + p.scale(Fraction((-1) ** (k // 2)) / fact)
        p = p * s
        k += 1
    return acc


def to_uniseries(node, var, N):
    """Univariate series in `var` (cos/exp welcome), as a UniSeries."""
    names = variable_names(node)
    if not names <= {var}:
        raise ValueError("expected a function of %s only" % var)
    t = to_series(_rename(node, var, "x"), N, nvars=1)
    return UniSeries([t.d.get((m,), Fraction(0)) for m in range(N + 1)], N, var)


# -- operator text -----------------------------------------------------------

class _OpPoly:
    """Commutative polynomial in one operator symbol over Q(x)."""

    def __init__(self, d, symbol=None):
        self.d = {k: v for k, v in d.items() if v}
        self.symbol = symbol

    def _join(self, other):
        if self.symbol and other.symbol and self.symbol != other.symbol:
            raise ParseError("operator text mixes Dx and T")
        return self.symbol or other.symbol

    def add(self, other, sign=1):
        d = dict(self.d)
        for k, v in other.d.items():
            d[k] = d.get(k, RatFunc.const(0)) + sign * v
        return _OpPoly(d, self._join(other))

    def mul(self, other):
        d = {}
        for k1, v1 in self.d.items():
            for k2, v2 in other.d.items():
                k = k1 + k2
                d[k] = d.get(k, RatFunc.const(0)) + v1 * v2
        return _OpPoly(d, self._join(other))

    def div(self, other):
        if set(other.d) - {0}:
            raise ParseError("cannot divide by the operator symbol")
        c = other.d.get(0)
        if not c:
            raise ZeroDivisionError("division by zero")
        return _OpPoly({k: v / c for k, v in self.d.items()}, self.symbol)

    def pow(self, k):
        out = _OpPoly({0: RatFunc.const(1)})
        base = self
        for _ in range(k):
            out = out.mul(base)
        return out


def _op_eval(node):
    h = node[0]
    if h == "num":
        return _OpPoly({0: RatFunc.const(node[1])})
    if h == "var":
        if node[1] == "x":
            return _OpPoly({0: RatFunc.variable()})
        if node[1] in ("Dx", "T"):
            return _OpPoly({1: RatFunc.const(1)}, node[1])
        raise ParseError("unknown symbol %r in operator text" % node[1])
    if h == "neg":
        return _OpPoly({0: RatFunc.const(0)}).add(_op_eval(node[1]), -1)
    if h == "add":
        return _op_eval(node[1]).add(_op_eval(node[2]))
    if h == "sub":
        return _op_eval(node[1]).add(_op_eval(node[2]), -1)
    if h == "mul":
        return _op_eval(node[1]).mul(_op_eval(node[2]))
    if h == "div":
        return _op_eval(node[1]).div(_op_eval(node[2]))
    if h == "pow":
        r = node[2]
        if r.denominator != 1 or r < 0:
            raise ParseError("operator powers must be nonnegative integers")
        return _op_eval(node[1]).pow(int(r))
    raise ParseError("%s(...) not allowed in operator text" % (node[1],))


def parse_operator(text):
    """DiffOp from D-form or theta-form text (see the module docstring)."""
    body = " ".join(line for line in text.splitlines()
                    if not line.lstrip().startswith("#"))
    if not body.strip():
        raise ParseError("empty operator text")
    p = _op_eval(parse_expr(body))
    if not p.d:
        return DiffOp([])
    if p.symbol in (None, "Dx"):
        top = max(p.d)
        return DiffOp.from_coeffs([p.d.get(k, RatFunc.const(0))
                                   for k in range(top + 1)])
    # theta-form: q_k(x) collected by theta power; clear denominators and
    # transpose into x-power slices p_m(theta)
    top = max(p.d)
    den = Poly.of(1)
    for v in p.d.values():
        den = den * (v.den // poly_gcd(den, v.den))
    qs = []
    for k in range(top + 1):
        v = p.d.get(k, RatFunc.const(0))
        q, r = (v.num * den).divmod(v.den)
        assert not r
        qs.append(q)
    M = max(q.degree() for q in qs)
    pms = [Poly([qs[k][m] for k in range(top + 1)]) for m in range(M + 1)]
    return DiffOp.from_theta_form(pms)


def parse_rational_list(text):
    """Comma-separated exact rationals -> [Fraction]."""
    vals = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        node = parse_expr(part)
        if node[0] != "num":
            raise ParseError("expected a rational constant, found %r" % part)
        vals.append(node[1])
    if not vals:
        raise ParseError("empty coefficient list")
    return vals


def format_ratfunc(f, var=None):
    """num/den text with an integer-primitive denominator (nicer than the
    monic-denominator internal form, same value)."""
    var = var or f.var
    den = f.den
    scale = Fraction(1)
    if den.degree() >= 0:
        from math import gcd, lcm
        l = lcm(*(c.denominator for c in den.c)) if den.c else 1
        g = gcd(*(abs(c.numerator) for c in den.c if c)) or 1
        scale = Fraction(l, g)
    num = f.num.map(lambda c: c * scale)
    den = den.map(lambda c: c * scale)
    if den.degree() == 0 and den.c[0] == 1:
        return format_poly(num, var)
    return "(%s)/(%s)" % (format_poly(num, var), format_poly(den, var))
