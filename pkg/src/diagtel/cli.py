"""Command-line front end.

Every subcommand reads exact input (expressions, operator files, series
coefficient lists), runs one operation, and writes either human-readable
text (default) or a versioned JSON document (--format structured) to
stdout.  Diagnostics and error reports go to stderr; the exit status is 0
exactly when no error occurred.  Numeric defaults follow
flags > environment > built-ins:

    --terms      DIAGTEL_TERMS      24   series coefficients to compute
    --max-order  DIAGTEL_MAX_ORDER  6    guessing: operator order bound
    --max-deg    DIAGTEL_MAX_DEG    8    guessing: coefficient degree bound
    --hom-deg    DIAGTEL_HOM_DEG    12   intertwiner degree bound
    --format     DIAGTEL_FORMAT     text
    --seed       DIAGTEL_SEED       0    recorded for randomized consumers
"""

import argparse
import json
import os
import sys
from fractions import Fraction

from . import birat, curvegeom, expr, ode, special
from .errors import DiagtelError, NotFound
from .guess import GuessConfig, guess_and_certify, guess_ode
from .kernel import format_mpoly
from .ode import format_operator_d, format_operator_theta
from .series import UniSeries, diag_rational, effective_grouping_check

FORMAT_VERSION = "1"

_DEFAULTS = {
    "terms": 24,
    "max_order": 6,
    "max_deg": 8,
    "hom_deg": 12,
    "format": "text",
    "seed": 0,
}
_ENV = {
    "terms": "DIAGTEL_TERMS",
    "max_order": "DIAGTEL_MAX_ORDER",
    "max_deg": "DIAGTEL_MAX_DEG",
    "hom_deg": "DIAGTEL_HOM_DEG",
    "format": "DIAGTEL_FORMAT",
    "seed": "DIAGTEL_SEED",
}


class UsageError(Exception):
    pass


def _setting(args, key):
    """flag > environment > default, with validation."""
    v = getattr(args, key, None)
    if v is not None:
        return v
    raw = os.environ.get(_ENV[key])
    if raw is None:
        return _DEFAULTS[key]
    if key == "format":
        if raw not in ("text", "structured"):
            raise UsageError("%s must be text or structured, not %r"
                             % (_ENV[key], raw))
        return raw
    try:
        n = int(raw)
    except ValueError:
        raise UsageError("%s must be an integer, not %r" % (_ENV[key], raw))
    if key != "seed" and n < 1:
        raise UsageError("%s must be positive" % _ENV[key])
    return n


def _positive(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _read_operator(path):
    try:
        with open(path) as fh:
            return expr.parse_operator(fh.read())
    except OSError as e:
        raise UsageError("cannot read operator file %s: %s" % (path, e))


def _op_doc(op):
    return {"d_form": format_operator_d(op),
            "theta_form": format_operator_theta(op),
            "order": op.order()}


def _series_strings(c):
    return [str(v) for v in c]


def _guess_config(args):
    return GuessConfig(max_order=_setting(args, "max_order"),
                       max_coeff_degree=_setting(args, "max_deg"),
                       verification_margin=args.margin,
                       search_order=args.strategy)


def _parse_map(text, terms):
    """tri(pivot; up,down; q) or mono([[row],[row],[row]])."""
    text = text.strip()
    if text.startswith("tri(") and text.endswith(")"):
        parts = text[4:-1].split(";")
        if len(parts) != 3:
            raise UsageError("tri() takes pivot; up,down; q")
        names = [p.strip() for p in (parts[0:1] + parts[1].split(","))]
        if len(names) != 3 or sorted(names) != ["x", "y", "z"]:
            raise UsageError("tri() axes must name x, y, z once each")
        pivot, up, down = (expr.VARS.index(nm) for nm in names)
        qnode = expr.parse_expr(parts[2])
        try:
            q = expr.to_ratfunc(qnode, names[0])
        except ValueError:
            q = expr.to_uniseries(qnode, names[0], terms - 1)
        return birat.TriangularScale(pivot, up, down, q)
    if text.startswith("mono(") and text.endswith(")"):
        try:
            rows = json.loads(text[5:-1])
        except ValueError as e:
            raise UsageError("mono() expects a JSON integer matrix: %s" % e)
        return birat.Monomial(rows)
    raise UsageError("map must be tri(...) or mono(...), got %r" % text)


def _rational_input(text, nvars=None):
    node = expr.parse_expr(text)
    return expr.to_rational(node, nvars)


# -- subcommand handlers: each returns (result dict, text lines) -------------

def cmd_diag(args):
    N = _setting(args, "terms") - 1
    node = expr.parse_expr(args.expression)
    n = max(expr._nvars_for(node), 1)
    d = expr.to_series(node, N, n).diagonal()
    return ({"coefficients": _series_strings(d.c),
             "eliminated_variables": n - 1},
            ["diagonal: " + ", ".join(_series_strings(d.c))])


def _describe_guess(g):
    doc = {"order": g.order, "coeff_degree": g.coeff_degree,
           "terms_used": g.terms_used, "terms_verified": g.terms_verified}
    doc.update(_op_doc(g.operator))
    lines = ["order: %d" % g.order,
             "coefficient degree: %d" % g.coeff_degree,
             "terms used: %d (verified on %d more)"
             % (g.terms_used, g.terms_verified),
             "D-form: " + doc["d_form"],
             "theta-form: " + doc["theta_form"]]
    return doc, lines


def cmd_guess(args):
    vals = expr.parse_rational_list(args.coefficients)
    s = UniSeries(vals, len(vals) - 1, "x")
    g = guess_ode(s, _guess_config(args))
    if g is None:
        return ({"found": False},
                ["no annihilator within the configured bounds"])
    doc, lines = _describe_guess(g)
    doc["found"] = True
    return doc, lines


def cmd_telescoper(args):
    N = _setting(args, "terms") - 1
    cfg = _guess_config(args)
    node = expr.parse_expr(args.expression)
    try:
        rat = expr.to_rational(node)
    except ValueError:
        rat = None
    if rat is not None:
        g = guess_and_certify(rat[0], rat[1], cfg, N)
    else:
        # algebraic input: expand, guess, and re-verify on a longer expansion
        s = expr.to_series(node, N).diagonal()
        g = guess_ode(s, cfg)
        if g is None:
            raise NotFound("no annihilator within the configured bounds")
        longer = expr.to_series(node, N + cfg.verification_margin).diagonal()
        if not g.operator.annihilates(longer):
            raise NotFound("guessed operator fails on a longer expansion")
        g.terms_verified += cfg.verification_margin
    doc, lines = _describe_guess(g)
    return doc, lines


def cmd_apply_op(args):
    op = _read_operator(args.operator)
    node = expr.parse_expr(args.to)
    try:
        f = expr.to_ratfunc(node, "x")
    except ValueError:
        N = _setting(args, "terms") - 1
        s = expr.to_uniseries(node, "x", N)
        out = op.apply_series(s)
        return ({"series": _series_strings(out.c)},
                ["series: " + ", ".join(_series_strings(out.c))])
    out = op.apply_ratfunc(f)
    text = expr.format_ratfunc(out)
    return ({"rational": text}, ["rational: " + text])


def cmd_adjoint(args):
    op = _read_operator(args.operator).adjoint()
    doc = _op_doc(op)
    return doc, ["D-form: " + doc["d_form"],
                 "theta-form: " + doc["theta_form"]]


def cmd_lclm(args):
    ops = [_read_operator(p) for p in args.operators]
    out = ode.lclm(*ops)
    doc = _op_doc(out)
    return doc, ["order: %d" % out.order(),
                 "D-form: " + doc["d_form"],
                 "theta-form: " + doc["theta_form"]]


def cmd_gcrd(args):
    a = _read_operator(args.left)
    b = _read_operator(args.right)
    out = ode.gcrd(a, b)
    doc = _op_doc(out)
    return doc, ["order: %d" % out.order(),
                 "D-form: " + doc["d_form"],
                 "theta-form: " + doc["theta_form"]]


def cmd_rightdiv(args):
    a = _read_operator(args.left)
    b = _read_operator(args.right)
    q, r = ode.right_divide(a, b)
    doc = {"quotient": str(q), "remainder": str(r),
           "divides": r.is_zero()}
    return doc, ["quotient: %s" % q,
                 "remainder: %s" % r,
                 "divides: %s" % ("yes" if r.is_zero() else "no")]


def cmd_ratsols(args):
    op = _read_operator(args.operator)
    sols = ode.rational_solutions(op, max_pole_order=args.max_pole_order)
    texts = [expr.format_ratfunc(f) for f in sols]
    return ({"count": len(sols), "solutions": texts},
            ["count: %d" % len(sols)] + ["solution: " + t for t in texts])


def cmd_extsq(args):
    op = _read_operator(args.operator)
    out = ode.exterior_square(op)
    doc = _op_doc(out)
    return doc, ["order: %d" % out.order(),
                 "D-form: " + doc["d_form"],
                 "theta-form: " + doc["theta_form"]]


def cmd_hom(args):
    src = _read_operator(args.source)
    dst = _read_operator(args.target)
    bound = args.max_deg if args.max_deg is not None else _setting(args, "hom_deg")
    iv = ode.find_intertwiner(src, dst, bound)
    if iv is None:
        return ({"found": False, "max_deg": bound},
                ["no intertwiner up to degree %d" % bound])
    assert iv.verify()
    return ({"found": True, "max_deg": bound,
             "R": str(iv.R), "S": str(iv.S)},
            ["R: %s" % iv.R, "S: %s" % iv.S])


def cmd_selfdual(args):
    op = _read_operator(args.operator)
    bound = args.max_deg if args.max_deg is not None else _setting(args, "hom_deg")
    rep = ode.selfdual_report(op, bound)
    if not rep.selfdual:
        return ({"selfdual": False, "max_deg": bound, "intertwiner": None},
                ["intertwiner: NONE (searched through degree %d)" % bound])
    return ({"selfdual": True, "max_deg": bound,
             "intertwiner": str(rep.intertwiner.R)},
            ["intertwiner: %s" % rep.intertwiner.R])


def cmd_analytic_sols(args):
    op = _read_operator(args.operator)
    N = _setting(args, "terms") - 1
    basis = ode.analytic_solutions(op, N)
    sols = [{"exponent": str(e), "coefficients": _series_strings(s.c)}
            for e, s in basis]
    lines = ["solutions: %d" % len(basis)]
    for e, s in basis:
        lines.append("x^%s * (%s)" % (e, ", ".join(_series_strings(s.c))))
    if basis.blocked:
        lines.append("blocked exponents: %s"
                     % ", ".join(str(e) for e in basis.blocked))
    return ({"solutions": sols,
             "blocked": [str(e) for e in basis.blocked]}, lines)


def _parse_pfq_spec(text):
    parts = text.split(";")
    if len(parts) != 3:
        raise UsageError('pfq spec is "[a,...];[b,...];c*x^k"')
    lists = []
    for part in parts[:2]:
        part = part.strip()
        if not (part.startswith("[") and part.endswith("]")):
            raise UsageError("parameter lists need brackets: %r" % part)
        inner = part[1:-1].strip()
        lists.append(expr.parse_rational_list(inner) if inner else [])
    scale, power = _monomial_arg(parts[2])
    return special.PFQSpec(lists[0], lists[1], scale, power)


def _monomial_arg(text):
    f = expr.to_ratfunc(expr.parse_expr(text), "x")
    num = f.num
    if f.den.degree() != 0:
        raise UsageError("argument must be c*x^k, got %r" % text.strip())
    terms = [i for i in range(num.degree() + 1) if num[i]]
    if len(terms) != 1 or terms[0] < 1:
        raise UsageError("argument must be c*x^k with k >= 1, got %r"
                         % text.strip())
    k = terms[0]
    return num[k] / f.den[0], k


def cmd_pfq(args):
    spec = _parse_pfq_spec(args.spec)
    N = _setting(args, "terms") - 1
    s = special.pfq_series(spec, N)
    return ({"coefficients": _series_strings(s.c)},
            ["series: " + ", ".join(_series_strings(s.c))])


def _parse_heun_spec(text):
    parts = text.split(";")
    if len(parts) not in (3, 4):
        raise UsageError('heun spec is "a; q; alpha,beta,gamma,delta[; c*x^k]"')
    a = expr.parse_rational_list(parts[0])
    qq = expr.parse_rational_list(parts[1])
    abgd = expr.parse_rational_list(parts[2])
    if len(a) != 1 or len(qq) != 1 or len(abgd) != 4:
        raise UsageError("heun spec needs a; q; then exactly four exponents")
    scale, power = (Fraction(1), 1)
    if len(parts) == 4:
        scale, power = _monomial_arg(parts[3])
    return special.HeunSpec(a[0], qq[0], *abgd, scale=scale, power=power)


def cmd_heun(args):
    spec = _parse_heun_spec(args.spec)
    N = _setting(args, "terms") - 1
    s = special.heun_series(spec, N)
    doc = {"coefficients": _series_strings(s.c)}
    lines = ["series: " + ", ".join(_series_strings(s.c))]
    if args.operator:
        op = special.heun_operator(spec)
        doc.update(_op_doc(op))
        lines += ["D-form: " + doc["d_form"],
                  "theta-form: " + doc["theta_form"]]
    return doc, lines


def cmd_birat_apply(args):
    m = _parse_map(args.map, _setting(args, "terms"))
    P, Q = _rational_input(args.expression, nvars=3)
    try:
        P2, Q2 = birat.apply_to_rational(m, P, Q)
    except TypeError as e:
        raise UsageError("%s" % e)
    names = "xyz"
    return ({"numerator": format_mpoly(P2, names),
             "denominator": format_mpoly(Q2, names)},
            ["numerator: " + format_mpoly(P2, names),
             "denominator: " + format_mpoly(Q2, names)])


def cmd_birat_check(args):
    N = _setting(args, "terms") - 1
    m = _parse_map(args.map, _setting(args, "terms"))
    P, Q = _rational_input(args.expression, nvars=3)
    product_ok = True
    try:
        birat.preserves_product(m)
    except ValueError:
        product_ok = False
    rep = birat.invariance_report(P, Q, m, N)
    doc = {"product_preserved": product_ok,
           "diagonals_equal": rep.equal,
           "reindexing_power": rep.d,
           "first_divergence": rep.first_divergence}
    lines = ["product identity: %s" % ("holds" if product_ok else "fails"),
             "reindexing power: %d" % rep.d,
             "diagonals equal through order %d: %s"
             % (N, "yes" if rep.equal else "no")]
    if not rep.equal:
        lines.append("first divergence at order %s" % rep.first_divergence)
    return doc, lines


def cmd_hauptmodul(args):
    node = expr.parse_expr(args.denominator)
    Q = expr.to_mpoly(node)
    r = curvegeom.hauptmodul_of_denominator(Q, diag_vars=args.diag_vars)
    jt = expr.format_ratfunc(r.j, "p")
    ht = expr.format_ratfunc(r.H, "p")
    return ({"j": jt, "H": ht, "route": r.route},
            ["route: " + r.route, "j = " + jt, "H = " + ht])


def cmd_effective_vars(args):
    N = _setting(args, "terms") - 1
    P, Q = _rational_input(args.expression)
    n = Q.n
    groups = []
    for part in args.grouping.split(","):
        g = expr.to_mpoly(expr.parse_expr(part.strip()), nvars=n)
        groups.append(g)
    ok = effective_grouping_check(P, Q, groups, N)
    return ({"effective": ok, "groups": len(groups)},
            ["grouping of %d monomials: %s"
             % (len(groups), "works" if ok else "does not work")])


# -- argument plumbing -------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(
        prog="diagtel",
        description="Exact diagonals, telescoper guessing, operator algebra")
    p.add_argument("--format", choices=("text", "structured"), default=None,
                   help="output format (default text; env DIAGTEL_FORMAT)")
    p.add_argument("--seed", type=int, default=None,
                   help="seed recorded in output metadata (env DIAGTEL_SEED)")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, handler, help_, terms=False, guess=False, homdeg=False):
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(handler=handler)
        if terms:
            sp.add_argument("--terms", type=_positive, default=None,
                            help="series coefficients to compute (default 24)")
        if guess:
            sp.add_argument("--max-order", dest="max_order", type=_positive,
                            default=None, help="operator order bound (default 6)")
            sp.add_argument("--max-deg", dest="max_deg", type=_positive,
                            default=None,
                            help="coefficient degree bound (default 8)")
            sp.add_argument("--margin", type=_positive, default=10,
                            help="held-out verification terms (default 10)")
            sp.add_argument("--strategy", choices=("balanced", "order-major"),
                            default="balanced", help="search enumeration order")
        if homdeg:
            sp.add_argument("--max-deg", dest="max_deg", type=_positive,
                            default=None,
                            help="intertwiner degree bound (default: hom-deg)")
            sp.add_argument("--hom-deg", dest="hom_deg", type=_positive,
                            default=None,
                            help="intertwiner degree bound (default 12)")
        return sp

    sp = add("diag", cmd_diag, "diagonal of a rational/algebraic expression",
             terms=True)
    sp.add_argument("expression")

    sp = add("guess", cmd_guess, "annihilator from series coefficients",
             guess=True)
    sp.add_argument("coefficients", help="comma-separated exact rationals")

    sp = add("telescoper", cmd_telescoper,
             "diagonal then guess, certified on extra terms",
             terms=True, guess=True)
    sp.add_argument("expression")

    sp = add("apply-op", cmd_apply_op, "apply an operator to a function",
             terms=True)
    sp.add_argument("operator", help="operator file")
    sp.add_argument("--to", required=True,
                    help="univariate expression (rational or series)")

    sp = add("adjoint", cmd_adjoint, "formal adjoint of an operator")
    sp.add_argument("operator")

    sp = add("lclm", cmd_lclm, "least common left multiple")
    sp.add_argument("operators", nargs="+", help="two or more operator files")

    sp = add("gcrd", cmd_gcrd, "greatest common right divisor")
    sp.add_argument("left")
    sp.add_argument("right")

    sp = add("rightdiv", cmd_rightdiv, "right division with remainder")
    sp.add_argument("left")
    sp.add_argument("right")

    sp = add("ratsols", cmd_ratsols, "rational solutions of an operator")
    sp.add_argument("operator")
    sp.add_argument("--max-pole-order", dest="max_pole_order",
                    type=_positive, default=6)

    sp = add("extsq", cmd_extsq, "exterior square of an operator")
    sp.add_argument("operator")

    sp = add("hom", cmd_hom, "intertwiner from source to target operator",
             homdeg=True)
    sp.add_argument("source")
    sp.add_argument("target")

    sp = add("selfdual", cmd_selfdual,
             "is the operator homomorphic to its adjoint?", homdeg=True)
    sp.add_argument("operator")

    sp = add("analytic-sols", cmd_analytic_sols,
             "Frobenius solution basis at the origin", terms=True)
    sp.add_argument("operator")

    sp = add("pfq", cmd_pfq, "generalized hypergeometric series", terms=True)
    sp.add_argument("spec", help='"[a,...];[b,...];c*x^k"')

    sp = add("heun", cmd_heun, "local Heun series", terms=True)
    sp.add_argument("spec", help='"a; q; alpha,beta,gamma,delta[; c*x^k]"')
    sp.add_argument("--operator", action="store_true",
                    help="also print the annihilating operator")

    sp = add("birat-apply", cmd_birat_apply,
             "image of a rational function under a map", terms=True)
    sp.add_argument("expression")
    sp.add_argument("--map", required=True, help="tri(...) or mono(...)")

    sp = add("birat-check", cmd_birat_check,
             "diagonal invariance report for a map", terms=True)
    sp.add_argument("expression")
    sp.add_argument("--map", required=True)

    sp = add("hauptmodul", cmd_hauptmodul,
             "j-invariant and Hauptmodul of a denominator")
    sp.add_argument("denominator", help="polynomial in x, y, z")
    sp.add_argument("--diag-vars", dest="diag_vars", type=_positive,
                    default=None,
                    help="leading variables carrying the diagonal")

    sp = add("effective-vars", cmd_effective_vars,
             "verify a variable grouping", terms=True)
    sp.add_argument("expression")
    sp.add_argument("--grouping", required=True,
                    help="comma-separated monomials, e.g. 'x*u, y, z'")

    return p


def _metadata(args):
    meta = {"terms": _setting(args, "terms") if hasattr(args, "terms") else None,
            "seed": _setting(args, "seed")}
    for key in ("max_order", "max_deg", "hom_deg"):
        if hasattr(args, key):
            v = getattr(args, key)
            meta[key] = v if v is not None else _setting(args, key)
    return {k: v for k, v in meta.items() if v is not None}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        fmt = _setting(args, "format")
        doc, lines = args.handler(args)
    except UsageError as e:
        print("usage error: %s" % e, file=sys.stderr)
        print(parser.format_usage().rstrip(), file=sys.stderr)
        return 2
    except DiagtelError as e:
        print("error: %s" % e, file=sys.stderr)
        return 1
    except (ValueError, ZeroDivisionError) as e:
        print("error: invalid-input: %s" % e, file=sys.stderr)
        return 1
    if fmt == "structured":
        out = {"format_version": FORMAT_VERSION, "command": args.command,
               "config": _metadata(args)}
        out.update(doc)
        print(json.dumps(out, indent=2))
    else:
        for line in lines:
            print(line)
    return 0


if __name__ == "__main__":
    sys.exit(main())
