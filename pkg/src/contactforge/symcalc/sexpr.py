"""Stable s-expression text format for expressions and forms.

Grammar (whitespace-separated tokens, parentheses for lists)::

    expr     := rational
              | (coord NAME) | (sin NAME) | (cos NAME)
              | (fn NAME ORDER ARG)
              | (exp rational (NAME rational) ...)
              | (+ expr ...) | (* expr ...) | (- expr) | (^ expr INT)
    rational := INT | INT/INT
    chart    := (chart COORD ...)          COORD = NAME or @NAME (angular)
    form     := (form chart DEGREE ((NAME ...) expr) ...)

Emission is canonical (terms and factors in sorted order), so equal
values serialize identically; parsing re-canonicalises, so arbitrary
nestings of + * ^ round-trip through the normal form.
"""

from __future__ import annotations

from fractions import Fraction

from .charts import Chart
from .expr import Expr, Monomial, _ZERO_LIN
from .forms import DifferentialForm


def _rat_text(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _factor_text(gen, k: int) -> str:
    kind = gen[0]
    if kind == "coord":
        base = f"(coord {gen[1]})"
    elif kind in ("sin", "cos"):
        base = f"({kind} {gen[1]})"
    else:
        base = f"(fn {gen[1]} {gen[2]} {gen[3]})"
    return base if k == 1 else f"(^ {base} {k})"


def expr_to_sexp(e: Expr) -> str:
    monomials = []
    for (lin, gens), coeff in e.terms():
        factors = []
        if lin != _ZERO_LIN:
            linparts = [_rat_text(lin[0])] + [
                f"({name} {_rat_text(c)})" for name, c in lin[1]
            ]
            factors.append(f"(exp {' '.join(linparts)})")
        factors.extend(_factor_text(gen, k) for gen, k in gens)
        if not factors:
            monomials.append(_rat_text(coeff))
        elif coeff == 1 and len(factors) == 1:
            monomials.append(factors[0])
        else:
            monomials.append(f"(* {' '.join([_rat_text(coeff)] + factors)})")
    if not monomials:
        return "0"
    if len(monomials) == 1:
        return monomials[0]
    return f"(+ {' '.join(monomials)})"


def _tokenize(text: str):
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _read(tokens: list[str], pos: int):
    if pos >= len(tokens):
        raise ValueError("unexpected end of input")
    token = tokens[pos]
    if token == "(":
        items = []
        pos += 1
        while pos < len(tokens) and tokens[pos] != ")":
            item, pos = _read(tokens, pos)
            items.append(item)
        if pos >= len(tokens):
            raise ValueError("unbalanced parentheses")
        return items, pos + 1
    if token == ")":
        raise ValueError("unexpected )")
    return token, pos + 1


def _parse_rational(token) -> Fraction:
    if not isinstance(token, str):
        raise ValueError(f"expected a rational, got {token!r}")
    return Fraction(token)


def _build_expr(node) -> Expr:
    if isinstance(node, str):
        return Expr.rational(_parse_rational(node))
    if not node:
        raise ValueError("empty expression list")
    head, *args = node
    if head == "+":
        out = Expr()
        for a in args:
            out = out + _build_expr(a)
        return out
    if head == "*":
        out = Expr.rational(1)
        for a in args:
            out = out * _build_expr(a)
        return out
    if head == "-":
        (a,) = args
        return -_build_expr(a)
    if head == "^":
        base, power = args
        return _build_expr(base) ** int(power)
    if head == "coord":
        (name,) = args
        return Expr.coordinate(name)
    if head in ("sin", "cos"):
        (name,) = args
        return Expr.sine(name) if head == "sin" else Expr.cosine(name)
    if head == "fn":
        name, order, arg = args
        return Expr.function(name, arg, int(order))
    if head == "exp":
        const = _parse_rational(args[0])
        coeffs = {}
        for item in args[1:]:
            name, c = item
            coeffs[name] = coeffs.get(name, Fraction(0)) + _parse_rational(c)
        return Expr.exponential(coeffs, const)
    raise ValueError(f"unknown expression head {head!r}")


def expr_from_sexp(text: str) -> Expr:
    tokens = _tokenize(text)
    node, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise ValueError("trailing input after expression")
    return _build_expr(node)


def chart_to_sexp(chart: Chart) -> str:
    return f"(chart {' '.join(str(chart).split())})"


def chart_from_sexp_node(node) -> Chart:
    if not node or node[0] != "chart":
        raise ValueError("expected (chart ...)")
    return Chart.parse(" ".join(node[1:]))


def form_to_sexp(form: DifferentialForm) -> str:
    names = form.chart.names
    entries = []
    for indices, coeff in form.terms():
        keys = " ".join(names[i] for i in indices)
        entries.append(f"(({keys}) {expr_to_sexp(coeff)})")
    body = " ".join([chart_to_sexp(form.chart), str(form.degree)] + entries)
    return f"(form {body})"


def form_from_sexp(text: str) -> DifferentialForm:
    tokens = _tokenize(text)
    node, pos = _read(tokens, 0)
    if pos != len(tokens):
        raise ValueError("trailing input after form")
    if not node or node[0] != "form":
        raise ValueError("expected (form ...)")
    chart = chart_from_sexp_node(node[1])
    degree = int(node[2])
    terms = {}
    for entry in node[3:]:
        names, coeff_node = entry
        indices = tuple(chart.index(n) for n in names)
        terms[indices] = _build_expr(coeff_node)
    return DifferentialForm(chart, degree, terms)
