"""Exact scalar expressions over named coordinates.

Every expression is kept in a canonical normal form: a finite sum of
monomials with Fraction coefficients.  A monomial is

    coeff * e^{L} * g1^k1 * ... * gm^km

where L is a rational-linear combination of linear coordinate names (plus
a rational constant), and each generator g is one of

    ('coord', name)            a linear coordinate used as a bare symbol
    ('sin', angle)             sine of a named angle
    ('cos', angle)             cosine of a named angle
    ('fn', name, order, arg)   an abstract smooth function of one
                               coordinate; order counts primes

Angles never occur as bare symbols, only through sin/cos.  The relation
sin^2 + cos^2 = 1 is applied greedily (sin exponents are reduced below 2),
which makes equality of expressions decidable: two expressions are equal
modulo the circle relations iff their normal forms are identical.

Because the exponential only ever carries rational-linear exponents and
the trig reduction is a Groebner normal form, all arithmetic here is
exact; no floats enter symbolic identities.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

Rat = Union[int, Fraction]

# A linear exponent: (constant, ((name, coeff), ...)) with names sorted
# and zero coefficients pruned.
LinExp = tuple[Fraction, tuple[tuple[str, Fraction], ...]]
Generator = tuple
Monomial = tuple[LinExp, tuple[tuple[Generator, int], ...]]

_ZERO_LIN: LinExp = (Fraction(0), ())


def _linexp(const: Rat = 0, coeffs: Mapping[str, Rat] | None = None) -> LinExp:
    items = []
    for name, c in sorted((coeffs or {}).items()):
        c = Fraction(c)
        if c != 0:
            items.append((name, c))
    return (Fraction(const), tuple(items))


def _linexp_add(a: LinExp, b: LinExp) -> LinExp:
    coeffs: dict[str, Fraction] = dict(a[1])
    for name, c in b[1]:
        coeffs[name] = coeffs.get(name, Fraction(0)) + c
    return _linexp(a[0] + b[0], coeffs)


def _linexp_scale(a: LinExp, k: Rat) -> LinExp:
    k = Fraction(k)
    return _linexp(a[0] * k, {name: c * k for name, c in a[1]})


class Expr:
    """A canonical exact expression.  Immutable; supports +, -, *, /, **."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, Fraction] | None = None):
        self._terms: dict[Monomial, Fraction] = dict(terms or {})
        self._hash: int | None = None

    # -- constructors ------------------------------------------------------

    @staticmethod
    def rational(value: Rat) -> "Expr":
        value = Fraction(value)
        if value == 0:
            return Expr()
        return Expr({(_ZERO_LIN, ()): value})

    @staticmethod
    def coordinate(name: str) -> "Expr":
        return Expr({(_ZERO_LIN, ((("coord", name), 1),)): Fraction(1)})

    @staticmethod
    def sine(angle: str) -> "Expr":
        return Expr({(_ZERO_LIN, ((("sin", angle), 1),)): Fraction(1)})

    @staticmethod
    def cosine(angle: str) -> "Expr":
        return Expr({(_ZERO_LIN, ((("cos", angle), 1),)): Fraction(1)})

    @staticmethod
    def exponential(coeffs: Mapping[str, Rat] | None = None, const: Rat = 0) -> "Expr":
        lin = _linexp(const, coeffs)
        return Expr({(lin, ()): Fraction(1)})

    @staticmethod
    def function(name: str, arg: str, order: int = 0) -> "Expr":
        if order < 0:
            raise ValueError("derivative order must be >= 0")
        return Expr({(_ZERO_LIN, ((("fn", name, order, arg), 1),)): Fraction(1)})

    # -- inspection --------------------------------------------------------

    def terms(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(sorted(self._terms.items()))

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return all(key == (_ZERO_LIN, ()) for key in self._terms)

    def as_rational(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        if not self.is_rational():
            raise ValueError(f"not a rational constant: {self}")
        return next(iter(self._terms.values()))

    def bare_coordinates(self) -> set[str]:
        names = set()
        for (lin, gens), _ in self._terms.items():
            names.update(name for name, _ in lin[1])
            for gen, _ in gens:
                if gen[0] == "coord":
                    names.add(gen[1])
                elif gen[0] == "fn":
                    names.add(gen[3])
        return names

    def angles(self) -> set[str]:
        return {
            gen[1]
            for (_, gens), _ in self._terms.items()
            for gen, _ in gens
            if gen[0] in ("sin", "cos")
        }

    def function_symbols(self) -> set[tuple[str, int, str]]:
        return {
            (gen[1], gen[2], gen[3])
            for (_, gens), _ in self._terms.items()
            for gen, _ in gens
            if gen[0] == "fn"
        }

    def uses_exp(self) -> bool:
        return any(lin != _ZERO_LIN for (lin, _), _ in self._terms.items())

    # -- arithmetic --------------------------------------------------------

    @staticmethod
    def _coerce(value) -> "Expr":
        if isinstance(value, Expr):
            return value
        if isinstance(value, (int, Fraction)):
            return Expr.rational(value)
        raise TypeError(f"cannot interpret {value!r} as an expression")

    def __add__(self, other) -> "Expr":
        if not isinstance(other, (Expr, int, Fraction)):
            return NotImplemented
        other = Expr._coerce(other)
        terms = dict(self._terms)
        for key, c in other._terms.items():
            acc = terms.get(key, Fraction(0)) + c
            if acc == 0:
                terms.pop(key, None)
            else:
                terms[key] = acc
        return Expr(terms)

    __radd__ = __add__

    def __neg__(self) -> "Expr":
        return Expr({key: -c for key, c in self._terms.items()})

    def __sub__(self, other) -> "Expr":
        return self + (-Expr._coerce(other))

    def __rsub__(self, other) -> "Expr":
        return Expr._coerce(other) + (-self)

    def __mul__(self, other) -> "Expr":
        if not isinstance(other, (Expr, int, Fraction)):
            return NotImplemented
        other = Expr._coerce(other)
        terms: dict[Monomial, Fraction] = {}
        for (lin_a, gens_a), ca in self._terms.items():
            for (lin_b, gens_b), cb in other._terms.items():
                powers: dict[Generator, int] = dict(gens_a)
                for gen, k in gens_b:
                    powers[gen] = powers.get(gen, 0) + k
                for key, c in _reduce_monomial(
                    ca * cb, _linexp_add(lin_a, lin_b), powers
                ):
                    acc = terms.get(key, Fraction(0)) + c
                    if acc == 0:
                        terms.pop(key, None)
                    else:
                        terms[key] = acc
        return Expr(terms)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Expr":
        if not isinstance(n, int):
            raise TypeError("only integer powers are supported")
        if n == 0:
            return Expr.rational(1)
        if n < 0:
            return self._inverted() ** (-n)
        result = Expr.rational(1)
        base = self
        k = n
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def _inverted(self) -> "Expr":
        if len(self._terms) != 1:
            raise ValueError(f"can only invert a single monomial, got {self}")
        (lin, gens), c = next(iter(self._terms.items()))
        powers = {}
        for gen, k in gens:
            if gen[0] in ("sin", "cos"):
                raise ValueError("negative powers of sin/cos are not supported")
            powers[gen] = -k
        return _accumulate(
            _reduce_monomial(Fraction(1) / c, _linexp_scale(lin, -1), powers)
        )

    def __truediv__(self, other) -> "Expr":
        return self * Expr._coerce(other)._inverted()

    def __rtruediv__(self, other) -> "Expr":
        return Expr._coerce(other) * self._inverted()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Expr.rational(other)
        if not isinstance(other, Expr):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # -- calculus ----------------------------------------------------------

    def diff(self, name: str) -> "Expr":
        """Formal partial derivative with respect to the coordinate `name`.

        Abstract function symbols pick up one more prime when
        differentiated in their own variable and die otherwise; an angle
        `name` only moves its own sin/cos pair.
        """
        out = Expr()
        for (lin, gens), coeff in self._terms.items():
            # exponential factor
            lin_coeff = dict(lin[1]).get(name)
            if lin_coeff:
                out = out + Expr({(lin, gens): coeff * lin_coeff})
            # product rule over the generators
            for gen, k in gens:
                dgen = _diff_generator(gen, name)
                if dgen is None:
                    continue
                rest: dict[Generator, int] = dict(gens)
                if k == 1:
                    del rest[gen]
                else:
                    rest[gen] = k - 1
                partial = _accumulate(_reduce_monomial(coeff * k, lin, rest))
                out = out + partial * dgen
        return out

    # -- exact evaluation ---------------------------------------------------

    def eval_rational(
        self,
        point: Mapping[str, Rat] | None = None,
        trig: Mapping[str, tuple[Rat, Rat]] | None = None,
        jets: Mapping[tuple[str, int], Rat] | None = None,
    ) -> dict[Fraction, Fraction]:
        """Exact evaluation at a rational point.

        Returns the value as {q: c} meaning sum of c * e^q; the e^q with
        distinct rational q are linearly independent over Q, so equality
        of these dicts is equality of values.  `trig` maps an angle to an
        exact point (sin, cos) on the unit circle; `jets` maps
        (function name, order) to a rational value.
        """
        point = point or {}
        trig = trig or {}
        jets = jets or {}
        for angle, (s, c) in trig.items():
            if Fraction(s) ** 2 + Fraction(c) ** 2 != 1:
                raise ValueError(f"trig values for {angle} not on the unit circle")
        out: dict[Fraction, Fraction] = {}
        for (lin, gens), coeff in self._terms.items():
            q = lin[0]
            for name, c in lin[1]:
                q += c * Fraction(point[name])
            value = coeff
            for gen, k in gens:
                if gen[0] == "coord":
                    base = Fraction(point[gen[1]])
                elif gen[0] == "sin":
                    base = Fraction(trig[gen[1]][0])
                elif gen[0] == "cos":
                    base = Fraction(trig[gen[1]][1])
                else:
                    base = Fraction(jets[(gen[1], gen[2])])
                value *= base**k
            acc = out.get(q, Fraction(0)) + value
            if acc == 0:
                out.pop(q, None)
            else:
                out[q] = acc
        return out

    # -- substitution -------------------------------------------------------

    def substitute_coordinates(self, mapping: Mapping[str, "Expr"]) -> "Expr":
        """Replace bare coordinates (and their occurrences in exponents).

        Exponent substitutions must stay rational-linear.  A coordinate
        that feeds an abstract function symbol can only be renamed to
        itself; anything else has no normal form here.
        """
        out = Expr()
        for (lin, gens), coeff in self._terms.items():
            factor = Expr.rational(coeff)
            # exponential part
            const, items = lin[0], dict(lin[1])
            new_coeffs: dict[str, Fraction] = {}
            for name, c in items.items():
                if name not in mapping:
                    new_coeffs[name] = new_coeffs.get(name, Fraction(0)) + c
                    continue
                rep_const, rep_lin = _as_linear(mapping[name])
                const += c * rep_const
                for rep_name, rc in rep_lin.items():
                    new_coeffs[rep_name] = new_coeffs.get(rep_name, Fraction(0)) + c * rc
            factor = factor * Expr.exponential(new_coeffs, const)
            for gen, k in gens:
                if gen[0] == "coord" and gen[1] in mapping:
                    factor = factor * (mapping[gen[1]] ** k)
                elif gen[0] == "fn" and gen[3] in mapping:
                    if mapping[gen[3]] != Expr.coordinate(gen[3]):
                        raise ValueError(
                            f"cannot substitute inside {format_generator(gen)}"
                        )
                    factor = factor * Expr({(_ZERO_LIN, ((gen, k),)): Fraction(1)})
                else:
                    factor = factor * Expr({(_ZERO_LIN, ((gen, k),)): Fraction(1)})
            out = out + factor
        return out

    def substitute_angle(self, angle: str, sin_value: "Expr", cos_value: "Expr") -> "Expr":
        """Replace sin/cos of one angle by expressions satisfying s^2+c^2=1."""
        sin_value = Expr._coerce(sin_value)
        cos_value = Expr._coerce(cos_value)
        if sin_value * sin_value + cos_value * cos_value != Expr.rational(1):
            raise ValueError("sin/cos replacements must satisfy s^2 + c^2 = 1")
        out = Expr()
        for (lin, gens), coeff in self._terms.items():
            factor = Expr({(lin, ()): coeff})
            for gen, k in gens:
                if gen[0] == "sin" and gen[1] == angle:
                    factor = factor * (sin_value**k)
                elif gen[0] == "cos" and gen[1] == angle:
                    factor = factor * (cos_value**k)
                else:
                    factor = factor * Expr({(_ZERO_LIN, ((gen, k),)): Fraction(1)})
            out = out + factor
        return out

    # -- display -------------------------------------------------------------

    def __repr__(self) -> str:
        return f"Expr({self})"

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for (lin, gens), coeff in sorted(self._terms.items()):
            factors = []
            if lin != _ZERO_LIN:
                factors.append(f"e^{{{_format_linexp(lin)}}}")
            for gen, k in gens:
                text = format_generator(gen)
                factors.append(text if k == 1 else f"{text}^{k}")
            if not factors:
                parts.append(str(coeff))
            elif coeff == 1:
                parts.append("*".join(factors))
            elif coeff == -1:
                parts.append("-" + "*".join(factors))
            else:
                parts.append("*".join([str(coeff)] + factors))
        text = " + ".join(parts)
        return text.replace("+ -", "- ")


def _diff_generator(gen: Generator, name: str) -> Expr | None:
    kind = gen[0]
    if kind == "coord":
        return Expr.rational(1) if gen[1] == name else None
    if kind == "sin":
        return Expr.cosine(gen[1]) if gen[1] == name else None
    if kind == "cos":
        return -Expr.sine(gen[1]) if gen[1] == name else None
    if kind == "fn":
        if gen[3] == name:
            return Expr.function(gen[1], gen[3], gen[2] + 1)
        return None
    raise AssertionError(f"unknown generator {gen!r}")


def _reduce_monomial(
    coeff: Fraction, lin: LinExp, powers: dict[Generator, int]
) -> Iterable[tuple[Monomial, Fraction]]:
    """Normalise one raw monomial, rewriting sin^2 -> 1 - cos^2 greedily."""
    if coeff == 0:
        return
    clean = {}
    for gen, k in powers.items():
        if k == 0:
            continue
        if k < 0 and gen[0] in ("sin", "cos"):
            raise ValueError("negative powers of sin/cos are not supported")
        clean[gen] = k
    for gen, k in clean.items():
        if gen[0] == "sin" and k >= 2:
            rest = dict(clean)
            if k == 2:
                del rest[gen]
            else:
                rest[gen] = k - 2
            yield from _reduce_monomial(coeff, lin, dict(rest))
            cos_gen = ("cos", gen[1])
            rest[cos_gen] = rest.get(cos_gen, 0) + 2
            yield from _reduce_monomial(-coeff, lin, rest)
            return
    yield (lin, tuple(sorted(clean.items()))), coeff


def _accumulate(pairs: Iterable[tuple[Monomial, Fraction]]) -> Expr:
    terms: dict[Monomial, Fraction] = {}
    for key, c in pairs:
        acc = terms.get(key, Fraction(0)) + c
        if acc == 0:
            terms.pop(key, None)
        else:
            terms[key] = acc
    return Expr(terms)


def _as_linear(e: Expr) -> tuple[Fraction, dict[str, Fraction]]:
    """Decompose an expression as const + sum coeff*coord, or raise."""
    const = Fraction(0)
    coeffs: dict[str, Fraction] = {}
    for (lin, gens), c in e._terms.items():
        if lin != _ZERO_LIN:
            raise ValueError(f"exponent substitution must be linear, got {e}")
        if not gens:
            const += c
        elif len(gens) == 1 and gens[0][0][0] == "coord" and gens[0][1] == 1:
            name = gens[0][0][1]
            coeffs[name] = coeffs.get(name, Fraction(0)) + c
        else:
            raise ValueError(f"exponent substitution must be linear, got {e}")
    return const, coeffs


def format_generator(gen: Generator) -> str:
    kind = gen[0]
    if kind == "coord":
        return gen[1]
    if kind in ("sin", "cos"):
        return f"{kind}({gen[1]})"
    name, order, arg = gen[1], gen[2], gen[3]
    primes = "'" * order if order <= 3 else f"^({order})"
    return f"{name}{primes}({arg})"


def _format_linexp(lin: LinExp) -> str:
    const, items = lin
    parts = []
    for name, c in items:
        if c == 1:
            parts.append(name)
        else:
            parts.append(f"{c}*{name}")
    if const != 0 or not parts:
        parts.append(str(const))
    return " + ".join(parts).replace("+ -", "- ")


def canon(value) -> Expr:
    """Re-normalise an expression (idempotent by construction).

    Accepts Expr, int or Fraction.  Every monomial is pushed through the
    reduction again, so this also serves as an internal-invariant check.
    """
    e = Expr._coerce(value)
    out: dict[Monomial, Fraction] = {}
    for (lin, gens), coeff in e._terms.items():
        lin = _linexp(lin[0], dict(lin[1]))
        for key, c in _reduce_monomial(coeff, lin, dict(gens)):
            acc = out.get(key, Fraction(0)) + c
            if acc == 0:
                out.pop(key, None)
            else:
                out[key] = acc
    return Expr(out)


def differentiate(e: Expr, name: str) -> Expr:
    """Formal partial derivative; module-level spelling of Expr.diff."""
    return Expr._coerce(e).diff(name)


ZERO = Expr()
ONE = Expr.rational(1)

rational = Expr.rational
coordinate = Expr.coordinate
sine = Expr.sine
cosine = Expr.cosine
exponential = Expr.exponential
function = Expr.function
