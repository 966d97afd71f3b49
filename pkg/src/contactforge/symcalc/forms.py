"""Differential forms, vector fields, and the exterior-calculus operations.

Forms are stored as maps from strictly increasing index tuples (into the
chart's coordinate list) to exact coefficient expressions.  All products
and derivatives reorder through the permutation sign, so identities like
d(d a) = 0 and graded antisymmetry hold on the nose, not to tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

from .charts import AngularComponent, Chart, CoordMap
from .expr import Expr, Rat

Scalar = Union[Expr, int, Fraction]


def _merge_sign(left: tuple[int, ...], right: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    """Sort the concatenation; return (sign, merged) or None on a repeat."""
    if set(left) & set(right):
        return None
    combined = list(left + right)
    inversions = 0
    for i in range(len(combined)):
        for j in range(i + 1, len(combined)):
            if combined[i] > combined[j]:
                inversions += 1
    return (-1) ** inversions, tuple(sorted(combined))


class DifferentialForm:
    """A homogeneous form of fixed degree on a fixed chart."""

    __slots__ = ("chart", "degree", "_terms")

    def __init__(
        self,
        chart: Chart,
        degree: int,
        terms: Mapping[tuple[int, ...], Scalar] | None = None,
    ):
        if not 0 <= degree <= chart.dim:
            raise ValueError(f"degree {degree} out of range for {chart}")
        self.chart = chart
        self.degree = degree
        self._terms: dict[tuple[int, ...], Expr] = {}
        for indices, coeff in (terms or {}).items():
            indices = tuple(indices)
            if len(indices) != degree:
                raise ValueError(f"index tuple {indices} has wrong length")
            if list(indices) != sorted(set(indices)):
                raise ValueError(f"indices must be strictly increasing: {indices}")
            if indices and not 0 <= indices[0] <= indices[-1] < chart.dim:
                raise ValueError(f"index out of range in {indices}")
            coeff = Expr._coerce(coeff)
            chart.check_scalar(coeff)
            if not coeff.is_zero:
                self._terms[indices] = coeff

    def terms(self) -> Iterable[tuple[tuple[int, ...], Expr]]:
        return sorted(self._terms.items())

    def coefficient(self, *names: str) -> Expr:
        """Coefficient of the monomial in the caller's order (with sign)."""
        indices = tuple(self.chart.index(n) for n in names)
        if len(set(indices)) != len(indices):
            return Expr()
        inversions = sum(
            1
            for i in range(len(indices))
            for j in range(i + 1, len(indices))
            if indices[i] > indices[j]
        )
        coeff = self._terms.get(tuple(sorted(indices)), Expr())
        return coeff if inversions % 2 == 0 else -coeff

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other: "DifferentialForm") -> "DifferentialForm":
        self._check_compatible(other)
        terms = dict(self._terms)
        for key, c in other._terms.items():
            terms[key] = terms.get(key, Expr()) + c
        return DifferentialForm(self.chart, self.degree, terms)

    def __neg__(self) -> "DifferentialForm":
        return DifferentialForm(
            self.chart, self.degree, {k: -c for k, c in self._terms.items()}
        )

    def __sub__(self, other: "DifferentialForm") -> "DifferentialForm":
        return self + (-other)

    def __mul__(self, scalar: Scalar) -> "DifferentialForm":
        scalar = Expr._coerce(scalar)
        return DifferentialForm(
            self.chart, self.degree, {k: c * scalar for k, c in self._terms.items()}
        )

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        return (
            self.chart == other.chart
            and self.degree == other.degree
            and self._terms == other._terms
        )

    def __hash__(self) -> int:
        return hash((self.chart, self.degree, frozenset(self._terms.items())))

    def _check_compatible(self, other: "DifferentialForm"):
        if self.chart != other.chart:
            raise ValueError("forms live on different charts")
        if self.degree != other.degree:
            raise ValueError("forms have different degrees")

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        names = self.chart.names
        parts = []
        for indices, coeff in self.terms():
            basis = "^".join(f"d{names[i]}" for i in indices) or "1"
            parts.append(f"({coeff}) {basis}".strip())
        return " + ".join(parts)

    __repr__ = __str__


@dataclass(frozen=True)
class VectorField:
    chart: Chart
    components: tuple[tuple[int, Expr], ...]

    @classmethod
    def build(cls, chart: Chart, components: Mapping[str, Scalar]) -> "VectorField":
        items = []
        for name, comp in components.items():
            comp = Expr._coerce(comp)
            chart.check_scalar(comp)
            if not comp.is_zero:
                items.append((chart.index(name), comp))
        return cls(chart, tuple(sorted(items)))

    def component(self, index: int) -> Expr:
        for i, comp in self.components:
            if i == index:
                return comp
        return Expr()


def zero_form(chart: Chart, degree: int) -> DifferentialForm:
    return DifferentialForm(chart, degree)


def scalar_form(chart: Chart, value: Scalar) -> DifferentialForm:
    return DifferentialForm(chart, 0, {(): Expr._coerce(value)})


def d_coordinate(chart: Chart, name: str) -> DifferentialForm:
    """The basis 1-form d<name>; legal for angular coordinates too."""
    return DifferentialForm(chart, 1, {(chart.index(name),): Expr.rational(1)})


def one_form(chart: Chart, coefficients: Mapping[str, Scalar]) -> DifferentialForm:
    return DifferentialForm(
        chart, 1, {(chart.index(n),): c for n, c in coefficients.items()}
    )


def wedge(a: DifferentialForm, b: DifferentialForm) -> DifferentialForm:
    if a.chart != b.chart:
        raise ValueError("wedge of forms on different charts")
    terms: dict[tuple[int, ...], Expr] = {}
    for ia, ca in a._terms.items():
        for ib, cb in b._terms.items():
            merged = _merge_sign(ia, ib)
            if merged is None:
                continue
            sign, key = merged
            contribution = ca * cb if sign > 0 else -(ca * cb)
            terms[key] = terms.get(key, Expr()) + contribution
    return DifferentialForm(a.chart, a.degree + b.degree, terms)


def wedge_all(*forms: DifferentialForm) -> DifferentialForm:
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def wedge_power(a: DifferentialForm, n: int) -> DifferentialForm:
    if n < 1:
        raise ValueError("wedge power needs n >= 1")
    out = a
    for _ in range(n - 1):
        out = wedge(out, a)
    return out


def ext_d(a: DifferentialForm) -> DifferentialForm:
    chart = a.chart
    terms: dict[tuple[int, ...], Expr] = {}
    for indices, coeff in a._terms.items():
        for j, name in enumerate(chart.names):
            dc = coeff.diff(name)
            if dc.is_zero or j in indices:
                continue
            position = sum(1 for i in indices if i < j)
            sign = (-1) ** position
            key = tuple(sorted(indices + (j,)))
            contribution = dc if sign > 0 else -dc
            terms[key] = terms.get(key, Expr()) + contribution
    return DifferentialForm(chart, a.degree + 1, terms)


def contract(X: VectorField, a: DifferentialForm) -> DifferentialForm:
    """Interior product i_X; an antiderivation of degree -1."""
    if X.chart != a.chart:
        raise ValueError("vector field and form live on different charts")
    if a.degree == 0:
        raise ValueError("cannot contract a 0-form")
    terms: dict[tuple[int, ...], Expr] = {}
    for indices, coeff in a._terms.items():
        for m, idx in enumerate(indices):
            comp = X.component(idx)
            if comp.is_zero:
                continue
            sign = (-1) ** m
            key = indices[:m] + indices[m + 1 :]
            contribution = coeff * comp if sign > 0 else -(coeff * comp)
            terms[key] = terms.get(key, Expr()) + contribution
    return DifferentialForm(a.chart, a.degree - 1, terms)


def lie_derivative(X: VectorField, a: DifferentialForm) -> DifferentialForm:
    """Cartan's formula i_X d + d i_X (just i_X d in degree zero)."""
    if X.chart != a.chart:
        raise ValueError("vector field and form live on different charts")
    out = contract(X, ext_d(a))
    if a.degree > 0:
        out = out + ext_d(contract(X, a))
    return out


def _component_differential(m: CoordMap, name: str) -> DifferentialForm:
    comp = m.component(name)
    src = m.source
    if isinstance(comp, AngularComponent):
        out = d_coordinate(src, comp.base)
        shift = comp.shift
    else:
        out = zero_form(src, 1)
        shift = comp
    for j, src_name in enumerate(src.names):
        dc = shift.diff(src_name)
        if not dc.is_zero:
            out = out + DifferentialForm(src, 1, {(j,): dc})
    return out


def pullback(m: CoordMap, a: DifferentialForm) -> DifferentialForm:
    """Pull a form on the target chart back along the map."""
    if a.chart != m.target:
        raise ValueError("form does not live on the map's target chart")
    differentials = {
        name: _component_differential(m, name) for name in m.target.names
    }
    out = zero_form(m.source, a.degree)
    for indices, coeff in a._terms.items():
        pulled = scalar_form(m.source, m.pull_scalar(coeff))
        for i in indices:
            pulled = wedge(pulled, differentials[m.target.names[i]])
        out = out + pulled
    return out


def top_coefficient(a: DifferentialForm) -> Expr:
    """Coefficient of the full chart-ordered volume monomial."""
    if a.degree != a.chart.dim:
        raise ValueError(
            f"need a top-degree form (degree {a.chart.dim}), got degree {a.degree}"
        )
    return a._terms.get(tuple(range(a.chart.dim)), Expr())
