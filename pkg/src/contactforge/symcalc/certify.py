"""Certified positivity of scalar expressions on boxes.

The check is a dense grid sample plus a first-order Lipschitz safety
term: the expression is certified positive only when every sampled value
stays positive after subtracting (gradient bound) x (distance to the
nearest sample).  The gradient bound comes from differentiating the
expression symbolically and evaluating the result in interval
arithmetic, either once over the whole box ("global") or cell by cell
("per-cell", tighter and the default).

Abstract function symbols are allowed if the caller supplies a numeric
instantiation that can evaluate any derivative order pointwise and bound
it on an interval.  Rounding is ordinary float rounding; the margins this
toolkit certifies are many orders of magnitude above 1 ulp.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Protocol

from .expr import Expr


class SmoothFunction(Protocol):
    """Numeric stand-in for an abstract function symbol."""

    def value(self, x: float, order: int = 0) -> float: ...

    def bound(self, lo: float, hi: float, order: int = 0) -> tuple[float, float]: ...


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("NaN interval bound")
        if self.lo > self.hi:
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")

    @staticmethod
    def point(v: float) -> "Interval":
        return Interval(v, v)

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other: "Interval") -> "Interval":
        return self + (-other)

    def __mul__(self, other: "Interval") -> "Interval":
        products = (
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        )
        return Interval(min(products), max(products))

    def scaled(self, k: float) -> "Interval":
        return self * Interval.point(k)

    def power(self, n: int) -> "Interval":
        if n == 0:
            return Interval.point(1.0)
        if n < 0:
            if self.contains_zero:
                return Interval(-math.inf, math.inf)
            inverse = Interval(1.0 / self.hi, 1.0 / self.lo)
            return inverse.power(-n)
        if n % 2 == 0:
            mags = sorted((abs(self.lo), abs(self.hi)))
            lo = 0.0 if self.contains_zero else mags[0] ** n
            return Interval(lo, mags[1] ** n)
        return Interval(self.lo**n, self.hi**n)

    def exp(self) -> "Interval":
        return Interval(math.exp(self.lo), math.exp(self.hi))

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    @property
    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    @property
    def sup_abs(self) -> float:
        return max(abs(self.lo), abs(self.hi))

    @property
    def width(self) -> float:
        return self.hi - self.lo


def _validate_expression(e: Expr, box: Mapping[str, tuple[float, float]],
                         functions: Mapping[str, SmoothFunction]):
    if e.angles():
        raise ValueError("sin/cos terms are not supported by the certifier")
    loose = e.bare_coordinates() - set(box)
    if loose:
        raise ValueError(f"coordinates {sorted(loose)} missing from the box")
    for name, order, arg in e.function_symbols():
        if name not in functions:
            raise ValueError(f"abstract function {name!r} is not instantiated")
        if arg not in box:
            raise ValueError(f"function argument {arg!r} missing from the box")
    for name, (lo, hi) in box.items():
        if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
            raise ValueError(f"box for {name!r} must be a bounded interval")


def eval_float(
    e: Expr,
    point: Mapping[str, float],
    functions: Mapping[str, SmoothFunction] | None = None,
) -> float:
    functions = functions or {}
    total = 0.0
    for (lin, gens), coeff in e.terms():
        exponent = float(lin[0]) + sum(float(c) * point[n] for n, c in lin[1])
        value = float(coeff) * math.exp(exponent)
        for gen, k in gens:
            if gen[0] == "coord":
                base = point[gen[1]]
            elif gen[0] == "fn":
                base = functions[gen[1]].value(point[gen[3]], gen[2])
            else:
                raise ValueError("sin/cos terms are not supported by the certifier")
            value *= base**k
        total += value
    return total


def eval_interval(
    e: Expr,
    box: Mapping[str, Interval],
    functions: Mapping[str, SmoothFunction] | None = None,
) -> Interval:
    functions = functions or {}
    total = Interval.point(0.0)
    for (lin, gens), coeff in e.terms():
        arg = Interval.point(float(lin[0]))
        for n, c in lin[1]:
            arg = arg + box[n].scaled(float(c))
        value = arg.exp().scaled(float(coeff))
        for gen, k in gens:
            if gen[0] == "coord":
                base = box[gen[1]]
            elif gen[0] == "fn":
                lo, hi = functions[gen[1]].bound(box[gen[3]].lo, box[gen[3]].hi, gen[2])
                base = Interval(lo, hi)
            else:
                raise ValueError("sin/cos terms are not supported by the certifier")
            value = value * base.power(k)
        total = total + value
    return total


@dataclass
class CertificationReport:
    certified: bool
    min_sampled: float
    margin: float
    lipschitz_bound: float
    grid_n: int
    bound_mode: str
    box: dict[str, tuple[float, float]] = field(default_factory=dict)
    failing_point: tuple[float, ...] | None = None

    def as_dict(self) -> dict:
        return {
            "certified": self.certified,
            "min_sampled": self.min_sampled,
            "margin": self.margin,
            "lipschitz_bound": self.lipschitz_bound,
            "grid_n": self.grid_n,
            "bound_mode": self.bound_mode,
            "box": {k: list(v) for k, v in self.box.items()},
            "failing_point": list(self.failing_point) if self.failing_point else None,
        }


def certify_positive(
    e: Expr,
    box: Mapping[str, tuple[float, float]],
    grid_n: int = 101,
    bound_mode: str = "per-cell",
    functions: Mapping[str, SmoothFunction] | None = None,
    workers: int = 1,
) -> CertificationReport:
    """Certify e > 0 on the box, or report why not.

    `bound_mode` picks where the gradient is interval-evaluated: "global"
    uses one bound for the whole box (the plain grid-minus-L*radius
    formula), "per-cell" re-evaluates on every grid cell.
    """
    functions = dict(functions or {})
    if bound_mode not in ("per-cell", "global"):
        raise ValueError(f"unknown bound_mode {bound_mode!r}")
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    if not box:
        raise ValueError("empty box")
    _validate_expression(e, box, functions)

    axes = sorted(box)
    nodes = {
        name: [
            box[name][0] + (box[name][1] - box[name][0]) * i / (grid_n - 1)
            for i in range(grid_n)
        ]
        for name in axes
    }
    gradients = {name: e.diff(name) for name in axes}
    half_widths = {
        name: (box[name][1] - box[name][0]) / (2 * (grid_n - 1)) for name in axes
    }

    # sample all grid nodes
    min_sampled = math.inf
    worst_node = None
    values: dict[tuple[int, ...], float] = {}
    for multi in itertools.product(range(grid_n), repeat=len(axes)):
        point = {name: nodes[name][i] for name, i in zip(axes, multi)}
        v = eval_float(e, point, functions)
        values[multi] = v
        if v < min_sampled:
            min_sampled = v
            worst_node = tuple(point[name] for name in axes)

    def cell_interval(corner: tuple[int, ...]) -> dict[str, Interval]:
        return {
            name: Interval(nodes[name][i], nodes[name][i + 1])
            for name, i in zip(axes, corner)
        }

    def cell_lipschitz(cell_box: dict[str, Interval]) -> float:
        return sum(
            eval_interval(gradients[name], cell_box, functions).sup_abs
            for name in axes
        )

    cells = list(itertools.product(range(grid_n - 1), repeat=len(axes)))
    if bound_mode == "global":
        whole = {name: Interval(*box[name]) for name in axes}
        lipschitz = cell_lipschitz(whole)
        slack = lipschitz * max(half_widths.values())
        margin = min_sampled - slack
        worst_cell_point = worst_node
    else:

        def cell_margin(corner: tuple[int, ...]) -> tuple[float, float, tuple[float, ...]]:
            cell_box = cell_interval(corner)
            lip = cell_lipschitz(cell_box)
            corner_min = min(
                values[tuple(i + di for i, di in zip(corner, offsets))]
                for offsets in itertools.product((0, 1), repeat=len(axes))
            )
            slack = lip * max(half_widths.values())
            center = tuple(
                (cell_box[name].lo + cell_box[name].hi) / 2 for name in axes
            )
            return corner_min - slack, lip, center

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(cell_margin, cells))
        else:
            results = [cell_margin(c) for c in cells]
        margin = math.inf
        lipschitz = 0.0
        worst_cell_point = worst_node
        for (m, lip, center) in results:
            lipschitz = max(lipschitz, lip)
            if m < margin:
                margin = m
                worst_cell_point = center

    certified = margin > 0.0 and min_sampled > 0.0
    return CertificationReport(
        certified=certified,
        min_sampled=min_sampled,
        margin=margin,
        lipschitz_bound=lipschitz,
        grid_n=grid_n,
        bound_mode=bound_mode,
        box={k: tuple(v) for k, v in box.items()},
        failing_point=None if certified else worst_cell_point,
    )
