"""Coordinate charts and maps between them.

A chart is an ordered list of named coordinates, each either linear or
angular.  The declared order fixes the positive orientation: the top
monomial is the wedge of the coordinate differentials in chart order.

Angular coordinates never appear as bare symbols in coefficients (only
through sin/cos and through their differential), so a map component for
an angular target coordinate is not a free expression: it is a source
angular coordinate plus an optional shift expression.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Union

from .expr import Expr, ZERO

LINEAR = "linear"
ANGULAR = "angular"


@dataclass(frozen=True)
class Chart:
    coords: tuple[tuple[str, str], ...]

    def __post_init__(self):
        names = [name for name, _ in self.coords]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate coordinate names in {names}")
        for name, kind in self.coords:
            if kind not in (LINEAR, ANGULAR):
                raise ValueError(f"unknown coordinate kind {kind!r} for {name}")

    @classmethod
    def parse(cls, spec: str) -> "Chart":
        """Build a chart from a string like "r @theta x y" (@ = angular)."""
        coords = []
        for token in spec.split():
            if token.startswith("@"):
                coords.append((token[1:], ANGULAR))
            else:
                coords.append((token, LINEAR))
        return cls(tuple(coords))

    @property
    def dim(self) -> int:
        return len(self.coords)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.coords)

    def index(self, name: str) -> int:
        for i, (n, _) in enumerate(self.coords):
            if n == name:
                return i
        raise KeyError(f"no coordinate {name!r} in chart {self.names}")

    def kind_of(self, name: str) -> str:
        return self.coords[self.index(name)][1]

    def is_angular(self, name: str) -> bool:
        return self.kind_of(name) == ANGULAR

    @property
    def angular_names(self) -> frozenset[str]:
        return frozenset(n for n, k in self.coords if k == ANGULAR)

    def check_scalar(self, e: Expr) -> Expr:
        """Reject expressions that use an angular coordinate as a bare symbol."""
        bad = e.bare_coordinates() & self.angular_names
        if bad:
            raise ValueError(
                f"angular coordinates {sorted(bad)} may only appear via sin/cos"
            )
        return e

    def __str__(self) -> str:
        return " ".join(
            ("@" + n) if k == ANGULAR else n for n, k in self.coords
        )


@dataclass(frozen=True)
class AngularComponent:
    """An angular map component: a source angle plus an optional shift."""

    base: str
    shift: Expr = field(default_factory=lambda: ZERO)


Component = Union[Expr, AngularComponent]


@dataclass(frozen=True)
class CoordMap:
    source: Chart
    target: Chart
    components: tuple[tuple[str, Component], ...]

    @classmethod
    def build(
        cls, source: Chart, target: Chart, components: Mapping[str, Component]
    ) -> "CoordMap":
        missing = set(target.names) - set(components)
        if missing:
            raise ValueError(f"missing components for {sorted(missing)}")
        extra = set(components) - set(target.names)
        if extra:
            raise ValueError(f"components {sorted(extra)} not in target chart")
        ordered = []
        for name in target.names:
            comp = components[name]
            if target.is_angular(name):
                if not isinstance(comp, AngularComponent):
                    raise ValueError(
                        f"angular coordinate {name!r} needs an AngularComponent"
                    )
                if not source.is_angular(comp.base):
                    raise ValueError(
                        f"{comp.base!r} is not an angular coordinate of the source"
                    )
                source.check_scalar(comp.shift)
            else:
                if isinstance(comp, AngularComponent):
                    raise ValueError(
                        f"linear coordinate {name!r} got an angular component"
                    )
                source.check_scalar(comp)
            ordered.append((name, comp))
        return cls(source, target, tuple(ordered))

    def component(self, name: str) -> Component:
        for n, comp in self.components:
            if n == name:
                return comp
        raise KeyError(name)

    def pull_scalar(self, e: Expr) -> Expr:
        """Substitute this map into a scalar living on the target chart."""
        subst = {
            name: comp
            for name, comp in self.components
            if isinstance(comp, Expr) and comp != Expr.coordinate(name)
        }
        out = e.substitute_coordinates(subst) if subst else e
        for angle in e.angles():
            if angle not in self.target.names or not self.target.is_angular(angle):
                continue  # a formal parameter, not a coordinate
            comp = self.component(angle)
            assert isinstance(comp, AngularComponent)
            if not comp.shift.is_zero:
                raise ValueError(
                    f"cannot substitute sin/cos of shifted angle {angle!r}"
                )
            if comp.base != angle:
                out = out.substitute_angle(
                    angle, Expr.sine(comp.base), Expr.cosine(comp.base)
                )
        return out

    def then(self, outer: "CoordMap") -> "CoordMap":
        """Composite map: apply self first, then outer."""
        if outer.source is not self.target and outer.source != self.target:
            raise ValueError("charts do not match for composition")
        components: dict[str, Component] = {}
        for name, comp in outer.components:
            if isinstance(comp, AngularComponent):
                inner = self.component(comp.base)
                assert isinstance(inner, AngularComponent)
                components[name] = AngularComponent(
                    inner.base, inner.shift + self.pull_scalar(comp.shift)
                )
            else:
                components[name] = self.pull_scalar(comp)
        return CoordMap.build(self.source, outer.target, components)


def identity_map(chart: Chart) -> CoordMap:
    components: dict[str, Component] = {}
    for name, kind in chart.coords:
        if kind == ANGULAR:
            components[name] = AngularComponent(name)
        else:
            components[name] = Expr.coordinate(name)
    return CoordMap.build(chart, chart, components)
