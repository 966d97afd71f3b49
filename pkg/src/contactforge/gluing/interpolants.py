"""Certified interpolating functions for the collar of the product form.

The pair (f, g) interpolates between the two boundary regimes of the
gluing collar: f even with f(t) = e^{t+1} on the left end, g odd with
g(t) = 1 there, and f'g - fg' > 0 throughout.  Geometrically (g, f)
traces a curve in the plane whose angle seen from the origin increases
monotonically; f'g - fg' is rho^2 * (angular velocity), so the
construction keeps positivity structural and the grid/Lipschitz
certificate is a safety net, not the design.

Concretely the left half t <= 0 is stored as two closed-form segments

    t in (-1-eps, -1]:  f = e^{t+1},                 g = 1
    t in [-1, 0]:       f = (1-s) e^{t+1} + s * a,   g = (1-s) + s * b * t

with s a flat smooth step in u = t+1 (identically-flat at both ends to
infinite order, built from e^{-1/x}), a > 0 the centre value of f and
b < 0 the centre slope of g.  The right half is generated by reflection,
so the parity identities are exact by construction, not approximately.

Pieces form a tiny closed-form AST (rationals, t, +, *, /, exp, and the
guarded kernels e^{-1/x}/x^k) that differentiates symbolically and
evaluates over floats or intervals; that is exactly what the positivity
certifier needs for its Lipschitz bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from ..symcalc import Expr, certify_positive, function
from ..symcalc.certify import CertificationReport, Interval


class Piece:
    __slots__ = ()

    def d(self) -> "Piece":
        raise NotImplementedError

    def ev(self, t: float, memo: dict) -> float:
        raise NotImplementedError

    def iv(self, box: Interval, memo: dict) -> Interval:
        raise NotImplementedError


class Num(Piece):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = float(value)

    def d(self):
        return _ZERO

    def ev(self, t, memo):
        return self.value

    def iv(self, box, memo):
        return Interval.point(self.value)


class Var(Piece):
    __slots__ = ()

    def d(self):
        return _ONE

    def ev(self, t, memo):
        return t

    def iv(self, box, memo):
        return box


class Add(Piece):
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a, self.b = a, b

    def d(self):
        return add(self.a.d(), self.b.d())

    def ev(self, t, memo):
        key = id(self)
        if key not in memo:
            memo[key] = self.a.ev(t, memo) + self.b.ev(t, memo)
        return memo[key]

    def iv(self, box, memo):
        key = id(self)
        if key not in memo:
            memo[key] = self.a.iv(box, memo) + self.b.iv(box, memo)
        return memo[key]


class Mul(Piece):
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a, self.b = a, b

    def d(self):
        return add(mul(self.a.d(), self.b), mul(self.a, self.b.d()))

    def ev(self, t, memo):
        key = id(self)
        if key not in memo:
            memo[key] = self.a.ev(t, memo) * self.b.ev(t, memo)
        return memo[key]

    def iv(self, box, memo):
        key = id(self)
        if key not in memo:
            memo[key] = self.a.iv(box, memo) * self.b.iv(box, memo)
        return memo[key]


class Neg(Piece):
    __slots__ = ("a",)

    def __init__(self, a):
        self.a = a

    def d(self):
        return neg(self.a.d())

    def ev(self, t, memo):
        return -self.a.ev(t, memo)

    def iv(self, box, memo):
        return -self.a.iv(box, memo)


class Div(Piece):
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a, self.b = a, b

    def d(self):
        numerator = add(mul(self.a.d(), self.b), neg(mul(self.a, self.b.d())))
        return Div(numerator, mul(self.b, self.b))

    def ev(self, t, memo):
        key = id(self)
        if key not in memo:
            memo[key] = self.a.ev(t, memo) / self.b.ev(t, memo)
        return memo[key]

    def iv(self, box, memo):
        key = id(self)
        if key not in memo:
            den = self.b.iv(box, memo)
            if den.contains_zero:
                raise ValueError("interval division by an interval containing zero")
            num = self.a.iv(box, memo)
            candidates = (
                num.lo / den.lo, num.lo / den.hi, num.hi / den.lo, num.hi / den.hi
            )
            memo[key] = Interval(min(candidates), max(candidates))
        return memo[key]


class Exp(Piece):
    __slots__ = ("a",)

    def __init__(self, a):
        self.a = a

    def d(self):
        return mul(self, self.a.d())

    def ev(self, t, memo):
        key = id(self)
        if key not in memo:
            memo[key] = math.exp(self.a.ev(t, memo))
        return memo[key]

    def iv(self, box, memo):
        key = id(self)
        if key not in memo:
            memo[key] = self.a.iv(box, memo).exp()
        return memo[key]


class Psik(Piece):
    """Guarded cutoff kernel e^{-1/x} / x^k for x > 0, identically 0 for x <= 0."""

    __slots__ = ("a", "k")

    def __init__(self, a, k: int):
        self.a, self.k = a, k

    def d(self):
        inner = add(Psik(self.a, self.k + 2), neg(mul(Num(self.k), Psik(self.a, self.k + 1))))
        return mul(inner, self.a.d())

    @staticmethod
    def _kernel(x: float, k: int) -> float:
        if x <= 0.0:
            return 0.0
        return math.exp(-1.0 / x) / x**k

    def ev(self, t, memo):
        key = id(self)
        if key not in memo:
            memo[key] = self._kernel(self.a.ev(t, memo), self.k)
        return memo[key]

    def iv(self, box, memo):
        key = id(self)
        if key not in memo:
            inner = self.a.iv(box, memo)
            # the kernel rises to its peak at x = 1/k and falls after
            candidates = [0.0] if inner.lo <= 0.0 else []
            for x in (inner.lo, inner.hi):
                candidates.append(self._kernel(x, self.k))
            if self.k > 0 and inner.lo < 1.0 / self.k < inner.hi:
                candidates.append(self._kernel(1.0 / self.k, self.k))
            memo[key] = Interval(min(candidates), max(candidates))
        return memo[key]


_ZERO = Num(0)
_ONE = Num(1)


def add(a: Piece, b: Piece) -> Piece:
    if isinstance(a, Num) and a.value == 0.0:
        return b
    if isinstance(b, Num) and b.value == 0.0:
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value + b.value)
    return Add(a, b)


def mul(a: Piece, b: Piece) -> Piece:
    if isinstance(a, Num):
        if a.value == 0.0:
            return _ZERO
        if a.value == 1.0:
            return b
    if isinstance(b, Num):
        if b.value == 0.0:
            return _ZERO
        if b.value == 1.0:
            return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value * b.value)
    return Mul(a, b)


def neg(a: Piece) -> Piece:
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.a
    return Neg(a)


def smooth_step(u: Piece, complement: Piece) -> Piece:
    """The standard flat step p(u) / (p(u) + p(1-u)); pass 1-u explicitly."""
    rising = Psik(u, 0)
    falling = Psik(complement, 0)
    return Div(rising, add(rising, falling))


EVEN = "even"
ODD = "odd"


class PiecewiseSmooth:
    """A function on (-1-eps, 1+eps) stored on t <= 0, extended by parity.

    Implements the numeric protocol the positivity certifier expects:
    pointwise derivative values and interval enclosures of any order.
    """

    def __init__(self, parity: str, segments: list[tuple[float, Piece]]):
        if parity not in (EVEN, ODD):
            raise ValueError(f"parity must be even or odd, got {parity!r}")
        self.parity = parity
        self.segments = segments  # (upper end, piece), covering t <= 0
        self._derived: dict[tuple[int, int], Piece] = {}

    def _piece(self, index: int, order: int) -> Piece:
        key = (index, order)
        if key not in self._derived:
            if order == 0:
                self._derived[key] = self.segments[index][1]
            else:
                self._derived[key] = self._piece(index, order - 1).d()
        return self._derived[key]

    def _segment_index(self, t: float) -> int:
        for i, (upper, _) in enumerate(self.segments):
            if t <= upper:
                return i
        raise ValueError(f"{t} is beyond the stored half-domain")

    def _mirror_sign(self, order: int) -> float:
        parity_sign = 1.0 if self.parity == EVEN else -1.0
        return parity_sign * (-1.0) ** order

    def value(self, x: float, order: int = 0) -> float:
        if x > 0.0:
            return self._mirror_sign(order) * self.value(-x, order)
        return self._piece(self._segment_index(x), order).ev(x, {})

    def bound(self, lo: float, hi: float, order: int = 0) -> tuple[float, float]:
        if lo > hi:
            raise ValueError("empty interval")
        out: Interval | None = None

        def absorb(iv: Interval):
            nonlocal out
            out = iv if out is None else out.hull(iv)

        if hi > 0.0:
            mlo, mhi = self.bound(-hi, -max(lo, 0.0), order)
            sign = self._mirror_sign(order)
            absorb(Interval(mlo, mhi) if sign > 0 else Interval(-mhi, -mlo))
        if lo <= 0.0:
            a = lo
            b = min(hi, 0.0)
            previous_upper = -math.inf
            for i, (upper, _) in enumerate(self.segments):
                seg_lo = max(a, previous_upper)
                seg_hi = min(b, upper)
                if seg_lo <= seg_hi:
                    absorb(self._piece(i, order).iv(Interval(seg_lo, seg_hi), {}))
                previous_upper = upper
        assert out is not None
        return out.lo, out.hi


@dataclass(frozen=True)
class SmoothingParams:
    """Shape knobs for the blend region; defaults keep the margin wide."""

    centre_value: Fraction = Fraction(1)   # f(0)
    centre_slope: Fraction = Fraction(-1)  # g'(0)

    def __post_init__(self):
        if self.centre_value <= 0:
            raise ValueError("f must stay positive at the centre")
        if self.centre_slope >= 0:
            raise ValueError("g must be strictly decreasing at the centre")


class CertificationError(RuntimeError):
    def __init__(self, message: str, report: CertificationReport):
        super().__init__(message)
        self.report = report


@dataclass
class InterpolantPair:
    """The collar pair (f, g) with its positivity certificate."""

    epsilon: float
    f: PiecewiseSmooth
    g: PiecewiseSmooth
    params: SmoothingParams
    sample_grid: list[float] = field(repr=False)
    margin: float = 0.0
    certification: CertificationReport | None = None

    def wronskian(self, t: float) -> float:
        return self.f.value(t, 1) * self.g.value(t) - self.f.value(t) * self.g.value(t, 1)

    def columns(self, grid: list[float] | None = None) -> list[tuple[float, float, float, float]]:
        grid = self.sample_grid if grid is None else grid
        return [
            (t, self.f.value(t), self.g.value(t), self.wronskian(t)) for t in grid
        ]


def wronskian_expression() -> Expr:
    """f'g - fg' as a symbolic expression over abstract f, g."""
    f, g = function("f", "t"), function("g", "t")
    fp, gp = function("f", "t", 1), function("g", "t", 1)
    return fp * g - f * gp


def build_interpolants(
    epsilon: float,
    smoothing: SmoothingParams | None = None,
    grid_n: int = 2001,
    workers: int = 1,
) -> InterpolantPair:
    """Construct and certify the collar pair for the given collar width."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    params = smoothing or SmoothingParams()

    t = Var()
    u = add(t, _ONE)          # blend parameter, 0 at t=-1 and 1 at t=0
    s = smooth_step(u, neg(t))  # 1 - u = -t
    one_minus_s = add(_ONE, neg(s))
    boundary_growth = Exp(add(t, _ONE))

    f = PiecewiseSmooth(
        EVEN,
        [
            (-1.0, Exp(add(Var(), _ONE))),
            (0.0, add(mul(one_minus_s, boundary_growth), mul(s, Num(params.centre_value)))),
        ],
    )
    g = PiecewiseSmooth(
        ODD,
        [
            (-1.0, Num(1)),
            (0.0, add(one_minus_s, mul(s, mul(Num(params.centre_slope), t)))),
        ],
    )

    half = epsilon / 2.0
    box = {"t": (-1.0 - half, 1.0 + half)}
    report = certify_positive(
        wronskian_expression(),
        box,
        grid_n=grid_n,
        bound_mode="per-cell",
        functions={"f": f, "g": g},
        workers=workers,
    )
    if not report.certified:
        raise CertificationError(
            f"f'g - fg' could not be certified positive "
            f"(min sample {report.min_sampled:.6g} near {report.failing_point})",
            report,
        )

    lo, hi = box["t"]
    grid = [lo + (hi - lo) * i / (grid_n - 1) for i in range(grid_n)]
    return InterpolantPair(
        epsilon=epsilon,
        f=f,
        g=g,
        params=params,
        sample_grid=grid,
        margin=report.margin,
        certification=report,
    )
