"""Arbitrary-precision interval arithmetic with outward rounding.

Every operation returns an interval that contains the exact real image of its
inputs (containment soundness).  Lower endpoints are computed rounding toward
-inf and upper endpoints rounding toward +inf; the elementary functions are
the correctly rounded MPFR implementations, so directed rounding alone already
guarantees containment.

Values are immutable and all operations are pure functions of their inputs and
the requested precision.  Rounding direction is never set globally: each call
uses private per-thread context objects, so concurrent evaluations cannot
observe each other's rounding state.
"""

from __future__ import annotations

import re
import threading
from decimal import Decimal, localcontext, ROUND_CEILING, ROUND_FLOOR
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from .errors import (
    DegenerateInterval,
    DivisionByIntervalContainingZero,
    DomainViolation,
    OverflowRange,
)

DEFAULT_PRECISION = 64

# Function vocabulary shared with the expression grammar.  All of these are
# monotone increasing on their domains except cosh, which is handled by cases.
FUNCTIONS = ("exp", "ln", "sqrt", "cosh", "sinh", "tanh", "arcosh", "artanh")

_GMPY_NAME = {"ln": "log", "arcosh": "acosh", "artanh": "atanh"}

_local = threading.local()


def _ctx(precision: int, direction: str):
    """Per-thread cached context for one (precision, rounding direction) pair.

    Contexts record sticky flags on use, so they must not be shared between
    threads.
    """
    cache = getattr(_local, "contexts", None)
    if cache is None:
        cache = _local.contexts = {}
    key = (precision, direction)
    ctx = cache.get(key)
    if ctx is None:
        rnd = {"down": gmpy2.RoundDown, "up": gmpy2.RoundUp, "nearest": gmpy2.RoundToNearest}[direction]
        ctx = gmpy2.context(precision=precision, round=rnd)
        cache[key] = ctx
    return ctx


def _require_finite(value: mpfr, operation: str) -> mpfr:
    if not gmpy2.is_finite(value):
        raise OverflowRange(f"{operation} left the exponent range (result {value})")
    return value


_HEX_RE = re.compile(r"^([+-])0x([0-9a-f]+)p([+-]\d+)/(\d+)$")


class Scalar:
    """A finite arbitrary-precision binary float with explicit precision.

    The value is exactly ``mantissa * 2**exponent``.  Re-rounding a Scalar to
    its own precision is the identity, and comparisons are exact value
    comparisons regardless of the operands' precisions.
    """

    __slots__ = ("value",)

    def __init__(self, value: mpfr):
        if not isinstance(value, mpfr):
            raise TypeError(f"Scalar wraps mpfr, got {type(value).__name__}")
        if not gmpy2.is_finite(value):
            raise OverflowRange(f"Scalar must be finite, got {value}")
        object.__setattr__(self, "value", value)

    def __setattr__(self, name, _value):
        raise AttributeError("Scalar is immutable")

    @property
    def precision_bits(self) -> int:
        return self.value.precision

    @classmethod
    def from_decimal(cls, text: str, precision: int = DEFAULT_PRECISION, direction: str = "nearest") -> "Scalar":
        """Convert a decimal literal exactly (via a rational) with one directed rounding."""
        return cls(_require_finite(_ctx(precision, direction).add(_decimal_to_mpq(text), mpfr(0, precision)), "decimal conversion"))

    @classmethod
    def from_int(cls, n: int, precision: int = DEFAULT_PRECISION, direction: str = "nearest") -> "Scalar":
        return cls(_require_finite(_ctx(precision, direction).add(mpz(n), mpfr(0, precision)), "integer conversion"))

    def to_hex(self) -> str:
        """Exact textual form ``{sign}0x{mantissa}p{exponent}/{precision}``."""
        m, e = self.value.as_mantissa_exp()
        m = int(m)
        sign = "-" if m < 0 else "+"
        if m == 0:
            return f"+0x0p+0/{self.precision_bits}"
        return f"{sign}0x{abs(m):x}p{int(e):+d}/{self.precision_bits}"

    @classmethod
    def from_hex(cls, text: str) -> "Scalar":
        match = _HEX_RE.match(text)
        if match is None:
            raise ValueError(f"not a scalar hex rendering: {text!r}")
        sign, mant, exp, prec = match.groups()
        precision = int(prec)
        m = int(mant, 16)
        if m.bit_length() > precision:
            raise ValueError(f"mantissa needs {m.bit_length()} bits but precision is {precision}")
        if sign == "-":
            m = -m
        ctx = _ctx(precision, "nearest")
        base = ctx.add(mpz(m), mpfr(0, precision))  # exact: m fits in precision bits
        e = int(exp)
        value = ctx.mul_2exp(base, e) if e >= 0 else ctx.div_2exp(base, -e)
        return cls(_require_finite(value, "hex scalar"))

    def to_fraction(self) -> Fraction:
        m, e = self.value.as_mantissa_exp()
        m, e = int(m), int(e)
        return Fraction(m) * (Fraction(2) ** e)

    def decimal(self, digits: int | None = None, direction: str = "nearest") -> str:
        """Decimal rendering with directed rounding (sound for lo/hi output)."""
        if digits is None:
            digits = max(2, int(self.precision_bits * 0.30103) + 3)
        frac = self.to_fraction()
        rounding = {"down": ROUND_FLOOR, "up": ROUND_CEILING, "nearest": None}[direction]
        with localcontext() as dctx:
            dctx.prec = digits
            if rounding is not None:
                dctx.rounding = rounding
            result = Decimal(frac.numerator) / Decimal(frac.denominator)
        return str(result)

    def is_zero(self) -> bool:
        return self.value == 0

    def __repr__(self):
        return f"Scalar({self.decimal()}@{self.precision_bits})"

    def __eq__(self, other):
        return self.value == (other.value if isinstance(other, Scalar) else other)

    def __lt__(self, other):
        return self.value < (other.value if isinstance(other, Scalar) else other)

    def __le__(self, other):
        return self.value <= (other.value if isinstance(other, Scalar) else other)

    def __gt__(self, other):
        return self.value > (other.value if isinstance(other, Scalar) else other)

    def __ge__(self, other):
        return self.value >= (other.value if isinstance(other, Scalar) else other)

    def __hash__(self):
        return hash(self.value)


def _decimal_to_mpq(text: str) -> mpq:
    """Exact rational value of a decimal literal (plain or scientific notation)."""
    text = text.strip()
    try:
        return mpq(text)
    except ValueError:
        pass
    # mpq rejects exponent notation; split it off and scale exactly.
    mantissa, _, exponent = text.lower().partition("e")
    value = mpq(mantissa)
    exp = int(exponent)
    scale = mpq(10) ** abs(exp)
    return value * scale if exp >= 0 else value / scale


class Interval:
    """A closed interval [lo, hi] of Scalars with lo <= hi, both finite."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo: Scalar, hi: Scalar):
        if not (isinstance(lo, Scalar) and isinstance(hi, Scalar)):
            raise TypeError("Interval endpoints must be Scalars")
        if not lo.value <= hi.value:
            raise ValueError(f"interval endpoints out of order: {lo!r} > {hi!r}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, _value):
        raise AttributeError("Interval is immutable")

    @classmethod
    def point(cls, value: Scalar) -> "Interval":
        return cls(value, value)

    @classmethod
    def from_decimal(cls, lo_text: str, hi_text: str | None = None, precision: int = DEFAULT_PRECISION) -> "Interval":
        """Outward (<= 1 ulp per endpoint) interval for decimal literals.

        A single literal yields the tightest representable enclosure of its
        exact rational value; 0.3 is not binary-exact, so the result has
        positive width.
        """
        if hi_text is None:
            hi_text = lo_text
        lo = Scalar.from_decimal(lo_text, precision, "down")
        hi = Scalar.from_decimal(hi_text, precision, "up")
        return cls(lo, hi)

    @classmethod
    def from_int(cls, n: int, precision: int = DEFAULT_PRECISION) -> "Interval":
        lo = Scalar.from_int(n, precision, "down")
        hi = Scalar.from_int(n, precision, "up")
        return cls(lo, hi)

    def width(self, precision: int = DEFAULT_PRECISION) -> Scalar:
        """Upper bound on hi - lo (rounded up)."""
        return Scalar(_require_finite(_ctx(precision, "up").sub(self.hi.value, self.lo.value), "width"))

    def contains(self, other) -> bool:
        if isinstance(other, Interval):
            return self.lo.value <= other.lo.value and other.hi.value <= self.hi.value
        value = other.value if isinstance(other, Scalar) else other
        return self.lo.value <= value <= self.hi.value

    def overlaps(self, other: "Interval") -> bool:
        return self.lo.value <= other.hi.value and other.lo.value <= self.hi.value

    def is_degenerate(self) -> bool:
        return self.lo.value == self.hi.value

    def midpoint(self) -> Scalar:
        """A point strictly inside the interval (the exact midpoint when representable)."""
        if self.is_degenerate():
            return self.lo
        return Scalar(_midpoint_value(self.lo.value, self.hi.value))

    def __repr__(self):
        return f"[{self.lo.decimal()}, {self.hi.decimal()}]"

    def __eq__(self, other):
        return (
            isinstance(other, Interval)
            and self.lo.value == other.lo.value
            and self.hi.value == other.hi.value
        )

    def __hash__(self):
        return hash((self.lo, self.hi))


def _midpoint_value(lo: mpfr, hi: mpfr) -> mpfr:
    # One extra bit usually renders (lo + hi)/2 exactly; widen until the
    # midpoint falls strictly inside (guaranteed once the sum is exact).
    precision = max(lo.precision, hi.precision) + 1
    while True:
        ctx = _ctx(precision, "nearest")
        mid = ctx.div_2exp(ctx.add(lo, hi), 1)
        if lo < mid < hi:
            return mid
        precision *= 2
        if precision > 1 << 20:  # cannot happen for finite inputs; guard anyway
            raise DegenerateInterval(f"no representable midpoint for [{lo}, {hi}]")


# ---------------------------------------------------------------------------
# Arithmetic
# ---------------------------------------------------------------------------

def add(a: Interval, b: Interval, precision: int = DEFAULT_PRECISION) -> Interval:
    lo = _ctx(precision, "down").add(a.lo.value, b.lo.value)
    hi = _ctx(precision, "up").add(a.hi.value, b.hi.value)
    return _interval(lo, hi, "add")


def sub(a: Interval, b: Interval, precision: int = DEFAULT_PRECISION) -> Interval:
    lo = _ctx(precision, "down").sub(a.lo.value, b.hi.value)
    hi = _ctx(precision, "up").sub(a.hi.value, b.lo.value)
    return _interval(lo, hi, "sub")


def mul(a: Interval, b: Interval, precision: int = DEFAULT_PRECISION) -> Interval:
    down = _ctx(precision, "down")
    up = _ctx(precision, "up")
    pairs = (
        (a.lo.value, b.lo.value),
        (a.lo.value, b.hi.value),
        (a.hi.value, b.lo.value),
        (a.hi.value, b.hi.value),
    )
    lo = min(down.mul(x, y) for x, y in pairs)
    hi = max(up.mul(x, y) for x, y in pairs)
    return _interval(lo, hi, "mul")


def div(a: Interval, b: Interval, precision: int = DEFAULT_PRECISION) -> Interval:
    if b.lo.value <= 0 <= b.hi.value:
        raise DivisionByIntervalContainingZero(f"divisor {b!r} contains zero")
    down = _ctx(precision, "down")
    up = _ctx(precision, "up")
    pairs = (
        (a.lo.value, b.lo.value),
        (a.lo.value, b.hi.value),
        (a.hi.value, b.lo.value),
        (a.hi.value, b.hi.value),
    )
    lo = min(down.div(x, y) for x, y in pairs)
    hi = max(up.div(x, y) for x, y in pairs)
    return _interval(lo, hi, "div")


def neg(a: Interval) -> Interval:
    # Negation is exact at any precision.
    return Interval(Scalar(-a.hi.value), Scalar(-a.lo.value))


_ARITH = {"add": add, "sub": sub, "mul": mul, "div": div}


def arith(op: str, a: Interval, b: Interval, precision: int = DEFAULT_PRECISION) -> Interval:
    try:
        fn = _ARITH[op]
    except KeyError:
        raise ValueError(f"unknown arithmetic op {op!r}") from None
    return fn(a, b, precision)


def _interval(lo: mpfr, hi: mpfr, operation: str) -> Interval:
    return Interval(Scalar(_require_finite(lo, operation)), Scalar(_require_finite(hi, operation)))


# ---------------------------------------------------------------------------
# Elementary functions
# ---------------------------------------------------------------------------

def fn_eval(name: str, x: Interval, precision: int = DEFAULT_PRECISION) -> Interval:
    """Containment enclosure of an elementary function over an interval.

    Monotone functions are evaluated at the endpoints with directed rounding;
    cosh on a zero-straddling interval returns [1, cosh(max(|lo|, hi))]
    rounded outward.  Domain preconditions are checked before evaluating and
    violations identify the offending endpoint.
    """
    if name not in FUNCTIONS:
        raise ValueError(f"unknown function {name!r}")
    lo, hi = x.lo.value, x.hi.value
    if name == "ln" and lo <= 0:
        raise DomainViolation(name, f"needs lo > 0, got lo = {x.lo.decimal()}")
    if name == "sqrt" and lo < 0:
        raise DomainViolation(name, f"needs lo >= 0, got lo = {x.lo.decimal()}")
    if name == "arcosh" and lo < 1:
        raise DomainViolation(name, f"needs lo >= 1, got lo = {x.lo.decimal()}")
    if name == "artanh":
        if lo <= -1:
            raise DomainViolation(name, f"needs lo > -1, got lo = {x.lo.decimal()}")
        if hi >= 1:
            raise DomainViolation(name, f"needs hi < 1, got hi = {x.hi.decimal()}")

    down = _ctx(precision, "down")
    up = _ctx(precision, "up")
    if name == "cosh":
        if lo >= 0:
            return _interval(down.cosh(lo), up.cosh(hi), name)
        if hi <= 0:
            return _interval(down.cosh(hi), up.cosh(lo), name)
        peak = max(-lo, hi)
        return _interval(down.cosh(mpfr(0)), up.cosh(peak), name)
    gmpy_name = _GMPY_NAME.get(name, name)
    return _interval(getattr(down, gmpy_name)(lo), getattr(up, gmpy_name)(hi), name)


def pow_int(x: Interval, exponent: int, precision: int = DEFAULT_PRECISION) -> Interval:
    """x**n for integer n (negative n via reciprocal; 0 not allowed in x then)."""
    if exponent == 0:
        one = mpfr(1, precision)
        return Interval(Scalar(one), Scalar(one))
    if exponent < 0:
        return div(Interval.from_int(1, precision), pow_int(x, -exponent, precision), precision)
    lo, hi = x.lo.value, x.hi.value
    down = _ctx(precision, "down")
    up = _ctx(precision, "up")
    if exponent % 2 == 1 or lo >= 0:
        return _interval(_pow_directed(lo, exponent, down, up), _pow_directed(hi, exponent, up, down), "pow")
    if hi <= 0:
        return _interval(_pow_directed(hi, exponent, down, up), _pow_directed(lo, exponent, up, down), "pow")
    peak = max(-lo, hi)
    return _interval(mpfr(0), _pow_mag(peak, exponent, up), "pow")


def _pow_directed(base: mpfr, n: int, ctx, opposite):
    # Directed n-th power of a signed endpoint: work on the magnitude (where
    # repeated multiplication rounds monotonically) and restore the sign.
    if base >= 0:
        return _pow_mag(base, n, ctx)
    magnitude = _pow_mag(-base, n, opposite if n % 2 == 1 else ctx)
    return -magnitude if n % 2 == 1 else magnitude


def _pow_mag(base: mpfr, n: int, ctx):
    # Square-and-multiply with one rounding direction; sound for base >= 0.
    result = mpfr(1)
    power = base
    while n:
        if n & 1:
            result = ctx.mul(result, power)
        n >>= 1
        if n:
            power = ctx.mul(power, power)
    return result


def bisect(x: Interval) -> tuple[Interval, Interval]:
    """Split at a strictly interior midpoint; the halves share that endpoint.

    The union is exactly x and the interiors are disjoint, which keeps
    certificate partition checks exact.
    """
    if x.is_degenerate():
        raise DegenerateInterval(f"cannot bisect degenerate interval {x!r}")
    mid = Scalar(_midpoint_value(x.lo.value, x.hi.value))
    return Interval(x.lo, mid), Interval(mid, x.hi)
