"""Exact arithmetic in the real quadratic field Q(sqrt 6).

Elements are stored as ``(a + b*sqrt(6)) / r`` with integers ``a, b`` and
``r > 0`` in lowest terms.  Comparisons and floors never touch floating
point: the sign of ``a + b*sqrt(6)`` is decided by squaring.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from functools import total_ordering
from typing import Union

Number = Union[int, Fraction, "QSqrt6"]


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def sign_a_plus_b_sqrt6(a: int, b: int) -> int:
    """Sign of ``a + b*sqrt(6)`` for integers ``a, b``."""
    sa, sb = _sign(a), _sign(b)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: compare a^2 against 6 b^2 (never equal, sqrt 6 irrational)
    return sa if a * a > 6 * b * b else sb


def floor_b_sqrt6(b: int) -> int:
    """``floor(b*sqrt(6))`` for an integer ``b``."""
    if b == 0:
        return 0
    root = math.isqrt(6 * b * b)
    return root if b > 0 else -root - 1


@total_ordering
class QSqrt6:
    __slots__ = ("a", "b", "r")

    def __init__(self, a: int = 0, b: int = 0, r: int = 1) -> None:
        if r == 0:
            raise ZeroDivisionError("denominator is zero")
        if r < 0:
            a, b, r = -a, -b, -r
        g = math.gcd(math.gcd(a, b), r)
        if g > 1:
            a, b, r = a // g, b // g, r // g
        self.a = a
        self.b = b
        self.r = r

    # construction -----------------------------------------------------
    @classmethod
    def from_parts(cls, rational: Fraction | int, surd: Fraction | int = 0) -> QSqrt6:
        """Build ``rational + surd*sqrt(6)``."""
        p, q = Fraction(rational), Fraction(surd)
        den = p.denominator * q.denominator // math.gcd(p.denominator, q.denominator)
        return cls(p.numerator * (den // p.denominator), q.numerator * (den // q.denominator), den)

    @classmethod
    def coerce(cls, x: Number | float) -> QSqrt6:
        if isinstance(x, QSqrt6):
            return x
        if isinstance(x, bool):
            raise TypeError("bool is not a field element")
        if isinstance(x, int):
            return cls(x, 0, 1)
        if isinstance(x, (Fraction, float)):
            f = Fraction(x)
            return cls(f.numerator, 0, f.denominator)
        raise TypeError(f"cannot coerce {type(x).__name__} to QSqrt6")

    @classmethod
    def sqrt6(cls) -> QSqrt6:
        return cls(0, 1, 1)

    _TERM = re.compile(r"^([+-]?)([0-9./]*)\*?(sqrt\(?6\)?)?$")

    @classmethod
    def parse(cls, text: str) -> QSqrt6:
        """Parse ``"1/4"``, ``"0.05"``, ``"sqrt(3/2)"``, ``"1/2*sqrt6"`` or
        sums such as ``"-1 + 1/2*sqrt(6)"``."""
        s = text.strip().replace(" ", "")
        if s in ("sqrt(3/2)", "sqrt3/2"):
            return cls(0, 1, 2)
        out = cls(0)
        for term in re.findall(r"[+-]?[^+-]+", s):
            m = cls._TERM.match(term)
            if m is None or not (m.group(2) or m.group(3)):
                raise ValueError(f"cannot parse field element {text!r}")
            coeff = Fraction(m.group(2)) if m.group(2) else Fraction(1)
            if m.group(1) == "-":
                coeff = -coeff
            out = out + (cls.from_parts(0, coeff) if m.group(3) else cls.from_parts(coeff))
        return out

    # accessors ----------------------------------------------------------
    @property
    def rational_part(self) -> Fraction:
        return Fraction(self.a, self.r)

    @property
    def surd_part(self) -> Fraction:
        return Fraction(self.b, self.r)

    def is_rational(self) -> bool:
        return self.b == 0

    def sign(self) -> int:
        return sign_a_plus_b_sqrt6(self.a, self.b)

    def floor(self) -> int:
        # a + b*sqrt6 is irrational unless b == 0, so it sits strictly inside
        # (N, N+1) with N = a + floor(b*sqrt6) and N//r is the exact floor
        return (self.a + floor_b_sqrt6(self.b)) // self.r

    def __floor__(self) -> int:
        return self.floor()

    def frac(self) -> QSqrt6:
        """Representative in [0, 1)."""
        return self - self.floor()

    def conjugate(self) -> QSqrt6:
        return QSqrt6(self.a, -self.b, self.r)

    def __float__(self) -> float:
        return (self.a + self.b * math.sqrt(6.0)) / self.r

    # arithmetic ---------------------------------------------------------
    def __add__(self, other: Number) -> QSqrt6:
        try:
            o = QSqrt6.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt6(self.a * o.r + o.a * self.r, self.b * o.r + o.b * self.r, self.r * o.r)

    __radd__ = __add__

    def __neg__(self) -> QSqrt6:
        return QSqrt6(-self.a, -self.b, self.r)

    def __sub__(self, other: Number) -> QSqrt6:
        try:
            o = QSqrt6.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other: Number) -> QSqrt6:
        return QSqrt6.coerce(other) - self

    def __mul__(self, other: Number) -> QSqrt6:
        try:
            o = QSqrt6.coerce(other)
        except TypeError:
            return NotImplemented
        return QSqrt6(self.a * o.a + 6 * self.b * o.b, self.a * o.b + self.b * o.a, self.r * o.r)

    __rmul__ = __mul__

    def __truediv__(self, other: Number) -> QSqrt6:
        try:
            o = QSqrt6.coerce(other)
        except TypeError:
            return NotImplemented
        norm = o.a * o.a - 6 * o.b * o.b
        if norm == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt6)")
        # x / o = x * conj(o) * o.r / norm
        num = self * QSqrt6(o.a, -o.b, 1)
        return QSqrt6(num.a * o.r, num.b * o.r, num.r * norm)

    def __rtruediv__(self, other: Number) -> QSqrt6:
        return QSqrt6.coerce(other) / self

    def __pow__(self, n: int) -> QSqrt6:
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        out, base = QSqrt6(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # comparison ---------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        try:
            o = QSqrt6.coerce(other)  # type: ignore[arg-type]
        except TypeError:
            return NotImplemented
        return (self.a, self.b, self.r) == (o.a, o.b, o.r)

    def __lt__(self, other: Number) -> bool:
        try:
            o = QSqrt6.coerce(other)
        except TypeError:
            return NotImplemented
        return (self - o).sign() < 0

    def __hash__(self) -> int:
        if self.b == 0:
            return hash(Fraction(self.a, self.r))
        return hash((self.a, self.b, self.r))

    def __repr__(self) -> str:
        return f"QSqrt6({self.a}, {self.b}, {self.r})"

    def __str__(self) -> str:
        p, q = self.rational_part, self.surd_part
        if q == 0:
            return str(p)
        surd = f"{q}*sqrt6" if q not in (1, -1) else ("sqrt6" if q == 1 else "-sqrt6")
        if p == 0:
            return surd
        return f"{p}{'+' if q > 0 else ''}{surd}"

    # serialization ------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "rational": str(self.rational_part),
            "sqrt6": str(self.surd_part),
            "float": float(self),
        }

    @classmethod
    def from_json(cls, doc: dict | str | int | float) -> QSqrt6:
        if isinstance(doc, dict):
            return cls.from_parts(Fraction(doc.get("rational", "0")), Fraction(doc.get("sqrt6", "0")))
        if isinstance(doc, str):
            return cls.parse(doc)
        return cls.coerce(doc)


SQRT6 = QSqrt6.sqrt6()


def exact_floor(x: QSqrt6 | Fraction | int | float) -> int:
    """Floor of a field element, rational, or float (floats are taken at
    their exact binary value)."""
    if isinstance(x, QSqrt6):
        return x.floor()
    return math.floor(Fraction(x))


def mod_one(x: QSqrt6 | Fraction | float) -> QSqrt6 | Fraction | float:
    """Reduce into [0, 1) keeping the representation type."""
    if isinstance(x, QSqrt6):
        return x.frac()
    if isinstance(x, Fraction):
        return x - math.floor(x)
    return x - math.floor(x)
