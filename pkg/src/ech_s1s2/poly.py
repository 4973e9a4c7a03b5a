"""Univariate polynomials over Q(sqrt 6), used for profile coefficients in cos(theta)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .surd import QSqrt6


def _trim(coeffs: Sequence[QSqrt6]) -> tuple[QSqrt6, ...]:
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class Poly:
    """``sum(coeffs[k] * u**k)``; coefficients are exact field elements."""

    coeffs: tuple[QSqrt6, ...] = ()

    @classmethod
    def of(cls, coeffs: Iterable) -> Poly:
        return cls(_trim([QSqrt6.coerce(c) for c in coeffs]))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: Poly) -> Poly:
        n = max(len(self.coeffs), len(other.coeffs))
        zero = QSqrt6(0)
        a = self.coeffs + (zero,) * (n - len(self.coeffs))
        b = other.coeffs + (zero,) * (n - len(other.coeffs))
        return Poly(_trim([x + y for x, y in zip(a, b)]))

    def __neg__(self) -> Poly:
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: Poly) -> Poly:
        return self + (-other)

    def __mul__(self, other: Poly | QSqrt6 | int) -> Poly:
        if not isinstance(other, Poly):
            k = QSqrt6.coerce(other)
            return Poly(_trim([c * k for c in self.coeffs]))
        if self.is_zero() or other.is_zero():
            return Poly()
        out = [QSqrt6(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            if x == 0:
                continue
            for j, y in enumerate(other.coeffs):
                out[i + j] = out[i + j] + x * y
        return Poly(_trim(out))

    __rmul__ = __mul__

    def deriv(self) -> Poly:
        return Poly(_trim([c * k for k, c in enumerate(self.coeffs)][1:]))

    def __call__(self, u: QSqrt6 | int) -> QSqrt6:
        acc = QSqrt6(0)
        for c in reversed(self.coeffs):
            acc = acc * u + c
        return acc

    def divmod(self, other: Poly) -> tuple[Poly, Poly]:
        """Exact long division ``self = q*other + r`` with ``deg r < deg other``."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        lead = other.coeffs[-1]
        quot = [QSqrt6(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        for k in range(len(quot) - 1, -1, -1):
            c = rem[k + len(other.coeffs) - 1] / lead
            quot[k] = c
            for j, y in enumerate(other.coeffs):
                rem[k + j] = rem[k + j] - c * y
        return Poly(_trim(quot)), Poly(_trim(rem))

    def is_even(self) -> bool:
        return all(c == 0 for c in self.coeffs[1::2])

    def is_odd(self) -> bool:
        return all(c == 0 for c in self.coeffs[0::2])

    def float_coeffs(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs], dtype=float)

    @cached_property
    def _horner(self) -> np.ndarray:
        # highest degree first, as np.polyval expects
        return self.float_coeffs()[::-1].copy()

    def evalf(self, u):
        """Float evaluation; ``u`` may be a scalar or an ndarray."""
        if not self.coeffs:
            return np.zeros_like(np.asarray(u, dtype=float)) if np.ndim(u) else 0.0
        return np.polyval(self._horner, u)

    def to_json(self) -> list:
        return [c.to_json() for c in self.coeffs]

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = [f"({c})*u^{k}" if k else f"({c})" for k, c in enumerate(self.coeffs) if c != 0]
        return " + ".join(terms)


U = Poly.of([0, 1])
ONE = Poly.of([1])
