"""Exact arithmetic in Q(sqrt2, sqrt3) and polynomials over it."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable

import mpmath as mp

__all__ = ["AlgebraicNumber", "TPoly", "poly", "SQRT2", "SQRT3", "SQRT6", "ONE", "ZERO"]

_RADICALS = (1, 2, 3, 6)
_NAMES = {1: "", 2: "√2", 3: "√3", 6: "√6"}

# product of basis radicals: (i, j) -> (rational factor, index of radical)
_MUL = {}
for _i, _a in enumerate(_RADICALS):
    for _j, _b in enumerate(_RADICALS):
        _p = _a * _b
        for _k, _c in enumerate(_RADICALS):
            if _p % _c == 0:
                _q = _p // _c
                _r = int(round(_q**0.5))
                if _r * _r == _q:
                    _MUL[_i, _j] = (_r, _k)
                    break


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot take {type(x).__name__} as an exact rational")


@dataclass(frozen=True)
class AlgebraicNumber:
    """``a + b sqrt2 + c sqrt3 + d sqrt6`` with rational ``a, b, c, d``."""

    a: Fraction = Fraction(0)
    b: Fraction = Fraction(0)
    c: Fraction = Fraction(0)
    d: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        for name in "abcd":
            object.__setattr__(self, name, _frac(getattr(self, name)))

    @classmethod
    def coerce(cls, x) -> "AlgebraicNumber":
        if isinstance(x, AlgebraicNumber):
            return x
        return cls(_frac(x))

    @classmethod
    def sqrt(cls, q) -> "AlgebraicNumber":
        """``sqrt(q)`` for a non-negative rational whose squarefree part divides 6."""
        q = _frac(q)
        if q < 0:
            raise ValueError("negative radicand")
        if q == 0:
            return cls()
        for k, rad in enumerate(_RADICALS):
            s = q / rad
            num, den = _isqrt_exact(s.numerator), _isqrt_exact(s.denominator)
            if num is not None and den is not None:
                coeffs = [Fraction(0)] * 4
                coeffs[k] = Fraction(num, den)
                return cls(*coeffs)
        raise ValueError(f"sqrt({q}) is not in Q(sqrt2, sqrt3)")

    @property
    def coeffs(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not (self.b or self.c or self.d)

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return AlgebraicNumber(*(x + y for x, y in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return AlgebraicNumber(*(-x for x in self.coeffs))

    def __sub__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        out = [Fraction(0)] * 4
        for i, x in enumerate(self.coeffs):
            if not x:
                continue
            for j, y in enumerate(other.coeffs):
                if y:
                    f, k = _MUL[i, j]
                    out[k] += f * x * y
        return AlgebraicNumber(*out)

    __rmul__ = __mul__

    def conjugate2(self) -> "AlgebraicNumber":
        """Image under sqrt2 -> -sqrt2."""
        return AlgebraicNumber(self.a, -self.b, self.c, -self.d)

    def conjugate3(self) -> "AlgebraicNumber":
        """Image under sqrt3 -> -sqrt3."""
        return AlgebraicNumber(self.a, self.b, -self.c, -self.d)

    def inverse(self) -> "AlgebraicNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in Q(sqrt2, sqrt3)")
        # x * conj3(x) lies in Q(sqrt2); multiplying by its sqrt2-conjugate gives a rational
        m = self * self.conjugate3()
        norm = m * m.conjugate2()
        return self.conjugate3() * m.conjugate2() * (1 / norm.a)

    def __truediv__(self, other):
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return AlgebraicNumber.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out, base = ONE, self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        other = _coerce_or_none(other)
        if other is None:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def to_mpf(self) -> mp.mpf:
        return mp.fsum(mp.mpf(x.numerator) / x.denominator * mp.sqrt(r) for x, r in zip(self.coeffs, _RADICALS) if x)

    def __float__(self) -> float:
        with mp.workprec(80):
            return float(self.to_mpf())

    def __str__(self) -> str:
        parts = []
        for x, r in zip(self.coeffs, _RADICALS):
            if x:
                parts.append(_term(x, r))
        if not parts:
            return "0"
        text = parts[0]
        for p in parts[1:]:
            text += " - " + p[1:] if p.startswith("-") else " + " + p
        return text

    def __repr__(self) -> str:
        return f"AlgebraicNumber({self})"


def _term(x: Fraction, rad: int) -> str:
    sign = "-" if x < 0 else ""
    x = abs(x)
    name = _NAMES[rad]
    num = "" if (x.numerator == 1 and name) else str(x.numerator)
    body = num + name
    if x.denominator != 1:
        body += f"/{x.denominator}"
    return sign + body


def _isqrt_exact(n: int):
    if n < 0:
        return None
    r = math.isqrt(n)
    return r if r * r == n else None


def _coerce_or_none(x):
    try:
        return AlgebraicNumber.coerce(x)
    except TypeError:
        return None


ZERO = AlgebraicNumber()
ONE = AlgebraicNumber(1)
SQRT2 = AlgebraicNumber.sqrt(2)
SQRT3 = AlgebraicNumber.sqrt(3)
SQRT6 = AlgebraicNumber.sqrt(6)


@dataclass(frozen=True)
class TPoly:
    """Polynomial in ``t`` with coefficients in Q(sqrt2, sqrt3); ``coeffs[k]`` multiplies ``t^k``."""

    coeffs: tuple = ()

    def __post_init__(self) -> None:
        cs = [AlgebraicNumber.coerce(c) for c in self.coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def const(cls, c) -> "TPoly":
        return cls((c,))

    @classmethod
    def t(cls) -> "TPoly":
        return cls((0, 1))

    @classmethod
    def coerce(cls, x) -> "TPoly":
        return x if isinstance(x, TPoly) else cls.const(x)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return len(self.coeffs) <= 1

    def constant(self) -> AlgebraicNumber:
        return self.coeffs[0] if self.coeffs else ZERO

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __add__(self, other):
        other = TPoly.coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (ZERO,) * (n - len(self.coeffs))
        b = other.coeffs + (ZERO,) * (n - len(other.coeffs))
        return TPoly(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __neg__(self):
        return TPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-TPoly.coerce(other))

    def __rsub__(self, other):
        return TPoly.coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, TPoly):
            c = AlgebraicNumber.coerce(other)
            return TPoly(tuple(x * c for x in self.coeffs))
        if self.is_zero() or other.is_zero():
            return TPoly()
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, x in enumerate(self.coeffs):
            for j, y in enumerate(other.coeffs):
                out[i + j] = out[i + j] + x * y
        return TPoly(tuple(out))

    __rmul__ = __mul__

    def __truediv__(self, c):
        if isinstance(c, TPoly):
            if not c.is_constant() or c.is_zero():
                raise ZeroDivisionError("division by a non-constant or zero polynomial")
            c = c.constant()
        inv = AlgebraicNumber.coerce(c).inverse()
        return self * inv

    def derivative(self) -> "TPoly":
        return TPoly(tuple(c * k for k, c in enumerate(self.coeffs) if k))

    def __call__(self, t) -> mp.mpf:
        acc = mp.mpf(0)
        for c in reversed(self.coeffs):
            acc = acc * t + c.to_mpf()
        return acc

    def __eq__(self, other) -> bool:
        if not isinstance(other, TPoly):
            try:
                other = TPoly.coerce(other)
            except TypeError:
                return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            mono = "" if k == 0 else ("t" if k == 1 else f"t^{k}")
            cs = str(c)
            if not mono:
                terms.append(cs)
            elif cs == "1":
                terms.append(mono)
            elif cs == "-1":
                terms.append("-" + mono)
            elif " " in cs:
                terms.append(f"({cs})·{mono}")
            else:
                terms.append(f"{cs}·{mono}")
        text = terms[0]
        for p in terms[1:]:
            text += " - " + p[1:] if p.startswith("-") else " + " + p
        return text

    def __repr__(self) -> str:
        return f"TPoly({self})"


def poly(coeffs: Iterable) -> TPoly:
    return TPoly(tuple(coeffs))
