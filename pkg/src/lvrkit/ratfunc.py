"""Exact rational functions of the matrix size N.

Polynomials are tuples of coefficients, lowest degree first.  A
:class:`RationalFunctionOfN` is kept canonical: integer coefficients, no
common polynomial factor, content removed, denominator leading coefficient
positive.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce


def _trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def padd(a, b):
    n = max(len(a), len(b))
    return _trim((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n))


def pneg(a):
    return tuple(-x for x in a)


def psub(a, b):
    return padd(a, pneg(b))


def pmul(a, b):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _trim(out)


def pscale(a, c):
    return _trim(x * c for x in a)


def pdivmod(a, b):
    """Division over Q; returns (quotient, remainder) with Fraction coefficients."""
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    r = [Fraction(x) for x in _trim(a)]
    lead = Fraction(b[-1])
    if len(r) < len(b):
        return (), _trim(r)
    q = [Fraction(0)] * (len(r) - len(b) + 1)
    for shift in range(len(r) - len(b), -1, -1):
        coef = r[shift + len(b) - 1] / lead
        q[shift] = coef
        if coef:
            for j, y in enumerate(b):
                r[shift + j] -= coef * y
    return _trim(q), _trim(r[: len(b) - 1])


def pexact_div(a, b):
    q, r = pdivmod(a, b)
    if r:
        raise ArithmeticError("inexact polynomial division")
    return _to_int_poly(q)


def _to_int_poly(p):
    out = []
    for x in p:
        x = Fraction(x)
        if x.denominator != 1:
            raise ArithmeticError("non-integer coefficient")
        out.append(int(x))
    return tuple(out)


def primitive(p):
    """Scale a Q-polynomial to a primitive integer polynomial (positive lead)."""
    p = _trim(Fraction(x) for x in p)
    if not p:
        return ()
    den = reduce(math.lcm, (x.denominator for x in p), 1)
    ints = [int(x * den) for x in p]
    g = reduce(math.gcd, ints, 0)
    ints = [x // g for x in ints]
    if ints[-1] < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def pgcd(a, b):
    """Primitive gcd over Q[N] (Euclid on primitive parts)."""
    a, b = primitive(a), primitive(b)
    while b:
        _, r = pdivmod(a, b)
        a, b = b, primitive(r)
    return a


def peval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def degree(p):
    return len(_trim(p)) - 1


class RationalFunctionOfN:
    __slots__ = ("num", "den")

    def __init__(self, num, den=(1,)):
        num, den = _trim(num), _trim(den)
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num:
            self.num, self.den = (), (1,)
            return
        num_f = [Fraction(x) for x in num]
        den_f = [Fraction(x) for x in den]
        g = pgcd(num_f, den_f)
        if len(g) > 1:
            num_f = list(pdivmod(num_f, g)[0])
            den_f = list(pdivmod(den_f, g)[0])
        # clear denominators jointly, then remove joint integer content
        scale = reduce(math.lcm, (x.denominator for x in num_f + den_f), 1)
        n_int = [int(x * scale) for x in num_f]
        d_int = [int(x * scale) for x in den_f]
        content = reduce(math.gcd, n_int + d_int, 0)
        n_int = [x // content for x in n_int]
        d_int = [x // content for x in d_int]
        if d_int[-1] < 0:
            n_int = [-x for x in n_int]
            d_int = [-x for x in d_int]
        self.num, self.den = tuple(n_int), tuple(d_int)

    # constructors -----------------------------------------------------
    @classmethod
    def const(cls, c):
        c = Fraction(c)
        return cls((c.numerator,), (c.denominator,))

    @classmethod
    def N(cls):
        return cls((0, 1))

    @classmethod
    def monomial(cls, power, coef=1):
        """coef * N**power for any integer power."""
        coef = Fraction(coef)
        if power >= 0:
            return cls((0,) * power + (coef.numerator,), (coef.denominator,))
        return cls((coef.numerator,), (0,) * (-power) + (coef.denominator,))

    @classmethod
    def from_laurent(cls, terms):
        """Build from a mapping {power: coefficient} (powers may be negative)."""
        terms = {k: Fraction(v) for k, v in terms.items() if v}
        if not terms:
            return cls(())
        low = min(min(terms), 0)
        num = [Fraction(0)] * (max(max(terms), 0) - low + 1)
        for k, v in terms.items():
            num[k - low] = v
        return cls(num, (0,) * (-low) + (1,))

    @classmethod
    def coerce(cls, x):
        if isinstance(x, cls):
            return x
        if isinstance(x, (int, Fraction)):
            return cls.const(x)
        return NotImplemented

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self.coerce(other)
        if other is NotImplemented:
            return other
        if self.den == other.den:
            return RationalFunctionOfN(padd(self.num, other.num), self.den)
        return RationalFunctionOfN(
            padd(pmul(self.num, other.den), pmul(other.num, self.den)), pmul(self.den, other.den)
        )

    __radd__ = __add__

    def __neg__(self):
        return RationalFunctionOfN(pneg(self.num), self.den)

    def __sub__(self, other):
        other = self.coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self.coerce(other)
        if other is NotImplemented:
            return other
        return RationalFunctionOfN(pmul(self.num, other.num), pmul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self.coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunctionOfN(pmul(self.num, other.den), pmul(self.den, other.num))

    def __rtruediv__(self, other):
        return self.coerce(other) / self

    def __pow__(self, k):
        out = RationalFunctionOfN.const(1)
        base = self if k >= 0 else 1 / self
        for _ in range(abs(k)):
            out = out * base
        return out

    def __eq__(self, other):
        other = self.coerce(other)
        if other is NotImplemented:
            return False
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __bool__(self):
        return bool(self.num)

    # evaluation -------------------------------------------------------
    def __call__(self, n):
        """Evaluate at N = n; exact Fraction for int/Fraction inputs."""
        if isinstance(n, (int, Fraction)):
            d = peval(self.den, Fraction(n))
            if d == 0:
                raise ZeroDivisionError(f"pole at N={n}")
            return peval(self.num, Fraction(n)) / d
        return peval(self.num, n) / peval(self.den, n)

    def is_zero(self):
        return not self.num

    def leading_power(self):
        """deg(num) - deg(den): the large-N power of N (None for zero)."""
        if not self.num:
            return None
        return degree(self.num) - degree(self.den)

    def laurent_terms(self):
        """{power: coefficient} when the denominator is c*N^k, else None."""
        d = self.den
        k = len(d) - 1
        if any(d[:-1]):
            return None
        return {i - k: Fraction(c, d[-1]) for i, c in enumerate(self.num) if c}

    def to_json(self):
        return {"num": list(self.num), "den": list(self.den)}

    @classmethod
    def from_json(cls, obj):
        return cls(tuple(obj["num"]), tuple(obj["den"]))

    def __repr__(self):
        return f"RationalFunctionOfN({self})"

    def __str__(self):
        def fmt(p):
            terms = []
            for i, c in enumerate(p):
                if c == 0:
                    continue
                mon = "" if i == 0 else ("N" if i == 1 else f"N^{i}")
                if mon and abs(c) == 1:
                    terms.append(("-" if c < 0 else "+") + mon)
                else:
                    terms.append(f"{c:+d}" + ("*" + mon if mon else ""))
            s = "".join(reversed(terms)) or "0"
            return s[1:] if s.startswith("+") else s

        if self.den == (1,):
            return fmt(self.num)
        return f"({fmt(self.num)})/({fmt(self.den)})"
