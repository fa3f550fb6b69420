"""Truncated power series in the coupling lambda with exact coefficients."""
from __future__ import annotations

from fractions import Fraction

from .ratfunc import RationalFunctionOfN


def _zero_like(x):
    return x * 0


class LambdaSeries:
    """Coefficients a_0..a_n of sum a_m lambda^m, truncated at order n.

    Coefficients may be Fractions (fixed N) or RationalFunctionOfN values.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = list(coeffs)
        if not coeffs:
            raise ValueError("a series needs at least the order-0 coefficient")
        self.coeffs = coeffs

    @property
    def order(self):
        return len(self.coeffs) - 1

    def __getitem__(self, m):
        return self.coeffs[m]

    def __len__(self):
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __repr__(self):
        return f"LambdaSeries({[str(c) for c in self.coeffs]})"

    def truncate(self, n):
        return LambdaSeries(self.coeffs[: n + 1])

    def _align(self, other):
        if not isinstance(other, LambdaSeries):
            other = LambdaSeries([other] + [_zero_like(other)] * self.order)
        n = min(self.order, other.order)
        return self.coeffs[: n + 1], other.coeffs[: n + 1]

    def __add__(self, other):
        a, b = self._align(other)
        return LambdaSeries([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return LambdaSeries([-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LambdaSeries):
            return LambdaSeries([x * other for x in self.coeffs])
        a, b = self._align(other)
        out = []
        for m in range(len(a)):
            acc = a[0] * b[m]
            for i in range(1, m + 1):
                acc = acc + a[i] * b[m - i]
            out.append(acc)
        return LambdaSeries(out)

    __rmul__ = __mul__

    def inverse(self):
        a = self.coeffs
        if a[0] == 0:
            raise ZeroDivisionError("series with zero constant term")
        inv0 = 1 / a[0]
        out = [inv0]
        for m in range(1, len(a)):
            acc = a[1] * out[m - 1]
            for i in range(2, m + 1):
                acc = acc + a[i] * out[m - i]
            out.append(-acc * inv0)
        return LambdaSeries(out)

    def __truediv__(self, other):
        if isinstance(other, LambdaSeries):
            return self * other.inverse()
        return LambdaSeries([x / other for x in self.coeffs])

    def log(self):
        """log of a series with constant term 1 (via  f' / f)."""
        a = self.coeffs
        if a[0] != 1:
            raise ValueError("log needs constant term 1")
        # b = log a:  m b_m = m a_m - sum_{i=1}^{m-1} i b_i a_{m-i}
        b = [_zero_like(a[0])]
        for m in range(1, len(a)):
            acc = a[m] * m
            for i in range(1, m):
                acc = acc - b[i] * a[m - i] * i
            b.append(acc / m if not isinstance(acc, RationalFunctionOfN) else acc * Fraction(1, m))
        return LambdaSeries(b)

    def at_n(self, n):
        """Substitute N = n in RationalFunctionOfN coefficients."""
        return LambdaSeries([c(n) if isinstance(c, RationalFunctionOfN) else c for c in self.coeffs])

    def evaluate(self, lam, n=None):
        """Partial sum at coupling lam (coefficients evaluated at N = n if symbolic)."""
        total = 0
        for m, c in enumerate(self.coeffs):
            if isinstance(c, RationalFunctionOfN):
                c = c(n)
            total += complex(c) * lam**m if isinstance(lam, complex) else float(c) * lam**m
        return total

    def __eq__(self, other):
        return isinstance(other, LambdaSeries) and self.coeffs == other.coeffs

    def to_json(self):
        rows = []
        for m, c in enumerate(self.coeffs):
            c = c if isinstance(c, RationalFunctionOfN) else RationalFunctionOfN.const(c)
            rows.append({"m": m, "rational_function_of_N": c.to_json()})
        return rows
