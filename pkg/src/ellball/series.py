"""Truncated power series with complex ball coefficients.

A ``BallSeries`` of length D stands for f(x) + O(x^D); coefficient r is the
r-th Taylor coefficient, so derivatives are ``r! * coeffs[r]``.
"""

from __future__ import annotations

from .arith import ComplexBall, one, zero
from .elementary import exp as ball_exp


def _c(v, prec):
    return v if isinstance(v, ComplexBall) else ComplexBall.coerce(v, prec)


class BallSeries:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        if not coeffs:
            raise ValueError("a series needs at least one coefficient")
        prec = max(getattr(c, "prec", 0) for c in coeffs) or 53
        self.coeffs = [_c(c, prec) for c in coeffs]

    @classmethod
    def constant(cls, c, D, prec):
        return cls([_c(c, prec)] + [zero(prec)] * (D - 1))

    @classmethod
    def variable(cls, c, D, prec):
        """The series c + x truncated to length D."""
        co = [_c(c, prec)]
        if D > 1:
            co.append(one(prec))
        co += [zero(prec)] * (D - 2)
        return cls(co)

    @property
    def D(self):
        return len(self.coeffs)

    @property
    def prec(self):
        return max(c.prec for c in self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, i):
        return self.coeffs[i]

    def __iter__(self):
        return iter(self.coeffs)

    def __repr__(self):
        return "BallSeries([" + ", ".join(str(c) for c in self.coeffs) + "])"

    def truncate(self, D):
        return BallSeries(self.coeffs[:D])

    def _other(self, other):
        if isinstance(other, BallSeries):
            return other
        return BallSeries.constant(other, self.D, self.prec)

    def __add__(self, other):
        if not isinstance(other, BallSeries):
            return BallSeries([self.coeffs[0] + other] + self.coeffs[1:])
        D = min(self.D, other.D)
        return BallSeries([self.coeffs[i] + other.coeffs[i] for i in range(D)])

    __radd__ = __add__

    def __neg__(self):
        return BallSeries([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, BallSeries):
            return BallSeries([c * other for c in self.coeffs])
        D = min(self.D, other.D)
        a, b = self.coeffs, other.coeffs
        out = []
        for k in range(D):
            s = a[0] * b[k]
            for j in range(1, k + 1):
                s = s + a[j] * b[k - j]
            out.append(s)
        return BallSeries(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, BallSeries):
            return BallSeries([c / other for c in self.coeffs])
        D = min(self.D, other.D)
        a, b = self.coeffs, other.coeffs
        b0inv = 1 / b[0]
        q = []
        for k in range(D):
            s = a[k]
            for j in range(1, k + 1):
                s = s - b[j] * q[k - j]
            q.append(s * b0inv if k else s / b[0])
        return BallSeries(q)

    def __rtruediv__(self, other):
        return self._other(other) / self

    def inv(self):
        return BallSeries.constant(1, self.D, self.prec) / self

    def sqr(self):
        return self * self

    def __pow__(self, n):
        if n < 0:
            return (self ** (-n)).inv()
        result = BallSeries.constant(1, self.D, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def exp(self):
        """exp of the series via f' = g' f."""
        g = self.coeffs
        f = [ball_exp(g[0])]
        for k in range(1, self.D):
            s = g[1] * f[k - 1]
            for j in range(2, k + 1):
                s = s + (g[j] * f[k - j]) * j
            f.append(s / k)
        return BallSeries(f)

    def derivative(self):
        """Series of f'(x), one coefficient shorter."""
        if self.D == 1:
            return BallSeries([zero(self.prec)])
        return BallSeries([self.coeffs[r] * r for r in range(1, self.D)])

    def scale(self, s):
        """The series of f(s*x): coefficient r times s^r."""
        out = [self.coeffs[0]]
        p = None
        for r in range(1, self.D):
            p = s if p is None else p * s
            out.append(self.coeffs[r] * p)
        return BallSeries(out)

    def mul_i(self):
        return BallSeries([c.mul_i() for c in self.coeffs])

    def derivatives(self):
        """Values f^(r)(0) = r! * coeffs[r]."""
        out = []
        f = 1
        for r, c in enumerate(self.coeffs):
            if r:
                f *= r
            out.append(c * f)
        return out

    def contains(self, other):
        return all(a.contains(b) for a, b in zip(self.coeffs, other.coeffs))

    def overlaps(self, other):
        return all(a.overlaps(b) for a, b in zip(self.coeffs, other.coeffs))

    def round(self, prec):
        return BallSeries([c.round(prec) for c in self.coeffs])
