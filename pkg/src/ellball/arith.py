"""Midpoint-radius real and complex balls.

Midpoints are MPFR (real) or MPC (complex) numbers rounded to nearest at the
working precision of the ball.  Radii are 30-bit MPFR numbers that are always
rounded toward +inf, so every operation returns a ball containing the exact
image of its inputs.  A complex ball is a rectangle: each component carries
its own radius.
"""

from __future__ import annotations

import struct
import threading
from decimal import ROUND_CEILING, ROUND_HALF_EVEN, Context, Decimal
from fractions import Fraction
from numbers import Rational

import gmpy2
from gmpy2 import mpc, mpfr, mpz

from .errors import DomainError

MAG_BITS = 30
DEFAULT_PREC = 53

_EMAX = gmpy2.get_emax_max()
_EMIN = gmpy2.get_emin_min()


def _context(prec, rnd):
    return gmpy2.context(
        precision=prec, round=rnd, emax=_EMAX, emin=_EMIN,
        trap_underflow=False, trap_overflow=False, trap_inexact=False,
        trap_invalid=False, trap_erange=False, trap_divzero=False,
    )


# Radius arithmetic: upward for upper bounds, downward for lower bounds.
_UP = _context(MAG_BITS, gmpy2.RoundUp)
_DN = _context(MAG_BITS, gmpy2.RoundDown)

MAG_ZERO = mpfr(0)
MAG_INF = mpfr("inf")

_tls = threading.local()


def _ctx(prec):
    """Round-to-nearest context at ``prec`` bits (one per thread; flags are sticky)."""
    try:
        return _tls.cache[prec]
    except AttributeError:
        _tls.cache = {}
    except KeyError:
        pass
    ctx = _tls.cache[prec] = _context(prec, gmpy2.RoundToNearest)
    return ctx


def _err(mid, prec):
    """Bound for the rounding error of a round-to-nearest result ``mid``."""
    return _UP.mul_2exp(_UP.abs(mid), -prec)


def _neg(x):
    # plain unary minus would round to the global context precision
    return _ctx(max(x.precision, 2)).minus(x)


def _absx(x):
    return _ctx(max(x.precision, 2)).abs(x)


def _shift(x, e):
    """Exact multiplication by 2**e."""
    return _ctx(max(x.precision, 2)).mul_2exp(x, e)


def _fix(rad):
    # 0*inf in radius formulas yields nan; treat as unbounded.
    return MAG_INF if rad != rad else rad


def mag_add(*xs):
    s = MAG_ZERO
    for x in xs:
        s = _UP.add(s, x)
    return s


def mag_mul(a, b):
    if not a or not b:
        return MAG_ZERO
    return _UP.mul(a, b)


def _exact(x):
    """Convert an exact scalar to an mpfr without rounding."""
    if isinstance(x, mpfr):
        return x
    if isinstance(x, (int, type(mpz(0)))):
        return mpfr(x, max(int(x).bit_length(), 2))
    if isinstance(x, float):
        return mpfr(x, 53)
    raise TypeError(f"cannot convert {type(x).__name__} exactly")


def _rational_mid(x: Fraction, prec):
    """Round a rational to ``prec`` bits; returns (mid, err)."""
    ctx = _ctx(prec)
    mid = ctx.div(mpz(x.numerator), mpz(x.denominator))
    if ctx.inexact:
        ctx.inexact = False
        return mid, _err(mid, prec)
    return mid, MAG_ZERO


def _parse_scalar(x):
    """Return an exact Fraction or mpfr for a Python scalar."""
    if isinstance(x, (mpfr, int, float, type(mpz(0)))):
        return _exact(x)
    if isinstance(x, Rational):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, Decimal):
        return Fraction(x)
    raise TypeError(f"unsupported scalar {x!r}")


def _rb(mid, rad, prec):
    b = object.__new__(RealBall)
    b.mid = mid
    b.rad = rad
    b.prec = prec
    return b


def _cb(mid, rad_re, rad_im, prec):
    b = object.__new__(ComplexBall)
    b.mid = mid
    b.rad_re = rad_re
    b.rad_im = rad_im
    b.prec = prec
    return b


def _mpc(re, im):
    return mpc(re, im, precision=(max(re.precision, 2), max(im.precision, 2)))


_INT = (int, type(mpz(0)))


class RealBall:
    """A real interval ``[mid - rad, mid + rad]``.

    ``prec`` is the working precision (bits) used to round results of
    arithmetic involving this ball; binary operations use the larger of the
    two operand precisions.
    """

    __slots__ = ("mid", "rad", "prec")

    def __init__(self, mid=0, rad=0, prec=DEFAULT_PREC):
        if prec < 2:
            raise ValueError("precision must be at least 2 bits")
        v = _parse_scalar(mid)
        if isinstance(v, Fraction):
            m, e = _rational_mid(v, prec)
        else:
            m, e = v, MAG_ZERO
        self.mid = m
        self.rad = _UP.add(e, _UP.abs(_exact(rad) if not isinstance(rad, Fraction) else mpfr(rad)))
        self.prec = prec

    @classmethod
    def whole(cls, prec=DEFAULT_PREC):
        return _rb(mpfr(0), MAG_INF, prec)

    @classmethod
    def coerce(cls, x, prec):
        if isinstance(x, RealBall):
            return x if x.prec == prec else _rb(x.mid, x.rad, prec)
        return cls(x, 0, prec)

    def with_prec(self, prec):
        return _rb(self.mid, self.rad, prec)

    def round(self, prec=None):
        """Round the midpoint to ``prec`` bits, folding the error into the radius."""
        prec = self.prec if prec is None else prec
        if self.mid.precision <= prec:
            return _rb(self.mid, self.rad, prec)
        ctx = _ctx(prec)
        mid = ctx.plus(self.mid)
        rad = self.rad
        if ctx.inexact:
            ctx.inexact = False
            rad = _UP.add(rad, _err(mid, prec))
        return _rb(mid, rad, prec)

    # -- predicates and bounds ------------------------------------------------

    def is_exact(self):
        return not self.rad

    def is_finite(self):
        return gmpy2.is_finite(self.rad) and gmpy2.is_finite(self.mid)

    def upper(self):
        return _UP.add(self.mid, self.rad)

    def lower(self):
        return _DN.sub(self.mid, self.rad)

    def mag(self):
        """Upper bound for ``|x|`` over the ball."""
        return _UP.add(_UP.abs(self.mid), self.rad)

    def mig(self):
        """Lower bound for ``|x|`` over the ball (0 if it contains 0)."""
        v = _DN.sub(_DN.abs(self.mid), self.rad)
        return v if v > 0 else MAG_ZERO

    def contains_zero(self):
        return -self.rad <= self.mid <= self.rad

    def is_positive(self):
        return self.mid > self.rad

    def is_negative(self):
        return self.mid < -self.rad

    def contains(self, x):
        """Exact containment test for a scalar or a ball."""
        if isinstance(x, RealBall):
            if gmpy2.is_infinite(self.rad):
                return True
            d = abs(_to_fraction(self.mid) - _to_fraction(x.mid))
            if gmpy2.is_infinite(x.rad):
                return False
            return d + _to_fraction(x.rad) <= _to_fraction(self.rad)
        if isinstance(x, ComplexBall):
            return not x.im.mag() and self.contains(x.re)
        v = _parse_scalar(x)
        if isinstance(v, mpfr):
            v = _to_fraction(v)
        return _contains_frac(self, v)

    def overlaps(self, other):
        if isinstance(other, ComplexBall):
            return ComplexBall.from_real(self).overlaps(other)
        other = RealBall.coerce(other, self.prec)
        if gmpy2.is_infinite(self.rad) or gmpy2.is_infinite(other.rad):
            return True
        d = abs(_to_fraction(self.mid) - _to_fraction(other.mid))
        return d <= _to_fraction(self.rad) + _to_fraction(other.rad)

    # -- arithmetic -----------------------------------------------------------

    def __neg__(self):
        return _rb(_neg(self.mid), self.rad, self.prec)

    def __pos__(self):
        return self

    def __abs__(self):
        if self.contains_zero():
            m = self.mag()
            return _rb(_UP.mul_2exp(m, -1), _UP.mul_2exp(m, -1), self.prec)
        return _rb(_absx(self.mid), self.rad, self.prec)

    def __add__(self, other):
        if isinstance(other, RealBall):
            prec = self.prec if self.prec >= other.prec else other.prec
            ctx = _ctx(prec)
            mid = ctx.add(self.mid, other.mid)
            rad = _UP.add(self.rad, other.rad)
        elif isinstance(other, _INT):
            prec = self.prec
            ctx = _ctx(prec)
            mid = ctx.add(self.mid, other)
            rad = self.rad
        elif isinstance(other, ComplexBall):
            return NotImplemented
        else:
            return self + RealBall.coerce(other, self.prec)
        if ctx.inexact:
            ctx.inexact = False
            rad = _UP.add(rad, _err(mid, prec))
        return _rb(mid, rad, prec)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, RealBall):
            prec = self.prec if self.prec >= other.prec else other.prec
            ctx = _ctx(prec)
            mid = ctx.sub(self.mid, other.mid)
            rad = _UP.add(self.rad, other.rad)
        elif isinstance(other, _INT):
            prec = self.prec
            ctx = _ctx(prec)
            mid = ctx.sub(self.mid, other)
            rad = self.rad
        elif isinstance(other, ComplexBall):
            return NotImplemented
        else:
            return self - RealBall.coerce(other, self.prec)
        if ctx.inexact:
            ctx.inexact = False
            rad = _UP.add(rad, _err(mid, prec))
        return _rb(mid, rad, prec)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RealBall):
            prec = self.prec if self.prec >= other.prec else other.prec
            ctx = _ctx(prec)
            mid = ctx.mul(self.mid, other.mid)
            ar, br = self.rad, other.rad
            if ar or br:
                rad = _fix(mag_add(mag_mul(_UP.abs(self.mid), br),
                                   mag_mul(_UP.abs(other.mid), ar), mag_mul(ar, br)))
            else:
                rad = MAG_ZERO
        elif isinstance(other, _INT):
            prec = self.prec
            ctx = _ctx(prec)
            mid = ctx.mul(self.mid, other)
            rad = mag_mul(self.rad, abs(other))
        elif isinstance(other, ComplexBall):
            return NotImplemented
        else:
            return self * RealBall.coerce(other, self.prec)
        if ctx.inexact:
            ctx.inexact = False
            rad = _UP.add(rad, _err(mid, prec))
        return _rb(mid, rad, prec)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, RealBall):
            prec = self.prec if self.prec >= other.prec else other.prec
            if other.contains_zero():
                raise DomainError("division by a ball containing zero")
            ctx = _ctx(prec)
            mid = ctx.div(self.mid, other.mid)
            br = other.rad
            if self.rad or br:
                bm_lo = _DN.abs(other.mid)
                num = mag_add(mag_mul(self.rad, _UP.abs(other.mid)), mag_mul(_UP.abs(self.mid), br))
                den = _DN.mul(bm_lo, _DN.sub(bm_lo, br))
                rad = _fix(_UP.div(num, den)) if den > 0 else MAG_INF
            else:
                rad = MAG_ZERO
        elif isinstance(other, _INT):
            if other == 0:
                raise DomainError("division by zero")
            prec = self.prec
            ctx = _ctx(prec)
            mid = ctx.div(self.mid, other)
            rad = _UP.div(self.rad, abs(other)) if self.rad else MAG_ZERO
        elif isinstance(other, ComplexBall):
            return NotImplemented
        else:
            return self / RealBall.coerce(other, self.prec)
        if ctx.inexact:
            ctx.inexact = False
            rad = _UP.add(rad, _err(mid, prec))
        return _rb(mid, rad, prec)

    def __rtruediv__(self, other):
        return RealBall.coerce(other, self.prec) / self

    def __pow__(self, n):
        if not isinstance(n, _INT):
            return NotImplemented
        if n < 0:
            return 1 / (self ** (-n))
        result = _rb(mpfr(1), MAG_ZERO, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def mul_2exp(self, e):
        return _rb(_shift(self.mid, e), _UP.mul_2exp(self.rad, e), self.prec)

    def add_error(self, err):
        return _rb(self.mid, _UP.add(self.rad, err), self.prec)

    def __repr__(self):
        return f"RealBall({format_real(self)}, prec={self.prec})"

    def __str__(self):
        return format_real(self)

    def __float__(self):
        return float(self.mid)

    # -- serialization --------------------------------------------------------

    def to_bytes(self) -> bytes:
        return b"R" + struct.pack(">I", self.prec) + _pack_mpfr(self.mid) + _pack_mpfr(self.rad)

    def to_dict(self) -> dict:
        return {"prec": self.prec, "mid": _mpfr_to_pair(self.mid), "rad": _mpfr_to_pair(self.rad)}

    @classmethod
    def from_dict(cls, d):
        return _rb(_pair_to_mpfr(d["mid"]), _pair_to_mpfr(d["rad"]), d["prec"])


def _contains_frac(b: RealBall, v: Fraction):
    if gmpy2.is_infinite(b.rad):
        return True
    return abs(_to_fraction(b.mid) - v) <= _to_fraction(b.rad)


class ComplexBall:
    """A complex rectangle ``re ± rad_re`` + ``(im ± rad_im) i``."""

    __slots__ = ("mid", "rad_re", "rad_im", "prec")

    def __init__(self, re=0, im=0, prec=DEFAULT_PREC):
        if isinstance(re, complex):
            re, im = re.real, re.imag + (im if im else 0)
        r = RealBall.coerce(re, prec)
        i = RealBall.coerce(im, prec)
        self.mid = _mpc(r.mid, i.mid)
        self.rad_re = r.rad
        self.rad_im = i.rad
        self.prec = prec

    @classmethod
    def from_parts(cls, re: RealBall, im: RealBall, prec=None):
        prec = prec or max(re.prec, im.prec)
        return _cb(_mpc(re.mid, im.mid), re.rad, im.rad, prec)

    @classmethod
    def from_real(cls, x: RealBall):
        return _cb(_mpc(x.mid, mpfr(0)), x.rad, MAG_ZERO, x.prec)

    @classmethod
    def coerce(cls, x, prec):
        if isinstance(x, ComplexBall):
            return x if x.prec == prec else _cb(x.mid, x.rad_re, x.rad_im, prec)
        if isinstance(x, RealBall):
            return _cb(_mpc(x.mid, mpfr(0)), x.rad, MAG_ZERO, prec)
        if isinstance(x, mpc):
            return _cb(x, MAG_ZERO, MAG_ZERO, prec)
        return cls(x, 0, prec)

    @classmethod
    def whole(cls, prec=DEFAULT_PREC):
        return _cb(mpc(0), MAG_INF, MAG_INF, prec)

    def with_prec(self, prec):
        return _cb(self.mid, self.rad_re, self.rad_im, prec)

    def round(self, prec=None):
        prec = self.prec if prec is None else prec
        re = self.re.round(prec)
        im = self.im.round(prec)
        return _cb(_mpc(re.mid, im.mid), re.rad, im.rad, prec)

    @property
    def re(self) -> RealBall:
        return _rb(self.mid.real, self.rad_re, self.prec)

    @property
    def im(self) -> RealBall:
        return _rb(self.mid.imag, self.rad_im, self.prec)

    # -- predicates and bounds ------------------------------------------------

    def is_real(self):
        """True if the imaginary part is exactly zero."""
        return not self.rad_im and not self.mid.imag

    def is_exact(self):
        return not self.rad_re and not self.rad_im

    def is_finite(self):
        return gmpy2.is_finite(self.rad_re) and gmpy2.is_finite(self.rad_im)

    def rad_disc(self):
        """Radius of a disc around the midpoint enclosing the rectangle."""
        if not self.rad_im:
            return self.rad_re
        if not self.rad_re:
            return self.rad_im
        return _UP.hypot(self.rad_re, self.rad_im)

    def mag(self):
        """Upper bound for ``|z|``."""
        return _UP.hypot(_UP.add(_UP.abs(self.mid.real), self.rad_re),
                         _UP.add(_UP.abs(self.mid.imag), self.rad_im))

    def mig(self):
        """Lower bound for ``|z|``."""
        a = _DN.sub(_DN.abs(self.mid.real), self.rad_re)
        b = _DN.sub(_DN.abs(self.mid.imag), self.rad_im)
        a = a if a > 0 else MAG_ZERO
        b = b if b > 0 else MAG_ZERO
        return _DN.hypot(a, b)

    def mid_abs(self):
        return abs(self.mid)

    def contains_zero(self):
        re, im = self.mid.real, self.mid.imag
        return -self.rad_re <= re <= self.rad_re and -self.rad_im <= im <= self.rad_im

    def contains(self, x):
        if isinstance(x, ComplexBall):
            return self.re.contains(x.re) and self.im.contains(x.im)
        if isinstance(x, RealBall):
            return self.re.contains(x) and self.im.contains(0)
        if isinstance(x, (complex, mpc)):
            return self.re.contains(_exact(float(x.real)) if isinstance(x, complex) else x.real) and \
                self.im.contains(_exact(float(x.imag)) if isinstance(x, complex) else x.imag)
        return self.re.contains(x) and self.im.contains(0)

    def overlaps(self, other):
        other = ComplexBall.coerce(other, self.prec)
        return self.re.overlaps(other.re) and self.im.overlaps(other.im)

    # -- arithmetic -----------------------------------------------------------

    def __neg__(self):
        return _cb(_mpc(_neg(self.mid.real), _neg(self.mid.imag)), self.rad_re, self.rad_im, self.prec)

    def __pos__(self):
        return self

    def conj(self):
        return _cb(_mpc(self.mid.real, _neg(self.mid.imag)), self.rad_re, self.rad_im, self.prec)

    def mul_i(self):
        """Exact multiplication by i."""
        return _cb(_mpc(_neg(self.mid.imag), self.mid.real), self.rad_im, self.rad_re, self.prec)

    def div_i(self):
        """Exact multiplication by -i."""
        return _cb(_mpc(self.mid.imag, _neg(self.mid.real)), self.rad_im, self.rad_re, self.prec)

    def mul_2exp(self, e):
        return _cb(_mpc(_shift(self.mid.real, e), _shift(self.mid.imag, e)),
                   _UP.mul_2exp(self.rad_re, e), _UP.mul_2exp(self.rad_im, e), self.prec)

    def add_error(self, err_re, err_im=None):
        err_im = err_re if err_im is None else err_im
        return _cb(self.mid, _UP.add(self.rad_re, err_re), _UP.add(self.rad_im, err_im), self.prec)

    def _finish(self, ctx, mid, rr, ri, prec):
        if ctx.inexact:
            ctx.inexact = False
            rr = _UP.add(rr, _err(mid.real, prec))
            ri = _UP.add(ri, _err(mid.imag, prec))
        return _cb(mid, rr, ri, prec)

    def __add__(self, other):
        if isinstance(other, ComplexBall):
            prec = self.prec if self.prec >= other.prec else other.prec
            ctx = _ctx(prec)
            return self._finish(ctx, ctx.add(self.mid, other.mid),
                                _UP.add(self.rad_re, other.rad_re), _UP.add(self.rad_im, other.rad_im), prec)
        if isinstance(other, RealBall):
            prec = self.prec if self.prec >= other.prec else other.prec
            ctx = _ctx(prec)
            return self._finish(ctx, ctx.add(self.mid, other.mid),
                                _UP.add(self.rad_re, other.rad), self.rad_im, prec)
        if isinstance(other, _INT):
            ctx = _ctx(self.prec)
            return self._finish(ctx, ctx.add(self.mid, other), self.rad_re, self.rad_im, self.prec)
        return self + ComplexBall.coerce(other, self.prec)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, ComplexBall):
            prec = self.prec if self.prec >= other.prec else other.prec
            ctx = _ctx(prec)
            return self._finish(ctx, ctx.sub(self.mid, other.mid),
                                _UP.add(self.rad_re, other.rad_re), _UP.add(self.rad_im, other.rad_im), prec)
        if isinstance(other, RealBall):
            prec = self.prec if self.prec >= other.prec else other.prec
            ctx = _ctx(prec)
            return self._finish(ctx, ctx.sub(self.mid, other.mid),
                                _UP.add(self.rad_re, other.rad), self.rad_im, prec)
        if isinstance(other, _INT):
            ctx = _ctx(self.prec)
            return self._finish(ctx, ctx.sub(self.mid, other), self.rad_re, self.rad_im, self.prec)
        return self - ComplexBall.coerce(other, self.prec)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ComplexBall):
            prec = self.prec if self.prec >= other.prec else other.prec
            ctx = _ctx(prec)
            mid = ctx.mul(self.mid, other.mid)
            arr, air, brr, bir = self.rad_re, self.rad_im, other.rad_re, other.rad_im
            if arr or air or brr or bir:
                ar = _UP.abs(self.mid.real)
                ai = _UP.abs(self.mid.imag)
                br = _UP.abs(other.mid.real)
                bi = _UP.abs(other.mid.imag)
                rr = _fix(mag_add(mag_mul(ar, brr), mag_mul(br, arr), mag_mul(arr, brr),
                                  mag_mul(ai, bir), mag_mul(bi, air), mag_mul(air, bir)))
                ri = _fix(mag_add(mag_mul(ar, bir), mag_mul(bi, arr), mag_mul(arr, bir),
                                  mag_mul(ai, brr), mag_mul(br, air), mag_mul(air, brr)))
            else:
                rr = ri = MAG_ZERO
            return self._finish(ctx, mid, rr, ri, prec)
        if isinstance(other, RealBall):
            prec = self.prec if self.prec >= other.prec else other.prec
            ctx = _ctx(prec)
            mid = ctx.mul(self.mid, other.mid)
            br = other.rad
            bm = _UP.abs(other.mid)
            rr = _fix(mag_add(mag_mul(_UP.abs(self.mid.real), br), mag_mul(bm, self.rad_re),
                              mag_mul(self.rad_re, br)))
            ri = _fix(mag_add(mag_mul(_UP.abs(self.mid.imag), br), mag_mul(bm, self.rad_im),
                              mag_mul(self.rad_im, br)))
            return self._finish(ctx, mid, rr, ri, prec)
        if isinstance(other, _INT):
            ctx = _ctx(self.prec)
            n = abs(other)
            return self._finish(ctx, ctx.mul(self.mid, other), mag_mul(self.rad_re, n),
                                mag_mul(self.rad_im, n), self.prec)
        return self * ComplexBall.coerce(other, self.prec)

    __rmul__ = __mul__

    def sqr(self):
        return self * self

    def __truediv__(self, other):
        if isinstance(other, _INT):
            if other == 0:
                raise DomainError("division by zero")
            ctx = _ctx(self.prec)
            n = abs(other)
            rr = _UP.div(self.rad_re, n) if self.rad_re else MAG_ZERO
            ri = _UP.div(self.rad_im, n) if self.rad_im else MAG_ZERO
            return self._finish(ctx, ctx.div(self.mid, other), rr, ri, self.prec)
        if isinstance(other, RealBall):
            r = self.re / other
            i = self.im / other
            return _cb(_mpc(r.mid, i.mid), r.rad, i.rad, max(r.prec, i.prec))
        if isinstance(other, ComplexBall):
            if other.is_real():
                return self / other.re
            prec = self.prec if self.prec >= other.prec else other.prec
            if other.contains_zero():
                raise DomainError("division by a ball containing zero")
            ctx = _ctx(prec)
            mid = ctx.div(self.mid, other.mid)
            ra = self.rad_disc()
            rb = other.rad_disc()
            if ra or rb:
                bm = _DN.abs(other.mid)
                num = mag_add(mag_mul(ra, _UP.abs(other.mid)), mag_mul(_UP.abs(self.mid), rb))
                den = _DN.mul(bm, _DN.sub(bm, rb))
                r = _fix(_UP.div(num, den)) if den > 0 else MAG_INF
            else:
                r = MAG_ZERO
            return self._finish(ctx, mid, r, r, prec)
        return self / ComplexBall.coerce(other, self.prec)

    def __rtruediv__(self, other):
        return ComplexBall.coerce(other, self.prec) / self

    def __pow__(self, n):
        if not isinstance(n, _INT):
            return NotImplemented
        if n < 0:
            return 1 / (self ** (-n))
        result = _cb(mpc(1), MAG_ZERO, MAG_ZERO, self.prec)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __repr__(self):
        return f"ComplexBall({format_complex(self)}, prec={self.prec})"

    def __str__(self):
        return format_complex(self)

    def __complex__(self):
        return complex(self.mid)

    def to_bytes(self) -> bytes:
        return (b"C" + struct.pack(">I", self.prec) + _pack_mpfr(self.mid.real) + _pack_mpfr(self.rad_re)
                + _pack_mpfr(self.mid.imag) + _pack_mpfr(self.rad_im))

    def to_dict(self) -> dict:
        return {"prec": self.prec, "re": self.re.to_dict(), "im": self.im.to_dict()}

    @classmethod
    def from_dict(cls, d):
        return cls.from_parts(RealBall.from_dict(d["re"]), RealBall.from_dict(d["im"]), d["prec"])


Ball = (RealBall, ComplexBall)


def acb(re=0, im=0, prec=DEFAULT_PREC) -> ComplexBall:
    """Shorthand constructor for a complex ball."""
    return ComplexBall(re, im, prec)


def arb(x=0, rad=0, prec=DEFAULT_PREC) -> RealBall:
    return RealBall(x, rad, prec)


def one(prec) -> ComplexBall:
    return _cb(mpc(1), MAG_ZERO, MAG_ZERO, prec)


def zero(prec) -> ComplexBall:
    return _cb(mpc(0), MAG_ZERO, MAG_ZERO, prec)


# -- binary serialization -----------------------------------------------------

_SPECIAL = {"zero": 0, "finite": 1, "inf": 2, "nan": 3}


def _pack_mpfr(x) -> bytes:
    """sign, kind, exponent (int64), mantissa length, mantissa bytes."""
    if gmpy2.is_zero(x):
        return struct.pack(">BBqI", 0, _SPECIAL["zero"], 0, 0)
    if gmpy2.is_nan(x):
        return struct.pack(">BBqI", 0, _SPECIAL["nan"], 0, 0)
    sign = 1 if x < 0 else 0
    if gmpy2.is_infinite(x):
        return struct.pack(">BBqI", sign, _SPECIAL["inf"], 0, 0)
    man, exp = x.as_mantissa_exp()
    man = abs(int(man))
    raw = man.to_bytes((man.bit_length() + 7) // 8, "big")
    return struct.pack(">BBqI", sign, _SPECIAL["finite"], int(exp), len(raw)) + raw


def _unpack_mpfr(buf, pos):
    sign, kind, exp, n = struct.unpack_from(">BBqI", buf, pos)
    pos += struct.calcsize(">BBqI")
    if kind == _SPECIAL["zero"]:
        return mpfr(0), pos
    if kind == _SPECIAL["nan"]:
        return mpfr("nan"), pos
    if kind == _SPECIAL["inf"]:
        return (mpfr("-inf") if sign else MAG_INF), pos
    man = int.from_bytes(buf[pos:pos + n], "big")
    pos += n
    x = _shift(mpfr(-man if sign else man, max(man.bit_length(), 2)), exp)
    return x, pos


def ball_from_bytes(buf: bytes):
    """Inverse of ``RealBall.to_bytes`` / ``ComplexBall.to_bytes``."""
    kind = buf[:1]
    (prec,) = struct.unpack_from(">I", buf, 1)
    pos = 5
    if kind == b"R":
        mid, pos = _unpack_mpfr(buf, pos)
        rad, pos = _unpack_mpfr(buf, pos)
        return _rb(mid, rad, prec)
    if kind == b"C":
        re, pos = _unpack_mpfr(buf, pos)
        rr, pos = _unpack_mpfr(buf, pos)
        im, pos = _unpack_mpfr(buf, pos)
        ri, pos = _unpack_mpfr(buf, pos)
        return _cb(_mpc(re, im), rr, ri, prec)
    raise ValueError("not a serialized ball")


def _mpfr_to_pair(x):
    if gmpy2.is_infinite(x):
        return ["inf" if x > 0 else "-inf", 0]
    if gmpy2.is_zero(x):
        return [0, 0]
    man, exp = x.as_mantissa_exp()
    return [int(man), int(exp)]


def _pair_to_mpfr(pair):
    man, exp = pair
    if isinstance(man, str):
        return mpfr(man)
    return _shift(mpfr(man, max(abs(int(man)).bit_length(), 2)), exp)


# -- decimal rendering --------------------------------------------------------

def _to_fraction(x) -> Fraction:
    n, d = x.as_integer_ratio()
    return Fraction(int(n), int(d))


def _fmt_rad(r: Fraction) -> str:
    """Three significant digits, rounded up."""
    if r == 0:
        return "0"
    d = Context(prec=3, rounding=ROUND_CEILING).divide(Decimal(r.numerator), Decimal(r.denominator))
    return f"{d:.2e}"


def _default_digits(prec):
    return max(1, int(prec * 0.30103))


def format_real(x: RealBall, digits=None) -> str:
    """Render ``[m ± r]``, printing only digits that the radius supports.

    The rounding of the printed midpoint is folded into the printed radius,
    so the printed interval always contains the ball.
    """
    if gmpy2.is_infinite(x.rad) or gmpy2.is_nan(x.mid):
        return "[± inf]"
    digits = _default_digits(x.prec) if digits is None else digits
    mid = _to_fraction(x.mid)
    rad = _to_fraction(x.rad)
    if mid == 0:
        return "[0 ± " + _fmt_rad(rad) + "]" if rad else "0"
    if rad >= abs(mid):
        return "[± " + _fmt_rad(abs(mid) + rad) + "]"
    if rad:
        ratio = abs(mid) / rad
        acc = ratio.numerator.bit_length() - ratio.denominator.bit_length() - 1
        acc = int(acc * 0.30103)
        digits = max(1, min(digits, acc))
    printed = _round_sig(mid, digits)
    total = rad + abs(Fraction(printed) - mid)
    if total == 0:
        # exact: pad to the requested number of significant digits
        places = digits - 1 - printed.adjusted()
        if 0 < places and abs(printed.adjusted()) <= 20:
            return format(printed, f".{places}f")
        return _plain(printed)
    text = _plain(printed)
    return f"[{text} ± {_fmt_rad(total)}]"


def _round_sig(v: Fraction, digits: int) -> Decimal:
    ctx = Context(prec=max(digits, 1), rounding=ROUND_HALF_EVEN, Emax=10**9, Emin=-10**9)
    return ctx.divide(Decimal(v.numerator), Decimal(v.denominator))


def _plain(d: Decimal) -> str:
    s = f"{d:e}" if abs(d.adjusted()) > 20 else format(d, "f")
    return s


def format_complex(z: ComplexBall, digits=None) -> str:
    re = format_real(z.re, digits)
    if z.is_real():
        return re
    im = format_real(z.im, digits)
    return f"{re} + {im}*I"
