"""Elementary functions of balls and the shared series helpers.

The exponential uses the reduction e^x = 2^n e^t, e^t = (e^u)^(2^r) with
u = t/2^r and a rectangular-splitting Taylor evaluation.  The other
functions evaluate MPFR/MPC at the midpoint (correctly rounded, so the
rounding error is at most one ulp per component) and add a derivative bound
for the input radius.
"""

from __future__ import annotations

import bisect
import math
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpc, mpfr, mpz

from .arith import (
    MAG_INF, MAG_ZERO, ComplexBall, RealBall, _UP, _DN, _cb, _ctx, _err, _mpc, _rb, mag_mul,
)
from .errors import BranchCutError, DomainError

_H = gmpy2.context(precision=64)  # heuristic estimates only; flags never read


def _prec(x, prec):
    return x.prec if prec is None else prec


def _rb_from(mid, prec, ctx):
    """Wrap a freshly rounded MPFR result, adding its rounding error."""
    if ctx.inexact:
        ctx.inexact = False
        return _rb(mid, _err(mid, prec), prec)
    return _rb(mid, MAG_ZERO, prec)


# -- constants ------------------------------------------------------------------

@lru_cache(maxsize=128)
def pi(prec) -> RealBall:
    """pi as a real ball (error at most one ulp)."""
    ctx = _ctx(prec)
    return _rb_from(ctx.const_pi(), prec, ctx)


@lru_cache(maxsize=128)
def log2_const(prec) -> RealBall:
    ctx = _ctx(prec)
    return _rb_from(ctx.const_log2(), prec, ctx)


def pi_const(prec) -> ComplexBall:
    return ComplexBall.from_real(pi(prec))


# -- shared series utilities ------------------------------------------------------

def _to_mag(x):
    """Upper bound as a 30-bit magnitude for a nonnegative exact scalar."""
    if isinstance(x, Fraction):
        return _UP.div(mpz(x.numerator), mpz(x.denominator))
    if isinstance(x, RealBall):
        return x.mag()
    return _UP.plus(mpfr(x) if not isinstance(x, mpfr) else x)


def _to_mag_low(x):
    if isinstance(x, Fraction):
        return _DN.div(mpz(x.numerator), mpz(x.denominator))
    return _DN.plus(mpfr(x) if not isinstance(x, mpfr) else x)


def geometric_tail_bound(A, C, N):
    """Upper bound for the tail sum_{k >= N} A*C^k = A*C^N/(1-C).

    This also bounds sum_{k > N} A*C^k.  Returns +inf when C >= 1.
    """
    A = _to_mag(A)
    Cup = _to_mag(C)
    if Cup >= 1:
        return MAG_INF
    if not A or not Cup:
        return MAG_ZERO if (not A or N > 0) else A
    num = mag_mul(A, _UP.pow(Cup, N))
    return _UP.div(num, _DN.sub(1, Cup))


def exp_ratio(k):
    """Ratio c_k / c_{k-1} of the exponential series."""
    return 1, k


def rect_split_eval(ratio, x, N, c0=1, m=None, stats=None):
    """Evaluate sum_{k=0}^{N} c_k x^k with c_k = c_{k-1} * ratio(k).

    ``ratio(k)`` returns a pair of integers (num, den).  Powers x^2..x^m are
    computed once; the sum is then evaluated by Horner's rule in x^m, each
    block of m coefficients being cleared of denominators so that only one
    scalar division per block is needed.  With m ~ sqrt(N) this uses about
    2*sqrt(N) nonscalar multiplications, which are counted in ``stats``.
    """
    if stats is None:
        stats = {}
    stats.setdefault("nonscalar", 0)
    if m is None:
        m = max(1, math.ceil(math.sqrt(N + 1)))
    m = max(1, min(m, N))
    pw = [None, x]
    for _ in range(2, m + 1):
        pw.append(pw[-1] * x)
        stats["nonscalar"] += 1
    acc = None
    for j in range(N // m, -1, -1):
        lo = j * m
        last = min(lo + m - 1, N)
        # the block also absorbs the ratio c_{lo+m}/c_lo when a higher block exists
        top = last if acc is None else lo + m
        nums = [1]
        dens = [1]
        for l in range(lo + 1, top + 1):
            a, b = ratio(l)
            nums.append(a)
            dens.append(b)
        size = top - lo
        suffix = [1] * (size + 2)
        for i in range(size, 0, -1):
            suffix[i] = suffix[i + 1] * dens[i]
        D = suffix[1]
        s = type(x).coerce(suffix[1] if size >= 1 else 1, x.prec)
        pre = 1
        for i in range(1, last - lo + 1):
            pre *= nums[i]
            coef = pre * suffix[i + 1]
            if coef:
                s = s + pw[i] * coef
        if acc is not None:
            for i in range(last - lo + 1, size + 1):
                pre *= nums[i]
            t = pw[m] * acc
            stats["nonscalar"] += 1
            s = s + (t * pre if pre != 1 else t)
        acc = s / D if D != 1 else s
    if c0 != 1:
        acc = acc * c0
    return acc


def power_table(x, exponents, stats=None):
    """Powers x^e for the given exponents using a short addition sequence.

    Each power is the product of the largest stored power below it and the
    power for the difference, which is produced recursively when missing.
    Consecutive gaps of the exponent sequences used here grow slowly, so
    this costs one or two multiplications per exponent.
    """
    if stats is None:
        stats = {}
    stats.setdefault("nonscalar", 0)
    table = {1: x}
    keys = [1]

    def get(e):
        if e in table:
            return table[e]
        i = bisect.bisect_left(keys, e) - 1
        prev = keys[i]
        d = e - prev
        get(d) if d != prev else None
        v = table[prev] * table[prev] if d == prev else table[prev] * table[d]
        stats["nonscalar"] += 1
        table[e] = v
        bisect.insort(keys, e)
        return v

    for e in sorted(set(exponents)):
        if e >= 1:
            get(e)
    return table


# -- exponential --------------------------------------------------------------------

def _exp_reduction_r(prec):
    return min(64, max(1, round(prec ** 0.4)))


def _exp_point(m, prec, stats=None):
    """e^m for an exact mpfr m, as a ball at ``prec`` bits."""
    if not gmpy2.is_finite(m):
        raise DomainError("exp of a non-finite value")
    if abs(_H.plus(m)) > 2 ** 60:
        if m > 0:
            return RealBall.whole(prec)
        return _rb(mpfr(0), _UP.mul_2exp(mpfr(1), -(2 ** 61)), prec)
    r = _exp_reduction_r(prec)
    n = int(gmpy2.floor(_H.div(m, _H.const_log2())))
    nb = abs(n).bit_length()
    wp = prec + r + 10 + nb.bit_length()
    t = _rb(m, MAG_ZERO, wp + nb + 4) - log2_const(wp + nb + 4) * n
    u = t.round(wp).mul_2exp(-r)
    U = u.mag()
    N = 0
    term = mpfr(1)
    eps = _UP.mul_2exp(mpfr(1), -wp)
    while True:
        nxt = _UP.div(mag_mul(term, U), N + 1)
        if nxt < eps or not nxt:
            break
        N += 1
        term = nxt
    N = max(N, 1)
    s = rect_split_eval(exp_ratio, u, N, stats=stats)
    # remainder: sum_{k>N} U^k/k! <= U^{N+1}/(N+1)! / (1 - U/(N+2))
    tail = _UP.div(mag_mul(term, U), N + 1)
    if tail:
        tail = _UP.div(tail, _DN.sub(1, _UP.div(U, N + 2)))
    s = s.add_error(tail)
    for _ in range(r):
        s = s * s
    return s.mul_2exp(n).round(prec)


def _exp_real(x: RealBall, prec) -> RealBall:
    if not gmpy2.is_finite(x.rad):
        return RealBall.whole(prec)
    if gmpy2.is_zero(x.mid):
        core = _rb(mpfr(1), MAG_ZERO, prec)
    else:
        core = _exp_point(x.mid, prec)
    if x.rad:
        # e^y for |y - m| <= rho lies within e^m * (1 +- expm1(rho))
        core = core.add_error(_fix_nan(mag_mul(core.mag(), _UP.expm1(x.rad))))
    return core


def _fix_nan(v):
    return MAG_INF if v != v else v


def exp(x, prec=None):
    """Exponential of a real or complex ball."""
    if not isinstance(x, (RealBall, ComplexBall)):
        x = ComplexBall.coerce(x, prec or 53)
    prec = _prec(x, prec)
    if isinstance(x, RealBall):
        return _exp_real(x, prec)
    if x.is_real():
        return ComplexBall.from_real(_exp_real(x.re, prec))
    e = _exp_real(x.re, prec + 4)
    s, c = sin_cos(x.im, prec + 4)
    re = e * c
    im = e * s
    return ComplexBall.from_parts(re.round(prec), im.round(prec), prec)


def exp_pi_i(x, prec=None):
    """exp(pi*i*x)."""
    prec = _prec(x, prec)
    return exp(ComplexBall.coerce(x, prec + 8).mul_i() * pi(prec + 8), prec)


# -- trigonometric -------------------------------------------------------------------

def sin_cos(x, prec=None):
    """(sin x, cos x) for a real or complex ball."""
    prec = _prec(x, prec)
    if isinstance(x, ComplexBall):
        if x.is_real():
            s, c = sin_cos(x.re, prec)
            return ComplexBall.from_real(s), ComplexBall.from_real(c)
        s, c = sin_cos(x.re, prec + 4)
        sh, ch = sinh_cosh(x.im, prec + 4)
        sin_z = ComplexBall.from_parts((s * ch).round(prec), (c * sh).round(prec), prec)
        cos_z = ComplexBall.from_parts((c * ch).round(prec), (-(s * sh)).round(prec), prec)
        return sin_z, cos_z
    if not gmpy2.is_finite(x.rad) or x.rad > 2:
        return _rb(mpfr(0), mpfr(1), prec), _rb(mpfr(0), mpfr(1), prec)
    ctx = _ctx(prec)
    s, c = ctx.sin_cos(x.mid)
    if ctx.inexact:
        ctx.inexact = False
        es, ec = _err(s, prec), _err(c, prec)
    else:
        es = ec = MAG_ZERO
    return _rb(s, _UP.add(es, x.rad), prec), _rb(c, _UP.add(ec, x.rad), prec)


def sinh_cosh(x: RealBall, prec=None):
    prec = _prec(x, prec)
    if not gmpy2.is_finite(x.rad):
        return RealBall.whole(prec), RealBall.whole(prec)
    ctx = _ctx(prec)
    sh, ch = ctx.sinh_cosh(x.mid)
    if ctx.inexact:
        ctx.inexact = False
        es, ec = _err(sh, prec), _err(ch, prec)
    else:
        es = ec = MAG_ZERO
    if x.rad:
        # both derivatives are bounded by cosh(|x|)
        d = mag_mul(_UP.cosh(x.mag()), x.rad)
        es, ec = _UP.add(es, d), _UP.add(ec, d)
    return _rb(sh, es, prec), _rb(ch, ec, prec)


def _reduce_mod2(v: Fraction) -> Fraction:
    """Representative of v modulo 2 in (-1, 1]."""
    t = v - 2 * math.floor(v / 2)
    return t - 2 if t > 1 else t


def sin_cos_pi(x, prec=None):
    """(sin(pi x), cos(pi x)) for a real ball or an exact rational.

    The argument is reduced modulo 2 exactly before pi is applied, so large
    and rational arguments (roots of unity) lose no accuracy.
    """
    if isinstance(x, (int, Fraction)):
        prec = prec or 53
        t = _reduce_mod2(Fraction(x))
        # exact values at multiples of 1/2
        if t.denominator <= 2:
            table = {Fraction(0): (0, 1), Fraction(1, 2): (1, 0), Fraction(1): (0, -1), Fraction(-1, 2): (-1, 0)}
            s, c = table[t]
            return RealBall(s, 0, prec), RealBall(c, 0, prec)
        arg = pi(prec + 20) * RealBall(t, 0, prec + 20)
        s, c = sin_cos(arg, prec + 10)
        return s.round(prec), c.round(prec)
    if isinstance(x, ComplexBall):
        prec = _prec(x, prec)
        if x.is_real():
            s, c = sin_cos_pi(x.re, prec)
            return ComplexBall.from_real(s), ComplexBall.from_real(c)
        return sin_cos(x * pi(prec + 10), prec)
    prec = _prec(x, prec)
    from .arith import _to_fraction
    t = _reduce_mod2(_to_fraction(x.mid))
    s, c = sin_cos_pi(t, prec + 10)
    if x.rad:
        d = mag_mul(x.rad, pi(prec).upper())
        s, c = s.add_error(d), c.add_error(d)
    return s.round(prec), c.round(prec)


def root_of_unity(k, n, prec) -> ComplexBall:
    """exp(2*pi*i*k/n) as a complex ball."""
    k %= n
    if (8 * k) % n == 0:
        e = 8 * k // n
        if e % 2 == 0:
            re, im = [(1, 0), (0, 1), (-1, 0), (0, -1)][e // 2]
            return ComplexBall(re, im, prec)
        h = sqrt(RealBall(2, 0, prec + 4)) / 2
        sr = 1 if e in (1, 7) else -1
        si = 1 if e in (1, 3) else -1
        return ComplexBall.from_parts((h if sr > 0 else -h).round(prec), (h if si > 0 else -h).round(prec), prec)
    s, c = sin_cos_pi(Fraction(2 * k, n), prec)
    return ComplexBall.from_parts(c, s, prec)


def atan(x, prec=None):
    prec = _prec(x, prec)
    if isinstance(x, ComplexBall):
        if x.is_real():
            return ComplexBall.from_real(atan(x.re, prec))
        # atan z = (i/2) (log(1 - iz) - log(1 + iz))
        wp = prec + 10
        iz = x.with_prec(wp).mul_i()
        v = (log(1 - iz, wp) - log(1 + iz, wp)).mul_i().mul_2exp(-1)
        return v.round(prec)
    ctx = _ctx(prec)
    v = _rb_from(ctx.atan(x.mid), prec, ctx)
    if x.rad:
        v = v.add_error(x.rad)
    return v


def atanh(x, prec=None):
    prec = _prec(x, prec)
    if isinstance(x, RealBall):
        x = ComplexBall.from_real(x)
    if x.is_real() and x.re.mag() < 1:
        xr = x.re
        ctx = _ctx(prec)
        v = _rb_from(ctx.atanh(xr.mid), prec, ctx)
        if xr.rad:
            d = _DN.sub(1, _UP.square(xr.mag()))
            v = v.add_error(_UP.div(xr.rad, d))
        return ComplexBall.from_real(v)
    wp = prec + 10
    z = x.with_prec(wp)
    return ((log(1 + z, wp) - log(1 - z, wp)).mul_2exp(-1)).round(prec)


# -- branch-cut aware log and sqrt -----------------------------------------------------

def _touches_cut(x: ComplexBall):
    """True if the rectangle meets (-inf, 0]."""
    im = x.mid.imag
    if not (-x.rad_im <= im <= x.rad_im):
        return False
    return _DN.sub(x.mid.real, x.rad_re) <= 0


def _on_cut_exact(x: ComplexBall):
    """Exactly real and strictly negative."""
    return x.is_real() and _UP.add(x.mid.real, x.rad_re) < 0


def log(x, prec=None):
    """Principal logarithm, branch cut on (-inf, 0], continuous from above."""
    prec = _prec(x, prec)
    if isinstance(x, RealBall):
        if not x.is_positive():
            raise DomainError("real logarithm of a ball that is not positive")
        ctx = _ctx(prec)
        v = _rb_from(ctx.log(x.mid), prec, ctx)
        if x.rad:
            v = v.add_error(_UP.div(x.rad, x.lower()))
        return v
    x = ComplexBall.coerce(x, prec) if not isinstance(x, ComplexBall) else x
    if x.contains_zero():
        raise BranchCutError("logarithm of a ball containing 0")
    if x.is_real():
        if x.re.is_positive():
            return ComplexBall.from_real(log(x.re, prec))
        if _on_cut_exact(x):
            return ComplexBall.from_parts(log(-x.re, prec), pi(prec), prec)
    if _touches_cut(x):
        raise BranchCutError("logarithm of a ball straddling the branch cut")
    ctx = _ctx(prec)
    v = ctx.log(x.mid)
    if ctx.inexact:
        ctx.inexact = False
        er, ei = _err(v.real, prec), _err(v.imag, prec)
    else:
        er = ei = MAG_ZERO
    r = x.rad_disc()
    if r:
        d = _UP.div(r, x.mig())
        er, ei = _UP.add(er, d), _UP.add(ei, d)
    return _cb(v, er, ei, prec)


def _sqrt_real(x: RealBall, prec, strict=True):
    if x.is_exact() and gmpy2.is_zero(x.mid):
        return _rb(mpfr(0), MAG_ZERO, prec)
    lo = x.lower()
    ctx = _ctx(prec)
    if lo <= 0:
        if lo < 0 and strict and not gmpy2.is_zero(lo):
            raise DomainError("square root of a ball containing negative numbers")
        # sqrt([0, hi]) = [0, sqrt(hi)]
        h = _UP.sqrt(x.upper()) if x.upper() > 0 else MAG_ZERO
        half = _UP.mul_2exp(h, -1)
        return _rb(half, half, prec)
    v = _rb_from(ctx.sqrt(x.mid), prec, ctx)
    if x.rad:
        den = _DN.add(_DN.sqrt(lo), _DN.sqrt(_DN.plus(x.mid)))
        v = v.add_error(_UP.div(x.rad, den))
    return v


def sqrt(x, prec=None, strict=True):
    """Principal square root, cut on (-inf, 0) taken continuous from above.

    In strict mode a ball that straddles the cut, or contains 0 without
    being exactly 0, raises ``BranchCutError``.  With ``strict=False`` such
    balls get an enclosure of every value of the principal branch over the
    ball (real part in [0, S], imaginary part in [-S, S]).
    """
    prec = _prec(x, prec)
    if isinstance(x, RealBall):
        return _sqrt_real(x, prec, strict)
    x = ComplexBall.coerce(x, prec) if not isinstance(x, ComplexBall) else x
    if x.is_real():
        if _DN.sub(x.mid.real, x.rad_re) >= 0 or (not strict and _UP.add(x.mid.real, x.rad_re) >= 0
                                                   and x.mid.real > 0):
            return ComplexBall.from_real(_sqrt_real(x.re, prec, strict))
        if _on_cut_exact(x):
            v = _sqrt_real(-x.re, prec)
            return _cb(_mpc(mpfr(0), v.mid), MAG_ZERO, v.rad, prec)
    if x.is_exact() and gmpy2.is_zero(x.mid.real) and gmpy2.is_zero(x.mid.imag):
        return _cb(mpc(0), MAG_ZERO, MAG_ZERO, prec)
    if x.contains_zero() or _touches_cut(x):
        if strict:
            raise BranchCutError("square root of a ball containing or straddling the branch cut")
        S = _UP.sqrt(x.mag())
        half = _UP.mul_2exp(S, -1)
        return _cb(_mpc(half, mpfr(0)), half, S, prec)
    ctx = _ctx(prec)
    v = ctx.sqrt(x.mid)
    if ctx.inexact:
        ctx.inexact = False
        er, ei = _err(v.real, prec), _err(v.imag, prec)
    else:
        er = ei = MAG_ZERO
    r = x.rad_disc()
    if r:
        # |sqrt'| = 1/(2 sqrt|w|) over the rectangle
        d = _UP.div(r, _DN.mul_2exp(_DN.sqrt(x.mig()), 1))
        er, ei = _UP.add(er, d), _UP.add(ei, d)
    return _cb(v, er, ei, prec)


def rsqrt(x, prec=None, strict=True):
    prec = _prec(x, prec)
    return 1 / sqrt(x, prec + 4, strict).with_prec(prec)
