"""Independent, non-rigorous reference evaluators used for cross-checking.

Nothing here carries a guaranteed error bound.  The quadrature rules and
direct sums are written against mpmath's mpf/mpc number types (not against
the ball code), so they give an independent route to the same values.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable

import mpmath
from mpmath import mp

from .arith import ComplexBall, RealBall
from .elementary import pi
from .errors import ConvergenceError

Integrand = Callable


class OracleError(ConvergenceError):
    """An oracle failed to reach its own heuristic accuracy target."""


def _str_digits(prec):
    return int(prec * 0.30103) + 5


def _ball_from_mp(v, err, prec):
    d = _str_digits(prec)
    v = mpmath.mpmathify(v)
    re = mpmath.nstr(mpmath.re(v), d, strip_zeros=False)
    im = mpmath.nstr(mpmath.im(v), d, strip_zeros=False)
    # the decimal strings above are accurate to about 2^-prec relative; pad the radius
    rad = Fraction(mpmath.nstr(abs(mpmath.mpf(err)) + mpmath.mpf(2) ** (-prec) * (1 + abs(v)), 5))
    rad = rad * Fraction(101, 100)
    return ComplexBall.from_parts(RealBall(re, rad, prec), RealBall(im, rad, prec), prec)


# -- trapezoidal rule ---------------------------------------------------------------

def trapezoid_periodic(f, N, prec=53):
    """(1/N) sum_{k<N} f(2 pi k/N) evaluated in ball arithmetic.

    ``f`` receives a RealBall and returns a RealBall or ComplexBall.  The
    radius reflects rounding only, not the quadrature error.
    """
    if N < 1:
        raise ValueError("N must be positive")
    wp = prec + 10
    step = pi(wp).mul_2exp(1) / N
    acc = None
    for k in range(N):
        v = f(step * k)
        if isinstance(v, RealBall):
            v = ComplexBall.from_real(v)
        elif not isinstance(v, ComplexBall):
            v = ComplexBall.coerce(v, wp)
        acc = v if acc is None else acc + v
    return (acc / N).round(prec)


# -- tanh-sinh ----------------------------------------------------------------------

def _ts_sum(g, h, eps):
    """h * sum over k of w_k g(x_k) on (-1, 1); g receives (x, 1 - |x|, sign)."""
    half_pi = mp.pi / 2
    total = g(mpmath.mpf(0), mpmath.mpf(1), 0) * half_pi
    k = 1
    while True:
        t = k * h
        s = half_pi * mpmath.sinh(t)
        ch = mpmath.cosh(s)
        w = half_pi * mpmath.cosh(t) / (ch * ch)
        comp = 2 / (mpmath.exp(2 * s) + 1)  # 1 - tanh(s), without cancellation
        x = 1 - comp
        term = w * (g(x, comp, 1) + g(-x, comp, -1))
        total += term
        # stop once weights and contributions are both negligible
        if w < eps and abs(term) < eps * max(1, abs(total)):
            break
        k += 1
        if k > 10 ** 6:
            break
    return total * h


def tanh_sinh(f, a, b, level=8, prec=53, tol=None):
    """Double-exponential quadrature of f over [a, b] (b may be +inf).

    Returns a ComplexBall whose radius is the difference between the
    estimates at step 2^-level and 2^-(level-1): a heuristic, not a bound.
    Raises OracleError if that difference exceeds ``tol``.
    """
    with mpmath.workprec(prec + 20):
        eps = mpmath.mpf(2) ** (-prec - 10)
        a = mpmath.mpf(a)
        if b == math.inf or b == mpmath.inf:
            # t = a + u/(1 - u), u in [0, 1)
            def g(x, comp, sgn):
                u = comp / 2 if sgn < 0 else (1 + x) / 2
                one_minus_u = comp / 2 if sgn > 0 else 1 - u
                if one_minus_u == 0:
                    return 0
                t = a + u / one_minus_u
                return f(t) / (one_minus_u * one_minus_u) / 2
        else:
            b = mpmath.mpf(b)
            c, r = (a + b) / 2, (b - a) / 2

            def g(x, comp, sgn):
                if sgn > 0:
                    t = b - r * comp
                elif sgn < 0:
                    t = a + r * comp
                else:
                    t = c
                return f(t) * r

        h = mpmath.mpf(2) ** (-level)
        I1 = _ts_sum(g, h, eps)
        I0 = _ts_sum(g, 2 * h, eps)
        err = abs(I1 - I0)
        if tol is not None and err > tol:
            raise OracleError(f"tanh-sinh did not converge (level difference {mpmath.nstr(err, 5)})")
        return _ball_from_mp(I1, err, prec)


# -- direct theta sums --------------------------------------------------------------

def _mpc_of(x):
    if isinstance(x, ComplexBall):
        return mpmath.mpc(_mpf(x.mid.real), _mpf(x.mid.imag))
    if isinstance(x, RealBall):
        return mpmath.mpc(_mpf(x.mid), 0)
    return mpmath.mpc(x)


def _mpf(v):
    m, e = v.as_integer_ratio()
    return mpmath.mpf(int(m)) / int(e)


def naive_theta(z, tau, terms, prec=53):
    """theta_1..theta_4(z, tau) by direct bilateral sums, with no argument reduction.

    ``terms`` counts series terms in the unified order used by the main
    algorithm: theta_3/theta_4 use |n| <= ceil(terms/2), theta_1/theta_2 use
    n in [-floor(terms/2) - 1, floor(terms/2)].
    """
    with mpmath.workprec(prec + 30):
        z = _mpc_of(z)
        tau = _mpc_of(tau)
        ipi = 1j * mp.pi
        N34 = (terms + 1) // 2
        N12 = terms // 2
        t3 = t4 = mpmath.mpc(0)
        for n in range(-N34, N34 + 1):
            e = mpmath.exp(ipi * (n * n * tau + 2 * n * z))
            t3 += e
            t4 += e if n % 2 == 0 else -e
        t1 = t2 = mpmath.mpc(0)
        for n in range(-N12 - 1, N12 + 1):
            h = n + mpmath.mpf(1) / 2
            e = mpmath.exp(ipi * (h * h * tau + 2 * h * z))
            t2 += e
            # theta_1 = -i sum (-1)^n q^{(n+1/2)^2} w^{2n+1}
            t1 += e if n % 2 == 0 else -e
        t1 = -1j * t1
        return [_ball_from_mp(v, 0, prec) for v in (t1, t2, t3, t4)]


def _log_term_mags(z, tau, kmax):
    """log2 |t_k| for the unified term index k = 0..kmax-1."""
    ln2 = mpmath.log(2)
    y = mpmath.im(tau)
    b = mpmath.im(z)
    out = []
    for k in range(kmax):
        if k % 2 == 0:
            n = k // 2 + 1
            a = -mp.pi * (n * n * y)
            parts = [a - 2 * n * mp.pi * b, a + 2 * n * mp.pi * b]
        else:
            n = (k + 1) // 2  # half-integer index n + 1/2 with n >= 1
            h = n + mpmath.mpf(1) / 2
            a = -mp.pi * (h * h * y)
            parts = [a - 2 * h * mp.pi * b, a + 2 * h * mp.pi * b]
        hi, lo = max(parts), min(parts)
        out.append((hi + mpmath.log1p(mpmath.exp(lo - hi))) / ln2)
    return out


def naive_theta_terms(z, tau, prec=53):
    """Least T such that the unified terms with index k >= T sum to less than 2^-prec."""
    with mpmath.workprec(60):
        z = _mpc_of(z)
        tau = _mpc_of(tau)
        kmax = 64
        while True:
            lt = _log_term_mags(z, tau, kmax)
            # the tail beyond kmax must already be negligible and decreasing
            if lt[-1] < -prec - 10 and lt[-1] < lt[-2]:
                break
            kmax *= 2
            if kmax > 10 ** 7:
                raise OracleError("term count search did not terminate")
        tail = -math.inf
        T = kmax
        for k in range(kmax - 1, -1, -1):
            v = float(lt[k])
            m = max(tail, v)
            tail = m + math.log2(2 ** (tail - m) + 2 ** (v - m)) if m > -math.inf else v
            if tail >= -prec:
                break
            T = k
        return T


# -- lattice sums -------------------------------------------------------------------

def eisenstein_lattice_sum(k, tau, M=100, prec=53):
    """G_k(tau) = sum over (m, n) != 0, |m|, |n| <= M of (m + n tau)^-k (truncated)."""
    with mpmath.workprec(prec + 20):
        tau = _mpc_of(tau)
        s = mpmath.mpc(0)
        for n in range(-M, M + 1):
            for m in range(-M, M + 1):
                if m == 0 and n == 0:
                    continue
                s += (m + n * tau) ** (-k)
        return s


def wp_lattice_sum(z, tau, M=100, prec=53):
    """p(z) = z^-2 + sum over nonzero lattice points w of (z - w)^-2 - w^-2, truncated."""
    with mpmath.workprec(prec + 20):
        z = _mpc_of(z)
        tau = _mpc_of(tau)
        s = 1 / (z * z)
        for n in range(-M, M + 1):
            for m in range(-M, M + 1):
                if m == 0 and n == 0:
                    continue
                w = m + n * tau
                s += 1 / ((z - w) ** 2) - 1 / (w * w)
        return s


def agm_real_oracle(x, y, iterations=64, prec=256):
    """Plain real AGM iteration in mpf arithmetic."""
    with mpmath.workprec(prec + 20):
        a, b = mpmath.mpf(x), mpmath.mpf(y)
        for _ in range(iterations):
            a, b = (a + b) / 2, mpmath.sqrt(a * b)
        return a, abs(a - b)


__all__ = [
    "Integrand", "OracleError", "trapezoid_periodic", "tanh_sinh", "naive_theta",
    "naive_theta_terms", "eisenstein_lattice_sum", "wp_lattice_sum", "agm_real_oracle",
]
