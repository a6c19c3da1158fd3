"""Carlson symmetric elliptic integrals and the Legendre forms built on them.

R_F and R_J use symmetric duplication until the arguments are close to
their mean, then a truncated hypergeometric series in the elementary
symmetric polynomials E_2, E_3 (and E_4, E_5 for R_J) of the shifted
variables.  E_1 vanishes identically, which removes most monomials.
The series order B grows with the precision (see ``series_order``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2
from gmpy2 import mpc, mpfr

from .arith import _UP, ComplexBall, one
from .elementary import atan, geometric_tail_bound, pi, rsqrt, sin_cos, sqrt
from .errors import ConvergenceError, DomainError, UnsupportedDomainError

B_MIN = 4
B_MAX = 10 ** 4


@dataclass(frozen=True)
class SeriesOrder:
    B: int

    def __post_init__(self):
        if self.B < 2:
            raise ValueError("series order must be at least 2")


@dataclass
class SymSeriesVars:
    """Mean A, symmetric polynomials E_2.. of the shifted variables, and max |Z_j|."""

    A: ComplexBall
    E: dict
    Zmax: mpfr


def series_order(prec, complex_args=False, B=None) -> SeriesOrder:
    """B = 2 p^0.4 for real and 2.5 p^0.4 for complex arguments, clamped to [4, 10^4]."""
    if B is not None:
        return SeriesOrder(int(B))
    c = 2.5 if complex_args else 2.0
    b = int(round(c * prec ** 0.4))
    return SeriesOrder(min(max(b, B_MIN), B_MAX))


def _cb(x, prec):
    return x.with_prec(prec) if isinstance(x, ComplexBall) else ComplexBall.coerce(x, prec)


def _prec_of(prec, *xs):
    if prec is not None:
        return prec
    return max([getattr(x, "prec", 0) for x in xs] + [0]) or 53


def _all_real(*xs):
    return all(x.is_real() for x in xs)


def _low(x):
    """Midpoint as a 53-bit mpc (exponent range of MPFR, unlike Python complex)."""
    return mpc(x.mid, precision=(53, 53))


def _tail(M, B):
    """2 sum_{k >= B} (9/8 M)^k, rigorous upper bound (inf when 9/8 M >= 1)."""
    C = _UP.div(_UP.mul(M, 9), 8)
    return geometric_tail_bound(2, C, B)


def _log2_tail(lm, B):
    """log2 of the tail estimate 2 (9M/8)^B / (1 - 9M/8), given lm = log2 M."""
    if lm == -math.inf:
        return -math.inf
    lc = lm + math.log2(9 / 8)
    if lc >= 0:
        return math.inf
    C = 2.0 ** lc
    return 1 + B * lc - math.log2(1 - C)


# -- series coefficients --------------------------------------------------------

def _poch_half(n):
    v = Fraction(1)
    for k in range(n):
        v *= Fraction(2 * k + 1, 2)
    return v


@lru_cache(maxsize=64)
def rf_coefficients(B):
    """Rows (m3, [integer coefficients for m2 = 0, 1, ...], denominator).

    Row m3 holds (-1)^m2 (1/2)_{m2+m3} / (m2! m3! (4 m2 + 6 m3 + 1)) for
    2 m2 + 3 m3 < B, scaled to integers.  The coefficients are produced by
    the c_3 / c_2 recurrences running m3 downwards.
    """
    top = (B - 1) // 3
    c3 = _poch_half(top) / math.factorial(top)
    rows = []
    for m3 in range(top, -1, -1):
        if m3 != top:
            c3 = c3 * Fraction(2 * m3 + 2, 2 * m3 + 1)
        c2 = c3
        row = []
        m2 = 0
        while 2 * m2 + 3 * m3 < B:
            t = c2 / (4 * m2 + 6 * m3 + 1)
            row.append(-t if m2 % 2 else t)
            c2 = c2 * Fraction(2 * m2 + 2 * m3 + 1, 2 * m2 + 2)
            m2 += 1
        rows.append(_clear(m3, row))
    return rows


def _clear(key, row):
    den = 1
    for c in row:
        den = den * c.denominator // math.gcd(den, c.denominator)
    return key, [int(c * den) for c in row], den


def rf_monomials(N):
    """Monomials E_2^m2 E_3^m3 of total degree N in the symmetric R_F series."""
    return [(m2, m3) for m3 in range(N // 3 + 1) for m2 in range(N // 2 + 1) if 2 * m2 + 3 * m3 == N]


def raterm_count(N, n=3):
    """Number of monomials of degree N in n variables (direct Z_j form)."""
    return math.comb(N + n - 1, n - 1)


def rsum_rf(E2, E3, B, stats=None):
    """sum_{N < B} (1/2)_N/(3/2)_N T_N, by powers of E2 and Horner in E3."""
    rows = rf_coefficients(B)
    kmax = (B - 1) // 2
    pw = [one(E2.prec), E2]
    for _ in range(2, kmax + 1):
        pw.append(pw[-1] * E2)
    R = None
    for m3, ints, den in rows:
        s = None
        for m2, c in enumerate(ints):
            if c == 0:
                continue
            t = pw[m2] * c if m2 else ComplexBall.coerce(c, E2.prec)
            s = t if s is None else s + t
        s = s / den
        R = s if R is None else R * E3 + s
    if stats is not None:
        stats["nonscalar"] = max(kmax - 1, 0) + len(rows) - 1
    return R


@lru_cache(maxsize=64)
def rj_coefficients(B):
    """Integer rows for the R_J series keyed by (m4, m5); entries keyed by (m2, m3)."""
    out = []
    for m5 in range((B - 1) // 5, -1, -1):
        for m4 in range((B - 1 - 5 * m5) // 4, -1, -1):
            row = []
            keys = []
            for m3 in range((B - 1 - 5 * m5 - 4 * m4) // 3 + 1):
                for m2 in range((B - 1 - 5 * m5 - 4 * m4 - 3 * m3) // 2 + 1):
                    N = 2 * m2 + 3 * m3 + 4 * m4 + 5 * m5
                    M = m2 + m3 + m4 + m5
                    c = _poch_half(M) / (math.factorial(m2) * math.factorial(m3)
                                         * math.factorial(m4) * math.factorial(m5))
                    c = c * Fraction(3, 2 * N + 3)
                    row.append(-c if (M + N) % 2 else c)
                    keys.append((m2, m3))
            (_, ints, den) = _clear(None, row)
            out.append(((m4, m5), list(zip(keys, ints)), den))
    return out


def rsum_rj(E2, E3, E4, E5, B):
    """sum_{N < B} 3/(2N + 3) T_N for five variables with E_1 = 0."""
    rows = rj_coefficients(B)
    prec = E2.prec
    table = {}

    def power(m2, m3):
        key = (m2, m3)
        if key not in table:
            if m2 == 0 and m3 == 0:
                table[key] = one(prec)
            elif m3 == 0:
                table[key] = power(m2 - 1, 0) * E2
            else:
                table[key] = power(m2, m3 - 1) * E3
        return table[key]

    # Horner: outer in E5, inner in E4
    by_m5 = {}
    for (m4, m5), entries, den in rows:
        s = None
        for (m2, m3), c in entries:
            if c == 0:
                continue
            t = power(m2, m3) * c
            s = t if s is None else s + t
        by_m5.setdefault(m5, {})[m4] = (s if s is not None else ComplexBall.coerce(0, prec)) / den
    R = None
    for m5 in sorted(by_m5, reverse=True):
        inner = None
        for m4 in sorted(by_m5[m5], reverse=True):
            v = by_m5[m5][m4]
            inner = v if inner is None else inner * E4 + v
        R = inner if R is None else R * E5 + inner
    return R


# -- R_F --------------------------------------------------------------------------

def _check_zeros(*xs, allowed=1):
    if sum(1 for x in xs if x.contains_zero()) > allowed:
        raise DomainError("integral diverges: too many arguments contain 0")


def _lam(sx, sy, sz):
    return sx * sy + sy * sz + sz * sx


def _log2_spread(xs, weights, wp):
    """log2 of max |1 - x_j/A| over the midpoints, A the weighted mean."""
    ctx = gmpy2.context(precision=wp, emax=gmpy2.get_emax_max(), emin=gmpy2.get_emin_min())
    with ctx:
        A = sum(w * x.mid for x, w in zip(xs, weights)) / sum(weights)
        if A == 0:
            return math.inf
        d = max(abs(x.mid - A) for x in xs)
        if d == 0:
            return -math.inf
        return float(gmpy2.log2(d) - gmpy2.log2(abs(A)))


def rf(x, y, z, prec=None, B=None, stats=None):
    """R_F(x, y, z) for complex x, y, z, with at most one argument containing 0."""
    prec = _prec_of(prec, x, y, z)
    order = series_order(prec, not _all_real(*(ComplexBall.coerce(v, prec) for v in (x, y, z))), B).B
    wp = prec + 10 + 2 * prec.bit_length()
    x, y, z = _cb(x, wp), _cb(y, wp), _cb(z, wp)
    _check_zeros(x, y, z)
    steps = 0
    limit = 200 + 2 * wp
    while _log2_tail(_log2_spread((x, y, z), (1, 1, 1), wp), order) > -wp:
        if steps > limit:
            raise ConvergenceError("R_F argument reduction did not converge")
        sx, sy, sz = (sqrt(v, wp, strict=False) for v in (x, y, z))
        lam = _lam(sx, sy, sz)
        x = (x + lam).mul_2exp(-2)
        y = (y + lam).mul_2exp(-2)
        z = (z + lam).mul_2exp(-2)
        steps += 1
    A = (x + y + z) / 3
    if A.contains_zero():
        raise DomainError("R_F: mean of the reduced arguments contains 0")
    X = 1 - x / A
    Y = 1 - y / A
    Z = -(X + Y)
    E2 = X * Y - Z * Z
    E3 = X * Y * Z
    M = max(X.mag(), Y.mag(), Z.mag())
    eps = _tail(M, order)
    if stats is not None:
        stats.update(steps=steps, B=order)
    R = rsum_rf(E2, E3, order, stats).add_error(eps, eps)
    return (rsqrt(A, wp, strict=False) * R).round(prec)


def rc1(t, prec=None):
    """R_C(1, 1 + t) = atan(sqrt t)/sqrt t, by Taylor series for small |t|."""
    prec = _prec_of(prec, t)
    wp = prec + 10
    t = _cb(t, wp)
    if t.is_exact() and gmpy2.is_zero(t.mid.real) and gmpy2.is_zero(t.mid.imag):
        return one(prec)
    T = t.mag()
    if T < mpfr(2) ** -4:
        # sum (-t)^k/(2k+1); tail bounded by T^K/(1 - T)
        K = max(1, int(math.ceil((wp + 2) / -float(gmpy2.log2(T)))))
        s = ComplexBall.coerce(Fraction(1, 2 * K - 1), wp)
        for k in range(K - 2, -1, -1):
            s = s * (-t) + Fraction(1, 2 * k + 1)
        err = geometric_tail_bound(1, T, K)
        return s.add_error(err, err).round(prec)
    try:
        s = sqrt(t, wp)
        return (atan(s, wp) / s).round(prec)
    except DomainError:
        u = 1 + t
        return rf(one(wp), u, u, wp).round(prec)


def rc(x, y, prec=None):
    """R_C(x, y) = R_F(x, y, y)."""
    prec = _prec_of(prec, x, y)
    x = _cb(x, prec + 10)
    y = _cb(y, prec + 10)
    if x.is_exact() and x.mid == 1:
        return rc1(y - 1, prec)
    return rf(x, y, y, prec)


# -- R_J / R_D ----------------------------------------------------------------------

def _rj_admissible(x, y, z, p):
    nonneg = all(not (v.re.mid < 0) and v.re.lower() >= 0 for v in (x, y, z))
    return nonneg and p.re.lower() > 0


def rj(x, y, z, p, prec=None, B=None, _rd=False):
    """R_J(x, y, z, p).

    Supported when x, y, z have nonnegative real part and p has positive
    real part, or for R_D (p = z); anything else raises UnsupportedDomainError.
    """
    prec = _prec_of(prec, x, y, z, p)
    wp = prec + 15 + 2 * prec.bit_length()
    x, y, z, p = (_cb(v, wp) for v in (x, y, z, p))
    if not _rd and not _rj_admissible(x, y, z, p):
        raise UnsupportedDomainError("R_J is only supported for Re(x, y, z) >= 0 and Re(p) > 0")
    _check_zeros(x, y, z)
    if p.contains_zero():
        raise DomainError("R_J: p contains 0")
    order = series_order(prec, not _all_real(x, y, z, p), B).B
    acc = None
    limit = 200 + 2 * wp
    steps = 0
    while True:
        if _log2_tail(_log2_spread((x, y, z, p), (1, 1, 1, 2), wp), order) <= -wp:
            break
        if steps > limit:
            raise ConvergenceError("R_J argument reduction did not converge")
        sx, sy, sz = (sqrt(v, wp, strict=False) for v in (x, y, z))
        lam = _lam(sx, sy, sz)
        if _rd:
            # p = z: d = 2 sqrt(z) (z + lam), e = 0
            term = 3 / (sz * (z + lam))
        else:
            sp = sqrt(p, wp, strict=False)
            d = (sp + sx) * (sp + sy) * (sp + sz)
            delta = (p - x) * (p - y) * (p - z)
            e = delta / (d * d)
            term = rc1(e, wp) * 6 / d
        term = term.mul_2exp(-2 * steps)
        acc = term if acc is None else acc + term
        x = (x + lam).mul_2exp(-2)
        y = (y + lam).mul_2exp(-2)
        z = (z + lam).mul_2exp(-2)
        p = z if _rd else (p + lam).mul_2exp(-2)
        steps += 1
    A = (x + y + z + p * 2) / 5
    if A.contains_zero():
        raise DomainError("R_J: mean of the reduced arguments contains 0")
    X = 1 - x / A
    Y = 1 - y / A
    Z = 1 - z / A
    P = -(X + Y + Z).mul_2exp(-1)
    P2 = P * P
    XYZ = X * Y * Z
    E2 = X * Y + X * Z + Y * Z - P2 * 3
    E3 = XYZ + E2 * P * 2 + P2 * P * 4
    E4 = (XYZ * 2 + E2 * P + P2 * P * 3) * P
    E5 = XYZ * P2
    M = max(X.mag(), Y.mag(), Z.mag(), P.mag())
    eps = _tail(M, order)
    S = rsum_rj(E2, E3, E4, E5, order).add_error(eps, eps)
    r = rsqrt(A, wp, strict=False)
    v = (r * r * r * S).mul_2exp(-2 * steps)
    if acc is not None:
        v = v + acc
    return v.round(prec)


def rd(x, y, z, prec=None, B=None):
    """R_D(x, y, z) = R_J(x, y, z, z); valid for all complex arguments."""
    return rj(x, y, z, z, prec, B, _rd=True)


def rg(x, y, z, prec=None):
    """2 R_G(x, y, z) = z R_F - (x - z)(y - z) R_D / 3 + sqrt(x) sqrt(y)/sqrt(z).

    The arguments are rotated so the one of largest modulus is in the z slot.
    """
    prec = _prec_of(prec, x, y, z)
    wp = prec + 20
    args = [_cb(v, wp) for v in (x, y, z)]
    if all(v.contains_zero() for v in args):
        if all(v.is_exact() and v.mid == 0 for v in args):
            return ComplexBall.coerce(0, prec)
        raise DomainError("R_G: all arguments contain 0")
    k = max(range(3), key=lambda i: abs(_low(args[i])))
    x, y, z = args[(k + 1) % 3], args[(k + 2) % 3], args[k]
    if z.contains_zero():
        raise DomainError("R_G: no argument is separated from 0")
    t1 = z * rf(x, y, z, wp)
    t2 = (x - z) * (y - z) * rd(x, y, z, wp) / 3
    t3 = sqrt(x, wp, strict=False) * sqrt(y, wp, strict=False) / sqrt(z, wp, strict=False)
    return (t1 - t2 + t3).mul_2exp(-1).round(prec)


# -- Legendre forms ---------------------------------------------------------------------

def _phi_split(phi, wp):
    """(k, phi - k pi) with k = round(Re(phi)/pi)."""
    phi = _cb(phi, wp)
    p = pi(wp)
    k = int(gmpy2.floor(phi.mid.real / p.mid + mpfr(0.5)))
    return k, (phi - p * k) if k else phi


def _sc(phi, wp):
    if phi.is_real():
        s, c = sin_cos(phi.re, wp)
        return ComplexBall.from_real(s), ComplexBall.from_real(c)
    return sin_cos(phi, wp)


def legendre_f(phi, m, prec=None):
    """Incomplete integral of the first kind F(phi, m)."""
    prec = _prec_of(prec, phi, m)
    wp = prec + 20
    m = _cb(m, wp)
    k, phi0 = _phi_split(phi, wp)
    s, c = _sc(phi0, wp)
    v = s * rf(c * c, 1 - m * s * s, one(wp), wp)
    if k:
        v = v + rf(ComplexBall.coerce(0, wp), 1 - m, one(wp), wp) * (2 * k)
    return v.round(prec)


def legendre_e_inc(phi, m, prec=None):
    """Incomplete integral of the second kind E(phi, m)."""
    prec = _prec_of(prec, phi, m)
    wp = prec + 20
    m = _cb(m, wp)
    k, phi0 = _phi_split(phi, wp)
    s, c = _sc(phi0, wp)
    x, y = c * c, 1 - m * s * s
    v = s * rf(x, y, one(wp), wp)
    if not (m.is_exact() and m.mid == 0):
        v = v - m * s * s * s * rd(x, y, one(wp), wp) / 3
    if k:
        zero = ComplexBall.coerce(0, wp)
        Ec = rf(zero, 1 - m, one(wp), wp) - m * rd(zero, 1 - m, one(wp), wp) / 3
        v = v + Ec * (2 * k)
    return v.round(prec)


def legendre_pi(n, phi, m, prec=None):
    """Incomplete integral of the third kind Pi(n, phi, m).

    The quasiperiodic extension Pi(n, phi + k pi, m) = 2k Pi(n, m) + Pi(n, phi, m)
    is applied for every n.
    """
    prec = _prec_of(prec, n, phi, m)
    wp = prec + 20
    m = _cb(m, wp)
    n = _cb(n, wp)
    k, phi0 = _phi_split(phi, wp)
    s, c = _sc(phi0, wp)
    s2 = s * s
    x, y, p = c * c, 1 - m * s2, 1 - n * s2
    v = s * rf(x, y, one(wp), wp)
    if not (n.is_exact() and n.mid == 0):
        v = v + n * s2 * s * rj(x, y, one(wp), p, wp) / 3
    if k:
        zero = ComplexBall.coerce(0, wp)
        Pc = rf(zero, 1 - m, one(wp), wp) + n * rj(zero, 1 - m, one(wp), 1 - n, wp) / 3
        v = v + Pc * (2 * k)
    return v.round(prec)


def elliptic_pi(n, m, prec=None):
    """Complete integral of the third kind Pi(n, m) = Pi(n, pi/2, m)."""
    prec = _prec_of(prec, n, m)
    wp = prec + 20
    m = _cb(m, wp)
    n = _cb(n, wp)
    zero = ComplexBall.coerce(0, wp)
    v = rf(zero, 1 - m, one(wp), wp) + n * rj(zero, 1 - m, one(wp), 1 - n, wp) / 3
    return v.round(prec)


__all__ = [
    "SeriesOrder", "SymSeriesVars", "series_order", "rf", "rc", "rc1", "rj", "rd", "rg",
    "legendre_f", "legendre_e_inc", "legendre_pi", "elliptic_pi", "rf_monomials",
    "raterm_count", "rsum_rf", "rsum_rj", "rf_coefficients",
]
