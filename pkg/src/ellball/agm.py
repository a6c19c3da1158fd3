"""Complex arithmetic-geometric mean M(z) = M(1, z) and complete elliptic integrals.

M has its branch cut on (-inf, 0]; K and E have theirs on [1, inf).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr

from .arith import _DN, _UP, MAG_ZERO, ComplexBall, one, zero
from .elementary import _touches_cut, pi, sqrt
from .errors import BranchCutError, DomainError, PoleError

MAX_ITER = 10000


@dataclass
class AgmState:
    a: ComplexBall
    b: ComplexBall
    iteration_count: int = 0


def _c(x, prec):
    return x.with_prec(prec) if isinstance(x, ComplexBall) else ComplexBall.coerce(x, prec)


def _is(x, v):
    return x.is_exact() and x.mid == v


def _root(a: ComplexBall, b: ComplexBall, prec):
    """sqrt(a) sqrt(b) with principal roots, picked by the signs of the midpoints."""
    ar, ai = a.mid.real, a.mid.imag
    br, bi = b.mid.real, b.mid.imag
    if ar > 0 and br > 0:
        return sqrt(a * b, prec, strict=False)
    if ai >= 0 and bi >= 0:
        return sqrt(-(a * b), prec, strict=False).mul_i()
    if ai <= 0 and bi <= 0:
        return sqrt(-(a * b), prec, strict=False).div_i()
    return sqrt(a, prec, strict=False) * sqrt(b, prec, strict=False)


# pi/(4 K(t^2)) = 1/2 - t^2/8 - 5 t^4/128 - 11 t^6/512 - 469 t^8/32768 + ...
_TAYLOR = [(1, 2), (-1, 8), (-5, 128), (-11, 512), (-469, 32768)]


def _agm_tail(T):
    """sum_{k >= 10} T^k / 64."""
    if T >= 1:
        return gmpy2.inf()
    return _UP.div(_UP.pow(T, 10), _DN.mul(64, _DN.sub(1, T)))


def agm_iterate(a, b, prec, stop_bits):
    """Run the AGM on (a, b) until |t| = |a - b|/|a + b| < 2^-stop_bits and |t| <= 1/2."""
    st = AgmState(a, b)
    lim = _DN.mul_2exp(mpfr(1), -stop_bits)
    while st.iteration_count < MAX_ITER:
        a, b = st.a, st.b
        s = a + b
        if not s.contains_zero():
            T = ((a - b) / s).mag()
            if T <= 0.5 and T < lim:
                return st
        st.a = (a + b).mul_2exp(-1)
        st.b = _root(a, b, prec)
        st.iteration_count += 1
        if st.a.rad_disc() > st.a.mag() and st.iteration_count > 8:
            return st
    return st


def _agm_finish(st: AgmState, prec):
    a, b = st.a, st.b
    s = a + b
    if s.contains_zero():
        # |M - a_n| <= |a_n - b_n| when the real parts are nonnegative
        d = (a - b).mag()
        return a.add_error(d, d)
    t = (a - b) / s
    T = t.mag()
    if T > 0.5:
        d = (a - b).mag()
        return a.add_error(d, d)
    t2 = t * t
    p = ComplexBall.coerce(Fraction(*_TAYLOR[-1]), prec)
    for num, den in reversed(_TAYLOR[:-1]):
        p = p * t2 + Fraction(num, den)
    e = _agm_tail(T)
    p = p.add_error(e, e)
    return s * p


def agm1(z, prec=None):
    """M(1, z) with the optimal choice of square roots; branch cut on (-inf, 0]."""
    prec = prec or getattr(z, "prec", None) or 53
    wp = prec + 10 + 2 * prec.bit_length()
    z = _c(z, wp)
    if _is(z, 0):
        return zero(prec)
    if _is(z, 1):
        return one(prec)
    if z.contains_zero() or (_touches_cut(z) and not z.is_real()):
        raise BranchCutError("AGM argument touches the branch cut (-inf, 0]")
    if z.is_real() and not z.re.is_positive():
        raise BranchCutError("AGM argument lies on the branch cut (-inf, 0]")
    scale = None
    if z.mid.real < 0:
        # one AGM step and homogeneity: M(z) = (z + 1) M(u)/2 with u = 2 sqrt(z)/(z + 1), Re(u) > 0
        zp1 = z + 1
        z = sqrt(z, wp).mul_2exp(1) / zp1
        scale = zp1.mul_2exp(-1)
    st = agm_iterate(one(wp), z, wp, max(4, wp // 10))
    m = _agm_finish(st, wp)
    if scale is not None:
        m = m * scale
    return m.round(prec)


def agm(x, y, prec=None):
    """M(x, y) = x M(1, y/x)."""
    prec = prec or max(getattr(x, "prec", 0), getattr(y, "prec", 0)) or 53
    x = _c(x, prec + 10)
    y = _c(y, prec + 10)
    if _is(x, 0) or _is(y, 0):
        return zero(prec)
    return (x * agm1(y / x, prec + 10)).round(prec)


def _cut_distance(z: ComplexBall):
    """Lower bound on the distance from the ball z to (-inf, 0]."""
    re_lo = _DN.sub(z.mid.real, z.rad_re)
    im_lo = _DN.sub(abs(z.mid.imag), z.rad_im)
    if re_lo >= 0:
        return z.mig()
    return im_lo if im_lo > 0 else MAG_ZERO


def agm_derivative(z, prec=None):
    """(M(z), M'(z)) by a central difference with a Cauchy-integral error bound."""
    prec = prec or getattr(z, "prec", None) or 53
    z = _c(z, prec)
    d = _cut_distance(z)
    if not d > 0:
        raise DomainError("agm_derivative needs z bounded away from (-inf, 0]")
    wp = (3 * prec + 1) // 2 + 10
    zm = ComplexBall(z.mid.real, z.mid.imag, wp)
    rho = z.rad_disc()
    d0 = _DN.add(d, rho)  # distance from the midpoint
    r = _DN.mul_2exp(d0, -1)
    big = max(mpfr(1), _UP.add(zm.mag(), r))
    e = -((prec + 1) // 2) + int(gmpy2.ceil(gmpy2.log2(max(mpfr(1), zm.mag()))))
    while mpfr(2) ** e > _DN.mul_2exp(r, -2):
        e -= 1
    h = mpfr(2) ** e
    f1 = agm1(zm + ComplexBall(h, 0, wp), wp)
    f2 = agm1(zm - ComplexBall(h, 0, wp), wp)
    M = (f1 + f2).mul_2exp(-1)
    D = (f1 - f2).mul_2exp(-e - 1)
    q = _UP.square(_UP.div(h, r))
    geo = _UP.div(q, _DN.sub(1, q))
    eM = _UP.mul(big, geo)
    eD = _UP.div(eM, r)
    M = M.add_error(eM, eM)
    D = D.add_error(eD, eD)
    if rho:
        if not rho < r:
            raise DomainError("input ball too wide for agm_derivative")
        rr = _DN.sub(r, rho)
        e1 = _UP.mul(rho, _UP.div(big, rr))
        e2 = _UP.mul(rho, _UP.div(_UP.mul_2exp(big, 1), _DN.mul(rr, rr)))
        M = M.add_error(e1, e1)
        D = D.add_error(e2, e2)
    return M.round(prec), D.round(prec)


def _check_m(m: ComplexBall):
    """Reject balls that meet [1, inf) without lying exactly on it."""
    w = 1 - m
    if w.contains_zero():
        return False
    if _touches_cut(w) and not w.is_real():
        raise BranchCutError("m straddles the branch cut [1, inf)")
    return True


def elliptic_k(m, prec=None):
    """K(m) = pi / (2 M(sqrt(1 - m)))."""
    prec = prec or getattr(m, "prec", None) or 53
    wp = prec + 15
    m = _c(m, wp)
    if _is(m, 0):
        return (ComplexBall.from_real(pi(wp)).mul_2exp(-1)).round(prec)
    if not _check_m(m):
        raise PoleError("K(m) is infinite at m = 1")
    s = sqrt(1 - m, wp)
    v = ComplexBall.from_real(pi(wp)) / agm1(s, wp).mul_2exp(1)
    return v.round(prec)


def elliptic_k_derivative(m, prec=None):
    """(K(m), K'(m))."""
    prec = prec or getattr(m, "prec", None) or 53
    wp = prec + 20
    m = _c(m, wp)
    if not _check_m(m):
        raise PoleError("K(m) is infinite at m = 1")
    s = sqrt(1 - m, wp)
    M, dM = agm_derivative(s, wp)
    p = ComplexBall.from_real(pi(wp))
    K = p / M.mul_2exp(1)
    dK = p * dM / (s * M * M).mul_2exp(2)
    return K.round(prec), dK.round(prec)


def elliptic_e(m, prec=None):
    """E(m) = (1 - m)(2 m K'(m) + K(m))."""
    prec = prec or getattr(m, "prec", None) or 53
    wp = prec + 20
    m = _c(m, wp)
    if _is(m, 1):
        return one(prec)
    if _is(m, 0):
        return (ComplexBall.from_real(pi(wp)).mul_2exp(-1)).round(prec)
    K, dK = elliptic_k_derivative(m, wp)
    v = (1 - m) * ((m * dK).mul_2exp(1) + K)
    return v.round(prec)


def agm_series_coeffs(z, K, prec=None, M=None, dM=None):
    """Taylor coefficients c_0..c_K of W(z + x) = 1/M(z + x) by the three-term recurrence."""
    prec = prec or getattr(z, "prec", None) or 53
    wp = prec + 10 + 2 * K
    z = _c(z, wp)
    if _is(z, 1):
        # limit of the general recurrence at z = 1: -2 (k+2)^2 c_{k+2} = (3k(k+3)+7) c_{k+1} + (k+1)^2 c_k
        c = [one(wp), ComplexBall.coerce(Fraction(-1, 2), wp)]
        for k in range(0, K - 1):
            v = (c[k + 1] * (3 * k * (k + 3) + 7) + c[k] * ((k + 1) ** 2)) / (-2 * (k + 2) ** 2)
            c.append(v)
        return [v.round(prec) for v in c[:K + 1]]
    z2m1 = z * z - 1
    if z.contains_zero() or z2m1.contains_zero():
        raise DomainError("recurrence is singular at z = 0 and z = +-1")
    if M is None or dM is None:
        M, dM = agm_derivative(z, wp)
    c0 = 1 / M
    c1 = -(dM * c0 * c0)
    c = [c0, c1]
    if K >= 2:
        t = 3 * z * z - 1
        c.append((t * c1 + z * c0) / (z * z2m1 * (-2)))
        for k in range(0, K - 2):
            rhs = t * c[k + 2] * ((k + 2) ** 2) + z * c[k + 1] * (3 * k * (k + 3) + 7) + c[k] * ((k + 1) ** 2)
            c.append(rhs / (z * z2m1 * (-(k + 2) * (k + 3))))
    return [v.round(prec) for v in c[:K + 1]]


__all__ = [
    "AgmState", "agm1", "agm", "agm_iterate", "agm_derivative", "elliptic_k", "elliptic_e",
    "elliptic_k_derivative", "agm_series_coeffs",
]
