"""Weierstrass elliptic functions for the lattice Z + tau Z.

Everything is evaluated after one top-level reduction: tau is moved to
tau' = g(tau) and z to z/(c tau + d), which is then reduced modulo the
lattice of tau'.  The scaling laws of the Weierstrass functions under
lattice homothety then give the values at the original arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .arith import ComplexBall, one
from .carlson import rf
from .elementary import exp, pi
from .errors import DomainError, PoleError
from .modular import eisenstein, reduce_fundamental, theta_constants
from .theta import jacobi_theta


@dataclass
class Lattice:
    """The lattice Z + tau Z (periods normalized to 1 and tau)."""

    tau: ComplexBall

    def __post_init__(self):
        if not self.tau.im.is_positive():
            raise DomainError("tau must lie in the upper half plane")


@dataclass
class LatticeData:
    g2: ComplexBall
    g3: ComplexBall
    e1: ComplexBall
    e2: ComplexBall
    e3: ComplexBall


@dataclass
class _Reduced:
    lam: ComplexBall  # c tau + d (1 when c = 0)
    tau_prime: ComplexBall
    z_prime: ComplexBall  # z / lam
    z_red: ComplexBall  # z_prime - n tau' - m
    n: int
    m: int


def _guard(z, tau):
    # extra bits for cancellation in the reduction; grows with the sizes of z and tau
    b = 0
    for v in (z.mid.real, z.mid.imag, tau.mid.real, 1 / tau.mid.imag):
        if v:
            b = max(b, int(gmpy2.floor(gmpy2.log2(abs(mpfr(v))))))
    return 20 + 2 * max(0, b)


def _reduce(z, tau, wp) -> _Reduced:
    red = reduce_fundamental(tau, wp)
    g = red.g
    tp = red.tau_prime
    if g.c:
        lam = g.denominator(tau.with_prec(wp + 2 * g.bits()))
        lam = lam.round(wp)
        zp = z.with_prec(wp) / lam
    elif g.d == 1:
        lam = one(wp)
        zp = z.with_prec(wp)
    else:
        lam = -one(wp)
        zp = -z.with_prec(wp)
    n = int(gmpy2.floor(zp.mid.imag / tp.mid.imag + mpfr(0.5)))
    v = zp - tp * n if n else zp
    m = int(gmpy2.floor(v.mid.real + mpfr(0.5)))
    if m:
        v = v - m
    return _Reduced(lam, tp, zp, v, n, m)


def _theta_prep(u, tau_prime, D, wp):
    th = jacobi_theta(u, tau_prime, D, wp)
    if th[0][0].contains_zero():
        raise PoleError("z lies on (or too close to) a lattice point")
    return th


def wp(z, tau, D=1, prec=None):
    """Series of the Weierstrass p-function: coefficients of p(z + x, tau) up to x^(D-1).

    Raises PoleError when the z ball meets the lattice.
    """
    if prec is None:
        prec = getattr(z, "prec", None) or getattr(tau, "prec", None) or 53
    z = ComplexBall.coerce(z, prec)
    tau = ComplexBall.coerce(tau, prec)
    wp_ = prec + _guard(z, tau)
    r = _reduce(z, tau, wp_)
    th = _theta_prep(r.z_red, r.tau_prime, D, wp_)
    t2, t3, _ = theta_constants(r.tau_prime, wp_)
    p = pi(wp_)
    p2 = p * p
    t22 = t2 * t2
    t32 = t3 * t3
    ratio = th[3] / th[0]
    val = ratio * ratio * (t22 * t32 * p2) - (t22 * t22 + t32 * t32) * p2 / 3
    if D > 1:
        val = val.scale(1 / r.lam)
    val = val / (r.lam * r.lam)
    return val.round(prec)


def _theta1_at_zero(tau_prime, wp):
    """(theta_1'(0), c) with c = -theta_1'''(0) / (3 theta_1'(0))."""
    th1 = jacobi_theta(0, tau_prime, 4, wp)[0]
    d1 = th1[1]
    c = th1[3] * (-2) / d1
    return d1, c


def wp_zeta(z, tau, prec=None):
    """Weierstrass zeta function, with zeta(z) = 1/z + O(z^3)."""
    if prec is None:
        prec = getattr(z, "prec", None) or getattr(tau, "prec", None) or 53
    z = ComplexBall.coerce(z, prec)
    tau = ComplexBall.coerce(tau, prec)
    wp_ = prec + _guard(z, tau)
    r = _reduce(z, tau, wp_)
    th = _theta_prep(r.z_red, r.tau_prime, 2, wp_)[0]
    _, c = _theta1_at_zero(r.tau_prime, wp_)
    v = th[1] / th[0] + c * r.z_prime
    if r.n:
        v = v - ComplexBall.from_real(pi(wp_) * (2 * r.n)).mul_i()
    return (v / r.lam).round(prec)


def wp_sigma(z, tau, prec=None):
    """Weierstrass sigma function (entire, sigma(z) = z + O(z^5))."""
    if prec is None:
        prec = getattr(z, "prec", None) or getattr(tau, "prec", None) or 53
    z = ComplexBall.coerce(z, prec)
    tau = ComplexBall.coerce(tau, prec)
    wp_ = prec + _guard(z, tau)
    r = _reduce(z, tau, wp_)
    th1 = jacobi_theta(r.z_red, r.tau_prime, 1, wp_)[0][0]
    d1, c = _theta1_at_zero(r.tau_prime, wp_)
    e = c * r.z_prime * r.z_prime / 2
    if r.n:
        tp = r.tau_prime.with_prec(wp_)
        e = e - (pi(wp_) * (tp * (r.n * r.n) + r.z_red * (2 * r.n))).mul_i()
    v = exp(e, wp_) * th1 / d1
    if (r.n + r.m) % 2:
        v = -v
    return (v * r.lam).round(prec)


def lattice_data(tau, prec=None) -> LatticeData:
    """g2 = 60 G_4, g3 = 140 G_6 and the roots e1, e2, e3 of 4x^3 - g2 x - g3.

    e1 = p(1/2), e2 = p((1 + tau)/2), e3 = p(tau/2).
    """
    if prec is None:
        prec = getattr(tau, "prec", None) or 53
    tau = ComplexBall.coerce(tau, prec)
    Lattice(tau)
    wp_ = prec + 20
    g2 = eisenstein(4, tau, wp_) * 60
    g3 = eisenstein(6, tau, wp_) * 140
    t2, t3, t4 = theta_constants(tau, wp_)
    a, b, c = t2 ** 4, t3 ** 4, t4 ** 4
    p = pi(wp_)
    s = p * p / 3
    e1 = (b + c) * s
    e2 = (a - c) * s
    e3 = -((a + b) * s)
    return LatticeData(*(v.round(prec) for v in (g2, g3, e1, e2, e3)))


def inverse_wp(w, tau, prec=None):
    """A point u with p(u, tau) = w, namely R_F(w - e1, w - e2, w - e3)."""
    if prec is None:
        prec = getattr(w, "prec", None) or getattr(tau, "prec", None) or 53
    wp_ = prec + 20
    w = ComplexBall.coerce(w, wp_)
    L = lattice_data(tau, wp_)
    return rf(w - L.e1, w - L.e2, w - L.e3, wp_).round(prec)
