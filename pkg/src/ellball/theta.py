"""Jacobi theta functions theta_1..theta_4 (z, tau) with z-derivatives.

Pipeline: reduce tau to the fundamental domain, transform z accordingly,
reduce the new z modulo tau', then sum the four series together with one
shared set of powers of q, w and 1/w.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from .arith import _DN, _UP, ComplexBall, mag_mul, one, zero
from .elementary import exp_pi_i, pi, power_table, root_of_unity
from .errors import ConvergenceError
from .modular import ModularTransform, reduce_fundamental, theta_A, theta_char_data
from .series import BallSeries


def n_max(prec):
    return 64 + 4 * prec


def _log2(x):
    return float(gmpy2.log2(x)) if x else -math.inf


def choose_terms(Q, W, D, prec, nmax=None):
    """Least N >= 1 with Q^E W^(N+2) < 2^-prec and Q^F W exp((D-1)/(N+2)) < 1.

    Returns (N, [eps_0, ..., eps_{D-1}]) or raises ConvergenceError.
    """
    lq = _log2(Q)
    lw = _log2(W)
    if nmax is None:
        nmax = n_max(prec)
    N = 1
    while N <= nmax:
        E = (N + 2) ** 2 // 4
        F = (N + 1) // 2 + 1
        if E * lq + (N + 2) * lw < -prec and F * lq + lw + (D - 1) / (N + 2) / math.log(2) < 0:
            eps = error_bounds(Q, W, N, D)
            if eps is not None and eps[0] < _UP.mul_2exp(mpfr(1), -prec + 1):
                return N, eps
        N += 1
    raise ConvergenceError("theta series needs more than N_max terms; reduce the arguments")


def error_bounds(Q, W, N, D):
    """eps[r] = 2 Q^E W^(N+2) (N+2)^r / (1 - alpha), or None if alpha >= 1."""
    E = (N + 2) ** 2 // 4
    F = (N + 1) // 2 + 1
    alpha = mag_mul(mag_mul(_UP.pow(Q, F), W), _UP.exp(_UP.div(D - 1, N + 2)))
    if alpha >= 1:
        return None
    base = _UP.mul_2exp(mag_mul(_UP.pow(Q, E), _UP.pow(W, N + 2)), 1)
    base = _UP.div(base, _DN.sub(1, alpha))
    return [mag_mul(base, _UP.pow(mpfr(N + 2), r)) if r else base for r in range(D)]


def theta_series_raw(z, tau, D, prec, q4=None, stats=None):
    """Coefficients of theta_j(z + x, tau), j = 1..4, to order x^D, by direct series.

    No argument reduction is done here; ``q4 = exp(pi i tau/4)`` may be
    passed in when already known.  ``stats`` receives the term count N.
    """
    wp = prec + 10 + D.bit_length()
    z = ComplexBall.coerce(z, wp).with_prec(wp)
    tau = ComplexBall.coerce(tau, wp).with_prec(wp)
    if q4 is None:
        q4 = exp_pi_i(tau / 4, wp)
    q4 = q4.with_prec(wp)
    q2 = q4 * q4
    q = q2 * q2
    w = exp_pi_i(z, wp)
    v = 1 / w
    Q = q.mag()
    W = max(w.mag(), v.mag())
    N, eps = choose_terms(Q, W, D, wp)
    if stats is not None:
        stats["N"] = N
    K = (N + 3) // 2
    w2 = w * w
    v2 = v * v
    wpow = [one(wp), w2]
    while len(wpow) < K:
        wpow.append(wpow[-1] * w2)
    vpow = [one(wp), v2]
    while len(vpow) < K + 1:
        vpow.append(vpow[-1] * v2)
    qpow = power_table(q, [(k + 2) ** 2 // 4 for k in range(N)])
    th = [[zero(wp) for _ in range(D)] for _ in range(4)]
    th1, th2, th3, th4 = th
    for k in range(N):
        m = (k + 2) ** 2 // 4
        n = k // 2 + 1
        qm = qpow[m]
        odd = k % 2
        a, b = wpow[n], vpow[n + odd]
        t = (a + b) * qm
        u = (a - b) * qm if (odd or D > 1) else None
        if not odd:
            sgn = -1 if ((k + 2) // 2) % 2 else 1
            for r in range(D):
                if r % 2 == 0:
                    if r:
                        t = t * (4 * n * n)
                    th3[r] = th3[r] + t
                    th4[r] = th4[r] + t if sgn > 0 else th4[r] - t
                else:
                    u = u * (2 * n) if r == 1 else u * (4 * n * n)
                    th3[r] = th3[r] + u
                    th4[r] = th4[r] + u if sgn > 0 else th4[r] - u
        else:
            sgn = -1 if ((k + 1) // 2) % 2 else 1
            for r in range(D):
                if r % 2 == 0:
                    th1[r] = th1[r] + u if sgn > 0 else th1[r] - u
                    th2[r] = th2[r] + t
                else:
                    th1[r] = th1[r] + t if sgn > 0 else th1[r] - t
                    th2[r] = th2[r] + u
                t = t * (2 * n + 1)
                u = u * (2 * n + 1)
    p = pi(wp)
    C = one(wp)
    for r in range(D):
        if r:
            C = (C * p).mul_i() / r
        th1[r] = th1[r] * w + (w - v if r % 2 == 0 else w + v)
        th2[r] = th2[r] * w + (w + v if r % 2 == 0 else w - v)
        for j in range(4):
            th[j][r] = th[j][r].add_error(eps[r], eps[r])
        th1[r] = (th1[r] * q4 * C).div_i()
        th2[r] = th2[r] * q4 * C
        th3[r] = th3[r] * C
        th4[r] = th4[r] * C
    th3[0] = th3[0] + 1
    th4[0] = th4[0] + 1
    return [BallSeries([c.round(prec) for c in f]) for f in th]


@dataclass
class ThetaTransformData:
    """theta_{1+j}(z, tau) = exp(pi i R_j/4) A B theta_{1+S_j}(z', tau')."""

    g: ModularTransform
    R: list
    S: list
    A: ComplexBall
    B_log: BallSeries
    z_prime: BallSeries
    tau_prime: ComplexBall
    n_shift: int = 0

    @property
    def Bfac(self) -> BallSeries:
        return self.B_log.exp()


def theta_transform(g: ModularTransform, z, tau, prec, tau_prime=None) -> ThetaTransformData:
    """Transformation data for tau' = g(tau); ``z`` is a BallSeries in x (z + x)."""
    g = g.normalized()
    tau = ComplexBall.coerce(tau, prec)
    if not isinstance(z, BallSeries):
        z = BallSeries.variable(z, 1, prec)
    R, S = theta_char_data(g)
    if tau_prime is None:
        tau_prime = g.apply(tau.with_prec(prec + 2 * g.bits() + 10)).round(prec)
    if g.c == 0:
        zero_series = BallSeries.constant(0, z.D, prec)
        return ThetaTransformData(g, R, S, one(prec), zero_series, z, tau_prime)
    den = g.denominator(tau.with_prec(prec + 2 * g.bits() + 10)).round(prec)
    inv = 1 / den
    zp = -(z * inv)
    A = theta_A(g, tau.with_prec(prec + 2 * g.bits() + 10)).round(prec)
    # B = exp(-pi i c z^2/(c tau + d))
    B_log = (z * z) * (inv * pi(prec) * (-g.c)).mul_i()
    return ThetaTransformData(g, R, S, A, B_log, zp, tau_prime)


def _reduce_z_log(z: BallSeries, tau_prime: ComplexBall):
    """z'' = z' - n tau' and the exponent pi i [-tau' n^2 - 2 n z''] of the prefactor."""
    z0 = z[0]
    y = tau_prime.mid.imag
    n = int(gmpy2.floor(z0.mid.imag / y + mpfr(0.5)))
    if n == 0:
        return z, 0, BallSeries.constant(0, z.D, z.prec)
    zpp = z - tau_prime * n
    expo = (zpp * (-2 * n) - tau_prime * (n * n)) * pi(z.prec)
    return zpp, n, expo.mul_i()


def reduce_z(z, tau_prime):
    """(z'', n, prefactor series) with theta(z', tau') = (+-1) prefactor theta(z'', tau').

    The sign (-1)^n applies to theta_1 and theta_4.
    """
    if not isinstance(z, BallSeries):
        z = BallSeries.variable(z, 1, z.prec)
    zpp, n, expo = _reduce_z_log(z, tau_prime)
    return zpp, n, expo.exp()


def _raw_series(zpp: BallSeries, red_tau, q4, D, prec, stats=None):
    raw = theta_series_raw(zpp[0], red_tau, D, prec, q4=q4, stats=stats)
    if D > 1 and not (zpp[1].is_exact() and zpp[1].mid == 1):
        raw = [f.scale(zpp[1]) for f in raw]
    return raw


@dataclass
class ThetaReduced:
    """theta_{1+j}(z, tau) = root_j * factor * raw[S_j] with root_j = exp(pi i R_j/4).

    ``factor_log`` is the merged exponent of all exponential prefactors (A is
    kept separate since it does not depend on z).
    """

    R: list
    S: list
    A: ComplexBall
    factor_log: BallSeries
    raw: list
    n_shift: int
    data: ThetaTransformData


def theta_reduced(z, tau, D, prec, stats=None) -> ThetaReduced:
    wp = prec
    tau = ComplexBall.coerce(tau, wp)
    red = reduce_fundamental(tau, wp)
    zser = z if isinstance(z, BallSeries) else BallSeries.variable(ComplexBall.coerce(z, wp), D, wp)
    data = theta_transform(red.g, zser, tau, wp, tau_prime=red.tau_prime)
    zpp, n, zlog = _reduce_z_log(data.z_prime, red.tau_prime)
    data.n_shift = n
    raw = _raw_series(zpp, red.tau_prime, red.q4, D, wp, stats)
    R = []
    for j in range(4):
        r = data.R[j]
        if n % 2 and data.S[j] in (0, 3):
            r += 4
        R.append(r % 8)
    return ThetaReduced(R, data.S, data.A, data.B_log + zlog, raw, n, data)


def jacobi_theta(z, tau, D=1, prec=None, stats=None):
    """[theta_1, theta_2, theta_3, theta_4](z + x, tau) as BallSeries of length D."""
    if prec is None:
        prec = getattr(z, "prec", None) or getattr(tau, "prec", None) or 53
    wp = prec + 20
    tr = theta_reduced(z if isinstance(z, BallSeries) else ComplexBall.coerce(z, prec), tau, D, wp, stats)
    E = tr.factor_log.exp() * tr.A
    out = []
    for j in range(4):
        v = tr.raw[tr.S[j]] * E * root_of_unity(tr.R[j], 8, wp)
        out.append(v.round(prec))
    return out


def theta_term_count(z, tau, prec, D=1, reduce_tau=True, reduce_z=True):
    """Number of series terms N that the evaluation uses for the given arguments."""
    tau = ComplexBall.coerce(tau, prec)
    z = ComplexBall.coerce(z, prec)
    if not reduce_tau:
        q = exp_pi_i(tau, prec)
        w = exp_pi_i(z, prec)
        W = max(w.mag(), (1 / w).mag())
        return choose_terms(q.mag(), W, D, prec, nmax=1 << 40)[0]
    red = reduce_fundamental(tau, prec)
    data = theta_transform(red.g, BallSeries.variable(z, D, prec), tau, prec, tau_prime=red.tau_prime)
    zp = data.z_prime
    if reduce_z:
        zp, _, _ = _reduce_z_log(zp, red.tau_prime)
    w = exp_pi_i(zp[0], prec)
    W = max(w.mag(), (1 / w).mag())
    return choose_terms(red.q.mag(), W, D, prec, nmax=1 << 40)[0]
