"""Modular transformations, fundamental-domain reduction and modular forms.

Conventions: theta constants use q = exp(pi i tau); the eta series uses
exp(2 pi i tau), which is obtained by squaring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr

from .arith import _UP, ComplexBall, one
from .elementary import exp_pi_i, geometric_tail_bound, pi, power_table, root_of_unity, sqrt
from .errors import DomainError

EPS_FD = 2.0 ** -16
_FLOAT_ENTRY_LIMIT = 2 ** 40
_FLOAT_IM_LIMIT = 2.0 ** -30
_MAX_STEPS = 100000


@dataclass(frozen=True)
class ModularTransform:
    """The matrix (a b; c d) with ad - bc = 1, acting as tau -> (a tau + b)/(c tau + d)."""

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self} is not 1")

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    def normalized(self):
        """Representative with c > 0, or c = 0 and d > 0 (same action on tau)."""
        if self.c < 0 or (self.c == 0 and self.d < 0):
            return ModularTransform(-self.a, -self.b, -self.c, -self.d)
        return self

    def __matmul__(self, other):
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        return ModularTransform(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inverse(self):
        return ModularTransform(self.d, -self.b, -self.c, self.a)

    def is_identity(self):
        n = self.normalized()
        return (n.a, n.b, n.c, n.d) == (1, 0, 0, 1)

    def bits(self):
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d), 1).bit_length()

    def denominator(self, tau: ComplexBall) -> ComplexBall:
        """c tau + d."""
        return tau * self.c + self.d

    def apply(self, tau: ComplexBall) -> ComplexBall:
        if self.c == 0:
            # (a tau + b)/d with d = a = +-1
            return (tau * self.a + self.b) * self.d
        return (tau * self.a + self.b) / (tau * self.c + self.d)

    def astuple(self):
        return (self.a, self.b, self.c, self.d)


@dataclass(frozen=True)
class ReducedTau:
    """tau' = g(tau) near the fundamental domain with q = e^{pi i tau'}, q4 = e^{pi i tau'/4}."""

    tau_prime: ComplexBall
    g: ModularTransform
    q: ComplexBall
    q4: ComplexBall


# -- reduction -----------------------------------------------------------------

def _reduce_float(x, y):
    a, b, c, d = 1, 0, 0, 1
    lim = (1 - EPS_FD) ** 2
    for _ in range(_MAX_STEPS):
        n = -math.floor(x + 0.5)
        x += n
        a, b = a + n * c, b + n * d
        r2 = x * x + y * y
        if r2 >= lim:
            return a, b, c, d
        x, y = -x / r2, y / r2
        a, b, c, d = -c, -d, a, b
        if max(abs(a), abs(b), abs(c), abs(d)) > _FLOAT_ENTRY_LIMIT or y <= 0:
            return None
    return None


def _reduce_mp(tau: mpc, wp):
    ctx = gmpy2.context(precision=wp, emax=gmpy2.get_emax_max(), emin=gmpy2.get_emin_min())
    with ctx:
        t = mpc(tau)
        a, b, c, d = 1, 0, 0, 1
        lim = (1 - mpfr(EPS_FD)) ** 2
        for _ in range(_MAX_STEPS):
            n = -int(gmpy2.floor(t.real + mpfr(0.5)))
            t = t + n
            a, b = a + n * c, b + n * d
            if gmpy2.norm(t) >= lim:
                return a, b, c, d
            t = -1 / t
            a, b, c, d = -c, -d, a, b
    raise DomainError("fundamental-domain reduction did not terminate")


def construct_g(tau_mid) -> ModularTransform:
    """Heuristically find g with g(tau) near the fundamental domain.

    Uses hardware floats when that is safe and falls back to big floats
    whose precision grows with the size of the input.
    """
    x, y = float(tau_mid.real), float(tau_mid.imag)
    res = None
    if y > _FLOAT_IM_LIMIT and abs(x) < _FLOAT_ENTRY_LIMIT:
        res = _reduce_float(x, y)
    if res is None:
        ey = max(0, -int(gmpy2.floor(gmpy2.log2(abs(tau_mid.imag)))))
        ex = max(0, int(gmpy2.ceil(gmpy2.log2(abs(tau_mid.real) + 1))))
        res = _reduce_mp(tau_mid, 64 + 4 * ey + 2 * ex)
    return ModularTransform(*res).normalized()


def reduce_fundamental(tau, prec) -> ReducedTau:
    """Reduce tau to (near) the fundamental domain.

    g is built from the midpoint; g(tau) is then evaluated once in ball
    arithmetic so the result is rigorous whatever g is.
    """
    tau = ComplexBall.coerce(tau, prec)
    if not tau.im.is_positive():
        raise DomainError("tau must lie in the upper half plane")
    g = construct_g(tau.mid)
    if g.is_identity():
        tp = tau
    else:
        guard = 2 * g.bits() + 16
        tp = g.apply(tau.with_prec(prec + guard)).round(prec)
        if not tp.im.is_positive():
            raise DomainError("reduced tau is not separated from the real axis")
    q4 = exp_pi_i(tp.with_prec(prec + 6) / 4, prec + 6)
    q = (q4 * q4) * (q4 * q4)
    return ReducedTau(tp, g, q.round(prec), q4.round(prec))


# -- roots of unity ----------------------------------------------------------------

def _dedekind_sum(h, k):
    """s(h, k) for k > 0 via the reciprocity law."""
    h %= k
    acc = Fraction(0)
    sign = 1
    while h:
        acc += sign * ((Fraction(h, k) + Fraction(k, h) + Fraction(1, h * k)) / 12 - Fraction(1, 4))
        sign = -sign
        h, k = k % h, h
    return acc


def eta_root_of_unity_dedekind(g: ModularTransform) -> int:
    """R via Dedekind sums; an independent route used to check the main formula."""
    g = g.normalized()
    a, b, c, d = g.astuple()
    if c == 0:
        return b % 24
    v = Fraction(a + d, c) - 12 * _dedekind_sum(d, c) - 3
    if v.denominator != 1:
        raise ArithmeticError("non-integral eta exponent")
    return int(v) % 24


def eta_root_of_unity(g: ModularTransform) -> int:
    """R (mod 24) with eta(g(tau)) = exp(pi i R/12) sqrt(c tau + d) eta(tau).

    Kronecker-symbol form; valid for c > 0 with the principal square root,
    and R = b when c = 0 (after normalizing d = 1).
    """
    g = g.normalized()
    a, b, c, d = g.astuple()
    if c == 0:
        return b % 24
    if c % 2:
        sym = gmpy2.jacobi(d, c)
        e = (a + d) * c - b * d * (c * c - 1) - 3 * c
    else:
        sym = gmpy2.kronecker(c, d)
        e = (a + d) * c - b * d * (c * c - 1) + 3 * d - 3 - 3 * c * d
    if sym == -1:
        e += 12
    return e % 24


_BASE_INDEX = {(0, 0): (2, 0), (0, 1): (3, 0), (1, 0): (1, 0), (1, 1): (0, 2)}


def _theta_mn(m, n):
    """(index of theta_{1+S}, extra exponent in units of pi i/4) for theta_{m,n}."""
    k = (m - (m % 2)) // 2
    extra = 4 if (n * k) % 2 else 0
    s, e = _BASE_INDEX[(m % 2, n % 2)]
    return s, (extra + e) % 8


def theta_char_data(g: ModularTransform):
    """Exponents R_j (mod 8) and indices S_j with

        theta_{1+j}(z, tau) = exp(pi i R_j/4) A B theta_{1+S_j}(z', tau'),  tau' = g(tau).
    """
    g = g.normalized()
    a, b, c, d = g.astuple()
    if c == 0:
        R = [(-b) % 8, (-b) % 8, 0, 0]
        S = [0, 1, 3, 2] if b % 2 else [0, 1, 2, 3]
        return R, S
    Re = eta_root_of_unity(g)
    eps = [
        eta_root_of_unity(ModularTransform(-d, b, c, -a)) + 1,
        -Re + 5 + (2 - c) * a,
        -Re + 4 + (c - d - 2) * (b - a),
        -Re + 3 - (2 + d) * b,
    ]
    pairs = [(1, 1), (1 - c, 1 + a), (1 + d - c, 1 - b + a), (1 + d, 1 - b)]
    R, S = [], []
    for j, (e, (m, n)) in enumerate(zip(eps, pairs)):
        s, extra = _theta_mn(m, n)
        if j == 0:
            # theta_1 maps to theta_1 itself, not to theta_{1,1} = i theta_1
            s, extra = 0, 0
        R.append((e + extra) % 8)
        S.append(s)
    return R, S


def theta_A(g: ModularTransform, tau: ComplexBall) -> ComplexBall:
    """A = sqrt(i/(c tau + d)) (1 when c = 0)."""
    if g.c == 0:
        return one(tau.prec)
    return sqrt((1 / g.denominator(tau)).mul_i())


# -- q-series at a reduced argument -----------------------------------------------------

def _q_terms(Q, prec, first, gap):
    """Least N whose tail bound for sum_{n > N} Q^e(n) is below 2^-prec.

    ``first(N)`` is the exponent of term N+1 and ``gap(N)`` a lower bound
    for the exponent differences beyond it, so the tail is dominated by a
    geometric series.  Returns (N, bound).
    """
    eps = _UP.mul_2exp(mpfr(1), -prec - 2)
    N = 1
    while True:
        t = geometric_tail_bound(_UP.pow(Q, first(N)), _UP.pow(Q, gap(N)), 0)
        if t < eps:
            return N, t
        N += 1
        if N > 100000:
            raise DomainError("q-series does not converge (|q| too close to 1)")


def theta_constants_reduced(red: ReducedTau, prec):
    """(theta_2, theta_3, theta_4)(0, tau') by the sparse q-series."""
    q = red.q.with_prec(prec + 10)
    Q = q.mag()
    # theta_3, theta_4: sum over n >= 1 of q^{n^2}; theta_2: sum over n >= 0 of q^{n(n+1)}
    N, tail3 = _q_terms(Q, prec + 4, lambda N: (N + 1) ** 2, lambda N: 2 * N + 3)
    N2, tail2 = _q_terms(Q, prec + 4, lambda N: (N + 1) * (N + 2), lambda N: 2 * N + 4)
    exps = sorted(set([n * n for n in range(1, N + 1)] + [n * (n + 1) for n in range(1, N2 + 1)]))
    pw = power_table(q, exps)
    s3 = None
    s4 = None
    for n in range(1, N + 1):
        t = pw[n * n]
        s3 = t if s3 is None else s3 + t
        s4 = (-t if n % 2 else t) if s4 is None else (s4 - t if n % 2 else s4 + t)
    s2 = one(prec + 10)
    for n in range(1, N2 + 1):
        s2 = s2 + pw[n * (n + 1)]
    tail3 = _UP.mul_2exp(tail3, 1)
    th3 = (s3.mul_2exp(1) + 1).add_error(tail3)
    th4 = (s4.mul_2exp(1) + 1).add_error(tail3)
    th2 = (s2.add_error(tail2) * red.q4.with_prec(prec + 10)).mul_2exp(1)
    return th2.round(prec), th3.round(prec), th4.round(prec)


def theta_constants(tau, prec):
    """(theta_2, theta_3, theta_4)(0, tau).  theta_1(0, tau) is identically 0."""
    wp = prec + 10
    tau = ComplexBall.coerce(tau, prec)
    red = reduce_fundamental(tau, wp)
    t2, t3, t4 = theta_constants_reduced(red, wp)
    g = red.g
    if g.is_identity():
        return t2.round(prec), t3.round(prec), t4.round(prec)
    R, S = theta_char_data(g)
    A = theta_A(g, tau.with_prec(wp + 2 * g.bits()))
    base = [None, t2, t3, t4]
    out = []
    for j in (1, 2, 3):
        v = root_of_unity(R[j], 8, wp) * A * base[S[j]]
        out.append(v.round(prec))
    return tuple(out)


def _eta_reduced(red: ReducedTau, prec):
    """eta(tau') from the pentagonal series in e^{2 pi i tau'}."""
    q2 = (red.q * red.q).with_prec(prec + 10)
    Q = q2.mag()
    # exponents n(3n-1)/2 and n(3n+1)/2; gap to the next pair >= 3N+4
    N, tail = _q_terms(Q, prec + 4, lambda N: (N + 1) * (3 * N + 2) // 2, lambda N: 3 * N + 4)
    exps = []
    for n in range(1, N + 1):
        exps += [n * (3 * n - 1) // 2, n * (3 * n + 1) // 2]
    pw = power_table(q2, exps)
    s = one(prec + 10)
    for n in range(1, N + 1):
        t = pw[n * (3 * n - 1) // 2] + pw[n * (3 * n + 1) // 2]
        s = s - t if n % 2 else s + t
    s = s.add_error(_UP.mul_2exp(tail, 1))
    pre = exp_pi_i(red.tau_prime.with_prec(prec + 10) / 12, prec + 10)
    return s * pre


def dedekind_eta(tau, prec):
    """eta(tau) via eta(tau) = eta(tau') / (exp(pi i R/12) sqrt(c tau + d))."""
    wp = prec + 10
    tau = ComplexBall.coerce(tau, prec)
    red = reduce_fundamental(tau, wp)
    v = _eta_reduced(red, wp)
    g = red.g
    if not g.is_identity():
        R = eta_root_of_unity(g)
        den = root_of_unity(R, 24, wp)
        if g.c:
            den = den * sqrt(g.denominator(tau.with_prec(wp + 2 * g.bits())))
        v = v / den
    return v.round(prec)


def j_invariant(tau, prec):
    """Klein j-invariant, evaluated at the reduced tau' (j is invariant)."""
    wp = prec + 20
    red = reduce_fundamental(ComplexBall.coerce(tau, prec), wp)
    t2, t3, t4 = theta_constants_reduced(red, wp)
    a, b, c = t2 ** 8, t3 ** 8, t4 ** 8
    s = a + b + c
    return (32 * s * s * s / (a * b * c)).round(prec)


def discriminant(tau, prec):
    """Delta(tau) = eta(tau)^24, using Delta(tau') = (c tau + d)^12 Delta(tau)."""
    wp = prec + 20
    tau = ComplexBall.coerce(tau, prec)
    red = reduce_fundamental(tau, wp)
    v = _eta_reduced(red, wp) ** 24
    g = red.g
    if g.c:
        v = v / g.denominator(tau.with_prec(wp + 2 * g.bits())) ** 12
    return v.round(prec)


def _g4_g6_reduced(red: ReducedTau, prec):
    t2, t3, t4 = theta_constants_reduced(red, prec)
    a4, b4, c4 = t2 ** 4, t3 ** 4, t4 ** 4
    a8, b8, c8 = a4 * a4, b4 * b4, c4 * c4
    p = pi(prec)
    p2 = p * p
    p4 = p2 * p2
    G4 = (a8 + b8 + c8) * p4 / 90
    G6 = ((b4 + c4) * a8 * (-3) + b8 * b4 + c8 * c4) * (p4 * p2) / 945
    return G4, G6


def eisenstein_reduced_list(red: ReducedTau, n_max, prec):
    """[G_4, G_6, ..., G_{2 n_max}] at tau' via the convolution recurrence."""
    G4, G6 = _g4_g6_reduced(red, prec)
    c = {2: G4 * 3, 3: G6 * 5}
    for n in range(4, n_max + 1):
        s = None
        for m in range(2, n - 1):
            t = c[m] * c[n - m]
            s = t if s is None else s + t
        c[n] = s * 3 / ((2 * n + 1) * (n - 3))
    return [c[n] / (2 * n - 1) for n in range(2, n_max + 1)]


def eisenstein(k2, tau, prec):
    """G_{k2}(tau) = sum over (m, n) != 0 of (m + n tau)^{-k2}, k2 even and >= 4."""
    if not isinstance(k2, int) or k2 < 4 or k2 % 2:
        raise ValueError("weight must be an even integer >= 4")
    wp = prec + 20 + k2
    tau = ComplexBall.coerce(tau, prec)
    red = reduce_fundamental(tau, wp)
    G = eisenstein_reduced_list(red, k2 // 2, wp)[-1]
    g = red.g
    if g.c:
        G = G / g.denominator(tau.with_prec(wp + 2 * g.bits())) ** k2
    return G.round(prec)
