import random
from fractions import Fraction

import mpmath
from gmpy2 import mpfr
import pytest
from hypothesis import given, strategies as st

from ellball.agm import (
    _TAYLOR, _agm_tail, _root, agm, agm1, agm_derivative, agm_series_coeffs, elliptic_e, elliptic_k,
    elliptic_k_derivative,
)
from ellball.arith import ComplexBall, RealBall
from ellball.elementary import pi, sin_cos, sqrt
from ellball.errors import BranchCutError, DomainError, PoleError
from ellball.oracle import agm_real_oracle, trapezoid_periodic

from conftest import agrees


def test_fixed_point():
    assert agm1(ComplexBall(1, 0, 53)).contains(1)


def test_degenerate_zero():
    v = agm1(ComplexBall(0, 0, 53))
    assert v.is_exact() and v.contains(0)


def test_real_oracle_256():
    v = agm1(1 / sqrt(ComplexBall(2, 0, 300)), 256)
    with mpmath.workprec(300):
        a, spread = agm_real_oracle(1, 1 / mpmath.sqrt(2), 64, 256)
        assert spread < mpmath.mpf(2) ** -280
        assert agrees(v, a, 280)
    assert v.rad_re < 2.0 ** -250


def test_branch_cut_errors():
    with pytest.raises(BranchCutError):
        agm1(ComplexBall(RealBall(-1, 0, 53), RealBall(0, Fraction(1, 100), 53), 53))
    with pytest.raises(BranchCutError):
        agm1(ComplexBall(-2, 0, 53))


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_agm1_matches_mpmath(x, y):
    # mpmath.agm takes the principal sqrt(ab) at every step, which agrees
    # with the right choice only in the right half plane
    if x <= 0.01:
        return
    with mpmath.workprec(200):
        assert agrees(agm1(ComplexBall(x, y, 120), 120), mpmath.agm(1, mpmath.mpc(x, y)), 200)


def _right_choice_agm(z):
    a, b = mpmath.mpc(1), mpmath.mpc(z)
    for _ in range(60):
        g = mpmath.sqrt(a * b)
        if abs(a - g) > abs(a + g) or (abs(a - g) == abs(a + g) and mpmath.im(g / a) < 0):
            g = -g
        a, b = (a + b) / 2, g
    return a


@given(st.floats(-10, 10), st.floats(-10, 10))
def test_agm1_matches_right_choice(x, y):
    # stay away from the cut, where the iteration converges slowly
    if abs(y) < 1e-6 and x <= 0 or abs(complex(x, y)) < 1e-6:
        return
    with mpmath.workprec(200):
        assert agrees(agm1(ComplexBall(x, y, 120), 120), _right_choice_agm(mpmath.mpc(x, y)), 200)


def test_agm1_continuous_where_mpmath_jumps():
    # mpmath.agm jumps between -1.30+i and -1.35+i
    vals = [complex(agm1(ComplexBall(-1.3 - k / 1000, 1, 80)).mid) for k in range(51)]
    assert max(abs(u - v) for u, v in zip(vals, vals[1:])) < 1e-2


@given(st.floats(0.01, 10), st.floats(-10, 10))
def test_one_step_invariance(x, y):
    z = ComplexBall(x, y, 100)
    a = agm1(z, 100)
    z1 = sqrt(z) * 2 / (z + 1)
    b = agm1(z1, 100) * (z + 1) / 2
    assert a.overlaps(b)


def test_brute_force_containment():
    rnd = random.Random(4)
    for _ in range(1000):
        z = ComplexBall(rnd.uniform(0.01, 5), rnd.uniform(-5, 5), 64)
        a, b = ComplexBall(1, 0, 128), z.with_prec(128)
        for _ in range(200):
            a, b = (a + b).mul_2exp(-1), _root(a, b, 128)
            if (a - b).mag() < 2.0 ** -120:
                break
        d = (a - b).mag()
        brute = a.add_error(d, d)
        assert agm1(z, 64).overlaps(brute)


def test_tail_bound_soundness():
    # coefficients of pi/(4 K(t^2)) = 1/(2 2F1(1/2, 1/2, 1, t^2)) from an mpmath Taylor expansion
    with mpmath.workprec(200):
        coeffs = mpmath.taylor(lambda s: 1 / (2 * mpmath.hyp2f1(0.5, 0.5, 1, s)), 0, 60)
    for (num, den), c in zip(_TAYLOR, coeffs):
        assert abs(c - mpmath.mpf(num) / den) < mpmath.mpf(10) ** -50
    rnd = random.Random(8)
    for _ in range(200):
        r = rnd.uniform(0, 0.5)
        a = rnd.uniform(0, 2 * mpmath.pi)
        t2 = (r * mpmath.expjpi(a / mpmath.pi)) ** 2
        rest = abs(sum(coeffs[k] * t2 ** k for k in range(5, 61)))
        assert rest <= mpmath.mpf(str(_agm_tail(mpfr(r))))


def test_agm_homogeneous():
    x, y = ComplexBall(3, 1, 100), ComplexBall(1, 2, 100)
    with mpmath.workprec(200):
        assert agrees(agm(x, y, 100), mpmath.agm(mpmath.mpc(3, 1), mpmath.mpc(1, 2)), 200)


def test_k_e_special():
    p2 = pi(100).mul_2exp(-1)
    assert elliptic_k(ComplexBall(0, 0, 100), 100).overlaps(ComplexBall.from_real(p2))
    assert elliptic_e(ComplexBall(0, 0, 100), 100).overlaps(ComplexBall.from_real(p2))
    assert elliptic_e(ComplexBall(1, 0, 100), 100).contains(1)
    with pytest.raises(PoleError):
        elliptic_k(ComplexBall(1, 0, 53))


def test_k_straddling_cut():
    with pytest.raises(BranchCutError):
        elliptic_k(ComplexBall(RealBall(2, 0, 53), RealBall(0, Fraction(1, 100), 53), 53))


def test_poisson_trapezoid():
    m = Fraction(36, 100)

    def g(t):
        s, _ = sin_cos(t, 80)
        return sqrt(1 - s * s * m, 80)

    tr = trapezoid_periodic(g, 16, 80)
    ref = elliptic_e(ComplexBall(m, 0, 80), 80) * 2 / ComplexBall.from_real(pi(80))
    assert abs(complex((tr - ref).mid)) < 4.84e-6


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_k_e_mpmath(x, y):
    if y == 0 and x >= 1:
        return
    with mpmath.workprec(200):
        m = mpmath.mpc(x, y)
        assert agrees(elliptic_k(ComplexBall(x, y, 100), 100), mpmath.ellipk(m), 200)
        assert agrees(elliptic_e(ComplexBall(x, y, 100), 100), mpmath.ellipe(m), 200)


@given(st.floats(0.01, 0.99))
def test_legendre_relation(m):
    p = 100
    K, Kc = elliptic_k(ComplexBall(m, 0, p), p), elliptic_k(1 - ComplexBall(m, 0, p), p)
    E, Ec = elliptic_e(ComplexBall(m, 0, p), p), elliptic_e(1 - ComplexBall(m, 0, p), p)
    assert (E * Kc + Ec * K - K * Kc).overlaps(ComplexBall.from_real(pi(p).mul_2exp(-1)))


def test_derivative_at_one():
    M, dM = agm_derivative(ComplexBall(1, 0, 100), 100)
    assert dM.contains(Fraction(1, 2)) or dM.overlaps(ComplexBall(Fraction(1, 2), 0, 100))
    assert M.overlaps(ComplexBall(1, 0, 100))
    assert agm_series_coeffs(ComplexBall(1, 0, 100), 1, 100)[1].overlaps(ComplexBall(Fraction(-1, 2), 0, 100))


def test_derivative_consistency():
    z = ComplexBall(2, 1, 100)
    M, dM = agm_derivative(z, 100)
    assert M.overlaps(agm1(z, 100))
    with mpmath.workprec(200):
        d = mpmath.diff(lambda t: mpmath.agm(1, t), mpmath.mpc(2, 1))
        assert agrees(dM, d, 150)


def test_k_derivative_finite_difference():
    p = 120
    m = ComplexBall(Fraction(1, 4), 0, p)
    _, dK = elliptic_k_derivative(m, p)
    h = ComplexBall(Fraction(1, 2 ** 30), 0, p)
    fd = (elliptic_k(m + h, p) - elliptic_k(m - h, p)) / (h * 2)
    err = 2.0 ** -55
    assert fd.add_error(err, err).overlaps(dK)


def test_series_z1_recurrence():
    c = agm_series_coeffs(ComplexBall(1, 0, 100), 6, 100)
    assert c[0].contains(1)
    assert c[2].overlaps((c[1] * 7 + c[0]) / -8)
    with mpmath.workprec(200):
        ref = mpmath.taylor(lambda t: 1 / mpmath.agm(1, t), 1, 6)
    for a, b in zip(c, ref):
        assert agrees(a, b, 150)


def test_series_generic():
    z = ComplexBall(2, 0, 100)
    c = agm_series_coeffs(z, 5, 100)
    with mpmath.workprec(200):
        ref = mpmath.taylor(lambda t: 1 / mpmath.agm(1, t), 2, 5)
    for a, b in zip(c, ref):
        assert agrees(a, b, 150)
    M, dM = agm_derivative(z, 100)
    assert c[0].overlaps(1 / M) and c[1].overlaps(-(dM / (M * M)))
    assert len(agm_series_coeffs(z, 1, 100)) == 2


def test_series_divided_differences():
    # orders 2 and 3 against divided differences of 1/agm1 around z = 2
    p = 200
    z = ComplexBall(2, 0, p)
    c = agm_series_coeffs(z, 3, 100)
    h = Fraction(1, 2 ** 12)
    f = {k: 1 / agm1(z + h * k, p) for k in (-2, -1, 0, 1, 2)}
    c2 = (f[1] - f[0] * 2 + f[-1]) / (2 * h * h)
    c3 = (f[2] - f[1] * 2 + f[-1] * 2 - f[-2]) / (12 * h ** 3)
    assert abs(complex((c2 - c[2]).mid)) < 1e-6
    assert abs(complex((c3 - c[3]).mid)) < 1e-5


def test_series_singular():
    with pytest.raises(DomainError):
        agm_series_coeffs(ComplexBall(-1, 0, 53), 3)


def test_precision_nesting():
    z = ComplexBall(Fraction(3, 7), Fraction(2, 9), 200)
    lo, hi = agm1(z, 100), agm1(z, 200)
    assert lo.overlaps(hi)
