import math
import random

import mpmath
import pytest
from hypothesis import given, strategies as st

from ellball.arith import ComplexBall
from ellball.elementary import exp_pi_i, sqrt
from ellball.errors import DomainError
from ellball.modular import (
    ModularTransform, dedekind_eta, discriminant, eisenstein, eta_root_of_unity,
    eta_root_of_unity_dedekind, j_invariant, reduce_fundamental, theta_constants,
)
from ellball.oracle import eisenstein_lattice_sum

from conftest import agrees



def rho(prec=120):
    return (1 + sqrt(ComplexBall(-3, 0, prec))) / 2


def eta_series(tau, terms=100):
    """Direct pentagonal series, no reduction (mpmath)."""
    q = mpmath.exp(2j * mpmath.pi * tau)
    s = 1
    for n in range(1, terms):
        t = q ** (n * (3 * n - 1) // 2) + q ** (n * (3 * n + 1) // 2)
        s += -t if n % 2 else t
    return mpmath.exp(1j * mpmath.pi * tau / 12) * s


def theta3_series(tau, terms=60):
    q = mpmath.exp(1j * mpmath.pi * tau)
    return 1 + 2 * sum(q ** (n * n) for n in range(1, terms))


def random_g(rnd, bound=10):
    while True:
        a, b, c, d = (rnd.randint(-bound, bound) for _ in range(4))
        if a * d - b * c == 1:
            return ModularTransform(a, b, c, d)


# -- reduction -------------------------------------------------------------------


def test_reduce_identity():
    r = reduce_fundamental(ComplexBall(0, 1, 53), 53)
    assert r.g.is_identity() and r.tau_prime.contains(ComplexBall(0, 1, 53))


def test_reduce_translation():
    r = reduce_fundamental(ComplexBall(5, 1, 53), 53)
    assert r.g.astuple() == (1, -5, 0, 1)
    assert r.tau_prime.overlaps(ComplexBall(0, 1, 53))


def test_reduce_small_imag():
    r = reduce_fundamental(ComplexBall("0.07", "0.003", 53), 53)
    # e^{-pi sqrt 3} bound, stated for the nome exp(2 pi i tau')
    assert (r.q * r.q).mag() <= 0.00434
    t = r.tau_prime
    assert abs(t.mid.real) <= 0.5 + 2 ** -16 and abs(t.mid) >= 1 - 2 ** -16


def test_reduce_rejects_lower_half_plane():
    with pytest.raises(DomainError):
        reduce_fundamental(ComplexBall(0, -1, 53), 53)


@given(st.floats(-50, 50), st.floats(1e-6, 50))
def test_reduce_lands_in_domain(x, y):
    r = reduce_fundamental(ComplexBall(x, y, 80), 80)
    t = r.tau_prime.mid
    assert abs(t.real) <= 0.5 + 2 ** -15 and abs(t) >= 1 - 2 ** -15
    assert r.g.a * r.g.d - r.g.b * r.g.c == 1
    assert r.g.apply(ComplexBall(x, y, 200)).overlaps(r.tau_prime)


# -- eta -----------------------------------------------------------------------------


def test_eta_i(mp300):
    v = dedekind_eta(ComplexBall(0, 1, 100), 100)
    assert agrees(v, eta_series(mpmath.mpc(0, 1)))
    # closed form Gamma(1/4) / (2 pi^{3/4})
    assert agrees(v, mpmath.gamma(0.25) / (2 * mpmath.pi ** 0.75))


def test_eta_translation():
    t = ComplexBall(0.5, 2, 100)
    lhs = dedekind_eta(t + 1, 100)
    rhs = dedekind_eta(t, 100) * exp_pi_i(ComplexBall(1, 0, 100) / 12, 100)
    assert lhs.overlaps(rhs)


def test_eta_inversion(mp300):
    t = ComplexBall(0, 2, 100)
    lhs = dedekind_eta(-1 / t, 100)
    rhs = sqrt(t.div_i()) * dedekind_eta(t, 100)
    assert lhs.overlaps(rhs)
    assert agrees(lhs, eta_series(-1 / mpmath.mpc(0, 2), 400))


def test_eta_root_examples():
    assert eta_root_of_unity(ModularTransform.identity()) == 0
    assert eta_root_of_unity(ModularTransform(1, 1, 0, 1)) == 1
    R = eta_root_of_unity(ModularTransform(0, -1, 1, 0))
    with mpmath.workprec(120):
        tau = mpmath.mpc(0, 2)
        ratio = eta_series(-1 / tau, 400) / eta_series(tau) / mpmath.sqrt(tau)
        assert abs(ratio - mpmath.exp(1j * mpmath.pi * R / 12)) < 1e-25


def test_eta_root_matches_numeric_ratio():
    rnd = random.Random(7)
    with mpmath.workprec(80):
        for _ in range(300):
            g = random_g(rnd, 10).normalized()
            tau = mpmath.mpc(rnd.uniform(-0.5, 0.5), rnd.uniform(0.9, 2))
            gt = (g.a * tau + g.b) / (g.c * tau + g.d)
            if g.c == 0:
                continue
            ratio = mpmath.eta(gt) / mpmath.eta(tau) / mpmath.sqrt(g.c * tau + g.d)
            R = eta_root_of_unity(g)
            assert abs(ratio / mpmath.exp(1j * mpmath.pi * R / 12) - 1) < 1e-10
            assert R == eta_root_of_unity_dedekind(g)


# -- theta constants, j, Delta, G_2k ------------------------------------------------------


def test_theta3_i(mp300):
    t2, t3, t4 = theta_constants(ComplexBall(0, 1, 100), 100)
    assert agrees(t3, theta3_series(mpmath.mpc(0, 1)))
    assert agrees(t3, mpmath.pi ** 0.25 / mpmath.gamma(0.75))
    assert t2.overlaps(t4)


@given(st.floats(-0.5, 0.5), st.floats(0.87, 3))
def test_jacobi_identity(x, y):
    t2, t3, t4 = theta_constants(ComplexBall(x, y, 100), 100)
    assert (t2 ** 4 + t4 ** 4).overlaps(t3 ** 4)


def test_theta_constants_small_tau(mp300):
    tau = ComplexBall("0.07", "0.003", 120)
    t2, t3, t4 = theta_constants(tau, 120)
    tm = mpmath.mpc("0.07", "0.003")
    assert agrees(t3, mpmath.jtheta(3, 0, mpmath.exp(1j * mpmath.pi * tm)))
    assert agrees(t2, mpmath.jtheta(2, 0, mpmath.exp(1j * mpmath.pi * tm)))


def test_j_special_values():
    assert j_invariant(ComplexBall(0, 1, 100), 100).contains(1728)
    assert j_invariant(rho(), 100).contains_zero()


def test_j_translation_identical():
    t = ComplexBall(0.3, 1.2, 100)
    a, b = j_invariant(t, 100), j_invariant(t + 1, 100)
    assert a.overlaps(b)


def test_j_invariance_random():
    rnd = random.Random(11)
    for _ in range(1000):
        g = random_g(rnd, 10)
        tau = ComplexBall(rnd.uniform(-2, 2), rnd.uniform(0.05, 3), 64)
        if g.c * g.c * tau.mid.imag ** 2 > 1e6:
            continue
        gt = g.apply(tau.with_prec(200)).round(64)
        assert j_invariant(gt, 64).overlaps(j_invariant(tau, 64))


def test_discriminant_laws():
    t = ComplexBall(0, 2, 100)
    assert discriminant(t + 1, 100).overlaps(discriminant(t, 100))
    assert discriminant(ComplexBall(0, 1, 100), 100).overlaps(dedekind_eta(ComplexBall(0, 1, 100), 100) ** 24)
    t = ComplexBall(1, 2, 100)
    assert (discriminant(-1 / t, 100) / discriminant(t, 100)).overlaps(t ** 12)


def test_g4_lattice_sum():
    tau = ComplexBall(0, 2, 60)
    M = 100
    with mpmath.workprec(60):
        s = eisenstein_lattice_sum(4, mpmath.mpc(0, 2), M, 53)
    # tail of sum |m + n tau|^-4 over the complement of the box, about pi / (Im(tau) M^2)
    tol = 3 * math.pi / (2 * M * M)
    v = eisenstein(4, tau, 60)
    assert abs(complex(v.mid) - complex(s)) < tol


def test_vanishing_eisenstein_values():
    # G_4 vanishes at rho and G_6 at i; G_6(rho) does not vanish
    assert eisenstein(4, rho(), 100).contains_zero()
    assert eisenstein(6, ComplexBall(0, 1, 100), 100).contains_zero()
    v = eisenstein(6, rho(60), 60)
    assert not v.contains_zero()
    with mpmath.workprec(60):
        s = eisenstein_lattice_sum(6, (1 + mpmath.sqrt(-3)) / 2, 60, 53)
    assert abs(complex(v.mid) - complex(s)) < 1e-5


def test_g4_weight_law():
    t = ComplexBall(0, 1.5, 100)
    assert eisenstein(4, -1 / t, 100).overlaps(t ** 4 * eisenstein(4, t, 100))


@pytest.mark.parametrize("k", [8, 10, 12])
def test_higher_eisenstein_vs_lattice(k):
    tau = ComplexBall(0.2, 1.1, 60)
    with mpmath.workprec(60):
        s = eisenstein_lattice_sum(k, mpmath.mpc(0.2, 1.1), 30, 53)
    # the box sum misses about 2 pi / (Im(tau) (k - 2) M^(k-2))
    tol = 2 * math.pi / (1.1 * (k - 2) * 30 ** (k - 2))
    assert abs(complex(eisenstein(k, tau, 60).mid) - complex(s)) < tol


def test_eisenstein_bad_weight():
    with pytest.raises(ValueError):
        eisenstein(5, ComplexBall(0, 1, 53), 53)
