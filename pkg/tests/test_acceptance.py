"""Acceptance criteria 1-9.  Each test prints one PASS/FAIL line."""

import math
import random
import time
from decimal import Decimal, localcontext
from fractions import Fraction

import mpmath
import pytest

from ellball.agm import agm, elliptic_e, elliptic_k
from ellball.arith import ComplexBall
from ellball.carlson import legendre_e_inc, legendre_f, legendre_pi, rc, rd, rf, rg, rj, _lam
from ellball.cli import BENCH_ARGS, BENCH_FUNCTIONS, DEFAULT_DIGITS, bits_for_digits, parse_complex, run_bench
from ellball.elementary import exp, exp_pi_i, log, pi, sin_cos, sqrt
from ellball.errors import EllballError
from ellball.modular import dedekind_eta, discriminant, eisenstein, j_invariant, theta_constants
from ellball.oracle import naive_theta_terms, tanh_sinh, trapezoid_periodic
from ellball.theta import jacobi_theta, theta_term_count
from ellball.weierstrass import inverse_wp, lattice_data, wp, wp_sigma, wp_zeta

from _bounds import random_carlson_vars, random_reduced_theta, rf_remainder_ok, rj_full_remainder_ok, theta_remainder_ok


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
    return emit


def _dec(x):
    n, d = x.as_integer_ratio()
    with localcontext() as ctx:
        ctx.prec = 100
        return Decimal(int(n)) / Decimal(int(d))


def _wp_args(prec):
    z = parse_complex("2+2i", prec + 20)
    tau = parse_complex("(1+sqrt(-3))/2", prec + 20)
    return z, tau


# -- 1 ------------------------------------------------------------------------------

def test_criterion_1_weierstrass_reference(report):
    t0 = time.perf_counter()
    z, tau = _wp_args(100)
    v = wp(z, tau, 1, 100)[0]
    elapsed = time.perf_counter() - t0
    with localcontext() as ctx:
        ctx.prec = 60
        mid = str(_dec(v.mid.real).quantize(Decimal(10) ** -25))
    rad = float(v.rad_disc())
    ok = mid == "-13.7772161934928750714214345" and rad <= 1e-25 and elapsed < 1 and v.im.contains(0)
    report(1, ok, f"mid {mid}, radius {rad:.3g}, {elapsed:.3f} s")
    assert ok


# -- 2 ------------------------------------------------------------------------------

def _digit_string(x):
    s = format(_dec(x), ".40e")
    return s.split("e")[0].replace("-", "").replace(".", "")


def _common_digits(x, y):
    """Number of leading significant digits the two decimal expansions share."""
    dx, dy = _digit_string(x), _digit_string(y)
    n = 0
    while n < len(dx) and dx[n] == dy[n]:
        n += 1
    return n


def test_criterion_2_periodicity(report):
    z, tau = _wp_args(100)
    a = wp(z, tau, 1, 100)[0]
    b = wp(z + 5 + tau * 6, tau, 1, 100)[0]
    common = _common_digits(a.mid.real, b.mid.real)
    ok = a.overlaps(b) and common >= 24
    report(2, ok, f"balls intersect: {a.overlaps(b)}, {common} matching leading digits, shifted radius {float(b.rad_disc()):.3g}")
    assert ok


# -- 3 ------------------------------------------------------------------------------

def test_criterion_3_term_counts(report):
    z = ComplexBall("3.14", "2.78", 53)
    tau = ComplexBall("0.07", "0.003", 53)
    naive = naive_theta_terms(z, tau, 53)
    tau_only = theta_term_count(z, tau, 53, reduce_z=False)
    full = theta_term_count(z, tau, 53)
    ok = abs(naive - 3710) <= 0.05 * 3710 and abs(tau_only - 249) <= 0.05 * 249 and full <= 8
    report(3, ok, f"naive {naive}, tau-reduced {tau_only}, full pipeline {full}")
    assert ok


# -- 4 ------------------------------------------------------------------------------

def test_criterion_4_poisson_trapezoid(report):
    m = Fraction(36, 100)

    def g(t):
        s, _ = sin_cos(t, 100)
        return sqrt(1 - s * s * m, 100)

    tr = trapezoid_periodic(g, 16, 100)
    ref = elliptic_e(ComplexBall(m, 0, 100), 100) * 2 / ComplexBall.from_real(pi(100))
    diff = abs(complex((tr - ref).mid))
    nine = _common_digits(tr.mid.real, ref.mid.real) >= 9
    ok = diff < 4.84e-6 and nine
    report(4, ok, f"|trapezoid - 2E/pi| = {diff:.3g}, nine digits agree: {nine}")
    assert ok


# -- 5 ------------------------------------------------------------------------------

def _c(rnd, lo=-3, hi=3):
    return complex(rnd.uniform(lo, hi), rnd.uniform(lo, hi))


def _tau(rnd):
    return complex(rnd.uniform(-2, 2), rnd.uniform(0.15, 2.5))


def _half_plane(rnd):
    return complex(rnd.uniform(0, 3), rnd.uniform(-3, 3))


# name -> (argument sampler, evaluation at precision p)
CASES = {
    "exp": (lambda r: [_c(r)], lambda a, p: [exp(a[0], p)]),
    "log": (lambda r: [_c(r)], lambda a, p: [log(a[0], p)]),
    "sqrt": (lambda r: [_c(r)], lambda a, p: [sqrt(a[0], p, strict=False)]),
    "eta": (lambda r: [_tau(r)], lambda a, p: [dedekind_eta(a[0], p)]),
    "j": (lambda r: [_tau(r)], lambda a, p: [j_invariant(a[0], p)]),
    "delta": (lambda r: [_tau(r)], lambda a, p: [discriminant(a[0], p)]),
    "eisenstein": (lambda r: [_tau(r), r.choice([4, 6, 8, 10])], lambda a, p: [eisenstein(a[1], a[0], p)]),
    "theta_constants": (lambda r: [_tau(r)], lambda a, p: list(theta_constants(a[0], p))),
    "theta": (lambda r: [_c(r), _tau(r)], lambda a, p: [s[k] for s in jacobi_theta(a[0], a[1], 2, p) for k in range(2)]),
    "wp": (lambda r: [_c(r), _tau(r)], lambda a, p: list(wp(a[0], a[1], 2, p))),
    "zeta": (lambda r: [_c(r), _tau(r)], lambda a, p: [wp_zeta(a[0], a[1], p)]),
    "sigma": (lambda r: [_c(r), _tau(r)], lambda a, p: [wp_sigma(a[0], a[1], p)]),
    "wp_inv": (lambda r: [_c(r), _tau(r)], lambda a, p: [inverse_wp(a[0], a[1], p)]),
    "agm": (lambda r: [_c(r), _c(r)], lambda a, p: [agm(a[0], a[1], p)]),
    "elliptic_k": (lambda r: [_c(r)], lambda a, p: [elliptic_k(a[0], p)]),
    "elliptic_e": (lambda r: [_c(r)], lambda a, p: [elliptic_e(a[0], p)]),
    "elliptic_f": (lambda r: [_c(r), _c(r)], lambda a, p: [legendre_f(a[0], a[1], p)]),
    "elliptic_e_inc": (lambda r: [_c(r), _c(r)], lambda a, p: [legendre_e_inc(a[0], a[1], p)]),
    "elliptic_pi_inc": (lambda r: [_c(r, -0.5, 0.5), _c(r, -1, 1), _c(r, -0.5, 0.5)],
                        lambda a, p: [legendre_pi(a[0], a[1], a[2], p)]),
    "rf": (lambda r: [_c(r), _c(r), _c(r)], lambda a, p: [rf(*a, prec=p)]),
    "rc": (lambda r: [_c(r), _c(r)], lambda a, p: [rc(*a, prec=p)]),
    "rd": (lambda r: [_c(r), _c(r), _c(r)], lambda a, p: [rd(*a, prec=p)]),
    "rj": (lambda r: [_half_plane(r), _half_plane(r), _half_plane(r), _half_plane(r)], lambda a, p: [rj(*a, prec=p)]),
    "rg": (lambda r: [_c(r), _c(r), _c(r)], lambda a, p: [rg(*a, prec=p)]),
}


def _nesting(rnd, n):
    """n random inputs spread over CASES; returns (checked, skipped, failures)."""
    names = sorted(CASES)
    checked = skipped = 0
    failures = []
    for i in range(n):
        name = names[i % len(names)]
        sample, fn = CASES[name]
        p = rnd.choice([32, 53, 64, 100])
        raw = sample(rnd)
        try:
            args = [ComplexBall(c.real, c.imag, 2 * p) if isinstance(c, complex) else c for c in raw]
            lo = fn(args, p)
            hi = fn(args, 2 * p)
        except (EllballError, ZeroDivisionError):
            skipped += 1
            continue
        checked += 1
        if not all(a.overlaps(b) for a, b in zip(lo, hi)):
            failures.append((name, raw, p))
    return checked, skipped, failures


def _identities(rnd, n):
    """Functional equations, n random instances each; returns a list of failures."""
    bad = []
    p = 80
    for _ in range(n):
        tau = ComplexBall(*_split(_tau(rnd)), p)
        z = ComplexBall(*_split(_c(rnd, -1, 1)), p)
        # Jacobi identity
        t2, t3, t4 = theta_constants(tau, p)
        if not (t2 ** 4 + t4 ** 4).overlaps(t3 ** 4):
            bad.append(("jacobi", tau))
        # theta quasiperiodicity: theta_3(z + tau) = exp(-pi i (tau + 2z)) theta_3(z)
        a = jacobi_theta(z + tau, tau, 1, p)[2][0]
        b = jacobi_theta(z, tau, 1, p)[2][0] * exp_pi_i(-(tau + z * 2), p)
        if not a.overlaps(b):
            bad.append(("theta quasiperiod", z, tau))
        # Weierstrass differential equation
        try:
            s = wp(z, tau, 2, p)
            L = lattice_data(tau, p)
            if not (s[1] * s[1] - (s[0] * s[0] * s[0] * 4 - L.g2 * s[0] - L.g3)).contains_zero():
                bad.append(("wp ode", z, tau))
        except EllballError:
            pass
        # R_F duplication
        xs = [ComplexBall(*_split(_c(rnd)), p) for _ in range(3)]
        try:
            lam = _lam(*(sqrt(v, p, strict=False) for v in xs))
            if not rf(*xs, prec=p).overlaps(rf(*((v + lam).mul_2exp(-2) for v in xs), prec=p)):
                bad.append(("rf duplication", xs))
        except EllballError:
            pass
        # Legendre relation
        m = ComplexBall(*_split(_c(rnd, -2, 2)), p)
        try:
            K, Kc = elliptic_k(m, p), elliptic_k(1 - m, p)
            E, Ec = elliptic_e(m, p), elliptic_e(1 - m, p)
            if not (E * Kc + Ec * K - K * Kc).overlaps(ComplexBall.from_real(pi(p).mul_2exp(-1))):
                bad.append(("legendre relation", m))
        except EllballError:
            pass
        # F quasiperiodicity
        phi = ComplexBall(rnd.uniform(-1.5, 1.5), rnd.uniform(-0.5, 0.5), p)
        k = rnd.randint(-3, 3)
        try:
            lhs = legendre_f(phi + pi(p) * k, m, p)
            rhs = elliptic_k(m, p) * (2 * k) + legendre_f(phi, m, p)
            if not lhs.overlaps(rhs):
                bad.append(("F quasiperiod", phi, m, k))
        except EllballError:
            pass
    return bad


def _split(c):
    return c.real, c.imag


def test_criterion_5_containment(report):
    rnd = random.Random(20240505)
    checked, skipped, failures = _nesting(rnd, 10 ** 4)
    bad = _identities(rnd, 200)
    ok = not failures and not bad and checked >= 9000
    report(5, ok, f"{checked} nested pairs ({skipped} domain errors skipped), {len(failures)} disjoint, "
                  f"{len(bad)} identity failures over 6 x 200 instances")
    assert ok, (failures[:5], bad[:5])


# -- 6 ------------------------------------------------------------------------------

def test_criterion_6_cross_algorithm(report):
    p = 128
    worst = 0.0
    ok = True
    for m in (Fraction(1, 10), Fraction(36, 100), Fraction(9, 10), (Fraction(1, 2), Fraction(1, 5))):
        re, im = m if isinstance(m, tuple) else (m, 0)
        mb = ComplexBall(re, im, p)
        K1 = elliptic_k(mb, p)
        K2 = rf(ComplexBall(0, 0, p), 1 - mb, ComplexBall(1, 0, p), p)
        with mpmath.workprec(p + 40):
            mm = mpmath.mpc(mpmath.mpf(re.numerator) / re.denominator, mpmath.mpf(Fraction(im).numerator) / Fraction(im).denominator)

            def f(u):
                # t = (pi/2) u maps [0, 1] onto [0, pi/2]
                return mpmath.pi / 2 / mpmath.sqrt(1 - mm * mpmath.sin(mpmath.pi / 2 * u) ** 2)

            K3 = tanh_sinh(f, 0, 1, level=9, prec=p)
        d = max(_cabs(K1, K2), _cabs(K1, K3), _cabs(K2, K3))
        worst = max(worst, d)
        ok = ok and d < 1e-25 and K1.overlaps(K2)
    report(6, ok, f"largest pairwise midpoint difference {worst:.3g}")
    assert ok


def _cabs(a, b):
    with localcontext() as ctx:
        ctx.prec = 100
        dr = _dec(a.mid.real) - _dec(b.mid.real)
        di = _dec(a.mid.imag) - _dec(b.mid.imag)
        return float((dr * dr + di * di).sqrt())


# -- 7 ------------------------------------------------------------------------------

def test_criterion_7_truncation_bounds(report):
    rnd = random.Random(77)
    bad = []
    for _ in range(1000):
        z, tau = random_reduced_theta(rnd)
        ok, info = theta_remainder_ok(z, tau, rnd.randint(1, 4), rnd.choice([53, 128, 333, 1000]))
        if not ok:
            bad.append(("theta", info))
    for _ in range(1000):
        X, Y = random_carlson_vars(rnd, 2)
        ok, info = rf_remainder_ok(X, Y, rnd.randint(2, 30))
        if not ok:
            bad.append(("rf", info))
    for _ in range(1000):
        X, Y, Z = random_carlson_vars(rnd, 3, 0.3)
        ok, info = rj_full_remainder_ok(X, Y, Z, rnd.randint(2, 20))
        if not ok:
            bad.append(("rj", info))
    ok = not bad
    report(7, ok, f"1000 theta, 1000 R_F, 1000 R_J samples; {len(bad)} bound violations")
    assert ok, bad[:5]


# -- 8 and 9 share one full benchmark sweep --------------------------------------------

@pytest.fixture(scope="module")
def sweep():
    t0 = time.perf_counter()
    rows = run_bench(list(BENCH_FUNCTIONS), list(DEFAULT_DIGITS), reps=5)
    return {(r[0], r[1]): r[2] for r in rows}, time.perf_counter() - t0


def test_criterion_8_performance_trend(report, sweep):
    table, total = sweep
    t2, t4 = table[("rf", 100)], table[("rf", 10000)]
    slope = math.log(t4 / t2) / math.log(100)
    prec = bits_for_digits(10000)
    x, y, z = (parse_complex(BENCH_ARGS[c], prec + 10) for c in "xyz")
    t0 = time.perf_counter()
    rf(x, y, z, prec, B=8)
    fixed = time.perf_counter() - t0
    speedup = fixed / t4
    ok = slope <= 1.8 and speedup >= 2 and total < 30 * 60
    report(8, ok, f"R_F slope {slope:.2f}, dynamic vs B=8 speedup {speedup:.1f}x, full sweep {total / 60:.1f} min")
    assert ok


def test_criterion_9_table_ordering(report, sweep):
    table, _ = sweep
    names = ["elliptic_k", "theta_constants", "theta", "elliptic_pi"]
    times = [table[(n, 1000)] for n in names]
    ok = all(a < b for a, b in zip(times, times[1:]))
    report(9, ok, ", ".join(f"{n} {t:.4f} s" for n, t in zip(names, times)))
    assert ok
