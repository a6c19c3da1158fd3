import mpmath
import pytest
from hypothesis import HealthCheck, settings

from ellball.arith import ComplexBall
from ellball.oracle import _ball_from_mp

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def ref(v, bits=300):
    """A tight ball around an mpmath reference value (computed at >= bits)."""
    return _ball_from_mp(v, 0, bits)


def agrees(ball, v, bits=300):
    """True if the library ball meets a small ball around the reference value v."""
    return ball.overlaps(ref(v, bits))


def cb(re, im=0, prec=53):
    return ComplexBall(re, im, prec)


def to_mpc(b):
    (a, b_), (c, d) = (tuple(int(t) for t in b.mid.real.as_integer_ratio()),
                       tuple(int(t) for t in b.mid.imag.as_integer_ratio()))
    return mpmath.mpc(mpmath.mpf(a) / b_, mpmath.mpf(c) / d)


@pytest.fixture
def mp300():
    with mpmath.workprec(300):
        yield
