"""Command-line evaluator and benchmark harness.

    ellball eval wp "2+2i" --tau "(1+sqrt(-3))/2" --bits 100
    ellball eval rf 4 4 4 --digits 20 --json
    ellball bench --functions rf,elliptic_k --digits 10,100,1000 --csv out.csv

Exit status: 0 on success, 1 for a domain or convergence error in the
evaluation itself, 2 for usage errors (unknown function, bad literal).
"""

from __future__ import annotations

import argparse
import csv
import decimal
import json
import math
import re
import statistics
import sys
import time
from fractions import Fraction
from importlib import import_module

from .arith import ComplexBall, RealBall, format_complex
from .errors import EllballError
from .series import BallSeries

# the package namespace re-exports functions under some module names (agm),
# so fetch the submodules themselves
_agm, _carlson, _el, _mod, _theta, _wp = (
    import_module(f"{__package__}.{m}") for m in ("agm", "carlson", "elementary", "modular", "theta", "weierstrass")
)


class UsageError(Exception):
    pass


# -- complex literals -------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|(sqrt|pi|[iIj])|(.))")


def _tokenize(text):
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        num, word, ch = m.groups()
        if num is not None:
            out.append(("num", num))
        elif word is not None:
            out.append(("word", "i" if word in "iIj" else word))
        elif ch.strip():
            if ch not in "+-*/()":
                raise UsageError(f"unexpected character {ch!r} in {text!r}")
            out.append(("op", ch))
        pos = m.end()
    return out


class _Parser:
    """Recursive descent over the literal grammar documented in the README."""

    def __init__(self, text, prec):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.prec = prec

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None)

    def take(self, kind=None, val=None):
        k, v = self.peek()
        if k is None or (kind and k != kind) or (val and v != val):
            raise UsageError(f"malformed complex literal {self.text!r}")
        self.i += 1
        return v

    def parse(self):
        if not self.toks:
            raise UsageError("empty complex literal")
        v = self.expr()
        if self.i != len(self.toks):
            raise UsageError(f"malformed complex literal {self.text!r}")
        return v

    def expr(self):
        v = self.term()
        while self.peek() in (("op", "+"), ("op", "-")):
            op = self.take()
            w = self.term()
            v = v + w if op == "+" else v - w
        return v

    def term(self):
        v = self.unary()
        while True:
            k, t = self.peek()
            if (k, t) in (("op", "*"), ("op", "/")):
                self.take()
                w = self.unary()
                if t == "*":
                    v = v * w
                else:
                    if w.contains_zero():
                        raise UsageError(f"division by zero in {self.text!r}")
                    v = v / w
            elif k in ("num", "word") or (k, t) == ("op", "("):
                # juxtaposition, as in "3i", "2pi" or "sqrt(2)i"
                v = v * self.postfix()
            else:
                return v

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return -self.unary()
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.postfix()

    def postfix(self):
        v = self.primary()
        while self.peek() == ("word", "i"):
            self.take()
            v = v.mul_i()
        return v

    def primary(self):
        k, t = self.peek()
        p = self.prec
        if k == "num":
            self.take()
            return ComplexBall.coerce(Fraction(t), p)
        if k == "word":
            self.take()
            if t == "i":
                return ComplexBall(0, 1, p)
            if t == "pi":
                return ComplexBall.from_real(_el.pi(p))
            self.take("op", "(")
            v = self.expr()
            self.take("op", ")")
            return _el.sqrt(v, p, strict=False)
        if (k, t) == ("op", "("):
            self.take()
            v = self.expr()
            self.take("op", ")")
            return v
        raise UsageError(f"malformed complex literal {self.text!r}")


def parse_complex(text, prec=53) -> ComplexBall:
    """Parse a literal such as "2+2i", "(1+sqrt(-3))/2" or "sqrt(7)+i/sqrt(11)"."""
    return _Parser(str(text), prec).parse()


# -- function table ---------------------------------------------------------------

def _theta4(z, tau, p, D):
    return list(zip(("theta1", "theta2", "theta3", "theta4"), _theta.jacobi_theta(z, tau, D, p)))


def _lattice(tau, p, D):
    L = _wp.lattice_data(tau, p)
    return [(k, getattr(L, k)) for k in ("g2", "g3", "e1", "e2", "e3")]


def _wp_pair(z, tau, p, D):
    s = _wp.wp(z, tau, 2, p)
    return [("wp", s[0]), ("wp'", s[1])]


def _agm_deriv(z, p, D):
    M, dM = _agm.agm_derivative(z, p)
    return [("M", M), ("M'", dM)]


# name -> (parameter names, callable(*args, prec, D)); a parameter called tau may come from --tau
FUNCTIONS = {
    "exp": (("x",), lambda x, p, D: _el.exp(x, p)),
    "log": (("x",), lambda x, p, D: _el.log(x, p)),
    "sqrt": (("x",), lambda x, p, D: _el.sqrt(x, p)),
    "eta": (("tau",), lambda t, p, D: _mod.dedekind_eta(t, p)),
    "j": (("tau",), lambda t, p, D: _mod.j_invariant(t, p)),
    "delta": (("tau",), lambda t, p, D: _mod.discriminant(t, p)),
    "eisenstein": (("k", "tau"), lambda k, t, p, D: _mod.eisenstein(_int_arg(k), t, p)),
    "theta_constants": (
        ("tau",),
        lambda t, p, D: list(zip(("theta2", "theta3", "theta4"), _mod.theta_constants(t, p))),
    ),
    "theta": (("z", "tau"), _theta4),
    "wp": (("z", "tau"), lambda z, t, p, D: _wp.wp(z, t, D, p)),
    "wp_prime": (("z", "tau"), _wp_pair),
    "zeta": (("z", "tau"), lambda z, t, p, D: _wp.wp_zeta(z, t, p)),
    "sigma": (("z", "tau"), lambda z, t, p, D: _wp.wp_sigma(z, t, p)),
    "wp_inv": (("w", "tau"), lambda w, t, p, D: _wp.inverse_wp(w, t, p)),
    "lattice": (("tau",), _lattice),
    "agm1": (("z",), lambda z, p, D: _agm.agm1(z, p)),
    "agm": (("x", "y"), lambda x, y, p, D: _agm.agm(x, y, p)),
    "agm_derivative": (("z",), _agm_deriv),
    "elliptic_k": (("m",), lambda m, p, D: _agm.elliptic_k(m, p)),
    "elliptic_e": (("m",), lambda m, p, D: _agm.elliptic_e(m, p)),
    "elliptic_pi": (("n", "m"), lambda n, m, p, D: _carlson.elliptic_pi(n, m, p)),
    "elliptic_f": (("phi", "m"), lambda f, m, p, D: _carlson.legendre_f(f, m, p)),
    "elliptic_e_inc": (("phi", "m"), lambda f, m, p, D: _carlson.legendre_e_inc(f, m, p)),
    "elliptic_pi_inc": (("n", "phi", "m"), lambda n, f, m, p, D: _carlson.legendre_pi(n, f, m, p)),
    "rf": (("x", "y", "z"), lambda x, y, z, p, D: _carlson.rf(x, y, z, p)),
    "rg": (("x", "y", "z"), lambda x, y, z, p, D: _carlson.rg(x, y, z, p)),
    "rd": (("x", "y", "z"), lambda x, y, z, p, D: _carlson.rd(x, y, z, p)),
    "rj": (("x", "y", "z", "p"), lambda x, y, z, t, p, D: _carlson.rj(x, y, z, t, p)),
    "rc": (("x", "y"), lambda x, y, p, D: _carlson.rc(x, y, p)),
}

# functions that honour --deriv with a series result
SERIES_FUNCTIONS = {"theta", "wp"}


def _int_arg(k: ComplexBall):
    if not (k.is_exact() and k.is_real() and k.mid.real == int(k.mid.real)):
        raise UsageError("the weight must be an integer")
    return int(k.mid.real)


def bits_for_digits(d):
    return max(2, math.ceil(d * math.log2(10)))


def evaluate(name, args, prec, D=1, tau=None):
    """Evaluate a named function; returns a list of (label, ComplexBall)."""
    if name not in FUNCTIONS:
        raise UsageError(f"unknown function {name!r}; known: {', '.join(sorted(FUNCTIONS))}")
    params, fn = FUNCTIONS[name]
    args = list(args)
    if tau is not None:
        if "tau" not in params:
            raise UsageError(f"{name} takes no tau argument")
        args.append(tau)
    if len(args) != len(params):
        raise UsageError(f"{name} expects {len(params)} argument(s): {' '.join(params)}")
    if D < 1:
        raise UsageError("--deriv must be at least 1")
    if D > 1 and name not in SERIES_FUNCTIONS:
        raise UsageError(f"--deriv is supported for: {', '.join(sorted(SERIES_FUNCTIONS))}")
    wp = prec + 10
    vals = [a if isinstance(a, ComplexBall) else parse_complex(a, wp) for a in args]
    res = fn(*vals, prec, D)
    if not isinstance(res, list):
        res = [(name, res)]
    out = []
    for label, v in res:
        if isinstance(v, BallSeries):
            if D == 1:
                out.append((label, v[0]))
            else:
                for r, d in enumerate(v.derivatives()):
                    out.append((label + "'" * r if r < 4 else f"{label}^({r})", d))
        elif isinstance(v, RealBall):
            out.append((label, ComplexBall.from_real(v)))
        else:
            out.append((label, v))
    return out


def _digits_str(x, prec):
    # enough digits that parsing the string back at prec bits recovers x exactly
    if not x:
        return "0"
    n, d = x.as_integer_ratio()
    ctx = decimal.Context(prec=int(prec * 0.30103) + 3, Emax=10**9, Emin=-10**9)
    return format(ctx.divide(decimal.Decimal(int(n)), decimal.Decimal(int(d))), "e")


def _rad_str(r):
    # rounded upward so the printed radius still covers the ball
    if not r:
        return "0"
    n, d = r.as_integer_ratio()
    ctx = decimal.Context(prec=6, rounding=decimal.ROUND_CEILING, Emax=10**9, Emin=-10**9)
    return format(ctx.divide(decimal.Decimal(int(n)), decimal.Decimal(int(d))), "e")


def ball_json(z: ComplexBall, prec):
    return {
        "mid_re": _digits_str(z.mid.real, prec),
        "mid_im": _digits_str(z.mid.imag, prec),
        "rad_re": _rad_str(z.rad_re),
        "rad_im": _rad_str(z.rad_im),
        "bits": prec,
    }


def cmd_eval(ns):
    if ns.bits is not None:
        prec = ns.bits
    elif ns.digits is not None:
        prec = bits_for_digits(ns.digits)
    else:
        prec = 53
    if prec < 2:
        raise UsageError("precision must be at least 2 bits")
    res = evaluate(ns.function, ns.args, prec, ns.deriv, ns.tau)
    if ns.json:
        objs = [dict(name=label, **ball_json(v, prec)) for label, v in res]
        print(json.dumps(objs[0] if len(objs) == 1 else objs))
    else:
        digits = ns.digits
        for label, v in res:
            text = format_complex(v, digits)
            print(text if len(res) == 1 else f"{label}: {text}")
    return 0


# -- benchmark ----------------------------------------------------------------------

BENCH_ARGS = {
    "x": "sqrt(2)+sqrt(3)i",
    "y": "sqrt(3)+sqrt(5)i",
    "z": "sqrt(5)+sqrt(7)i",
    "t": "sqrt(7)+i/sqrt(11)",
    # reciprocals keep the third-kind integrals inside the supported R_J domain
    "u": "1/(sqrt(2)+sqrt(3)i)",
    "v": "1/(sqrt(3)+sqrt(5)i)",
    "w": "1/(sqrt(5)+sqrt(7)i)",
}

# name -> (function, argument letters); mirrors the rows of the usual timing table
BENCH_FUNCTIONS = {
    "exp": ("exp", "x"),
    "log": ("log", "x"),
    "eta": ("eta", "t"),
    "j": ("j", "t"),
    "theta_constants": ("theta_constants", "t"),
    "theta": ("theta", "xt"),
    "wp": ("wp", "xt"),
    "wp_prime": ("wp_prime", "xt"),
    "zeta": ("zeta", "xt"),
    "sigma": ("sigma", "xt"),
    "elliptic_k": ("elliptic_k", "x"),
    "elliptic_e": ("elliptic_e", "y"),
    "elliptic_pi": ("elliptic_pi", "uv"),
    "wp_inv": ("wp_inv", "xt"),
    "elliptic_f": ("elliptic_f", "xy"),
    "elliptic_e_inc": ("elliptic_e_inc", "xy"),
    "elliptic_pi_inc": ("elliptic_pi_inc", "uwv"),
    "rf": ("rf", "xyz"),
    "rg": ("rg", "xyz"),
    "rd": ("rd", "xyz"),
    "rj": ("rj", "xyzt"),
}

DEFAULT_DIGITS = (10, 100, 1000, 10000)


def time_function(name, digits, reps=5, budget=None):
    """Median wall time of one evaluation of a benchmark row at ``digits`` digits."""
    fn, letters = BENCH_FUNCTIONS[name]
    prec = bits_for_digits(digits)
    args = [parse_complex(BENCH_ARGS[c], prec + 10) for c in letters]
    times = []
    for _ in range(max(1, reps)):
        t0 = time.perf_counter()
        evaluate(fn, args, prec)
        times.append(time.perf_counter() - t0)
        if budget is not None and sum(times) > budget and len(times) >= 1:
            break
    return statistics.median(times)


def run_bench(functions, digits, reps=5):
    """Rows (function, digits, seconds, slope); slope is d log t / d log p against the previous digits."""
    rows = []
    for name in functions:
        prev = None
        for d in digits:
            t = time_function(name, d, reps)
            slope = None
            if prev is not None and prev[1] > 0 and t > 0:
                slope = math.log(t / prev[1]) / math.log(d / prev[0])
            rows.append((name, d, t, slope))
            prev = (d, t)
    return rows


def _list_arg(text, conv=str):
    return [conv(s.strip()) for s in text.split(",") if s.strip()] if text else []


def cmd_bench(ns):
    funcs = list(BENCH_FUNCTIONS) if ns.functions is None else _list_arg(ns.functions)
    for f in funcs:
        if f not in BENCH_FUNCTIONS:
            raise UsageError(f"unknown benchmark function {f!r}")
    try:
        digits = list(DEFAULT_DIGITS) if ns.digits is None else _list_arg(ns.digits, int)
    except ValueError:
        raise UsageError("--digits takes a comma-separated list of integers") from None
    if any(d < 1 for d in digits) or digits != sorted(set(digits)):
        raise UsageError("--digits must be positive and strictly ascending")
    rows = run_bench(funcs, digits, ns.reps)
    print(f"{'function':<16} {'digits':>7} {'seconds':>12} {'slope':>7}")
    for name, d, t, s in rows:
        print(f"{name:<16} {d:>7} {t:>12.4g} {'' if s is None else f'{s:.2f}':>7}")
    if ns.csv:
        with open(ns.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["function", "digits", "seconds", "slope"])
            for name, d, t, s in rows:
                w.writerow([name, d, f"{t:.6g}", "" if s is None else f"{s:.4f}"])
    return 0


class _ArgParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser():
    ap = _ArgParser(prog="ellball", description="Ball-arithmetic elliptic and modular functions")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_ArgParser)
    ev = sub.add_parser("eval", help="evaluate one function")
    ev.add_argument("function")
    ev.add_argument("args", nargs="*")
    g = ev.add_mutually_exclusive_group()
    g.add_argument("--digits", type=int)
    g.add_argument("--bits", type=int)
    ev.add_argument("--deriv", type=int, default=1, help="number of series coefficients (theta, wp)")
    ev.add_argument("--tau", help="lattice parameter, appended as the last argument")
    ev.add_argument("--json", action="store_true")
    ev.set_defaults(run=cmd_eval)
    be = sub.add_parser("bench", help="timing sweep")
    be.add_argument("--functions", help="comma-separated list (default: all rows)")
    be.add_argument("--digits", help="comma-separated ascending list (default 10,100,1000,10000)")
    be.add_argument("--reps", type=int, default=5)
    be.add_argument("--csv")
    be.set_defaults(run=cmd_bench)
    return ap


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    try:
        ns = build_parser().parse_args(argv)
        return ns.run(ns)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except EllballError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (ValueError, ZeroDivisionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
