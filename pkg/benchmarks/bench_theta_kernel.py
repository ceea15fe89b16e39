"""Compare the compiled and pure-Python theta product kernels.

Usage::

    python benchmarks/bench_theta_kernel.py [--digits 30 60 120] [--order 0 4 8] [--repeat 5]

For each setting the script times ``product_taylor`` with both backends on the
same inputs, checks that they agree, and prints the median time per call.
"""
from __future__ import annotations

import argparse
import statistics
import timeit

import mpmath

from witten_rigidity import theta
from witten_rigidity.precision import PrecisionConfig, Tau, product_order, working_precision
from witten_rigidity.theta.core import _exp_taylor


def _inputs(tau: Tau, v, order: int):
    two_pi_i = 2j * mpmath.pi
    q = tau.q_full
    return (mpmath.exp(two_pi_i * v), q, q, -1, order,
            _exp_taylor(two_pi_i, order), _exp_taylor(-two_pi_i, order))


def bench(digits: int, order: int, repeat: int, number: int):
    cfg = PrecisionConfig(digits)
    tau = Tau("0.3+0.8i")
    v = mpmath.mpc("0.17", "0.05")
    with working_precision(cfg):
        z, p1, q, sign, order, ep, em = _inputs(tau, v, order)
        nterms = product_order(cfg, tau, v.imag)
        results, times = {}, {}
        for backend in ("compiled", "python"):
            call = lambda b=backend: theta.product_taylor(z, p1, q, sign, nterms, order, ep, em, backend=b)
            results[backend] = call()
            runs = timeit.repeat(call, repeat=repeat, number=number)
            times[backend] = statistics.median(runs) / number
        gap = max(abs(a - b) for a, b in zip(results["compiled"], results["python"]))
    return nterms, times, gap


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--digits", type=int, nargs="+", default=[30, 60, 120])
    parser.add_argument("--order", type=int, nargs="+", default=[0, 4, 8])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--number", type=int, default=20)
    args = parser.parse_args(argv)

    if theta.BACKEND != "compiled":
        print("compiled kernel unavailable; only the Python kernel can run")
        return 1
    print(f"{'digits':>6} {'order':>5} {'terms':>5} {'compiled (ms)':>14} {'python (ms)':>12} {'speedup':>8} {'max diff':>10}")
    for d in args.digits:
        for o in args.order:
            nterms, times, gap = bench(d, o, args.repeat, args.number)
            c, p = times["compiled"] * 1e3, times["python"] * 1e3
            print(f"{d:>6} {o:>5} {nterms:>5} {c:>14.3f} {p:>12.3f} {p / c:>7.1f}x {mpmath.nstr(gap, 2):>10}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
