"""Benchmark the compiled coherence kernel against the pure-Python path.

Runs the same inverter simulation through the numba-compiled kernel and
through the uncompiled fallback (the exact same code object), reports
wall-clock times and the speedup, and verifies the results agree bit for
bit.

Usage:
    python benchmarks/bench_coherence.py [--total-time 7e-12] [--repeats 3]
"""

import argparse
import time

import numpy as np

from qcasim import kernels
from qcasim.constants import PhysicalConstants
from qcasim.electrostatics import kink_matrix
from qcasim.engines import CoherenceParams
from qcasim.geometry import builtin_layout


def build_problem(total_time):
    constants = PhysicalConstants.paper()
    params = CoherenceParams(total_time=total_time)
    layout = builtin_layout("inv3")
    kink = kink_matrix(layout, params.radius_of_effect, constants)
    ids = [c.id for c in layout.cells]
    n = len(ids)
    dense = np.zeros((n, n))
    for i, a in enumerate(ids):
        for j, b in enumerate(ids):
            if i != j:
                dense[i, j] = kink.get(a, b)
    zones = np.array([c.clock_zone for c in layout.cells], dtype=np.int64)
    driven = np.array([c.role == "fixed" for c in layout.cells])
    drive_values = np.array([c.fixed_polarization or 0.0 for c in layout.cells])
    n_steps = int(round(params.total_time / params.time_step))
    return constants, params, dense, zones, driven, drive_values, n_steps


def run_once(fn, problem, stride=1000):
    constants, params, dense, zones, driven, drive_values, n_steps = problem
    n_rec = n_steps // stride + 1
    rec_times = np.zeros(n_rec)
    rec_clocks = np.zeros((n_rec, 4))
    rec_pols = np.zeros((n_rec, dense.shape[0]))
    start = time.perf_counter()
    final, ok, _ = fn(dense, zones, driven, drive_values, n_steps,
                      params.time_step, params.total_time,
                      float(params.clock_periods), params.clock_shift,
                      params.clock_amplitude, params.clock_low,
                      params.clock_high, params.relaxation_time,
                      params.temperature, constants.boltzmann_k, constants.hbar,
                      stride, rec_times, rec_clocks, rec_pols)
    elapsed = time.perf_counter() - start
    assert ok, "integration went unstable"
    return elapsed, final


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--total-time", type=float, default=7e-12,
                        help="simulated time in s (default: 7e-12, 70000 steps)")
    parser.add_argument("--repeats", type=int, default=3,
                        help="timed repetitions per path (default: 3)")
    args = parser.parse_args()

    problem = build_problem(args.total_time)
    n_steps = problem[-1]
    print(f"three-cell inverter, {n_steps} Euler steps, "
          f"numba enabled: {kernels.NUMBA_ENABLED}")

    if kernels.NUMBA_ENABLED:
        run_once(kernels.coherence_euler, problem)  # warm up the JIT cache

    results = {}
    for label, fn in (("compiled", kernels.coherence_euler),
                      ("python", kernels.coherence_euler_py)):
        if label == "compiled" and not kernels.NUMBA_ENABLED:
            print("compiled: skipped (QCASIM_NO_NUMBA is set)")
            continue
        times, finals = zip(*(run_once(fn, problem) for _ in range(args.repeats)))
        best = min(times)
        results[label] = (best, finals[0])
        print(f"{label:>8}: best of {args.repeats}: {best * 1e3:9.2f} ms "
              f"({n_steps / best:,.0f} steps/s)")

    if len(results) == 2:
        speedup = results["python"][0] / results["compiled"][0]
        match = np.array_equal(results["compiled"][1], results["python"][1])
        print(f" speedup: {speedup:.1f}x, results bit-identical: {match}")


if __name__ == "__main__":
    main()
