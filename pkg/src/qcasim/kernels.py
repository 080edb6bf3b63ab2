"""Hot numeric kernels for the coherence-vector integrator.

The inner loop runs one explicit Euler step per time step (typically 7e5
steps per simulation), so it is JIT-compiled with numba by default. Set
the environment variable ``QCASIM_NO_NUMBA=1`` to force the pure-Python/
numpy fallback (same code object, just not compiled); results are
bit-identical between the two paths because the arithmetic and summation
order are identical. ``benchmarks/bench_coherence.py`` times both.
"""

from __future__ import annotations

import math
import os

import numpy as np

_DISABLE = os.environ.get("QCASIM_NO_NUMBA", "").strip() not in ("", "0")

try:
    if _DISABLE:
        raise ImportError("numba disabled via QCASIM_NO_NUMBA")
    from numba import njit
    NUMBA_ENABLED = True
except ImportError:
    NUMBA_ENABLED = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        return lambda func: func


def _clock_value(t: float, zone: int, periods: float, total_time: float,
                 shift: float, amplitude: float, low: float, high: float) -> float:
    value = shift + amplitude * math.cos(
        2.0 * math.pi * periods * t / total_time - zone * math.pi / 2.0)
    if value < low:
        return low
    if value > high:
        return high
    return value


def _coherence_euler(kink, zones, driven, drive_values, n_steps, dt, total_time,
                     periods, clock_shift, clock_amplitude, clock_low, clock_high,
                     tau, temperature, boltzmann_k, hbar, stride,
                     rec_times, rec_clocks, rec_pols):
    """Integrate d(lambda)/dt = Gamma x lambda - (lambda - lambda_ss)/tau.

    Gamma = (-2*gamma_z(t), 0, E_i(t))/hbar per cell; lambda_ss is the
    thermal steady state tanh(hbar*|Gamma|/(2 kB T)) * Gamma/|Gamma|; the
    polarization is lambda_z. Driven cells hold their drive value. Updates
    are synchronous: all local fields are evaluated from the previous
    step's polarizations. Returns (final_pol, ok, bad_step); ok=False
    means |lambda| exceeded 1 + 1e-6 at step bad_step.

    Recording arrays are filled every `stride` steps (step 0 included).
    """
    n = kink.shape[0]
    pol = np.zeros(n)
    lam = np.zeros((n, 3))
    fields = np.zeros(n)
    gammas = np.zeros(4)
    for i in range(n):
        if driven[i]:
            pol[i] = drive_values[i]
    limit_sq = (1.0 + 1e-6) ** 2
    rec = 0
    for step in range(n_steps + 1):
        t = step * dt
        for z in range(4):
            gammas[z] = _clock_value(t, z, periods, total_time, clock_shift,
                                     clock_amplitude, clock_low, clock_high)
        if step % stride == 0 and rec < rec_times.shape[0]:
            rec_times[rec] = t
            for z in range(4):
                rec_clocks[rec, z] = gammas[z]
            for i in range(n):
                rec_pols[rec, i] = pol[i]
            rec += 1
        if step == n_steps:
            break
        # local fields from the previous step's polarizations, ascending id
        for i in range(n):
            if driven[i]:
                continue
            acc = 0.0
            for j in range(n):
                acc += kink[i, j] * pol[j]
            fields[i] = acc
        for i in range(n):
            if driven[i]:
                continue
            gx = -2.0 * gammas[zones[i]] / hbar
            gz = fields[i] / hbar
            mag = math.sqrt(gx * gx + gz * gz)
            if temperature > 0.0:
                th = math.tanh(hbar * mag / (2.0 * boltzmann_k * temperature))
            else:
                th = 1.0
            ss_x = th * gx / mag
            ss_z = th * gz / mag
            lx = lam[i, 0]
            ly = lam[i, 1]
            lz = lam[i, 2]
            # Gamma x lambda with Gamma = (gx, 0, gz)
            dx = -gz * ly - (lx - ss_x) / tau
            dy = gz * lx - gx * lz - ly / tau
            dz = gx * ly - (lz - ss_z) / tau
            lam[i, 0] = lx + dt * dx
            lam[i, 1] = ly + dt * dy
            lam[i, 2] = lz + dt * dz
            pol[i] = lam[i, 2]
            norm_sq = lam[i, 0] ** 2 + lam[i, 1] ** 2 + lam[i, 2] ** 2
            if norm_sq > limit_sq:
                return pol, False, step
    return pol, True, -1


if NUMBA_ENABLED:
    _clock_value = njit(cache=True)(_clock_value)
    coherence_euler = njit(cache=True)(_coherence_euler)
else:
    coherence_euler = _coherence_euler

# Uncompiled path, kept callable regardless of the env flag so the two can
# be compared (tests) and benchmarked against each other.
coherence_euler_py = _coherence_euler

clock_value = _clock_value

