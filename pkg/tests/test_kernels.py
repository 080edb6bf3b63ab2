import json
import os
import subprocess
import sys

import numpy as np

from qcasim import kernels
from qcasim.constants import PhysicalConstants
from qcasim.electrostatics import kink_matrix
from qcasim.engines import CoherenceParams, simulate_coherence
from qcasim.geometry import builtin_layout


def run_kernel(fn, n_steps=2000, stride=100):
    """Drive a kernel directly on the three-cell inverter coupling matrix."""
    constants = PhysicalConstants.paper()
    params = CoherenceParams()
    layout = builtin_layout("inv3")
    kink = kink_matrix(layout, 80.0, constants)
    ids = [c.id for c in layout.cells]
    dense = np.zeros((3, 3))
    for i, a in enumerate(ids):
        for j, b in enumerate(ids):
            if i != j:
                dense[i, j] = kink.get(a, b)
    zones = np.zeros(3, dtype=np.int64)
    driven = np.array([True, False, False])
    drive_values = np.array([1.0, 0.0, 0.0])
    dt = params.time_step
    n_rec = n_steps // stride + 1
    rec_times = np.zeros(n_rec)
    rec_clocks = np.zeros((n_rec, 4))
    rec_pols = np.zeros((n_rec, 3))
    final, ok, bad = fn(
        dense, zones, driven, drive_values, n_steps, dt, n_steps * dt,
        1.0, params.clock_shift, params.clock_amplitude, params.clock_low,
        params.clock_high, params.relaxation_time, params.temperature,
        constants.boltzmann_k, constants.hbar, stride,
        rec_times, rec_clocks, rec_pols)
    return final, ok, bad, rec_times, rec_clocks, rec_pols


class TestKernelParity:
    def test_compiled_and_python_paths_bit_identical(self):
        compiled = run_kernel(kernels.coherence_euler)
        python = run_kernel(kernels.coherence_euler_py)
        assert compiled[1] and python[1]
        np.testing.assert_array_equal(compiled[0], python[0])
        np.testing.assert_array_equal(compiled[3], python[3])
        np.testing.assert_array_equal(compiled[4], python[4])
        np.testing.assert_array_equal(compiled[5], python[5])

    def test_clock_value_matches_engine_wrapper(self):
        from qcasim.engines import clock_gamma
        params = CoherenceParams()
        for zone in range(4):
            for t in np.linspace(0.0, params.total_time, 37):
                direct = kernels.clock_value(
                    float(t), zone, 1.0, params.total_time, params.clock_shift,
                    params.clock_amplitude, params.clock_low, params.clock_high)
                assert direct == clock_gamma(zone, float(t), params)

    def test_instability_reported_not_raised(self):
        # a time step far beyond the relaxation time blows up the Euler update
        final, ok, bad, *_ = run_kernel(
            lambda *args: kernels.coherence_euler_py(
                *args[:5], 1.0e-13, *args[6:]), n_steps=200)
        assert not ok
        assert bad >= 0


class TestEnvFlagFallback:
    def test_flag_reflects_environment(self):
        disabled = os.environ.get("QCASIM_NO_NUMBA", "").strip() not in ("", "0")
        assert kernels.NUMBA_ENABLED == (not disabled)

    def test_fallback_process_matches_this_process(self):
        """A subprocess with QCASIM_NO_NUMBA=1 produces identical finals."""
        constants = PhysicalConstants.paper()
        params = CoherenceParams(total_time=2.0e-13)
        layout = builtin_layout("inv2")
        kink = kink_matrix(layout, 80.0, constants)
        here = simulate_coherence(layout, kink, params, constants=constants)

        script = (
            "import json\n"
            "from qcasim import kernels\n"
            "from qcasim.constants import PhysicalConstants\n"
            "from qcasim.electrostatics import kink_matrix\n"
            "from qcasim.engines import CoherenceParams, simulate_coherence\n"
            "from qcasim.geometry import builtin_layout\n"
            "assert not kernels.NUMBA_ENABLED\n"
            "constants = PhysicalConstants.paper()\n"
            "params = CoherenceParams(total_time=2.0e-13)\n"
            "layout = builtin_layout('inv2')\n"
            "kink = kink_matrix(layout, 80.0, constants)\n"
            "trace = simulate_coherence(layout, kink, params, constants=constants)\n"
            "print(json.dumps({k: v.hex() for k, v in trace.final.items()}))\n"
        )
        env = dict(os.environ, QCASIM_NO_NUMBA="1")
        result = subprocess.run([sys.executable, "-c", script], env=env,
                                capture_output=True, text=True, check=True)
        remote = json.loads(result.stdout)
        assert set(remote) == set(here.final)
        for cid, value in here.final.items():
            assert remote[cid] == value.hex()
