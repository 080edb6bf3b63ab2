"""Polarization engines: bistable relaxation and coherence-vector dynamics.

The bistable engine is a temperature-free fixed-point solver: each free
cell's polarization saturates as f(x) = x / sqrt(1 + x^2) of its local
field over twice the tunneling energy, iterated Gauss-Seidel in layout
order until converged.

The coherence engine integrates a damped three-component coherence vector
per free cell with explicit fixed-step Euler; the z component is the
polarization and the four-phase clock modulates the tunneling energy.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Optional, Sequence, Union

import numpy as np

from . import kernels
from .constants import PhysicalConstants
from .electrostatics import KinkMatrix
from .geometry import Cell, Layout

DEFAULT_RADIUS_OF_EFFECT = 80.0  # nm
DEFAULT_CLOCK_HIGH = 9.8e-22     # J
DEFAULT_CLOCK_LOW = 3.8e-23      # J


class EngineError(RuntimeError):
    pass


class ConvergenceError(EngineError):
    """The bistable iteration did not converge."""


class IntegrationError(EngineError):
    """The coherence vector left the unit ball; the time step is too large."""


@dataclass(frozen=True)
class CoherenceParams:
    temperature: float = 1.0                 # K
    relaxation_time: float = 1.0e-15         # s
    time_step: float = 1.0e-16               # s
    total_time: float = 7.0e-11              # s
    clock_high: float = DEFAULT_CLOCK_HIGH   # J
    clock_low: float = DEFAULT_CLOCK_LOW     # J
    clock_shift: float = 0.0                 # J
    clock_amplitude_factor: float = 2.0
    radius_of_effect: float = DEFAULT_RADIUS_OF_EFFECT  # nm
    layer_separation: float = 11.5           # nm (stored, unused: single layer)
    clock_periods: int = 1

    def __post_init__(self) -> None:
        if self.relaxation_time <= 0 or self.time_step <= 0 or self.total_time <= 0:
            raise ValueError("all times must be strictly positive")
        if self.time_step >= self.relaxation_time:
            raise ValueError("time_step must be smaller than relaxation_time")
        if self.clock_low > self.clock_high:
            raise ValueError("clock_low must not exceed clock_high")
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")
        if self.radius_of_effect <= 0:
            raise ValueError("radius_of_effect must be strictly positive")
        if self.clock_periods < 1:
            raise ValueError("clock_periods must be at least 1")

    @property
    def clock_amplitude(self) -> float:
        return self.clock_amplitude_factor * (self.clock_high - self.clock_low) / 2.0


@dataclass(frozen=True)
class BistableParams:
    gamma: float = DEFAULT_CLOCK_HIGH        # J, tunneling energy
    convergence_tolerance: float = 1.0e-9
    max_iterations: int = 10_000
    radius_of_effect: float = DEFAULT_RADIUS_OF_EFFECT  # nm

    def __post_init__(self) -> None:
        if self.gamma <= 0:
            raise ValueError("gamma must be strictly positive")
        if self.convergence_tolerance <= 0:
            raise ValueError("convergence_tolerance must be strictly positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")


@dataclass(frozen=True)
class SimulationTrace:
    times: np.ndarray          # (n_rec,) seconds
    clocks: np.ndarray         # (n_rec, 4) joules, per zone
    polarizations: np.ndarray  # (n_rec, n_cells)
    cell_ids: tuple
    final: dict                # cell id -> final polarization
    record_stride: int = 1


def clock_gamma(zone: int, t: float, params: CoherenceParams) -> float:
    """Clock tunneling energy for one zone at time t.

    Cosine of one (or `clock_periods`) full periods over the total time,
    successive zones lagging by pi/2, clamped to [clock_low, clock_high].
    """
    if zone not in (0, 1, 2, 3):
        raise ValueError(f"clock zone must be 0..3, got {zone}")
    if not 0 <= t <= params.total_time:
        raise ValueError(f"t={t} outside [0, total_time]")
    return kernels.clock_value(t, zone, float(params.clock_periods),
                               params.total_time, params.clock_shift,
                               params.clock_amplitude, params.clock_low,
                               params.clock_high)


def local_field(cell_id: str, polarizations: Mapping[str, float],
                kink: KinkMatrix) -> float:
    """Weighted neighborhood field sum(E_kink(i,j) * P_j), ascending cell id."""
    total = 0.0
    for other in sorted(polarizations):
        if other == cell_id:
            continue
        energy = kink.get(cell_id, other)
        if energy != 0.0:
            total += energy * polarizations[other]
    return total


def resolve_drives(layout: Layout, inputs: Optional[Mapping[str, float]] = None
                   ) -> dict[str, float]:
    """Drive value for every input/fixed cell.

    Input cells must appear in `inputs`; fixed cells default to their own
    fixed polarization but may be overridden.
    """
    inputs = dict(inputs or {})
    drives: dict[str, float] = {}
    for cell in layout.cells:
        if cell.role == "input":
            if cell.id not in inputs:
                raise EngineError(f"input cell {cell.id!r} has no drive value")
            drives[cell.id] = float(inputs.pop(cell.id))
        elif cell.role == "fixed":
            drives[cell.id] = float(inputs.pop(cell.id, cell.fixed_polarization))
    if inputs:
        raise EngineError(f"drive values for unknown/undrivable cells: {sorted(inputs)}")
    return drives


def _saturate(x: float) -> float:
    return x / math.sqrt(1.0 + x * x)


def bistable_relax(layout: Layout, kink: KinkMatrix, params: BistableParams,
                   inputs: Optional[Mapping[str, float]] = None) -> dict[str, float]:
    """Converged polarizations of the bistable fixed-point model.

    Free cells are swept Gauss-Seidel in layout order with
    P_i <- f(E_i / (2 gamma)) until the largest change drops below the
    convergence tolerance. Deterministic; raises ConvergenceError (naming
    the worst cell) if max_iterations is exhausted.
    """
    drives = resolve_drives(layout, inputs)
    pols: dict[str, float] = {c.id: 0.0 for c in layout.cells}
    pols.update(drives)
    free = [c.id for c in layout.cells if c.id not in drives]
    two_gamma = 2.0 * params.gamma
    worst_id = None
    for _ in range(params.max_iterations):
        worst = 0.0
        worst_id = None
        for cid in free:
            new = _saturate(local_field(cid, pols, kink) / two_gamma)
            change = abs(new - pols[cid])
            if change > worst:
                worst = change
                worst_id = cid
            pols[cid] = new
        if worst < params.convergence_tolerance:
            return pols
    raise ConvergenceError(
        f"bistable iteration did not converge in {params.max_iterations} sweeps; "
        f"worst cell {worst_id!r}")


def steady_state_polarization(E: float, gamma: float, T: float,
                              constants: PhysicalConstants) -> float:
    """Thermal steady-state polarization (E/Omega) tanh(Omega / (2 kB T)).

    Omega = sqrt(E^2 + 4 gamma^2). At T = 0 the tanh factor is taken as 1.
    Odd in E; magnitude decreases with T and increases with |E|.
    """
    if T < 0:
        raise ValueError("temperature must be non-negative")
    omega = math.sqrt(E * E + 4.0 * gamma * gamma)
    if omega == 0.0:
        raise ValueError("E and gamma are both zero: polarization direction undefined")
    th = 1.0 if T == 0.0 else math.tanh(omega / (2.0 * constants.boltzmann_k * T))
    return (E / omega) * th


def simulate_coherence(layout: Layout, kink: KinkMatrix, params: CoherenceParams,
                       inputs: Optional[Mapping[str, float]] = None,
                       constants: Optional[PhysicalConstants] = None,
                       record_stride: int = 100) -> SimulationTrace:
    """Run the coherence-vector integrator over the full clock waveform.

    Driven cells hold their drive value; each free cell's coherence vector
    starts at zero and is advanced with explicit Euler at `time_step`,
    with the local field recomputed from the previous step's polarizations
    at every step. The trace records the clock values and all cell
    polarizations every `record_stride` steps.
    """
    constants = constants or PhysicalConstants.paper()
    if record_stride < 1:
        raise ValueError("record_stride must be at least 1")
    cell_ids = tuple(c.id for c in layout.cells)
    n = len(cell_ids)
    if n == 0:
        empty = np.zeros((0,))
        return SimulationTrace(times=empty, clocks=np.zeros((0, 4)),
                               polarizations=np.zeros((0, 0)), cell_ids=(),
                               final={}, record_stride=record_stride)
    drives = resolve_drives(layout, inputs)

    dense = np.zeros((n, n))
    for i, a in enumerate(cell_ids):
        for j, b in enumerate(cell_ids):
            if i != j:
                dense[i, j] = kink.get(a, b)
    zones = np.array([c.clock_zone for c in layout.cells], dtype=np.int64)
    driven = np.array([cid in drives for cid in cell_ids], dtype=np.bool_)
    drive_values = np.array([drives.get(cid, 0.0) for cid in cell_ids])

    n_steps = int(round(params.total_time / params.time_step))
    if n_steps < 1:
        raise ValueError("total_time shorter than one time_step")
    n_rec = n_steps // record_stride + 1
    rec_times = np.zeros(n_rec)
    rec_clocks = np.zeros((n_rec, 4))
    rec_pols = np.zeros((n_rec, n))

    final_pol, ok, bad_step = kernels.coherence_euler(
        dense, zones, driven, drive_values, n_steps, params.time_step,
        params.total_time, float(params.clock_periods), params.clock_shift,
        params.clock_amplitude, params.clock_low, params.clock_high,
        params.relaxation_time, params.temperature, constants.boltzmann_k,
        constants.hbar, record_stride, rec_times, rec_clocks, rec_pols)
    if not ok:
        raise IntegrationError(
            f"coherence vector left the unit ball at step {bad_step} "
            f"(t = {bad_step * params.time_step:.3e} s); use a smaller time_step")
    final = {cid: float(final_pol[i]) for i, cid in enumerate(cell_ids)}
    return SimulationTrace(times=rec_times, clocks=rec_clocks,
                           polarizations=rec_pols, cell_ids=cell_ids,
                           final=final, record_stride=record_stride)


# --------------------------------------------------------------------------
# Truth tables

def _majority(bits: Sequence[int]) -> int:
    a, b, c = bits
    return (a & b) | (b & c) | (c & a)


EXPECTED_FUNCTIONS: dict[str, Callable[[Sequence[int]], int]] = {
    "inverter": lambda bits: 1 - bits[0],
    "buffer": lambda bits: bits[0],
    "majority": _majority,
    "and": lambda bits: bits[0] & bits[1],
    "or": lambda bits: bits[0] | bits[1],
}

INDETERMINATE_THRESHOLD = 1e-6


@dataclass(frozen=True)
class TruthTableRow:
    inputs: tuple            # logic bits per enumerated driver, sorted by id
    expected: int
    observed: Optional[int]  # None when indeterminate
    magnitude: float         # |P| of the output cell
    passed: bool


@dataclass(frozen=True)
class TruthTableReport:
    layout_name: str
    engine: str
    driver_ids: tuple
    rows: tuple

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.rows)


def truth_table_check(layout: Layout, engine: str,
                      params: Union[BistableParams, CoherenceParams, None],
                      expected: Union[str, Callable[[Sequence[int]], int]],
                      kink: KinkMatrix,
                      constants: Optional[PhysicalConstants] = None) -> TruthTableReport:
    """Run every drive combination and compare output signs to a logic function.

    Enumerates the input-role cells (falling back to fixed cells when the
    layout has no input cells, as in the two-cell inverter) sorted by id;
    logic 1 drives +1, logic 0 drives -1. An output magnitude below 1e-6
    is indeterminate and counts as a failing row.
    """
    if engine not in ("bistable", "coherence"):
        raise ValueError(f"unknown engine {engine!r}")
    if params is None:
        params = BistableParams() if engine == "bistable" else CoherenceParams()
    if isinstance(expected, str):
        try:
            expected_fn = EXPECTED_FUNCTIONS[expected]
        except KeyError:
            raise ValueError(f"unknown logic function {expected!r}") from None
    else:
        expected_fn = expected
    constants = constants or PhysicalConstants.paper()
    driver_ids = sorted(c.id for c in layout.cells if c.role == "input")
    if not driver_ids:
        driver_ids = sorted(c.id for c in layout.cells if c.role == "fixed")
    if not driver_ids:
        raise EngineError("layout has no drivable cell")
    out_id = layout.output_cell().id

    rows = []
    for bits in itertools.product((0, 1), repeat=len(driver_ids)):
        drives = {cid: (1.0 if bit else -1.0) for cid, bit in zip(driver_ids, bits)}
        if engine == "bistable":
            pols = bistable_relax(layout, kink, params, drives)
            out_pol = pols[out_id]
        else:
            trace = simulate_coherence(layout, kink, params, drives, constants)
            out_pol = trace.final[out_id]
        magnitude = abs(out_pol)
        want = expected_fn(bits)
        if magnitude < INDETERMINATE_THRESHOLD:
            rows.append(TruthTableRow(bits, want, None, magnitude, False))
        else:
            got = 1 if out_pol > 0 else 0
            rows.append(TruthTableRow(bits, want, got, magnitude, got == want))
    return TruthTableReport(layout_name=layout.name, engine=engine,
                           driver_ids=tuple(driver_ids), rows=tuple(rows))
