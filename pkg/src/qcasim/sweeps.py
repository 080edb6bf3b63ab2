"""Parameter sweeps and comparison against the shipped reference tables.

Three experiments: output polarization versus temperature, output
polarization versus output-cell gap, and kink energy versus gap. Results
are deterministic rows (sorted by the swept value) that serialize to
byte-stable CSV; reference tables are shipped as data files and compared
by per-row difference and rank correlation.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, replace
from importlib import resources
from typing import Mapping, Optional, Sequence, TextIO, Union

from .constants import PhysicalConstants
from .electrostatics import kink_matrix
from .engines import (BistableParams, CoherenceParams, bistable_relax,
                      simulate_coherence)
from .geometry import Layout, displace_cell, displacement_axis, previous_neighbor

TABLE1_TEMPERATURES = (0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0,
                       10.0, 15.0, 20.0, 25.0, 30.0)
TABLE23_GAPS = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)

_TABLE_SPECS = {
    "table1": ("table1.csv", ("temperature_K", "inv2_P", "inv3_P"), 15),
    "table2": ("table2.csv", ("gap_nm", "inv2_P", "inv3_P"), 6),
    "table3": ("table3.csv", ("gap_nm", "inv2_Ek_J", "inv3_Ek_J"), 6),
}


class SweepError(ValueError):
    pass


def _sci(value: float) -> str:
    """Scientific notation with 6 significant digits."""
    return f"{value:.5e}"


@dataclass(frozen=True)
class SweepRow:
    value: float
    cell_id: str
    polarization: float
    kink_energy: Optional[float] = None


@dataclass(frozen=True)
class SweepResult:
    variable: str            # e.g. "temperature"
    unit: str                # e.g. "K"
    rows: tuple              # of SweepRow, ascending by swept value
    layout_name: str
    engine: str
    snapshot: dict           # parameter snapshot echoed into CSV comments

    def values(self) -> list[float]:
        return [r.value for r in self.rows]

    def polarizations(self) -> list[float]:
        return [r.polarization for r in self.rows]

    def kink_energies(self) -> list[float]:
        return [r.kink_energy for r in self.rows]


def _coherence_snapshot(params: CoherenceParams) -> dict:
    return {
        "temperature_K": params.temperature,
        "relaxation_time_s": params.relaxation_time,
        "time_step_s": params.time_step,
        "total_time_s": params.total_time,
        "clock_high_J": params.clock_high,
        "clock_low_J": params.clock_low,
        "clock_shift_J": params.clock_shift,
        "clock_amplitude_factor": params.clock_amplitude_factor,
        "radius_of_effect_nm": params.radius_of_effect,
        "layer_separation_nm": params.layer_separation,
        "clock_periods": params.clock_periods,
    }


def _bistable_snapshot(params: BistableParams) -> dict:
    return {
        "gamma_J": params.gamma,
        "convergence_tolerance": params.convergence_tolerance,
        "max_iterations": params.max_iterations,
        "radius_of_effect_nm": params.radius_of_effect,
    }


def sweep_temperature(layout: Layout, temperatures: Sequence[float],
                      params: CoherenceParams, constants: PhysicalConstants,
                      inputs: Optional[Mapping[str, float]] = None) -> SweepResult:
    """Coherence-engine |P| of the output cell at each temperature."""
    temps = list(temperatures)
    if not temps:
        raise SweepError("temperature grid is empty")
    if any(t < 0 for t in temps):
        raise SweepError("temperatures must be non-negative")
    if any(b <= a for a, b in zip(temps, temps[1:])):
        raise SweepError("temperature grid must be strictly increasing")
    out_id = layout.output_cell().id
    kink = kink_matrix(layout, params.radius_of_effect, constants)
    rows = []
    for T in temps:
        try:
            trace = simulate_coherence(layout, kink, replace(params, temperature=T),
                                       inputs, constants)
        except Exception as exc:
            raise SweepError(f"at temperature {T} K: {exc}") from exc
        rows.append(SweepRow(value=T, cell_id=out_id,
                             polarization=abs(trace.final[out_id])))
    snapshot = _coherence_snapshot(params)
    del snapshot["temperature_K"]  # swept
    snapshot.update(layout=layout.name, engine="coherence",
                    constants=constants.mode)
    return SweepResult(variable="temperature", unit="K", rows=tuple(rows),
                       layout_name=layout.name, engine="coherence",
                       snapshot=snapshot)


def sweep_gap(layout: Layout, output_id: str, gaps: Sequence[float], engine: str,
              params: Union[BistableParams, CoherenceParams],
              constants: PhysicalConstants,
              inputs: Optional[Mapping[str, float]] = None) -> SweepResult:
    """|P| of the displaced cell and its kink energy to its previous
    neighbor, at each per-axis edge gap.

    The displacement direction is derived from the current geometry (an
    in-line cell slides along its line, a diagonal cell along the
    diagonal), so the layout keeps its shape.
    """
    gaps = list(gaps)
    if not gaps:
        raise SweepError("gap grid is empty")
    if any(g <= 0 for g in gaps):
        raise SweepError("gaps must be strictly positive")
    if any(b <= a for a, b in zip(gaps, gaps[1:])):
        raise SweepError("gap grid must be strictly increasing")
    if engine not in ("bistable", "coherence"):
        raise SweepError(f"unknown engine {engine!r}")
    axis = displacement_axis(layout, output_id)
    rows = []
    for gap in gaps:
        try:
            displaced = displace_cell(layout, output_id, gap, axis)
            kink = kink_matrix(displaced, params.radius_of_effect, constants)
            if engine == "bistable":
                pol = bistable_relax(displaced, kink, params, inputs)[output_id]
            else:
                pol = simulate_coherence(displaced, kink, params, inputs,
                                         constants).final[output_id]
            prev = previous_neighbor(displaced, output_id)
            energy = kink.get(output_id, prev.id)
        except Exception as exc:
            raise SweepError(f"at gap {gap} nm: {exc}") from exc
        rows.append(SweepRow(value=gap, cell_id=output_id,
                             polarization=abs(pol), kink_energy=energy))
    snapshot = (_bistable_snapshot(params) if engine == "bistable"
                else _coherence_snapshot(params))
    snapshot.update(layout=layout.name, engine=engine, constants=constants.mode,
                    displaced_cell=output_id)
    return SweepResult(variable="gap", unit="nm", rows=tuple(rows),
                       layout_name=layout.name, engine=engine, snapshot=snapshot)


# --------------------------------------------------------------------------
# Reference tables

@dataclass(frozen=True)
class ReferenceTable:
    identifier: str
    columns: tuple           # column names, first is the swept variable
    rows: tuple              # of tuples of floats

    def column(self, name: str) -> list[float]:
        idx = self.columns.index(name)
        return [r[idx] for r in self.rows]

    def grid(self) -> list[float]:
        return [r[0] for r in self.rows]


def load_reference_table(identifier: str) -> ReferenceTable:
    """Load one of the shipped tables (table1 | table2 | table3)."""
    try:
        filename, columns, expected_rows = _TABLE_SPECS[identifier]
    except KeyError:
        raise SweepError(f"unknown reference table {identifier!r}") from None
    text = resources.files("qcasim.data").joinpath(filename).read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != columns:
        raise SweepError(f"{filename}: unexpected header {header}")
    rows = tuple(tuple(float(x) for x in row) for row in reader if row)
    if len(rows) != expected_rows:
        raise SweepError(f"{filename}: expected {expected_rows} rows, got {len(rows)}")
    return ReferenceTable(identifier=identifier, columns=columns, rows=rows)


# --------------------------------------------------------------------------
# Comparison

def _stable_ranks(values: Sequence[float]) -> list[int]:
    # Descending rank; values rounded to the 6-significant-digit CSV
    # precision first, remaining ties broken by row order. This makes two
    # series that are both (weakly) monotone in the same direction rank
    # identically, which is the behavior the trend checks rely on.
    rounded = [float(_sci(v)) for v in values]
    order = sorted(range(len(rounded)), key=lambda i: (-rounded[i], i))
    ranks = [0] * len(rounded)
    for rank, idx in enumerate(order):
        ranks[idx] = rank
    return ranks


def rank_correlation(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman rank correlation with row-order tie breaking (see _stable_ranks)."""
    if len(xs) != len(ys):
        raise SweepError("rank correlation needs equal-length series")
    n = len(xs)
    if n < 2:
        raise SweepError("rank correlation needs at least 2 rows")
    rx = _stable_ranks(xs)
    ry = _stable_ranks(ys)
    d_sq = sum((a - b) ** 2 for a, b in zip(rx, ry))
    return 1.0 - 6.0 * d_sq / (n * (n * n - 1))


@dataclass(frozen=True)
class ComparisonRow:
    value: float
    simulated: float
    reference: float
    abs_difference: float
    rel_difference: float


@dataclass(frozen=True)
class ComparisonReport:
    table: str
    column: str
    rows: tuple
    rank_correlation: float


def compare_to_reference(result: SweepResult, ref: ReferenceTable,
                         column: str) -> ComparisonReport:
    """Per-row differences plus rank correlation; makes no pass/fail call."""
    grid = ref.grid()
    sim_values = result.values()
    if len(sim_values) != len(grid) or any(
            not math.isclose(a, b, rel_tol=1e-9, abs_tol=1e-9)
            for a, b in zip(sim_values, grid)):
        raise SweepError(
            f"sweep grid {sim_values} does not match reference grid {grid}")
    ref_col = ref.column(column)
    if column.endswith("_Ek_J"):
        sim_col = [abs(e) for e in result.kink_energies()]
    else:
        sim_col = result.polarizations()
    rows = tuple(
        ComparisonRow(value=v, simulated=s, reference=r,
                      abs_difference=abs(s - r),
                      rel_difference=abs(s - r) / abs(r) if r != 0 else math.inf)
        for v, s, r in zip(grid, sim_col, ref_col))
    return ComparisonReport(table=ref.identifier, column=column, rows=rows,
                            rank_correlation=rank_correlation(sim_col, ref_col))


# --------------------------------------------------------------------------
# CSV emission

def _snapshot_lines(snapshot: Mapping) -> list[str]:
    lines = []
    for key in sorted(snapshot):
        value = snapshot[key]
        text = _sci(value) if isinstance(value, float) else str(value)
        lines.append(f"# {key}={text}")
    return lines


def emit_csv(result: SweepResult, destination: TextIO) -> None:
    """Write a sweep as CSV: snapshot comment header, then one row per point.

    Byte-identical across runs for identical inputs: fixed field order,
    sorted snapshot keys, 6-significant-digit scientific notation, LF line
    endings.
    """
    lines = _snapshot_lines(result.snapshot)
    if result.variable == "temperature":
        lines.append("temperature_K,cell_id,polarization")
        for r in result.rows:
            lines.append(f"{_sci(r.value)},{r.cell_id},{_sci(r.polarization)}")
    elif result.variable == "gap":
        lines.append("gap_nm,cell_id,polarization,kink_energy_J")
        for r in result.rows:
            lines.append(f"{_sci(r.value)},{r.cell_id},{_sci(r.polarization)},"
                         f"{_sci(r.kink_energy)}")
    else:
        raise SweepError(f"unknown sweep variable {result.variable!r}")
    destination.write("\n".join(lines) + "\n")
