"""Command-line front end.

Subcommands: kink, simulate, truth, sweep-temp, sweep-gap, layouts.
Layouts are referenced as ``builtin:<name>`` (e.g. builtin:inv2,
builtin:wire(5)) or as a path to a .qcl file. All output is deterministic:
identical argv produces identical bytes.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence, TextIO

from .constants import PhysicalConstants
from .electrostatics import kink_matrix
from .engines import (BistableParams, CoherenceParams, EngineError,
                      bistable_relax, simulate_coherence, truth_table_check)
from .geometry import (BUILTIN_NAMES, Layout, LayoutError, builtin_layout,
                       parse_layout)
from .sweeps import (TABLE1_TEMPERATURES, TABLE23_GAPS, SweepError, emit_csv,
                     sweep_gap, sweep_temperature)

_DEFAULTS = CoherenceParams()
_BDEFAULTS = BistableParams()


def _sci(value: float) -> str:
    return f"{value:.6e}"


class _CliError(Exception):
    pass


def _add_layout_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--layout", required=True,
                        help="builtin:<name> or path to a .qcl file "
                             f"(builtins: {', '.join(BUILTIN_NAMES)})")


def _add_common_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--engine", choices=("bistable", "coherence"),
                        default="bistable", help="simulation engine (default: bistable)")
    parser.add_argument("--constants", choices=("paper", "codata"), default=None,
                        help="physical constants mode (default: layout's, else paper)")
    parser.add_argument("--out", metavar="PATH", default=None,
                        help="write output to PATH instead of stdout")
    group = parser.add_argument_group("physical parameter overrides")
    group.add_argument("--temperature", type=float, default=_DEFAULTS.temperature,
                       help=f"temperature in K (default: {_sci(_DEFAULTS.temperature)})")
    group.add_argument("--relaxation-time", type=float,
                       default=_DEFAULTS.relaxation_time,
                       help="relaxation time in s "
                            f"(default: {_sci(_DEFAULTS.relaxation_time)})")
    group.add_argument("--time-step", type=float, default=_DEFAULTS.time_step,
                       help=f"time step in s (default: {_sci(_DEFAULTS.time_step)})")
    group.add_argument("--total-time", type=float, default=_DEFAULTS.total_time,
                       help="total simulation time in s "
                            f"(default: {_sci(_DEFAULTS.total_time)})")
    group.add_argument("--clock-high", type=float, default=_DEFAULTS.clock_high,
                       help=f"clock high in J (default: {_sci(_DEFAULTS.clock_high)})")
    group.add_argument("--clock-low", type=float, default=_DEFAULTS.clock_low,
                       help=f"clock low in J (default: {_sci(_DEFAULTS.clock_low)})")
    group.add_argument("--clock-shift", type=float, default=_DEFAULTS.clock_shift,
                       help=f"clock shift in J (default: {_sci(_DEFAULTS.clock_shift)})")
    group.add_argument("--amplitude-factor", type=float,
                       default=_DEFAULTS.clock_amplitude_factor,
                       help="clock amplitude factor "
                            f"(default: {_sci(_DEFAULTS.clock_amplitude_factor)})")
    group.add_argument("--radius", type=float, default=_DEFAULTS.radius_of_effect,
                       help="radius of effect in nm "
                            f"(default: {_sci(_DEFAULTS.radius_of_effect)})")
    group.add_argument("--layer-separation", type=float,
                       default=_DEFAULTS.layer_separation,
                       help="layer separation in nm, stored but unused "
                            f"(default: {_sci(_DEFAULTS.layer_separation)})")
    group.add_argument("--gamma", type=float, default=_BDEFAULTS.gamma,
                       help="bistable tunneling energy in J "
                            f"(default: {_sci(_BDEFAULTS.gamma)})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcasim",
        description="QCA layout simulator: kink energies, polarization engines, sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kink", help="pairwise kink energies of a layout")
    _add_layout_arg(p)
    _add_common_args(p)

    p = sub.add_parser("simulate", help="run one simulation on a layout")
    _add_layout_arg(p)
    _add_common_args(p)
    p.add_argument("--stride", type=int, default=100,
                   help="record every N integration steps (default: 100)")

    p = sub.add_parser("truth", help="exhaustive truth-table check")
    _add_layout_arg(p)
    _add_common_args(p)
    p.add_argument("--function", required=True,
                   choices=("inverter", "buffer", "majority", "and", "or"),
                   help="expected logic function of the layout")

    p = sub.add_parser("sweep-temp", help="output polarization vs temperature")
    _add_layout_arg(p)
    _add_common_args(p)
    p.add_argument("--grid", default="table1",
                   help="'table1' or comma-separated temperatures in K "
                        "(default: table1)")

    p = sub.add_parser("sweep-gap", help="output polarization and kink energy vs gap")
    _add_layout_arg(p)
    _add_common_args(p)
    p.add_argument("--grid", default="table2",
                   help="'table2' or comma-separated gaps in nm (default: table2)")
    p.add_argument("--cell", default=None,
                   help="id of the displaced cell (default: the output cell)")

    sub.add_parser("layouts", help="list built-in layout names")
    return parser


def _load_layout(source: str) -> Layout:
    if source.startswith("builtin:"):
        return builtin_layout(source[len("builtin:"):])
    path = Path(source)
    if not path.exists():
        raise _CliError(f"layout file not found: {source}")
    return parse_layout(path.read_text(encoding="utf-8"), name=path.stem)


def _coherence_params(args: argparse.Namespace) -> CoherenceParams:
    return CoherenceParams(
        temperature=args.temperature,
        relaxation_time=args.relaxation_time,
        time_step=args.time_step,
        total_time=args.total_time,
        clock_high=args.clock_high,
        clock_low=args.clock_low,
        clock_shift=args.clock_shift,
        clock_amplitude_factor=args.amplitude_factor,
        radius_of_effect=args.radius,
        layer_separation=args.layer_separation,
    )


def _bistable_params(args: argparse.Namespace) -> BistableParams:
    return BistableParams(gamma=args.gamma, radius_of_effect=args.radius)


def _constants(args: argparse.Namespace, layout: Optional[Layout]) -> PhysicalConstants:
    mode = args.constants
    if mode is None and layout is not None and layout.constants_mode is not None:
        mode = layout.constants_mode
    return PhysicalConstants.for_mode(mode or "paper")


def _parse_grid(text: str, kind: str) -> Sequence[float]:
    if kind == "temperature" and text == "table1":
        return TABLE1_TEMPERATURES
    if kind == "gap" and text in ("table2", "table3"):
        return TABLE23_GAPS
    try:
        return tuple(float(x) for x in text.split(","))
    except ValueError:
        raise _CliError(f"bad grid {text!r}: expected a table name or "
                        "comma-separated numbers") from None


def _snapshot_header(pairs: dict) -> list[str]:
    lines = []
    for key in sorted(pairs):
        value = pairs[key]
        text = _sci(value) if isinstance(value, float) else str(value)
        lines.append(f"# {key}={text}")
    return lines


def _cmd_kink(args: argparse.Namespace, out: TextIO) -> int:
    layout = _load_layout(args.layout)
    constants = _constants(args, layout)
    matrix = kink_matrix(layout, args.radius, constants)
    lines = _snapshot_header({"layout": layout.name, "constants": constants.mode,
                              "radius_of_effect_nm": args.radius})
    lines.append("cell_i,cell_j,kink_energy_J")
    for i, j, energy in matrix.sorted_pairs():
        lines.append(f"{i},{j},{energy:.5e}")
    out.write("\n".join(lines) + "\n")
    return 0


def _cmd_simulate(args: argparse.Namespace, out: TextIO) -> int:
    layout = _load_layout(args.layout)
    constants = _constants(args, layout)
    header = {"layout": layout.name, "constants": constants.mode,
              "engine": args.engine}
    if args.engine == "bistable":
        params = _bistable_params(args)
        matrix = kink_matrix(layout, params.radius_of_effect, constants)
        pols = bistable_relax(layout, matrix, params)
        lines = _snapshot_header({**header, "gamma_J": params.gamma,
                                  "radius_of_effect_nm": params.radius_of_effect})
        lines.append("cell_id,polarization")
        for cell in layout.cells:
            lines.append(f"{cell.id},{pols[cell.id]:.5e}")
        out.write("\n".join(lines) + "\n")
        return 0
    params = _coherence_params(args)
    matrix = kink_matrix(layout, params.radius_of_effect, constants)
    trace = simulate_coherence(layout, matrix, params, constants=constants,
                               record_stride=args.stride)
    lines = _snapshot_header({**header, "temperature_K": params.temperature,
                              "time_step_s": params.time_step,
                              "total_time_s": params.total_time,
                              "record_stride": args.stride})
    columns = ["time_s", "clock0_J", "clock1_J", "clock2_J", "clock3_J"]
    columns += [f"{cid}_P" for cid in trace.cell_ids]
    lines.append(",".join(columns))
    for k in range(trace.times.shape[0]):
        fields = [f"{trace.times[k]:.5e}"]
        fields += [f"{trace.clocks[k, z]:.5e}" for z in range(4)]
        fields += [f"{trace.polarizations[k, i]:.5e}"
                   for i in range(len(trace.cell_ids))]
        lines.append(",".join(fields))
    out.write("\n".join(lines) + "\n")
    return 0


def _cmd_truth(args: argparse.Namespace, out: TextIO) -> int:
    layout = _load_layout(args.layout)
    constants = _constants(args, layout)
    params = (_bistable_params(args) if args.engine == "bistable"
              else _coherence_params(args))
    matrix = kink_matrix(layout, params.radius_of_effect, constants)
    report = truth_table_check(layout, args.engine, params, args.function,
                               matrix, constants)
    lines = _snapshot_header({"layout": layout.name, "constants": constants.mode,
                              "engine": args.engine, "function": args.function,
                              "drivers": "+".join(report.driver_ids)})
    lines.append("inputs,expected,observed,magnitude,result")
    for row in report.rows:
        bits = "".join(str(b) for b in row.inputs)
        observed = "indeterminate" if row.observed is None else str(row.observed)
        result = "pass" if row.passed else "fail"
        lines.append(f"{bits},{row.expected},{observed},{row.magnitude:.5e},{result}")
    total = len(report.rows)
    passed = sum(r.passed for r in report.rows)
    lines.append(f"# summary: {passed}/{total} rows pass")
    out.write("\n".join(lines) + "\n")
    return 0


def _cmd_sweep_temp(args: argparse.Namespace, out: TextIO) -> int:
    layout = _load_layout(args.layout)
    constants = _constants(args, layout)
    grid = _parse_grid(args.grid, "temperature")
    result = sweep_temperature(layout, grid, _coherence_params(args), constants)
    emit_csv(result, out)
    return 0


def _cmd_sweep_gap(args: argparse.Namespace, out: TextIO) -> int:
    layout = _load_layout(args.layout)
    constants = _constants(args, layout)
    grid = _parse_grid(args.grid, "gap")
    cell_id = args.cell or layout.output_cell().id
    params = (_bistable_params(args) if args.engine == "bistable"
              else _coherence_params(args))
    result = sweep_gap(layout, cell_id, grid, args.engine, params, constants)
    emit_csv(result, out)
    return 0


def _cmd_layouts(args: argparse.Namespace, out: TextIO) -> int:
    out.write("\n".join(BUILTIN_NAMES) + "\n")
    return 0


_COMMANDS = {
    "kink": _cmd_kink,
    "simulate": _cmd_simulate,
    "truth": _cmd_truth,
    "sweep-temp": _cmd_sweep_temp,
    "sweep-gap": _cmd_sweep_gap,
    "layouts": _cmd_layouts,
}


def run_cli(argv: Optional[Sequence[str]] = None,
            stdout: Optional[TextIO] = None,
            stderr: Optional[TextIO] = None) -> int:
    """Parse argv and run a subcommand.

    Exit codes: 0 success, 1 domain/validation error (one-line diagnostic
    on stderr), 2 usage error.
    """
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    command = _COMMANDS[args.command]
    try:
        if getattr(args, "out", None):
            with open(args.out, "w", encoding="utf-8", newline="\n") as handle:
                return command(args, handle)
        return command(args, stdout)
    except (_CliError, LayoutError, EngineError, SweepError, ValueError) as exc:
        stderr.write(f"error: {exc}\n")
        return 1
    except OSError as exc:
        stderr.write(f"error: {exc}\n")
        return 1


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
