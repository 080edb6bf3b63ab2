"""Pairwise Coulomb configuration energies and kink energies.

The kink energy between two cells is the electrostatic cost of holding
them at opposite rather than equal polarization:

    E_kink(A, B) = E_config(A:+1, B:-1) - E_config(A:+1, B:+1)

Two charge models are available for the configuration energy:

``neutralized`` (default)
    Every dot carries its electron occupancy charge plus a +e/2
    neutralizing background, i.e. -e/2 on the occupied diagonal and +e/2
    on the empty one. Each cell is then a pure quadrupole, the kink energy
    is exactly symmetric in its arguments for any cell rotations, and
    in-line couplings dominate diagonal ones (which is what makes the
    majority gate compute a majority).

``electron``
    Only the two mobile electrons carry charge (-e each); the 2x2
    electron-electron sum. Simpler, but diagonal couplings come out
    stronger than in-line ones.

Positive kink energy means equal polarization is favored (wire-like
coupling); negative means opposite polarization is favored (inverting
coupling, e.g. diagonally placed cells).

All energies are in joules; distances between dots are taken in meters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

from .constants import PhysicalConstants
from .geometry import Cell, Layout, cells_overlap, dot_positions, electron_dots

NM_TO_M = 1e-9

CHARGE_MODELS = ("neutralized", "electron")
DEFAULT_CHARGE_MODEL = "neutralized"


class ElectrostaticsError(ValueError):
    """Degenerate geometry or invalid physical arguments."""


def coulomb_pair(q1: float, q2: float, r: float, constants: PhysicalConstants) -> float:
    """Coulomb energy k*q1*q2/(eps_r*r) of two point charges r meters apart."""
    if r <= 0:
        raise ElectrostaticsError(f"distance must be strictly positive, got {r}")
    return constants.coulomb_k * q1 * q2 / (constants.relative_permittivity * r)


def _dot_charges(cell: Cell, polarization_sign: float, model: str,
                 constants: PhysicalConstants) -> list[float]:
    e = constants.electron_charge
    occupied = electron_dots(polarization_sign)
    if model == "electron":
        return [-e if i in occupied else 0.0 for i in range(4)]
    if model == "neutralized":
        return [-e / 2 if i in occupied else e / 2 for i in range(4)]
    raise ElectrostaticsError(f"unknown charge model {model!r}")


def config_energy(cell_a: Cell, pol_a: float, cell_b: Cell, pol_b: float,
                  constants: PhysicalConstants,
                  charge_model: str = DEFAULT_CHARGE_MODEL) -> float:
    """Intercellular electrostatic energy for one polarization assignment.

    Sums coulomb_pair over all cross-cell dot pairs carrying charge, in
    fixed order (cell with the lower id first, dots in numbering order) so
    the result is bit-for-bit deterministic.
    """
    if cells_overlap(cell_a, cell_b):
        raise ElectrostaticsError(f"cells {cell_a.id!r} and {cell_b.id!r} overlap")
    if cell_b.id < cell_a.id:
        cell_a, pol_a, cell_b, pol_b = cell_b, pol_b, cell_a, pol_a
    dots_a = dot_positions(cell_a)
    dots_b = dot_positions(cell_b)
    charges_a = _dot_charges(cell_a, pol_a, charge_model, constants)
    charges_b = _dot_charges(cell_b, pol_b, charge_model, constants)
    total = 0.0
    for (xa, ya), qa in zip(dots_a, charges_a):
        if qa == 0.0:
            continue
        for (xb, yb), qb in zip(dots_b, charges_b):
            if qb == 0.0:
                continue
            r = math.hypot(xa - xb, ya - yb) * NM_TO_M
            if r == 0.0:
                raise ElectrostaticsError(
                    f"coincident dots between cells {cell_a.id!r} and {cell_b.id!r}")
            total += coulomb_pair(qa, qb, r, constants)
    return total


def kink_energy_pair(cell_a: Cell, cell_b: Cell, constants: PhysicalConstants,
                     charge_model: str = DEFAULT_CHARGE_MODEL) -> float:
    """Kink energy, Eq-style opposite-minus-same configuration energies.

    Evaluated with the lower-id cell as the reference so the result is
    symmetric under argument swap regardless of charge model.
    """
    if cell_b.id < cell_a.id:
        cell_a, cell_b = cell_b, cell_a
    opposite = config_energy(cell_a, +1.0, cell_b, -1.0, constants, charge_model)
    same = config_energy(cell_a, +1.0, cell_b, +1.0, constants, charge_model)
    return opposite - same


@dataclass(frozen=True)
class KinkMatrix:
    """Sparse symmetric map of pairwise kink energies within a cutoff radius."""

    pairs: dict  # (id_i, id_j) with id_i < id_j -> energy in J
    radius_of_effect: float  # nm

    def get(self, cell_i: str, cell_j: str) -> float:
        """Kink energy of a pair, 0.0 if beyond the radius of effect."""
        key = (cell_i, cell_j) if cell_i < cell_j else (cell_j, cell_i)
        return self.pairs.get(key, 0.0)

    def sorted_pairs(self) -> list[tuple[str, str, float]]:
        return [(i, j, self.pairs[(i, j)]) for i, j in sorted(self.pairs)]

    def __len__(self) -> int:
        return len(self.pairs)


def kink_matrix(layout: Layout, radius_of_effect: float,
                constants: PhysicalConstants,
                charge_model: str = DEFAULT_CHARGE_MODEL) -> KinkMatrix:
    """Kink energies for every unordered pair within the radius of effect.

    The radius cutoff applies to center-to-center distance in nm. Pairs are
    evaluated in sorted id order, so the result is deterministic.
    """
    if radius_of_effect <= 0:
        raise ElectrostaticsError("radius_of_effect must be strictly positive")
    cells = sorted(layout.cells, key=lambda c: c.id)
    pairs: dict[tuple[str, str], float] = {}
    for i, a in enumerate(cells):
        for b in cells[i + 1:]:
            if math.dist(a.center, b.center) <= radius_of_effect:
                pairs[(a.id, b.id)] = kink_energy_pair(a, b, constants, charge_model)
    return KinkMatrix(pairs=pairs, radius_of_effect=radius_of_effect)
