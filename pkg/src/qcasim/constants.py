"""Physical constants used throughout the simulator.

Two modes are provided: "paper" uses the rounded Coulomb constant and
electron charge commonly quoted in the QCA literature (k = 9e9 N m^2/C^2,
e = 1.6e-19 C, so k*e^2 = 23.04e-29 J m); "codata" uses the CODATA exact
values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

BOLTZMANN_K = 1.380649e-23  # J/K
HBAR = 1.054571817e-34      # J s


@dataclass(frozen=True)
class PhysicalConstants:
    coulomb_k: float            # N m^2 / C^2
    electron_charge: float      # C
    relative_permittivity: float = 1.0
    boltzmann_k: float = BOLTZMANN_K
    hbar: float = HBAR
    mode: str = "paper"

    def __post_init__(self) -> None:
        for name in ("coulomb_k", "electron_charge", "relative_permittivity",
                     "boltzmann_k", "hbar"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")

    @classmethod
    def paper(cls) -> "PhysicalConstants":
        return cls(coulomb_k=9.0e9, electron_charge=1.6e-19, mode="paper")

    @classmethod
    def codata(cls) -> "PhysicalConstants":
        return cls(coulomb_k=8.9875517873681764e9,
                   electron_charge=1.602176634e-19, mode="codata")

    @classmethod
    def for_mode(cls, mode: str) -> "PhysicalConstants":
        if mode == "paper":
            return cls.paper()
        if mode == "codata":
            return cls.codata()
        raise ValueError(f"unknown constants mode {mode!r} (expected 'paper' or 'codata')")
