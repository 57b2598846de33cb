"""Transmission through the contact barrier above the continuum threshold."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError
from .model import MaterialScales
from .spectrum import DefectParams


@dataclass(frozen=True)
class TransmissionCurve:
    points: list  # (energy_ev, T)
    barrier_ebar_ev: float

    def to_csv_rows(self, fmt=repr) -> list[str]:
        return ["energy_ev,T"] + [f"{fmt(e)},{fmt(t)}" for e, t in self.points]


def barrier_energy(params: DefectParams, scales: MaterialScales) -> float:
    """lam**2 E0 in eV: the energy at which half of the flux is transmitted."""
    return params.lam**2 * scales.e0_ev


def transmission(energy_ev: float, params: DefectParams, scales: MaterialScales) -> float:
    """T = 1 / (1 + lam**2 E0 / E) for E > 0 given in eV."""
    if not (energy_ev > 0.0) or not math.isfinite(energy_ev):
        raise DomainError(f"transmission needs a positive finite energy, got {energy_ev!r}")
    return 1.0 / (1.0 + barrier_energy(params, scales) / energy_ev)


def transmission_curve(
    params: DefectParams,
    scales: MaterialScales,
    e_min_ev: float,
    e_max_ev: float,
    points: int,
    include_barrier: bool = True,
) -> TransmissionCurve:
    """T(E) on a logarithmic energy grid; E-bar is spliced in when it lies in range."""
    if not (0.0 < e_min_ev < e_max_ev) or points < 2:
        raise DomainError("need 0 < e_min < e_max and at least two points")
    ratio = math.log(e_max_ev / e_min_ev)
    energies = [e_min_ev * math.exp(ratio * i / (points - 1)) for i in range(points)]
    energies[-1] = e_max_ev
    ebar = barrier_energy(params, scales)
    if include_barrier and e_min_ev < ebar < e_max_ev and ebar not in energies:
        energies.append(ebar)
        energies.sort()
    return TransmissionCurve([(e, transmission(e, params, scales)) for e in energies], ebar)
