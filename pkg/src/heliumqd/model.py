"""Physical scales of an electron bound by its image charge above liquid helium.

The image-charge strength of a dielectric with constant ``eps`` is
``Z = (eps - 1) / (4 (eps + 1))``.  With Gaussian units for the charge,

    x0 = hbar**2 / (2 m Z e**2) = a_B / (2 Z)
    E0 = m Z**2 e**4 / (2 hbar**2) = Z**2 Ry

Inside the solvers lengths are measured in ``x0`` and energies in ``E0``;
physical units only appear on the objects defined here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

from .errors import ConfigError, DomainError

HELIUM_EPSILON = 1.05723


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA-2018 values.

    ``elementary_charge_squared`` is e**2 / (4 pi eps_0) in J m, i.e. the
    Gaussian-units e**2 expressed in SI.
    """

    hbar: float = 1.054571817e-34  # J s
    electron_mass: float = 9.1093837015e-31  # kg
    elementary_charge_squared: float = 2.307077552e-28  # J m
    joule_per_ev: float = 1.602176634e-19  # J / eV
    planck_ev_s: float = 4.135667696e-15  # eV s

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(f"physical constant {f.name} must be a positive number, got {value!r}")

    @property
    def bohr_radius(self) -> float:
        """hbar**2 / (m e**2), in meters."""
        return self.hbar**2 / (self.electron_mass * self.elementary_charge_squared)

    @property
    def rydberg_ev(self) -> float:
        """m e**4 / (2 hbar**2) = e**2 / (2 a_B), in eV."""
        return self.elementary_charge_squared / (2.0 * self.bohr_radius) / self.joule_per_ev

    @classmethod
    def from_mapping(cls, values: dict) -> "PhysicalConstants":
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise ConfigError(f"unknown physical constant(s): {', '.join(sorted(unknown))}")
        return replace(cls(), **{k: float(v) for k, v in values.items()})


CODATA_2018 = PhysicalConstants()


@dataclass(frozen=True)
class MaterialScales:
    epsilon: float
    z_strength: float
    x0: float  # nm
    e0_ghz: float
    e0_ev: float
    constants: PhysicalConstants = field(default=CODATA_2018, repr=False)

    def __post_init__(self):
        if not self.z_strength > 0:
            raise DomainError("image-charge strength must be positive")
        if not self.x0 > 0:
            raise DomainError("length scale x0 must be positive")
        expected = self.e0_ghz * self.constants.planck_ev_s * 1e9
        if not math.isclose(self.e0_ev, expected, rel_tol=1e-12):
            raise DomainError(f"e0_ev={self.e0_ev!r} inconsistent with e0_ghz={self.e0_ghz!r}")


def derive_scales(epsilon: float = HELIUM_EPSILON, constants: PhysicalConstants = CODATA_2018) -> MaterialScales:
    """Length and energy scales for a dielectric constant ``epsilon > 1``."""
    if not (math.isfinite(epsilon) and epsilon > 1.0):
        raise DomainError(f"epsilon must exceed 1 for bound states, got {epsilon!r}")
    z = (epsilon - 1.0) / (4.0 * (epsilon + 1.0))
    x0_nm = constants.bohr_radius / (2.0 * z) * 1e9
    e0_ev = z * z * constants.rydberg_ev
    e0_ghz = e0_ev / constants.planck_ev_s * 1e-9
    return MaterialScales(
        epsilon=epsilon,
        z_strength=z,
        x0=x0_nm,
        e0_ghz=e0_ghz,
        e0_ev=e0_ghz * constants.planck_ev_s * 1e9,
        constants=constants,
    )


def ghz_to_ev(f: float, constants: PhysicalConstants = CODATA_2018) -> float:
    return f * (constants.planck_ev_s * 1e9)


def ev_to_ghz(e: float, constants: PhysicalConstants = CODATA_2018) -> float:
    return e / (constants.planck_ev_s * 1e9)
