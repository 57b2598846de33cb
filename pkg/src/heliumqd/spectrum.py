"""Closed-form bound-state spectrum of the whole-axis image potential.

The contact coupling ``lam`` and the quantum defect ``delta`` are tied by
``lam = pi cot(pi delta)``; the eigenvalue condition ``cot(pi s) = -lam/pi``
is then solved by ``s = n - delta`` and ``E_n = -E0 / s**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, LimitError
from .model import MaterialScales
from .specfun import cotpi, log_gamma, sinpi

N_MAX = 50


@dataclass(frozen=True)
class DefectParams:
    """Contact coupling and quantum defect; build with ``from_delta`` or ``from_lambda``."""

    lam: float
    delta: float

    def __post_init__(self):
        if not (0.0 < self.delta < 1.0):
            raise DomainError(f"delta must lie in (0, 1), got {self.delta!r}")
        if not math.isfinite(self.lam):
            raise DomainError(f"lambda must be finite, got {self.lam!r}")
        implied = math.pi * cotpi(self.delta)
        # |d lam / d delta| = pi**2 / sin(pi delta)**2 amplifies the rounding of delta
        slack = 4.0 * 2.2e-16 * self.delta * (math.pi / sinpi(self.delta)) ** 2
        if abs(implied - self.lam) > 1e-12 * max(1.0, abs(self.lam)) + slack:
            raise DomainError(f"lambda={self.lam!r} and delta={self.delta!r} are inconsistent")

    @classmethod
    def from_delta(cls, delta: float) -> "DefectParams":
        if not (0.0 < delta < 1.0):
            raise DomainError(f"delta must lie in (0, 1), got {delta!r}")
        return cls(lam=math.pi * cotpi(delta), delta=delta)

    @classmethod
    def from_lambda(cls, lam: float) -> "DefectParams":
        return defect_from_lambda(lam)


@dataclass(frozen=True)
class BoundState:
    """One eigenstate.  ``norm`` is N in units of x0**-1/2."""

    n: int
    s: float
    energy_e0: float
    norm: float
    energy_ghz: float
    energy_ev: float


def defect_from_lambda(lam: float) -> DefectParams:
    """Invert ``lam = pi cot(pi delta)`` on the branch delta in (0, 1)."""
    if not math.isfinite(lam):
        raise DomainError(f"lambda must be finite, got {lam!r}")
    if lam == 0.0:
        delta = 0.5
    elif abs(lam) < 1.0:
        delta = 0.5 - math.atan(lam / math.pi) / math.pi
    elif lam > 0.0:
        delta = math.atan(math.pi / lam) / math.pi
    else:
        delta = 1.0 - math.atan(math.pi / -lam) / math.pi
    if not 0.0 < delta < 1.0:
        raise DomainError(f"lambda={lam!r} is too large to resolve delta in double precision")
    return DefectParams(lam=lam, delta=delta)


def eigencondition_residual(s: float, params: DefectParams) -> float:
    """cot(pi s) + lam/pi, which vanishes on the eigen-indices."""
    if not s > 0.0:
        raise DomainError(f"s must be positive, got {s!r}")
    if s == math.floor(s):
        raise DomainError(f"s = {s!r} is an integer (pole of cot)")
    return cotpi(s) + params.lam / math.pi


def _check_n(n: int) -> None:
    if int(n) != n or n < 1:
        raise DomainError(f"principal index must be an integer >= 1, got {n!r}")


def normalization(s: float) -> float:
    """N = 1 / |sqrt(2 s) Gamma(1-s) Gamma(1+s)|, lengths in units of x0."""
    log_n = -(0.5 * math.log(2.0 * s) + log_gamma(1.0 - s).log_abs + log_gamma(1.0 + s).log_abs)
    return math.exp(log_n)


def normalization_reflection(s: float) -> float:
    """Same constant through Gamma(1-s) Gamma(1+s) = pi s / sin(pi s)."""
    return abs(sinpi(s)) / (math.sqrt(2.0 * s) * math.pi * s)


def level(n: int, params: DefectParams, scales: MaterialScales) -> BoundState:
    _check_n(n)
    s = n - params.delta
    energy = -1.0 / (s * s)
    return BoundState(
        n=int(n),
        s=s,
        energy_e0=energy,
        norm=normalization(s),
        energy_ghz=energy * scales.e0_ghz,
        energy_ev=energy * scales.e0_ev,
    )


def mean_x(n: int, params: DefectParams, scales: MaterialScales) -> float:
    """Closed-form <x>_n = x0 [3 n**2 - delta (2 n - delta)], in nm.

    Quadrature of the eigenfunction gives 3 (n - delta)**2 x0 instead; the
    two coincide only as delta -> 0 (see ``wavefunction.quadrature_mean_x``).
    """
    _check_n(n)
    d = params.delta
    return scales.x0 * (3.0 * n * n - d * (2.0 * n - d))


def spectrum_table(n_max: int, params: DefectParams, scales: MaterialScales) -> list[BoundState]:
    if int(n_max) != n_max or n_max < 1:
        raise DomainError(f"n_max must be a positive integer, got {n_max!r}")
    if n_max > N_MAX:
        raise LimitError(f"n_max={n_max} exceeds the supported maximum of {N_MAX}")
    return [level(n, params, scales) for n in range(1, int(n_max) + 1)]
