"""Finite-difference ground truth for the bound spectrum.

The operator ``H = -4 d^2/dxi^2 - 4/xi + 4 lam delta(xi)`` (lengths in x0,
energies in E0) is discretized on the offset grid ``xi_j = (j + 1/2) h - L``
so that no node sits on the interface.  The contact term is imposed through
the interface value ``Phi(0) = (Phi_- + Phi_+) / (2 + lam h / 2)``, which is
what the discrete jump condition gives for half-cell fluxes.  To leading
order this adds ``lam/h`` to the two central diagonal entries and to the
coupling between them; the exact form keeps second-order convergence and
reduces to an antisymmetric (Dirichlet) wall as ``lam -> inf``.

Eigenvalues come from Sturm-sequence counts and bisection; no special
function is used anywhere in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import ConfigError, ConvergenceError
from .model import MaterialScales
from .spectrum import DefectParams

BISECTION_TOL = 1e-12
_SAFE_MIN = 2.2250738585072014e-308


@dataclass(frozen=True)
class GridProblem:
    """Symmetric tridiagonal Hamiltonian; ``half_width`` and ``spacing`` are in x0."""

    half_width: float
    n_points: int
    diag: np.ndarray
    offdiag: np.ndarray
    spacing: float
    kind: str = "model"
    params: Optional[DefectParams] = None
    scales: Optional[MaterialScales] = None
    rebuild: Optional[Callable[[int], "GridProblem"]] = field(default=None, repr=False, compare=False)

    @classmethod
    def from_arrays(cls, diag: Sequence[float], offdiag: Sequence[float]) -> "GridProblem":
        d = np.asarray(diag, dtype=float)
        e = np.asarray(offdiag, dtype=float)
        if e.shape != (max(len(d) - 1, 0),):
            raise ConfigError("offdiag must have exactly len(diag) - 1 entries")
        return cls(half_width=float("nan"), n_points=len(d), diag=d, offdiag=e, spacing=float("nan"), kind="matrix")

    def nodes(self) -> np.ndarray:
        if self.kind == "wall":
            return (np.arange(self.n_points) + 0.5) * self.spacing
        return (np.arange(self.n_points) + 0.5) * self.spacing - self.half_width

    def dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)


@dataclass(frozen=True)
class OracleSpectrum:
    eigenvalues_e0: tuple
    resolution: dict
    richardson_extrapolated: bool = False
    measured_order: Optional[tuple] = None
    raw: tuple = ()


def check_grid(half_width: float, n_points: int, min_width: float = 40.0) -> None:
    if int(n_points) != n_points or n_points < 500 or n_points % 2:
        raise ConfigError(f"n_points must be an even integer >= 500, got {n_points!r}")
    if not half_width >= min_width:
        raise ConfigError(f"half-width L must be at least {min_width:g} x0, got {half_width!r}")


def build_grid(params: DefectParams, scales: MaterialScales, L: float, n_points: int) -> GridProblem:
    """Whole-axis model Hamiltonian on [-L, L]; ``L`` in units of x0."""
    check_grid(L, n_points)
    h = 2.0 * L / n_points
    denom = 2.0 + 0.5 * params.lam * h
    if denom <= 0.0:
        raise ConfigError(f"grid spacing h={h:g} x0 too coarse for lambda={params.lam:g}")
    c = 1.0 / denom
    x = (np.arange(n_points) + 0.5) * h - L
    inv_h2 = 1.0 / (h * h)
    diag = 8.0 * inv_h2 - 4.0 / x
    off = np.full(n_points - 1, -4.0 * inv_h2)
    i = n_points // 2
    for j in (i - 1, i):
        diag[j] = 4.0 * inv_h2 + 8.0 * (1.0 - c) * inv_h2 - 4.0 / x[j]
    off[i - 1] = -8.0 * c * inv_h2
    return GridProblem(
        half_width=float(L),
        n_points=int(n_points),
        diag=diag,
        offdiag=off,
        spacing=h,
        kind="model",
        params=params,
        scales=scales,
        rebuild=lambda m: build_grid(params, scales, L, m),
    )


def build_wall_grid(L: float, n_points: int, scales: Optional[MaterialScales] = None) -> GridProblem:
    """Binding side only, hard wall at x = 0: the hydrogenic reference problem on [0, L]."""
    check_grid(L, n_points)
    h = L / n_points
    x = (np.arange(n_points) + 0.5) * h
    inv_h2 = 1.0 / (h * h)
    diag = 8.0 * inv_h2 - 4.0 / x
    diag[0] += 4.0 * inv_h2  # antisymmetric ghost node at -h/2
    off = np.full(n_points - 1, -4.0 * inv_h2)
    return GridProblem(
        half_width=float(L),
        n_points=int(n_points),
        diag=diag,
        offdiag=off,
        spacing=h,
        kind="wall",
        scales=scales,
        rebuild=lambda m: build_wall_grid(L, m, scales),
    )


def build_custom_grid(potential: Callable[[np.ndarray], np.ndarray], L: float, n_points: int) -> GridProblem:
    """Same kinetic stencil with an arbitrary smooth potential (in E0 units)."""
    check_grid(L, n_points, min_width=0.0)
    h = 2.0 * L / n_points
    x = (np.arange(n_points) + 0.5) * h - L
    inv_h2 = 1.0 / (h * h)
    diag = 8.0 * inv_h2 + np.asarray(potential(x), dtype=float)
    off = np.full(n_points - 1, -4.0 * inv_h2)
    return GridProblem(
        half_width=float(L),
        n_points=int(n_points),
        diag=diag,
        offdiag=off,
        spacing=h,
        kind="custom",
        rebuild=lambda m: build_custom_grid(potential, L, m),
    )


def sturm_count(diag: Sequence[float], off_sq: Sequence[float], x: float, pivmin: float = 0.0) -> int:
    """Number of eigenvalues strictly below ``x`` (negative LDL^T pivots).

    Pivots smaller than ``pivmin`` in magnitude are replaced by ``-pivmin``.
    """
    if pivmin <= 0.0:
        pivmin = _pivmin(off_sq)
    q = diag[0] - x
    if abs(q) < pivmin:
        q = -pivmin
    count = 1 if q < 0.0 else 0
    for d, e2 in zip(diag[1:], off_sq):
        q = d - x - e2 / q
        if abs(q) < pivmin:
            q = -pivmin
        if q < 0.0:
            count += 1
    return count


def _pivmin(off_sq: Sequence[float]) -> float:
    return _SAFE_MIN * max([1.0, *off_sq])


def _gershgorin(diag: np.ndarray, off: np.ndarray) -> tuple[float, float]:
    radius = np.zeros_like(diag)
    radius[:-1] += np.abs(off)
    radius[1:] += np.abs(off)
    return float(np.min(diag - radius)), float(np.max(diag + radius))


def tridiagonal_lowest(diag: Sequence[float], off: Sequence[float], k: int, tol: float = BISECTION_TOL) -> list[float]:
    """The ``k`` smallest eigenvalues of a symmetric tridiagonal matrix by bisection."""
    d = np.asarray(diag, dtype=float)
    e = np.asarray(off, dtype=float)
    n = len(d)
    if not 1 <= k <= n:
        raise ConfigError(f"cannot extract {k} eigenvalues from a {n}x{n} matrix")
    lo0, hi0 = _gershgorin(d, e)
    span = max(hi0 - lo0, 1.0)
    lo0 -= 1e-12 * span + tol
    hi0 += 1e-12 * span + tol
    dl = d.tolist()
    e2 = (e * e).tolist()
    piv = _pivmin(e2)
    if sturm_count(dl, e2, lo0, piv) != 0 or sturm_count(dl, e2, hi0, piv) != n:
        raise ConvergenceError("Gershgorin interval does not bracket the spectrum")
    # upper[i]: smallest probe known to have more than i eigenvalues below it
    upper = [hi0] * k
    values = []
    lo = lo0
    for i in range(k):
        hi = upper[i]
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            c = sturm_count(dl, e2, mid, piv)
            if c > i:
                hi = mid
                for j in range(i + 1, min(c, k)):
                    if mid < upper[j]:
                        upper[j] = mid
            else:
                lo = mid
        values.append(0.5 * (lo + hi))
        # the next eigenvalue is not below this one
        lo = values[-1] - tol
    return values


def lowest_eigenvalues(problem: GridProblem, k: int) -> OracleSpectrum:
    if not 1 <= k <= 10:
        raise ConfigError(f"k must lie in [1, 10], got {k!r}")
    vals = tridiagonal_lowest(problem.diag, problem.offdiag, k)
    return OracleSpectrum(
        eigenvalues_e0=tuple(vals),
        resolution={"half_width": problem.half_width, "n_points": (problem.n_points,), "spacing": problem.spacing},
        raw=(tuple(vals),),
    )


def refine_and_extrapolate(
    problem: GridProblem, k: int, levels: int = 2, order: Optional[float] = None
) -> OracleSpectrum:
    """Richardson extrapolation over ``levels`` grids, each twice as fine as the last.

    With three levels the order is measured per eigenvalue from successive
    differences; with two it is ``order`` (default 2, the stencil's nominal
    order).
    """
    if levels not in (2, 3):
        raise ConfigError(f"levels must be 2 or 3, got {levels!r}")
    if problem.rebuild is None:
        raise ConfigError("problem cannot be rebuilt at a finer resolution")
    grids = [problem] + [problem.rebuild(problem.n_points * 2**j) for j in range(1, levels)]
    runs = [np.array(lowest_eigenvalues(g, k).eigenvalues_e0) for g in grids]
    if levels == 2:
        p = np.full(k, 2.0 if order is None else float(order))
        measured = None
    else:
        d1 = runs[0] - runs[1]
        d2 = runs[1] - runs[2]
        with np.errstate(divide="ignore", invalid="ignore"):
            p = np.log2(d1 / d2)
        measured = tuple(float(v) for v in p)
        if order is not None:
            p = np.full(k, float(order))
        p = np.where(np.isfinite(p) & (p > 0.25), p, 2.0)
    fine, coarse = runs[-1], runs[-2]
    extrapolated = fine + (fine - coarse) / (2.0**p - 1.0)
    return OracleSpectrum(
        eigenvalues_e0=tuple(float(v) for v in extrapolated),
        resolution={
            "half_width": problem.half_width,
            "n_points": tuple(g.n_points for g in grids),
            "spacing": tuple(g.spacing for g in grids),
        },
        richardson_extrapolated=True,
        measured_order=measured,
        raw=tuple(tuple(float(v) for v in r) for r in runs),
    )
