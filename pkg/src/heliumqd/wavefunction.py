"""Piecewise eigenfunctions and the quantities computed from them.

With ``z = |x| / (s x0)`` the eigenfunction is

    Phi(x) = N Gamma(1 - s) W_{s,1/2}(z)     x >= 0
    Phi(x) = N Gamma(1 + s) W_{-s,1/2}(z)    x <= 0

Each branch tends to N as z -> 0 because W_{kappa,1/2}(0+) = 1/Gamma(1 - kappa),
so continuity at the interface holds by construction.  The variant with
Gamma(s - 1) and Gamma(s + 1) prefactors is available as
``prefactors="literal"``; it is discontinuous at x = 0 and not normalized.

Internally x is measured in units of x0 ("xi") and Phi in x0**-1/2.  The
public functions take lengths in nm and return Phi in nm**-1/2.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Literal

from scipy import integrate

from .errors import AccuracyError, DomainError
from .model import MaterialScales
from .spectrum import BoundState, DefectParams
from .specfun import log_gamma, whittaker_w_half

log = logging.getLogger(__name__)

Prefactors = Literal["continuous", "literal"]

# quadrature tolerances, in units where Phi is normalized to 1
_QUAD_EPSABS = 1e-13
_QUAD_EPSREL = 1e-12
_MAX_QUAD_ERROR = 1e-8
NEGATIVE_Z_MAX = 60.0


@dataclass(frozen=True)
class WavefunctionProfile:
    state: BoundState
    samples: list  # (x_nm, phi) pairs, phi in nm**-1/2
    branch_scale_pos: float
    branch_scale_neg: float
    x0: float

    def to_csv_rows(self, fmt: Callable[[float], str] = repr) -> list[str]:
        rows = ["x_nm,x_over_x0,phi"]
        for x, phi in self.samples:
            rows.append(f"{fmt(x)},{fmt(x / self.x0)},{fmt(phi)}")
        return rows


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error: float


def branch_prefactors(state: BoundState, prefactors: Prefactors = "continuous") -> tuple[float, float]:
    """Prefactors (positive side, negative side) multiplying N W_{+-s,1/2}."""
    s = state.s
    if prefactors == "continuous":
        pos, neg = log_gamma(1.0 - s), log_gamma(1.0 + s)
    elif prefactors == "literal":
        pos, neg = log_gamma(s - 1.0), log_gamma(s + 1.0)
    else:
        raise ValueError(f"unknown prefactor convention {prefactors!r}")
    return pos.value, neg.value


def phi_reduced(xi: float, state: BoundState, prefactors: Prefactors = "continuous") -> float:
    """Phi at x = xi * x0, in units of x0**-1/2."""
    pos, neg = branch_prefactors(state, prefactors)
    if xi >= 0.0:
        kappa, pref = state.s, pos
    else:
        kappa, pref = -state.s, neg
    if xi == 0.0:
        # W_{kappa,1/2}(0+) = 1/Gamma(1 - kappa)
        lg = log_gamma(1.0 - kappa)
        return state.norm * pref * lg.sign * math.exp(-lg.log_abs)
    w = whittaker_w_half(kappa, abs(xi) / state.s)
    return state.norm * pref * w.value


def evaluate_phi(
    x: float,
    state: BoundState,
    params: DefectParams,
    scales: MaterialScales,
    prefactors: Prefactors = "continuous",
) -> float:
    """Phi(x) for x in nm, in nm**-1/2."""
    return phi_reduced(x / scales.x0, state, prefactors) / math.sqrt(scales.x0)


def literal_discontinuity(state: BoundState) -> float:
    """Phi(0+) - Phi(0-) relative to |Phi(0-)| under the literal prefactors."""
    right = phi_reduced(1e-300, state, "literal")
    left = phi_reduced(-1e-300, state, "literal")
    return (right - left) / abs(left)


def continuity_residual(state: BoundState, h: float | None = None) -> float:
    """|Phi(+h) - Phi(-h)| / |Phi(0)| with h in units of x0.

    ``h=None`` compares the two branches at x = +-1e-300 x0, i.e. their
    one-sided limits.  For finite h the residual includes the genuine
    O(h |ln h|) variation of Phi across the interface.
    """
    step = 1e-300 if h is None else h
    right = phi_reduced(step, state)
    left = phi_reduced(-step, state)
    return abs(right - left) / abs(phi_reduced(0.0, state))


def _slope(state: BoundState, xi: float, d: float) -> float:
    # Richardson-improved central difference, the stencil stays on one side of 0
    def central(step):
        return (phi_reduced(xi + step, state) - phi_reduced(xi - step, state)) / (2.0 * step)

    return (4.0 * central(0.5 * d) - central(d)) / 3.0


def jump_residual(state: BoundState, params: DefectParams, scales: MaterialScales, h: float) -> float:
    """Relative defect of the contact condition Phi'(+h) - Phi'(-h) = (lam/x0) Phi(0).

    ``h`` is in nm and must satisfy 0 < h <= 1e-3 x0.  The result is divided
    by max(|lam|, 1) |Phi(0)| / x0 so that lam = 0 stays well defined.
    """
    hx = h / scales.x0
    if not (0.0 < hx <= 1e-3):
        raise DomainError(f"h must lie in (0, 1e-3 x0], got h/x0 = {hx!r}")
    d = 0.25 * hx
    jump = _slope(state, hx, d) - _slope(state, -hx, d)
    phi0 = phi_reduced(0.0, state)
    return (jump - params.lam * phi0) / (max(abs(params.lam), 1.0) * abs(phi0))


def positive_z_max(s: float) -> float:
    """Cut-off in z beyond which the positive-side density z**2s exp(-z) is negligible."""
    return min(2.0 * s + 12.0 * math.sqrt(2.0 * s) + 40.0, 200.0)


def _integrate(f: Callable[[float], float], a: float, b: float, points) -> QuadratureResult:
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(
                f, a, b, points=points, limit=400, epsabs=_QUAD_EPSABS, epsrel=_QUAD_EPSREL
            )
        except integrate.IntegrationWarning as exc:
            raise AccuracyError(f"quadrature on [{a}, {b}] did not converge: {exc}") from exc
    return QuadratureResult(val, err)


def integrate_moment(
    phi: Callable[[float], float], s: float, power: int = 0
) -> QuadratureResult:
    """Integral of xi**power * phi(xi)**2 over the whole axis (xi in units of x0)."""
    xi_pos = s * positive_z_max(s)
    xi_neg = s * NEGATIVE_Z_MAX
    tail = s * (phi(xi_pos) ** 2 * xi_pos**power + phi(-xi_neg) ** 2 * xi_neg**power)
    if tail > 1e-12:
        raise AccuracyError(f"integration cut-off too short, tail estimate {tail:.2e}")

    def density(xi):
        return xi**power * phi(xi) ** 2

    # breakpoints resolve the oscillation region of the binding side
    bumps = [s * z for z in (0.5, 2.0, 4.0 * s, 8.0 * s, 16.0 * s) if s * z < xi_pos]
    pos = _integrate(density, 0.0, xi_pos, sorted(set(bumps)))
    neg = _integrate(density, -xi_neg, 0.0, [-s, -4.0 * s])
    return QuadratureResult(pos.value + neg.value, pos.error + neg.error + tail)


def quadrature_norm(state: BoundState, params: DefectParams, scales: MaterialScales) -> float:
    """Integral of Phi**2 over the whole axis; 1 for a correctly normalized state."""
    res = integrate_moment(lambda xi: phi_reduced(xi, state), state.s, 0)
    if res.error > _MAX_QUAD_ERROR:
        raise AccuracyError(f"norm quadrature error {res.error:.2e} too large")
    return res.value


def quadrature_mean_x(state: BoundState, params: DefectParams, scales: MaterialScales) -> float:
    """Integral of x Phi**2, in nm."""
    return quadrature_mean_x_result(state, scales).value * scales.x0


def quadrature_mean_x_result(state: BoundState, scales: MaterialScales) -> QuadratureResult:
    """<x> in units of x0 with its quadrature error bound."""
    res = integrate_moment(lambda xi: phi_reduced(xi, state), state.s, 1)
    if res.error > _MAX_QUAD_ERROR * max(1.0, abs(res.value)):
        raise AccuracyError(f"<x> quadrature error {res.error:.2e} too large")
    return res


def count_nodes(state: BoundState, samples: int = 4000) -> int:
    """Sign changes of Phi on x > 0."""
    z_max = positive_z_max(state.s)
    count = 0
    prev = phi_reduced(0.0, state)
    for i in range(1, samples + 1):
        cur = phi_reduced(state.s * z_max * i / samples, state)
        if cur == 0.0:
            continue
        if prev != 0.0 and (cur > 0.0) != (prev > 0.0):
            count += 1
        prev = cur
    return count


def profile(
    state: BoundState,
    params: DefectParams,
    scales: MaterialScales,
    x_min: float,
    x_max: float,
    samples: int,
    prefactors: Prefactors = "continuous",
) -> WavefunctionProfile:
    """Sample Phi on ``samples`` equally spaced points of [x_min, x_max] (nm)."""
    if samples < 2 or not x_max > x_min:
        raise DomainError("need samples >= 2 and x_max > x_min")
    if prefactors == "literal":
        log.warning(
            "literal prefactors: Phi(0+) - Phi(0-) = %.6g |Phi(0-)| for n=%d",
            literal_discontinuity(state),
            state.n,
        )
    pos, neg = branch_prefactors(state, prefactors)
    step = (x_max - x_min) / (samples - 1)
    rows = []
    for i in range(samples):
        x = x_min + i * step if i < samples - 1 else x_max
        rows.append((x, evaluate_phi(x, state, params, scales, prefactors)))
    return WavefunctionProfile(state, rows, pos, neg, scales.x0)
