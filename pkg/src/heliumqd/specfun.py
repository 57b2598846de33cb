"""Special functions for the whole-axis Coulomb problem.

Everything is real-valued double precision:

* ``log_gamma`` -- log|Gamma(x)| with the sign of Gamma(x), reflection for x < 0.
* ``digamma`` -- psi(x) by upward recurrence and the Stirling-type series.
* ``whittaker_w_half`` -- W_{kappa,1/2}(z) for z > 0.

The Whittaker function is handled through the reduced function

    y(z) = z U(1 - kappa, 2, z),       W_{kappa,1/2}(z) = exp(-z/2) y(z),

which satisfies the Kummer-type equation ``z y'' - z y' + kappa y = 0``.
Three routes evaluate ``y``:

``log_series``
    The logarithmic expansion of U(a, n + 1, z) for n = 1 (integer second
    parameter).  Exact-integer ``kappa >= 1`` collapses it to a polynomial.
``asymptotic``
    The large-z series ``z**kappa * sum (a)_k (a-1)_k / k! (-z)**-k``,
    truncated at its smallest term.
``continuation``
    The asymptotic value taken at a large abscissa where it is accurate, then
    carried inward with exact Taylor steps of the ODE above.  Inward is the
    stable direction: the companion solution grows like exp(z).

Error estimates are measured against the local amplitude
``sqrt(W**2 + (W'/k)**2)`` with ``k**2 = |kappa|/z + 1/4`` so that they stay
meaningful at the zeros of W.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal, Optional

from .errors import AccuracyError, DomainError, PoleError

EULER_GAMMA = 0.5772156649015329

_EPS = 2.220446049250313e-16

KAPPA_MAX = 20.0
Z_MAX = 200.0
ACCURACY_TARGET = 1e-10
CROSSOVER_Z = 10.0

Method = Literal["log_series", "asymptotic", "continuation"]


@dataclass(frozen=True)
class Constants:
    euler_gamma: float = EULER_GAMMA
    pi: float = math.pi


CONSTANTS = Constants()


@dataclass(frozen=True)
class SignedLogGamma:
    """Gamma(x) stored as ``sign * exp(log_abs)``."""

    log_abs: float
    sign: int

    @property
    def value(self) -> float:
        return self.sign * math.exp(self.log_abs)


@dataclass(frozen=True)
class WhittakerEval:
    """Result of a W_{kappa,1/2}(z) evaluation.

    ``derivative`` is dW/dz from the same expansion as ``value``.
    """

    value: float
    method: Method
    est_rel_err: float
    derivative: float


# ---------------------------------------------------------------------------
# trigonometric helpers with exact argument reduction


def sinpi(x: float) -> float:
    """sin(pi x), accurate near the integers."""
    r = math.remainder(x, 2.0)  # exact, in [-1, 1]
    if r > 0.5:
        r = 1.0 - r
    elif r < -0.5:
        r = -1.0 - r
    return math.sin(math.pi * r)


def cospi(x: float) -> float:
    """cos(pi x), accurate near the half-integers."""
    r = abs(math.remainder(x, 2.0))
    if r <= 0.25:
        return math.cos(math.pi * r)
    return math.sin(math.pi * (0.5 - r))


def cotpi(x: float) -> float:
    """cot(pi x); raises PoleError at the integers."""
    if x == math.floor(x):
        raise PoleError(f"cot(pi x) has a pole at x = {x!r}")
    return cospi(x) / sinpi(x)


# ---------------------------------------------------------------------------
# gamma family


def _is_pole(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def log_gamma(x: float) -> SignedLogGamma:
    """log|Gamma(x)| together with the sign of Gamma(x).

    Raises PoleError at 0, -1, -2, ...
    """
    if not math.isfinite(x):
        raise DomainError(f"log_gamma needs a finite argument, got {x!r}")
    if _is_pole(x):
        raise PoleError(f"Gamma has a pole at x = {x!r}")
    if x > 0.0:
        return SignedLogGamma(math.lgamma(x), 1)
    # Gamma(x) Gamma(1 - x) = pi / sin(pi x), with Gamma(1 - x) > 0 here
    s = sinpi(x)
    log_abs = math.log(math.pi) - math.log(abs(s)) - math.lgamma(1.0 - x)
    return SignedLogGamma(log_abs, 1 if s > 0.0 else -1)


def gamma(x: float) -> float:
    return log_gamma(x).value


def rgamma(x: float) -> float:
    """1/Gamma(x), an entire function: zero at the poles of Gamma."""
    if _is_pole(x):
        return 0.0
    lg = log_gamma(x)
    return lg.sign * math.exp(-lg.log_abs)


# psi(x) ~ ln x - 1/(2x) - sum B_2k / (2k x^2k)
_PSI_ASYMPTOTIC = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)


def digamma(x: float) -> float:
    """psi(x) = d/dx ln Gamma(x) for real x off the poles."""
    if not math.isfinite(x):
        raise DomainError(f"digamma needs a finite argument, got {x!r}")
    if _is_pole(x):
        raise PoleError(f"digamma has a pole at x = {x!r}")
    if x < 0.0:
        # psi(1 - x) - psi(x) = pi cot(pi x)
        return digamma(1.0 - x) - math.pi * cotpi(x)
    shift = 0.0
    while x < 10.0:
        shift -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    series = 0.0
    for c in reversed(_PSI_ASYMPTOTIC):
        series = series * inv2 + c
    return shift + math.log(x) - 0.5 / x - series * inv2


# ---------------------------------------------------------------------------
# Whittaker W_{kappa,1/2}


@dataclass
class _Reduced:
    """y = z U(1 - kappa, 2, z), its z-derivative and an absolute error."""

    y: float
    dy: float
    err: float


def _amplitude(kappa: float, z: float, y: float, dy: float) -> float:
    # W'/W = y'/y - 1/2, the exp(-z/2) factor is common to everything
    k2 = abs(kappa) / z + 0.25
    dw = dy - 0.5 * y
    return math.sqrt(y * y + dw * dw / k2)


def _is_positive_integer(kappa: float) -> bool:
    return kappa >= 1.0 and kappa == math.floor(kappa)


def _polynomial(kappa: float, z: float) -> _Reduced:
    # a = 1 - kappa = -m: U(-m, 2, z) is a polynomial of degree m
    a = 1.0 - kappa
    m = int(kappa) - 1
    coef = 1.0
    y = dy = mag = 0.0
    for k in range(m + 1):
        power = kappa - k
        term = coef * z**power
        y += term
        dy += coef * power * z ** (power - 1.0)
        mag += abs(term)
        coef *= -(a + k) * (a - 1.0 + k) / (k + 1.0)
    return _Reduced(y, dy, 4.0 * (m + 1) * _EPS * mag)


def _log_series(kappa: float, z: float) -> _Reduced:
    if _is_positive_integer(kappa):
        return _polynomial(kappa, z)
    a = 1.0 - kappa
    r0 = rgamma(a)
    r1 = rgamma(a - 1.0)
    if r1 == 0.0:
        # kappa = 0: z U(1, 2, z) = 1
        return _Reduced(r0, 0.0, _EPS * abs(r0))
    lnz = math.log(z)
    y = r0
    dy = 0.0
    mag = abs(r0)
    block = r1  # r1 (a)_k / ((2)_k k!) z**k
    psi1 = -EULER_GAMMA  # psi(1 + k)
    psi2 = 1.0 - EULER_GAMMA  # psi(2 + k)
    for k in range(2000):
        pa = digamma(a + k)
        phase = lnz + pa - psi1 - psi2
        y += block * z * phase
        dy += block * ((k + 1) * phase + 1.0)
        size = abs(block * z) * (abs(lnz) + abs(pa) + abs(psi1) + abs(psi2) + 1.0)
        mag += size
        if k > abs(a) + z and size < 1e-18 * mag:
            break
        block *= (a + k) * z / ((k + 2.0) * (k + 1.0))
        psi1 += 1.0 / (k + 1.0)
        psi2 += 1.0 / (k + 2.0)
        if block == 0.0:
            break
    else:
        raise AccuracyError(f"logarithmic series did not terminate at z = {z!r}")
    return _Reduced(y, dy, 8.0 * _EPS * mag)


def _asymptotic(kappa: float, z: float) -> _Reduced:
    a = 1.0 - kappa
    term = 1.0
    total = 1.0
    dtotal = kappa
    mag = 1.0
    omitted = 0.0
    converging = False
    for k in range(5000):
        nxt = term * (a + k) * (a - 1.0 + k) / ((k + 1.0) * -z)
        if nxt == 0.0:
            omitted = 0.0
            break
        if abs(nxt) < abs(term):
            converging = True
        elif converging or k > z + 2.0 * abs(a) + 10.0:
            omitted = abs(nxt)
            break
        term = nxt
        total += term
        dtotal += term * (kappa - k - 1.0)
        mag += abs(term)
        if abs(term) < 1e-18 * abs(total):
            omitted = abs(term)
            break
    else:
        omitted = abs(term)
    scale = z**kappa
    err = scale * (2.0 * omitted + 4.0 * _EPS * mag)
    return _Reduced(scale * total, scale / z * dtotal, err)


def _taylor_step(kappa: float, z0: float, y: float, dy: float, t: float):
    # z y'' = z y' - kappa y expanded about z0, evaluated at z0 + t
    c0, c1 = y, dy
    y_new = c0 + c1 * t
    dy_new = c1
    mag = abs(c0) + abs(c1 * t)
    tj = t  # t**(j+1) once inside the loop
    small = 0
    for j in range(400):
        c2 = ((j + 1.0) * (z0 - j) * c1 + (j - kappa) * c0) / (z0 * (j + 1.0) * (j + 2.0))
        dy_new += (j + 2.0) * c2 * tj
        tj *= t
        term = c2 * tj
        y_new += term
        mag += abs(term)
        c0, c1 = c1, c2
        if abs(term) < 1e-18 * mag:
            small += 1
            if small >= 3:
                break
        else:
            small = 0
    else:
        raise AccuracyError("Taylor continuation step did not converge")
    return y_new, dy_new, mag


@lru_cache(maxsize=256)
def _continuation_start(kappa: float, z_min: float) -> tuple[float, float, float, float]:
    z_start = z_min
    while True:
        start = _asymptotic(kappa, z_start)
        rel = start.err / _amplitude(kappa, z_start, start.y, start.dy)
        if rel <= 1e-14:
            return z_start, start.y, start.dy, rel
        z_start *= 1.5
        if z_start > 5000.0:
            raise AccuracyError(f"no accurate asymptotic start for kappa = {kappa!r}")


def _continuation(kappa: float, z: float) -> tuple[_Reduced, float]:
    z0, y, dy, rel = _continuation_start(kappa, max(30.0, math.ceil(z)))
    while z0 > z:
        k = math.sqrt(abs(kappa) / z0 + 0.25)
        step = min(0.5 * z0, 2.0 / k, 4.0)
        if z0 - step <= z:
            t = z - z0
            z_next = z
        else:
            t = -step
            z_next = z0 + t
        y, dy, mag = _taylor_step(kappa, z0, y, dy, t)
        rel += 4.0 * _EPS * mag / _amplitude(kappa, z_next, y, dy)
        z0 = z_next
    amp = _amplitude(kappa, z, y, dy)
    return _Reduced(y, dy, rel * amp), amp


def _finish(kappa: float, z: float, red: _Reduced, method: Method) -> WhittakerEval:
    amp = _amplitude(kappa, z, red.y, red.dy)
    rel = red.err / amp if amp > 0.0 else math.inf
    damp = math.exp(-0.5 * z)
    return WhittakerEval(
        value=damp * red.y,
        method=method,
        est_rel_err=rel,
        derivative=damp * (red.dy - 0.5 * red.y),
    )


def whittaker_w_half(kappa: float, z: float, method: Optional[str] = None) -> WhittakerEval:
    """Evaluate W_{kappa,1/2}(z) for real kappa in [-20, 20] and z in (0, 200].

    ``method`` forces a route: ``"log_series"`` or ``"asymptotic"`` (the
    large-z route, which falls back to inward continuation when the series
    alone is not accurate at ``z``).  By default the cheapest route meeting
    the 1e-10 accuracy target is used.

    Raises DomainError outside the supported domain and AccuracyError when
    the requested route cannot reach the target.
    """
    if not (z > 0.0) or not math.isfinite(z):
        raise DomainError(f"whittaker_w_half needs z > 0, got {z!r}")
    if z > Z_MAX or not (-KAPPA_MAX <= kappa <= KAPPA_MAX):
        raise DomainError(f"(kappa={kappa!r}, z={z!r}) outside the supported domain")
    if method not in (None, "log_series", "asymptotic"):
        raise ValueError(f"unknown method {method!r}")

    if method == "log_series" or (method is None and z <= CROSSOVER_Z):
        res = _finish(kappa, z, _log_series(kappa, z), "log_series")
        if res.est_rel_err <= (ACCURACY_TARGET if method else 0.1 * ACCURACY_TARGET):
            return res
        if method == "log_series":
            raise AccuracyError(
                f"log series loses accuracy at (kappa={kappa!r}, z={z!r}): "
                f"estimated relative error {res.est_rel_err:.2e}"
            )

    res = _finish(kappa, z, _asymptotic(kappa, z), "asymptotic")
    if res.est_rel_err <= 0.1 * ACCURACY_TARGET:
        return res
    red, _ = _continuation(kappa, z)
    res = _finish(kappa, z, red, "continuation")
    if res.est_rel_err > ACCURACY_TARGET:
        raise AccuracyError(
            f"W_{{{kappa},1/2}}({z}) estimated relative error {res.est_rel_err:.2e}"
        )
    return res


def whittaker_slope_smallz(
    s: float, z: float, side: str, *, as_printed: bool = False
) -> float:
    """Leading small-|z| slope of the continuity-normalized eigenfunction.

    For Phi = N Gamma(1 - s) W_{s,1/2}(z) on x > 0 and
    Phi = N Gamma(1 + s) W_{-s,1/2}(|z|) on x < 0, with z = x / (s x0),
    this returns ``(x0/N) dPhi/dx`` without its O(z ln z) remainder:

        positive: -2C - 1/(2s) - ln|z| - psi(1 - s)
        negative: -2C + 1/(2s) - ln|z| - psi(1 + s)

    ``as_printed=True`` returns the variant with the two 1/(2s) signs
    exchanged, as the expansion is commonly quoted; the difference of the
    two sides then no longer reproduces the contact condition.
    """
    if side not in ("positive", "negative"):
        raise ValueError(f"side must be 'positive' or 'negative', got {side!r}")
    az = abs(z)
    if not (0.0 < az <= 0.1):
        raise DomainError(f"|z| = {az!r} is outside the small-argument regime (0, 0.1]")
    if not (s > 0.0) or s == math.floor(s):
        raise DomainError(f"s must be positive and non-integer, got {s!r}")
    half = 0.5 / s
    if as_printed:
        half = -half
    if side == "positive":
        return -2.0 * EULER_GAMMA - half - math.log(az) - digamma(1.0 - s)
    return -2.0 * EULER_GAMMA + half - math.log(az) - digamma(1.0 + s)
