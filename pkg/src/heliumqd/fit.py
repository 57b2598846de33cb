"""Least-squares recovery of (E0, delta) from a Rydberg series E_n = -E0/(n - delta)**2."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np

from .errors import ConvergenceError, DatasetError, DomainError

KINDS = ("level_energy", "transition_from_ground")
_HEADER = ["n", "value_ghz", "kind"]


@dataclass(frozen=True)
class LevelEntry:
    n: int
    value: float  # GHz
    kind: str = "level_energy"
    weight: float = 1.0


@dataclass(frozen=True)
class LevelDataset:
    entries: tuple

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if len(entries) < 3:
            raise DatasetError(f"need at least 3 entries to fit two parameters, got {len(entries)}")
        seen = set()
        for e in entries:
            if e.kind not in KINDS:
                raise DatasetError(f"unknown kind {e.kind!r}")
            if int(e.n) != e.n or e.n < 1:
                raise DatasetError(f"n must be a positive integer, got {e.n!r}")
            if not math.isfinite(e.value):
                raise DatasetError(f"value for n={e.n} is not finite")
            if not (e.weight > 0 and math.isfinite(e.weight)):
                raise DatasetError(f"weight for n={e.n} must be positive")
            if (e.n, e.kind) in seen:
                raise DatasetError(f"duplicate n={e.n} for kind {e.kind}")
            seen.add((e.n, e.kind))

    @classmethod
    def synthetic(cls, e0_ghz: float, delta: float, ns: Iterable[int], kind: str = "level_energy") -> "LevelDataset":
        entries = []
        for n in ns:
            value = -e0_ghz / (n - delta) ** 2
            if kind == "transition_from_ground":
                value += e0_ghz / (1.0 - delta) ** 2
            entries.append(LevelEntry(int(n), value, kind))
        return cls(tuple(entries))

    @classmethod
    def from_csv(cls, source: Union[str, Path, io.TextIOBase]) -> "LevelDataset":
        """Parse ``n,value_ghz,kind[,weight]`` CSV; errors name the line and column."""
        if isinstance(source, (str, Path)):
            try:
                fh = open(source, newline="")
            except OSError as exc:
                raise DatasetError(f"cannot read {source}: {exc.strerror}") from None
            with fh:
                return cls._parse(fh)
        return cls._parse(source)

    @classmethod
    def _parse(cls, fh) -> "LevelDataset":
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DatasetError("line 1: empty file, expected header n,value_ghz,kind[,weight]") from None
        if header != _HEADER and header != _HEADER + ["weight"]:
            raise DatasetError(f"line 1: header must be n,value_ghz,kind[,weight], got {','.join(header)}")
        entries = []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DatasetError(f"line {line}: expected {len(header)} columns, got {len(row)}")
            cells = dict(zip(header, (c.strip() for c in row)))
            try:
                n = int(cells["n"])
            except ValueError:
                raise DatasetError(f"line {line}, column 'n': not an integer: {cells['n']!r}") from None
            if n < 1:
                raise DatasetError(f"line {line}, column 'n': must be >= 1, got {n}")
            try:
                value = float(cells["value_ghz"])
            except ValueError:
                raise DatasetError(f"line {line}, column 'value_ghz': not a number: {cells['value_ghz']!r}") from None
            if not math.isfinite(value):
                raise DatasetError(f"line {line}, column 'value_ghz': not finite")
            kind = cells["kind"]
            if kind not in KINDS:
                raise DatasetError(f"line {line}, column 'kind': expected one of {', '.join(KINDS)}, got {kind!r}")
            weight = 1.0
            if "weight" in cells:
                try:
                    weight = float(cells["weight"])
                except ValueError:
                    raise DatasetError(f"line {line}, column 'weight': not a number: {cells['weight']!r}") from None
                if not (weight > 0 and math.isfinite(weight)):
                    raise DatasetError(f"line {line}, column 'weight': must be positive")
            entries.append(LevelEntry(n, value, kind, weight))
        try:
            return cls(tuple(entries))
        except DatasetError as exc:
            raise DatasetError(f"dataset: {exc}") from None


@dataclass(frozen=True)
class FitResult:
    e0_ghz: float
    delta: float
    rms_residual_ghz: float
    covariance_proxy: tuple  # ((var_e0, cov), (cov, var_delta))
    iterations: int
    stationarity: float
    history: tuple = field(default=(), repr=False)  # objective after each accepted step

    def as_dict(self) -> dict:
        return {
            "e0_ghz": self.e0_ghz,
            "delta": self.delta,
            "rms_residual_ghz": self.rms_residual_ghz,
            "covariance_proxy": [list(r) for r in self.covariance_proxy],
            "iterations": self.iterations,
            "stationarity": self.stationarity,
        }


def _arrays(data: LevelDataset):
    n = np.array([e.n for e in data.entries], dtype=float)
    y = np.array([e.value for e in data.entries])
    w = np.array([e.weight for e in data.entries])
    trans = np.array([e.kind == "transition_from_ground" for e in data.entries])
    return n, y, w, trans


def model_and_jacobian(data: LevelDataset, e0: float, delta: float):
    """Model values and the analytic Jacobian with columns (d/dE0, d/ddelta)."""
    n, _, _, trans = _arrays(data)
    s = n - delta
    s1 = 1.0 - delta
    value = -e0 / s**2
    d_e0 = -1.0 / s**2
    d_delta = -2.0 * e0 / s**3
    value = np.where(trans, value + e0 / s1**2, value)
    d_e0 = np.where(trans, d_e0 + 1.0 / s1**2, d_e0)
    d_delta = np.where(trans, d_delta + 2.0 * e0 / s1**3, d_delta)
    return value, np.column_stack([d_e0, d_delta])


def _objective(data, e0, delta):
    _, y, w, _ = _arrays(data)
    model, _ = model_and_jacobian(data, e0, delta)
    r = model - y
    return float(np.sum(w * r * r))


def default_init(data: LevelDataset) -> tuple[float, float]:
    delta = 0.02
    levels = [e for e in data.entries if e.kind == "level_energy"]
    if levels:
        deepest = min(levels, key=lambda e: e.value)
        return abs(deepest.value) * (deepest.n - 0.5) ** 2, delta
    # transitions only: the model is linear in E0 at fixed delta
    model, _ = model_and_jacobian(data, 1.0, delta)
    _, y, w, _ = _arrays(data)
    denom = float(np.sum(w * model * model))
    if denom == 0.0:
        raise DomainError("transition data carry no information on E0")
    return abs(float(np.sum(w * model * y)) / denom), delta


def _stationarity(J, r, y, w) -> float:
    sw = np.sqrt(w)
    Jw = J * sw[:, None]
    g = Jw.T @ (r * sw)
    col = np.linalg.norm(Jw, axis=0)
    scale = np.linalg.norm(y * sw)
    return float(np.max(np.abs(g) / (col * scale)))


def fit_levels(
    data: LevelDataset,
    init: Optional[tuple[float, float]] = None,
    max_iter: int = 200,
    gtol: float = 1e-10,
) -> FitResult:
    """Levenberg-Marquardt fit of (E0 [GHz], delta) with delta kept inside (0, 1)."""
    e0, delta = default_init(data) if init is None else (float(init[0]), float(init[1]))
    if not (e0 > 0 and 0.0 < delta < 1.0):
        raise DomainError(f"initial point ({e0!r}, {delta!r}) outside E0 > 0, 0 < delta < 1")
    _, y, w, _ = _arrays(data)
    sw = np.sqrt(w)
    mu = 1e-3
    model, J = model_and_jacobian(data, e0, delta)
    r = model - y
    obj = float(np.sum(w * r * r))
    history = [obj]
    iterations = 0
    last_step = math.inf  # relative size of the last accepted step
    while True:
        stat = _stationarity(J, r, y, w)
        # stationary and no longer moving: polishing steps past gtol are cheap
        if obj == 0.0 or (stat <= gtol and last_step <= 1e-10):
            break
        if iterations >= max_iter:
            raise ConvergenceError(f"no convergence after {max_iter} iterations (stationarity {stat:.2e})")
        iterations += 1
        Jw = J * sw[:, None]
        A = Jw.T @ Jw
        g = Jw.T @ (r * sw)
        step = np.linalg.solve(A + mu * np.diag(np.diag(A)), -g)
        # project back into the feasible box by backtracking
        for _ in range(60):
            e0_new, delta_new = e0 + step[0], delta + step[1]
            if e0_new > 0.0 and 0.0 < delta_new < 1.0:
                break
            step = 0.5 * step
        else:
            raise DomainError("step cannot be kept inside 0 < delta < 1")
        new_obj = _objective(data, e0_new, delta_new)
        if new_obj <= obj:
            last_step = max(abs(step[0]) / abs(e0), abs(step[1]) / delta)
            small = last_step <= 1e-15
            e0, delta, obj = e0_new, delta_new, new_obj
            model, J = model_and_jacobian(data, e0, delta)
            r = model - y
            history.append(obj)
            mu = max(mu / 3.0, 1e-12)
            if small:
                break
        else:
            mu *= 4.0
            if mu > 1e16:
                # no descent direction left at working precision
                break
    Jw = J * sw[:, None]
    A = Jw.T @ Jw
    dof = max(len(y) - 2, 1)
    try:
        cov = np.linalg.inv(A) * (obj / dof)
    except np.linalg.LinAlgError:
        cov = np.full((2, 2), np.inf)
    return FitResult(
        e0_ghz=float(e0),
        delta=float(delta),
        rms_residual_ghz=math.sqrt(obj / float(np.sum(w))),
        covariance_proxy=tuple(tuple(float(v) for v in row) for row in cov),
        iterations=iterations,
        stationarity=_stationarity(J, r, y, w),
        history=tuple(history),
    )


def jacobian_check(data: LevelDataset, at: tuple[float, float], rel_step: float = 1e-6) -> float:
    """Worst deviation of the analytic Jacobian from central differences.

    Each column's deviation is measured relative to that column's largest entry.
    """
    e0, delta = at
    if not (e0 > 0 and 0.0 < delta < 1.0):
        raise DomainError(f"point ({e0!r}, {delta!r}) outside the parameter domain")
    _, J = model_and_jacobian(data, e0, delta)
    worst = 0.0
    for col, (p, name) in enumerate(((e0, "e0"), (delta, "delta"))):
        h = rel_step * abs(p)
        if name == "e0":
            plus, _ = model_and_jacobian(data, e0 + h, delta)
            minus, _ = model_and_jacobian(data, e0 - h, delta)
        else:
            plus, _ = model_and_jacobian(data, e0, delta + h)
            minus, _ = model_and_jacobian(data, e0, delta - h)
        fd = (plus - minus) / (2.0 * h)
        scale = float(np.max(np.abs(J[:, col])))
        if scale > 0.0:
            worst = max(worst, float(np.max(np.abs(fd - J[:, col]))) / scale)
    return worst
