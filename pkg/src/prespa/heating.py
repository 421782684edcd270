"""Phenomenological drive-induced transmon heating.

The transmon is treated as a classical three-level ladder g-e-f. Relaxation rates
are ``1/T1ge`` and ``1/T1ef``; both upward rates share one excitation/relaxation
ratio ``r``, so the upward rates are ``r/T1ge`` and ``r/T1ef``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg
from scipy.optimize import minimize_scalar


class SingularCalibrationError(ValueError):
    pass


class FitError(RuntimeError):
    pass


@dataclass(frozen=True)
class ReadoutCalib:
    """Raw readout values for the transmon prepared in g, e and f."""

    A: float
    B: float
    C: float

    def __post_init__(self):
        if min(abs(self.A - self.B), abs(self.A - self.C), abs(self.B - self.C)) <= 1e-9:
            raise SingularCalibrationError("readout values A, B, C must be mutually distinct")


@dataclass(frozen=True)
class RateModel:
    T1ge: float
    T1ef: float
    r: float = 0.0

    def __post_init__(self):
        if self.r < 0:
            raise ValueError("excitation ratio r must be non-negative")
        if self.T1ge <= 0 or self.T1ef <= 0:
            raise ValueError("relaxation times must be positive")

    def generator(self) -> np.ndarray:
        """``dp/dt = G p`` over (g, e, f); columns sum to zero."""
        down_ge, down_ef = 1.0 / self.T1ge, 1.0 / self.T1ef
        up_ge, up_ef = self.r * down_ge, self.r * down_ef
        return np.array(
            [
                [-up_ge, down_ge, 0.0],
                [up_ge, -down_ge - up_ef, down_ef],
                [0.0, up_ef, -down_ef],
            ]
        )

    @property
    def gamma_up(self) -> float:
        """g -> e excitation rate in 1/us."""
        return self.r / self.T1ge


def _readout_matrix(calib: ReadoutCalib) -> np.ndarray:
    A, B, C = calib.A, calib.B, calib.C
    # unknowns (g, e, f, R); rows are the four pulse sequences
    return np.array(
        [
            [A, B, C, 1.0],
            [B, C, A, 1.0],
            [C, B, A, 1.0],
            [B, A, C, 1.0],
        ]
    )


def forward_readout(populations, calib: ReadoutCalib) -> np.ndarray:
    """Readout values (D1..D4) produced by populations (g, e, f, R)."""
    return _readout_matrix(calib) @ np.asarray(populations, dtype=float)


def solve_populations(
    D1: float, D2: float, D3: float, D4: float, calib: ReadoutCalib, gauge: str = "normalized"
) -> dict[str, float]:
    """Invert the four readout sequences for (g, e, f, R).

    The sequences are: no pulse; ef then ge pulse; ge, ef, ge pulses; ge pulse.
    The four equations alone have rank 3: a common shift of g, e, f by ``t``
    with ``R -> R - t (A + B + C)`` leaves every readout unchanged. ``gauge``
    closes the system, either with ``g + e + f = 1`` ("normalized") or with
    ``R = 0`` ("no_residual"). ``higher`` is ``1 - g - e - f``.
    """
    M = _readout_matrix(calib)
    rhs = [D1, D2, D3, D4]
    if gauge == "normalized":
        row, value = [1.0, 1.0, 1.0, 0.0], 1.0
    elif gauge == "no_residual":
        row, value = [0.0, 0.0, 0.0, 1.0], 0.0
    else:
        raise ValueError(f"unknown gauge {gauge!r}")
    M = np.vstack([M, row])
    rhs.append(value)
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[-1] < 1e-12 * max(1.0, sv[0]):
        raise SingularCalibrationError("readout system is singular for this calibration")
    (g, e, f, R), *_ = np.linalg.lstsq(M, rhs, rcond=None)
    return {"g": float(g), "e": float(e), "f": float(f), "R": float(R), "higher": float(1 - g - e - f)}


def scale_population_difference(background: float, data: float, calib: ReadoutCalib) -> float:
    """``P_{n,g} - P_{n,e}`` from readouts without and with a selective pi pulse."""
    return (background - data) / (calib.A - calib.B)


def evolve_rate_matrix(model: RateModel, p0, times) -> np.ndarray:
    """Populations over (g, e, f) at each time, shape ``(len(times), 3)``."""
    p0 = np.asarray(p0, dtype=float)
    if p0.shape != (3,):
        raise ValueError("p0 must hold (g, e, f) populations")
    G = model.generator()
    out = np.array([scipy.linalg.expm(G * t) @ p0 for t in np.asarray(times, dtype=float)])
    return np.clip(out, 0.0, None)


def steady_state(r: float) -> np.ndarray:
    """Detailed-balance populations ``(1, r, r^2) / Z``."""
    p = np.array([1.0, r, r * r])
    return p / p.sum()


def ratio_from_excited_population(p_e: float) -> float:
    """Invert ``p_e = r / (1 + r + r^2)`` for the physical root ``r < 1``."""
    if not 0 <= p_e < 1 / 3:
        raise ValueError("excited population must lie in [0, 1/3)")
    if p_e == 0:
        return 0.0
    b = 1 - p_e
    return (b - math.sqrt(b * b - 4 * p_e * p_e)) / (2 * p_e)


@dataclass
class HeatingFit:
    r: float
    gamma_up: float  # 1/us
    residual: float
    n_points: int

    @property
    def gamma_up_per_ms(self) -> float:
        return 1e3 * self.gamma_up


def fit_heating_rate(
    times,
    observed,
    T1ge: float,
    T1ef: float,
    p0=None,
    bounds: tuple[float, float] = (0.0, 1.0),
) -> HeatingFit:
    """Least-squares fit of the single ratio ``r`` to measured populations.

    ``observed`` has shape ``(n_times, 3)`` over (g, e, f); NaN entries are
    ignored. ``p0`` defaults to the observation at the first time; when only its
    excited population is known, the detailed-balance equilibrium with that
    ``p_e`` is used.
    """
    times = np.asarray(times, dtype=float)
    observed = np.asarray(observed, dtype=float)
    if times.size < 2:
        raise ValueError("need at least two time points")
    if observed.shape != (times.size, 3):
        raise ValueError("observed must have shape (n_times, 3)")
    if p0 is None:
        p0 = observed[0]
        if np.any(np.isnan(p0)):
            if np.isnan(p0[1]):
                raise ValueError("the first row needs at least the excited population when p0 is omitted")
            p0 = steady_state(ratio_from_excited_population(float(p0[1])))
    mask = ~np.isnan(observed)

    def cost(r):
        pred = evolve_rate_matrix(RateModel(T1ge, T1ef, r), p0, times)
        return float(np.sum((pred[mask] - observed[mask]) ** 2))

    res = minimize_scalar(cost, bounds=bounds, method="bounded", options={"xatol": 1e-12, "maxiter": 500})
    if not res.success:
        raise FitError(f"heating fit did not converge: {res.message}; residual {res.fun:.3e}")
    r = float(res.x)
    return HeatingFit(r, r / T1ge, float(res.fun), int(mask.sum()))


def read_population_csv(path: str | Path) -> tuple[np.ndarray, np.ndarray]:
    """Read ``pump_time_us, g, e, f`` columns; blank cells become NaN."""
    times, pops = [], []
    with open(path, newline="") as fh:
        rows = (line for line in fh if not line.lstrip().startswith("#"))
        reader = csv.DictReader(rows)
        required = {"pump_time_us", "g", "e", "f"}
        if reader.fieldnames is None or not required <= set(reader.fieldnames):
            raise ValueError(f"population CSV needs columns {sorted(required)}")
        for row in reader:
            times.append(float(row["pump_time_us"]))
            pops.append([float(row[k]) if row[k].strip() else math.nan for k in ("g", "e", "f")])
    return np.array(times), np.array(pops)
