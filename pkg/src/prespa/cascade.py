"""Three-level non-Hermitian model of the two-stage cascaded dissipation.

Basis order is (error state ``|n-1,g,0>``, intermediate ``|n,f,0>``, output
``|n,g,1>``). All rates here are angular (rad/us); ``kappa`` is the reservoir
energy decay rate, so the output amplitude decays at ``kappa/2``.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.linalg
from scipy.optimize import brentq

# relative tolerance for calling an eigenvalue purely imaginary
REAL_PART_TOL = 1e-9
# eigenvector-matrix condition number above which a point counts as near-defective
DEFECTIVE_COND = 1e6


@dataclass(frozen=True)
class CascadeMatrix:
    omega1: float
    omega2: float
    kappa: float
    chi_detune: float = 0.0

    def __post_init__(self):
        if self.kappa < 0:
            raise ValueError("kappa must be non-negative")

    @property
    def matrix(self) -> np.ndarray:
        o1, o2 = complex(self.omega1), complex(self.omega2)
        return np.array(
            [
                [0.0, o1, 0.0],
                [np.conj(o1), self.chi_detune, o2],
                [0.0, np.conj(o2), -0.5j * self.kappa],
            ],
            dtype=complex,
        )


@dataclass(frozen=True)
class CascadeRate:
    rate: float
    eigenvalue: complex
    eigenvalues: np.ndarray
    overlap: float
    oscillatory: bool  # selected eigenvalue has a real part
    near_exceptional: bool  # eigenvector matrix close to singular


def _all_imaginary(m: CascadeMatrix) -> bool:
    """True when every eigenvalue is purely imaginary (no oscillating component).

    In the resonant case ``lambda = -i mu`` turns the characteristic polynomial
    into the real cubic ``mu^3 - c mu^2 + (O1^2 + O2^2) mu - c O1^2`` with
    ``c = kappa/2``; all roots are real iff its discriminant is non-negative.
    """
    if m.chi_detune != 0:
        w = np.linalg.eigvals(m.matrix)
        return bool(np.all(np.abs(w.real) <= REAL_PART_TOL * np.maximum(np.abs(w), 1e-300)))
    a2, b2 = abs(m.omega1) ** 2, abs(m.omega2) ** 2
    B, C, D = -0.5 * m.kappa, a2 + b2, -0.5 * m.kappa * a2
    disc = 18 * B * C * D - 4 * B**3 * D + B**2 * C**2 - 4 * C**3 - 27 * D**2
    scale = max(abs(B), math.sqrt(C), abs(D) ** (1 / 3), 1e-300) ** 6
    return disc >= -REAL_PART_TOL * scale


def is_oscillatory(m: CascadeMatrix) -> bool:
    return not _all_imaginary(m)


def analyze(m: CascadeMatrix) -> CascadeRate:
    """Eigen-decomposition and the effective-rate eigenvalue.

    The selected eigenvalue belongs to the eigenvector with the largest overlap
    with the error state; the rate is ``2|Im lambda|`` (population, not amplitude).
    """
    if m.kappa <= 0:
        raise ValueError("kappa must be positive")
    w, v = np.linalg.eig(m.matrix)
    v = v / np.linalg.norm(v, axis=0)
    k = int(np.argmax(np.abs(v[0])))
    cond = np.linalg.cond(v)
    near_ep = not math.isfinite(cond) or cond > DEFECTIVE_COND
    lam = complex(w[k])
    if near_ep:
        # a defective cluster: fall back on the mean of the eigenvalues that coalesce
        close = np.abs(w - lam) < 1e-4 * max(abs(lam), m.kappa)
        lam = complex(np.mean(w[close]))
    osc = abs(lam.real) > REAL_PART_TOL * max(abs(lam), 1e-300)
    return CascadeRate(2.0 * abs(lam.imag), lam, w, float(abs(v[0, k])), bool(osc), bool(near_ep))


def effective_rate(m: CascadeMatrix) -> float:
    """Population decay rate of the error state, 1/us."""
    return analyze(m).rate


def lambda_critical(kappa: float, verify: bool = True) -> float:
    """Coalescence point of the driven lossy two-level block (``Omega1 = 0``).

    The closed form is ``kappa/4``; with ``verify`` the coalescence is located
    numerically from the eigenvalue splitting and checked against it.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    exact = kappa / 4.0
    if verify:
        found = coalescence_omega2(kappa)
        if abs(found - exact) > 1e-6 * exact:
            raise ArithmeticError(f"numerical coalescence {found} disagrees with kappa/4 = {exact}")
    return exact


def coalescence_omega2(kappa: float) -> float:
    """Root of the squared eigenvalue gap of the lower 2x2 block."""

    def gap(o2):
        w = np.linalg.eigvals(CascadeMatrix(0.0, o2, kappa).matrix[1:, 1:])
        return float((-(w[0] - w[1]) ** 2).real)

    return brentq(gap, 1e-6 * kappa, kappa, xtol=1e-14 * kappa, rtol=1e-14)


def critical_drive_point(kappa: float) -> tuple[float, float]:
    """``Omega2`` fixed at the Lambda coalescence, ``Omega1`` raised to the oscillation edge.

    Returns ``(omega1, omega2)``; the oscillation edge is where the cubic
    discriminant vanishes.
    """
    o2 = lambda_critical(kappa)

    def disc(o1):
        a2, b2 = o1 * o1, o2 * o2
        B, C, D = -0.5 * kappa, a2 + b2, -0.5 * kappa * a2
        return 18 * B * C * D - 4 * B**3 * D + B**2 * C**2 - 4 * C**3 - 27 * D**2

    o1 = brentq(disc, 1e-6 * kappa, o2, xtol=1e-14 * kappa)
    return o1, o2


def nonhermitian_population(m: CascadeMatrix, times) -> np.ndarray:
    """``|<e1| exp(-i M t) |e1>|^2`` by direct matrix exponentials."""
    M = m.matrix
    return np.array([abs(scipy.linalg.expm(-1j * M * t)[0, 0]) ** 2 for t in np.asarray(times, dtype=float)])


def fitted_decay_rate(m: CascadeMatrix, n_points: int = 400, floor: float = math.exp(-6)) -> float:
    """Exponential-fit decay rate of the error-state population.

    The horizon is doubled until the population falls below ``floor``; the fit
    is a straight line through ``log P`` on ``floor < P < 1/e``.
    """
    horizon = 4.0 / max(m.kappa, 1e-12)
    for _ in range(60):
        t = np.linspace(0.0, horizon, n_points)
        p = nonhermitian_population(m, t)
        if p[-1] < floor:
            break
        horizon *= 2
    else:
        raise ArithmeticError("error-state population never decayed below the fit floor")
    sel = (p < math.exp(-1)) & (p > floor)
    if sel.sum() < 3:
        raise ArithmeticError("too few points inside the fit window")
    slope = np.polyfit(t[sel], np.log(p[sel]), 1)[0]
    return float(-slope)


@dataclass
class RateLandscape:
    omega1_axis: np.ndarray
    omega2_axis: np.ndarray
    rates: np.ndarray  # shape (len(omega1_axis), len(omega2_axis))
    bifurcation_mask: np.ndarray  # True where some eigenvalue oscillates
    kappa: float

    def argmax_nonoscillatory(self) -> tuple[float, float, float]:
        masked = np.where(self.bifurcation_mask, -np.inf, self.rates)
        i, j = np.unravel_index(int(np.argmax(masked)), masked.shape)
        return float(self.omega1_axis[i]), float(self.omega2_axis[j]), float(self.rates[i, j])

    def to_csv(self, path: str | Path, header: list[str] | None = None) -> None:
        with open(path, "w", newline="") as fh:
            for line in header or []:
                fh.write(f"# {line}\n")
            w = csv.writer(fh)
            w.writerow(["omega1", "omega2", "rate", "oscillatory"])
            for i, o1 in enumerate(self.omega1_axis):
                for j, o2 in enumerate(self.omega2_axis):
                    w.writerow([f"{o1:.10g}", f"{o2:.10g}", f"{self.rates[i, j]:.10g}", int(self.bifurcation_mask[i, j])])


def sweep_landscape(omega1_range, omega2_range, kappa: float, n_grid: int = 200) -> RateLandscape:
    """Effective rate and oscillation mask on an ``n_grid x n_grid`` mesh.

    Ranges are ``(lo, hi)`` pairs in rad/us; the endpoints are included.
    """
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    (a0, a1), (b0, b1) = omega1_range, omega2_range
    if min(a0, b0) < 0 or a1 < a0 or b1 < b0:
        raise ValueError("ranges must be non-negative (lo, hi) pairs")
    o1 = np.linspace(a0, a1, n_grid)
    o2 = np.linspace(b0, b1, n_grid)
    rates = np.empty((n_grid, n_grid))
    mask = np.empty((n_grid, n_grid), dtype=bool)
    for i, a in enumerate(o1):
        for j, b in enumerate(o2):
            m = CascadeMatrix(a, b, kappa)
            rates[i, j] = analyze(m).rate
            mask[i, j] = is_oscillatory(m)
    return RateLandscape(o1, o2, rates, mask, kappa)


def detuned_rate(omega1: float, omega2: float, kappa: float, chi: float) -> float:
    """Effective rate with the intermediate level detuned by ``chi``.

    For ``kappa >> omega2 >> omega1`` and ``chi >> omega1`` this approaches
    ``4 omega1^2 omega2^2 / (chi^2 kappa)``.
    """
    if abs(chi) < 10 * abs(omega1):
        warnings.warn("detuned rate is only meaningful for chi >> omega1", stacklevel=2)
    return analyze(CascadeMatrix(omega1, omega2, kappa, chi)).rate


def detuned_rate_estimate(omega1: float, omega2: float, kappa: float, chi: float) -> float:
    return 4.0 * omega1**2 * omega2**2 / (chi**2 * kappa)
