"""Lindblad master-equation integration and conversion-curve observables."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from . import hilbert
from .hilbert import CAVITY, E, F, G, TRANSMON, ModeDims
from .model import DriveConfig, LindbladModel, SystemParams, build_prespa_model

logger = logging.getLogger(__name__)


class IntegrationError(RuntimeError):
    def __init__(self, message: str, t_reached: float):
        super().__init__(f"{message} (reached t = {t_reached:.6g} us)")
        self.t_reached = t_reached


@dataclass(frozen=True)
class TimeGrid:
    t_start: float
    t_end: float
    n_points: int

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError("t_end must exceed t_start")
        if self.n_points < 2:
            raise ValueError("a time grid needs at least two points")

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.n_points)


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray | None
    expectations: dict[str, np.ndarray] = field(default_factory=dict)
    trace_drift: float = 0.0


def liouvillian(model: LindbladModel) -> sp.csr_matrix:
    """Column-stacked superoperator, ``vec(A rho B) = (B^T kron A) vec(rho)``."""
    d = model.dims.total
    eye = sp.identity(d, format="csr", dtype=complex)
    h = sp.csr_matrix(model.hamiltonian)
    L = -1j * (sp.kron(eye, h) - sp.kron(h.T, eye))
    for c in model.collapse_ops:
        c = sp.csr_matrix(c)
        cdc = (c.conj().T @ c).tocsr()
        L = L + sp.kron(c.conj(), c) - 0.5 * sp.kron(eye, cdc) - 0.5 * sp.kron(cdc.T, eye)
    return sp.csr_matrix(L)


def expectation(rho: np.ndarray, op: np.ndarray, hermitian: bool | None = None) -> complex:
    rho = np.asarray(rho)
    op = np.asarray(op)
    if rho.shape != op.shape:
        raise hilbert.DimensionError(f"operator {op.shape} and state {rho.shape} differ in dimension")
    value = np.trace(op @ rho)
    if hermitian is None:
        hermitian = bool(np.allclose(op, op.conj().T, atol=1e-12))
    if hermitian and abs(value.imag) > 1e-9:
        raise ValueError(f"Hermitian observable has imaginary expectation {value.imag:.3e}")
    return complex(value)


def evolve(
    model: LindbladModel,
    rho0: np.ndarray,
    grid: TimeGrid,
    rtol: float = 1e-8,
    atol: float = 1e-10,
    observables: dict[str, np.ndarray] | None = None,
    store_states: bool = True,
) -> Trajectory:
    """Integrate the master equation with an adaptive 8th-order Runge-Kutta scheme.

    No trace renormalisation is applied; the largest trace deviation is reported in
    ``Trajectory.trace_drift``. With ``store_states=False`` only the requested
    ``observables`` are kept.
    """
    d = model.dims.total
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (d, d):
        raise hilbert.DimensionError(f"initial state shape {rho0.shape} does not match dims {model.dims}")
    hilbert.check_density_matrix(rho0)
    L = liouvillian(model)
    times = grid.times
    sol = solve_ivp(
        lambda t, y: L @ y,
        (times[0], times[-1]),
        rho0.reshape(-1, order="F"),
        method="DOP853",
        t_eval=times,
        rtol=rtol,
        atol=atol,
    )
    if not sol.success:
        t_reached = float(sol.t[-1]) if sol.t.size else float(times[0])
        raise IntegrationError(sol.message, t_reached)
    states = sol.y.T.reshape(len(times), d, d, order="C").transpose(0, 2, 1)
    traces = np.einsum("kii->k", states)
    drift = float(np.max(np.abs(traces - 1.0)))
    if drift > 1e-7:
        logger.warning("trace drift %.2e exceeds 1e-7", drift)
    expectations = {}
    for name, op in (observables or {}).items():
        expectations[name] = np.einsum("ij,kji->k", op, states)
        if np.allclose(op, op.conj().T):
            expectations[name] = expectations[name].real
    return Trajectory(times, states if store_states else None, expectations, drift)


def cavity_transmon_projector(n: int, q: int, dims: ModeDims) -> np.ndarray:
    """``|n><n| (x) |q><q| (x) 1_res``."""
    return hilbert.embed(hilbert.projector(dims.n_cav, n), CAVITY, dims) @ hilbert.embed(
        hilbert.projector(dims.n_tmon, q), TRANSMON, dims
    )


@dataclass
class ConversionCurve:
    times: np.ndarray
    converted: np.ndarray  # P_{n+1,g} - P_{n+1,e}
    p_g: np.ndarray
    p_e: np.ndarray
    transmon_e: np.ndarray
    transmon_f: np.ndarray
    halftime: float | None
    trace_drift: float

    def at(self, t: float) -> dict[str, float]:
        return {
            name: float(np.interp(t, self.times, getattr(self, name)))
            for name in ("converted", "p_g", "p_e", "transmon_e", "transmon_f")
        }

    def as_columns(self) -> dict[str, np.ndarray]:
        return {
            "time_us": self.times,
            "converted": self.converted,
            "p_ng": self.p_g,
            "p_ne": self.p_e,
            "transmon_e": self.transmon_e,
            "transmon_f": self.transmon_f,
        }


def first_crossing(times: np.ndarray, values: np.ndarray, level: float) -> float | None:
    """Linearly interpolated first time ``values`` reaches ``level`` from below."""
    above = np.nonzero(values >= level)[0]
    if above.size == 0:
        return None
    k = above[0]
    if k == 0:
        return float(times[0])
    t0, t1, v0, v1 = times[k - 1], times[k], values[k - 1], values[k]
    return float(t0 + (level - v0) * (t1 - t0) / (v1 - v0))


def initial_state(params: SystemParams, dims: ModeDims, cavity_state, thermal: bool = True) -> tuple[np.ndarray, float | None]:
    """``rho_cav (x) rho_tmon (x) |0><0|_res`` and the thermal ratio used (or None).

    ``cavity_state`` is a Fock index, a ket or a cavity density matrix. With
    ``thermal`` the transmon starts in the equilibrium mixture set by
    ``params.p_e_thermal``.
    """
    from .heating import ratio_from_excited_population, steady_state

    if np.ndim(cavity_state) == 0:
        cav = hilbert.ket2dm(hilbert.basis(dims.n_cav, int(cavity_state)))
    elif np.ndim(cavity_state) == 1:
        cav = hilbert.ket2dm(hilbert.normalize(cavity_state))
    else:
        cav = np.asarray(cavity_state, dtype=complex)
    if cav.shape != (dims.n_cav, dims.n_cav):
        raise hilbert.DimensionError("cavity state does not match the cavity truncation")
    ratio = ratio_from_excited_population(params.p_e_thermal) if thermal and params.p_e_thermal > 0 else None
    transmon = hilbert.thermal_transmon(steady_state(ratio) if ratio else [1.0], dims.n_tmon)
    res = hilbert.ket2dm(hilbert.basis(dims.n_res, 0))
    return np.kron(np.kron(cav, transmon), res), ratio


def conversion_curve(
    params: SystemParams,
    cfg: DriveConfig,
    initial_even_fock: int,
    grid: TimeGrid,
    dims: ModeDims | None = None,
    thermal: bool = True,
    rtol: float = 1e-8,
    atol: float = 1e-10,
) -> ConversionCurve:
    """Photon-addition dynamics starting from ``|n, transmon, 0>`` with even ``n``.

    With ``thermal=True`` the transmon starts in its equilibrium mixture set by
    ``params.p_e_thermal`` and the matching upward jump rates are switched on.
    """
    if initial_even_fock not in (0, 2, 4):
        raise ValueError("initial_even_fock must be one of 0, 2, 4")
    dims = dims or ModeDims()
    rho0, ratio = initial_state(params, dims, initial_even_fock, thermal)
    model = build_prespa_model(params, cfg, dims, thermal_ratio=ratio)
    n = initial_even_fock + 1
    obs = {
        "p_g": cavity_transmon_projector(n, G, dims),
        "p_e": cavity_transmon_projector(n, E, dims),
        "transmon_e": hilbert.embed(hilbert.projector(dims.n_tmon, E), TRANSMON, dims),
        "transmon_f": hilbert.embed(hilbert.projector(dims.n_tmon, F), TRANSMON, dims),
    }
    traj = evolve(model, rho0, grid, rtol=rtol, atol=atol, observables=obs, store_states=False)
    ex = traj.expectations
    converted = ex["p_g"] - ex["p_e"]
    return ConversionCurve(
        traj.times,
        converted,
        ex["p_g"],
        ex["p_e"],
        ex["transmon_e"],
        ex["transmon_f"],
        first_crossing(traj.times, converted, 0.5),
        traj.trace_drift,
    )
