"""Bosonic logical codes, decoding, fidelities and logical-lifetime fits."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg
from scipy.optimize import curve_fit

from . import hilbert
from .hilbert import ModeDims
from .model import LindbladModel
from .solver import TimeGrid, evolve

SQRT2 = math.sqrt(2.0)


class FitConvergenceError(RuntimeError):
    pass


@dataclass
class LogicalCode:
    name: str
    zero_L: np.ndarray
    one_L: np.ndarray
    nbar: float
    parity: str  # "even", "odd" or "mixed"

    def __post_init__(self):
        for psi in (self.zero_L, self.one_L):
            hilbert.check_state_vector(psi, atol=1e-10)
        if abs(np.vdot(self.zero_L, self.one_L)) > 1e-12:
            raise ValueError("codewords are not orthogonal")

    @property
    def n_cav(self) -> int:
        return len(self.zero_L)


def _n_cav(dims) -> int:
    return dims.n_cav if isinstance(dims, ModeDims) else int(dims)


def mean_photon_number(psi: np.ndarray) -> float:
    return float(np.sum(np.arange(len(psi)) * np.abs(psi) ** 2))


def binomial_code(dims: ModeDims | int = 10) -> LogicalCode:
    """``|0_L> = (|1> + |5>)/sqrt2``, ``|1_L> = |3>``."""
    n = _n_cav(dims)
    if n < 6:
        raise hilbert.DimensionError(f"binomial code needs n_cav >= 6, got {n}")
    zero = (hilbert.basis(n, 1) + hilbert.basis(n, 5)) / SQRT2
    return LogicalCode("binomial", zero, hilbert.basis(n, 3), 3.0, "odd")


def fock01_code(dims: ModeDims | int = 10) -> LogicalCode:
    n = _n_cav(dims)
    return LogicalCode("fock01", hilbert.basis(n, 0), hilbert.basis(n, 1), 0.5, "mixed")


CARDINAL_LABELS = ("+Z", "-Z", "+X", "-X", "+Y", "-Y")


def cardinal_states(code_or_pair) -> list[np.ndarray]:
    """The six Bloch-sphere cardinal states, ordered as ``CARDINAL_LABELS``."""
    if isinstance(code_or_pair, LogicalCode):
        z, o = code_or_pair.zero_L, code_or_pair.one_L
    else:
        z, o = (np.asarray(v, dtype=complex) for v in code_or_pair)
    return [z, o, (z + o) / SQRT2, (z - o) / SQRT2, (z + 1j * o) / SQRT2, (z - 1j * o) / SQRT2]


def generalized_parity(m: int, dims: ModeDims | int) -> np.ndarray:
    """``exp(i 2 pi n / m)`` as a diagonal matrix."""
    if m < 1:
        raise ValueError("parity order must be >= 1")
    n = np.arange(_n_cav(dims))
    return np.diag(np.exp(2j * np.pi * n / m))


def state_fidelity(rho: np.ndarray, psi: np.ndarray) -> float:
    value = np.vdot(psi, np.asarray(rho) @ psi)
    return float(np.clip(value.real, 0.0, 1.0))


def process_fidelity(F_avg):
    """Process fidelity from the average cardinal-state fidelity of a qubit channel."""
    F_avg = np.asarray(F_avg, dtype=float)
    if np.any((F_avg < 0) | (F_avg > 1)):
        raise ValueError("average fidelity must lie in [0, 1]")
    out = 0.25 + 1.5 * (F_avg - 0.5)
    return float(out) if out.ndim == 0 else out


def tau_process(T_eq: float, T_p: float) -> float:
    return float(1.0 / ((2.0 / 3.0) / T_eq + (1.0 / 3.0) / T_p))


def decode_map(code: LogicalCode, recover_errors: bool = True) -> np.ndarray:
    """Isometry from the cavity onto cavity (x) transmon(g, e, f).

    Code space: the ``+Z`` codeword goes to ``|0,g>``, the ``-Z`` codeword to
    ``|0,e>``. For the binomial code the Kerr partner ``(|1> - |5>)/sqrt2`` goes to
    ``|1,g>``, and with ``recover_errors`` the single-loss error words
    ``(|0> + sqrt5 |4>)/sqrt6``, ``|2>`` and ``(sqrt5 |0> - |4>)/sqrt6`` go to
    ``|2,g>``, ``|2,e>`` and ``|3,g>``. Every remaining Fock state ``|k>`` goes to
    ``|k,f>``, which carries no logical information.

    Returns a ``(3 n_cav, n_cav)`` matrix ``V`` with ``V^dag V = 1``.
    """
    n = code.n_cav
    e = lambda k: hilbert.basis(n, k)  # noqa: E731
    domain = [code.zero_L, code.one_L]
    images = [(0, 0), (0, 1)]
    if code.name == "binomial":
        domain.append((e(1) - e(5)) / SQRT2)
        images.append((1, 0))
        if recover_errors:
            s6 = math.sqrt(6.0)
            domain += [(e(0) + math.sqrt(5) * e(4)) / s6, e(2), (math.sqrt(5) * e(0) - e(4)) / s6]
            images += [(2, 0), (2, 1), (3, 0)]
    Q = np.array(domain).T
    # canonical completion: Fock states untouched by the domain, in order
    support = np.any(np.abs(Q) > 1e-12, axis=1)
    free = [k for k in range(n) if not support[k]]
    comp = None
    if Q.shape[1] < support.sum():
        comp = np.zeros((n, support.sum() - Q.shape[1]), dtype=complex)
        comp[support] = scipy.linalg.null_space(Q[support].conj().T)
    V = np.zeros((3 * n, n), dtype=complex)
    for vec, (cav, q) in zip(domain, images):
        V += np.outer(np.kron(e(cav), hilbert.basis(3, q)), vec.conj())
    for k in free:
        V += np.outer(np.kron(e(k), hilbert.basis(3, 2)), e(k))
    if comp is not None and comp.size:
        # leftover directions inside the code support go to unused f slots
        used = {int(np.argmax(np.abs(np.kron(e(c), hilbert.basis(3, q))))) for c, q in images}
        used |= {3 * k + 2 for k in free}
        slots = [i for i in range(2, 3 * n, 3) if i not in used]
        for j in range(comp.shape[1]):
            target = np.zeros(3 * n)
            target[slots[j]] = 1.0
            V += np.outer(target, comp[:, j].conj())
    if not np.allclose(V.conj().T @ V, np.eye(n), atol=1e-10):
        raise ArithmeticError("decoder is not an isometry")
    return V


def decoded_transmon_state(rho_cav: np.ndarray, V: np.ndarray) -> np.ndarray:
    """Transmon density matrix after decoding and discarding the cavity."""
    n = rho_cav.shape[0]
    full = (V @ rho_cav @ V.conj().T).reshape(n, 3, n, 3)
    return np.einsum("aiaj->ij", full)


def logical_fidelity_curves(
    model: LindbladModel,
    code: LogicalCode,
    grid: TimeGrid,
    decoder: np.ndarray | None = None,
    track_frame: bool = True,
    rtol: float = 1e-8,
    atol: float = 1e-10,
) -> np.ndarray:
    """Decoded fidelity of each cardinal state over time, shape ``(6, n_times)``.

    With ``track_frame`` the deterministic rotation generated by the model
    Hamiltonian is undone before decoding.
    """
    if model.dims.total != code.n_cav:
        raise hilbert.DimensionError("model must be a single-mode cavity model matching the code truncation")
    V = decode_map(code) if decoder is None else decoder
    t0, t1 = hilbert.basis(3, 0), hilbert.basis(3, 1)
    targets = cardinal_states((t0, t1))
    times = grid.times
    frames = None
    if track_frame:
        frames = [scipy.linalg.expm(-1j * model.hamiltonian * t) for t in times]
    out = np.zeros((6, len(times)))
    for j, psi in enumerate(cardinal_states(code)):
        traj = evolve(model, hilbert.ket2dm(psi), grid, rtol=rtol, atol=atol)
        for k, rho in enumerate(traj.states):
            if frames is not None:
                rho = frames[k].conj().T @ rho @ frames[k]
            out[j, k] = state_fidelity(decoded_transmon_state(rho, V), targets[j])
    return out


@dataclass
class LifetimeFit:
    T_p: float
    T_p_err: float
    T_eq: float
    T_eq_err: float
    p_inf: float
    tau_process: float
    t_1e: float | None  # process fidelity reaches F_process(0)/e
    residual_pole: float
    residual_eq: float
    times: np.ndarray = field(repr=False)
    fidelities: np.ndarray = field(repr=False)

    @property
    def process_curve(self) -> np.ndarray:
        return process_fidelity(np.clip(self.fidelities.mean(axis=0), 0, 1))

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("times")
        d.pop("fidelities")
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def _first_drop(times, values, level):
    below = np.nonzero(values <= level)[0]
    if below.size == 0:
        return None
    k = below[0]
    if k == 0:
        return float(times[0])
    t0, t1, v0, v1 = times[k - 1], times[k], values[k - 1], values[k]
    return float(t0 + (v0 - level) * (t1 - t0) / (v0 - v1))


def fit_lifetime(times: np.ndarray, fidelities: np.ndarray, fit_window: tuple[float, float] | None = None) -> LifetimeFit:
    """Fit pole (``p_inf + c e^{-t/T_p}``) and equator (``0.5 + c e^{-t/T_eq}``) decays."""
    times = np.asarray(times, dtype=float)
    sel = np.ones_like(times, dtype=bool)
    if fit_window is not None:
        sel = (times >= fit_window[0]) & (times <= fit_window[1])
    if sel.sum() < 4:
        raise ValueError("fit window holds fewer than four samples")
    pole = fidelities[:2].mean(axis=0)
    eq = fidelities[2:].mean(axis=0)
    t = times[sel]
    guess = max(t[-1] - t[0], 1e-9) / 2
    try:
        (c_p, T_p, p_inf), cov_p = curve_fit(
            lambda x, c, T, p: p + c * np.exp(-x / T), t, pole[sel], p0=(0.5, guess, 0.5), maxfev=20000
        )
        (c_e, T_eq), cov_e = curve_fit(lambda x, c, T: 0.5 + c * np.exp(-x / T), t, eq[sel], p0=(0.5, guess), maxfev=20000)
    except RuntimeError as exc:
        raise FitConvergenceError(f"lifetime fit failed: {exc}") from exc
    res_p = float(np.sqrt(np.mean((p_inf + c_p * np.exp(-t / T_p) - pole[sel]) ** 2)))
    res_e = float(np.sqrt(np.mean((0.5 + c_e * np.exp(-t / T_eq) - eq[sel]) ** 2)))
    if not (T_p > 0 and T_eq > 0):
        raise FitConvergenceError(f"non-positive lifetime (T_p={T_p}, T_eq={T_eq}); residuals {res_p:.2e}, {res_e:.2e}")
    f_proc = process_fidelity(np.clip(fidelities.mean(axis=0), 0, 1))
    return LifetimeFit(
        T_p=float(T_p),
        T_p_err=float(np.sqrt(cov_p[1, 1])),
        T_eq=float(T_eq),
        T_eq_err=float(np.sqrt(cov_e[1, 1])),
        p_inf=float(p_inf),
        tau_process=tau_process(T_eq, T_p),
        t_1e=_first_drop(times, f_proc, f_proc[0] / math.e),
        residual_pole=res_p,
        residual_eq=res_e,
        times=times,
        fidelities=fidelities,
    )


def logical_lifetime(
    model: LindbladModel,
    code: LogicalCode,
    grid: TimeGrid,
    fit_window: tuple[float, float] | None = None,
    decoder: np.ndarray | None = None,
    track_frame: bool = True,
    rtol: float = 1e-8,
    atol: float = 1e-10,
) -> LifetimeFit:
    """Evolve all cardinal states, decode, and fit the logical lifetimes."""
    F = logical_fidelity_curves(model, code, grid, decoder=decoder, track_frame=track_frame, rtol=rtol, atol=atol)
    return fit_lifetime(grid.times, F, fit_window)
