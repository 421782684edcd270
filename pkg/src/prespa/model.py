"""Hamiltonians and dissipators for the PReSPA system.

Unit convention: every user-facing frequency is cyclic (MHz, or kHz where the
field says so) exactly as quoted in the device tables; conversion to angular
units (rad/us) happens once, inside the builders below. Coherence times are in
microseconds and rates in 1/us.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from . import hilbert
from .hilbert import CAVITY, E, F, G, RESERVOIR, TRANSMON, ModeDims

TWO_PI = 2.0 * math.pi
KHZ = 1e-3  # kHz -> MHz


@dataclass(frozen=True)
class SystemParams:
    """Device parameters. Frequencies in MHz unless noted, times in us."""

    omega_q: float = 3482.9
    omega_a: float = 4657.9
    omega_r: float = 8725.0
    alpha_q: float = 134.28
    chi_ge: float = 1.12
    chi_ef: float = 0.95
    chi_gf: float | None = None
    chi_qr: float = 1.13
    chi_ar: float = 0.0093
    K: float = 3.3  # kHz
    chi_q_prime: float = 1.9  # kHz
    kappa_r: float = 0.58
    T1a: float = 136.0
    T2a: float = 235.0
    T1ge: float = 50.0
    T1ef: float = 31.0
    T2R: float = 53.0
    T2E: float = 70.0
    T2gf: float = 30.0
    p_e_thermal: float = 0.017
    p1_thermal: float = 0.006

    def __post_init__(self):
        chi_sum = self.chi_ge + self.chi_ef
        if self.chi_gf is None:
            object.__setattr__(self, "chi_gf", chi_sum)
        elif abs(self.chi_gf - chi_sum) > 1e-9:
            raise ValueError(f"chi_gf={self.chi_gf} must equal chi_ge + chi_ef = {chi_sum}")
        for f in fields(self):
            value = getattr(self, f.name)
            if f.name in ("p_e_thermal", "p1_thermal", "chi_ar", "chi_q_prime", "K"):
                if value < 0:
                    raise ValueError(f"{f.name} must be non-negative")
            elif not value > 0:
                raise ValueError(f"{f.name} must be strictly positive, got {value}")
        if self.gamma_phi < -1e-12:
            raise ValueError("T2R exceeds 2*T1ge: negative pure dephasing rate")

    @property
    def gamma_phi(self) -> float:
        """Transmon g-e pure dephasing rate (1/us)."""
        return 1.0 / self.T2R - 1.0 / (2.0 * self.T1ge)

    @property
    def gamma_phi_gf(self) -> float:
        return max(1.0 / self.T2gf - 1.0 / (2.0 * self.T1ef), 0.0)

    @property
    def cavity_gamma_phi(self) -> float:
        return max(1.0 / self.T2a - 1.0 / (2.0 * self.T1a), 0.0)

    @property
    def kappa_a(self) -> float:
        return 1.0 / self.T1a


@dataclass(frozen=True)
class DriveConfig:
    """PReSPA comb settings. Rabi rates and detuning in kHz (cyclic)."""

    omega1: float = 55.0
    omega2: float = 160.0
    photon_targets: tuple[int, ...] = (1, 3, 5)
    detuning: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "photon_targets", tuple(sorted(set(int(n) for n in self.photon_targets))))
        if self.omega1 < 0 or self.omega2 < 0:
            raise ValueError("Rabi rates must be non-negative")
        if not self.photon_targets:
            raise ValueError("photon_targets must be non-empty")
        if any(n < 1 for n in self.photon_targets):
            raise ValueError("photon targets must be >= 1 (photon addition from n-1)")


@dataclass
class LindbladModel:
    """``H`` in rad/us and collapse operators already scaled by sqrt(rate)."""

    hamiltonian: np.ndarray
    collapse_ops: list[np.ndarray] = field(default_factory=list)
    dims: ModeDims = field(default_factory=ModeDims)
    labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        h = self.hamiltonian
        if h.shape != (self.dims.total, self.dims.total):
            raise hilbert.DimensionError(f"Hamiltonian shape {h.shape} does not match dims {self.dims}")
        if np.max(np.abs(h - h.conj().T), initial=0.0) > 1e-9:
            raise ValueError("Hamiltonian is not Hermitian")
        for c in self.collapse_ops:
            if c.shape != h.shape:
                raise hilbert.DimensionError("collapse operator shape mismatch")


def _transmon_ops(dims: ModeDims):
    nq = dims.n_tmon
    q = hilbert.annihilation(nq)
    return q, q.conj().T @ q


def build_static_hamiltonian(params: SystemParams, dims: ModeDims, include_chi_q_prime: bool = False) -> np.ndarray:
    """Rotating-frame dispersive Hamiltonian (no linear mode energies), rad/us.

    The transmon is a three-level system, so ``q^dag^2 q^2`` reduces to ``2|f><f|``.
    """
    a = hilbert.embed(hilbert.annihilation(dims.n_cav), CAVITY, dims)
    n_a = a.conj().T @ a
    h = -(TWO_PI * params.K * KHZ / 2) * (a.conj().T @ a.conj().T @ a @ a)
    if dims.n_tmon >= 2:
        q, n_q = _transmon_ops(dims)
        qd = q.conj().T
        h = h - (TWO_PI * params.alpha_q / 2) * hilbert.embed(qd @ qd @ q @ q, TRANSMON, dims)
        p_e = hilbert.embed(hilbert.projector(dims.n_tmon, E), TRANSMON, dims)
        h = h - TWO_PI * params.chi_ge * p_e @ n_a
        if dims.n_tmon >= 3:
            p_f = hilbert.embed(hilbert.projector(dims.n_tmon, F), TRANSMON, dims)
            h = h - TWO_PI * params.chi_gf * p_f @ n_a
        if dims.n_res >= 2:
            r = hilbert.embed(hilbert.annihilation(dims.n_res), RESERVOIR, dims)
            h = h - TWO_PI * params.chi_qr * p_e @ (r.conj().T @ r)
        if include_chi_q_prime:
            nq_full = hilbert.embed(n_q, TRANSMON, dims)
            h = h + (TWO_PI * params.chi_q_prime * KHZ / 2) * nq_full @ (a.conj().T @ a.conj().T @ a @ a)
    return 0.5 * (h + h.conj().T)


def build_drive_hamiltonian(cfg: DriveConfig, dims: ModeDims) -> np.ndarray:
    """Comb Hamiltonian in the frame co-rotating with the static Hamiltonian.

    Each target ``n`` couples ``|n-1,g,0> <-> |n,f,0> <-> |n,g,1>``; the optional
    detuning sits on ``|n,f,0>``.
    """
    if dims.n_tmon < 3 or dims.n_res < 2:
        raise hilbert.DimensionError("drive Hamiltonian needs the g/e/f transmon and a two-level reservoir")
    if max(cfg.photon_targets) > dims.n_cav - 1:
        raise hilbert.DimensionError(f"photon target {max(cfg.photon_targets)} exceeds cavity truncation {dims.n_cav}")
    h = np.zeros((dims.total, dims.total), dtype=complex)
    w1 = TWO_PI * cfg.omega1 * KHZ
    w2 = TWO_PI * cfg.omega2 * KHZ
    for n in cfg.photon_targets:
        err, mid, out = dims.index(n - 1, G, 0), dims.index(n, F, 0), dims.index(n, G, 1)
        h[mid, err] += w1
        h[out, mid] += w2
        h[mid, mid] += TWO_PI * cfg.detuning * KHZ / 2  # halved: symmetrised below
    return h + h.conj().T


def build_collapse_ops(
    params: SystemParams,
    dims: ModeDims,
    thermal_ratio: float | None = None,
    gf_dephasing: bool = False,
    cavity_dephasing: bool = False,
) -> tuple[list[np.ndarray], list[str]]:
    """Dissipators of the three-mode model.

    ``thermal_ratio`` is the excitation/relaxation ratio ``r`` shared by the g-e and
    e-f transitions; when given, upward jumps with rates ``r/T1ge`` and ``r/T1ef``
    are added. Channels with infinite coherence times are skipped.
    """
    ops: list[np.ndarray] = []
    labels: list[str] = []

    def add(rate, op, label):
        if rate > 0 and math.isfinite(rate):
            ops.append(math.sqrt(rate) * op)
            labels.append(label)

    a = hilbert.embed(hilbert.annihilation(dims.n_cav), CAVITY, dims)
    add(1.0 / params.T1a, a, "cavity_loss")
    if cavity_dephasing:
        add(2 * params.cavity_gamma_phi, a.conj().T @ a, "cavity_dephasing")
    if dims.n_tmon >= 2:
        nt = dims.n_tmon
        add(1.0 / params.T1ge, hilbert.embed(hilbert.transition(nt, G, E), TRANSMON, dims), "transmon_e_to_g")
        if nt >= 3:
            add(1.0 / params.T1ef, hilbert.embed(hilbert.transition(nt, E, F), TRANSMON, dims), "transmon_f_to_e")
        _, n_q = _transmon_ops(dims)
        add(2 * params.gamma_phi, hilbert.embed(n_q, TRANSMON, dims), "transmon_dephasing")
        if gf_dephasing and nt >= 3:
            add(2 * params.gamma_phi_gf, hilbert.embed(hilbert.projector(nt, F), TRANSMON, dims), "transmon_gf_dephasing")
        if thermal_ratio:
            add(thermal_ratio / params.T1ge, hilbert.embed(hilbert.transition(nt, E, G), TRANSMON, dims), "transmon_g_to_e")
            if nt >= 3:
                add(thermal_ratio / params.T1ef, hilbert.embed(hilbert.transition(nt, F, E), TRANSMON, dims), "transmon_e_to_f")
    if dims.n_res >= 2:
        r = hilbert.embed(hilbert.annihilation(dims.n_res), RESERVOIR, dims)
        add(TWO_PI * params.kappa_r, r, "reservoir_decay")
    return ops, labels


def correction_operator(kappa_cor: float, n_cav: int) -> np.ndarray:
    """``sqrt(kappa_cor) * sum_n |2n+1><2n|`` truncated to ``n_cav`` levels."""
    op = np.zeros((n_cav, n_cav), dtype=complex)
    for m in range(0, n_cav - 1, 2):
        op[m + 1, m] = 1.0
    return math.sqrt(kappa_cor) * op


def build_effective_model(
    kappa_cor: float,
    params: SystemParams,
    n_cav: int = 10,
    cavity_dephasing: bool = True,
    kerr: bool = True,
) -> LindbladModel:
    """Single-mode cavity model with the parity-recovery dissipator."""
    if kappa_cor < 0:
        raise ValueError("kappa_cor must be non-negative")
    dims = ModeDims(n_cav, 1, 1)
    a = hilbert.annihilation(n_cav)
    ad = a.conj().T
    h = np.zeros((n_cav, n_cav), dtype=complex)
    if kerr:
        h = -(TWO_PI * params.K * KHZ / 2) * (ad @ ad @ a @ a)
    ops, labels = [], []
    if math.isfinite(params.T1a):
        ops.append(math.sqrt(1.0 / params.T1a) * a)
        labels.append("cavity_loss")
    if cavity_dephasing and params.cavity_gamma_phi > 0:
        ops.append(math.sqrt(2 * params.cavity_gamma_phi) * (ad @ a))
        labels.append("cavity_dephasing")
    if kappa_cor > 0:
        ops.append(correction_operator(kappa_cor, n_cav))
        labels.append("parity_recovery")
    return LindbladModel(h, ops, dims, labels)


def build_prespa_model(
    params: SystemParams,
    cfg: DriveConfig,
    dims: ModeDims | None = None,
    thermal_ratio: float | None = None,
    gf_dephasing: bool = False,
) -> LindbladModel:
    """Full three-mode model: comb Hamiltonian plus all device dissipators."""
    dims = dims or ModeDims()
    ops, labels = build_collapse_ops(params, dims, thermal_ratio=thermal_ratio, gf_dephasing=gf_dephasing)
    return LindbladModel(build_drive_hamiltonian(cfg, dims), ops, dims, labels)
