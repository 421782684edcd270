"""Truncated Fock-space linear algebra for the cavity-transmon-reservoir system.

Operators are plain numpy arrays. Global operators act on the Kronecker product
``cavity (x) transmon (x) reservoir`` with the cavity as the slowest index, so the
basis state ``|n, q, r>`` sits at index ``(n * n_tmon + q) * n_res + r``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

CAVITY, TRANSMON, RESERVOIR = 0, 1, 2

# transmon level labels used throughout
G, E, F = 0, 1, 2


class DimensionError(ValueError):
    """Raised when an operator or state does not fit the requested truncation."""


@dataclass(frozen=True)
class ModeDims:
    """Truncation of the three modes.

    ``n_tmon`` and ``n_res`` may be 1, which collapses the space to the bare
    cavity (used by the single-mode effective model).
    """

    n_cav: int = 10
    n_tmon: int = 3
    n_res: int = 2

    def __post_init__(self):
        if self.n_cav < 2:
            raise DimensionError(f"cavity truncation must be >= 2, got {self.n_cav}")
        for name in ("n_tmon", "n_res"):
            if getattr(self, name) < 1:
                raise DimensionError(f"{name} must be >= 1")

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n_cav, self.n_tmon, self.n_res)

    @property
    def total(self) -> int:
        return self.n_cav * self.n_tmon * self.n_res

    def index(self, n: int, q: int = 0, r: int = 0) -> int:
        for occ, dim, label in zip((n, q, r), self.shape, ("cavity", "transmon", "reservoir")):
            if not 0 <= occ < dim:
                raise DimensionError(f"{label} occupation {occ} outside truncation {dim}")
        return (n * self.n_tmon + q) * self.n_res + r


def annihilation(dim: int) -> np.ndarray:
    """Single-mode lowering operator with ``<n-1|a|n> = sqrt(n)``."""
    if dim < 2:
        raise DimensionError(f"annihilation operator needs dim >= 2, got {dim}")
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)


def number(dim: int) -> np.ndarray:
    return np.diag(np.arange(dim, dtype=float)).astype(complex)


def projector(dim: int, level: int) -> np.ndarray:
    out = np.zeros((dim, dim), dtype=complex)
    out[level, level] = 1.0
    return out


def transition(dim: int, to: int, frm: int) -> np.ndarray:
    """``|to><frm|`` on a single mode."""
    out = np.zeros((dim, dim), dtype=complex)
    out[to, frm] = 1.0
    return out


def embed(op: np.ndarray, mode_index: int, dims: ModeDims) -> np.ndarray:
    """Lift a single-mode operator to the full space, identity elsewhere."""
    op = np.asarray(op)
    target = dims.shape[mode_index]
    if op.shape != (target, target):
        raise DimensionError(f"operator of shape {op.shape} does not act on mode {mode_index} of size {target}")
    factors = [np.eye(d, dtype=complex) for d in dims.shape]
    factors[mode_index] = op
    return np.kron(np.kron(factors[0], factors[1]), factors[2])


def fock_state(occupations: tuple[int, int, int], dims: ModeDims) -> np.ndarray:
    psi = np.zeros(dims.total, dtype=complex)
    psi[dims.index(*occupations)] = 1.0
    return psi


def basis(dim: int, n: int) -> np.ndarray:
    if not 0 <= n < dim:
        raise DimensionError(f"level {n} outside truncation {dim}")
    v = np.zeros(dim, dtype=complex)
    v[n] = 1.0
    return v


def displacement(alpha: complex, dim: int) -> np.ndarray:
    """``exp(alpha a^dag - alpha* a)`` evaluated in the truncated space."""
    if dim < 2:
        raise DimensionError(f"displacement needs dim >= 2, got {dim}")
    if abs(alpha) ** 2 > dim / 4:
        warnings.warn(f"|alpha|^2 = {abs(alpha) ** 2:.2f} is large for truncation {dim}", stacklevel=2)
    a = annihilation(dim)
    return scipy.linalg.expm(alpha * a.conj().T - np.conj(alpha) * a)


def ket2dm(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi)
    return np.outer(psi, psi.conj())


def normalize(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    norm = np.linalg.norm(psi)
    if norm == 0:
        raise ValueError("cannot normalize the zero vector")
    return psi / norm


def check_state_vector(psi: np.ndarray, atol: float = 1e-10) -> None:
    if abs(np.linalg.norm(psi) - 1.0) > atol:
        raise ValueError(f"state vector norm {np.linalg.norm(psi):.12f} != 1")


def check_density_matrix(rho: np.ndarray, atol: float = 1e-10, eig_floor: float = -1e-8) -> None:
    """Raise ``ValueError`` unless ``rho`` is Hermitian, unit trace and positive."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > atol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > atol:
        raise ValueError(f"density matrix trace {np.trace(rho).real:.12f} != 1")
    if np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() < eig_floor:
        raise ValueError("density matrix has negative eigenvalues")


def thermal_transmon(populations, n_tmon: int) -> np.ndarray:
    """Diagonal transmon state with the given level populations (padded with zeros)."""
    p = np.zeros(n_tmon)
    p[: len(populations)] = populations[:n_tmon]
    return np.diag(p / p.sum()).astype(complex)
