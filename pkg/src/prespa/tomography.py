"""Partial traces, Wigner functions and off-diagonal coherence ratios."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import hilbert
from .hilbert import ModeDims


class UndefinedFactorError(ZeroDivisionError):
    pass


def partial_trace(rho: np.ndarray, keep: int, dims: ModeDims | tuple[int, ...]) -> np.ndarray:
    """Reduced state of mode ``keep``; ``dims`` is a ModeDims or a tuple of mode sizes."""
    shape = dims.shape if isinstance(dims, ModeDims) else tuple(int(d) for d in dims)
    rho = np.asarray(rho)
    D = int(np.prod(shape))
    if rho.shape != (D, D):
        raise hilbert.DimensionError(f"state of shape {rho.shape} does not match modes {shape}")
    if not 0 <= keep < len(shape):
        raise ValueError(f"mode index {keep} out of range")
    n = len(shape)
    t = rho.reshape(shape + shape)
    # move the kept mode's row/column indices to the front, then trace the rest pairwise
    t = np.moveaxis(t, (keep, n + keep), (0, 1))
    rest = int(D // shape[keep])
    t = t.reshape(shape[keep], shape[keep], rest, rest)
    return np.einsum("ijkk->ij", t)


@dataclass
class WignerMap:
    x: np.ndarray  # Re alpha axis
    y: np.ndarray  # Im alpha axis
    values: np.ndarray  # shape (len(y), len(x))

    @property
    def alpha_grid(self) -> np.ndarray:
        return self.x[None, :] + 1j * self.y[:, None]

    @property
    def cell_area(self) -> float:
        return float((self.x[1] - self.x[0]) * (self.y[1] - self.y[0]))

    def integral(self) -> float:
        return float(self.values.sum() * self.cell_area)

    def to_csv(self, path: str | Path, header: list[str] | None = None) -> None:
        with open(path, "w", newline="") as fh:
            for line in header or []:
                fh.write(f"# {line}\n")
            w = csv.writer(fh)
            w.writerow(["re_alpha", "im_alpha", "W"])
            for i, yi in enumerate(self.y):
                for j, xj in enumerate(self.x):
                    w.writerow([f"{xj:.6f}", f"{yi:.6f}", f"{self.values[i, j]:.10g}"])

    def to_pgm(self, path: str | Path) -> None:
        """8-bit grey-scale image, mid-grey at W = 0, black/white at -+2/pi."""
        scale = 2 / math.pi
        img = np.clip(np.round(127.5 * (1 + self.values / scale)), 0, 255).astype(np.uint8)[::-1]
        with open(path, "wb") as fh:
            fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode())
            fh.write(img.tobytes())


def default_axis(extent: float = 3.2, n: int = 81) -> np.ndarray:
    return np.linspace(-extent, extent, n)


def wigner(rho_cav: np.ndarray, x=None, y=None, pad: int = 30) -> WignerMap:
    """Displaced-parity Wigner function ``(2/pi) Tr[P D(-a) rho D(a)]``.

    The state is zero-padded by ``pad`` levels so the truncated displacement stays
    accurate across the grid.
    """
    rho = np.asarray(rho_cav, dtype=complex)
    n = rho.shape[0]
    x = default_axis() if x is None else np.asarray(x, dtype=float)
    y = x if y is None else np.asarray(y, dtype=float)
    pops = np.real(np.diag(rho))
    support = int(np.nonzero(pops > 1e-10)[0].max()) + 1 if np.any(pops > 1e-10) else 1
    if n < 2 * support:
        warnings.warn(f"photon support {support} is close to the truncation {n}", stacklevel=2)
    reach = max(np.abs(x).max(), np.abs(y).max())
    dim = max(n + pad, int(math.ceil((reach + math.sqrt(support)) ** 2 * 2 + 12)))
    big = np.zeros((dim, dim), dtype=complex)
    big[:n, :n] = rho
    parity = (-1.0) ** np.arange(dim)
    a = hilbert.annihilation(dim)
    # eigen-decompose the generator once: D(alpha) = exp(alpha a^dag - alpha* a)
    # split into Hermitian quadrature generators for the two grid directions
    Xq = (a + a.conj().T) / 2
    Pq = (a - a.conj().T) / (2j)
    wx, vx = np.linalg.eigh(Xq)
    wp, vp = np.linalg.eigh(Pq)
    values = np.empty((len(y), len(x)))
    for i, yi in enumerate(y):
        # D(alpha) = exp(2i(Im a X - Re a P)) up to the BCH phase, which cancels in D rho D^dag
        Dy = (vx * np.exp(2j * yi * wx)) @ vx.conj().T
        for j, xj in enumerate(x):
            Dx = (vp * np.exp(-2j * xj * wp)) @ vp.conj().T
            D = Dx @ Dy  # displacement by x + i y, up to a global phase
            shifted = D.conj().T @ big @ D
            values[i, j] = (2 / math.pi) * float(np.real(np.sum(parity * np.diag(shifted))))
    return WignerMap(x, y, values)


def coherence_factor(rho_before: np.ndarray, rho_after: np.ndarray, pair_before: tuple[int, int], pair_after: tuple[int, int] | None = None) -> float:
    """``|<i+1|rho_after|j+1>| / |<i|rho_before|j>|`` (after-pair defaults to shifted by one)."""
    i, j = pair_before
    k, l = pair_after if pair_after is not None else (i + 1, j + 1)
    den = abs(rho_before[i, j])
    if den < 1e-9:
        raise UndefinedFactorError(f"initial coherence |rho[{i},{j}]| = {den:.2e} is too small")
    return float(abs(rho_after[k, l]) / den)


def lobe_angle(w: WignerMap, radius: float, width: float = 0.3) -> float:
    """Polar angle of the strongest positive feature on an annulus of given radius."""
    alpha = w.alpha_grid
    ring = np.abs(np.abs(alpha) - radius) < width
    masked = np.where(ring, w.values, -np.inf)
    k = np.unravel_index(int(np.argmax(masked)), masked.shape)
    return float(np.angle(alpha[k]))
