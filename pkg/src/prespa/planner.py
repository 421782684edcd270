"""Four-wave-mixing drive planning: comb frequencies, Stark shifts and Rabi rates.

All inputs and outputs are cyclic frequencies; comb frequencies in MHz, Stark
shifts and Rabi rates in kHz.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

from .model import SystemParams


@dataclass(frozen=True)
class Tone:
    stage: int
    n: int
    frequency: float  # MHz
    relative_amplitude: float


@dataclass
class DrivePlan:
    tones: list[Tone]
    stark_shift_total: float | None = None  # kHz
    rabi: dict[str, float] = field(default_factory=dict)  # kHz
    beta: dict[str, float] = field(default_factory=dict)

    def stage(self, s: int) -> list[Tone]:
        return [t for t in self.tones if t.stage == s]

    def pair_sums(self) -> dict[int, float]:
        one = {t.n: t.frequency for t in self.stage(1)}
        two = {t.n: t.frequency for t in self.stage(2)}
        return {n: one[n] + two[n] for n in sorted(one) if n in two}

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    def to_text(self) -> str:
        rows = [f"{'stage':>5} {'n':>3} {'frequency_MHz':>15} {'rel_amp':>9}"]
        for t in self.tones:
            rows.append(f"{t.stage:>5} {t.n:>3} {t.frequency:>15.3f} {t.relative_amplitude:>9.4f}")
        if self.stark_shift_total is not None:
            rows.append(f"stark shift total: {self.stark_shift_total:.3f} kHz")
        for k, v in self.rabi.items():
            rows.append(f"{k}: {v:.2f} kHz")
        for k, v in self.beta.items():
            rows.append(f"{k}: {v:.5f}")
        return "\n".join(rows)


def stage1_base(params: SystemParams) -> float:
    """``omega_a + 2 omega_q - alpha`` in MHz."""
    return params.omega_a + 2 * params.omega_q - params.alpha_q


def stage2_base(params: SystemParams) -> float:
    """``omega_r - (2 omega_q - alpha)`` in MHz."""
    return params.omega_r - (2 * params.omega_q - params.alpha_q)


def comb_frequencies(params: SystemParams, targets=(1, 3, 5)) -> DrivePlan:
    """Stage-1 and stage-2 tones for each target photon number ``n``.

    The stage-1 tone for target ``n`` drives ``|n-1,g> -> |n,f>``, whose
    frequency is pulled by ``n chi_gf``; the stage-2 tone shifts the other way so
    the pair sum stays at ``omega_a + omega_r``. With comb index ``m = (n-1)/2``
    stage-1 amplitudes scale as ``1/sqrt(2m+1)`` (the inverse bosonic factor
    ``1/sqrt(n)``), normalised to the first target.
    """
    targets = sorted(set(int(n) for n in targets))
    if not targets or targets[0] < 1:
        raise ValueError("targets must be positive photon numbers")
    chi = params.chi_gf
    if any(n % 2 == 0 for n in targets):
        raise ValueError("photon-addition targets must be odd")
    ref = math.sqrt(targets[0])
    tones = []
    for n in targets:
        tones.append(Tone(1, n, stage1_base(params) - n * chi, ref / math.sqrt(n)))
    for n in targets:
        tones.append(Tone(2, n, stage2_base(params) + n * chi, 1.0))
    return DrivePlan(tones)


def stark_shift(betas, alpha_q: float) -> float:
    """``2 alpha_q sum |beta|^2`` in kHz, with ``alpha_q`` in MHz."""
    if alpha_q <= 0:
        raise ValueError("anharmonicity must be positive")
    return 2.0 * alpha_q * 1e3 * sum(abs(b) ** 2 for b in betas)


def rabi_from_stark(stark: float, chi: float, n: int = 0) -> float:
    """``sqrt((2n+1) chi Delta_ss)`` in kHz; ``stark`` in kHz, ``chi`` in MHz.

    ``n`` is the comb index (0, 1, 2 for targets 1, 3, 5).
    Use ``chi_ge`` for the first stage and ``chi_qr`` for the second.
    """
    if stark < 0 or chi <= 0 or n < 0:
        raise ValueError("need stark >= 0, chi > 0 and n >= 0")
    return math.sqrt((2 * n + 1) * chi * 1e3 * stark)


def stark_from_rabi(rabi: float, chi: float, n: int = 0) -> float:
    return rabi**2 / ((2 * n + 1) * chi * 1e3)


def beta_from_stark(stark: float, alpha_q: float) -> float:
    """Single-tone displacement producing ``stark`` kHz."""
    return math.sqrt(stark / (2.0 * alpha_q * 1e3))


def beta_from_rabi(rabi: float, chi: float, alpha_q: float, n: int = 0) -> float:
    return beta_from_stark(stark_from_rabi(rabi, chi, n), alpha_q)


def plan(params: SystemParams, omega1: float, omega2: float, targets=(1, 3, 5)) -> DrivePlan:
    """Comb plus the displacements that realise the requested Rabi rates (kHz).

    Stark shifts and displacements are quoted for the first target.
    """
    p = comb_frequencies(params, targets)
    s1 = stark_from_rabi(omega1, params.chi_ge)
    s2 = stark_from_rabi(omega2, params.chi_qr)
    p.stark_shift_total = s1 + s2
    p.rabi = {"omega1": omega1, "omega2": omega2, "stark_stage1_kHz": s1, "stark_stage2_kHz": s2}
    p.beta = {"beta1": beta_from_stark(s1, params.alpha_q), "beta2": beta_from_stark(s2, params.alpha_q)}
    return p


def collision_check(plan: DrivePlan, params: SystemParams, guard_band: float = 10.0) -> list[str]:
    """Warnings for tones within ``guard_band`` MHz of modes, subharmonics or other tones.

    Tones of the same comb are expected to sit ``2 chi_gf`` apart and are only
    compared against tones of the other stage.
    """
    wq, wa, wr, al = params.omega_q, params.omega_a, params.omega_r, params.alpha_q
    refs = {
        "omega_a": wa,
        "omega_q": wq,
        "omega_r": wr,
        "omega_q - alpha": wq - al,
        "omega_a/2": wa / 2,
        "omega_q/2": wq / 2,
        "omega_r/2": wr / 2,
        "(omega_q - alpha)/2": (wq - al) / 2,
    }
    out = []
    for t in plan.tones:
        for name, f in refs.items():
            if abs(t.frequency - f) < guard_band:
                out.append(f"stage-{t.stage} tone n={t.n} at {t.frequency:.3f} MHz is within {guard_band} MHz of {name}")
    for i, t in enumerate(plan.tones):
        for u in plan.tones[i + 1 :]:
            if u.stage != t.stage and abs(t.frequency - u.frequency) < guard_band:
                out.append(f"stage-{t.stage} n={t.n} and stage-{u.stage} n={u.n} tones are within {guard_band} MHz")
    return out
