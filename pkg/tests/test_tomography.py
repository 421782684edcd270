import math

import numpy as np
import pytest
import scipy.linalg

from prespa import codes, hilbert, model, tomography
from prespa.model import SystemParams
from prespa.tomography import UndefinedFactorError

AXIS = tomography.default_axis(3.6, 61)


def test_partial_trace_product_state():
    rng = np.random.default_rng(0)
    rhos = []
    for d in (3, 2, 2):
        A = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        r = A @ A.conj().T
        rhos.append(r / np.trace(r))
    full = np.kron(np.kron(rhos[0], rhos[1]), rhos[2])
    for k in range(3):
        assert np.allclose(tomography.partial_trace(full, k, (3, 2, 2)), rhos[k])


def test_partial_trace_bell_pair():
    psi = (np.kron([1, 0], [1, 0]) + np.kron([0, 1], [0, 1])) / math.sqrt(2)
    assert np.allclose(tomography.partial_trace(hilbert.ket2dm(psi), 0, (2, 2)), np.eye(2) / 2)


def test_partial_trace_linearity_against_direct_sum():
    rng = np.random.default_rng(1)
    dims = (2, 3)
    states = []
    for _ in range(3):
        v = hilbert.normalize(rng.normal(size=6) + 1j * rng.normal(size=6))
        states.append(hilbert.ket2dm(v))
    w = rng.dirichlet(np.ones(3))
    mix = sum(wi * s for wi, s in zip(w, states))
    # direct oracle: explicit sum over the traced index
    def direct(rho):
        r = rho.reshape(2, 3, 2, 3)
        return sum(r[:, k, :, k] for k in range(3))
    got = tomography.partial_trace(mix, 0, dims)
    assert np.allclose(got, sum(wi * direct(s) for wi, s in zip(w, states)))
    assert np.trace(got).real == pytest.approx(1.0)


def test_partial_trace_errors():
    with pytest.raises(hilbert.DimensionError):
        tomography.partial_trace(np.eye(5), 0, (2, 2))
    with pytest.raises(ValueError):
        tomography.partial_trace(np.eye(4), 2, (2, 2))


def test_wigner_vacuum_and_single_photon():
    x = np.array([-0.5, 0.0, 0.5])
    vac = tomography.wigner(hilbert.ket2dm(hilbert.basis(4, 0)), x)
    assert vac.values[1, 1] == pytest.approx(2 / math.pi, abs=1e-9)
    # vacuum oracle: (2/pi) exp(-2|alpha|^2)
    assert np.allclose(vac.values, 2 / math.pi * np.exp(-2 * np.abs(vac.alpha_grid) ** 2), atol=1e-9)
    one = tomography.wigner(hilbert.ket2dm(hilbert.basis(4, 1)), x)
    assert one.values[1, 1] == pytest.approx(-2 / math.pi, abs=1e-9)


def test_wigner_binomial_origin_and_normalisation():
    code = codes.binomial_code(12)
    w = tomography.wigner(hilbert.ket2dm(code.zero_L), AXIS)
    mid = len(AXIS) // 2
    assert w.values[mid, mid] == pytest.approx(-2 / math.pi, abs=1e-9)
    assert w.integral() == pytest.approx(1.0, abs=0.02)
    assert np.max(np.abs(w.values)) <= 2 / math.pi + 1e-6


def test_wigner_truncation_warning():
    with pytest.warns(UserWarning):
        tomography.wigner(hilbert.ket2dm(codes.binomial_code(10).zero_L), np.array([0.0, 0.1]))


def test_wigner_output_files(tmp_path):
    w = tomography.wigner(hilbert.ket2dm(hilbert.basis(4, 0)), np.linspace(-1, 1, 5))
    w.to_csv(tmp_path / "w.csv", header=["vacuum"])
    lines = (tmp_path / "w.csv").read_text().splitlines()
    assert lines[0] == "# vacuum" and lines[1] == "re_alpha,im_alpha,W" and len(lines) == 27
    w.to_pgm(tmp_path / "w.pgm")
    data = (tmp_path / "w.pgm").read_bytes()
    assert data.startswith(b"P5\n5 5\n255\n") and len(data) == len(b"P5\n5 5\n255\n") + 25


def test_kerr_rotates_wigner_lobes():
    p = SystemParams()
    code = codes.binomial_code(12)
    m = model.build_effective_model(0.0, p, n_cav=12, cavity_dephasing=False)
    k = 2 * math.pi * p.K * 1e-3
    # |5> gains phase 10 K t relative to |1>: the four-fold pattern turns by 10 K t / 4
    theta = math.pi / 16
    t = 4 * theta / (10 * k)
    psi_t = scipy.linalg.expm(-1j * m.hamiltonian * t) @ code.zero_L
    axis = tomography.default_axis(3.2, 81)
    w0 = tomography.wigner(hilbert.ket2dm(code.zero_L), axis)
    wt = tomography.wigner(hilbert.ket2dm(psi_t), axis)
    radius = 1.9
    a0 = tomography.lobe_angle(w0, radius)
    at = tomography.lobe_angle(wt, radius)
    # compare modulo the pattern period pi/2
    diff = (at - a0 - theta + math.pi / 4) % (math.pi / 2) - math.pi / 4
    resolution = (axis[1] - axis[0]) / radius
    assert abs(diff) <= 2 * resolution


def test_coherence_factor_cases():
    psi = (hilbert.basis(6, 0) + hilbert.basis(6, 2)) / math.sqrt(2)
    shifted = (hilbert.basis(6, 1) + hilbert.basis(6, 3)) / math.sqrt(2)
    before = hilbert.ket2dm(psi)
    assert tomography.coherence_factor(before, before, (0, 2), (0, 2)) == pytest.approx(1.0)
    assert tomography.coherence_factor(before, hilbert.ket2dm(shifted), (0, 2)) == pytest.approx(1.0)
    dephased = np.diag(np.diag(hilbert.ket2dm(shifted)))
    assert tomography.coherence_factor(before, dephased, (0, 2)) == 0.0
    with pytest.raises(UndefinedFactorError):
        tomography.coherence_factor(np.diag([1.0, 0, 0, 0, 0, 0]), before, (0, 2))
