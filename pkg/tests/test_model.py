import math

import numpy as np
import pytest

from prespa import hilbert, model
from prespa.hilbert import E, F, G, ModeDims
from prespa.model import DriveConfig, SystemParams

TP = 2 * math.pi


@pytest.fixture(scope="module")
def dims():
    return ModeDims()


def test_chi_gf_derived_and_enforced():
    p = SystemParams()
    assert p.chi_gf == pytest.approx(2.07, abs=1e-12)
    with pytest.raises(ValueError):
        SystemParams(chi_gf=2.5)


def test_params_reject_nonpositive_times():
    with pytest.raises(ValueError):
        SystemParams(T1a=0)
    with pytest.raises(ValueError):
        SystemParams(T2R=120.0)  # would give negative pure dephasing


def test_static_hamiltonian_elements(dims):
    p = SystemParams()
    H = model.build_static_hamiltonian(p, dims)
    i = dims.index(3, E, 0)
    expected = -TP * 3 * 1.12 - TP * (3.3e-3 / 2) * 3 * 2
    assert H[i, i].real == pytest.approx(expected, rel=1e-12)
    for n in range(dims.n_cav):
        j = dims.index(n, G, 0)
        assert H[j, j].real == pytest.approx(-TP * (3.3e-3 / 2) * n * (n - 1), abs=1e-12)


def test_static_hamiltonian_f_level_oracle(dims):
    """Term-by-term oracle for <1,f,0|H|1,f,0>."""
    p = SystemParams()
    H = model.build_static_hamiltonian(p, dims)
    k = dims.index(1, F, 0)
    anharm = -(TP * p.alpha_q / 2) * 2  # q^dag^2 q^2 = 2 on |f>
    assert H[k, k].real == pytest.approx(-TP * 2.07 + anharm, rel=1e-12)
    assert np.allclose(H, H.conj().T)


def test_drive_hamiltonian_elements(dims):
    H = model.build_drive_hamiltonian(DriveConfig(), dims)
    assert H[dims.index(1, F, 0), dims.index(0, G, 0)] == pytest.approx(TP * 0.055)
    assert H[dims.index(3, G, 1), dims.index(3, F, 0)] == pytest.approx(TP * 0.160)
    assert H[dims.index(2, F, 0), dims.index(1, G, 0)] == 0
    assert np.allclose(H, H.conj().T)


def test_drive_off_is_zero(dims):
    assert not np.any(model.build_drive_hamiltonian(DriveConfig(0, 0), dims))


def test_drive_annihilates_code_states(dims):
    H = model.build_drive_hamiltonian(DriveConfig(), dims)
    for n in (1, 3, 5):
        assert not np.any(H @ hilbert.fock_state((n, G, 0), dims))


def test_drive_preserves_conversion_paths(dims):
    H = model.build_drive_hamiltonian(DriveConfig(), dims)
    for n in (1, 3, 5):
        path = [dims.index(n - 1, G, 0), dims.index(n, F, 0), dims.index(n, G, 1)]
        block = np.zeros(dims.total, dtype=bool)
        block[path] = True
        for k in path:
            out = H[:, k]
            assert not np.any(out[~block])


def test_drive_target_beyond_truncation():
    with pytest.raises(hilbert.DimensionError):
        model.build_drive_hamiltonian(DriveConfig(photon_targets=(1, 3, 5, 11)), ModeDims())


def test_collapse_rates(dims):
    p = SystemParams()
    ops, labels = model.build_collapse_ops(p, dims)
    by = dict(zip(labels, ops))
    a = hilbert.embed(hilbert.annihilation(dims.n_cav), hilbert.CAVITY, dims)
    rate = (by["cavity_loss"][np.nonzero(a)][0] / a[np.nonzero(a)][0]) ** 2
    assert rate.real == pytest.approx(7.35e-3, rel=1e-3)
    assert p.gamma_phi == pytest.approx(1 / 53 - 1 / 100, rel=1e-12)
    assert p.gamma_phi == pytest.approx(8.87e-3, rel=1e-3)
    assert "transmon_g_to_e" not in labels


def test_collapse_infinite_times_give_unitary():
    inf = math.inf
    p = SystemParams(T1a=inf, T1ge=inf, T1ef=inf, T2R=inf)
    ops, labels = model.build_collapse_ops(p, ModeDims(10, 3, 1))
    assert ops == [] and labels == []
    # the reservoir keeps its own decay when present
    assert model.build_collapse_ops(p, ModeDims())[1] == ["reservoir_decay"]


def test_thermal_ops_added(dims):
    _, labels = model.build_collapse_ops(SystemParams(), dims, thermal_ratio=0.02)
    assert {"transmon_g_to_e", "transmon_e_to_f"} <= set(labels)


def test_correction_operator():
    P = model.correction_operator(0.25, 10)
    assert np.allclose(P @ hilbert.basis(10, 2), 0.5 * hilbert.basis(10, 3))
    assert not np.any(P @ hilbert.basis(10, 3))
    even = np.diag([1.0 if n % 2 == 0 and n < 9 else 0.0 for n in range(10)])
    assert np.allclose(P.conj().T @ P, 0.25 * even)


def test_effective_model_structure():
    m = model.build_effective_model(0.25, SystemParams(), n_cav=10)
    assert m.dims.total == 10
    assert m.labels == ["cavity_loss", "cavity_dephasing", "parity_recovery"]
    n = np.arange(10)
    assert np.allclose(np.diag(m.hamiltonian).real, -TP * 3.3e-3 / 2 * n * (n - 1))
    with pytest.raises(ValueError):
        model.build_effective_model(-1, SystemParams())


def test_drive_config_validation():
    with pytest.raises(ValueError):
        DriveConfig(omega1=-1)
    with pytest.raises(ValueError):
        DriveConfig(photon_targets=())
