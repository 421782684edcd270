import math
import warnings

import numpy as np
import pytest

from prespa import cascade
from prespa.cascade import CascadeMatrix
from prespa.model import TWO_PI

KAPPA_R = TWO_PI * 0.58
EXP_O1 = TWO_PI * 0.055
EXP_O2 = TWO_PI * 0.160
CHI_GF = TWO_PI * 2.07


@pytest.mark.parametrize("o1,o2", [(0.1, 0.3), (0.05, 1.0), (0.3, 0.2)])
def test_trace_identity_and_dissipative_spectrum(o1, o2):
    m = CascadeMatrix(o1, o2, 1.0)
    w = np.linalg.eigvals(m.matrix)
    assert abs(w.sum() - (-0.5j)) < 1e-12
    assert np.all(w.imag <= 1e-12)


def test_zero_stage1_drive_gives_zero_rate():
    assert cascade.effective_rate(CascadeMatrix(0.0, 0.2, 1.0)) == pytest.approx(0.0, abs=1e-14)


def test_rate_invariant_under_drive_phase():
    ref = cascade.effective_rate(CascadeMatrix(0.07, 0.25, 1.0))
    for p1, p2 in [(0.3, 1.1), (math.pi, -2.0), (2.5, 0.0)]:
        m = CascadeMatrix(0.07 * np.exp(1j * p1), 0.25 * np.exp(1j * p2), 1.0)
        assert cascade.effective_rate(m) == pytest.approx(ref, rel=1e-9)


def test_sign_symmetry():
    ref = cascade.effective_rate(CascadeMatrix(0.05, 0.2, 1.0))
    assert cascade.effective_rate(CascadeMatrix(-0.05, -0.2, 1.0)) == pytest.approx(ref, rel=1e-9)


def test_lambda_critical_unit_kappa():
    assert cascade.lambda_critical(1.0) == pytest.approx(0.25, abs=1e-6)


def test_lambda_critical_scales():
    assert cascade.lambda_critical(KAPPA_R) == pytest.approx(KAPPA_R / 4, rel=1e-9)
    assert cascade.coalescence_omega2(KAPPA_R) == pytest.approx(KAPPA_R / 4, rel=1e-6)


def test_lambda_block_splits_above_critical():
    below = np.linalg.eigvals(CascadeMatrix(0.0, 0.9 * 0.25, 1.0).matrix[1:, 1:])
    above = np.linalg.eigvals(CascadeMatrix(0.0, 1.1 * 0.25, 1.0).matrix[1:, 1:])
    assert np.allclose(below.real, 0, atol=1e-12)
    assert abs(above[0].real - above[1].real) > 1e-3
    assert abs(above[0].imag - above[1].imag) < 1e-12


def test_oscillation_detection():
    assert not cascade.is_oscillatory(CascadeMatrix(0.02, 0.2, 1.0))
    assert cascade.is_oscillatory(CascadeMatrix(0.2, 0.4, 1.0))
    o1, o2 = cascade.critical_drive_point(1.0)
    assert o2 == pytest.approx(0.25)
    assert not cascade.is_oscillatory(CascadeMatrix(0.99 * o1, o2, 1.0))
    assert cascade.is_oscillatory(CascadeMatrix(1.01 * o1, o2, 1.0))


def test_rate_monotone_at_small_omega1():
    o1 = np.linspace(1e-4, 0.01, 20)
    rates = [cascade.effective_rate(CascadeMatrix(a, 0.25, 1.0)) for a in o1]
    assert np.all(np.diff(rates) > 0)
    # quadratic growth in the perturbative limit
    assert rates[-1] / rates[0] == pytest.approx((o1[-1] / o1[0]) ** 2, rel=0.05)


def test_rate_agrees_with_expm_fit():
    for o1, o2 in [(0.05, 0.35), (0.1, 0.45), (0.02, 0.3)]:
        m = CascadeMatrix(o1, o2, 1.0)
        assert cascade.effective_rate(m) == pytest.approx(cascade.fitted_decay_rate(m), rel=0.15)


def test_nonhermitian_population_starts_at_one_and_decays():
    p = cascade.nonhermitian_population(CascadeMatrix(0.08, 0.25, 1.0), [0.0, 10.0, 100.0])
    assert p[0] == pytest.approx(1.0)
    assert p[0] > p[1] > p[2]


def test_analyze_flags_exceptional_point():
    o1, o2 = cascade.critical_drive_point(1.0)
    res = cascade.analyze(CascadeMatrix(o1, o2, 1.0))
    assert res.near_exceptional
    assert res.rate > 0 and math.isfinite(res.rate)


def test_analyze_rejects_zero_kappa():
    with pytest.raises(ValueError):
        cascade.analyze(CascadeMatrix(0.1, 0.1, 0.0))


def test_detuned_rate_matches_adiabatic_formula():
    rate = cascade.detuned_rate(0.01, 0.1, 1.0, 10.0)
    assert rate == pytest.approx(cascade.detuned_rate_estimate(0.01, 0.1, 1.0, 10.0), rel=0.25)
    # the empirical prefactor is 4 to better than 1e-3
    assert rate == pytest.approx(4e-8, rel=1e-3)


def test_detuned_rate_vanishes_for_large_chi():
    rates = [cascade.detuned_rate(0.01, 0.1, 1.0, chi) for chi in (10.0, 100.0, 1000.0)]
    assert rates[0] > rates[1] > rates[2]
    assert rates[2] < 1e-11


def test_detuned_rate_warns_small_chi():
    with pytest.warns(UserWarning):
        cascade.detuned_rate(0.1, 0.1, 1.0, 0.5)


def test_single_point_sweep_equals_effective_rate():
    land = cascade.sweep_landscape((0.07, 0.07), (0.25, 0.25), 1.0, n_grid=1)
    assert land.rates.shape == (1, 1)
    assert land.rates[0, 0] == pytest.approx(cascade.effective_rate(CascadeMatrix(0.07, 0.25, 1.0)))


def test_sweep_shapes_and_csv(tmp_path):
    land = cascade.sweep_landscape((0.0, 0.25), (0.0, 0.5), 1.0, n_grid=12)
    assert land.rates.shape == (12, 12) == land.bifurcation_mask.shape
    assert np.all(land.rates >= 0)
    path = tmp_path / "land.csv"
    land.to_csv(path, header=["kappa=1"])
    lines = path.read_text().splitlines()
    assert lines[0] == "# kappa=1" and len(lines) == 2 + 144
    with pytest.raises(ValueError):
        cascade.sweep_landscape((-1, 0), (0, 1), 1.0)


def test_landscape_argmax_within_one_cell():
    # dense-grid optimum of the non-oscillatory region against kappa/13, kappa/4
    land = cascade.sweep_landscape((0.0, 0.25), (0.0, 0.5), 1.0, n_grid=200)
    o1, o2, _ = land.argmax_nonoscillatory()
    d1 = land.omega1_axis[1] - land.omega1_axis[0]
    d2 = land.omega2_axis[1] - land.omega2_axis[0]
    print(f"argmax ({o1:.4f}, {o2:.4f}); cell ({d1:.4f}, {d2:.4f})")
    assert abs(o1 - 1 / 13) <= d1
    assert abs(o2 - 1 / 4) <= d2


def test_experiment_point_rate_matches_4us_halftime():
    rate = cascade.effective_rate(CascadeMatrix(EXP_O1, EXP_O2, KAPPA_R))
    tau = 1.0 / rate
    print(f"experiment-point rate {rate:.4f}/us, 1/rate {tau:.3f} us")
    assert 0.7 * 4.0 <= tau <= 1.3 * 4.0


def test_code_state_leakage_at_twice_chi_gf():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rate_ms = 1e3 * cascade.detuned_rate(EXP_O1, EXP_O2, KAPPA_R, 2 * CHI_GF)
    print(f"leakage {rate_ms:.4f}/ms")
    assert 0.4 / 2 <= rate_ms <= 0.4 * 2
