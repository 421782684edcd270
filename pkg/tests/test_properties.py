import math

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from prespa import budget, cascade, codes, heating, hilbert, model, planner, solver, tomography
from prespa.hilbert import ModeDims
from prespa.model import DriveConfig, SystemParams

seeds = st.integers(0, 2**32 - 1)
unit = st.floats(0.0, 1.0, allow_nan=False)
SLOW = settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.too_slow])


def _random_state(rng, d, rank=2):
    A = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    rho = A @ A.conj().T
    return rho / np.trace(rho)


@SLOW
@given(seeds, st.floats(0.0, 0.2), st.floats(0.0, 0.4))
def test_solver_preserves_trace_hermiticity_positivity(seed, o1, o2):
    rng = np.random.default_rng(seed)
    dims = ModeDims(4, 3, 2)
    m = model.build_prespa_model(SystemParams(), DriveConfig(o1, o2, (1, 3)), dims, thermal_ratio=0.02)
    rho0 = _random_state(rng, dims.total, rank=3)
    traj = solver.evolve(m, rho0, solver.TimeGrid(0, 8, 5))
    assert traj.trace_drift < 1e-8
    for rho in traj.states:
        assert np.max(np.abs(rho - rho.conj().T)) < 1e-10
        assert np.linalg.eigvalsh(rho).min() > -1e-8


@settings(max_examples=200, deadline=None)
@given(unit)
def test_process_fidelity_is_the_stated_linear_map(f):
    assert codes.process_fidelity(f) == 0.25 + 1.5 * (f - 0.5)


@settings(max_examples=100, deadline=None)
@given(unit, unit, unit)
def test_process_fidelity_preserves_convex_combinations(a, b, w):
    lhs = codes.process_fidelity(w * a + (1 - w) * b)
    rhs = w * codes.process_fidelity(a) + (1 - w) * codes.process_fidelity(b)
    assert math.isclose(lhs, rhs, rel_tol=1e-12, abs_tol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.integers(6, 20), st.integers(1, 6))
def test_parity_and_codeword_invariants(n_cav, m):
    code = codes.binomial_code(n_cav)
    P = codes.generalized_parity(m, n_cav)
    assert np.allclose(P @ P.conj().T, np.eye(n_cav), atol=1e-15)
    P2 = codes.generalized_parity(2, n_cav)
    assert np.allclose(P2 @ code.zero_L, -code.zero_L, atol=1e-15)
    assert np.allclose(P2 @ code.one_L, -code.one_L, atol=1e-15)
    # photon number is 3 for both words (to rounding) and the words never mix under parity
    assert abs(codes.mean_photon_number(code.zero_L) - 3.0) < 1e-14
    assert codes.mean_photon_number(code.one_L) == 3.0
    assert abs(np.vdot(code.one_L, P @ code.zero_L)) < 1e-15


@settings(max_examples=8, deadline=None)
@given(seeds)
def test_wigner_normalisation_and_reality(seed):
    rng = np.random.default_rng(seed)
    support = 4
    rho = np.zeros((10, 10), dtype=complex)
    rho[:support, :support] = _random_state(rng, support)
    # the grid covers |alpha| <= 1 + sqrt(n_max) with margin
    x = tomography.default_axis(3.4, 35)
    w = tomography.wigner(rho, x)
    assert abs(w.integral() - 1.0) < 0.02
    assert np.max(np.abs(w.values)) <= 2 / math.pi + 1e-6


@settings(max_examples=10, deadline=None)
@given(seeds, unit)
def test_wigner_linearity(seed, p):
    rng = np.random.default_rng(seed)
    r1 = np.zeros((8, 8), dtype=complex)
    r2 = np.zeros((8, 8), dtype=complex)
    r1[:3, :3] = _random_state(rng, 3)
    r2[:3, :3] = _random_state(rng, 3)
    x = np.linspace(-2, 2, 7)
    mixed = tomography.wigner(p * r1 + (1 - p) * r2, x).values
    split = p * tomography.wigner(r1, x).values + (1 - p) * tomography.wigner(r2, x).values
    assert np.max(np.abs(mixed - split)) < 1e-9


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_partial_trace_preserves_trace(seed):
    rng = np.random.default_rng(seed)
    dims = (3, 2, 2)
    rho = _random_state(rng, 12, rank=4)
    for k in range(3):
        assert abs(np.trace(tomography.partial_trace(rho, k, dims)) - 1) < 1e-12


@settings(max_examples=100, deadline=None)
@given(st.floats(0.0, 1.0), st.floats(0.0, 1.0), st.floats(0.1, 10.0), st.floats(0, 2 * math.pi), st.floats(0, 2 * math.pi))
def test_cascade_spectrum_properties(o1, o2, kappa, p1, p2):
    m = cascade.CascadeMatrix(o1, o2, kappa)
    w = np.linalg.eigvals(m.matrix)
    assert abs(w.sum() + 0.5j * kappa) < 1e-12 * max(1.0, kappa)
    assert np.all(w.imag <= 1e-9 * max(1.0, kappa))
    rotated = cascade.CascadeMatrix(o1 * np.exp(1j * p1), o2 * np.exp(1j * p2), kappa)
    assert math.isclose(cascade.effective_rate(rotated), cascade.effective_rate(m), rel_tol=1e-6, abs_tol=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 0.5), st.floats(1.0, 200.0), st.floats(1.0, 200.0), st.integers(0, 2))
def test_rate_matrix_conserves_population(r, t1ge, t1ef, start):
    p0 = np.zeros(3)
    p0[start] = 1.0
    p = heating.evolve_rate_matrix(heating.RateModel(t1ge, t1ef, r), p0, np.linspace(0, 500, 6))
    assert np.all(p >= 0)
    assert np.max(np.abs(p.sum(axis=1) - 1)) < 1e-12


@settings(max_examples=30, deadline=None)
@given(st.floats(0.0, 0.3))
def test_steady_state_detailed_balance(r):
    p = heating.steady_state(r)
    assert abs(p[1] - r * p[0]) < 1e-12 and abs(p[2] - r * p[1]) < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.floats(1.0, 3.0), st.floats(0.05, 0.3))
def test_comb_pair_sum_invariant(chi_ge, chi_ef):
    p = SystemParams(chi_ge=chi_ge, chi_ef=chi_ef)
    sums = list(planner.comb_frequencies(p).pair_sums().values())
    assert max(sums) - min(sums) < 1e-9


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-4, 0.02), st.floats(1e-4, 0.02))
def test_rabi_monotone_in_beta(b1, b2):
    lo, hi = sorted((b1, b2))
    r_lo = planner.rabi_from_stark(planner.stark_shift([lo], 134.28), 1.12)
    r_hi = planner.rabi_from_stark(planner.stark_shift([hi], 134.28), 1.12)
    assert r_lo <= r_hi


@settings(max_examples=50, deadline=None)
@given(st.floats(1.0, 5.0), st.floats(0.05, 1.0), st.floats(0.0, 2.0))
def test_budget_rates_non_negative_and_total(nbar, kappa_cor, gamma_up):
    b = budget.passive_budget(SystemParams(), kappa_cor=kappa_cor, nbar=nbar, gamma_up=gamma_up)
    rates = b.rates()
    assert all(v >= 0 for v in rates.values())
    assert math.isclose(b.total, sum(rates.values()), rel_tol=1e-12)
    bigger = budget.passive_budget(SystemParams(), kappa_cor=kappa_cor, nbar=nbar, gamma_up=gamma_up + 0.1)
    assert bigger.implied_lifetime < b.implied_lifetime


@settings(max_examples=50, deadline=None)
@given(st.floats(1.0, 1e4), st.floats(1.0, 1e4))
def test_tau_process_identity(T_eq, T_p):
    assert math.isclose(codes.tau_process(T_eq, T_p), 6 / (4 / T_eq + 2 / T_p), rel_tol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_readout_round_trip(seed):
    rng = np.random.default_rng(seed)
    g, e, f = rng.dirichlet(np.ones(3))
    R = 0.01 * rng.normal()
    A, B, C = rng.normal(size=3)
    if min(abs(A - B), abs(A - C), abs(B - C)) < 1e-3:
        return
    cal = heating.ReadoutCalib(A, B, C)
    sol = heating.solve_populations(*heating.forward_readout([g, e, f, R], cal), cal)
    assert np.allclose([sol["g"], sol["e"], sol["f"], sol["R"]], [g, e, f, R], atol=1e-8)


@settings(max_examples=30, deadline=None)
@given(st.floats(-2, 2), st.floats(-2, 2))
def test_displacement_is_unitary_on_low_levels(re, im):
    D = hilbert.displacement(complex(re, im), 40)
    block = (D.conj().T @ D)[:10, :10]
    assert np.max(np.abs(block - np.eye(10))) < 1e-6
