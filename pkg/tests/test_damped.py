import math

import numpy as np
import pytest
from scipy import integrate

from weakoptomech import oracle
from weakoptomech.closed import kerr_phase, mean_p_closed, mean_q_closed, phi_alpha, xi
from weakoptomech.damped import (
    alpha_phase_damped,
    branch_gap,
    damped_branch_data,
    decoherence_D,
    kerr_phase_damped,
    lab_state,
    mean_p_damped,
    mean_q_damped,
    phi_n,
    postselected_probability_damped,
    recentred_state,
)
from weakoptomech.params import ModelParams
from weakoptomech.pointer import coherent_overlap, expectation_p, expectation_q

K = 0.005
FIG4 = dict(alpha_abs=1 / math.sqrt(2), theta=math.pi / 4)


def mp(gamma=0.0, **kw):
    kw = {**FIG4, **kw}
    return ModelParams(k=K, gamma=gamma, **kw)


@pytest.fixture(scope="module")
def lindblad_fig4():
    p = mp(0.005)
    n = 17
    xs = np.array([0.5, math.pi, 2 * math.pi])
    rho = oracle.as_density(oracle.single_photon_state(p.alpha, n))
    return p, n, xs, oracle.lindblad_trajectory(rho, p, xs)


def test_labels_reduce_to_closed_labels():
    p = mp()
    x = np.linspace(0, 10, 50)
    alpha_t = p.alpha * np.exp(-1j * x)
    np.testing.assert_allclose(phi_n(p, x, 0), alpha_t, atol=1e-15)
    np.testing.assert_allclose(phi_n(p, x, 1), alpha_t + xi(K, x), atol=1e-15)
    np.testing.assert_allclose(branch_gap(p, x), xi(K, x), atol=1e-15)
    with pytest.raises(ValueError):
        phi_n(p, 1.0, 2)


def test_photon_branch_label_against_lindblad(lindblad_fig4):
    p, n, xs, traj = lindblad_fig4
    c = oracle.annihilation(n)
    r = traj[1]  # wt = pi
    aa = r[:n, :n]
    mean_c = np.trace(aa @ c) / np.trace(aa)
    assert phi_n(p, math.pi, 1) == pytest.approx(mean_c, rel=1e-8)
    bb = r[n:, n:]
    assert phi_n(p, math.pi, 0) == pytest.approx(np.trace(bb @ c) / np.trace(bb), rel=1e-8)


def test_D_against_quadrature():
    for gamma in (0.005, 0.1, 1.0):
        p = mp(gamma)
        for x in (0.3, math.pi, 2 * math.pi, 9.0):
            quad, _ = integrate.quad(lambda t: abs(branch_gap(p, t)) ** 2, 0, x, epsabs=1e-16,
                                     epsrel=1e-12, limit=200)
            assert decoherence_D(p, x) == pytest.approx(0.5 * gamma * quad, rel=1e-9)


def test_D_small_positive_at_two_pi():
    D = decoherence_D(mp(0.005), 2 * math.pi)
    assert 0 < D < 1e-6


def test_D_against_lindblad_cross_term(lindblad_fig4):
    p, n, xs, traj = lindblad_fig4
    for x, r in zip(xs, traj):
        ab = np.trace(r[:n, n:])  # Tr rho_AB = (1/2) e^{-D} <phi0|phi1> e^{i Psi}
        overlap = abs(coherent_overlap(phi_n(p, x, 1), phi_n(p, x, 0)))
        D = -math.log(2 * abs(ab) / overlap)
        assert D == pytest.approx(decoherence_D(p, x), rel=1e-5, abs=1e-12)


def test_D_imaginary_residue_vanishes():
    x = np.linspace(0, 20, 101)
    for gamma in (0.005, 0.5):
        _, res = decoherence_D(mp(gamma), x, return_residue=True)
        assert np.max(np.abs(res)) < 1e-12


def test_D_zero_without_damping():
    assert decoherence_D(mp(), 3.0) == 0.0


def test_cross_term_only_shrinks():
    x = np.linspace(0, 2 * math.pi, 200)
    D = decoherence_D(mp(0.005), x)
    assert np.all(D >= 0)
    assert np.all(np.exp(-D) <= 1.0)
    assert np.all(np.diff(D) >= -1e-18)
    assert np.all(decoherence_D(mp(0.05), x) >= D)


def test_phases_reduce_to_undamped():
    p = mp()
    x = np.linspace(0, 12, 200)
    np.testing.assert_allclose(kerr_phase_damped(p, x), kerr_phase(K, x), rtol=1e-10, atol=1e-22)
    np.testing.assert_allclose(alpha_phase_damped(p, x), 0.5 * phi_alpha(K, p.alpha, x),
                               rtol=1e-10, atol=1e-17)


def test_half_phase_plus_tau_is_full_phase_without_damping():
    p = mp()
    for x in np.linspace(0.01, 12, 60):
        d = damped_branch_data(p, x)
        full = phi_alpha(K, p.alpha, x)
        assert d.phi_alpha_half + d.tau == pytest.approx(full, abs=1e-12)


def test_gamma_zero_reduction():
    x = np.linspace(0.0, 4 * math.pi, 200)
    for a, th in ((0.5, 0.0), (1 / math.sqrt(2), math.pi / 4), (4.0, math.pi)):
        p = ModelParams(k=K, alpha_abs=a, theta=th)
        np.testing.assert_allclose(mean_q_damped(p, x), mean_q_closed(p, x), rtol=1e-10, atol=1e-13)
        np.testing.assert_allclose(mean_p_damped(p, x), mean_p_closed(p, x), rtol=1e-10, atol=1e-13)


def test_lab_and_recentred_states_agree():
    p = mp(0.005)
    x = 1.7
    d = damped_branch_data(p, x)
    lab, rec = lab_state(d), recentred_state(d)
    assert lab.norm() == pytest.approx(rec.norm(), rel=1e-10)
    assert expectation_q(lab) - 2 * d.phi0.real == pytest.approx(expectation_q(rec), rel=1e-8)
    assert expectation_p(lab) - 2 * d.phi0.imag == pytest.approx(expectation_p(rec), rel=1e-8)


def test_against_lindblad(lindblad_fig4):
    p, n, xs, traj = lindblad_fig4
    for x, r in zip(xs, traj):
        mirror, prob = oracle.postselect_dark(r)
        ref = r[n:, n:]
        q = oracle.expect_q_fock(mirror) - oracle.expect_q_fock(ref)
        mom = oracle.expect_p_fock(mirror) - oracle.expect_p_fock(ref)
        assert mean_q_damped(p, x) == pytest.approx(q, rel=1e-4, abs=1e-8)
        assert mean_p_damped(p, x) == pytest.approx(mom, rel=1e-4, abs=1e-8)
        assert postselected_probability_damped(p, x) == pytest.approx(prob, rel=1e-6)


def test_undamped_phase_form_disagrees_with_lindblad(lindblad_fig4):
    # keeping the undamped coherence phase misses the damping-induced phase
    p, n, xs, traj = lindblad_fig4
    worst = 0.0
    for x, r in zip(xs, traj):
        mirror, _ = oracle.postselect_dark(r)
        q = oracle.expect_q_fock(mirror) - oracle.expect_q_fock(r[n:, n:])
        worst = max(worst, abs(mean_q_damped(p, x, printed_phase=True) - q) / abs(q))
    assert worst > 0.1
    assert mean_q_damped(mp(), 1.0, printed_phase=True) == pytest.approx(mean_q_damped(mp(), 1.0))


def test_momentum_extremum_at_pi():
    p0 = ModelParams(k=K, alpha_abs=0.5, theta=math.pi / 2)
    p1 = p0.with_(gamma=0.005)
    assert mean_p_damped(p0, math.pi) == pytest.approx(-1.0, abs=0.05)
    x = np.linspace(0, 4 * math.pi, 4001)
    m0, m1 = mean_p_damped(p0, x), mean_p_damped(p1, x)
    assert np.min(m1) > np.min(m0)
    assert np.max(np.abs(m1)) < np.max(np.abs(m0))


def test_fig4_position_dip_reduced():
    x = np.linspace(0, 4 * math.pi, 4001)
    q0, q1 = mean_q_damped(mp(), x), mean_q_damped(mp(0.005), x)
    assert np.min(q1) > np.min(q0)
