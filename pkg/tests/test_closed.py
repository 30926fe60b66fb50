import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from weakoptomech import oracle
from weakoptomech.closed import (
    PLATEAU,
    first_order_smalltime_state,
    kerr_phase,
    mean_p_closed,
    mean_q_closed,
    mean_q_closed_formula,
    mean_q_smalltime,
    mean_q_unpostselected,
    phi_alpha,
    pi_condition,
    pi_expansion_state,
    postselected_mirror_state,
    postselected_probability,
    smalltime_limit_q,
    solve_max_amp_time,
    total_phase,
    xi,
)
from weakoptomech.errors import DegenerateNorm, DomainError, NoRoot
from weakoptomech.params import ModelParams
from weakoptomech.pointer import expectation_q

K = 0.005


def mp(a=0.0, th=0.0, k=K, **kw):
    return ModelParams(k=k, alpha_abs=a, theta=th, **kw)


def test_kerr_phase_examples():
    assert kerr_phase(K, math.pi) == pytest.approx(K**2 * math.pi, rel=1e-14)
    # series branch agrees with the direct expression where both are accurate
    x = 0.0999
    assert kerr_phase(1.0, x) == pytest.approx(x - math.sin(x), rel=1e-9)
    assert kerr_phase(1.0, 1e-6) == pytest.approx(1e-18 / 6, rel=1e-10)


def test_xi_examples():
    assert xi(K, math.pi / 2) == pytest.approx(K + K * 1j)
    assert xi(K, math.pi) == pytest.approx(2 * K)
    x = np.linspace(0, 7, 9)
    np.testing.assert_allclose(xi(K, x), K * (1 - np.exp(-1j * x)), atol=1e-17)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 4), st.floats(-7, 7), st.floats(0, 13))
def test_reordering_phase_closed_form(a, th, x):
    p = mp(a, th)
    expected = 2 * K * a * (math.sin(th) - math.sin(th - x))
    assert phi_alpha(K, p.alpha, x) == pytest.approx(expected, abs=1e-15)


def test_ground_pointer_state_at_pi():
    p = mp()
    s = postselected_mirror_state(p, math.pi)
    assert s.beta0 == pytest.approx(2 * K)
    assert s.c0 == pytest.approx(0.5 * np.exp(1j * K**2 * math.pi))
    assert (s.c1, s.beta1) == (-0.5, 0.0)


def test_success_probability_is_state_norm():
    for a, th in ((0.5, 0), (1, 1.0), (4, 2.5)):
        p = mp(a, th)
        x = np.linspace(0.01, 12, 50)
        np.testing.assert_allclose(
            postselected_probability(p, x), postselected_mirror_state(p, x).norm(),
            rtol=1e-10,
        )


def test_unpostselected_displacement():
    assert mean_q_unpostselected(mp(), math.pi / 2) == pytest.approx(0.01)
    assert mean_q_unpostselected(mp(), math.pi) == pytest.approx(4 * K)


def test_smalltime_example_one_sigma():
    p = mp(0.5, 0.0)
    assert mean_q_smalltime(p, 1e-3) == pytest.approx(1.0, abs=1e-9)
    assert mean_q_closed(p, 1e-3) == pytest.approx(1.0, abs=1e-3)


def test_smalltime_domain():
    p = mp(0.5, 0.3)
    with pytest.raises(DomainError):
        mean_q_smalltime(p, 0.2)
    with pytest.raises(DomainError):
        mean_q_smalltime(p, -0.01)
    assert mean_q_smalltime(p, 0.0) == pytest.approx(smalltime_limit_q(p))


def test_first_order_amplitudes():
    p = mp(0.5, 0.0)
    x = 1e-3
    amp = first_order_smalltime_state(p, x)
    # proportional to i k x |1> + i 2k|a| x |0>
    assert amp[0] / amp[1] == pytest.approx(2 * 0.5, rel=1e-3)
    exact = postselected_mirror_state(p, x)
    vec = exact.c0 * oracle.coherent_fock(exact.beta0, 8) + exact.c1 * oracle.coherent_fock(0, 8)
    np.testing.assert_allclose(vec[:2], amp, rtol=1e-3, atol=1e-12)


def test_closed_matches_literal_formula_away_from_zero():
    x = np.linspace(0.05, 4 * math.pi, 400)
    for a, th in ((0.5, 0), (1, math.pi / 3), (2, 5 * math.pi / 12), (4, math.pi / 2)):
        p = mp(a, th)
        np.testing.assert_allclose(mean_q_closed(p, x), mean_q_closed_formula(p, x),
                                   rtol=1e-7, atol=1e-9)


def test_limit_returned_at_zero_time():
    p = mp(0.5, 0.0)
    assert mean_q_closed(p, 0.0) == smalltime_limit_q(p) == 1.0
    assert mean_p_closed(p, 0.0) == 0.0
    with pytest.raises(DegenerateNorm):
        mean_q_closed(mp(0.0), 0.0)


def test_closed_q_is_continuous_into_zero():
    p = mp(1.0, math.pi / 3)
    x = np.logspace(-9, -2, 20)
    q = mean_q_closed(p, x)
    assert np.all(np.abs(np.diff(q)) < 1e-3)
    assert q[0] == pytest.approx(smalltime_limit_q(p), abs=1e-6)


@pytest.mark.parametrize("a,th,sign", [(0.5, 0.0, 1), (0.5, math.pi, -1)])
def test_early_extremum_reaches_one_sigma(a, th, sign):
    x = np.linspace(1e-6, 0.5, 5000)
    q = mean_q_closed(mp(a, th), x)
    peak = q[np.argmax(np.abs(q))]
    assert peak == pytest.approx(sign * 1.0, abs=0.01)


def test_amplification_factor_is_one_over_4k():
    x = np.linspace(0, 4 * math.pi, 20001)
    p = mp(0.5, 0.0)
    ratio = np.max(np.abs(mean_q_closed(p, x))) / np.max(mean_q_unpostselected(p, x))
    assert ratio == pytest.approx(1 / (4 * K), rel=0.05)


def test_ground_pointer_state_against_oracle_at_pi():
    p = mp()
    s = oracle.evolve_closed(oracle.single_photon_state(0.0, 32), p, math.pi)
    mirror, prob = oracle.postselect_dark(s)
    assert prob == pytest.approx(postselected_probability(p, math.pi), rel=1e-10)
    # (1/4)|2k|^2 = k^2 to leading order
    assert prob == pytest.approx(K**2, rel=0.01)
    q_oracle = oracle.expect_q_fock(mirror) - oracle.expect_q_fock(s[1])
    assert mean_q_closed(p, math.pi) == pytest.approx(q_oracle, rel=1e-8)


def test_plateau_and_roots():
    assert solve_max_amp_time(mp(0.5, 0.0)) is PLATEAU
    assert solve_max_amp_time(mp(0.5, math.pi), sign=-1) is PLATEAU
    with pytest.raises(NoRoot):
        solve_max_amp_time(mp(1.0, 0.0))
    with pytest.raises(NoRoot):
        solve_max_amp_time(mp(0.0))
    # pick |alpha| so that the nontrivial root sits at wt = 0.05 for theta = 0.1
    th, x0 = 0.1, 0.05
    a = 1 / (2 * math.cos(th) + x0 * math.sin(th))
    root = solve_max_amp_time(mp(a, th))
    assert root == pytest.approx(x0, rel=1e-12)
    assert mean_q_smalltime(mp(a, th), root) == pytest.approx(1.0, rel=1e-12)


def test_pi_condition_sign_gives_momentum_minimum():
    p = mp(0.5, math.pi / 2)
    assert pi_condition(p, math.pi, sign=1)
    assert not pi_condition(p, math.pi, sign=-1)
    assert mean_p_closed(p, math.pi) == pytest.approx(-1.0, abs=1e-3)
    q = mp(0.5, 3 * math.pi / 2)
    assert pi_condition(q, math.pi, sign=-1)
    assert mean_p_closed(q, math.pi) == pytest.approx(1.0, abs=1e-3)


def _pi_residual(k, x):
    p = mp(0.5, math.pi / 2, k=k)
    amp = pi_expansion_state(p, x)
    s = postselected_mirror_state(p, x)
    vec = s.c0 * oracle.coherent_fock(s.beta0, 8) + s.c1 * oracle.coherent_fock(0, 8)
    # remove the global phase before comparing
    phase = vec[1] / abs(vec[1]) * abs(amp[1]) / amp[1]
    return np.max(np.abs(vec[:2] / phase - amp))


def test_pi_expansion_state_against_exact():
    # the expansion is first order in k, so the residual is O(k^2)
    assert _pi_residual(K, math.pi + 0.01) < 2 * K**2
    ratio = _pi_residual(K, math.pi) / _pi_residual(K / 2, math.pi)
    assert 3.5 < ratio < 4.5
    with pytest.raises(DomainError):
        pi_expansion_state(mp(0.5, math.pi / 2), 2.0)


def test_total_phase_is_sum():
    p = mp(2.0, 1.2)
    x = 0.7
    assert total_phase(p, x) == pytest.approx(kerr_phase(K, x) + phi_alpha(K, p.alpha, x))


def test_state_expectation_agrees_with_pointer_algebra():
    p = mp(1.0, math.pi / 3)
    x = 1.3
    assert mean_q_closed(p, x) == pytest.approx(expectation_q(postselected_mirror_state(p, x)))
