"""Integrator oracles: precession, decay, the closed form, reversibility."""

import numpy as np
import pytest

from sechspin.model import StateVector, SystemParams, larmor_from_field, two_pi_pulse
from sechspin.propagator import (
    MAX_STEPS,
    IntegratorOpts,
    NormBlowup,
    PulseSchedule,
    StepTooLarge,
    evolve_operator,
    propagate,
    propagate_backward,
    schedule_for_pulses,
    truncate_qubit,
)
from sechspin.special import rz_state


def test_free_precession_cosine():
    # no pulses: |<z|psi>|^2 = cos^2(omega_B t), period pi/omega_B
    w = larmor_from_field(0.29)
    sched = PulseSchedule([], (0.0, 500.0))
    s = SystemParams(omega_B=w)
    traj = propagate(StateVector.ket_z(), sched, s)
    pop = np.abs(traj.states[:, 1]) ** 2
    assert np.max(np.abs(pop - np.cos(w * traj.times) ** 2)) < 1e-8
    assert np.max(np.abs(traj.norms - 1.0)) < 1e-10


def test_trion_decay_norm():
    s = SystemParams(trion_lifetime=900.0, decay_enabled=True)
    sched = PulseSchedule([], (0.0, 900.0))
    traj = propagate(StateVector.ket_tau(), sched, s)
    assert np.max(np.abs(traj.norms - np.exp(-traj.times / 900.0))) < 1e-8
    assert np.all(traj.states[:, 0] == 0) and np.all(traj.states[:, 1] == 0)


@pytest.mark.parametrize("delta", [10.0, 1.0, 0.1])
def test_matches_closed_form_without_precession(delta):
    p = two_pi_pulse(1.0, delta)
    sched = schedule_for_pulses([p])
    traj = propagate(StateVector.ket_z(), sched, SystemParams())
    step = max(len(traj.times) // 60, 1)
    worst = 0.0
    for i in range(0, len(traj.times), step):
        ref = rz_state(float(traj.times[i]), p).amplitudes
        worst = max(worst, np.max(np.abs(traj.states[i] - ref)))
    assert worst < 1e-6


def test_backward_returns_initial_state():
    pulses = [two_pi_pulse(1.0, 0.5, 0.0), two_pi_pulse(1.0, -2.0, 21.0)]
    sched = schedule_for_pulses(pulses)
    s = SystemParams(omega_B=0.007)
    traj = propagate(StateVector.ket_z(), sched, s)
    back = propagate_backward(traj.final_state, sched, s)
    assert np.max(np.abs(back.amplitudes - StateVector.ket_z().amplitudes)) < 1e-6


def test_grid_halving_convergence():
    p = two_pi_pulse(1.0, 1.0)
    sched = schedule_for_pulses([p])
    s = SystemParams(omega_B=0.0072)
    f1 = propagate(StateVector.ket_z(), sched, s, IntegratorOpts(dt=0.01)).states[-1]
    f2 = propagate(StateVector.ket_z(), sched, s, IntegratorOpts(dt=0.005)).states[-1]
    assert np.max(np.abs(f1 - f2)) < 1e-9


def test_evolve_operator_unitary_without_decay():
    sched = schedule_for_pulses([two_pi_pulse(1.0, 0.7)])
    u = evolve_operator(sched, SystemParams(omega_B=0.007))
    assert np.max(np.abs(u.conj().T @ u - np.eye(3))) < 1e-8


def test_evolve_operator_contraction_with_decay():
    sched = schedule_for_pulses([two_pi_pulse(1.0, 0.7)])
    s = SystemParams(omega_B=0.007, trion_lifetime=900.0, decay_enabled=True)
    u = evolve_operator(sched, s)
    smax = np.linalg.svd(u, compute_uv=False).max()
    assert smax <= 1.0 + 1e-9
    assert smax < 1.0                      # decay must actually remove weight


def test_resonant_pulse_phase_pi():
    sched = schedule_for_pulses([two_pi_pulse(1.0, 0.0)])
    u = evolve_operator(sched, SystemParams())
    zz = u[1, 1]
    assert abs(abs(zz) - 1.0) < 1e-6
    assert np.angle(zz) == pytest.approx(np.pi, abs=1e-6)
    assert abs(u[0, 0] - 1.0) < 1e-10      # zbar untouched at omega_B = 0


def test_empty_schedule_identity():
    u = evolve_operator(PulseSchedule([], (0.0, 10.0)), SystemParams())
    assert np.array_equal(u, np.eye(3, dtype=complex))


def test_truncate_qubit():
    m = np.diag([0.5, 0.25, 7.0]).astype(complex)
    q = truncate_qubit(m)
    assert q.shape == (2, 2)
    assert np.array_equal(q, np.diag([0.5, 0.25]))
    q[0, 0] = 0                            # copy, not a view
    assert m[0, 0] == 0.5


def test_trajectory_sampling_stride():
    sched = schedule_for_pulses([two_pi_pulse(1.0, 1.0)])
    traj = propagate(StateVector.ket_z(), sched, SystemParams(),
                     IntegratorOpts(dt=0.01, sample_stride=7))
    t0, t1 = sched.window
    assert traj.times[0] == t0 and traj.times[-1] == t1
    assert len(traj.times) == len(traj.states) == len(traj.norms)
    full = propagate(StateVector.ket_z(), sched, SystemParams(),
                     IntegratorOpts(dt=0.01))
    assert np.allclose(traj.states[-1], full.states[-1], atol=0)


def test_step_guard():
    sched = schedule_for_pulses([two_pi_pulse(1.0, 0.0)])
    with pytest.raises(StepTooLarge):
        propagate(StateVector.ket_z(), sched, SystemParams(),
                  IntegratorOpts(dt=0.2))   # dt*Omega = 0.2 >= 0.1
    # default-resolution grid over an enormous window exceeds the step cap
    far = two_pi_pulse(1.0, 0.0, center=0.0)
    wide = PulseSchedule([far], (-15000.0, 15000.0))
    with pytest.raises(StepTooLarge):
        propagate(StateVector.ket_z(), wide, SystemParams())
    assert 30000.0 / 0.01 > MAX_STEPS      # the arithmetic the guard protects


def test_unnormalized_input_rejected():
    sched = PulseSchedule([], (0.0, 1.0))
    with pytest.raises(ValueError):
        propagate(StateVector([0.5, 0.0, 0.0]), sched, SystemParams())


def test_norm_blowup_is_arithmetic_error():
    assert issubclass(NormBlowup, ArithmeticError)
    assert issubclass(StepTooLarge, ValueError)


def test_schedule_validation():
    p = two_pi_pulse(1.0, 0.0, center=0.0)
    with pytest.raises(ValueError):
        PulseSchedule([p], (5.0, -5.0))                    # reversed window
    with pytest.raises(ValueError):
        PulseSchedule([p], (-2.0, 20.0))                   # margin < 5/eta
    q = two_pi_pulse(1.0, 1.0, center=0.0)
    with pytest.raises(ValueError):
        PulseSchedule([p, q], (-20.0, 20.0))               # equal centers
    r = two_pi_pulse(1.0, 1.0, center=3.0)
    with pytest.raises(ValueError):
        PulseSchedule([p, r], (-20.0, 23.0))               # envelopes overlap
    PulseSchedule([p, two_pi_pulse(1.0, 1.0, center=14.0)], (-20.0, 34.0))


def test_schedule_for_pulses_margins():
    p = two_pi_pulse(2.0, 0.0, center=5.0)
    sched = schedule_for_pulses([p])
    t0, t1 = sched.window
    # default margin puts the envelope at 1e-8 of peak at the window edge
    from sechspin.model import sech_envelope
    assert sech_envelope(t0, p) == pytest.approx(1e-8 * p.rabi_peak, rel=1e-6)
    assert t1 - 5.0 == pytest.approx(5.0 - t0, rel=1e-12)
    with pytest.raises(ValueError):
        schedule_for_pulses([])


def test_integrator_opts_validation():
    with pytest.raises(ValueError):
        IntegratorOpts(dt=0.0)
    with pytest.raises(ValueError):
        IntegratorOpts(sample_stride=0)


def test_fast_precession_warns():
    sched = schedule_for_pulses([two_pi_pulse(1.0, 0.0)])
    with pytest.warns(UserWarning):
        propagate(StateVector.ket_z(), sched, SystemParams(omega_B=0.5))
