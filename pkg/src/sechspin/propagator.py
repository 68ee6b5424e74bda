"""Numerical Schrödinger evolution for pulse schedules.

The integrator is classical fixed-step RK4, but applied to the matrix form
of the equation: each step contributes a 3x3 step matrix, the batch of
step matrices is built vectorized over the whole grid, and the evolution
is assembled either as a prefix scan (full trajectory) or a pairwise fold
(final operator only). This keeps sweeps fast without an adaptive solver,
and the fixed grid makes runs bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .model import (
    ENVELOPE_TAIL_ARG,
    PulseParams,
    StateVector,
    SystemParams,
    coupling,
    sech_envelope,
    warn_if_fast_precession,
)

# default step targets dt*fmax = RESOLUTION_TARGET; the hard guard rejects
# anything with dt*fmax >= RESOLUTION_GUARD
RESOLUTION_TARGET = 0.01
RESOLUTION_GUARD = 0.1
MAX_STEPS = 2_000_000
# two pulses count as overlapping when both envelopes exceed this fraction
# of their own peak at some instant; sub-percent tail contact is harmless
# because the Hamiltonian sums all pulse couplings exactly
OVERLAP_FRACTION = 1e-2


class StepTooLarge(ValueError):
    """Requested step violates the resolution guard."""


class NormBlowup(ArithmeticError):
    """Norm grew past 1 + 1e-6, integration is untrustworthy."""


@dataclass(frozen=True)
class PulseSchedule:
    pulses: Tuple[PulseParams, ...]
    window: Tuple[float, float]

    def __init__(self, pulses: Sequence[PulseParams], window: Tuple[float, float]):
        object.__setattr__(self, "pulses", tuple(pulses))
        object.__setattr__(self, "window", (float(window[0]), float(window[1])))
        self._validate()

    def _validate(self):
        t0, t1 = self.window
        if not t1 > t0:
            raise ValueError("window must have t_end > t_start")
        centers = [p.center for p in self.pulses]
        if any(b <= a for a, b in zip(centers, centers[1:])):
            raise ValueError("pulse centers must be strictly increasing")
        for p in self.pulses:
            margin = 5.0 / p.bandwidth
            if p.center - t0 < margin or t1 - p.center < margin:
                raise ValueError(
                    "window must contain each pulse center with margin >= 5/eta")
        self._check_overlap()

    def _check_overlap(self):
        if len(self.pulses) < 2:
            return
        t0, t1 = self.window
        finest = min(p.bandwidth for p in self.pulses)
        n = min(int((t1 - t0) * finest * 4) + 2, 20001)
        t = np.linspace(t0, t1, n)
        above = np.zeros(n, dtype=int)
        for p in self.pulses:
            above += sech_envelope(t, p) > OVERLAP_FRACTION * p.rabi_peak
        if np.any(above >= 2):
            raise ValueError(
                "pulses overlap: more than one envelope above %g of peak"
                % OVERLAP_FRACTION)

    @property
    def duration(self) -> float:
        return self.window[1] - self.window[0]


def schedule_for_pulses(pulses: Sequence[PulseParams],
                        margin: Optional[float] = None) -> PulseSchedule:
    """Window the pulses with a default margin of arccosh(1e8)/eta per side,
    where the truncated envelope is down to 1e-8 of peak."""
    if not pulses:
        raise ValueError("need at least one pulse (or build PulseSchedule directly)")
    first, last = pulses[0], pulses[-1]
    m0 = margin if margin is not None else ENVELOPE_TAIL_ARG / first.bandwidth
    m1 = margin if margin is not None else ENVELOPE_TAIL_ARG / last.bandwidth
    return PulseSchedule(pulses, (first.center - m0, last.center + m1))


@dataclass(frozen=True)
class IntegratorOpts:
    dt: Optional[float] = None     # ps; None picks dt from the resolution target
    sample_stride: int = 1

    def __post_init__(self):
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.sample_stride < 1:
            raise ValueError("sample_stride must be >= 1")


@dataclass(frozen=True, eq=False)
class Trajectory:
    times: np.ndarray    # (n,) strictly increasing
    states: np.ndarray   # (n, 3) complex amplitudes
    norms: np.ndarray    # (n,) sum of |amplitude|^2

    def state_at(self, i: int) -> StateVector:
        return StateVector(self.states[i])

    @property
    def final_state(self) -> StateVector:
        return StateVector(self.states[-1])


def _frequency_scale(sched: PulseSchedule, s: SystemParams) -> float:
    f = max(s.omega_B, s.decay_rate)
    for p in sched.pulses:
        f = max(f, p.rabi_peak, abs(p.detuning), p.bandwidth)
    return f


def _grid(sched: PulseSchedule, s: SystemParams, opts: IntegratorOpts):
    t0, t1 = sched.window
    span = t1 - t0
    fmax = _frequency_scale(sched, s)
    if opts.dt is not None:
        if opts.dt * fmax >= RESOLUTION_GUARD:
            raise StepTooLarge(
                "dt*fmax = %.3g exceeds the resolution guard %.2g"
                % (opts.dt * fmax, RESOLUTION_GUARD))
        n = max(int(np.ceil(span / opts.dt)), 2)
    elif fmax == 0.0:
        n = 16                     # H = 0, any grid is exact
    else:
        n = max(int(np.ceil(span * fmax / RESOLUTION_TARGET)), 16)
    if n > MAX_STEPS:
        raise StepTooLarge(
            "grid would need %d steps (> %d); pass a coarser dt or shrink the window"
            % (n, MAX_STEPS))
    return np.linspace(t0, t1, n + 1), span / n


def _a_matrices(t: np.ndarray, sched: PulseSchedule, s: SystemParams) -> np.ndarray:
    """-i*H(t) stacked over the grid, shape (len(t), 3, 3)."""
    v = coupling(t, sched.pulses)
    a = np.zeros((t.shape[0], 3, 3), dtype=complex)
    a[:, 0, 1] = -1j * s.omega_B
    a[:, 1, 0] = -1j * s.omega_B
    a[:, 1, 2] = -1j * v
    a[:, 2, 1] = -1j * np.conj(v)
    a[:, 2, 2] = -s.decay_rate
    return a


def _step_matrices(times: np.ndarray, dt: float, sched: PulseSchedule,
                   s: SystemParams) -> np.ndarray:
    """RK4 step matrices M_k mapping psi(t_k) to psi(t_k + dt)."""
    t = times[:-1]
    a1 = _a_matrices(t, sched, s)
    a2 = _a_matrices(t + 0.5 * dt, sched, s)
    a3 = _a_matrices(t + dt, sched, s)
    eye = np.eye(3, dtype=complex)
    k1 = a1
    k2 = np.matmul(a2, eye + (0.5 * dt) * k1)
    k3 = np.matmul(a2, eye + (0.5 * dt) * k2)
    k4 = np.matmul(a3, eye + dt * k3)
    return eye + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _prefix_products(mats: np.ndarray) -> np.ndarray:
    """out[k] = mats[k] @ mats[k-1] @ ... @ mats[0], log-depth doubling scan."""
    cur = mats.copy()
    n = cur.shape[0]
    offset = 1
    while offset < n:
        nxt = cur.copy()
        nxt[offset:] = np.matmul(cur[offset:], cur[:n - offset])
        cur = nxt
        offset *= 2
    return cur


def _fold(mats: np.ndarray) -> np.ndarray:
    """Ordered product mats[-1] @ ... @ mats[0] by pairwise reduction."""
    cur = mats
    while cur.shape[0] > 1:
        if cur.shape[0] % 2:
            tail = cur[-1:]
            body = np.matmul(cur[1:-1:2], cur[0:-1:2])
            cur = np.concatenate([body, tail], axis=0)
        else:
            cur = np.matmul(cur[1::2], cur[0::2])
    return cur[0]


def propagate(psi0: StateVector, sched: PulseSchedule, s: SystemParams,
              opts: Optional[IntegratorOpts] = None) -> Trajectory:
    """Solve i d(psi)/dt = H(t) psi over the schedule window.

    H sums every pulse coupling (each in its own detuning frame) plus the
    precession and optional decay terms. Raises StepTooLarge if the grid
    cannot resolve the fastest frequency, NormBlowup if the norm grows.
    """
    opts = opts or IntegratorOpts()
    if abs(psi0.norm_sq - 1.0) > 1e-9:
        raise ValueError("psi0 must be normalized")
    if sched.pulses:
        warn_if_fast_precession(s, min(p.bandwidth for p in sched.pulses))
    times, dt = _grid(sched, s, opts)
    mats = _step_matrices(times, dt, sched, s)
    prefixes = _prefix_products(mats)
    states = np.empty((times.shape[0], 3), dtype=complex)
    states[0] = psi0.amplitudes
    states[1:] = prefixes @ psi0.amplitudes
    norms = np.einsum("ij,ij->i", states, states.conj()).real
    if norms.max() > 1.0 + 1e-6:
        raise NormBlowup("norm reached %.9f" % norms.max())
    idx = np.arange(0, times.shape[0], opts.sample_stride)
    if idx[-1] != times.shape[0] - 1:
        idx = np.append(idx, times.shape[0] - 1)
    return Trajectory(times[idx], states[idx], norms[idx])


def propagate_backward(psi_end: StateVector, sched: PulseSchedule, s: SystemParams,
                       opts: Optional[IntegratorOpts] = None) -> StateVector:
    """Integrate the same equation from t_end back to t_start.

    Equivalent to evolving the time-mirrored schedule under the negated
    Hamiltonian; used to check integrator reversibility.
    """
    opts = opts or IntegratorOpts()
    times, dt = _grid(sched, s, opts)
    mats = _step_matrices(times[::-1].copy(), -dt, sched, s)
    psi = psi_end.amplitudes
    final = _fold(mats) @ psi
    return StateVector(final)


def evolve_operator(sched: PulseSchedule, s: SystemParams,
                    opts: Optional[IntegratorOpts] = None) -> np.ndarray:
    """Time-ordered evolution operator over the window, basis (zbar, z, trion).

    Columns are the propagated basis states. Unitary to integrator accuracy
    without decay, a contraction with decay on.
    """
    opts = opts or IntegratorOpts()
    if sched.pulses:
        warn_if_fast_precession(s, min(p.bandwidth for p in sched.pulses))
    times, dt = _grid(sched, s, opts)
    mats = _step_matrices(times, dt, sched, s)
    return _fold(mats)


def truncate_qubit(u3: np.ndarray) -> np.ndarray:
    """Upper-left 2x2 block, basis (zbar, z). No renormalization: the lost
    weight is physical population left in the trion level or decayed away."""
    u3 = np.asarray(u3)
    return u3[:2, :2].copy()
