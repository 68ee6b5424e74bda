"""Gauss hypergeometric evaluation and the closed-form pulsed state.

The driven two-level subsystem (|z>, |trion>) under a sech pulse has an
exact solution in terms of 2F1 with complex parameters. scipy's hyp2f1
only takes real a, b, c, so the series machinery here is hand-rolled for
the narrow regime this problem needs: z real in [0, 1], parameters built
from a = Omega/eta and c = (1 + i*Delta/eta)/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, gamma as cgamma, rgamma

from .model import PulseParams, StateVector

SERIES_RTOL = 1e-12
SERIES_MAX_TERMS = 10 ** 6


class NonConvergence(ArithmeticError):
    """Series failed to reach tolerance within the term cap."""


class InvalidC(ValueError):
    """c parameter is a non-positive integer (gamma pole on every term)."""


def _is_nonpositive_int(x: complex) -> bool:
    return x.imag == 0.0 and x.real <= 0.0 and float(x.real).is_integer()


@dataclass(frozen=True)
class HypParams:
    a: complex
    b: complex
    c: complex
    z: float

    def __post_init__(self):
        if _is_nonpositive_int(self.c):
            raise InvalidC("c = %r is a non-positive integer" % (self.c,))
        if not 0.0 <= self.z <= 1.0:
            raise ValueError("z must lie in [0, 1], got %r" % (self.z,))


def _series(a, b, c, z, max_terms=SERIES_MAX_TERMS):
    """Direct power series sum of 2F1. Terminates exactly when a or b is a
    non-positive integer; otherwise stops on two consecutive negligible terms."""
    total = term = 1.0 + 0.0j
    small_streak = 0
    for n in range(max_terms):
        term = term * (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        total += term
        if term == 0.0:           # terminating polynomial case, exact
            return total
        if abs(term) <= SERIES_RTOL * abs(total):
            small_streak += 1
            if small_streak >= 2:
                return total
        else:
            small_streak = 0
    raise NonConvergence(
        "2F1 series did not converge in %d terms (a=%r b=%r c=%r z=%r)"
        % (max_terms, a, b, c, z))


def _gauss_value(a, b, c):
    """2F1 at z = 1, Gauss summation. Needs Re(c - a - b) > 0."""
    s = c - a - b
    if s.real <= 0:
        raise NonConvergence("2F1 at z=1 diverges for Re(c-a-b) <= 0")
    # reciprocal gammas absorb poles of the denominator factors
    return cgamma(c) * cgamma(s) * rgamma(c - a) * rgamma(c - b)


def hyp2f1(h: HypParams) -> complex:
    """2F1(a, b; c; z) for z in [0, 1], relative accuracy ~1e-12.

    z <= 0.5 sums the defining series directly. z > 0.5 uses the
    z -> 1 - z connection formula, valid because c - a - b is never an
    integer for the parameter families used here (Re(c-a-b) = 1/2); if it
    is nearly an integer the direct series is used instead (it still
    converges for z < 1, just more slowly). z = 1 is the Gauss sum.
    """
    a, b, c, z = h.a, h.b, h.c, h.z
    if z == 0.0:
        return 1.0 + 0.0j
    # terminating cases are exact at any z and dodge the connection formula
    if _is_nonpositive_int(a) or _is_nonpositive_int(b):
        return _series(a, b, c, z)
    if z == 1.0:
        return _gauss_value(a, b, c)
    if z <= 0.5:
        return _series(a, b, c, z)
    s = c - a - b
    if abs(s - np.round(s.real)) < 1e-8:
        return _series(a, b, c, z)
    z1 = 1.0 - z
    f1 = cgamma(c) * cgamma(s) * rgamma(c - a) * rgamma(c - b) \
        * _series(a, b, 1.0 - s + 0j, z1)
    f2 = cgamma(c) * cgamma(-s) * rgamma(a) * rgamma(b) \
        * z1 ** s * _series(c - a, c - b, 1.0 + s, z1)
    return f1 + f2


def rz_state(t: float, p: PulseParams) -> StateVector:
    """Closed-form state at time t for a single pulse, precession neglected.

    Initial condition is |z> in the far past. The zbar amplitude is
    identically zero in this approximation; do not extrapolate it to
    omega_B > 0. The change of variable is z = (tanh(eta*(t-c)) + 1)/2,
    evaluated as a logistic for stability.
    """
    x = p.bandwidth * (t - p.center)
    z = float(expit(2.0 * x))            # (tanh(x)+1)/2 without cancellation
    a = p.rabi_peak / p.bandwidth
    c = 0.5 * (1.0 + 1j * p.detuning / p.bandwidth)
    c_z = hyp2f1(HypParams(a, -a, c, z))
    if z == 0.0:
        c_tau = 0.0 + 0.0j               # z^c -> 0 since Re c = 1/2 > 0
    else:
        z_pow_c = np.exp(c * np.log(z))  # principal branch, z > 0
        c_tau = -(1j * a / c) * z_pow_c * hyp2f1(HypParams(a + c, -a + c, 1.0 + c, z))
    return StateVector(np.array([0.0, c_z, c_tau], dtype=complex))


def overall_phase(omega: float, delta: float) -> float:
    """Phase picked up by |z> after one 2*pi pulse: 2*arctan(Omega/Delta).

    Branch: (0, pi] for Delta >= 0 with exactly pi at Delta = 0 (resonance),
    and (-pi, 0) for Delta < 0. Continuous in Delta on each sign.
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    if delta == 0.0:
        return float(np.pi)
    return float(2.0 * np.arctan(omega / delta))
