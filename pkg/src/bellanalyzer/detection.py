"""Photon-counting statistics of a two-photon state after a linear network.

Detectors are ideal and number resolving. With two photons in the output
form ``M`` the possible clicks are a coincidence ``(i, j)``, ``i < j``, with
probability ``4 |M_ij|^2``, or a double click ``(i, i)`` with probability
``2 |M_ii|^2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .network import LinearNetwork, apply, truncate_alpha
from .states import BELL_INDICES, BellIndex, BilinearForm, DimensionError, bell_form, w_matrix

__all__ = [
    "ZERO_TOL",
    "ConditionalState",
    "DetectionOutcome",
    "bell_outputs",
    "conditional_overlap",
    "conditional_overlap_direct",
    "conditional_state",
    "enumerate_outcomes",
    "outcome_probabilities",
    "outcome_probability",
    "s_matrix",
    "s_vector",
    "single_photon_probability",
    "two_photon_probability",
]

# probabilities at or below this are treated as exact zeros
ZERO_TOL = 1e-10


class DetectionOutcome(NamedTuple):
    """Clicked output modes ``i <= j`` (1-based); ``i == j`` is a double click."""

    i: int
    j: int

    @property
    def is_double(self) -> bool:
        return self.i == self.j

    def __str__(self) -> str:
        return f"({self.i},{self.j})"


def enumerate_outcomes(n: int) -> list[DetectionOutcome]:
    """All ``n (n + 1) / 2`` two-photon click patterns in lexicographic order."""
    if n < 1:
        raise DimensionError(f"mode count must be positive, got {n}")
    return [DetectionOutcome(i, j) for i in range(1, n + 1) for j in range(i, n + 1)]


def outcome_probabilities(form: BilinearForm) -> np.ndarray:
    """Probabilities of every outcome, ordered as :func:`enumerate_outcomes`."""
    m = form.entries
    r, c = np.triu_indices(form.n)
    weight = np.where(r == c, 2.0, 4.0)
    return weight * np.abs(m[r, c]) ** 2


def outcome_probability(form: BilinearForm, o: tuple[int, int]) -> float:
    i, j = sorted(o)
    if not 1 <= i <= j <= form.n:
        raise DimensionError(f"outcome {o} outside 1..{form.n}")
    amp = form.entries[i - 1, j - 1]
    return float((2.0 if i == j else 4.0) * abs(amp) ** 2)


def bell_outputs(net: LinearNetwork) -> list[BilinearForm]:
    """Output forms ``M^mu`` of the four Bell states."""
    return [apply(net, bell_form(mu, net.n)) for mu in BELL_INDICES]


def two_photon_probability(alpha: np.ndarray, mu: int) -> float:
    """Double-click probability ``|alpha^T W^mu alpha|^2 / 4`` at one output mode."""
    alpha = np.asarray(alpha)
    return float(abs(alpha @ w_matrix(mu) @ alpha) ** 2 / 4.0)


@dataclass(frozen=True, eq=False)
class ConditionalState:
    """Unnormalized state of the second photon after one click in ``detected_mode``.

    The squared norm of ``amplitudes`` is the single-click probability.
    """

    amplitudes: np.ndarray
    detected_mode: int

    @property
    def n(self) -> int:
        return self.amplitudes.shape[0]

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def inner(self, other: "ConditionalState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def conditional_state(form: BilinearForm, i: int) -> ConditionalState:
    """Remaining one-photon amplitudes ``2 M_ij`` (``j != i``) after a click at ``i``."""
    if not 1 <= i <= form.n:
        raise DimensionError(f"mode index {i} outside 1..{form.n}")
    amps = 2.0 * np.array(form.entries[i - 1], dtype=complex)
    amps[i - 1] = 0.0
    amps.setflags(write=False)
    return ConditionalState(amps, i)


def s_vector(alpha: np.ndarray, mu: int) -> np.ndarray:
    return w_matrix(mu) @ np.asarray(alpha)


def s_matrix(alpha: np.ndarray) -> np.ndarray:
    """4x4 matrix whose columns are ``s^1 .. s^4`` for the coupling ``alpha``."""
    return np.column_stack([s_vector(alpha, mu) for mu in BELL_INDICES])


def conditional_overlap(net: LinearNetwork, i: int, eta: int, mu: int) -> complex:
    """``<Phi_i^eta | Phi_i^mu>`` from the coupling vector of mode ``i`` alone."""
    BellIndex(eta), BellIndex(mu)
    alpha = truncate_alpha(net, i)
    s_eta, s_mu = s_vector(alpha, eta), s_vector(alpha, mu)
    return complex(0.5 * (np.vdot(s_eta, s_mu) - np.conj(alpha @ s_eta) * (alpha @ s_mu)))


def conditional_overlap_direct(net: LinearNetwork, i: int, eta: int, mu: int) -> complex:
    """Same overlap, computed from the full conditional amplitude vectors."""
    phi_eta = conditional_state(apply(net, bell_form(eta, net.n)), i)
    phi_mu = conditional_state(apply(net, bell_form(mu, net.n)), i)
    return phi_eta.inner(phi_mu)


def single_photon_probability(net: LinearNetwork, i: int, mu: int) -> float:
    """Probability that mode ``i`` registers exactly one of the two photons."""
    alpha = truncate_alpha(net, i)
    a = float(np.vdot(alpha, alpha).real)
    return 0.5 * (a - abs(alpha @ s_vector(alpha, mu)) ** 2)
