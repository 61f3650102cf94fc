"""Unambiguous Bell-state discrimination by a fixed linear network.

An outcome is *unambiguous* when exactly one Bell state can trigger it,
*ambiguous* when two or more can, and *dead* when none can. The success
probability is the prior-weighted mass of unambiguous outcomes; for any
passive network with vacuum ancillas it cannot exceed the sum of the two
largest priors (1/2 for equiprobable states).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .detection import (
    ZERO_TOL,
    DetectionOutcome,
    bell_outputs,
    conditional_state,
    enumerate_outcomes,
    outcome_probabilities,
    s_matrix,
)
from .network import LinearNetwork, truncate_alpha
from .states import BELL_INDICES, DimensionError, Priors

__all__ = [
    "DiscriminationReport",
    "LinearDependence",
    "OutcomeClass",
    "OutcomeRow",
    "check_linear_dependence",
    "check_two_photon_never_unambiguous",
    "classify",
    "max_identifiable_states",
    "per_mode_bound",
]

RANK_RTOL = 1e-10


@dataclass(frozen=True)
class OutcomeClass:
    kind: str  # "unambiguous" | "ambiguous" | "dead"
    support: frozenset = frozenset()

    @classmethod
    def from_probabilities(cls, probs: np.ndarray, tolerance: float) -> "OutcomeClass":
        support = frozenset(mu for mu, p in zip(BELL_INDICES, probs) if p > tolerance)
        if not support:
            return cls("dead")
        return cls("unambiguous" if len(support) == 1 else "ambiguous", support)

    @property
    def is_unambiguous(self) -> bool:
        return self.kind == "unambiguous"

    @property
    def state(self) -> Optional[int]:
        """The identified Bell index for an unambiguous outcome, else None."""
        return next(iter(self.support)) if self.is_unambiguous else None

    def __str__(self) -> str:
        if self.kind == "dead":
            return "dead"
        return f"{self.kind}{{{','.join(str(m) for m in sorted(self.support))}}}"


class OutcomeRow(NamedTuple):
    outcome: DetectionOutcome
    probabilities: tuple  # p(outcome | Psi^mu) for mu = 1..4
    klass: OutcomeClass


@dataclass(frozen=True)
class DiscriminationReport:
    n: int
    priors: Priors
    tolerance: float
    rows: tuple
    success_probability: float
    per_mode_success: tuple
    per_mode_bound: tuple
    identified_states: frozenset
    state_success: tuple  # unambiguous probability of each Bell state, unweighted
    smallest_nonzero: float
    largest_zeroed: float
    per_mode_bound_extrapolated: bool = field(default=False)

    @property
    def unambiguous_rows(self) -> list[OutcomeRow]:
        return [r for r in self.rows if r.klass.is_unambiguous]

    @property
    def success_bound(self) -> float:
        return self.priors.top_two_sum()

    def row(self, i: int, j: int) -> OutcomeRow:
        i, j = sorted((i, j))
        for r in self.rows:
            if r.outcome == (i, j):
                return r
        raise KeyError((i, j))


def classify(
    net: LinearNetwork,
    priors: Optional[Priors] = None,
    tolerance: float = ZERO_TOL,
) -> DiscriminationReport:
    """Tabulate every outcome of ``net`` for the four Bell inputs."""
    if net.n < 4:
        raise DimensionError(f"need >= 4 modes, network has {net.n}")
    if not tolerance > 0:
        raise ValueError(f"tolerance must be positive, got {tolerance}")
    priors = priors or Priors()
    prior = priors.as_array()
    outcomes = enumerate_outcomes(net.n)
    table = np.stack([outcome_probabilities(m) for m in bell_outputs(net)], axis=1)

    rows = []
    per_mode = np.zeros(net.n)
    state_success = np.zeros(4)
    success = 0.0
    for o, probs in zip(outcomes, table):
        klass = OutcomeClass.from_probabilities(probs, tolerance)
        rows.append(OutcomeRow(o, tuple(float(p) for p in probs), klass))
        if klass.is_unambiguous:
            k = klass.state - 1
            weight = prior[k] * probs[k]
            success += weight
            state_success[k] += probs[k]
            if not o.is_double:
                per_mode[o.i - 1] += weight
                per_mode[o.j - 1] += weight

    live = table[table > tolerance]
    zeroed = table[table <= tolerance]
    bounds = tuple(per_mode_bound(net, i, priors) for i in range(1, net.n + 1))
    return DiscriminationReport(
        n=net.n,
        priors=priors,
        tolerance=tolerance,
        rows=tuple(rows),
        success_probability=float(success),
        per_mode_success=tuple(float(x) for x in per_mode),
        per_mode_bound=bounds,
        identified_states=frozenset(r.klass.state for r in rows if r.klass.is_unambiguous),
        state_success=tuple(float(x) for x in state_success),
        smallest_nonzero=float(live.min()) if live.size else 0.0,
        largest_zeroed=float(zeroed.max()) if zeroed.size else 0.0,
        per_mode_bound_extrapolated=not priors.is_uniform,
    )


def per_mode_bound(net: LinearNetwork, i: int, priors: Optional[Priors] = None) -> float:
    """Upper bound on the success weight that passes through detector ``i``.

    At most two Bell states are identifiable at one detector, each with
    single-click probability at most ``|alpha_i|^2 / 2``. For equal priors
    this is ``|alpha_i|^2 / 4``; otherwise the two largest priors are used.
    """
    priors = priors or Priors()
    alpha = truncate_alpha(net, i)
    return float(priors.top_two_sum() / 2.0 * np.vdot(alpha, alpha).real)


def check_two_photon_never_unambiguous(
    net: LinearNetwork, tolerance: float = ZERO_TOL
) -> tuple[bool, Optional[OutcomeRow]]:
    """True unless some double click identifies a single Bell state.

    On failure the offending row is returned as the witness.
    """
    table = np.stack([outcome_probabilities(m) for m in bell_outputs(net)], axis=1)
    for o, probs in zip(enumerate_outcomes(net.n), table):
        if o.is_double:
            klass = OutcomeClass.from_probabilities(probs, tolerance)
            if klass.is_unambiguous:
                return False, OutcomeRow(o, tuple(float(p) for p in probs), klass)
    return True, None


class LinearDependence(NamedTuple):
    determinant: float
    coefficients: np.ndarray
    degenerate: bool  # alpha_i == 0: every coefficient vector works


def check_linear_dependence(net: LinearNetwork, i: int) -> LinearDependence:
    """Determinant of ``(s^1 .. s^4)`` at mode ``i`` and a unit null vector.

    The null vector is the right singular vector of the smallest singular
    value, rotated so its first non-negligible entry is real and positive.
    """
    alpha = truncate_alpha(net, i)
    s = s_matrix(alpha)
    det = float(abs(np.linalg.det(s)))
    if np.allclose(alpha, 0.0, rtol=0.0, atol=1e-15):
        return LinearDependence(det, np.array([1.0, 0.0, 0.0, 0.0], dtype=complex), True)
    _, _, vh = np.linalg.svd(s)
    b = vh[-1].conj()
    lead = next(x for x in b if abs(x) > 1e-12)
    b = b * (abs(lead) / lead)
    return LinearDependence(det, b, False)


def max_identifiable_states(net: LinearNetwork, i: int, tolerance: float = RANK_RTOL) -> int:
    """Bell states whose conditional state at mode ``i`` is independent of the rest.

    State ``mu`` counts when dropping it lowers the numerical rank of the
    Gram matrix of the four conditional states; ``tolerance`` is the
    singular-value cutoff relative to the largest one.
    """
    phis = [conditional_state(m, i).amplitudes for m in bell_outputs(net)]
    a = np.column_stack(phis)
    gram = a.conj().T @ a

    top = np.linalg.svd(gram, compute_uv=False)[0]
    if top == 0.0:
        return 0

    def rank(idx: list[int]) -> int:
        sv = np.linalg.svd(gram[np.ix_(idx, idx)], compute_uv=False)
        return int(np.sum(sv > tolerance * top))

    full = rank([0, 1, 2, 3])
    return sum(1 for k in range(4) if rank([x for x in range(4) if x != k]) < full)
