"""Derivative-free search over passive networks for Bell-state analyzers.

Networks are parameterized by a triangular mesh of ``n (n - 1) / 2``
beamsplitters on neighbouring modes followed by output phases. The exact
success probability is piecewise constant, so the search climbs a smooth
surrogate,

    sum_o q(o) * purity(o) ** sharpness

where ``q(o)`` is the prior-weighted probability of outcome ``o`` and
``purity(o)`` the largest single-state share of it. Raising ``sharpness``
through a schedule pushes outcomes towards exact unambiguity. Every
reported success probability comes from :func:`classify`, never from the
surrogate.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .detection import ZERO_TOL
from .discrimination import classify
from .network import Beamsplitter, LinearNetwork, PhaseShifter, RawUnitary, compose, random_haar
from .states import DimensionError, Priors

__all__ = [
    "DEFAULT_SCHEDULE",
    "MeshParameters",
    "OptimizationResult",
    "mesh_pairs",
    "mesh_to_network",
    "optimize",
    "smoothed_objective",
    "smoothed_score",
    "tap_photon_a",
    "verify_bound",
]

log = logging.getLogger(__name__)

# (sharpness, smallest step in radians) per search stage
DEFAULT_SCHEDULE: tuple[tuple[float, float], ...] = ((2, 1e-3), (8, 1e-4), (32, 1e-6), (128, 1e-8))
INITIAL_STEP = 0.5
STAGE_BUDGET = 20_000
# a state counts as identified only with at least this much unambiguous probability
IDENTIFIED_FLOOR = 1e-6
# identified states at or above this probability are "certain", not partial
CERTAIN = 1.0 - 1e-9


def mesh_pairs(n: int) -> list[tuple[int, int]]:
    """Neighbouring-mode couplers of the triangular mesh, in application order."""
    return [(q, q + 1) for p in range(1, n) for q in range(p, 0, -1)]


@dataclass(frozen=True)
class MeshParameters:
    n: int
    rotations: tuple  # (i, j, theta, phi) per coupler, mesh order
    output_phases: tuple

    def __post_init__(self) -> None:
        rot = tuple((int(i), int(j), float(t), float(p)) for i, j, t, p in self.rotations)
        phases = tuple(float(x) for x in self.output_phases)
        expected = mesh_pairs(self.n)
        if [(i, j) for i, j, _, _ in rot] != expected:
            raise ValueError(
                f"mesh for {self.n} modes needs {len(expected)} rotations on {expected}"
            )
        if len(phases) != self.n:
            raise ValueError(f"need {self.n} output phases, got {len(phases)}")
        if not all(np.isfinite(v) for r in rot for v in r[2:]) or not all(map(np.isfinite, phases)):
            raise ValueError("mesh angles must be finite")
        object.__setattr__(self, "rotations", rot)
        object.__setattr__(self, "output_phases", phases)

    @classmethod
    def zeros(cls, n: int) -> "MeshParameters":
        return cls.from_vector(n, np.zeros(n * (n - 1)))

    @classmethod
    def from_vector(cls, n: int, x: Sequence[float], output_phases: Optional[Sequence[float]] = None):
        """Build from interleaved ``(theta_1, phi_1, theta_2, phi_2, ...)``."""
        pairs = mesh_pairs(n)
        x = np.asarray(x, dtype=float)
        if x.shape != (2 * len(pairs),):
            raise ValueError(f"expected {2 * len(pairs)} mesh angles, got {x.shape}")
        rot = [(i, j, x[2 * k], x[2 * k + 1]) for k, (i, j) in enumerate(pairs)]
        return cls(n, tuple(rot), tuple(output_phases) if output_phases is not None else (0.0,) * n)

    def to_vector(self) -> np.ndarray:
        return np.array([v for _, _, t, p in self.rotations for v in (t, p)])


def mesh_to_network(params: MeshParameters) -> LinearNetwork:
    elements = [Beamsplitter(i, j, t, p) for i, j, t, p in params.rotations]
    elements += [PhaseShifter(k + 1, ph) for k, ph in enumerate(params.output_phases) if ph != 0.0]
    return compose(params.n, elements)


class _MeshEvaluator:
    """Outcome-probability table of the four Bell states for raw mesh angles.

    Only the first four rows of the unitary carry photons, so the mesh is
    propagated on a 4 x n block. Output phases never change click
    statistics and are left out.
    """

    def __init__(self, n: int):
        self.n = n
        self.pairs = [(i - 1, j - 1) for i, j in mesh_pairs(n)]
        r, c = np.triu_indices(n)
        self.rows, self.cols = r, c
        # |2 M_ij|^2 or 2 |M_ii|^2 with M = alpha^T W alpha / (2 sqrt 2)
        self.weight = np.where(r == c, 2.0, 4.0) / 8.0

    def coupling(self, x: np.ndarray) -> np.ndarray:
        cs, sn, ep = np.cos(x[0::2]), np.sin(x[0::2]), np.exp(1j * x[1::2])
        u = np.eye(4, self.n, dtype=complex)
        for k, (a, b) in enumerate(self.pairs):
            ua, ub = u[:, a], u[:, b]
            na = ep[k] * (cs[k] * ua + sn[k] * ub)
            u[:, b] = cs[k] * ub - sn[k] * ua
            u[:, a] = na
        return u

    def table(self, x: np.ndarray) -> np.ndarray:
        a1, a2, a3, a4 = self.coupling(x)
        x13, x24 = np.outer(a1, a3), np.outer(a2, a4)
        x14, x23 = np.outer(a1, a4), np.outer(a2, a3)
        p, q = x13 + x13.T, x24 + x24.T
        r, s = x14 + x14.T, x23 + x23.T
        amps = np.stack([p + q, p - q, r + s, r - s])[:, self.rows, self.cols]
        return (self.weight * np.abs(amps) ** 2).T


def _surrogate(table: np.ndarray, prior: np.ndarray, sharpness: float) -> float:
    weighted = table * prior
    q = weighted.sum(axis=1)
    top = weighted.max(axis=1)
    live = q > 0
    return float(np.sum(q[live] * (top[live] / q[live]) ** sharpness))


def _identified_count(table: np.ndarray, tolerance: float) -> int:
    live = table > tolerance
    pure = live.sum(axis=1) == 1
    mass = np.where(live[pure], table[pure], 0.0).sum(axis=0)
    return int(np.count_nonzero(mass >= IDENTIFIED_FLOOR))


def _witness_states(state_success: Sequence[float]) -> frozenset:
    return frozenset(mu for mu, p in zip((1, 2, 3, 4), state_success) if p >= IDENTIFIED_FLOOR)


def _is_partial_witness(state_success: Sequence[float], success: float, bound: float) -> bool:
    """Three or more identified states, none with certainty, success within the bound."""
    states = _witness_states(state_success)
    return (
        len(states) >= 3
        and all(state_success[mu - 1] < CERTAIN for mu in states)
        and success <= bound + 1e-9
    )


def smoothed_objective(params: MeshParameters, priors: Optional[Priors] = None, sharpness: float = 8) -> float:
    """Purity-weighted outcome mass; tends to the exact success probability
    as ``sharpness`` grows when the unambiguous outcomes are exact.
    """
    if sharpness < 1:
        raise ValueError(f"sharpness must be >= 1, got {sharpness}")
    priors = priors or Priors()
    table = _MeshEvaluator(params.n).table(params.to_vector())
    return _surrogate(table, priors.as_array(), sharpness)


def smoothed_score(net: LinearNetwork, priors: Optional[Priors] = None, sharpness: float = 8) -> float:
    """The surrogate evaluated on an arbitrary network through :func:`classify`."""
    if sharpness < 1:
        raise ValueError(f"sharpness must be >= 1, got {sharpness}")
    priors = priors or Priors()
    table = np.array([r.probabilities for r in classify(net, priors).rows])
    return _surrogate(table, priors.as_array(), sharpness)


def _hooke_jeeves(
    f: Callable[[np.ndarray], float],
    x: np.ndarray,
    step: float,
    min_step: float,
    budget: int,
) -> tuple[np.ndarray, float, int]:
    """Maximize ``f`` by coordinate probes with pattern moves; halve the step on failure."""

    def explore(base, fbase, evals):
        for k in range(base.size):
            for sign in (1.0, -1.0):
                y = base.copy()
                y[k] += sign * step
                fy = f(y)
                evals += 1
                if fy > fbase:
                    base, fbase = y, fy
                    break
        return base, fbase, evals

    fx = f(x)
    evals = 1
    while step > min_step and evals < budget:
        xn, fn, evals = explore(x, fx, evals)
        if fn > fx:
            while evals < budget:
                pattern = xn + (xn - x)
                fp = f(pattern)
                evals += 1
                x, fx = xn, fn
                xn, fn, evals = explore(pattern, fp, evals)
                if not fn > fx:
                    break
        else:
            step *= 0.5
    return x, fx, evals


@dataclass(frozen=True)
class RestartOutcome:
    index: int
    x: np.ndarray
    score: float
    exact_success: float
    state_success: tuple
    evaluations: int
    trace: tuple


def _run_restart(
    n: int,
    index: int,
    seed: int,
    prior: tuple,
    min_identified: int,
    schedule: tuple,
    tolerance: float,
) -> RestartOutcome:
    ev = _MeshEvaluator(n)
    weights = np.array(prior)
    rng = np.random.default_rng(seed + index)
    x = rng.uniform(0.0, 2.0 * np.pi, 2 * len(ev.pairs))

    step = INITIAL_STEP
    total = 0
    trace = []
    score = 0.0
    for sharpness, min_step in schedule:

        def f(y, s=sharpness):
            table = ev.table(y)
            value = _surrogate(table, weights, s)
            if min_identified:
                value -= max(0, min_identified - _identified_count(table, tolerance))
            return value

        x, score, used = _hooke_jeeves(f, x, step, min_step, STAGE_BUDGET)
        total += used
        trace.append((total, score))
        step = max(16 * min_step, 1e-3)

    net = mesh_to_network(MeshParameters.from_vector(n, x))
    report = classify(net, Priors(prior), tolerance)
    return RestartOutcome(
        index, x, score, report.success_probability, report.state_success, total, tuple(trace)
    )


@dataclass(frozen=True)
class OptimizationResult:
    best_params: MeshParameters
    best_network: LinearNetwork
    exact_success: float
    smoothed_score: float
    identified_states: frozenset  # states with >= IDENTIFIED_FLOOR unambiguous probability
    state_success: tuple
    restarts_run: int
    seed: int
    min_identified: int
    feasible: bool  # best network meets min_identified under exact classification
    partial_witness: bool  # >= 3 identified states, each with probability < 1
    trace: tuple  # (restart, cumulative evaluations, surrogate score) per stage
    restart_success: tuple = field(default=())


def optimize(
    n_modes: int,
    restarts: int,
    seed: int,
    priors: Optional[Priors] = None,
    min_identified: int = 0,
    schedule: Sequence[tuple[float, float]] = DEFAULT_SCHEDULE,
    tolerance: float = ZERO_TOL,
    workers: int = 1,
) -> OptimizationResult:
    """Best Bell analyzer found from ``restarts`` independent mesh searches.

    Restart ``k`` draws its starting angles from ``seed + k``. Candidates
    identifying fewer than ``min_identified`` Bell states (exact
    classification) pay a penalty of 1 per missing state. The winner is the
    feasible restart with the largest exact success probability, ties going
    to the lower restart index; ``feasible`` is False when no restart met
    the constraint. Among feasible restarts, networks identifying three or
    more states none of them with certainty are preferred.
    """
    if n_modes < 4:
        raise DimensionError(f"need >= 4 modes, got {n_modes}")
    if restarts < 1:
        raise ValueError(f"restarts must be >= 1, got {restarts}")
    if not 0 <= min_identified <= 4:
        raise ValueError(f"min_identified must be in 0..4, got {min_identified}")
    priors = priors or Priors()
    schedule = tuple((float(s), float(m)) for s, m in schedule)
    args = [(n_modes, k, seed, priors.p, min_identified, schedule, tolerance) for k in range(restarts)]

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_restart, *zip(*args)))
    else:
        outcomes = [_run_restart(*a) for a in args]

    bound = priors.top_two_sum()
    for o in outcomes:
        log.debug("restart %d: exact %.12g, states %s", o.index, o.exact_success, o.state_success)

    def rank(o: RestartOutcome):
        feasible = len(_witness_states(o.state_success)) >= min_identified
        partial = min_identified >= 3 and _is_partial_witness(o.state_success, o.exact_success, bound)
        return (feasible, partial, o.exact_success, -o.index)

    best = max(outcomes, key=rank)
    params = MeshParameters.from_vector(n_modes, best.x)
    net = mesh_to_network(params)
    report = classify(net, priors, tolerance)
    return OptimizationResult(
        best_params=params,
        best_network=net,
        exact_success=report.success_probability,
        smoothed_score=best.score,
        identified_states=_witness_states(report.state_success),
        state_success=report.state_success,
        restarts_run=restarts,
        seed=seed,
        min_identified=min_identified,
        feasible=len(_witness_states(report.state_success)) >= min_identified,
        partial_witness=_is_partial_witness(report.state_success, report.success_probability, bound),
        trace=tuple((o.index, e, s) for o in outcomes for e, s in o.trace),
        restart_success=tuple(o.exact_success for o in outcomes),
    )


def tap_photon_a(net: LinearNetwork, theta: float = 0.3) -> LinearNetwork:
    """Prefix ``net`` with couplers leaking photon A into two new vacuum modes.

    Modes 1 and 2 are coupled to ancillas ``n + 1`` and ``n + 2`` with the same
    angle, which scales every amplitude in which photon A reaches ``net`` by
    ``cos(theta)``. A network identifying some state with certainty thus
    becomes one identifying it with probability ``cos(theta)**2``.
    """
    n = net.n + 2
    elements = [Beamsplitter(1, n - 1, theta), Beamsplitter(2, n, theta), RawUnitary(net.u)]
    return compose(n, elements)


def verify_bound(
    trials: int,
    n_modes: int,
    seed: int,
    priors: Optional[Priors] = None,
    generator: Callable[[int, int], LinearNetwork] = random_haar,
) -> tuple[float, int]:
    """Largest exact success over ``trials`` networks ``generator(n_modes, seed + t)``.

    Returns ``(max_success, seed_of_max)``.
    """
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    best, best_seed = -1.0, seed
    for t in range(trials):
        p = classify(generator(n_modes, seed + t), priors).success_probability
        if p > best:
            best, best_seed = p, seed + t
    return best, best_seed
