"""Numerical checks of the structural facts behind the 1/2 success bound.

Each check reduces one network to a residual that must stay below a fixed
tolerance. :func:`check_network` runs them all; :class:`CheckTally`
accumulates worst cases over many networks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .detection import ZERO_TOL, bell_outputs, outcome_probabilities, s_matrix
from .discrimination import DiscriminationReport, check_linear_dependence, classify, max_identifiable_states
from .network import LinearNetwork
from .states import Priors, w_matrix

__all__ = ["CHECKS", "CheckTally", "check_network"]

# name -> (tolerance, description); residual <= tolerance passes
CHECKS: dict[str, tuple[float, str]] = {
    "two_photon_ambiguity": (0.0, "double clicks never identify a single Bell state"),
    "two_photon_formula": (1e-12, "double-click probability equals |a.W.a|^2/4"),
    "s_determinant": (1e-10, "|det(s^1..s^4)| vanishes at every output mode"),
    "s_norm": (1e-12, "|s^mu| equals |alpha| for every Bell state"),
    "dependence_support": (0.0, "null vector has >= 2 entries above 1e-8 when |alpha| > 0.1"),
    "overlap_formula": (1e-12, "s-vector overlap formula matches direct inner products"),
    "max_identifiable": (0.0, "at most two Bell states identifiable per detector"),
    "column_sum": (1e-10, "sum_i |alpha_i|^2 equals 4"),
    "completeness": (1e-10, "outcome probabilities sum to 1 for each Bell state"),
    "per_mode_bound": (1e-10, "per-detector success stays below its bound"),
    "total_bound": (1e-9, "success probability at most the two largest priors"),
}

_SUPPORT_FLOOR = 1e-8
_ALPHA_FLOOR = 0.1


def check_network(
    net: LinearNetwork,
    priors: Optional[Priors] = None,
    tolerance: float = ZERO_TOL,
    report: Optional[DiscriminationReport] = None,
) -> dict[str, float]:
    """Residual of every check in :data:`CHECKS` for one network."""
    priors = priors or Priors()
    report = report or classify(net, priors, tolerance)
    forms = bell_outputs(net)
    table = np.stack([outcome_probabilities(m) for m in forms], axis=1)
    n = net.n
    diag_rows = np.cumsum([0] + [n - k for k in range(n - 1)])  # (i, i) positions in the table

    res: dict[str, float] = {}
    res["two_photon_ambiguity"] = float(
        sum(1 for r in report.rows if r.outcome.is_double and r.klass.is_unambiguous)
    )

    alphas = net.u[:4, :]
    ws = [w_matrix(mu) for mu in (1, 2, 3, 4)]
    two_photon = np.array([[abs(a @ w @ a) ** 2 / 4 for w in ws] for a in alphas.T])
    res["two_photon_formula"] = float(np.max(np.abs(two_photon - table[diag_rows])))

    det_worst = norm_worst = overlap_worst = 0.0
    support_fail = identify_fail = 0
    # conditional amplitudes: phi[mu][:, i] is the state left after a click at i
    cond = [2.0 * m.entries.copy() for m in forms]
    for c in cond:
        np.fill_diagonal(c, 0.0)
    for i in range(n):
        a = alphas[:, i]
        s = s_matrix(a)
        anorm = np.linalg.norm(a)
        norm_worst = max(norm_worst, float(np.max(np.abs(np.linalg.norm(s, axis=0) - anorm))))
        dep = check_linear_dependence(net, i + 1)
        det_worst = max(det_worst, dep.determinant)
        if anorm > _ALPHA_FLOOR and np.count_nonzero(np.abs(dep.coefficients) > _SUPPORT_FLOOR) < 2:
            support_fail += 1
        phis = np.column_stack([c[:, i] for c in cond])
        direct = phis.conj().T @ phis
        proj = a @ s  # alpha . s^mu for each mu
        formula = 0.5 * (s.conj().T @ s - np.outer(proj.conj(), proj))
        overlap_worst = max(overlap_worst, float(np.max(np.abs(direct - formula))))
        if max_identifiable_states(net, i + 1) > 2:
            identify_fail += 1
    res["s_determinant"] = det_worst
    res["s_norm"] = norm_worst
    res["dependence_support"] = float(support_fail)
    res["overlap_formula"] = overlap_worst
    res["max_identifiable"] = float(identify_fail)

    res["column_sum"] = float(abs(np.sum(np.abs(alphas) ** 2) - 4.0))
    res["completeness"] = float(np.max(np.abs(table.sum(axis=0) - 1.0)))
    res["per_mode_bound"] = float(
        max(0.0, max(s - b for s, b in zip(report.per_mode_success, report.per_mode_bound)))
    )
    res["total_bound"] = float(max(0.0, report.success_probability - priors.top_two_sum()))
    return res


@dataclass
class CheckTally:
    """Pass/fail counts and worst residual per check over many networks."""

    passed: dict = field(default_factory=lambda: {k: 0 for k in CHECKS})
    failed: dict = field(default_factory=lambda: {k: 0 for k in CHECKS})
    worst: dict = field(default_factory=lambda: {k: 0.0 for k in CHECKS})
    networks: int = 0
    max_success: float = 0.0
    argmax: Optional[tuple] = None

    def add(self, residuals: dict[str, float], success: float, label=None) -> None:
        self.networks += 1
        for name, value in residuals.items():
            tol = CHECKS[name][0]
            if value <= tol:
                self.passed[name] += 1
            else:
                self.failed[name] += 1
            self.worst[name] = max(self.worst[name], value)
        if self.argmax is None or success > self.max_success:
            self.max_success, self.argmax = success, label

    @property
    def ok(self) -> bool:
        return not any(self.failed.values())
