"""Two-photon states as symmetric bilinear forms over creation operators.

A two-photon pure state on ``n`` modes is written

    |psi> = sum_ij N_ij a_i^dag a_j^dag |0>

with ``N`` a symmetric complex ``n x n`` matrix. Its squared norm is
``2 * sum_ij |N_ij|^2`` (bosonic commutators give the factor 2).

Mode convention (1-based, used by every preset in this package):

    mode 1 -- photon A, horizontal polarization
    mode 2 -- photon A, vertical polarization
    mode 3 -- photon B, horizontal polarization
    mode 4 -- photon B, vertical polarization

Modes 5 and above are vacuum ancillas.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "BELL_INDICES",
    "BellIndex",
    "BilinearForm",
    "DimensionError",
    "Priors",
    "bell_form",
    "general_two_photon_form",
    "norm_squared",
    "w_matrix",
]

BELL_INDICES = (1, 2, 3, 4)

_NORM_ATOL = 1e-12
_PRIOR_ATOL = 1e-12


class DimensionError(ValueError):
    """Mode index or matrix size outside the allowed range."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


class BellIndex(int):
    """Label of one of the four Bell states, range-checked to 1..4."""

    def __new__(cls, mu: int) -> "BellIndex":
        if isinstance(mu, bool) or int(mu) != mu or not 1 <= int(mu) <= 4:
            raise ValueError(f"Bell index must be one of 1, 2, 3, 4; got {mu!r}")
        return super().__new__(cls, int(mu))


@dataclass(frozen=True, eq=False)
class BilinearForm:
    """Symmetric amplitude matrix of a two-photon state.

    ``entries`` is stored 0-based internally; use :meth:`entry` for 1-based
    access. The matrix is symmetrized on construction and is read-only.
    """

    entries: np.ndarray

    def __post_init__(self) -> None:
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DimensionError(f"bilinear form must be square, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("bilinear form has non-finite entries")
        # exact symmetrization; a symmetric input is returned bit-for-bit
        if not np.array_equal(m, m.T):
            m = 0.5 * (m + m.T)
        object.__setattr__(self, "entries", _frozen(m))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def entry(self, i: int, j: int) -> complex:
        """Amplitude ``N_ij`` with 1-based mode indices."""
        _check_mode(i, self.n)
        _check_mode(j, self.n)
        return complex(self.entries[i - 1, j - 1])

    def norm_squared(self) -> float:
        return norm_squared(self)

    def normalized(self) -> "BilinearForm":
        nsq = self.norm_squared()
        if nsq == 0.0:
            raise ValueError("cannot normalize the zero form")
        return BilinearForm(self.entries / np.sqrt(nsq))

    def inner(self, other: "BilinearForm") -> complex:
        """State overlap ``<self|other>`` = ``2 sum_ij conj(N_ij) M_ij``."""
        if other.n != self.n:
            raise DimensionError(f"mode counts differ: {self.n} vs {other.n}")
        return complex(2.0 * np.sum(np.conj(self.entries) * other.entries))

    def is_normalized(self, atol: float = _NORM_ATOL) -> bool:
        return abs(self.norm_squared() - 1.0) <= atol

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BilinearForm):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self) -> int:
        return hash(self.entries.tobytes())


def _check_mode(i: int, n: int) -> None:
    if not 1 <= i <= n:
        raise DimensionError(f"mode index {i} outside 1..{n}")


def w_matrix(mu: int) -> np.ndarray:
    """Integer 4x4 core of the Bell-state bilinear form.

    The off-diagonal 2x2 blocks couple photon A's polarizations (modes 1, 2)
    to photon B's (modes 3, 4); the diagonal blocks are zero. Every ``W`` is
    real orthogonal.
    """
    mu = BellIndex(mu)
    d = {k: int(mu == k) for k in BELL_INDICES}
    w = np.zeros((4, 4), dtype=int)
    w[0, 2] = w[2, 0] = d[1] + d[2]
    w[0, 3] = w[3, 0] = d[3] + d[4]
    w[1, 2] = w[2, 1] = d[3] - d[4]
    w[1, 3] = w[3, 1] = d[1] - d[2]
    w.setflags(write=False)
    return w


def bell_form(mu: int, n: int = 4) -> BilinearForm:
    """Bilinear form of Bell state ``mu`` padded with ``n - 4`` vacuum modes."""
    if n < 4:
        raise DimensionError(f"Bell states need at least 4 modes, got {n}")
    m = np.zeros((n, n), dtype=complex)
    m[:4, :4] = w_matrix(mu) / (2.0 * np.sqrt(2.0))
    return BilinearForm(m)


def norm_squared(form: BilinearForm) -> float:
    """Squared state norm ``2 sum_ij |N_ij|^2``."""
    return float(2.0 * np.sum(np.abs(form.entries) ** 2))


def general_two_photon_form(
    coeffs: Iterable[tuple[int, int, complex]],
    n: int,
    normalize: bool = False,
) -> BilinearForm:
    """Build a form from monomials ``c * a_i^dag a_j^dag`` (1-based modes).

    Off-diagonal coefficients are split evenly between ``(i, j)`` and
    ``(j, i)``, so ``[(1, 3, c)]`` is the state ``c a_1^dag a_3^dag |0>``.
    Repeated monomials accumulate.
    """
    if n < 1:
        raise DimensionError(f"mode count must be positive, got {n}")
    m = np.zeros((n, n), dtype=complex)
    for i, j, c in coeffs:
        _check_mode(i, n)
        _check_mode(j, n)
        if i == j:
            m[i - 1, i - 1] += c
        else:
            m[i - 1, j - 1] += c / 2
            m[j - 1, i - 1] += c / 2
    form = BilinearForm(m)
    return form.normalized() if normalize else form


@dataclass(frozen=True)
class Priors:
    """A priori probabilities of the four Bell states (uniform by default)."""

    p: tuple[float, float, float, float] = (0.25, 0.25, 0.25, 0.25)

    def __post_init__(self) -> None:
        p = tuple(float(x) for x in self.p)
        if len(p) != 4:
            raise ValueError(f"need exactly four priors, got {len(p)}")
        if any(not np.isfinite(x) or x < 0 for x in p):
            raise ValueError(f"priors must be finite and non-negative: {p}")
        if abs(sum(p) - 1.0) > _PRIOR_ATOL:
            raise ValueError(f"priors must sum to 1, got {sum(p)!r}")
        object.__setattr__(self, "p", p)

    @classmethod
    def from_weights(cls, weights: Sequence[float], atol: float = 1e-9) -> "Priors":
        """Accept weights summing to 1 within ``atol`` and renormalize them."""
        w = [float(x) for x in weights]
        if len(w) != 4:
            raise ValueError(f"need exactly four priors, got {len(w)}")
        total = sum(w)
        if abs(total - 1.0) > atol:
            raise ValueError(f"priors must sum to 1 (within {atol}), got {total!r}")
        return cls(tuple(x / total for x in w))

    def __getitem__(self, mu: int) -> float:
        """Prior of Bell state ``mu`` (1-based)."""
        return self.p[BellIndex(mu) - 1]

    def as_array(self) -> np.ndarray:
        return np.array(self.p)

    def top_two_sum(self) -> float:
        a, b = sorted(self.p, reverse=True)[:2]
        return a + b

    @property
    def is_uniform(self) -> bool:
        return all(x == 0.25 for x in self.p)
