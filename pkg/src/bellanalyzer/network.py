"""Passive linear-optical networks on ``n`` modes.

A network is an ``n x n`` unitary ``U`` relating input creation operators
to output ones by ``a_j^dag = sum_k U_jk c_k^dag``. A two-photon input form
``N`` then reads ``M = U^T N U`` in the output modes, and column ``i`` of
``U`` restricted to the four photon-carrying input modes is the coupling
vector ``alpha_i`` of output mode ``i``.

Elements listed in a circuit act in list order: the first element touches
the incoming photons first. In the ``a = U c`` convention above this makes
``U = E_1 @ E_2 @ ... @ E_k``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .states import BilinearForm, DimensionError

__all__ = [
    "Beamsplitter",
    "CircuitElement",
    "LinearNetwork",
    "NotUnitaryError",
    "PRESETS",
    "PhaseShifter",
    "RawUnitary",
    "Swap",
    "apply",
    "compose",
    "embed",
    "identity_network",
    "preset",
    "random_haar",
    "truncate_alpha",
    "unitarity_residual",
]

UNITARITY_ATOL = 1e-10


class NotUnitaryError(ValueError):
    """Matrix fails the ``U^dag U == I`` check."""


def unitarity_residual(u: np.ndarray) -> float:
    """Max-entry deviation of ``U^dag U`` from the identity."""
    u = np.asarray(u)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def _check_mode(i: int, n: int) -> None:
    if isinstance(i, bool) or int(i) != i or not 1 <= i <= n:
        raise DimensionError(f"mode index {i} outside 1..{n}")


def _check_pair(i: int, j: int, n: int) -> None:
    _check_mode(i, n)
    _check_mode(j, n)
    if i == j:
        raise DimensionError(f"two-mode element needs distinct modes, got ({i}, {j})")


@dataclass(frozen=True)
class Beamsplitter:
    """Lossless two-mode coupler with block
    ``[[e^{i phi} cos(theta), -sin(theta)], [e^{i phi} sin(theta), cos(theta)]]``.
    """

    i: int
    j: int
    theta: float
    phi: float = 0.0

    def max_mode(self) -> int:
        return max(self.i, self.j)

    def matrix(self, n: int) -> np.ndarray:
        _check_pair(self.i, self.j, n)
        u = np.eye(n, dtype=complex)
        c, s, e = np.cos(self.theta), np.sin(self.theta), np.exp(1j * self.phi)
        a, b = self.i - 1, self.j - 1
        u[a, a], u[a, b] = e * c, -s
        u[b, a], u[b, b] = e * s, c
        return u

    def inverse(self) -> list["CircuitElement"]:
        # block = R(theta) @ diag(e^{i phi}, 1)
        return [PhaseShifter(self.i, -self.phi), Beamsplitter(self.i, self.j, -self.theta, 0.0)]


@dataclass(frozen=True)
class PhaseShifter:
    i: int
    phi: float

    def max_mode(self) -> int:
        return self.i

    def matrix(self, n: int) -> np.ndarray:
        _check_mode(self.i, n)
        u = np.eye(n, dtype=complex)
        u[self.i - 1, self.i - 1] = np.exp(1j * self.phi)
        return u

    def inverse(self) -> list["CircuitElement"]:
        return [PhaseShifter(self.i, -self.phi)]


@dataclass(frozen=True)
class Swap:
    """Exchange of two modes; a half-wave plate at 45 degrees on one photon."""

    i: int
    j: int

    def max_mode(self) -> int:
        return max(self.i, self.j)

    def matrix(self, n: int) -> np.ndarray:
        _check_pair(self.i, self.j, n)
        u = np.eye(n, dtype=complex)
        a, b = self.i - 1, self.j - 1
        u[[a, b]] = u[[b, a]]
        return u

    def inverse(self) -> list["CircuitElement"]:
        return [Swap(self.i, self.j)]


@dataclass(frozen=True, eq=False)
class RawUnitary:
    """Arbitrary unitary on the first ``k`` modes (identity on the rest)."""

    u: np.ndarray

    def __post_init__(self) -> None:
        u = np.array(self.u, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] < 1:
            raise DimensionError(f"unitary must be square, got shape {u.shape}")
        if not np.all(np.isfinite(u)):
            raise NotUnitaryError("unitary has non-finite entries")
        res = unitarity_residual(u)
        if res > UNITARITY_ATOL:
            raise NotUnitaryError(f"matrix is not unitary: max |U^dag U - I| = {res:.3e}")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)

    def max_mode(self) -> int:
        return self.u.shape[0]

    def matrix(self, n: int) -> np.ndarray:
        k = self.u.shape[0]
        if k > n:
            raise DimensionError(f"{k}-mode unitary does not fit in {n} modes")
        u = np.eye(n, dtype=complex)
        u[:k, :k] = self.u
        return u

    def inverse(self) -> list["CircuitElement"]:
        return [RawUnitary(self.u.conj().T)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RawUnitary):
            return NotImplemented
        return np.array_equal(self.u, other.u)

    def __hash__(self) -> int:
        return hash(self.u.tobytes())


CircuitElement = Union[Beamsplitter, PhaseShifter, Swap, RawUnitary]


@dataclass(frozen=True, eq=False)
class LinearNetwork:
    """Unitary mode transform plus the element list that built it (if any)."""

    u: np.ndarray
    provenance: tuple = field(default=())

    def __post_init__(self) -> None:
        u = np.array(self.u, dtype=complex)
        if u.ndim != 2 or u.shape[0] != u.shape[1] or u.shape[0] < 1:
            raise DimensionError(f"network matrix must be square, got shape {u.shape}")
        res = unitarity_residual(u)
        if not np.isfinite(res) or res > UNITARITY_ATOL:
            raise NotUnitaryError(f"network is not unitary: max |U^dag U - I| = {res:.3e}")
        u.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "provenance", tuple(self.provenance))

    @property
    def n(self) -> int:
        return self.u.shape[0]

    def then(self, *elements: CircuitElement) -> "LinearNetwork":
        """Append elements after the existing ones (acting on the outputs)."""
        head = self.provenance if self.provenance else (RawUnitary(self.u),)
        return compose(self.n, head + tuple(elements))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearNetwork):
            return NotImplemented
        return np.array_equal(self.u, other.u)

    def __hash__(self) -> int:
        return hash(self.u.tobytes())


def identity_network(n: int) -> LinearNetwork:
    if n < 1:
        raise DimensionError(f"mode count must be positive, got {n}")
    return LinearNetwork(np.eye(n, dtype=complex))


def compose(n: int, elements: Sequence[CircuitElement]) -> LinearNetwork:
    """Multiply element matrices in list order: ``U = E_1 @ ... @ E_k``."""
    if n < 1:
        raise DimensionError(f"mode count must be positive, got {n}")
    u = np.eye(n, dtype=complex)
    for el in elements:
        u = u @ el.matrix(n)
    return LinearNetwork(u, tuple(elements))


def embed(net: LinearNetwork, n_total: int) -> LinearNetwork:
    """Extend ``net`` by vacuum ancilla modes that it leaves untouched."""
    if n_total < net.n:
        raise DimensionError(f"cannot embed {net.n} modes into {n_total}")
    u = np.eye(n_total, dtype=complex)
    u[: net.n, : net.n] = net.u
    return LinearNetwork(u, net.provenance)


def apply(net: LinearNetwork, form: BilinearForm) -> BilinearForm:
    """Output-mode form ``M = U^T N U``."""
    if net.n != form.n:
        raise DimensionError(f"network has {net.n} modes, state has {form.n}")
    u = net.u
    return BilinearForm(u.T @ form.entries @ u)


def truncate_alpha(net: LinearNetwork, i: int) -> np.ndarray:
    """Coupling of output mode ``i`` to input modes 1..4: ``(U_1i, ..., U_4i)``."""
    if net.n < 4:
        raise DimensionError(f"need at least 4 modes, network has {net.n}")
    _check_mode(i, net.n)
    return net.u[:4, i - 1].copy()


def random_haar(n: int, seed: int) -> LinearNetwork:
    """Haar-distributed unitary from a seeded complex Ginibre matrix."""
    if n < 1:
        raise DimensionError(f"mode count must be positive, got {n}")
    rng = np.random.default_rng(seed)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return LinearNetwork(q * (d / np.abs(d)))


PRESETS: dict[str, tuple[CircuitElement, ...]] = {
    # 50/50 beamsplitter on both polarizations; the polarizing beamsplitters
    # only route each output mode to its own detector
    "bs-pbs": (
        Beamsplitter(1, 3, np.pi / 4, 0.0),
        Beamsplitter(2, 4, np.pi / 4, 0.0),
    ),
    # half-wave plate on photon B ahead of the same analyzer
    "bs-pbs-hwp": (
        Swap(3, 4),
        Beamsplitter(1, 3, np.pi / 4, 0.0),
        Beamsplitter(2, 4, np.pi / 4, 0.0),
    ),
}


def preset(name: str) -> LinearNetwork:
    try:
        elements = PRESETS[name]
    except KeyError:
        raise ValueError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return compose(4, elements)
