"""JSON circuit and report files.

Circuit schema (1-based modes)::

    {"modes": 4,
     "elements": [
        {"type": "beamsplitter", "modes": [1, 3], "theta": 0.785..., "phi": 0.0},
        {"type": "phase", "mode": 2, "phi": 3.14...},
        {"type": "swap", "modes": [3, 4]},
        {"type": "unitary", "matrix": [[[re, im], ...], ...]}]}

Complex numbers are ``[re, im]`` pairs. Report probabilities are rounded
to 12 significant digits so reports diff cleanly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from . import __version__
from .discrimination import DiscriminationReport
from .network import Beamsplitter, CircuitElement, LinearNetwork, PhaseShifter, RawUnitary, Swap, compose

__all__ = [
    "CircuitFile",
    "CircuitParseError",
    "dumps_circuit",
    "element_to_record",
    "loads_circuit",
    "read_circuit",
    "report_to_dict",
    "sig12",
    "to_json",
    "write_circuit",
]


class CircuitParseError(ValueError):
    """Malformed circuit file; the message names the offending field."""


def sig12(x: float) -> float:
    """Round to 12 significant digits."""
    return float(f"{x:.12g}")


@dataclass(frozen=True)
class CircuitFile:
    modes: int
    elements: tuple

    def network(self) -> LinearNetwork:
        return compose(self.modes, self.elements)

    @classmethod
    def from_network(cls, net: LinearNetwork) -> "CircuitFile":
        if net.provenance:
            return cls(net.n, net.provenance)
        return cls(net.n, (RawUnitary(net.u),))


def _number(rec: dict, key: str, where: str) -> float:
    if key not in rec:
        raise CircuitParseError(f"{where}: missing field {key!r}")
    v = rec[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise CircuitParseError(f"{where}.{key}: expected a finite number, got {v!r}")
    return float(v)


def _mode(v: Any, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise CircuitParseError(f"{where}: mode index must be an integer, got {v!r}")
    return v


def _mode_pair(rec: dict, where: str) -> tuple[int, int]:
    v = rec.get("modes")
    if not isinstance(v, list) or len(v) != 2:
        raise CircuitParseError(f"{where}.modes: expected [i, j], got {v!r}")
    return _mode(v[0], f"{where}.modes[0]"), _mode(v[1], f"{where}.modes[1]")


def _complex_matrix(v: Any, where: str) -> np.ndarray:
    if not isinstance(v, list) or not v or not all(isinstance(r, list) for r in v):
        raise CircuitParseError(f"{where}: expected a list of rows")
    k = len(v)
    out = np.zeros((k, k), dtype=complex)
    for r, row in enumerate(v):
        if len(row) != k:
            raise CircuitParseError(f"{where}[{r}]: expected {k} entries, got {len(row)}")
        for c, z in enumerate(row):
            ok = (
                isinstance(z, list)
                and len(z) == 2
                and all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in z)
            )
            if not ok:
                raise CircuitParseError(f"{where}[{r}][{c}]: expected [re, im], got {z!r}")
            out[r, c] = complex(z[0], z[1])
    return out


def _parse_element(rec: Any, where: str) -> CircuitElement:
    if not isinstance(rec, dict):
        raise CircuitParseError(f"{where}: expected an object, got {type(rec).__name__}")
    kind = rec.get("type")
    if kind == "beamsplitter":
        i, j = _mode_pair(rec, where)
        return Beamsplitter(i, j, _number(rec, "theta", where), _number(rec, "phi", where))
    if kind == "phase":
        return PhaseShifter(_mode(rec.get("mode"), f"{where}.mode"), _number(rec, "phi", where))
    if kind == "swap":
        return Swap(*_mode_pair(rec, where))
    if kind == "unitary":
        # unitarity is a validation concern, checked by RawUnitary itself
        return RawUnitary(_complex_matrix(rec.get("matrix"), f"{where}.matrix"))
    raise CircuitParseError(f"{where}.type: unknown element type {kind!r}")


def loads_circuit(text: str) -> CircuitFile:
    """Parse circuit JSON. Raises :class:`CircuitParseError` on schema errors;
    mode-range and unitarity problems surface from :meth:`CircuitFile.network`.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise CircuitParseError(f"line {e.lineno}, column {e.colno}: {e.msg}") from None
    if not isinstance(doc, dict):
        raise CircuitParseError("top level must be an object")
    modes = doc.get("modes")
    if isinstance(modes, bool) or not isinstance(modes, int) or modes < 1:
        raise CircuitParseError(f"modes: expected a positive integer, got {modes!r}")
    elements = doc.get("elements")
    if not isinstance(elements, list):
        raise CircuitParseError(f"elements: expected a list, got {elements!r}")
    parsed = tuple(_parse_element(rec, f"elements[{k}]") for k, rec in enumerate(elements))
    return CircuitFile(modes, parsed)


def read_circuit(path) -> CircuitFile:
    with open(path, encoding="utf-8") as fh:
        return loads_circuit(fh.read())


def element_to_record(el: CircuitElement) -> dict:
    if isinstance(el, Beamsplitter):
        return {"type": "beamsplitter", "modes": [el.i, el.j], "theta": el.theta, "phi": el.phi}
    if isinstance(el, PhaseShifter):
        return {"type": "phase", "mode": el.i, "phi": el.phi}
    if isinstance(el, Swap):
        return {"type": "swap", "modes": [el.i, el.j]}
    if isinstance(el, RawUnitary):
        return {"type": "unitary", "matrix": [[[z.real, z.imag] for z in row] for row in el.u]}
    raise TypeError(f"not a circuit element: {el!r}")


def circuit_to_dict(circuit: CircuitFile) -> dict:
    return {"modes": circuit.modes, "elements": [element_to_record(e) for e in circuit.elements]}


def to_json(doc: Any) -> str:
    return json.dumps(doc, indent=2) + "\n"


def dumps_circuit(circuit: CircuitFile) -> str:
    return to_json(circuit_to_dict(circuit))


def write_circuit(circuit: CircuitFile, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_circuit(circuit))


def report_to_dict(report: DiscriminationReport) -> dict:
    return {
        "priors": list(report.priors.p),
        "tolerance": report.tolerance,
        "outcomes": [
            {
                "outcome": [r.outcome.i, r.outcome.j],
                "probabilities": [sig12(p) for p in r.probabilities],
                "class": r.klass.kind,
                "support": sorted(r.klass.support),
            }
            for r in report.rows
        ],
        "success_probability": sig12(report.success_probability),
        "success_bound": sig12(report.success_bound),
        "state_success": [sig12(p) for p in report.state_success],
        "identified_states": sorted(report.identified_states),
        "per_mode": [
            {"mode": k + 1, "success": sig12(s), "bound": sig12(b)}
            for k, (s, b) in enumerate(zip(report.per_mode_success, report.per_mode_bound))
        ],
        "per_mode_bound_extrapolated": report.per_mode_bound_extrapolated,
        "smallest_nonzero_probability": sig12(report.smallest_nonzero),
        "largest_zeroed_probability": sig12(report.largest_zeroed),
    }


def metadata(command: str, seed: Optional[int] = None, tolerance: Optional[float] = None) -> dict:
    return {"tool": "bellanalyzer", "version": __version__, "command": command, "seed": seed, "tolerance": tolerance}
