"""Command-line front end.

Exit status: 0 success, 1 usage or parse error, 2 validation error,
3 theorem-check failure. Reports are JSON on stdout (or ``--out``) and are
byte-identical across repeated runs of the same command.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .detection import ZERO_TOL
from .discrimination import classify
from .fileformat import (
    CircuitFile,
    CircuitParseError,
    circuit_to_dict,
    dumps_circuit,
    metadata,
    read_circuit,
    report_to_dict,
    sig12,
    to_json,
    write_circuit,
)
from .network import PRESETS, NotUnitaryError, preset, random_haar
from .optimizer import optimize, tap_photon_a
from .states import DimensionError, Priors
from .theorems import CHECKS, CheckTally, check_network

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_THEOREM = 0, 1, 2, 3

log = logging.getLogger("bellanalyzer")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _priors(text: str) -> Priors:
    try:
        values = [float(x) for x in text.split(",")]
        return Priors.from_weights(values)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _mode_range(text: str) -> list[int]:
    """``"6"`` or an inclusive range ``"4..8"``."""
    try:
        if ".." in text:
            lo, hi = (int(x) for x in text.split("..", 1))
        else:
            lo = hi = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or A..B, got {text!r}") from None
    if lo < 4 or hi < lo:
        raise argparse.ArgumentTypeError(f"need 4 <= A <= B, got {text!r}")
    return list(range(lo, hi + 1))


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _checks_to_dict(residuals: dict) -> list[dict]:
    return [
        {
            "check": name,
            "passed": residuals[name] <= CHECKS[name][0],
            "residual": float(f"{residuals[name]:.6g}"),
            "tolerance": CHECKS[name][0],
        }
        for name in CHECKS
    ]


def _analysis(net, circuit: CircuitFile, priors: Priors, tolerance: float, command: str) -> tuple[dict, bool]:
    if net.n < 4:
        raise DimensionError(f"need >= 4 modes, circuit has {net.n}")
    report = classify(net, priors, tolerance)
    residuals = check_network(net, priors, tolerance, report)
    doc = {
        "metadata": metadata(command, tolerance=tolerance),
        "circuit": circuit_to_dict(circuit),
        **report_to_dict(report),
        "theorem_checks": _checks_to_dict(residuals),
    }
    return doc, all(r <= CHECKS[k][0] for k, r in residuals.items())


def cmd_analyze(args) -> int:
    circuit = read_circuit(args.circuit)
    net = circuit.network()
    doc, ok = _analysis(net, circuit, args.priors, args.tolerance, "analyze")
    _emit(to_json(doc), args.out)
    return EXIT_OK if ok else EXIT_THEOREM


def cmd_preset(args) -> int:
    net = preset(args.name)
    _emit(dumps_circuit(CircuitFile.from_network(net)), args.out)
    return EXIT_OK


def cmd_optimize(args) -> int:
    result = optimize(
        args.modes,
        args.restarts,
        args.seed,
        priors=args.priors,
        min_identified=args.min_identified,
        workers=args.workers,
    )
    circuit = CircuitFile.from_network(result.best_network)
    bound = args.priors.top_two_sum()
    within = result.exact_success <= bound + 1e-9
    doc = {
        "metadata": metadata("optimize", seed=args.seed, tolerance=ZERO_TOL),
        "modes": args.modes,
        "restarts_run": result.restarts_run,
        "priors": list(args.priors.p),
        "min_identified": args.min_identified,
        "exact_success": sig12(result.exact_success),
        "success_bound": sig12(bound),
        "within_bound": within,
        "smoothed_score": sig12(result.smoothed_score),
        "identified_states": sorted(result.identified_states),
        "state_success": [sig12(p) for p in result.state_success],
        "feasible": result.feasible,
        "restart_success": [sig12(p) for p in result.restart_success],
        "trace": [[r, e, sig12(s)] for r, e, s in result.trace],
        "best_circuit": circuit_to_dict(circuit),
    }
    if args.min_identified >= 3:
        if result.partial_witness:
            msg = "found: three or more Bell states identified, each with probability below 1"
        elif result.feasible:
            msg = ("not found: networks identifying three states were found, but one of "
                   "them is identified with certainty")
        else:
            msg = f"not found: no network identified {args.min_identified} Bell states"
        witness = {"found": result.partial_witness, "message": msg}
        if result.feasible and not result.partial_witness:
            # leak photon A into two ancillas so no state stays certain
            tapped = tap_photon_a(result.best_network)
            rep = classify(tapped, args.priors)
            witness["tapped_construction"] = {
                "modes": tapped.n,
                "success_probability": sig12(rep.success_probability),
                "state_success": [sig12(p) for p in rep.state_success],
                "largest_zeroed_probability": sig12(rep.largest_zeroed),
                "circuit": circuit_to_dict(CircuitFile.from_network(tapped)),
            }
        doc["three_state_witness"] = witness
        log.warning("three-state witness %s", msg)
    if args.circuit_out:
        write_circuit(circuit, args.circuit_out)
    elif args.out:
        write_circuit(circuit, Path(args.out).with_suffix(".circuit.json"))
    _emit(to_json(doc), args.out)
    return EXIT_OK if within else EXIT_THEOREM


def cmd_verify(args) -> int:
    tally = CheckTally()
    per_modes = {}
    for n in args.modes:
        sub = CheckTally()
        for t in range(args.trials):
            seed = args.seed + t
            net = random_haar(n, seed)
            report = classify(net)
            residuals = check_network(net, report=report)
            sub.add(residuals, report.success_probability, label=[n, seed])
            tally.add(residuals, report.success_probability, label=[n, seed])
        per_modes[n] = sub
    doc = {
        "metadata": metadata("verify", seed=args.seed, tolerance=ZERO_TOL),
        "trials": args.trials,
        "modes": args.modes,
        "networks": tally.networks,
        "max_success": sig12(tally.max_success),
        "argmax": {"modes": tally.argmax[0], "seed": tally.argmax[1]},
        "success_bound": 0.5,
        "checks": [
            {
                "check": name,
                "description": CHECKS[name][1],
                "passed": tally.passed[name],
                "failed": tally.failed[name],
                "worst_residual": float(f"{tally.worst[name]:.6g}"),
                "tolerance": CHECKS[name][0],
            }
            for name in CHECKS
        ],
        "per_modes": [
            {"modes": n, "max_success": sig12(s.max_success), "all_passed": s.ok}
            for n, s in per_modes.items()
        ],
        "all_passed": tally.ok,
    }
    _emit(to_json(doc), args.out)
    return EXIT_OK if tally.ok else EXIT_THEOREM


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bellanalyzer", description="Linear-optical Bell-state analyzer toolkit")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="classify the outcomes of a circuit file")
    a.add_argument("circuit")
    a.add_argument("--priors", type=_priors, default=Priors())
    a.add_argument("--tolerance", type=_positive_float, default=ZERO_TOL)
    a.add_argument("--out")
    a.set_defaults(func=cmd_analyze)

    pr = sub.add_parser("preset", help="write a reference analyzer as a circuit file")
    pr.add_argument("name", choices=sorted(PRESETS))
    pr.add_argument("--out")
    pr.set_defaults(func=cmd_preset)

    o = sub.add_parser("optimize", help="search mesh networks for the best analyzer")
    o.add_argument("--modes", type=int, default=4)
    o.add_argument("--restarts", type=int, required=True)
    o.add_argument("--seed", type=int, required=True)
    o.add_argument("--priors", type=_priors, default=Priors())
    o.add_argument("--min-identified", type=int, default=0, choices=range(5))
    o.add_argument("--workers", type=int, default=1)
    o.add_argument("--out")
    o.add_argument("--circuit-out")
    o.set_defaults(func=cmd_optimize)

    v = sub.add_parser("verify", help="run the theorem checks on Haar-random networks")
    v.add_argument("--trials", type=int, required=True)
    v.add_argument("--modes", type=_mode_range, required=True)
    v.add_argument("--seed", type=int, required=True)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "restarts", 1) < 1:
            raise UsageError("--restarts must be >= 1")
        if getattr(args, "trials", 1) < 1:
            raise UsageError("--trials must be >= 1")
        if args.command == "optimize" and args.modes < 4:
            raise UsageError("--modes must be >= 4")
        if getattr(args, "workers", 1) < 1:
            raise UsageError("--workers must be >= 1")
    except UsageError as e:
        print(f"bellanalyzer: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (CircuitParseError, OSError) as e:
        print(f"bellanalyzer: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (DimensionError, NotUnitaryError, ValueError) as e:
        print(f"bellanalyzer: invalid circuit: {e}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
