"""Command-line front end.

Exit codes: 0 all checks pass, 1 a verdict failed, 2 invalid input.
Reports go to stdout (or ``-o``) as JSON; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import nmr
from .errors import QsdError
from .orthoset import load_ortho_set, states_from_json
from .reports import (
    discriminate_report,
    eigenarrays_for,
    nmr_verify_report,
    state_set_preset,
    tomography_report,
)
from .synth import build_discriminator, load_spec, spec_to_json

log = logging.getLogger("qsdisc")

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(QsdError):
    pass


def _emit(doc, out: str | None) -> None:
    text = json.dumps(doc, indent=1)
    if out:
        Path(out).write_text(text + "\n")
        log.info("wrote %s", out)
    else:
        print(text)


def cmd_synth(args) -> int:
    if args.states:
        ortho = load_ortho_set(args.states)
    else:
        ortho = state_set_preset(args.preset, args.alpha, args.beta)
    spec = build_discriminator(ortho, eigenarrays_for(args.arrays, ortho.n_qubits))
    _emit(spec_to_json(spec), args.output)
    return EXIT_OK


def _load_inputs(path: str) -> list[np.ndarray]:
    with open(path) as fh:
        return states_from_json(json.load(fh))


def cmd_discriminate(args) -> int:
    spec = load_spec(args.spec)
    inputs = None if args.inputs == "all" else _load_inputs(args.inputs)
    report = discriminate_report(spec, inputs, args.expect)
    _emit(report.to_json(), args.output)
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    for r in report.rows:
        if r.verdict != "pass":
            log.warning("input %d: %s", r.input_index, r.error or f"bits {r.bits}, expected {r.expected}")
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_nmr_verify(args) -> int:
    report = nmr_verify_report(args.preset)
    _emit(report.to_json(), args.output)
    for c in report.checks:
        if not c.passed:
            log.warning("check failed: %s (%.3g > %.3g)", c.name, c.value, c.tol)
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_tomo(args) -> int:
    spec = load_spec(args.spec)
    if args.state:
        states = _load_inputs(args.state)
        if len(states) != 1:
            raise InputError("state file must hold exactly one state")
        index = spec.ortho.index_of(states[0])
        if index is None:
            raise InputError("input state is not a member of the set")
    else:
        index = args.member - 1
        if not 0 <= index < len(spec.ortho):
            raise InputError(f"member index must be in 1..{len(spec.ortho)}")
    dumps = tomography_report(spec, index, split=args.split)
    doc = dumps[0] if len(dumps) == 1 and not args.split else {"schema": 1, "kind": "tomography-set", "dumps": dumps}
    doc["member"] = index + 1
    _emit(doc, args.output)
    return EXIT_OK


BUILTIN_SEQUENCES = {
    "cu1": lambda: nmr.controlled_u_sequence("H1"),
    "cu2": lambda: nmr.controlled_u_sequence("H2"),
    "ghz-cu1": lambda: nmr.ghz_controlled_sequence(1),
    "ghz-cu2": lambda: nmr.ghz_controlled_sequence(2),
    "ghz-cu3": lambda: nmr.ghz_controlled_sequence(3),
}


def cmd_pulses(args) -> int:
    """Print a built-in sequence, or compile a sequence file against a spin system."""
    if args.sequence in BUILTIN_SEQUENCES:
        seq = BUILTIN_SEQUENCES[args.sequence]()
        if not args.system:
            sys.stdout.write(nmr.format_pulses(seq))
            return EXIT_OK
    else:
        seq = nmr.parse_pulses(Path(args.sequence).read_text())
    system = nmr.load_spin_system(args.system or ("crotonic-4spin" if args.sequence.startswith("ghz") else "chfbr2-3spin"))
    u = nmr.compile_pulses(seq, system)
    _emit(
        {
            "schema": 1,
            "kind": "propagator",
            "system": system.name,
            "elements": len(seq),
            "total_delay_s": nmr.total_delay(seq, system),
            "real": np.real(u).tolist(),
            "imag": np.imag(u).tolist(),
        },
        args.output,
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qsdisc", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", help="synthesize a discriminator spec")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", help="family-s, single, bell, ghz2..ghz5")
    src.add_argument("--states", help="JSON file: array of states, each an array of [re, im] pairs")
    s.add_argument("--alpha", type=float)
    s.add_argument("--beta", type=float)
    s.add_argument("--arrays", default="canonical", help="canonical, bell, ghz3 or a JSON file")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_synth)

    d = sub.add_parser("discriminate", help="run discrimination over inputs")
    d.add_argument("spec")
    d.add_argument("--inputs", default="all", help="'all' (every member) or a JSON state file")
    d.add_argument("--expect", choices=["tableI", "tableII"])
    d.add_argument("--csv")
    d.add_argument("-o", "--output")
    d.set_defaults(func=cmd_discriminate)

    n = sub.add_parser("nmr-verify", help="verify the NMR realization for a spin-system preset")
    n.add_argument("preset")
    n.add_argument("-o", "--output")
    n.set_defaults(func=cmd_nmr_verify)

    t = sub.add_parser("tomo", help="dump initial and final density matrices")
    t.add_argument("spec")
    which = t.add_mutually_exclusive_group(required=True)
    which.add_argument("--member", type=int, help="1-based member index")
    which.add_argument("--state", help="JSON file holding one member state")
    t.add_argument("--split", action="store_true", help="one dump per single-ancilla circuit")
    t.add_argument("-o", "--output")
    t.set_defaults(func=cmd_tomo)

    u = sub.add_parser("pulses", help="print or compile pulse sequences")
    u.add_argument("sequence", help=f"one of {', '.join(BUILTIN_SEQUENCES)} or a sequence file")
    u.add_argument("--system", help="spin-system preset or JSON file to compile against")
    u.add_argument("-o", "--output")
    u.set_defaults(func=cmd_pulses)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except QsdError as exc:
        payload = {"schema": 1, **exc.to_dict()}
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        payload = {"schema": 1, "error": type(exc).__name__, "message": str(exc), "detail": {}}
    print(json.dumps(payload))
    log.error("%s: %s", payload["error"], payload["message"])
    return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
