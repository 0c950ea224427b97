"""Command-line front end.

Subcommands read JSON (a file given by ``--input`` or stdin) and write JSON
or CSV (``--output`` or stdout).  Exit status: 0 on success, 1 when the input
is well formed but violates an invariant, 2 on I/O or parse errors.

Configuration JSON::

    {"K": 1, "x": [-0.549, 0.549], "m_odd": [0.433], "n_even": [0.433]}

In ``--mode rational`` the positions are given through ``"q"`` (q_k = e^{x_k})
and every number may be a ``"p/q"`` string.  Spectral JSON uses the keys
lambda, mu, a, b, b_inf, b_inf_star.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .core_types import (
    ExactConfiguration,
    GXError,
    InterlacingConfiguration,
    IntervalMeasures,
    SpectralData,
    ValidationError,
    to_interval,
)
from .dynamics import conserved_coefficients, trajectories, trajectory_csv
from .forward_spectral import forward_map
from .inverse_spectral import inverse_map, recover_interval, recover_interval_K1
from .transition import evaluate_wavefunction
from .verification import configuration_error, run_suites

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


class InputError(Exception):
    """Unreadable or malformed input."""


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def _encode(value: Any, rational: bool) -> Any:
    if isinstance(value, Fraction):
        if rational:
            return f"{value.numerator}/{value.denominator}" if value.denominator != 1 else str(value.numerator)
        value = float(value)
    if isinstance(value, (float, np.floating)):
        # Shortest repr is the lossless binary64 round trip.
        return float(value)
    if isinstance(value, (list, tuple)):
        return [_encode(v, rational) for v in value]
    if isinstance(value, dict):
        return {k: _encode(v, rational) for k, v in value.items()}
    return value


def dumps(obj: Dict[str, Any], rational: bool = False) -> str:
    return json.dumps(_encode(obj, rational), separators=(",", ":"))


def _number(value: Any, rational: bool, field: str):
    if isinstance(value, bool):
        raise InputError(f"field {field!r}: expected a number, got {value!r}")
    if rational:
        try:
            return Fraction(value) if not isinstance(value, float) else Fraction(repr(value))
        except (ValueError, ZeroDivisionError, TypeError) as exc:
            raise InputError(f"field {field!r}: cannot read {value!r} as a rational ({exc})") from None
    if isinstance(value, str):
        try:
            return float(Fraction(value))
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"field {field!r}: cannot read {value!r} as a number ({exc})") from None
    if not isinstance(value, (int, float)):
        raise InputError(f"field {field!r}: expected a number, got {value!r}")
    return float(value)


def _numbers(doc: Dict[str, Any], key: str, rational: bool) -> List:
    if key not in doc:
        raise InputError(f"missing field {key!r}")
    values = doc[key]
    if not isinstance(values, list):
        raise InputError(f"field {key!r}: expected a list")
    return [_number(v, rational, f"{key}[{i}]") for i, v in enumerate(values)]


def read_json(path: Optional[str]) -> Dict[str, Any]:
    try:
        text = sys.stdin.read() if path in (None, "-") else open(path, encoding="utf-8").read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise InputError("top-level JSON value must be an object")
    return doc


def parse_configuration(doc: Dict[str, Any], rational: bool):
    m = _numbers(doc, "m_odd", rational)
    n = _numbers(doc, "n_even", rational)
    K = doc.get("K", len(m))
    if not isinstance(K, int) or isinstance(K, bool):
        raise InputError(f"field 'K': expected an integer, got {K!r}")
    if rational:
        if "q" in doc:
            return ExactConfiguration(K, tuple(_numbers(doc, "q", True)), tuple(m), tuple(n))
        raise InputError("rational mode needs positions as 'q' (q_k = exp(x_k))")
    return InterlacingConfiguration(K, tuple(_numbers(doc, "x", False)), tuple(m), tuple(n))


def parse_spectral(doc: Dict[str, Any], rational: bool) -> SpectralData:
    for key in ("b_inf", "b_inf_star"):
        if key not in doc:
            raise InputError(f"missing field {key!r}")
    return SpectralData(
        tuple(_numbers(doc, "lambda", rational)),
        tuple(_numbers(doc, "mu", rational)),
        tuple(_numbers(doc, "a", rational)),
        tuple(_numbers(doc, "b", rational)),
        _number(doc["b_inf"], rational, "b_inf"),
        _number(doc["b_inf_star"], rational, "b_inf_star"),
    )


def spectral_to_dict(r: SpectralData) -> Dict[str, Any]:
    return {
        "lambda": list(r.lam),
        "mu": list(r.mu),
        "a": list(r.a),
        "b": list(r.b),
        "b_inf": r.b_inf,
        "b_inf_star": r.b_inf_star,
    }


def configuration_to_dict(p) -> Dict[str, Any]:
    if isinstance(p, ExactConfiguration):
        return {"K": p.K, "q": list(p.q), "m_odd": list(p.m_odd), "n_even": list(p.n_even)}
    return {"K": p.K, "x": list(p.x), "m_odd": list(p.m_odd), "n_even": list(p.n_even)}


def interval_to_dict(meas: IntervalMeasures) -> Dict[str, Any]:
    return {"K": meas.K, "y": list(meas.y), "l": list(meas.l), "g": list(meas.g), "h": list(meas.h)}


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_forward(args) -> str:
    rational = args.mode == "rational"
    r = forward_map(parse_configuration(read_json(args.input), rational))
    return dumps(spectral_to_dict(r), rational)


def cmd_inverse(args) -> str:
    rational = args.mode == "rational"
    r = parse_spectral(read_json(args.input), rational)
    p = inverse_map(r)
    if not rational:
        return dumps(configuration_to_dict(p))
    meas = recover_interval(r) if r.K > 1 else recover_interval_K1(r)
    return dumps({"configuration": configuration_to_dict(p), "interval": interval_to_dict(meas)}, True)


def cmd_roundtrip(args) -> str:
    p = parse_configuration(read_json(args.input), args.mode == "rational")
    if isinstance(p, ExactConfiguration):
        p = p.to_float()
    q = inverse_map(forward_map(p))
    err = configuration_error(p, q)
    report = {"max_error": err, "tolerance": args.tol, "ok": err <= args.tol}
    if err > args.tol:
        raise ValidationError("roundtrip error exceeds tolerance", [f"max error {err:.3e} > {args.tol:.1e}"])
    return dumps(report)


def cmd_evolve(args) -> str:
    p = parse_configuration(read_json(args.input), False)
    if args.steps < 1:
        raise InputError("--steps must be at least 1")
    if not args.t1 > args.t0:
        raise InputError("time grid must be strictly increasing (--t1 > --t0)")
    times = np.linspace(args.t0, args.t1, args.steps + 1)
    return trajectory_csv(trajectories(p, times)).rstrip("\n")


def cmd_wavefunction(args) -> str:
    if args.lam is None:
        raise InputError("--lambda is required")
    p = parse_configuration(read_json(args.input), args.mode == "rational")
    prof = evaluate_wavefunction(to_interval(p), args.lam, twin=args.twin)
    lines = ["y,phi1,phi2,phi3"]
    lines += [",".join(repr(float(v)) for v in row) for row in prof.rows()]
    return "\n".join(lines)


def cmd_conserved(args) -> str:
    rational = args.mode == "rational"
    c = conserved_coefficients(parse_configuration(read_json(args.input), rational))
    return dumps({"A": list(c.A_coeffs), "A_twin": list(c.A_twin_coeffs)}, rational)


def cmd_verify(args) -> str:
    results = run_suites(args.suite, args.seed)
    lines = [f"{'suite':<14}{'residual':>12}{'tolerance':>12}{'cases':>7}  status"]
    failed = []
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        lines.append(f"{res.name:<14}{res.residual:>12.3e}{res.tolerance:>12.1e}{res.cases:>7}  {status}"
                     + (f"  ({res.detail})" if res.detail else ""))
        if not res.passed:
            failed.append(res.name)
    text = "\n".join(lines)
    if failed:
        raise _VerifyFailure(text, failed)
    return text


class _VerifyFailure(Exception):
    def __init__(self, text: str, failed: List[str]):
        super().__init__(text)
        self.text, self.failed = text, failed


COMMANDS = {
    "forward": (cmd_forward, "configuration JSON -> spectral data JSON"),
    "inverse": (cmd_inverse, "spectral data JSON -> configuration JSON"),
    "roundtrip": (cmd_roundtrip, "report the inverse(forward(p)) error for a configuration"),
    "evolve": (cmd_evolve, "trajectory CSV on a uniform time grid"),
    "verify": (cmd_verify, "run randomized property suites"),
    "wavefunction": (cmd_wavefunction, "CSV of Phi at the breakpoints for a given lambda"),
    "conserved": (cmd_conserved, "constants of motion [A]_k and [A~]_k"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gxpeakon", description="Spectral maps for interlacing peakons.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--input", help="input JSON file (default: stdin)")
        p.add_argument("--output", help="output file (default: stdout)")
        p.add_argument("--mode", choices=("float", "rational"), default="float")
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--t0", type=float, default=0.0)
        p.add_argument("--t1", type=float, default=1.0)
        p.add_argument("--steps", type=int, default=10)
        p.add_argument("--lambda", dest="lam", type=float)
        p.add_argument("--twin", action="store_true", help="wavefunction of the twin problem")
        p.add_argument("--suite", default="all")
        p.add_argument("--seed", type=int, default=0)
    return parser


def _write(text: str, path: Optional[str]) -> None:
    if path in (None, "-"):
        sys.stdout.write(text + "\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_IO if exc.code else EXIT_OK
    handler = COMMANDS[args.command][0]
    try:
        text = handler(args)
        _write(text, args.output)
        return EXIT_OK
    except _VerifyFailure as exc:
        _write(exc.text, args.output)
        print(f"failed suites: {', '.join(exc.failed)}", file=sys.stderr)
        return EXIT_INVALID
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KeyError as exc:
        print(f"input error: {exc.args[0]}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"invalid input: {exc.args[0]}", file=sys.stderr)
        for v in exc.violations:
            print(f"  - {v}", file=sys.stderr)
        return EXIT_INVALID
    except (GXError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
