"""Command-line front end: JSON problem files in, JSON/CSV results out.

Problem file schema (version "1"):

    {"schema_version": "1", "mode": "potential" | "spectral",
     "m": <int>, "N": <int>,
     "entries": [{"gamma" | "j": <int>, "n": <int>, "re": <float>, "im": <float>}, ...]}

Complex numbers always serialize as {re, im} doubles.  Exit codes: 0 success,
1 malformed input, 2 degenerate arithmetic, 3 non-convergence, 4 verification
failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import analytic, fredholm, inverse
from .core import Order, PotentialCoefficients, SpectralData, a_m_constant
from .errors import (ConvergenceError, DegenerateDenominatorError, DivisionRemainderError,
                     InputError, InvspecError, PoleProximityError, ResonantIndexError,
                     SingularMatrixError, SingularSystemError, VerificationError)
from .forward import forward_map, q_from_p

SCHEMA_VERSION = "1"


def _complex_json(z: complex) -> dict:
    return {"re": float(z.real), "im": float(z.imag)}


def load_problem(path: str):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read problem file {path}: {exc}") from exc
    try:
        if str(doc["schema_version"]) != SCHEMA_VERSION:
            raise InputError(f"unsupported schema_version {doc['schema_version']!r}")
        mode = doc["mode"]
        order = Order(int(doc["m"]))
        n_max = int(doc["N"])
        entries = doc["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed problem file {path}: {exc}") from exc
    if n_max < 1:
        raise InputError(f"N must be >= 1, got {n_max}")
    if mode == "potential":
        table = np.zeros((order.gamma_count, n_max), dtype=complex)
        index_key, index_hi = "gamma", order.gamma_count - 1
    elif mode == "spectral":
        table = np.zeros((n_max, order.j_count), dtype=complex)
        index_key, index_hi = "j", order.j_count
    else:
        raise InputError(f"unknown mode {mode!r}")
    seen = set()
    for entry in entries:
        try:
            idx = int(entry[index_key])
            n = int(entry["n"])
            value = complex(float(entry["re"]), float(entry["im"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed entry {entry!r}: {exc}") from exc
        lo = 0 if index_key == "gamma" else 1
        if not lo <= idx <= index_hi:
            raise InputError(f"{index_key}={idx} outside {lo}..{index_hi}")
        if not 1 <= n <= n_max:
            raise InputError(f"n={n} outside 1..{n_max}")
        if (idx, n) in seen:
            raise InputError(f"duplicate entry key ({index_key}={idx}, n={n})")
        seen.add((idx, n))
        if mode == "potential":
            table[idx, n - 1] = value
        else:
            table[n - 1, idx - 1] = value
    if mode == "potential":
        return PotentialCoefficients(order, n_max, table)
    return SpectralData(order, n_max, table)


def _problem_doc(obj) -> dict:
    entries = []
    if isinstance(obj, PotentialCoefficients):
        mode, key = "potential", "gamma"
        for gamma in range(obj.order.gamma_count):
            for n in range(1, obj.n_max + 1):
                entries.append({key: gamma, "n": n, **_complex_json(obj.coeffs[gamma, n - 1])})
    elif isinstance(obj, SpectralData):
        mode, key = "spectral", "j"
        for j in range(1, obj.order.j_count + 1):
            for n in range(1, obj.n_max + 1):
                entries.append({key: j, "n": n, **_complex_json(obj.table[n - 1, j - 1])})
    else:
        raise InputError(f"cannot serialize {type(obj).__name__}")
    return {"schema_version": SCHEMA_VERSION, "mode": mode, "m": obj.order.m,
            "N": obj.n_max, "entries": entries}


def _write_json(doc, path: str | None) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_forward(args) -> int:
    problem = load_problem(args.input)
    if not isinstance(problem, PotentialCoefficients):
        raise InputError("forward expects a potential-mode problem file")
    v, s = forward_map(problem)
    _write_json(_problem_doc(s), args.output)
    if args.emit_v:
        entries = [
            {"j": j, "n": n, "alpha": alpha, **_complex_json(v.table[j - 1, n - 1, alpha - 1])}
            for j in range(1, v.order.j_count + 1)
            for alpha in range(1, v.n_max + 1)
            for n in range(1, alpha + 1)
        ]
        _write_json({"schema_version": SCHEMA_VERSION, "mode": "vtable", "m": v.order.m,
                     "N": v.n_max, "entries": entries}, args.emit_v)
    return 0


def cmd_inverse(args) -> int:
    problem = load_problem(args.input)
    if not isinstance(problem, SpectralData):
        raise InputError("inverse expects a spectral-mode problem file")
    p = inverse.inverse_map(problem)
    _write_json(_problem_doc(p), args.output)
    am = a_m_constant(problem.order, cap=args.am_cap)
    moment = inverse.first_moment(problem)
    contraction = inverse.contraction_conditions(problem, am.value)
    if not contraction.contraction:
        print(f"warning: contraction sum {contraction.condition_ii_p:.6g} >= 1; "
              "existence is not guaranteed at this data size", file=sys.stderr)
    if args.report:
        _write_json({
            "a_m": {"value": am.value, "argmax": list(am.argmax),
                    "ordered_value": am.ordered_value, "cap": am.cap},
            "first_moment": {"total": moment.total,
                             "tail_decay_exponent": moment.tail_decay_exponent},
            "contraction": {"condition_i": contraction.condition_i,
                            "condition_ii_p": contraction.condition_ii_p,
                            "contraction": contraction.contraction},
        }, args.report)
    return 0


def cmd_det(args) -> int:
    problem = load_problem(args.input)
    if not isinstance(problem, SpectralData):
        raise InputError("det expects a spectral-mode problem file")
    re_grid = np.linspace(0.0, 2 * np.pi, args.re_steps)
    im_grid = np.linspace(0.0, args.im_max, args.im_steps)
    report = fredholm.scan_halfplane(problem, re_grid, im_grid, tol=args.tol,
                                     n_max=args.n_max, det_tol=args.det_tol)
    rows = []
    for y in im_grid:
        for x in re_grid:
            d = fredholm.det_truncated(problem, complex(x, y), n_max=args.n_max).final
            rows.append((x, y, d.real, d.imag, abs(d)))
    out = sys.stdout if args.output in (None, "-") else open(args.output, "w", newline="")
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["re(z)", "im(z)", "re(D)", "im(D)", "|D|"])
        for row in rows:
            writer.writerow([repr(float(v)) for v in row])
    finally:
        if out is not sys.stdout:
            out.close()
    verdict = {
        "zero_free": report.zero_free,
        "min_modulus": report.min_modulus,
        "argmin": _complex_json(report.argmin),
        "winding": report.winding,
        "convention": report.convention,
        "non_converged": [_complex_json(z) for z in report.flagged],
    }
    if args.report:
        _write_json(verdict, args.report)
    if report.flagged:
        raise ConvergenceError(
            f"determinant not converged at {len(report.flagged)} grid points",
            flagged=list(report.flagged),
        )
    return 0


def _verify_checks(p: PotentialCoefficients, args) -> list[dict]:
    order = p.order
    m = order.m
    v, s = forward_map(p)
    checks = []

    p_back = inverse.inverse_map(s)
    err = float(np.abs(p_back.coeffs - p.coeffs).max())
    checks.append({"name": "round_trip", "value": err, "threshold": args.round_tol,
                   "pass": bool(err <= args.round_tol)})

    grid = np.linspace(0.0, 3.0, 5)
    march = max(abs(analytic.marchenko_residual(v, s, t, u))
                for t in grid for u in grid if u >= t)
    checks.append({"name": "marchenko_residual", "value": float(march),
                   "threshold": args.marchenko_tol, "pass": bool(march <= args.marchenko_tol)})

    worst = 0.0
    for n in range(1, max(2, p.n_max // 2 + 1)):
        for j in range(1, order.j_count + 1):
            for t in (0.0, 0.7, 1.5):
                chk = analytic.jump_relation_check(v, s, t, n, j)
                scale = max(abs(chk.lhs), abs(chk.rhs), 1e-300)
                worst = max(worst, chk.gap / scale)
    checks.append({"name": "jump_relation", "value": float(worst),
                   "threshold": args.jump_tol, "pass": bool(worst <= args.jump_tol)})

    a = complex(args.shift_re, args.shift_im)
    _, s_shifted = forward_map(p.shifted(a))
    trans = float(np.abs(s_shifted.table - analytic.shift_spectral(s, a).table).max())
    checks.append({"name": "translation_law", "value": trans,
                   "threshold": args.translation_tol, "pass": bool(trans <= args.translation_tol)})

    depths = [d for d in (p.n_max - 4, p.n_max - 2, p.n_max) if d >= 1]
    samples = [(0.4, 0.37), (1.1, 0.9 + 0.2j), (0.8, 1.7)]
    worst_ratio = 0.0
    for t, k in samples:
        res = [abs(analytic.ode_residual(p, v, t, k, depth=d)) for d in depths]
        for lo, hi in zip(res[1:], res[:-1]):
            if hi > 1e-300:
                worst_ratio = max(worst_ratio, lo / hi)
    checks.append({"name": "ode_residual_halving", "value": float(worst_ratio),
                   "threshold": args.ode_ratio, "pass": bool(worst_ratio <= args.ode_ratio)})

    scan = fredholm.scan_halfplane(s, np.linspace(0, 2 * np.pi, 17), np.linspace(0, 10.0, 11),
                                   tol=args.tol)
    det_ok = scan.zero_free and scan.min_modulus >= args.det_floor
    checks.append({"name": "determinant_zero_free", "value": float(scan.min_modulus),
                   "threshold": args.det_floor, "pass": bool(det_ok),
                   "winding": int(scan.winding)})

    modes = analytic.q0_from_kernel(v).mode_coefficients()
    q_target = q_from_p(p)[order.gamma_count - 1, 0]
    q0_err = abs(modes.get(1, 0j) - q_target)
    checks.append({"name": "q0_trace", "value": float(q0_err),
                   "threshold": args.q0_tol, "pass": bool(q0_err <= args.q0_tol)})
    return checks


def cmd_verify(args) -> int:
    problem = load_problem(args.input)
    if not isinstance(problem, PotentialCoefficients):
        raise InputError("verify expects a potential-mode problem file")
    checks = _verify_checks(problem, args)
    failed = [c["name"] for c in checks if not c["pass"]]
    _write_json({"checks": checks, "all_pass": not failed, "failed": failed},
                args.report or args.output)
    if failed:
        raise VerificationError(f"checks failed: {', '.join(failed)}", failed=failed)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="invspec",
                                     description="Forward/inverse spectral maps and the "
                                                 "determinant criterion for exponential-series "
                                                 "periodic coefficients.")
    sub = parser.add_subparsers(dest="command", required=True)

    fwd = sub.add_parser("forward", help="potential file -> spectral data file")
    fwd.add_argument("--input", required=True)
    fwd.add_argument("--output", default="-")
    fwd.add_argument("--emit-v", default=None, help="also write the V table to this path")
    fwd.set_defaults(func=cmd_forward)

    inv = sub.add_parser("inverse", help="spectral data file -> potential file")
    inv.add_argument("--input", required=True)
    inv.add_argument("--output", default="-")
    inv.add_argument("--report", default=None, help="write condition reports to this path")
    inv.add_argument("--am-cap", type=int, default=50)
    inv.set_defaults(func=cmd_inverse)

    det = sub.add_parser("det", help="scan the determinant over [0, 2pi] x [0, im-max]")
    det.add_argument("--input", required=True)
    det.add_argument("--output", default="-", help="CSV grid destination")
    det.add_argument("--report", default=None, help="JSON verdict destination")
    det.add_argument("--re-steps", type=int, default=33)
    det.add_argument("--im-max", type=float, default=10.0)
    det.add_argument("--im-steps", type=int, default=21)
    det.add_argument("--tol", type=float, default=1e-6, help="modulus floor for the zero_free verdict")
    det.add_argument("--n-max", type=int, default=None, help="cap the block truncation below the data depth")
    det.add_argument("--det-tol", type=float, default=1e-10, help="consecutive-truncation convergence tolerance")
    det.set_defaults(func=cmd_det)

    ver = sub.add_parser("verify", help="run the full consistency battery on a potential")
    ver.add_argument("--input", required=True)
    ver.add_argument("--output", default="-")
    ver.add_argument("--report", default=None)
    ver.add_argument("--tol", type=float, default=1e-6, help="determinant modulus floor for zero_free")
    ver.add_argument("--round-tol", type=float, default=1e-8)
    ver.add_argument("--marchenko-tol", type=float, default=1e-9)
    ver.add_argument("--jump-tol", type=float, default=1e-9)
    ver.add_argument("--translation-tol", type=float, default=1e-9)
    ver.add_argument("--ode-ratio", type=float, default=0.6)
    ver.add_argument("--det-floor", type=float, default=0.5)
    ver.add_argument("--q0-tol", type=float, default=1e-7)
    ver.add_argument("--shift-re", type=float, default=0.5)
    ver.add_argument("--shift-im", type=float, default=0.5)
    ver.set_defaults(func=cmd_verify)
    return parser


_MATH_ERRORS = (DegenerateDenominatorError, ResonantIndexError, PoleProximityError,
                SingularMatrixError, SingularSystemError, DivisionRemainderError)


def exit_code_for(exc: Exception) -> int:
    if isinstance(exc, _MATH_ERRORS):
        return 2
    if isinstance(exc, ConvergenceError):
        return 3
    if isinstance(exc, VerificationError):
        return 4
    if isinstance(exc, (InputError, InvspecError)):
        return 1
    raise exc


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # noqa: BLE001 - mapped onto the exit-code contract
        code = exit_code_for(exc)
        print(f"error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
