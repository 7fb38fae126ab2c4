"""Command-line front end: parse job specs, run checks, emit JSON reports.

Exit codes: 0 all criteria pass, 1 fail, 2 inconclusive, 3 internal
criterion disagreement (a library defect), 64 malformed input, 65 invariant
violation.  Code 3 is reserved exclusively for mathematical-equivalence
violations so CI can tell library bugs from bad inputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .composition import CompositionParams, ScanReport, TrigpolyGrid, scan_trigpoly_theorem
from .conjugation import (
    Conjugation,
    Geometric,
    canonical_factorization,
    materialize,
    parse_family_spec,
)
from .core import ConjtoepError, Tolerance, Window
from .finite import FiniteToeplitz, finite_symmetry_criterion, general_symmetry, toeplitz_conjugation
from .hardy import LaurentSymbol
from .polydisc import BoxTruncation, PolySymbol, check_poly_criterion, poly_check_definition
from .symmetry import (
    FAIL,
    INCONCLUSIVE,
    PASS,
    CheckConfig,
    CriterionDisagreement,
    build_xy,
    check_xy,
    run_all,
)

__all__ = ["main", "build_parser"]

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 2
EXIT_DISAGREEMENT = 3
EXIT_BAD_INPUT = 64
EXIT_INVARIANT = 65

DEFAULT_DEGREE = 32


class _InputError(Exception):
    pass


def _default_degree() -> int:
    raw = os.environ.get("CONJTOEP_DEFAULT_DEGREE")
    if raw is None:
        return DEFAULT_DEGREE
    try:
        return int(raw)
    except ValueError as exc:
        raise _InputError(f"CONJTOEP_DEFAULT_DEGREE is not an integer: {raw!r}") from exc


def _load_json_arg(raw: str) -> dict:
    """Parse an inline JSON object or, with a leading @, a JSON file."""
    if raw.startswith("@"):
        try:
            with open(raw[1:], "r", encoding="utf-8") as fh:
                raw = fh.read()
        except OSError as exc:
            raise _InputError(f"cannot read {raw[1:]!r}: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise _InputError(f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise _InputError("expected a JSON object")
    return data


def _matrix_to_json(m: np.ndarray) -> list:
    return [[[v.real, v.imag] for v in row] for row in m]


def _tolerance(args) -> Tolerance:
    return Tolerance(absolute=args.tol_abs, relative=args.tol_rel)


def _emit(payload: dict, args) -> None:
    if args.format == "pretty":
        text = _pretty(payload)
    else:
        text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _pretty(payload: dict, indent: int = 0) -> str:
    lines = []
    pad = "  " * indent
    for key, value in payload.items():
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.append(_pretty(value, indent + 1))
        elif isinstance(value, list) and value and isinstance(value[0], (list, dict)):
            lines.append(f"{pad}{key}: {json.dumps(value)}")
        else:
            lines.append(f"{pad}{key}: {value}")
    return "\n".join(lines)


def _effective_config(config: CheckConfig, degree: int) -> dict:
    return {
        "degree": degree,
        "jk_max": config.jk_max,
        "window": config.window,
        "tolerance": {"absolute": config.tolerance.absolute, "relative": config.tolerance.relative},
    }


def _exit_from_overall(overall: str) -> int:
    return {PASS: EXIT_PASS, FAIL: EXIT_FAIL, INCONCLUSIVE: EXIT_INCONCLUSIVE}[overall]


def _cmd_check(args) -> int:
    phi = LaurentSymbol.from_json_dict(_load_json_arg(args.symbol))
    family = parse_family_spec(_load_json_arg(args.conj))
    degree = args.degree if args.degree is not None else _default_degree()
    config = CheckConfig(
        degree=degree, jk_max=args.kmax, window=args.window, tolerance=_tolerance(args)
    )
    conj = materialize(family, degree)
    report = run_all(phi, conj, config)
    payload = report.to_json_dict()
    payload["config"] = _effective_config(config, degree)
    _emit(payload, args)
    return _exit_from_overall(report.overall())


def _cmd_factor(args) -> int:
    family = parse_family_spec(_load_json_arg(args.conj))
    degree = args.degree if args.degree is not None else _default_degree()
    tol = _tolerance(args)
    conj = materialize(family, degree)
    u = canonical_factorization(conj, tol)
    if isinstance(conj.decay, Geometric):
        w = min(8, degree)
        tails = conj.tails(degree, w)
        tail_bound = float(np.sum(tails**2))
    else:
        w = degree
        tail_bound = 0.0
    window = Window.square(w)
    symmetry = float(np.linalg.norm((u - u.T)[: w + 1, : w + 1]))
    gram = u @ u.conj().T
    unitarity = float(np.linalg.norm((gram - np.eye(degree + 1))[: w + 1, : w + 1]))
    rng = np.random.default_rng(7)
    sample = rng.standard_normal((degree + 1, 8)) + 1j * rng.standard_normal((degree + 1, 8))
    reconstruction = float(np.max(np.abs(u @ np.conj(sample) - conj.coeff @ np.conj(sample))))
    payload = {
        "unitary": _matrix_to_json(u),
        "residuals": {
            "symmetry": symmetry,
            "unitarity": unitarity,
            "reconstruction": reconstruction,
        },
        "window": [window.max_row, window.max_col],
        "tail_bound": tail_bound,
        "config": {"degree": degree, "tolerance": {"absolute": tol.absolute, "relative": tol.relative}},
    }
    _emit(payload, args)
    ok = symmetry <= tol.threshold(1.0) and unitarity <= tol.threshold(1.0) + tail_bound
    return EXIT_PASS if ok and reconstruction <= tol.threshold(1.0) else EXIT_FAIL


def _cmd_xy(args) -> int:
    phi = LaurentSymbol.from_json_dict(_load_json_arg(args.symbol))
    family = parse_family_spec(_load_json_arg(args.conj))
    degree = args.degree if args.degree is not None else _default_degree()
    tol = _tolerance(args)
    conj = materialize(family, degree)
    config = CheckConfig(degree=degree, jk_max=args.kmax, tolerance=tol)
    outcome = check_xy(phi, conj, config=config)
    k_max = outcome.details["k_max"]
    trunc = outcome.details["trunc"]
    systems = []
    for k in range(k_max + 1):
        system = build_xy(conj, k, trunc, phi=phi, rows=k_max)
        systems.append(
            {
                "k": k,
                "X": _matrix_to_json(system.x),
                "Y": _matrix_to_json(system.y),
                "residual": outcome.details["per_k"][k],
            }
        )
    payload = {
        "verdict": outcome.verdict,
        "residual": outcome.residual,
        "systems": systems,
        "config": {"degree": degree, "k_max": k_max, "trunc": trunc},
    }
    _emit(payload, args)
    return _exit_from_overall(outcome.verdict)


def _cmd_check_poly(args) -> int:
    phi = PolySymbol.from_json_dict(_load_json_arg(args.symbol))
    conj_data = _load_json_arg(args.conj)
    if conj_data.get("family") != "poly_theta_xi":
        raise _InputError('check-poly expects {"family": "poly_theta_xi", "theta": [...], "xi": [...]}')
    theta = [float(t) for t in conj_data["theta"]]
    xi = [float(x) for x in conj_data["xi"]]
    if args.box is None:
        raise _InputError("check-poly requires --box")
    box = BoxTruncation(tuple(int(part) for part in args.box.split(",")))
    tol = _tolerance(args)
    coeff_verdict, coeff_residual = check_poly_criterion(phi, theta, tol)
    definition = poly_check_definition(phi, theta, xi, box, tol=tol)
    payload = {
        "verdicts": {"coefficient": coeff_verdict, "definition": definition.verdict},
        "residuals": {"coefficient": coeff_residual, "definition": definition.residual},
        "tilde_mismatch": definition.tilde_mismatch,
        "window": list(definition.window),
        "config": {"box": list(box.degrees), "tolerance": {"absolute": tol.absolute, "relative": tol.relative}},
    }
    _emit(payload, args)
    both_pass = coeff_verdict == PASS and definition.verdict == PASS
    return EXIT_PASS if both_pass else EXIT_FAIL


def _cmd_check_finite(args) -> int:
    t = FiniteToeplitz.from_json_dict(_load_json_arg(args.symbol))
    conj_data = _load_json_arg(args.conj)
    n = t.size_minus_one
    if conj_data.get("family") == "toeplitz":
        conj = toeplitz_conjugation(n)
    else:
        conj = materialize(parse_family_spec(conj_data), n)
    ok, residual = finite_symmetry_criterion(t, conj)
    ok_general, residual_general = general_symmetry(t.matrix(), conj)
    payload = {
        "verdicts": {
            "coefficient": PASS if ok else FAIL,
            "general": PASS if ok_general else FAIL,
        },
        "residuals": {"coefficient": residual, "general": residual_general},
        "config": {"N": n},
    }
    _emit(payload, args)
    return EXIT_PASS if ok and ok_general else EXIT_FAIL


def _cmd_scan_trigpoly(args) -> int:
    data = _load_json_arg(args.alpha) if args.alpha.startswith(("@", "{")) else None
    if data is not None:
        re, im = data["alpha"]
        alpha = complex(re, im)
    else:
        parts = args.alpha.split(",")
        alpha = complex(float(parts[0]), float(parts[1]) if len(parts) > 1 else 0.0)
    params = CompositionParams(alpha)
    grid = TrigpolyGrid.real_grid(points=args.grid_points, lo=args.grid_lo, hi=args.grid_hi)
    degree = args.degree if args.degree is not None else 24
    report: ScanReport = scan_trigpoly_theorem(params, grid, _tolerance(args), degree=degree)
    payload = {
        "alpha": [alpha.real, alpha.imag],
        "total_points": report.total_points,
        "locus_points": report.locus_points,
        "passing": [[[c.real, c.imag] for c in point] for point in report.passing],
        "theorem_reproduced": report.theorem_reproduced,
        "config": {"degree": degree, "grid_points": args.grid_points},
    }
    _emit(payload, args)
    return EXIT_PASS if report.theorem_reproduced else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conjtoep",
        description="Decide complex symmetry of (truncated) Toeplitz operators "
        "against a conjugation via mutually verifying criteria.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, symbol=True, conj=True):
        if symbol:
            p.add_argument("--symbol", required=True, help="symbol JSON or @file")
        if conj:
            p.add_argument("--conj", required=True, help="conjugation family JSON or @file")
        p.add_argument("--degree", type=int, default=None, help="truncation degree (default 32, env CONJTOEP_DEFAULT_DEGREE)")
        p.add_argument("--box", default=None, help="per-axis degrees N1,N2,...")
        p.add_argument("--tol-abs", type=float, default=1e-12)
        p.add_argument("--tol-rel", type=float, default=1e-10)
        p.add_argument("--kmax", type=int, default=None)
        p.add_argument("--window", type=int, default=None)
        p.add_argument("--out", default=None, help="write the report to this path")
        p.add_argument("--format", choices=["json", "pretty"], default="json")

    p_check = sub.add_parser("check", help="run the full one-variable criterion suite")
    common(p_check)
    p_check.set_defaults(func=_cmd_check)

    p_poly = sub.add_parser("check-poly", help="polydisc coefficient and definition checks")
    common(p_poly)
    p_poly.set_defaults(func=_cmd_check_poly)

    p_fin = sub.add_parser("check-finite", help="exact finite-dimensional checks")
    common(p_fin)
    p_fin.set_defaults(func=_cmd_check_finite)

    p_factor = sub.add_parser("factor", help="canonical factorization C = U J with residuals")
    common(p_factor, symbol=False)
    p_factor.set_defaults(func=_cmd_factor)

    p_xy = sub.add_parser("xy", help="emit the truncated X(k)/Y(k) systems and residuals")
    common(p_xy)
    p_xy.set_defaults(func=_cmd_xy)

    p_scan = sub.add_parser("scan-trigpoly", help="grid scan of band-1 symbols for one alpha")
    p_scan.add_argument("--alpha", required=True, help="re,im or JSON {\"alpha\": [re, im]}")
    p_scan.add_argument("--grid-points", type=int, default=21)
    p_scan.add_argument("--grid-lo", type=float, default=-1.0)
    p_scan.add_argument("--grid-hi", type=float, default=1.0)
    p_scan.add_argument("--degree", type=int, default=None)
    p_scan.add_argument("--tol-abs", type=float, default=1e-12)
    p_scan.add_argument("--tol-rel", type=float, default=1e-10)
    p_scan.add_argument("--out", default=None)
    p_scan.add_argument("--format", choices=["json", "pretty"], default="json")
    p_scan.set_defaults(func=_cmd_scan_trigpoly)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except CriterionDisagreement as exc:
        print(f"internal criterion disagreement: {exc}", file=sys.stderr)
        return EXIT_DISAGREEMENT
    except ConjtoepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
