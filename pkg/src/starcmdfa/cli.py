"""Command-line front end.

Subcommands: classify, solve, verify, mi, sweep, sample, estimate.
Exit codes: 0 success, 1 usage error, 2 domain error, 3 convergence /
construction failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import __version__
from .data import correlation_from_samples, estimate_alpha, sample
from .exceptions import (CmdfaError, ConstructionError, ConvergenceError,
                         DomainError, InfeasibleError, NumericalError,
                         RegimeError)
from .info import LN2, mi_report, sweep_theta1
from .model import StarModel, build_covariance, canonicalize, classify, solve
from .verify import check_certificate

SWEEP_HEADER = "theta1,margin,i_star,i_cmdfa,i_up,i_low"


class _Parser(argparse.ArgumentParser):
    """Argument parser that exits with status 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _jsonify(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    return obj


def _parse_floats(text: str) -> np.ndarray:
    try:
        return np.array([float(tok) for tok in text.split(",") if tok.strip()])
    except ValueError as exc:
        raise DomainError(f"could not parse float list {text!r}: {exc}") from None


def _parse_grid(text: str) -> np.ndarray:
    """Either a comma list or 'start:stop:count' (inclusive endpoints)."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise DomainError("grid must be 'start:stop:count' or a comma list")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 2:
            raise DomainError("grid count must be >= 2")
        return np.linspace(start, stop, count)
    return _parse_floats(text)


def _add_input_args(p):
    p.add_argument("--alpha", help="comma-separated loadings, e.g. 0.8,0.3")
    p.add_argument("--matrix",
                   help="CSV file with a symmetric unit-diagonal matrix; "
                        "loadings are estimated from it first")


def _add_tol_args(p):
    p.add_argument("--tol-eig", type=float, default=1e-8,
                   help="zero-eigenvalue tolerance for certificate checks")
    p.add_argument("--tol-root", type=float, default=1e-12,
                   help="relative tolerance of the scalar root finder")
    p.add_argument("--eps-class", type=float, default=None,
                   help="width of the boundary classification band")


def _load_model(args) -> StarModel:
    if (args.alpha is None) == (args.matrix is None):
        raise DomainError("exactly one of --alpha / --matrix is required")
    if args.alpha is not None:
        return canonicalize(_parse_floats(args.alpha))
    C = np.loadtxt(args.matrix, delimiter=",")
    model, _ = estimate_alpha(C)
    return model


def _solution_dict(sol) -> dict:
    out = {
        "regime": sol.regime.value,
        "margin": sol.margin,
        "d": sol.d,
        "sigma_t": sol.sigma_t,
        "rank": sol.rank,
        "t": sol.t,
    }
    if sol.x1_star is not None:
        out.update(x1_star=sol.x1_star, mu_sq=sol.mu_sq, a=sol.a)
    return out


def _certificate_dict(cert) -> dict:
    return {
        "lambda_min": cert.lambda_min,
        "second_eigenvalue": cert.second_eigenvalue,
        "rank_sigma_t": cert.rank_sigma_t,
        "row_norm_residuals": cert.row_norm_residuals,
        "nullspace_residual": cert.nullspace_residual,
        "passed": cert.passed,
    }


def _mi_dict(rep, bits: bool = False) -> dict:
    scale = 1.0 / LN2 if bits else 1.0
    return {
        "units": "bits" if bits else "nats",
        "i_star": rep.i_star * scale,
        "i_cmdfa": rep.i_cmdfa * scale,
        "i_up": rep.i_up * scale,
        "i_low": rep.i_low * scale,
        "gaps": [g * scale for g in rep.gaps],
        "regime": rep.regime.value,
    }


def _emit(payload: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(_jsonify(payload), indent=2))
    else:
        for key, value in payload.items():
            if isinstance(value, np.ndarray):
                flat = np.asarray(value, float).ravel()
                value = ",".join(_fmt(v) for v in flat)
            elif isinstance(value, float):
                value = _fmt(value)
            print(f"{key}: {value}")


def _cmd_classify(args) -> int:
    model = _load_model(args)
    cls = classify(model, args.eps_class)
    if args.format == "json":
        print(json.dumps({"regime": cls.regime.value, "margin": cls.margin}))
    else:
        print(f"{cls.regime.value} (margin={cls.margin:.6f})")
    return 0


def _cmd_solve(args) -> int:
    model = _load_model(args)
    sol = solve(model, tol=args.tol_root, eps_class=args.eps_class)
    cov = build_covariance(model.user_alpha)
    cert = check_certificate(cov, sol.d, sol.t, tol_eig=args.tol_eig)
    rep = mi_report(model, tol=args.tol_root)
    payload = {
        "solution": _solution_dict(sol),
        "certificate": _certificate_dict(cert),
        "mi": _mi_dict(rep),
    }
    if args.format == "json":
        print(json.dumps(_jsonify(payload), indent=2))
    else:
        _emit(_solution_dict(sol) | {"passed": cert.passed}, "text")
    return 0


def _cmd_verify(args) -> int:
    model = _load_model(args)
    sol = solve(model, tol=args.tol_root, eps_class=args.eps_class)
    d = _parse_floats(args.d) if args.d else sol.d
    if d.size != model.n:
        raise DomainError("--d length must match the number of loadings")
    cov = build_covariance(model.user_alpha)
    cert = check_certificate(cov, d, sol.t, tol_eig=args.tol_eig)
    payload = _certificate_dict(cert)
    _emit(payload, args.format)
    return 0


def _cmd_mi(args) -> int:
    model = _load_model(args)
    rep = mi_report(model, tol=args.tol_root)
    _emit(_mi_dict(rep, bits=args.bits), args.format)
    return 0


def _cmd_sweep(args) -> int:
    rest = _parse_floats(args.theta_rest)
    grid = _parse_grid(args.theta1)
    rows = sweep_theta1(rest, grid, tol=args.tol_root)
    print(SWEEP_HEADER)
    for row in rows:
        cells = [row.theta1, row.margin, row.i_star, row.i_cmdfa,
                 row.i_up, row.i_low]
        print(",".join(_fmt(c) for c in cells))
    return 0


def _cmd_sample(args) -> int:
    model = _load_model(args)
    seed = args.seed
    if seed is None:
        seed = int(os.environ.get("CMDFA_SEED", "0"))
    batch = sample(model, args.samples, seed=seed)
    if args.out:
        batch.to_csv(args.out)
    else:
        batch.to_csv(sys.stdout)
    return 0


def _cmd_estimate(args) -> int:
    if args.matrix is None:
        raise DomainError("estimate requires --matrix")
    C = np.loadtxt(args.matrix, delimiter=",")
    if C.ndim == 2 and not np.allclose(np.diag(C), 1.0, atol=1e-8):
        # raw sample file: build the empirical correlation first
        C = correlation_from_samples(C)
    model, residual = estimate_alpha(C)
    cls = classify(model)
    payload = {
        "alpha": model.user_alpha,
        "fit_residual": residual,
        "regime": cls.regime.value,
        "margin": cls.margin,
    }
    _emit(payload, args.format)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cmdfa",
                     description="Exact minimum-determinant factor analysis "
                                 "of star-structured covariance matrices")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, help_text in [
        ("classify", _cmd_classify, "report the dominance regime"),
        ("solve", _cmd_solve, "compute the decomposition and certificate"),
        ("verify", _cmd_verify, "check a solution's optimality certificate"),
        ("mi", _cmd_mi, "mutual-information report"),
    ]:
        p = sub.add_parser(name, help=help_text)
        _add_input_args(p)
        _add_tol_args(p)
        p.add_argument("--format", choices=["json", "text"], default="json")
        p.set_defaults(func=func)
        if name == "classify":
            p.set_defaults(format="text")
        if name == "verify":
            p.add_argument("--d", help="comma-separated diagonal to check "
                                       "instead of the solved one")
        if name == "mi":
            p.add_argument("--bits", action="store_true",
                           help="report values in bits instead of nats")

    p = sub.add_parser("sweep", help="CSV sweep of MI values over theta1")
    p.add_argument("--theta-rest", required=True,
                   help="comma-separated fixed SNR values of variables 2..n")
    p.add_argument("--theta1", required=True,
                   help="grid: comma list or start:stop:count")
    p.add_argument("--jobs", type=int, default=1,
                   help="accepted for compatibility; rows are cheap and "
                        "evaluated in grid order")
    _add_tol_args(p)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("sample", help="draw observations from the star model")
    _add_input_args(p)
    p.add_argument("-m", "--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=None,
                   help="RNG seed (default: CMDFA_SEED env var, else 0)")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("estimate", help="estimate loadings from a matrix file")
    p.add_argument("--matrix", required=True)
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.set_defaults(func=_cmd_estimate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainError, RegimeError, InfeasibleError) as exc:
        print(f"cmdfa: error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, ConstructionError, NumericalError) as exc:
        print(f"cmdfa: error: {exc}", file=sys.stderr)
        return 3
    except CmdfaError as exc:
        print(f"cmdfa: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"cmdfa: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
