"""Command-line front end.

Reports go to stdout as JSON; a short human-readable table goes to stderr.

Exit codes: 0 state valid (or command succeeded), 2 not a state / classical
only, 1 usage, parse or I/O error, 3 input object invalid (covariance not
positive definite, wavefunction not normalized or leaking at the edges).
"""

import argparse
import json
import sys

import numpy as np

from . import __version__
from .errors import (
    EdgeLeakage,
    HbarCheckError,
    NotAQuantumState,
    NotNormalized,
    NotPositiveDefinite,
    OddDimension,
    ParseError,
)
from .gaussian import (
    GaussianLabel,
    GaussianState,
    classify_gaussian,
    gaussian_purity,
)
from .io import (
    file_digest,
    load_covariance_spec,
    looks_like_json,
    read_wavefunction_csv,
    read_wigner_csv,
    write_wigner_csv,
)
from .symplectic import symplectic_eigenvalues
from .verifier import (
    VERDICT_TOL,
    StateLabel,
    find_transitions,
    klm_finite_sample,
    scan_hbar,
    verify_state,
)
from .wignergrid import PositionGrid, gaussian_wigner_grid, wigner_transform

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_STATE = 2
EXIT_INVALID = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not (np.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"must be a positive real: {text!r}")
    return v


def build_parser():
    p = _Parser(prog="hbarcheck", description="Check phase-space functions against a variable Planck constant.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--tol", type=_positive, default=VERDICT_TOL, help="PSD tolerance relative to the trace")
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--grid-n", type=int, default=None, help="sample one-mode Gaussians on an N-point grid as a cross-check")
        sp.add_argument("--grid-l", type=_positive, default=12.0, help="grid half-width in units of sqrt(hbar_ref)")
        sp.add_argument("--out", default=None, help="also write the JSON report to this path")

    sp = sub.add_parser("classify", help="classify a Gaussian covariance spec at hbar'")
    sp.add_argument("input")
    sp.add_argument("--hbar", type=_positive, required=True)
    common(sp)

    sp = sub.add_parser("wigner", help="Wigner transform of a wavefunction CSV")
    sp.add_argument("input")
    sp.add_argument("--out", required=True)
    sp.add_argument("--seed", type=int, default=0)

    sp = sub.add_parser("verify", help="verify a Wigner CSV as a state at hbar'")
    sp.add_argument("input")
    sp.add_argument("--hbar", type=_positive, required=True)
    sp.add_argument("--klm-points", type=int, default=0, help="also run the finite-sample test on this many seeded random points")
    common(sp)

    sp = sub.add_parser("scan", help="scan hbar' over a range")
    sp.add_argument("input")
    sp.add_argument("--hbar-min", type=_positive, required=True)
    sp.add_argument("--hbar-max", type=_positive, required=True)
    sp.add_argument("--steps", type=int, required=True)
    common(sp)

    sp = sub.add_parser("spectrum", help="dump operator (or symplectic) eigenvalues")
    sp.add_argument("input")
    sp.add_argument("--hbar", type=_positive, default=None)
    common(sp)

    sp = sub.add_parser("purity", help="purity of the state at hbar'")
    sp.add_argument("input")
    sp.add_argument("--hbar", type=_positive, required=True)
    common(sp)
    return p


def _load_gaussian(path):
    spec = load_covariance_spec(path)
    ref = spec["hbar_ref"]
    # nondimensionalize: sigma in units of hbar_ref, mean in units of sqrt(hbar_ref)
    state = GaussianState(spec["sigma"] / ref, spec["mean"] / np.sqrt(ref), 1.0)
    return spec, state


def _grid_cross_check(state, args, hbar_values):
    if args.grid_n is None or state.n != 1:
        return None
    grid = PositionGrid(args.grid_l, args.grid_n)
    w = gaussian_wigner_grid(state, grid, hbar=1.0)
    return [verify_state(w, h, args.tol).as_dict() for h in hbar_values]


def _table(rows, headers):
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(headers)]
    out = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
    out += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(out)


def _g(v):
    return f"{v:.6g}"


def cmd_classify(args):
    spec, state = _load_gaussian(args.input)
    ref = spec["hbar_ref"]
    verdict = classify_gaussian(state, args.hbar / ref)
    result = _gaussian_result(verdict, ref)
    cross = _grid_cross_check(state, args, [args.hbar / ref])
    if cross is not None:
        result["grid_cross_check"] = cross[0]
    code = EXIT_NOT_STATE if verdict.label is GaussianLabel.CLASSICAL_ONLY else EXIT_OK
    table = _table(
        [[_g(args.hbar), str(verdict.label), _g(verdict.lambda_min * ref), _g(verdict.hbar_critical * ref)]],
        ["hbar'", "label", "lambda_min", "critical_hbar"],
    )
    return result, code, table


def _gaussian_result(verdict, ref):
    d = verdict.as_dict()
    d["hbar_prime"] = verdict.hbar_prime * ref
    d["lambda_min"] = verdict.lambda_min * ref
    d["hbar_critical"] = verdict.hbar_critical * ref
    d["symplectic_eigenvalues"] = [v * ref for v in verdict.symplectic_eigenvalues]
    return d


def _verdict_code(verdict):
    return EXIT_NOT_STATE if verdict.label is StateLabel.NOT_A_STATE else EXIT_OK


def cmd_wigner(args):
    psi = read_wavefunction_csv(args.input)
    w = wigner_transform(psi)
    write_wigner_csv(args.out, w)
    result = {
        "output": args.out,
        "output_sha256": file_digest(args.out),
        "hbar": w.hbar,
        "L": w.xgrid.L,
        "N": w.xgrid.N,
        "mass": w.mass,
        "min_w": float(w.w.min()),
        "max_w": float(w.w.max()),
        "edge_magnitude": psi.edge_magnitude,
    }
    table = _table([[str(w.xgrid.N), _g(w.xgrid.L), _g(w.hbar), _g(w.mass), _g(w.w.min())]],
                   ["N", "L", "hbar", "mass", "min W"])
    return result, EXIT_OK, table


def cmd_verify(args):
    w = read_wigner_csv(args.input)
    verdict = verify_state(w, args.hbar, args.tol)
    result = verdict.as_dict()
    if args.klm_points > 0:
        rng = np.random.default_rng(args.seed)
        scale = np.sqrt(args.hbar)
        pts = rng.uniform(-2.0, 2.0, size=(min(args.klm_points, 64), 2)) * scale
        result["klm_finite_sample"] = {
            "points": pts.tolist(),
            "passed": klm_finite_sample(w, args.hbar, pts),
        }
    table = _table([[_g(args.hbar), str(verdict.label), _g(verdict.trace), _g(verdict.min_eigenvalue), _g(verdict.purity)]],
                   ["hbar'", "label", "trace", "min_eig", "purity"])
    return result, _verdict_code(verdict), table


def _scan_values(args):
    if args.steps < 2:
        raise UsageError("--steps must be at least 2")
    if args.hbar_max <= args.hbar_min:
        raise UsageError("--hbar-max must exceed --hbar-min")
    return [float(v) for v in np.linspace(args.hbar_min, args.hbar_max, args.steps)]


def cmd_scan(args):
    values = _scan_values(args)
    if looks_like_json(args.input):
        spec, state = _load_gaussian(args.input)
        ref = spec["hbar_ref"]
        verdicts = [classify_gaussian(state, h / ref) for h in values]
        labels = [v.label for v in verdicts]
        result = {
            "kind": "gaussian",
            "critical_hbar": verdicts[0].hbar_critical * ref,
            "verdicts": [_gaussian_result(v, ref) for v in verdicts],
            "transitions": list(find_transitions(values, labels)),
        }
        cross = _grid_cross_check(state, args, [h / ref for h in values])
        if cross is not None:
            result["grid_cross_check"] = cross
        rows = [[_g(h), str(v.label), _g(v.lambda_min * ref)] for h, v in zip(values, verdicts)]
        table = _table(rows, ["hbar'", "label", "lambda_min"])
        table += f"\ncritical hbar = {_g(result['critical_hbar'])}"
    else:
        w = read_wigner_csv(args.input)
        report = scan_hbar(w, values, args.tol)
        result = {
            "kind": "grid",
            "reference_hbar": report.reference_hbar,
            "verdicts": [v.as_dict() for v in report.verdicts],
            "transitions": list(report.transitions),
            "below_reference_positive": list(report.below_reference),
        }
        rows = [[_g(v.hbar_prime), str(v.label), _g(v.min_eigenvalue), _g(v.purity)] for v in report.verdicts]
        table = _table(rows, ["hbar'", "label", "min_eig", "purity"])
    for t in result["transitions"]:
        table += f"\ntransition {t['from']} -> {t['to']} between {_g(t['hbar_before'])} and {_g(t['hbar_after'])}"
    return result, EXIT_OK, table


def cmd_spectrum(args):
    if looks_like_json(args.input):
        spec, state = _load_gaussian(args.input)
        lam = symplectic_eigenvalues(state.sigma) * spec["hbar_ref"]
        result = {"kind": "gaussian", "symplectic_eigenvalues": [float(v) for v in lam]}
        return result, EXIT_OK, _table([[_g(v)] for v in lam], ["symplectic eigenvalue"])
    if args.hbar is None:
        raise UsageError("--hbar is required for grid input")
    w = read_wigner_csv(args.input)
    verdict = verify_state(w, args.hbar, args.tol)
    result = {"kind": "grid", "hbar_prime": args.hbar, "label": str(verdict.label),
              "trace": verdict.trace, "eigenvalues": list(verdict.eigenvalues)}
    rows = [[str(i), _g(v)] for i, v in enumerate(verdict.eigenvalues[:10])]
    return result, _verdict_code(verdict), _table(rows, ["#", "eigenvalue"])


def cmd_purity(args):
    if looks_like_json(args.input):
        spec, state = _load_gaussian(args.input)
        try:
            purity = gaussian_purity(state, args.hbar / spec["hbar_ref"])
        except NotAQuantumState as exc:
            result = {"kind": "gaussian", "hbar_prime": args.hbar, "purity": None, "reason": str(exc)}
            return result, EXIT_NOT_STATE, f"not a quantum state at hbar'={_g(args.hbar)}"
        result = {"kind": "gaussian", "hbar_prime": args.hbar, "purity": purity}
        return result, EXIT_OK, f"purity = {_g(purity)}"
    w = read_wigner_csv(args.input)
    verdict = verify_state(w, args.hbar, args.tol)
    result = {"kind": "grid", "hbar_prime": args.hbar, "label": str(verdict.label),
              "purity": verdict.purity, "purity_phase_space": verdict.purity_phase_space}
    return result, _verdict_code(verdict), f"purity = {_g(verdict.purity)} ({verdict.label})"


COMMANDS = {
    "classify": cmd_classify,
    "wigner": cmd_wigner,
    "verify": cmd_verify,
    "scan": cmd_scan,
    "spectrum": cmd_spectrum,
    "purity": cmd_purity,
}


def _emit(report, out_path, stdout):
    text = json.dumps(report, indent=2, sort_keys=True, allow_nan=False)
    stdout.write(text + "\n")
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")


def _echo(args):
    return {k: v for k, v in sorted(vars(args).items()) if k != "command"}


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        stderr.write(f"hbarcheck: usage error: {exc}\n")
        return EXIT_ERROR
    report = {"command": args.command, "arguments": _echo(args), "tolerances": {"psd": getattr(args, "tol", VERDICT_TOL)}}
    try:
        report["input_sha256"] = file_digest(args.input)
        result, code, table = COMMANDS[args.command](args)
    except UsageError as exc:
        stderr.write(f"hbarcheck: usage error: {exc}\n")
        return EXIT_ERROR
    except ParseError as exc:
        field = f" (field '{exc.field}')" if exc.field else ""
        stderr.write(f"hbarcheck: parse error{field}: {exc}\n")
        return EXIT_ERROR
    except OSError as exc:
        stderr.write(f"hbarcheck: I/O error: {exc}\n")
        return EXIT_ERROR
    except EdgeLeakage as exc:
        stderr.write(f"hbarcheck: edge leakage, boundary |psi| = {exc.magnitude:.3e}: {exc}\n")
        report["result"] = {"label": str(GaussianLabel.INVALID), "reason": str(exc), "edge_magnitude": exc.magnitude}
        report["exit_code"] = EXIT_INVALID
        _emit(report, getattr(args, "out", None) if args.command != "wigner" else None, stdout)
        return EXIT_INVALID
    except (NotPositiveDefinite, OddDimension, NotNormalized) as exc:
        stderr.write(f"hbarcheck: invalid input: {exc}\n")
        report["result"] = {"label": str(GaussianLabel.INVALID), "reason": str(exc)}
        report["exit_code"] = EXIT_INVALID
        _emit(report, getattr(args, "out", None) if args.command != "wigner" else None, stdout)
        return EXIT_INVALID
    except HbarCheckError as exc:
        stderr.write(f"hbarcheck: {type(exc).__name__}: {exc}\n")
        return EXIT_ERROR
    report["result"] = result
    report["exit_code"] = code
    _emit(report, args.out if args.command != "wigner" else None, stdout)
    stderr.write(table + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
