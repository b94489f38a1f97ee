"""Command-line front-end: ``dkit analyze|solve|causality <file>``.

A system lives in one JSON-shaped file; scalars may be integers,
decimal strings, or "num/den" rational strings (float mode also accepts
complex strings such as "1+2j").  Exit codes are part of the contract:

    0  success
    1  parse error
    2  irregular pencil
    3  inconsistent initial condition (analysis still emitted)
    4  unresolvable exact spectrum (retry with --mode float)
    5  input horizon too short
    6  causality oracle disagrees with the closed-form criteria
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass

from . import causality as causality_mod
from .errors import (
    DkitError,
    InconsistentInitialCondition,
    InputHorizonTooShort,
    IrregularPencil,
    ParseError,
    UnresolvableSpectrum,
)
from .matrices import Matrix
from .pencil import Pencil, char_poly
from .scalars import Mode, format_scalar, parse_scalar
from .solver import (
    DescriptorSystem,
    InputSignal,
    check_consistency,
    residual_oracle,
    solve,
    transform_input,
)
from .weierstrass import decompose, verify

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_IRREGULAR = 2
EXIT_INCONSISTENT = 3
EXIT_UNRESOLVABLE = 4
EXIT_HORIZON = 5
EXIT_ORACLE_DISAGREES = 6

_REQUIRED_KEYS = ("n", "l", "m", "mode", "F", "G", "B", "C", "Y0", "k0", "inputs", "K")


@dataclass(frozen=True)
class SystemFile:
    n: int
    l: int
    m: int
    mode: Mode
    F: Matrix
    G: Matrix
    B: Matrix
    C: Matrix
    Y0: Matrix
    k0: int
    inputs: tuple[Matrix, ...]
    K: int

    def signal(self) -> InputSignal:
        return InputSignal(self.k0, list(self.inputs))

    def system(self, zero_tol: float | None = None) -> DescriptorSystem:
        return DescriptorSystem(self.F, self.G, self.B, self.C, zero_tol=zero_tol)


def _require_int(raw, field: str) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ParseError(f"{field}: expected an integer, got {raw!r}")
    return raw


def _parse_matrix(raw, nrows: int, ncols: int, mode: Mode, field: str) -> Matrix:
    if not isinstance(raw, list) or len(raw) != nrows:
        raise ParseError(f"{field}: expected {nrows} rows")
    data = []
    for i, row in enumerate(raw):
        if not isinstance(row, list) or len(row) != ncols:
            raise ParseError(f"{field}[{i}]: expected {ncols} entries")
        out = []
        for j, cell in enumerate(row):
            try:
                out.append(parse_scalar(cell, mode))
            except ValueError as exc:
                raise ParseError(f"{field}[{i}][{j}]: {exc}") from None
        data.append(out)
    if not data:
        return Matrix.zeros(nrows, ncols, mode)
    return Matrix(data, mode)


def _parse_vector(raw, length: int, mode: Mode, field: str) -> Matrix:
    if not isinstance(raw, list) or len(raw) != length:
        raise ParseError(f"{field}: expected a vector of length {length}")
    out = []
    for j, cell in enumerate(raw):
        try:
            out.append(parse_scalar(cell, mode))
        except ValueError as exc:
            raise ParseError(f"{field}[{j}]: {exc}") from None
    return Matrix.column(out, mode)


def parse_system_file(source, mode_override: Mode | None = None) -> SystemFile:
    """Parse a system description from a dict, a JSON string, or a path."""
    if isinstance(source, dict):
        doc = source
    else:
        text = str(source)
        looks_like_json = text.lstrip().startswith("{")
        if not looks_like_json:
            if not os.path.exists(source):
                raise ParseError(f"file not found: {source}")
            with open(source, encoding="utf-8") as fh:
                text = fh.read()
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level must be a JSON object")
    unknown = set(doc) - set(_REQUIRED_KEYS)
    if unknown:
        raise ParseError(f"unknown fields: {', '.join(sorted(unknown))}")
    missing = [k for k in _REQUIRED_KEYS if k not in doc]
    if missing:
        raise ParseError(f"missing fields: {', '.join(missing)}")

    n = _require_int(doc["n"], "n")
    l = _require_int(doc["l"], "l")
    m = _require_int(doc["m"], "m")
    if n < 1:
        raise ParseError("n: must be >= 1 (empty systems are rejected)")
    if l < 0 or m < 0:
        raise ParseError("l and m must be >= 0")
    raw_mode = doc["mode"]
    if raw_mode not in ("exact", "float"):
        raise ParseError(f'mode: expected "exact" or "float", got {raw_mode!r}')
    mode = mode_override or Mode(raw_mode)

    k0 = _require_int(doc["k0"], "k0")
    K = _require_int(doc["K"], "K")
    if K < k0:
        raise ParseError(f"K: horizon end {K} precedes k0 = {k0}")

    f = _parse_matrix(doc["F"], n, n, mode, "F")
    g = _parse_matrix(doc["G"], n, n, mode, "G")
    b = _parse_matrix(doc["B"], n, l, mode, "B")
    c = _parse_matrix(doc["C"], m, n, mode, "C")
    y0 = _parse_vector(doc["Y0"], n, mode, "Y0")
    raw_inputs = doc["inputs"]
    if not isinstance(raw_inputs, list):
        raise ParseError("inputs: expected a list of input vectors")
    inputs = tuple(
        _parse_vector(row, l, mode, f"inputs[{i}]") for i, row in enumerate(raw_inputs)
    )
    return SystemFile(n=n, l=l, m=m, mode=mode, F=f, G=g, B=b, C=c,
                      Y0=y0, k0=k0, inputs=inputs, K=K)


def _matrix_to_lists(mat: Matrix) -> list[list[str]]:
    return [[format_scalar(x) for x in mat.row_list(i)] for i in range(mat.rows)]


def system_file_to_dict(sf: SystemFile) -> dict:
    return {
        "n": sf.n,
        "l": sf.l,
        "m": sf.m,
        "mode": str(sf.mode),
        "F": _matrix_to_lists(sf.F),
        "G": _matrix_to_lists(sf.G),
        "B": _matrix_to_lists(sf.B),
        "C": _matrix_to_lists(sf.C),
        "Y0": [format_scalar(x) for x in sf.Y0.column_list()],
        "k0": sf.k0,
        "inputs": [[format_scalar(x) for x in v.column_list()] for v in sf.inputs],
        "K": sf.K,
    }


def _fmt_matrix(mat: Matrix) -> str:
    if mat.rows == 0 or mat.cols == 0:
        return f"(empty {mat.rows}x{mat.cols})"
    rows = ["[" + ", ".join(format_scalar(x) for x in mat.row_list(i)) + "]"
            for i in range(mat.rows)]
    return "[" + "; ".join(rows) + "]"


@dataclass(frozen=True)
class AnalysisReport:
    """Everything `dkit analyze` knows about one system."""

    regular: bool
    char_poly: tuple
    p: int
    q: int
    q_star: int
    jordan_blocks: tuple
    nilpotent_blocks: tuple
    verification: object        # weierstrass.VerificationReport
    consistency: object         # solver.ConsistencyResult
    causality: object           # causality.CausalityReport


def analysis_report_to_dict(report: AnalysisReport) -> dict:
    """JSON form; exact scalars become lossless "num/den" strings."""
    cons = report.consistency
    rep = report.verification
    return {
        "regular": report.regular,
        "char_poly": [format_scalar(c) for c in report.char_poly],
        "p": report.p,
        "q": report.q,
        "q_star": report.q_star,
        "jordan_blocks": [
            {"eigenvalue": format_scalar(b.eigenvalue), "size": b.size}
            for b in report.jordan_blocks
        ],
        "nilpotent_blocks": [b.size for b in report.nilpotent_blocks],
        "verification": {
            "residual_F": format_scalar_like(rep.residual_F),
            "residual_G": format_scalar_like(rep.residual_G),
            "P_nonsingular": rep.P_nonsingular,
            "Q_nonsingular": rep.Q_nonsingular,
        },
        "consistency": {
            "consistent": cons.consistent,
            "z_p0": (None if cons.z_p0 is None
                     else [format_scalar(x) for x in cons.z_p0.column_list()]),
            "residual": [format_scalar(x) for x in cons.residual.column_list()],
        },
        "causality": _causality_dict(report.causality),
    }


def _tolerances(args) -> dict:
    return {
        "zero_tol": args.tol,
        "cluster_radius": args.cluster_tol,
        "rank_tol": args.tol,
    }


def _analyze_parts(sf: SystemFile, args):
    """Shared pipeline: pencil -> decomposition -> transformed input."""
    pen = Pencil(sf.F, sf.G)
    cp = char_poly(pen, args.tol)
    if cp.is_zero:
        raise IrregularPencil("det(sF - G) is identically zero")
    w = decompose(pen, **_tolerances(args))
    sysm = DescriptorSystem(sf.F, sf.G, sf.B, sf.C, zero_tol=args.tol)
    tin = transform_input(w, sf.B)
    return pen, cp, w, sysm, tin


def _print_structure(report):
    rep = report.verification
    print(f"pencil: regular (char poly degree {report.p})")
    print("char poly coefficients (ascending): "
          + "[" + ", ".join(format_scalar(c) for c in report.char_poly) + "]")
    print(f"p = {report.p}, q = {report.q}, q_star = {report.q_star}")
    if report.jordan_blocks:
        blocks = ", ".join(
            f"(eigenvalue {format_scalar(b.eigenvalue)}, size {b.size})"
            for b in report.jordan_blocks
        )
        print(f"finite blocks: {blocks}")
    else:
        print("finite blocks: none")
    if report.nilpotent_blocks:
        print("nilpotent blocks: "
              + ", ".join(f"size {b.size}" for b in report.nilpotent_blocks))
    else:
        print("nilpotent blocks: none")
    print(f"verification residuals: {format_scalar_like(rep.residual_F)}, "
          f"{format_scalar_like(rep.residual_G)} "
          f"(P nonsingular: {rep.P_nonsingular}, Q nonsingular: {rep.Q_nonsingular})")


def format_scalar_like(value) -> str:
    try:
        return format_scalar(value)
    except TypeError:
        return repr(value)


def _print_causality(report):
    if report.no_infinite_eigenvalues:
        print("no infinite eigenvalues: causal in both senses")
    state = "CAUSAL" if report.state_input_causal else "NON-CAUSAL"
    output = "CAUSAL" if report.output_input_causal else "NON-CAUSAL"
    print(f"state-input causality: {state}   witness H_q B_q = "
          f"{_fmt_matrix(report.criterion_state)}")
    print(f"output-input causality: {output}")
    for i, wmat in enumerate(report.criteria_output, start=1):
        print(f"  C Q_q H_q^{i} B_q = {_fmt_matrix(wmat)}")
    if report.tolerance is not None:
        print(f"  (zero threshold {report.tolerance})")


def _causality_dict(report) -> dict:
    return {
        "state_input_causal": report.state_input_causal,
        "output_input_causal": report.output_input_causal,
        "criterion_state": _matrix_to_lists(report.criterion_state),
        "criteria_output": [_matrix_to_lists(m) for m in report.criteria_output],
        "nullspace_form": _matrix_to_lists(report.nullspace_form),
        "no_infinite_eigenvalues": report.no_infinite_eigenvalues,
        "tolerance": report.tolerance,
    }


def build_analysis_report(sf: SystemFile, args) -> AnalysisReport:
    pen, cp, w, sysm, tin = _analyze_parts(sf, args)
    rep = verify(pen, w, args.tol)
    cons = check_consistency(sysm, w, tin, sf.signal(), sf.Y0, rank_tol=args.tol)
    causality = causality_mod.build_report(sysm, w, tin, args.causality_tol)
    return AnalysisReport(
        regular=True,
        char_poly=cp.coefficients,
        p=w.p,
        q=w.q,
        q_star=w.q_star,
        jordan_blocks=w.jordan_blocks,
        nilpotent_blocks=w.nilpotent_blocks,
        verification=rep,
        consistency=cons,
        causality=causality,
    )


def print_analysis_report(report: AnalysisReport):
    _print_structure(report)
    cons = report.consistency
    if cons.consistent:
        print(f"consistency: consistent, Z^p_k0 = {_fmt_matrix(cons.z_p0)}")
    else:
        print("consistency: INCONSISTENT")
        print(f"  residual Y0 - Q_p Z^p - Q D_k0 = {_fmt_matrix(cons.residual)}")
    _print_causality(report.causality)


def cmd_analyze(args) -> int:
    sf = parse_system_file(args.file, _mode_override(args))
    report = build_analysis_report(sf, args)
    print_analysis_report(report)
    if args.out_json:
        with open(args.out_json, "w", encoding="utf-8") as fh:
            json.dump(analysis_report_to_dict(report), fh, indent=2)
            fh.write("\n")
        print(f"report written to {args.out_json}")
    return EXIT_OK if report.consistency.consistent else EXIT_INCONSISTENT


def _write_trajectory_csv(fh, traj, n: int, m: int, p: int, q: int):
    writer = csv.writer(fh, lineterminator="\n")
    header = (
        ["k"]
        + [f"Y_{i + 1}" for i in range(n)]
        + [f"X_{i + 1}" for i in range(m)]
        + [f"Zp_{i + 1}" for i in range(p)]
        + [f"Zq_{i + 1}" for i in range(q)]
    )
    writer.writerow(header)
    for idx in range(len(traj)):
        row = [str(traj.k0 + idx)]
        row += [format_scalar(x) for x in traj.states[idx].column_list()]
        row += [format_scalar(x) for x in traj.outputs[idx].column_list()]
        row += [format_scalar(x) for x in traj.z_p[idx].column_list()]
        row += [format_scalar(x) for x in traj.z_q[idx].column_list()]
        writer.writerow(row)


def cmd_solve(args) -> int:
    sf = parse_system_file(args.file, _mode_override(args))
    _, _, w, sysm, tin = _analyze_parts(sf, args)
    horizon_end = args.K if args.K is not None else sf.K
    signal = sf.signal()
    traj = solve(sysm, w, tin, signal, sf.Y0, horizon_end, rank_tol=args.tol)
    res = residual_oracle(sysm, signal, traj, sf.Y0)

    if args.out_csv:
        with open(args.out_csv, "w", encoding="utf-8", newline="") as fh:
            _write_trajectory_csv(fh, traj, sysm.n, sysm.m, w.p, w.q)
        out = sys.stdout
    else:
        _write_trajectory_csv(sys.stdout, traj, sysm.n, sysm.m, w.p, w.q)
        out = sys.stderr
    print(
        f"residual: max step residual {format_scalar_like(res.step_residual)}, "
        f"Y_k0 mismatch {format_scalar_like(res.y0_mismatch)}",
        file=out,
    )
    if args.out_csv:
        print(f"trajectory written to {args.out_csv}", file=out)
    return EXIT_OK


def cmd_causality(args) -> int:
    sf = parse_system_file(args.file, _mode_override(args))
    _, cp, w, sysm, tin = _analyze_parts(sf, args)
    report = causality_mod.build_report(sysm, w, tin, args.causality_tol)
    _print_causality(report)

    if args.oracle_trials:
        seed = int(os.environ.get("DKIT_SEED", "0"))
        horizon = max(w.q_star + 5, 8)
        disagreement = None
        for mode_name, expected in (
            ("state", report.state_input_causal),
            ("output", report.output_input_causal),
        ):
            outcome = causality_mod.brute_force_causality_oracle(
                sysm, w, tin, mode_name,
                horizon=horizon, trials=args.oracle_trials,
                seed=seed, tol=args.causality_tol,
            )
            agrees = outcome.causal == expected
            print(f"oracle ({mode_name}, {args.oracle_trials} trials): "
                  f"{'agrees' if agrees else 'DISAGREES'}")
            if not agrees:
                disagreement = (mode_name, expected, outcome)
        if disagreement:
            mode_name, expected, outcome = disagreement
            print(f"criteria said {'causal' if expected else 'non-causal'} for "
                  f"{mode_name} but the oracle found the opposite", file=sys.stderr)
            ce = outcome.counterexample
            if ce is not None:
                print(f"distinguishing pair (perturbed index {ce.perturbed_index}, "
                      f"diverged at k = {ce.diverged_at}):", file=sys.stderr)
                base = [[format_scalar(x) for x in v.column_list()]
                        for v in ce.base_signal.samples]
                pert = [[format_scalar(x) for x in v.column_list()]
                        for v in ce.perturbed_signal.samples]
                print(f"  U  = {base}", file=sys.stderr)
                print(f"  U' = {pert}", file=sys.stderr)
                print(f"  value under U  at k: {_fmt_matrix(ce.base_value)}",
                      file=sys.stderr)
                print(f"  value under U' at k: {_fmt_matrix(ce.perturbed_value)}",
                      file=sys.stderr)
            return EXIT_ORACLE_DISAGREES
    return EXIT_OK


def _mode_override(args) -> Mode | None:
    if args.mode is None:
        return None
    return Mode(args.mode)


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("file", help="system description file (JSON)")
    parser.add_argument("--mode", choices=["exact", "float"],
                        help="override the file's scalar mode")
    parser.add_argument("--tol", type=float, default=None,
                        help="float-mode zero/rank tolerance (relative, default 1e-9)")
    parser.add_argument("--cluster-tol", type=float, default=None, dest="cluster_tol",
                        help="float-mode eigenvalue clustering radius (default 1e-7)")
    parser.add_argument("--causality-tol", type=float, default=None, dest="causality_tol",
                        help="float-mode causality zero threshold (default 1e-8)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dkit",
        description="Analyze singular linear discrete-time systems "
                    "F Y_{k+1} = G Y_k + B V_k, X_k = C Y_k.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", help="canonical form, consistency, causality")
    _add_common(p_an)
    p_an.add_argument("--out-json", default=None, dest="out_json",
                      help="also write a machine-readable report")
    p_an.set_defaults(func=cmd_analyze)

    p_sv = sub.add_parser("solve", help="closed-form trajectory as CSV")
    _add_common(p_sv)
    p_sv.add_argument("--K", type=int, default=None,
                      help="solve horizon end (overrides the file's K)")
    p_sv.add_argument("--out-csv", default=None, dest="out_csv",
                      help="write the trajectory CSV here instead of stdout")
    p_sv.set_defaults(func=cmd_solve)

    p_ca = sub.add_parser("causality", help="causality verdicts and witnesses")
    _add_common(p_ca)
    p_ca.add_argument("--oracle-trials", type=int, default=0, dest="oracle_trials",
                      help="cross-check the criteria with N brute-force trials "
                           "(seeded by DKIT_SEED)")
    p_ca.set_defaults(func=cmd_causality)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except IrregularPencil as exc:
        print(f"irregular pencil: {exc}", file=sys.stderr)
        return EXIT_IRREGULAR
    except InconsistentInitialCondition as exc:
        print(f"inconsistent initial condition: {exc}", file=sys.stderr)
        if exc.residual is not None:
            print(f"  residual: {_fmt_matrix(exc.residual)}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except UnresolvableSpectrum as exc:
        print(f"unresolvable spectrum in exact mode: {exc}", file=sys.stderr)
        print("hint: retry with --mode float", file=sys.stderr)
        return EXIT_UNRESOLVABLE
    except InputHorizonTooShort as exc:
        print(f"input horizon too short: {exc}", file=sys.stderr)
        return EXIT_HORIZON
    except DkitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
