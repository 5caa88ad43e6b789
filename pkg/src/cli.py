import argparse
import logging
import os
import sys
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

import joblib
import pandas as pd

from .catalog import DEFAULT_RUN, build_entry, ledger_frame, list_entries, pairwise_comparison, parse_params, run_catalog, run_expected_checks
from .config import BACKENDS, DEFAULT_BACKEND, DEFAULT_MAX_DEGREE, DEFAULT_SEED, DEFAULT_TOL, Paths, RunConfig
from .endo_cones import EndoCone, endocone_report
from .errors import AnalysisError, InputError
from .hol_solver import assemble_hol, graded_profile, isotropy_dimension, verify_termination
from .lie_analysis import analyze, compare_algebras
from .nondegeneracy import kernel_chain, levi_kernel, nondegeneracy_order
from .numeric_kernel import Matrix, format_scalar, parse_scalar
from .presentations import (
    OrbitPresentation,
    Presentation,
    is_conical,
    levi_form,
    load_presentation,
    minimality_report,
    second_fundamental_form,
    tangent_space,
)
from .utils import build_report, dumps_report, ensure_dir, load_json, setup_logging


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2


def _analyze(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    p = load_presentation(config.inputs[0], config.tol)
    sf = second_fundamental_form(p)
    payload: Dict[str, Any] = {
        "presentation": p.to_dict(),
        "dimension": p.dimension,
        "tangent_space": [[format_scalar(x) for x in v] for v in tangent_space(p)],
        "second_fundamental_form": sf.to_dict(),
        "levi_kernel_dim": len(levi_kernel(p)),
        "levi_form_kernel_dim": levi_form(p).kernel_dimension(),
        "conical": is_conical(p, seed=config.seed),
        "minimality": minimality_report(p, seed=config.seed).to_dict(),
        "nondegeneracy": nondegeneracy_order(p, max_k=config.max_k, seed=config.seed).to_dict(),
    }
    if isinstance(p, OrbitPresentation):
        payload["kernel_chain"] = kernel_chain(p, max_k=config.max_k).to_dict()
    return EXIT_OK, payload


def _hol(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    p = load_presentation(config.inputs[0], config.tol)
    G = assemble_hol(p, config.max_degree, config.backend, config.tol, config.seed, config.max_k)
    payload: Dict[str, Any] = {
        "hol": G.to_dict(),
        "invariants": analyze(G).to_dict(),
        "isotropy": isotropy_dimension(G, p).to_dict(),
        "graded_profile": graded_profile(G),
    }
    if config.params.get("verify_termination"):
        payload["termination_check"] = verify_termination(p, G, config.tol, config.seed)
    save = config.params.get("save")
    if save:
        joblib.dump(G, save)
        logger.info("saved algebra to %s", save)
    return EXIT_OK, payload


def _hol_for(path: str, config: RunConfig) -> Tuple[Presentation, Any]:
    p = load_presentation(path, config.tol)
    return p, assemble_hol(p, config.max_degree, config.backend, config.tol, config.seed, config.max_k)


def _compare(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    if len(config.inputs) != 2:
        raise InputError("compare takes exactly two presentation files")
    reports = [analyze(_hol_for(path, config)[1]) for path in config.inputs]
    verdict = compare_algebras(reports[0], reports[1])
    return EXIT_OK, {
        "inputs": list(config.inputs),
        "invariants": [r.to_dict() for r in reports],
        "comparison": verdict.to_dict(),
    }


def _endocone(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    data = load_json(config.inputs[0])
    if not isinstance(data, dict) or not isinstance(data.get("phi"), list):
        raise InputError("endocone input needs a 'phi' matrix")
    phi_rows = [[parse_scalar(x) for x in row] for row in data["phi"]]
    mode = "exact" if all(not isinstance(x, float) for row in phi_rows for x in row) else "numeric"
    phi = Matrix.build(phi_rows, mode)
    d = config.params.get("d") or data.get("d", 1)
    a_raw = config.params.get("a") or data.get("a")
    if a_raw is None:
        raise InputError("endocone input needs a base vector 'a'")
    a = [parse_scalar(x) for x in (a_raw.split(",") if isinstance(a_raw, str) else a_raw)]
    d_value = parse_scalar(d) if isinstance(d, (int, float, str)) else None
    if not isinstance(d_value, Fraction) or d_value.denominator != 1:
        raise InputError(f"endocone 'd' must be an integer, got {d!r}")
    ec = EndoCone(phi, int(d_value), tuple(a))
    return EXIT_OK, {"endocone": endocone_report(ec)}


def _catalog(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    action = config.params.get("action")
    if action == "list":
        return EXIT_OK, {"entries": list_entries().to_dict(orient="records")}
    if action == "run":
        entry = build_entry(config.params["name"], parse_params(config.params.get("entry_params")))
        results = [run_expected_checks(entry, config.backend, config.tol, config.seed, config.max_degree)]
    else:
        results = run_catalog(DEFAULT_RUN, config.backend, config.tol, config.seed, config.max_degree, config.n_jobs)
    ledger = ledger_frame(results)
    payload: Dict[str, Any] = {
        "ledger": ledger.to_dict(orient="records"),
        "reports": {r.label: r.report for r in results},
        "passed": all(r.passed for r in results),
    }
    if action == "run-all":
        payload["comparisons"] = pairwise_comparison(results).to_dict(orient="records")
    return (EXIT_OK if payload["passed"] else EXIT_CHECK_FAILED), payload


COMMANDS = {
    "analyze": _analyze,
    "hol": _hol,
    "compare": _compare,
    "endocone": _endocone,
    "catalog": _catalog,
}


def run(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    """Execute one command; AnalysisError becomes exit code 2 with a module-qualified message."""
    try:
        code, payload = COMMANDS[config.command](config)
    except AnalysisError as exc:
        logger.warning("%s", exc.qualified())
        return EXIT_INPUT, build_report({"error": exc.qualified()}, config.as_dict())
    return code, build_report(payload, config.as_dict())


def render_text(report: Dict[str, Any]) -> str:
    if "ledger" in report:
        lines = [pd.DataFrame(report["ledger"]).to_string(index=False)]
        if report.get("comparisons"):
            lines.append(pd.DataFrame(report["comparisons"]).to_string(index=False))
        lines.append(f"passed: {report['passed']}")
        return "\n\n".join(lines)
    if "entries" in report:
        return pd.DataFrame(report["entries"]).to_string(index=False)
    skip = {"config", "schema_version", "presentation", "hol"}
    lines = []
    for key, value in report.items():
        if key in skip:
            continue
        lines.append(f"{key}: {value}")
    return "\n".join(lines)


def write_report(report: Dict[str, Any], out: str) -> str:
    """Write the JSON report; bare file names go to the reports directory."""
    path = out if os.path.dirname(out) else os.path.join(Paths().reports_dir, out)
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    with open(path, "w") as f:
        f.write(dumps_report(report))
    logger.info("wrote report to %s", path)
    return path


def _add_common(parser: argparse.ArgumentParser) -> None:
    _ = parser.add_argument("--backend", default=DEFAULT_BACKEND, choices=BACKENDS)
    _ = parser.add_argument("--tol", type=float, default=DEFAULT_TOL)
    _ = parser.add_argument("--max-degree", type=int, default=DEFAULT_MAX_DEGREE)
    _ = parser.add_argument("--max-k", type=int, default=None)
    _ = parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _ = parser.add_argument("--json", action="store_true", help="print the JSON report")
    _ = parser.add_argument("--out", default=None, help="also write the JSON report to this file")
    _ = parser.add_argument("--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="python -m src.cli", description="CR structure of tubes over cones")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze_p = sub.add_parser("analyze", help="tangent space, Levi form, minimality, nondegeneracy order")
    _ = analyze_p.add_argument("presentation")
    _add_common(analyze_p)

    hol_p = sub.add_parser("hol", help="assemble the graded algebra of infinitesimal automorphisms")
    _ = hol_p.add_argument("presentation")
    _ = hol_p.add_argument("--save", default=None, help="joblib file for the assembled algebra")
    _ = hol_p.add_argument("--verify-termination", action="store_true")
    _add_common(hol_p)

    compare_p = sub.add_parser("compare", help="compare the invariants of two algebras")
    _ = compare_p.add_argument("first")
    _ = compare_p.add_argument("second")
    _add_common(compare_p)

    endo_p = sub.add_parser("endocone", help="cones generated by powers of one endomorphism")
    _ = endo_p.add_argument("phi", help="JSON file with 'phi', optional 'd' and 'a'")
    _ = endo_p.add_argument("--d", type=int, default=None)
    _ = endo_p.add_argument("--a", default=None, help="comma separated base vector")
    _add_common(endo_p)

    cat_p = sub.add_parser("catalog", help="built-in examples and their expected invariants")
    _ = cat_p.add_argument("action", choices=("list", "run", "run-all"))
    _ = cat_p.add_argument("name", nargs="?", default=None)
    _ = cat_p.add_argument("--params", default=None, help='e.g. "alpha=-2" or "p=2,q=1,alpha=3"')
    _ = cat_p.add_argument("--n-jobs", type=int, default=1)
    _add_common(cat_p)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    params: Dict[str, Any] = {"out": args.out}
    inputs: List[str] = []
    if args.command in ("analyze", "hol"):
        inputs = [args.presentation]
    if args.command == "hol":
        params.update({"save": args.save, "verify_termination": args.verify_termination})
    if args.command == "compare":
        inputs = [args.first, args.second]
    if args.command == "endocone":
        inputs = [args.phi]
        params.update({"d": args.d, "a": args.a})
    if args.command == "catalog":
        if args.action == "run" and not args.name:
            raise InputError("catalog run needs an entry name")
        params.update({"action": args.action, "name": args.name, "entry_params": args.params})
    return RunConfig(
        command=args.command,
        inputs=inputs,
        backend=args.backend,
        tol=args.tol,
        max_degree=args.max_degree,
        max_k=args.max_k,
        seed=args.seed,
        output_format="json" if args.json else "text",
        n_jobs=getattr(args, "n_jobs", 1),
        params=params,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose)
    try:
        config = config_from_args(args)
    except InputError as exc:
        print(exc.qualified(), file=sys.stderr)
        return EXIT_INPUT
    code, report = run(config)
    if "error" in report:
        print(report["error"], file=sys.stderr)
    print(dumps_report(report) if config.output_format == "json" else render_text(report))
    if config.params.get("out"):
        _ = write_report(report, config.params["out"])
    return code


if __name__ == "__main__":
    raise SystemExit(main())
