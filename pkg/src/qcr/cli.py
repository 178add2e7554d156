"""Command-line surface: model ingestion, dispatch, report emission.

Exit codes: 0 success (and checker-true), 1 checker-false, 2 input error,
3 solver unconverged. Reports go to stdout as text or, with --json, as a
deterministic JSON document; diagnostics go to stderr, with verbosity
selected by the QCR_LOG environment variable (error, info, debug).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time

import numpy as np

from .dual import SolverConfig, random_model_certificate, separation_oracle, solve_dual, spur
from .errors import QcrError, ValidationError
from .measurement import (
    covariance,
    frontier_witness_2d,
    optimal_random_bound,
    optimal_random_measurement,
    require_weight_matrix,
    sample_frontier,
    simulate,
)
from .model import StatisticalModel, build_model, builtin_model
from .operators import DensityOperator
from .randomness import is_random_model
from .serialize import (
    complex_matrix_to_lists,
    dumps_report,
    matrix_to_lists,
    vector_to_list,
    write_csv,
)

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_INPUT = 2
EXIT_UNCONVERGED = 3

FILE_HERMITIAN_TOL = 1e-9

log = logging.getLogger("qcr.cli")


def _parse_complex_matrix(node, dim: int, name: str) -> np.ndarray:
    if not isinstance(node, dict) or "re" not in node or "im" not in node:
        raise ValidationError(f"{name}: expected an object with 're' and 'im' matrices")
    re = np.asarray(node["re"], dtype=float)
    im = np.asarray(node["im"], dtype=float)
    if re.shape != (dim, dim) or im.shape != (dim, dim):
        raise ValidationError(f"{name}: expected {dim}x{dim} 're' and 'im' blocks")
    h = re + 1j * im
    if np.max(np.abs(h - h.conj().T)) > FILE_HERMITIAN_TOL:
        raise ValidationError(f"{name}: matrix is not Hermitian within {FILE_HERMITIAN_TOL:.0e}")
    return (h + h.conj().T) / 2.0


def load_model_file(path: str) -> StatisticalModel:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read model file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"model file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "dim" not in doc:
        raise ValidationError("model file: expected an object with 'dim', 'rho' and 'tangent'")
    dim = int(doc["dim"])
    rho = _parse_complex_matrix(doc.get("rho"), dim, "rho")
    tangent_nodes = doc.get("tangent")
    if not isinstance(tangent_nodes, list) or not tangent_nodes:
        raise ValidationError("model file: 'tangent' must be a nonempty list")
    tangents = [
        _parse_complex_matrix(node, dim, f"tangent[{i}]") for i, node in enumerate(tangent_nodes)
    ]
    return build_model(DensityOperator(rho), tangents)


def load_weight_file(path: str, n: int) -> np.ndarray:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read weight file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"weight file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "g" not in doc:
        raise ValidationError("weight file: expected an object with a 'g' matrix")
    return require_weight_matrix(np.asarray(doc["g"], dtype=float), n)


def _resolve_model(args) -> StatisticalModel:
    if args.model_file:
        if args.model:
            raise ValidationError("give either --model or --model-file, not both")
        return load_model_file(args.model_file)
    if not args.model:
        raise ValidationError("a model is required: --model NAME or --model-file PATH")
    if args.model == "qutrit-diagonal":
        if not args.probs:
            raise ValidationError("qutrit-diagonal needs --probs P1,P2,P3")
        probs = [float(p) for p in args.probs.split(",")]
        return builtin_model(args.model, probs=probs)
    if args.alpha is None:
        raise ValidationError(f"{args.model} needs --alpha")
    return builtin_model(args.model, alpha=args.alpha)


def _resolve_weight(args, model: StatisticalModel) -> np.ndarray:
    if getattr(args, "g_file", None):
        return load_weight_file(args.g_file, model.n)
    return np.eye(model.n)


def _model_summary(model: StatisticalModel) -> dict:
    return {
        "dim": model.dim,
        "n": model.n,
        "rho_eigenvalues": vector_to_list(np.linalg.eigvalsh(model.rho.matrix)),
        "fisher_eigenvalues": vector_to_list(np.linalg.eigvalsh(model.fisher)),
    }


def _emit(args, report: dict, text_lines: list[str]) -> None:
    if args.json:
        sys.stdout.write(dumps_report(report))
    else:
        for line in text_lines:
            print(line)


def _fmt_matrix(m: np.ndarray) -> str:
    return np.array2string(np.asarray(m), precision=10, suppress_small=True)


def cmd_info(args) -> int:
    start = time.perf_counter()
    model = _resolve_model(args)
    report = {
        "command": "info",
        "model": _model_summary(model),
        "results": {
            "fisher": matrix_to_lists(model.fisher),
            "fisher_inverse": matrix_to_lists(model.fisher_inverse),
        },
        "status": "ok",
        "wall_time_s": time.perf_counter() - start,
    }
    _emit(args, report, [
        f"dim = {model.dim}, n = {model.n}",
        f"rho eigenvalues: {np.linalg.eigvalsh(model.rho.matrix)}",
        "fisher matrix J:",
        _fmt_matrix(model.fisher),
        "inverse J:",
        _fmt_matrix(model.fisher_inverse),
    ])
    return EXIT_OK


def cmd_bound(args) -> int:
    start = time.perf_counter()
    model = _resolve_model(args)
    g = _resolve_weight(args, model)
    bound = optimal_random_bound(model, g)
    classical = float(np.trace(g @ model.fisher_inverse))
    report = {
        "command": "bound",
        "model": _model_summary(model),
        "results": {
            "random_bound": bound,
            "classical_bound": classical,
            "gap": bound - classical,
        },
        "status": "ok",
        "wall_time_s": time.perf_counter() - start,
    }
    _emit(args, report, [
        f"random-measurement bound : {bound:.12g}",
        f"classical reference      : {classical:.12g}",
        f"gap                      : {bound - classical:.12g}",
    ])
    return EXIT_OK


def cmd_dual(args) -> int:
    start = time.perf_counter()
    model = _resolve_model(args)
    g = _resolve_weight(args, model)
    kwargs = {"seed": args.seed if args.seed is not None else 0}
    if args.tol is not None:
        kwargs["feas_tol"] = args.tol
        kwargs["obj_tol"] = args.tol
    if args.max_rounds is not None:
        kwargs["max_rounds"] = args.max_rounds
    config = SolverConfig(**kwargs)
    res = solve_dual(model, g, config)
    results = {
        "optimum": res.optimum,
        "lp_value": res.lp_value,
        "rounds": res.rounds,
        "n_cuts": len(res.cuts),
        "feasibility_residual": res.feasibility,
        "solver_status": res.status,
        "dual_a": matrix_to_lists(res.dual.a),
        "dual_s": complex_matrix_to_lists(res.dual.s),
    }
    text = [
        f"dual optimum        : {res.optimum:.12g}",
        f"lp relaxation value : {res.lp_value:.12g}",
        f"rounds / cuts       : {res.rounds} / {len(res.cuts)}",
        f"feasibility residual: {res.feasibility:.3e}",
        f"status              : {res.status}",
    ]
    if args.certify:
        ran = is_random_model(model)
        if ran:
            cert = random_model_certificate(model, g)
            cert_feas = separation_oracle(model, g, cert, config)
            results["certificate"] = {
                "applicable": True,
                "spur": spur(model, cert),
                "feasibility_residual": cert_feas.min_value,
            }
            text.append(f"certificate spur    : {spur(model, cert):.12g} "
                        f"(residual {cert_feas.min_value:.3e})")
        else:
            results["certificate"] = {"applicable": False, "witness_score": ran.score}
            text.append("certificate         : not applicable (randomness condition fails)")
    report = {
        "command": "dual",
        "model": _model_summary(model),
        "seed": kwargs["seed"],
        "results": results,
        "status": "ok" if res.status == "converged" else "unconverged",
        "wall_time_s": time.perf_counter() - start,
    }
    _emit(args, report, text)
    return EXIT_OK if res.status == "converged" else EXIT_UNCONVERGED


def cmd_check_random(args) -> int:
    start = time.perf_counter()
    model = _resolve_model(args)
    rep = is_random_model(model)
    results = {"verdict": rep.verdict, "score": rep.score}
    if rep.verdict:
        results["constant"] = complex_matrix_to_lists(rep.constant)
    else:
        results["witness"] = list(rep.witness)
    report = {
        "command": "check-random",
        "model": _model_summary(model),
        "results": results,
        "status": "true" if rep.verdict else "false",
        "wall_time_s": time.perf_counter() - start,
    }
    text = [f"random model: {rep.verdict} (score {rep.score:.3e})"]
    if rep.verdict:
        text.append("constant block C:")
        text.append(_fmt_matrix(rep.constant))
    else:
        text.append(f"witness block: {rep.witness}")
    _emit(args, report, text)
    return EXIT_OK if rep.verdict else EXIT_FALSE


def _resolve_seed(args, command: str) -> int:
    # reproducible reports: JSON mode refuses to pick a seed silently
    if args.seed is None:
        if args.json:
            raise ValidationError(f"{command} needs an explicit --seed with --json")
        return 0
    return args.seed


def cmd_limitset(args) -> int:
    start = time.perf_counter()
    model = _resolve_model(args)
    if args.samples is None or args.samples < 1:
        raise ValidationError("limitset needs --samples >= 1")
    args.seed = _resolve_seed(args, "limitset")
    samples = sample_frontier(model, args.samples, args.seed)
    n = model.n
    header = [f"V{i}{j}" for i in range(n) for j in range(n)] + ["min_eig_vs_inverse_fisher"]
    if n == 2:
        header.append("det_witness")
    rows = []
    min_eigs = []
    dets = []
    for v in samples:
        row = [float(x) for x in v.ravel()]
        me = float(np.linalg.eigvalsh(v - model.fisher_inverse)[0])
        min_eigs.append(me)
        row.append(me)
        if n == 2:
            det = frontier_witness_2d(model, v).det
            dets.append(det)
            row.append(det)
        rows.append(row)
    if args.csv:
        try:
            write_csv(args.csv, header, rows)
        except OSError as exc:
            raise ValidationError(f"cannot write CSV to {args.csv}: {exc}") from exc
    results = {
        "samples": args.samples,
        "csv": args.csv,
        "min_eig_worst": min(min_eigs),
    }
    if n == 2:
        results["det_witness_max_error"] = max(abs(d - 1.0) for d in dets)
    report = {
        "command": "limitset",
        "model": _model_summary(model),
        "seed": args.seed,
        "results": results,
        "status": "ok",
        "wall_time_s": time.perf_counter() - start,
    }
    text = [
        f"sampled {args.samples} frontier covariances (seed {args.seed})",
        f"worst min-eig of V - J^-1: {min(min_eigs):.3e}",
    ]
    if n == 2:
        text.append(f"max |det witness - 1|: {results['det_witness_max_error']:.3e}")
    if args.csv:
        text.append(f"csv written to {args.csv}")
    _emit(args, report, text)
    return EXIT_OK


def cmd_simulate(args) -> int:
    start = time.perf_counter()
    model = _resolve_model(args)
    g = _resolve_weight(args, model)
    if args.samples is None or args.samples < 1:
        raise ValidationError("simulate needs --samples >= 1")
    args.seed = _resolve_seed(args, "simulate")
    p = optimal_random_measurement(model, g)
    sim = simulate(model, p, args.samples, args.seed, weight=g)
    theory_cov = covariance(model, p)
    theory_dev = float(np.trace(g @ theory_cov))
    se_mean = np.sqrt(np.diag(sim.cov) / sim.n_samples)
    emp_dev = float(np.trace(g @ sim.cov))
    results = {
        "samples": sim.n_samples,
        "empirical_mean": vector_to_list(sim.mean),
        "mean_standard_errors": vector_to_list(se_mean),
        "empirical_cov": matrix_to_lists(sim.cov),
        "empirical_deviation": emp_dev,
        "deviation_standard_error": sim.quad_se,
        "theory_deviation": theory_dev,
        "wide_uncertainty": bool(sim.n_samples < 100),
    }
    report = {
        "command": "simulate",
        "model": _model_summary(model),
        "seed": args.seed,
        "results": results,
        "status": "ok",
        "wall_time_s": time.perf_counter() - start,
    }
    text = [
        f"samples: {sim.n_samples}",
        f"empirical mean    : {np.array2string(sim.mean, precision=6)}",
        f"mean standard err : {np.array2string(se_mean, precision=6)}",
        f"empirical tr(G V) : {emp_dev:.6g} +- {sim.quad_se:.3g}",
        f"theoretical tr(G V): {theory_dev:.6g}",
    ]
    if results["wide_uncertainty"]:
        text.append("warning: sample count is tiny, uncertainty is wide")
    _emit(args, report, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--model", choices=["qubit-full", "qubit-equatorial", "qutrit-diagonal"])
    common.add_argument("--alpha", type=float)
    common.add_argument("--probs", help="comma-separated probabilities for qutrit-diagonal")
    common.add_argument("--model-file")
    common.add_argument("--g-file")
    common.add_argument("--json", action="store_true")
    common.add_argument("--csv")
    common.add_argument("--tol", type=float)
    common.add_argument("--seed", type=int)
    common.add_argument("--samples", type=int)

    parser = argparse.ArgumentParser(
        prog="qcr",
        description="Attainable covariance bounds for finite-dimensional quantum models",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("info", parents=[common]).set_defaults(func=cmd_info)
    sub.add_parser("bound", parents=[common]).set_defaults(func=cmd_bound)
    dual = sub.add_parser("dual", parents=[common])
    dual.add_argument("--certify", action="store_true")
    dual.add_argument("--max-rounds", type=int)
    dual.set_defaults(func=cmd_dual)
    sub.add_parser("check-random", parents=[common]).set_defaults(func=cmd_check_random)
    sub.add_parser("limitset", parents=[common]).set_defaults(func=cmd_limitset)
    sub.add_parser("simulate", parents=[common]).set_defaults(func=cmd_simulate)
    return parser


def _configure_logging() -> None:
    level = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("QCR_LOG", "error").lower(), logging.ERROR
    )
    logging.basicConfig(stream=sys.stderr, level=level,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except QcrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
