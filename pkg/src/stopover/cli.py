"""Command-line interface.

Subcommands cover the full workflow: ``simulate`` writes a history file plus
a truth sidecar, ``fit``/``bootstrap``/``select`` write paired human-readable
(``.txt``) and machine-readable (``.json``) result files that echo their full
configuration, ``loglik`` evaluates the likelihood at supplied parameters and
``oracle-check`` compares the matrix-product likelihood against exhaustive
enumeration on tiny designs.  Every command is deterministic given its seed.

Exit codes: 0 success, 2 parse/input error, 3 non-convergence.
"""

import argparse
import sys

import numpy as np

from . import __version__
from .bruteforce import brute_force_likelihood
from .design import StudyDesign
from .errors import ConstraintError, ParseError, StructureError
from .fileio import (
    format_header,
    format_table,
    parse_design_file,
    parse_history_file,
    read_params_json,
    write_history_file,
    write_json,
    write_params_json,
)
from .fitting import OptimizerConfig, bootstrap, derived_abundance, fit, report_rows, step_up_selection
from .hmm import log_likelihood, primary_likelihood
from .params import params_to_dict
from .simulate import random_parameters, reference_scenario, simulate
from .structure import named_structure

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_NOCONV = 3


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ParseError, ConstraintError, StructureError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="stopover",
        description="Simulate and fit multi-state multi-period stopover capture-recapture models.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(required=True)

    sim = sub.add_parser("simulate", help="generate a dataset from a parameter set")
    sim.add_argument("--paper-scenario", type=int, choices=(100, 1000), default=None,
                     help="use the built-in benchmark scenario with this population size")
    sim.add_argument("--design", help="design file (header line) for custom simulations")
    sim.add_argument("--params", help="natural-scale parameter JSON for custom simulations")
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--out", required=True, help="history file to write")
    sim.add_argument("--truth-out", default=None, help="truth sidecar path (default OUT.truth.json)")
    sim.set_defaults(handler=_cmd_simulate)

    fit_p = sub.add_parser("fit", help="maximum-likelihood fit")
    _add_fit_options(fit_p)
    fit_p.set_defaults(handler=_cmd_fit)

    boot = sub.add_parser("bootstrap", help="nonparametric bootstrap intervals")
    _add_fit_options(boot)
    boot.add_argument("--replicates", type=int, required=True, help="number of bootstrap replicates")
    boot.set_defaults(handler=_cmd_bootstrap)

    sel = sub.add_parser("select", help="step-up AIC model search")
    sel.add_argument("--data", required=True)
    sel.add_argument("--base", default="constant", help="base structure (alias or grammar)")
    sel.add_argument("--moves", required=True,
                     help="semicolon-separated dependency additions, e.g. 'r=year;p=year*state'")
    sel.add_argument("--seed", type=int, default=0)
    sel.add_argument("--starts", type=int, default=10)
    sel.add_argument("--out", required=True)
    sel.set_defaults(handler=_cmd_select)

    ll = sub.add_parser("loglik", help="evaluate the log-likelihood at given parameters")
    ll.add_argument("--data", required=True)
    ll.add_argument("--params", required=True, help="natural-scale parameter JSON")
    ll.add_argument("--out", default=None)
    ll.set_defaults(handler=_cmd_loglik)

    oc = sub.add_parser("oracle-check", help="compare the HMM likelihood with brute-force enumeration")
    oc.add_argument("--trials", type=int, default=200)
    oc.add_argument("--seed", type=int, default=0)
    oc.add_argument("--tol", type=float, default=1e-10)
    oc.add_argument("--out", default=None)
    oc.set_defaults(handler=_cmd_oracle_check)

    return parser


def _add_fit_options(p):
    p.add_argument("--data", required=True, help="history file")
    p.add_argument("--structure", default="constant",
                   help="model structure: grammar string or alias 'constant'/'generating'")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--starts", type=int, default=10)
    p.add_argument("--maxiter", type=int, default=500)
    p.add_argument("--out", required=True, help="output prefix (writes PREFIX.txt and PREFIX.json)")


def _config_from_args(args):
    return OptimizerConfig(seed=args.seed, starts=args.starts, maxiter=args.maxiter)


def _cmd_simulate(args):
    if args.paper_scenario is not None:
        if args.design or args.params:
            raise ConstraintError("--paper-scenario replaces --design/--params")
        params, design = reference_scenario(args.paper_scenario)
    else:
        if not (args.design and args.params):
            raise ConstraintError("simulate needs --paper-scenario or both --design and --params")
        design = parse_design_file(args.design)
        params = read_params_json(args.params, design)
    dataset, truth = simulate(params, design, args.seed)
    comment = f"simulated dataset; seed={args.seed}; N={int(params.N)}; n={dataset.n}"
    write_history_file(args.out, dataset, comment=comment)
    truth_path = args.truth_out or args.out + ".truth.json"
    write_json(
        truth_path,
        {
            "command": "simulate",
            "seed": args.seed,
            "design": format_header(design),
            "N": params.N,
            "n_observed": dataset.n,
            "realized_abundance": list(truth.realized_abundance),
            "params": params_to_dict(params),
        },
    )
    print(f"wrote {args.out} (n={dataset.n} observed, {dataset.J} unique histories) and {truth_path}")
    return EXIT_OK


def _fit_payload(result, dataset, config, seed):
    design = dataset.design
    return {
        "structure": result.structure.to_text(),
        "n_params": result.n_params,
        "design": format_header(design),
        "n_observed": dataset.n,
        "unique_histories": dataset.J,
        "seed": seed,
        "optimizer": {
            "method": config.method,
            "starts": config.starts,
            "jitter": config.jitter,
            "maxiter": config.maxiter,
            "gtol": config.gtol,
        },
        "loglik": result.loglik,
        "aic": result.aic,
        "converged": result.converged,
        "diagnostics": result.diagnostics,
        "theta": result.theta,
        "params": params_to_dict(result.params),
        "derived_abundance": derived_abundance(result),
    }


def _cmd_fit(args):
    dataset = parse_history_file(args.data)
    structure = named_structure(args.structure)
    config = _config_from_args(args)
    result = fit(dataset, structure, config=config)
    payload = _fit_payload(result, dataset, config, args.seed)
    payload["command"] = "fit"
    payload["report"] = report_rows(result)
    write_json(args.out + ".json", payload)
    columns = ["parameter", "year", "occasion", "state", "age", "estimate"]
    with open(args.out + ".txt", "w", encoding="utf-8") as fh:
        fh.write(f"structure: {result.structure.to_text()}\n")
        fh.write(f"n = {dataset.n}, unique histories = {dataset.J}\n")
        fh.write(f"loglik = {result.loglik!r}\n")
        fh.write(f"AIC = {result.aic!r} (k = {result.n_params})\n")
        fh.write(f"converged = {result.converged}\n")
        if result.boundary_params:
            fh.write(f"boundary estimates: {', '.join(result.boundary_params)}\n")
        fh.write("\n")
        fh.write(format_table(report_rows(result), columns))
    print(f"loglik = {result.loglik:.6f}  AIC = {result.aic:.6f}  converged = {result.converged}")
    print(f"wrote {args.out}.txt and {args.out}.json")
    return EXIT_OK if result.converged else EXIT_NOCONV


def _cmd_bootstrap(args):
    dataset = parse_history_file(args.data)
    structure = named_structure(args.structure)
    config = _config_from_args(args)
    boot = bootstrap(dataset, structure, B=args.replicates, seed=args.seed, config=config)
    rows = []
    for i, row in enumerate(boot.rows):
        merged = dict(row)
        merged["se"] = float(boot.se[i]) if np.isfinite(boot.se[i]) else None
        merged["ci_low"] = float(boot.ci_low[i]) if np.isfinite(boot.ci_low[i]) else None
        merged["ci_high"] = float(boot.ci_high[i]) if np.isfinite(boot.ci_high[i]) else None
        est, se = row["estimate"], merged["se"]
        merged["summary"] = f"{est:.3g} (SE {se:.3g})" if se is not None else f"{est:.3g} (SE n/a)"
        rows.append(merged)
    payload = _fit_payload(boot.base_fit, dataset, config, args.seed)
    payload["command"] = "bootstrap"
    payload["replicates"] = boot.B
    payload["replicates_failed"] = boot.n_failed
    payload["report"] = rows
    write_json(args.out + ".json", payload)
    columns = ["parameter", "year", "occasion", "state", "age", "estimate", "se", "ci_low", "ci_high", "summary"]
    with open(args.out + ".txt", "w", encoding="utf-8") as fh:
        fh.write(f"structure: {boot.base_fit.structure.to_text()}\n")
        fh.write(f"bootstrap replicates = {boot.B} (failed: {boot.n_failed})\n")
        fh.write(f"loglik = {boot.base_fit.loglik!r}, AIC = {boot.base_fit.aic!r}\n\n")
        fh.write(format_table(rows, columns))
    print(f"bootstrap done: {boot.B} replicates, {boot.n_failed} failed")
    print(f"wrote {args.out}.txt and {args.out}.json")
    return EXIT_OK if boot.base_fit.converged else EXIT_NOCONV


def _cmd_select(args):
    dataset = parse_history_file(args.data)
    base = named_structure(args.base)
    moves = [m.strip() for m in args.moves.split(";") if m.strip()]
    config = OptimizerConfig(seed=args.seed, starts=args.starts)
    sel = step_up_selection(dataset, moves, base, config=config)
    payload = {
        "command": "select",
        "seed": args.seed,
        "base": base.to_text(),
        "moves": moves,
        "best_structure": sel.best_structure.to_text(),
        "best_aic": sel.best_fit.aic,
        "best_loglik": sel.best_fit.loglik,
        "trace": sel.trace,
        "optimizer": {"starts": config.starts, "method": config.method},
    }
    write_json(args.out + ".json", payload)
    columns = ["round", "move", "aic", "loglik", "n_params", "converged", "accepted", "note"]
    with open(args.out + ".txt", "w", encoding="utf-8") as fh:
        fh.write(f"base: {base.to_text()}\n")
        fh.write(f"selected: {sel.best_structure.to_text()}\n")
        fh.write(f"AIC = {sel.best_fit.aic!r}\n\n")
        fh.write(format_table(sel.trace, columns))
    print(f"selected: {sel.best_structure.to_text()} (AIC {sel.best_fit.aic:.4f})")
    print(f"wrote {args.out}.txt and {args.out}.json")
    return EXIT_OK if sel.best_fit.converged else EXIT_NOCONV


def _cmd_loglik(args):
    dataset = parse_history_file(args.data)
    params = read_params_json(args.params, dataset.design)
    value = log_likelihood(dataset, params)
    print(f"loglik = {value!r}")
    if args.out:
        write_json(args.out, {"command": "loglik", "loglik": value, "n_observed": dataset.n})
    return EXIT_OK


def _cmd_oracle_check(args):
    rng = np.random.default_rng(args.seed)
    design = StudyDesign(T=2, K=(2, 2), G=2)
    worst = 0.0
    for _ in range(args.trials):
        params = random_parameters(design, rng)
        history = rng.integers(0, design.G + 1, size=design.total_occasions)
        hmm_value = primary_likelihood(history, params)
        brute = brute_force_likelihood(history, params)
        worst = max(worst, float(abs(hmm_value - brute)))
    ok = bool(worst < args.tol)
    print(f"oracle-check: {args.trials} trials, max |HMM - brute force| = {worst:.3e} "
          f"({'OK' if ok else 'FAIL'} at tol {args.tol:g})")
    if args.out:
        write_json(args.out, {
            "command": "oracle-check",
            "trials": args.trials,
            "seed": args.seed,
            "max_abs_deviation": worst,
            "tol": args.tol,
            "ok": ok,
        })
    return EXIT_OK if ok else 1


if __name__ == "__main__":
    sys.exit(main())
