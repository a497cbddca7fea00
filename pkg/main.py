#!/usr/bin/env python
# -*- coding: utf-8 -*-
import argparse
import logging
import os
import sys

from model.circuit.circuit import Observable
from source.config import MEAN_MODES, MIDDLE, OBSERVABLES, ExperimentConfig
from source.console_report import ConsoleReport
from source.experiment_runner import ExperimentRunner, loglog_dimension_fit
from source.results_writer import FORMATS, format_float, render, write_records
from source.theory import boundary_layer_variance, chebyshev_bound, corollary1_variance, theorem1_variance
from source.verification import MEAN_GRADIENT_SAMPLES, run_gradcheck, run_lemma_suite
from utils.errors import FitError, QuditError

QUDIT_SWEEP_DEFAULTS = ExperimentConfig(template="A", n_values=(2, 3, 4, 5, 6), d_prime_values=(2, 3),
                                        L_values=(10,))


def int_list(text):
    try:
        values = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated integer list, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("list must not be empty")
    return values


def param_index(text):
    if text == MIDDLE:
        return MIDDLE
    values = int_list(text)
    if len(values) != 2:
        raise argparse.ArgumentTypeError(f"expected q,p or {MIDDLE!r}, got {text!r}")
    return values


def get_args(argv=None):
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true")

    parser = argparse.ArgumentParser(description="Qudit circuit gradient-variance experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("sweep-dim", "sweep-qudits"):
        p = sub.add_parser(name, parents=[common])
        p.add_argument("--config", help="JSON file with ExperimentConfig fields")
        p.add_argument("--ansatz", dest="template")
        p.add_argument("--n", dest="n_values", type=int_list)
        p.add_argument("--dims", dest="d_prime_values", type=int_list)
        p.add_argument("--layers", dest="L_values", type=int_list)
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)
        p.add_argument("--mean-mode", dest="mean_mode", choices=MEAN_MODES)
        p.add_argument("--observable", choices=OBSERVABLES)
        p.add_argument("--param-index", dest="param_index", type=param_index, help="q,p or 'middle'")
        p.add_argument("--out", help="output file (stdout when omitted)")
        p.add_argument("--format", choices=FORMATS)

    p = sub.add_parser("verify-lemmas", parents=[common])
    p.add_argument("--dims", type=int_list, default=(2, 3, 4))
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--tuples", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bands", type=float, default=3.0)
    p.add_argument("--gradient-samples", dest="gradient_samples", type=int, default=MEAN_GRADIENT_SAMPLES,
                   help="circuits for the mean-gradient rows (0 skips them)")

    p = sub.add_parser("gradcheck", parents=[common])
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step", type=float, default=1e-5)
    p.add_argument("--tol", type=float, default=1e-6)

    p = sub.add_parser("theory", parents=[common])
    p.add_argument("--n", type=int_list, required=True)
    p.add_argument("--dim", "--dims", dest="dims", type=int_list, required=True)
    p.add_argument("--observable", choices=OBSERVABLES, default="zero_projector")
    p.add_argument("--delta", type=float, help="also print the Chebyshev tail bound at this delta")

    return parser.parse_args(argv)


def _experiment_config(args, base):
    config = ExperimentConfig.from_json(args.config) if args.config else base
    return config.with_overrides(
        template=args.template, n_values=args.n_values, d_prime_values=args.d_prime_values,
        L_values=args.L_values, samples=args.samples, seed=args.seed, threads=args.threads,
        mean_mode=args.mean_mode, observable=args.observable, param_index=args.param_index,
    )


def _output_format(args):
    if args.format:
        return args.format
    if args.out and os.path.splitext(args.out)[1].lower() == ".json":
        return "json"
    return "csv"


def _emit(args, records, config, fits=(), extra=None):
    fmt = _output_format(args)
    if args.out:
        write_records(args.out, records, fmt, config, fits, extra)
    else:
        sys.stdout.write(render(records, fmt, config, fits, extra))


def _predictions(config):
    rows = []
    for n in config.n_values:
        for d in config.d_prime_values:
            observable = config.make_observable(n, d)
            rows.append({"n": n, "d_prime": d,
                         "theory_var": theorem1_variance(observable, n, d).variance,
                         "boundary_layer_var": boundary_layer_variance(observable, n, d)})
    return rows


def run_sweep(args, report, qudits=False):
    config = _experiment_config(args, QUDIT_SWEEP_DEFAULTS if qudits else ExperimentConfig())
    runner = ExperimentRunner(config)
    report.log_message(f"{args.command}: ansatz {config.template}, n {list(config.n_values)}, "
                       f"d' {list(config.d_prime_values)}, L {list(config.L_values)}, "
                       f"{config.samples} samples, seed {config.seed}")
    if qudits:
        records, fits = runner.sweep_qudits()
    else:
        records = runner.sweep_dimension()
        fits = []
        for n in config.n_values:
            for L in config.L_values:
                cell = [r for r in records if r.n == n and r.L == L]
                try:
                    fits.append(loglog_dimension_fit(cell)[0])
                except FitError as e:
                    report.log_message(f"no log-log fit for n={n} L={L}: {e}")
    report.drain(runner.get_log_messages())
    _emit(args, records, config, fits, {"predictions": _predictions(config)})

    if not runner.deep_zero_mean_ok(records):
        report.log_message("zero-mean check failed on a deep cell")
        return 1
    report.log_message(f"{len(records)} records written")
    return 0


def run_verify_lemmas(args, report):
    checks = run_lemma_suite(args.dims, args.samples, args.tuples, args.seed, args.bands, args.gradient_samples)
    rows = [(c.lemma, c.d, c.tuple_index, f"{c.moment.estimate:.6g}", f"{c.moment.closed_form:.6g}",
             f"{c.moment.standard_error:.3g}", "PASS" if c.passed else "FAIL") for c in checks]
    report.print_table(("check", "d", "tuple", "estimate", "closed_form", "se", "status"), rows)
    failed = sum(not c.passed for c in checks)
    report.log_message(f"{len(checks) - failed}/{len(checks)} checks within {args.bands:g} SE")
    return 1 if failed else 0


def run_gradcheck_command(args, report):
    result = run_gradcheck(args.trials, args.seed, args.step, args.tol)
    report.update_display({
        "trials": result.trials,
        "max |analytic - fd|": format_float(result.max_error),
        "worst trial": result.worst_trial,
        "max |dC|": format_float(result.max_abs_gradient),
        "status": "PASS" if result.passed else "FAIL",
    })
    return 0 if result.passed else 1


def run_theory(args, report):
    header = ["n", "d_prime", "theory_var", "corollary1_var", "boundary_layer_var"]
    if args.delta is not None:
        header.append("chebyshev_bound")
    print(",".join(header))
    for n in args.n:
        for d in args.dims:
            if args.observable == "identity":
                observable = Observable.identity(n, d)
            else:
                observable = Observable.zero_projector(n, d)
            variance = theorem1_variance(observable, n, d).variance
            row = [str(n), str(d), format_float(variance), format_float(corollary1_variance(n, d)),
                   format_float(boundary_layer_variance(observable, n, d))]
            if args.delta is not None:
                row.append(format_float(chebyshev_bound(variance, args.delta)))
            print(",".join(row))
    return 0


COMMANDS = {
    "sweep-dim": lambda args, report: run_sweep(args, report),
    "sweep-qudits": lambda args, report: run_sweep(args, report, qudits=True),
    "verify-lemmas": run_verify_lemmas,
    "gradcheck": run_gradcheck_command,
    "theory": run_theory,
}


def run(args):
    report = ConsoleReport(sys.stderr if args.command.startswith("sweep") else sys.stdout)
    try:
        return COMMANDS[args.command](args, report)
    except QuditError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def main(argv=None):
    args = get_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="[%(asctime)s] %(levelname)s %(name)s: %(message)s",
                        datefmt="%H:%M:%S", stream=sys.stderr)
    return run(args)


if __name__ == '__main__':
    sys.exit(main())
