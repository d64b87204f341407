"""Command-line interface.

Subcommands:

* ``evaluate``   - coverage report for one scenario/profile pair
* ``validate``   - load a bundle and report every dataset violation
* ``oracle mrc`` - Monte Carlo and closed-form MRC outage margins
* ``calibrate``  - maintenance: refit the calibration file from targets

Exit codes: 0 on success, 1 on validation errors, 2 on evaluation errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from .analysis import Evaluator
from .bundle import bundled_dataset_path, load_bundle, serialize_calibration
from .calibration import fit_calibration, load_targets
from .errors import BundleError, CoverageError
from .fading import (
    OutageSpec,
    branch_reduction_penalty_db,
    closed_form_outage_margin_db,
    closed_form_penalty_db,
    mrc_outage_snr_db,
)
from .report import FIXED_TIMESTAMP, FORMATS, current_timestamp, document_from_report
from .transport import RateMode, load_mcs_tables, load_tbs_table

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_EVALUATION = 2


def _write_output(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _load_tables(args):
    if args.tables is None:
        return None, None
    directory = Path(args.tables)
    return load_mcs_tables(directory), load_tbs_table(directory / "tbs_table.csv")


def _load_validated_bundle(args):
    mcs_tables, tbs_table = _load_tables(args)
    bundle = load_bundle(args.bundle, mcs_tables=mcs_tables)
    violations = bundle.validate()
    return bundle, tbs_table, violations


def _cmd_evaluate(args) -> int:
    bundle, tbs_table, violations = _load_validated_bundle(args)
    if violations:
        for violation in violations:
            print(f"validation: {violation}", file=sys.stderr)
        return EXIT_VALIDATION
    evaluator = Evaluator(bundle, tbs_table=tbs_table)
    report = evaluator.build_report(
        args.scenario, args.profile, RateMode(args.rate_mode)
    )
    generated_at = FIXED_TIMESTAMP if args.fixed_timestamp else current_timestamp()
    document = document_from_report(report, generated_at)
    _write_output(FORMATS[args.format](document), args.out)
    return EXIT_OK


def _cmd_validate(args) -> int:
    try:
        _, _, violations = _load_validated_bundle(args)
    except BundleError as exc:
        for problem in exc.problems:
            print(f"load: {problem}", file=sys.stderr)
        return EXIT_VALIDATION
    if violations:
        for violation in violations:
            print(f"validation: {violation}")
        return EXIT_VALIDATION
    print("bundle ok")
    return EXIT_OK


def _cmd_oracle_mrc(args) -> int:
    spec_kwargs = dict(
        outage_prob=args.outage,
        samples=args.samples,
        seed=args.seed,
        partitions=args.partitions,
    )
    margin_from = mrc_outage_snr_db(OutageSpec(branches=args.n_from, **spec_kwargs))
    margin_to = mrc_outage_snr_db(OutageSpec(branches=args.n_to, **spec_kwargs))
    penalty = branch_reduction_penalty_db(
        args.n_from, args.n_to, args.outage, args.samples, args.seed, args.partitions
    )
    closed_from = closed_form_outage_margin_db(args.n_from, args.outage)
    closed_to = closed_form_outage_margin_db(args.n_to, args.outage)
    closed_penalty = closed_form_penalty_db(args.n_from, args.n_to, args.outage)
    print(
        f"outage margin, {args.n_from} branches: monte-carlo {margin_from:.4f} dB, "
        f"closed-form {closed_from:.4f} dB"
    )
    print(
        f"outage margin, {args.n_to} branches: monte-carlo {margin_to:.4f} dB, "
        f"closed-form {closed_to:.4f} dB"
    )
    print(
        f"branch-reduction penalty {args.n_from}->{args.n_to}: monte-carlo "
        f"{penalty.penalty_db:.4f} dB, closed-form {closed_penalty:.4f} dB "
        f"(array-gain share {penalty.array_gain_db:.4f} dB)"
    )
    return EXIT_OK


def _cmd_calibrate(args) -> int:
    mcs_tables, _ = _load_tables(args)
    bundle = load_bundle(args.bundle, mcs_tables=mcs_tables)
    targets = load_targets(args.targets)
    fitted = fit_calibration(bundle, targets)
    _write_output(serialize_calibration(fitted), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="redcap-coverage",
        description="Link-budget coverage evaluation for reduced-capability NR devices",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_bundle_options(p):
        p.add_argument(
            "--bundle",
            default=str(bundled_dataset_path()),
            help="dataset bundle directory (default: bundled dataset)",
        )
        p.add_argument(
            "--tables",
            default=None,
            help="directory with alternative MCS/TBS table files",
        )

    evaluate = sub.add_parser("evaluate", help="coverage report for a scenario/profile")
    add_bundle_options(evaluate)
    evaluate.add_argument("--scenario", required=True)
    evaluate.add_argument("--profile", required=True)
    evaluate.add_argument(
        "--format",
        choices=sorted(FORMATS),
        default="human-table",
    )
    evaluate.add_argument(
        "--rate-mode",
        choices=[mode.value for mode in RateMode],
        default=RateMode.PER_SLOT.value,
    )
    evaluate.add_argument("--out", default=None, help="output file (default: stdout)")
    evaluate.add_argument(
        "--fixed-timestamp",
        action="store_true",
        help="stamp reports with a fixed epoch timestamp (for reproducible output)",
    )
    evaluate.set_defaults(func=_cmd_evaluate)

    validate = sub.add_parser("validate", help="check a dataset bundle")
    add_bundle_options(validate)
    validate.set_defaults(func=_cmd_validate)

    oracle = sub.add_parser("oracle", help="sanity oracles")
    oracle_sub = oracle.add_subparsers(dest="oracle_command", required=True)
    mrc = oracle_sub.add_parser(
        "mrc", help="MRC outage margins under flat Rayleigh fading"
    )
    mrc.add_argument("--from", dest="n_from", type=int, required=True)
    mrc.add_argument("--to", dest="n_to", type=int, required=True)
    mrc.add_argument("--outage", type=float, required=True)
    mrc.add_argument("--samples", type=int, default=1_000_000)
    mrc.add_argument("--seed", type=int, default=0)
    mrc.add_argument("--partitions", type=int, default=1)
    mrc.set_defaults(func=_cmd_oracle_mrc)

    calibrate = sub.add_parser(
        "calibrate", help="refit the calibration file against threshold targets"
    )
    add_bundle_options(calibrate)
    calibrate.add_argument("--targets", required=True)
    calibrate.add_argument("--out", default=None, help="output file (default: stdout)")
    calibrate.set_defaults(func=_cmd_calibrate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BundleError as exc:
        for problem in exc.problems:
            print(f"load: {problem}", file=sys.stderr)
        return EXIT_VALIDATION
    except (CoverageError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EVALUATION


def entrypoint() -> None:
    raise SystemExit(main())
