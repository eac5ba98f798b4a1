"""Command-line experiment runner.

Subcommands: ``synth`` (write a synthetic catalog CSV), ``features``
(write the feature/label dataset CSV), ``train-eval`` (full pipeline to
report.csv plus serialized models and histogram data), ``report``
(render a report CSV as a text table).

Exit codes: 0 success, 2 configuration error, 3 data error,
4 degenerate experiment.
"""

from __future__ import annotations

import argparse
import sys

from .config import ConfigError, load_config
from .experiment import (
    DataError,
    DegenerateError,
    render_report,
    run_features,
    run_synth,
    run_train_eval,
)
from .metrics import read_report_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_DEGENERATE = 4


def _add_common(sub):
    sub.add_argument("--config", required=True, help="experiment config file (INI)")
    sub.add_argument("--seed", type=int, default=None, help="override the configured seed")
    sub.add_argument("--out", default=None, help="override the configured output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rtlquake", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    _add_common(subs.add_parser("synth", help="generate a synthetic catalog CSV"))
    _add_common(subs.add_parser("features", help="build the dataset CSV from a catalog"))
    _add_common(subs.add_parser("train-eval", help="train and evaluate over the grid"))

    rep = subs.add_parser("report", help="render a report CSV as a text table")
    rep.add_argument("report_csv", help="path to a report.csv produced by train-eval")
    rep.add_argument("--out", default=None, help="write the table here instead of stdout")
    return parser


def _configured(args):
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out_dir = args.out
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "synth":
            path, count = run_synth(_configured(args))
            print(f"wrote {count} events to {path}")
        elif args.command == "features":
            path, report = run_features(_configured(args))
            print(
                f"wrote {report.n_samples} samples to {path} "
                f"(dropped {report.n_dropped_before_start} before catalog start, "
                f"{report.n_dropped_after_end} past catalog end)"
            )
        elif args.command == "train-eval":
            path, rows = run_train_eval(_configured(args))
            print(f"wrote {len(rows)} report rows to {path}")
        elif args.command == "report":
            try:
                rows = read_report_csv(args.report_csv)
            except (OSError, ValueError) as exc:
                raise DataError(str(exc)) from exc
            table = render_report(rows)
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(table)
            else:
                print(table, end="")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DegenerateError as exc:
        print(f"degenerate experiment: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
