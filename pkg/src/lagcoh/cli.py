"""Command line interface.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
degeneracy.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from lagcoh._version import __version__
from lagcoh.errors import ConfigError, DataError, NumericalError
from lagcoh.io import FORMATS, load_config, load_epochs, load_model, save_epochs
from lagcoh.pipeline import emit_results, run_pipeline, summary_table
from lagcoh.simulate import generate_var
from lagcoh.spectra import EpochedTimeSeries

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERICAL = 4

log = logging.getLogger("lagcoh")


def _write_results(doc, output, emit, summary):
    text = emit_results(doc, emit)
    if output is None or str(output) == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)
        log.info("wrote %s", output)
    if summary:
        print(summary_table(doc), file=sys.stderr if output in (None, "-") else sys.stdout)


def cmd_compute(args) -> int:
    cfg = load_config(args.config)
    try:
        ts = load_epochs(args.input, args.format, args.sampling_rate)
    except OSError as exc:
        raise DataError(f"cannot read {args.input}: {exc}") from None
    doc = run_pipeline(ts, cfg, jobs=args.jobs)
    _write_results(doc, args.output, args.emit, args.summary)
    return EXIT_OK


def cmd_simulate(args) -> int:
    model = load_model(args.model)
    if args.epochs < 1:
        raise ConfigError("--epochs must be >= 1")
    x, y = generate_var(model, args.epochs, args.seed)
    ts = EpochedTimeSeries(
        np.concatenate([x.data, y.data], axis=2),
        x.channel_labels + y.channel_labels,
        model.sampling_rate,
    )
    save_epochs(ts, args.output, args.format)
    log.info("wrote %d epochs x %d samples to %s", ts.n_epochs, ts.n_samples, args.output)
    if args.config:
        cfg = load_config(args.config)
        doc = run_pipeline(ts, cfg, jobs=args.jobs)
        _write_results(doc, args.results, args.emit, args.summary)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lagcoh",
        description="Frequency-domain lagged coherence between two groups of channels.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="analyse epoched data from a file")
    c.add_argument("--input", required=True, type=Path)
    c.add_argument("--format", choices=FORMATS, default=None,
                   help="data format (default: from the file extension)")
    c.add_argument("--config", required=True, type=Path, help="analysis config (JSON)")
    c.add_argument("--output", default="-", help="result file, '-' for stdout")
    c.add_argument("--emit", choices=("json", "csv"), default="json")
    c.add_argument("--summary", action="store_true", help="also print a rounded table")
    c.add_argument("--jobs", type=int, default=1, help="worker threads over frequencies")
    c.add_argument("--sampling-rate", type=float, default=None,
                   help="sampling rate in Hz, used only to label frequencies")
    c.set_defaults(func=cmd_compute)

    s = sub.add_parser("simulate", help="generate data from a lagged regression model")
    s.add_argument("--model", required=True, type=Path, help="model description (JSON)")
    s.add_argument("--epochs", required=True, type=int)
    s.add_argument("--seed", required=True, type=int)
    s.add_argument("--output", required=True, type=Path)
    s.add_argument("--format", choices=FORMATS, default=None)
    s.add_argument("--config", type=Path, default=None,
                   help="if given, analyse the simulated data with this config")
    s.add_argument("--results", default="-", help="where to write analysis results")
    s.add_argument("--emit", choices=("json", "csv"), default="json")
    s.add_argument("--summary", action="store_true")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be >= 1")
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except DataError as exc:
        log.error("data error: %s", exc)
        return EXIT_DATA
    except NumericalError as exc:
        log.error("numerical degeneracy: %s", exc)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
