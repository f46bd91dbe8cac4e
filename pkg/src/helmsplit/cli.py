"""Command-line test bench.

    helmsplit farfield --scheme C --k 280 --npan 100,150,200 --out far.csv
    helmsplit nearfield --scheme A --npan 16:96:16
    helmsplit fieldmap --scheme C --npan 244 --k 280 --out map
    helmsplit eta-study --k 280 --npan 200
    helmsplit selftest

Options may also come from a JSON file given with ``--config``; command
line flags take precedence over the file.
"""

import argparse
import json
import logging
import sys
from dataclasses import fields

import numpy as np

from . import selftest
from .geometry import MeshError, NewtonError
from .testbench import (ETA_COLUMNS, FARFIELD_COLUMNS, NEARFIELD_COLUMNS, ExperimentConfig,
                        run_eta_study, run_far_field, run_field_map, run_near_field)
from .system import ConfigurationError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

COMMANDS = {
    "farfield": run_far_field,
    "nearfield": run_near_field,
    "fieldmap": run_field_map,
    "eta-study": run_eta_study,
}


def parse_npan(text):
    """'16,32,48', '16 32' or the range 'start:stop:step' (stop inclusive)."""
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    if isinstance(text, int):
        return [text]
    text = str(text).strip()
    try:
        if ":" in text:
            start, stop, *step = (int(v) for v in text.split(":"))
            return list(range(start, stop + 1, step[0] if step else 1))
        return [int(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise ConfigurationError(f"cannot parse panel counts from {text!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(prog="helmsplit", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*COMMANDS, "selftest"):
        p = sub.add_parser(name)
        if name == "selftest":
            continue
        p.add_argument("--scheme", choices=list("ABCD"), type=str.upper)
        p.add_argument("--npt", type=int, choices=(16, 32))
        p.add_argument("--npan", help="panel counts: '16,32', '16 32' or '16:96:16'")
        p.add_argument("--k", type=float)
        p.add_argument("--eta", help="'k/2', 'k', '-k' or a number")
        p.add_argument("--tol", type=float)
        p.add_argument("--out")
        p.add_argument("--config", help="JSON file with any of the options above")
    return parser


_KEYS = {"scheme": "scheme", "npt": "n_pt", "n_pt": "n_pt", "npan": "n_pan", "n_pan": "n_pan",
         "k": "k", "eta": "eta", "tol": "tol", "out": "out", "max_iter": "max_iter"}


def load_config(args):
    values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigurationError("config file must hold a JSON object")
        unknown = set(data) - set(_KEYS)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        values.update({_KEYS[key]: val for key, val in data.items()})
    for flag in ("scheme", "npt", "npan", "k", "eta", "tol", "out"):
        val = getattr(args, flag)
        if val is not None:
            values[_KEYS[flag]] = val
    if "n_pan" in values:
        values["n_pan"] = parse_npan(values["n_pan"])
    known = {f.name for f in fields(ExperimentConfig)}
    return ExperimentConfig(**{k: v for k, v in values.items() if k in known}).validate()


def _report(command, result):
    if command == "fieldmap":
        re_u, err = result
        print(f"field map {re_u.shape[0]}x{re_u.shape[1]}, max log10 error {np.nanmax(err):.2f}")
        return
    columns = {"farfield": FARFIELD_COLUMNS, "nearfield": NEARFIELD_COLUMNS,
               "eta-study": ETA_COLUMNS}[command]
    for row in result:
        get = row.get if isinstance(row, dict) else lambda c, r=row: getattr(r, c)
        print("  ".join(f"{c}={get(c):.3e}" if isinstance(get(c), float) else f"{c}={get(c)}"
                        for c in columns))


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command == "selftest":
        results = selftest.run()
        for name, ok, detail in results:
            print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_NUMERICAL
    try:
        config = load_config(args)
    except (ConfigurationError, MeshError, TypeError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        result = COMMANDS[args.command](config)
    except (ConfigurationError, MeshError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ArithmeticError, NewtonError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    _report(args.command, result)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
