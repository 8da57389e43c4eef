"""Command line interface.

Exit codes: 0 property holds (or command succeeded), 1 counterexample,
2 inconclusive, 3 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .bench import gen_benchmark
from .driver import Outcome, VerifyConfig, verify
from .errors import InputError, NumericalError
from .formats import dump_analysis, load_network, load_property, save_network, save_property

EXIT = {Outcome.HOLDS: 0, Outcome.COUNTEREXAMPLE: 1, Outcome.INCONCLUSIVE: 2}
USAGE_ERROR = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _positive_int(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def build_parser():
    parser = _Parser(prog="permverify", description="Verify permutation invariance of ReLU networks.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("verify", help="check a property on a network")
    p.add_argument("--network", required=True)
    p.add_argument("--property", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cex-samples", type=_positive_int, default=10_000)
    p.add_argument("--cex-distance", type=_positive_float, default=1.0)
    p.add_argument("--tol", type=_positive_float, default=None, help="inclusion tolerance")
    p.add_argument("--dump-regions", metavar="DIR")
    p.add_argument("--json", action="store_true", help="print the verdict as JSON")

    p = sub.add_parser("simulate", help="evaluate the network on one input")
    p.add_argument("--network", required=True)
    p.add_argument("--input", required=True, help="comma separated values or a file holding them")

    p = sub.add_parser("gen-bench", help="write an argmax benchmark")
    p.add_argument("--inputs", type=int, required=True)
    p.add_argument("--mode", choices=["safe", "unsafe"], required=True)
    p.add_argument("--epsilon", type=_positive_float, default=0.1)
    p.add_argument("--out-network", required=True)
    p.add_argument("--out-property", required=True)
    return parser


def _read_input(text):
    path = Path(text)
    if path.is_file():
        text = path.read_text()
    try:
        values = [float(v) for v in text.replace("\n", ",").split(",") if v.strip()]
    except ValueError as exc:
        raise InputError(f"input is not a list of numbers: {exc}") from exc
    return np.array(values)


def _cmd_verify(args):
    network = load_network(args.network)
    prop = load_property(args.property)
    config = VerifyConfig(seed=args.seed, cex_samples=args.cex_samples, cex_distance=args.cex_distance)
    if args.tol is not None:
        config.inclusion_tol = args.tol
    verdict = verify(network, prop, config)
    if args.dump_regions:
        dump_analysis(verdict, args.dump_regions)
    if args.json:
        print(json.dumps(verdict.to_dict()))
    else:
        print(verdict.outcome.value)
        if verdict.proved_at_cut is not None:
            print(f"proved at cut {verdict.proved_at_cut}")
        if verdict.counterexample is not None:
            print("counterexample: " + ",".join(repr(float(v)) for v in verdict.counterexample))
        for phase, secs in verdict.timings.items():
            print(f"{phase}: {secs:.3f}s")
    return EXIT[verdict.outcome]


def _cmd_simulate(args):
    network = load_network(args.network)
    x = _read_input(args.input)
    if x.shape != (network.d_in,):
        raise InputError(f"network expects {network.d_in} inputs, got {x.size}")
    print(",".join(repr(float(v)) for v in network(x)))
    return 0


def _cmd_gen_bench(args):
    if args.inputs < 2:
        raise InputError("--inputs must be at least 2")
    network, prop = gen_benchmark(args.inputs, args.mode, args.epsilon)
    save_network(network, args.out_network)
    save_property(prop, args.out_property)
    return 0


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"verify": _cmd_verify, "simulate": _cmd_simulate, "gen-bench": _cmd_gen_bench}[args.command]
    try:
        return handler(args)
    except (InputError, NumericalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
