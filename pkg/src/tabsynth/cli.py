"""Command-line interface.

Exit status: 0 success, 1 runtime or data failure, 2 usage or config
failure. Every failure prints one line to stderr starting with
``tabsynth: error:``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from tabsynth import __version__, pipeline
from tabsynth.config import load_config
from tabsynth.errors import ConfigError, TabsynthError
from tabsynth.evaluation import SCATTER_SEED

ERROR_PREFIX = "tabsynth: error:"


def _seed(text: str) -> int:
    try:
        value = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2**64)")
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{ERROR_PREFIX} {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=None,
                        help="override the config seed (unsigned 64-bit)")
    parser = _Parser(prog="tabsynth", description="Synthetic tabular data generation and evaluation.")
    parser.add_argument("--version", action="version", version=f"tabsynth {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", parents=[common], help="generate a synthetic dataset")
    p.add_argument("--config", required=True, type=Path)
    p = sub.add_parser("train-gan", parents=[common], help="train a GAN and save the model")
    p.add_argument("--config", required=True, type=Path)
    p = sub.add_parser("evaluate", parents=[common], help="compare a synthetic dataset to a real one")
    p.add_argument("--real", required=True, type=Path)
    p.add_argument("--synth", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    return parser


def _fail(code: int, message: str) -> int:
    print(f"{ERROR_PREFIX} {' '.join(message.split())}", file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "generate":
            pipeline.generate(load_config(args.config, args.seed))
        elif args.command == "train-gan":
            pipeline.train(load_config(args.config, args.seed))
        else:
            seed = SCATTER_SEED if args.seed is None else args.seed
            pipeline.evaluate(args.real, args.synth, args.out, seed)
    except ConfigError as exc:
        return _fail(2, f"config: {exc}")
    except TabsynthError as exc:
        return _fail(1, f"{type(exc).__name__}: {exc}")
    except OSError as exc:
        return _fail(1, f"io: {exc}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
