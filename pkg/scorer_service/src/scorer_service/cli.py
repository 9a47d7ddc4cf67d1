"""Command-line interface: train a scorer, then serve it.

Exit codes: 0 success, 1 usage error, 2 data error.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import DataError, ServiceError
from .train import FineTuneConfig, ci_preset, load_artifact


def cmd_train(args: argparse.Namespace) -> int:
    from .data import read_pairs
    from .train import train

    config = ci_preset(seed=args.seed) if args.preset == "ci" else FineTuneConfig(
        seed=args.seed
    )
    for name in ("learning_rate", "epochs", "batch_size",
                 "max_query_tokens", "max_sequence_tokens"):
        value = getattr(args, name)
        if value is not None:
            setattr(config, name, value)
    pairs = read_pairs(args.pairs)
    out = train(pairs, config, args.out)
    print(f"trained on {len(pairs)} pairs -> {out}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import serve_http, serve_stdio

    model = load_artifact(args.model)
    if args.stdio:
        serve_stdio(model, sys.stdin, sys.stdout)
        return 0
    host, _, port_text = args.http.partition(":")
    try:
        port = int(port_text)
    except ValueError:
        print(f"usage error: --http expects HOST:PORT, got {args.http!r}",
              file=sys.stderr)
        return 1
    serve_http(model, host or "127.0.0.1", port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scorer-service",
        description="Train and serve a neural relevance scorer",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fine-tune on exported training pairs")
    p.add_argument("--pairs", required=True, help="training-pair JSONL (required)")
    p.add_argument("--out", required=True, help="artifact directory (required)")
    p.add_argument(
        "--preset", choices=("default", "ci"), default="default",
        help="hyperparameter preset; ci is the seconds-scale one (default: default)",
    )
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default: 0)")
    p.add_argument("--learning-rate", type=float, dest="learning_rate",
                   help="override the preset learning rate")
    p.add_argument("--epochs", type=int, help="override the preset epoch count")
    p.add_argument("--batch-size", type=int, dest="batch_size",
                   help="override the preset batch size")
    p.add_argument("--max-query-tokens", type=int, dest="max_query_tokens",
                   help="override the query truncation length")
    p.add_argument("--max-sequence-tokens", type=int, dest="max_sequence_tokens",
                   help="override the sequence truncation length")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("serve", help="serve a trained artifact")
    p.add_argument("--model", required=True, help="artifact directory (required)")
    transport = p.add_mutually_exclusive_group(required=True)
    transport.add_argument("--http", help="listen address as HOST:PORT")
    transport.add_argument("--stdio", action="store_true",
                           help="newline-delimited JSON on stdin/stdout")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except ServiceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
