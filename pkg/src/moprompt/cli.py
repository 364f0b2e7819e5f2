"""Command-line entry point: ``moprompt optimize | report | tokens``."""
from __future__ import annotations

import argparse
import json
import logging
import sys

from . import __version__
from .config import ConfigError, RunConfig, load_config
from .llm.http import MissingAPIKeyError
from .optimizer import run
from .report import ReportError, write_report
from .tokenizer import count_tokens, tokenize

logger = logging.getLogger("moprompt")


def _load(path) -> RunConfig:
    # run.json from an earlier run doubles as a config
    if path is None:
        return RunConfig()
    if str(path).endswith(".json"):
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        try:
            return RunConfig.from_dict(doc.get("config", doc))
        except TypeError as exc:
            raise ConfigError("<file>", str(exc)) from None
    return load_config(path)


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.seed is not None:
        cfg.seed = args.seed
    if args.framework is not None:
        cfg.framework = args.framework
    if args.strategy is not None:
        cfg.strategy = args.strategy
    if args.provider is not None:
        cfg.generator.kind = args.provider
        if args.provider == "http" or cfg.evaluator.kind != "landscape":
            cfg.evaluator.kind = args.provider
    if args.out is not None:
        cfg.output_dir = args.out
    if cfg.output_dir is None:
        cfg.output_dir = f"runs/{cfg.framework}-{cfg.strategy}-seed{cfg.seed}"
    return cfg.validate()


def cmd_optimize(args) -> int:
    try:
        cfg = _apply_overrides(_load(args.config), args)
    except ConfigError as exc:
        print(f"error: bad config: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        record = run(cfg)
    except MissingAPIKeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    summ = record.summary()
    print(f"{record.status}: {cfg.framework} run written to {cfg.output_dir}")
    keys = ("max_accuracy", "min_tokens") if cfg.framework == "moprompt" else ("best_accuracy",)
    for name, row in ((k, summ[k]) for k in keys if k in summ):
        print(f"  {name}: accuracy={row['accuracy']:.4f} tokens={row['tokens']} {row['prompt']!r}")
    if record.status != "completed":
        print(f"error: {record.error}", file=sys.stderr)
        return 1
    return 0


def cmd_report(args) -> int:
    try:
        s_path, f_path = write_report(args.runs, args.out)
    except (ReportError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {s_path} and {f_path}")
    return 0


def cmd_tokens(args) -> int:
    text = args.text if args.text is not None else sys.stdin.read()
    if args.show:
        print(" ".join(tokenize(text)))
    print(count_tokens(text))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="moprompt", description="Multi-objective prompt optimization.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="more logging (-v info, -vv debug)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="run an optimization")
    p.add_argument("--config", help="TOML config, or a run.json to re-execute")
    p.add_argument("--seed", type=int)
    p.add_argument("--framework", choices=("moprompt", "evoprompt"))
    p.add_argument("--strategy", choices=("zero", "few"))
    p.add_argument("--provider", choices=("mock", "http"))
    p.add_argument("--out", help="run directory (overrides run.output_dir)")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("report", help="export summary.csv and fronts.csv")
    p.add_argument("runs", nargs="+", metavar="RUN_DIR")
    p.add_argument("--out", default=".", help="output directory (default: current)")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("tokens", help="count tokens of TEXT or standard input")
    p.add_argument("text", nargs="?")
    p.add_argument("--show", action="store_true", help="also print the tokens")
    p.set_defaults(func=cmd_tokens)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
