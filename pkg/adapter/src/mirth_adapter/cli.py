"""Command-line entry points: finetune one configuration, or run the
random hyperparameter search.  Both read the dataset directory exported
by the main harness and write predictions scoreable by its
``score-external`` command."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import load_config
from .data import load_dataset
from .finetune import finetune
from .search import random_search_adapter


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mirth-adapter")
    sub = parser.add_subparsers(dest="command", required=True)

    ft = sub.add_parser("finetune", help="fine-tune one configuration")
    ft.add_argument("--data", required=True, help="exported dataset directory")
    ft.add_argument("--config", required=True, help="flat key=value config file")
    ft.add_argument("--out", required=True, help="output directory")
    ft.add_argument("--model", default=None,
                    help="override model_name_or_path from the config file")
    ft.add_argument("--device", default=None)

    se = sub.add_parser("search", help="random hyperparameter search")
    se.add_argument("--data", required=True)
    se.add_argument("--config", required=True)
    se.add_argument("--out", required=True)
    se.add_argument("--trials", type=int, default=10)
    se.add_argument("--seed", type=int, default=1)
    se.add_argument("--model", default=None)
    se.add_argument("--device", default=None)
    return parser


def main(argv=None) -> None:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    overrides = {}
    if args.model:
        overrides["model_name_or_path"] = args.model
    try:
        config = load_config(args.config, **overrides)
        dataset = load_dataset(args.data)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(2)

    if args.command == "finetune":
        metrics = finetune(dataset, config, args.out, device=args.device)
        print(f"validation accuracy {metrics['validation_accuracy']:.4f} "
              f"(best epoch {metrics['best_epoch']}) -> {args.out}")
    else:
        records = random_search_adapter(dataset, config, args.out,
                                        n_trials=args.trials, base_seed=args.seed,
                                        device=args.device)
        ok = sum(1 for r in records if r["status"] == "ok")
        print(f"{ok}/{len(records)} trials succeeded -> {args.out}")


if __name__ == "__main__":
    main()
