"""Command-line entry point: a config file plus mirroring flags."""

from __future__ import annotations

import argparse
import json
import sys

from .config import AdapterConfig
from .finetune import finetune_and_eval


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ctxwin-adapter",
        description="Fine-tune a pretrained transformer on a ctxwin dataset "
        "and emit per-epoch metrics JSON.",
    )
    parser.add_argument("--config", help="JSON file with AdapterConfig fields")
    parser.add_argument("--train", dest="train_path", help="training dataset JSONL")
    parser.add_argument("--eval", dest="eval_path", help="evaluation dataset JSONL")
    parser.add_argument("--out", dest="out_dir", help="output directory")
    parser.add_argument("--checkpoint")
    parser.add_argument("--max-length", dest="max_length", type=int)
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--batch-size", dest="batch_size", type=int)
    parser.add_argument("--learning-rate", dest="learning_rate", type=float)
    parser.add_argument("--strategy")
    parser.add_argument("--device")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = vars(build_parser().parse_args(argv))
    config_path = args.pop("config")
    overrides = {key: value for key, value in args.items() if value is not None}
    try:
        if config_path:
            config = AdapterConfig.from_json(config_path, **overrides)
        else:
            config = AdapterConfig(**overrides)
        written = finetune_and_eval(config)
    except (TypeError, ValueError, OSError) as exc:
        sys.stderr.write(
            json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}})
            + "\n"
        )
        return 1
    print("\n".join(str(path) for path in written))
    return 0


if __name__ == "__main__":
    sys.exit(main())
