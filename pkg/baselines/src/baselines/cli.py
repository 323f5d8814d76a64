"""Command line for the baseline harness: train on split TSVs, predict on a
dataset JSONL, emitting the `id TAB tokens` prediction format the evaluation
command consumes directly."""

from __future__ import annotations

import argparse
import sys

from .models import TrainConfig
from .train import predict, train


def build_parser():
    parser = argparse.ArgumentParser(prog="seq2seq-baseline")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train")
    t.add_argument("--model", choices=("gru", "transformer"), default="gru")
    t.add_argument("--train", required=True, help="train TSV (sentence TAB target)")
    t.add_argument("--valid", required=True, help="validation TSV")
    t.add_argument("--out-dir", required=True)
    t.add_argument("--epochs", type=int, default=25)
    t.add_argument("--patience", type=int, default=3)
    t.add_argument("--batch-size", type=int, default=128)
    t.add_argument("--embedding-size", type=int, default=256)
    t.add_argument("--dropout", type=float, default=0.1)
    t.add_argument("--learning-rate", type=float, default=5e-4)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--device", default="cpu")

    p = sub.add_parser("predict")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--test", required=True, help="dataset JSONL with id and sentence")
    p.add_argument("--out", required=True)
    p.add_argument("--device", default="cpu")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "train":
        cfg = TrainConfig(
            model=args.model,
            embedding_size=args.embedding_size,
            batch_size=args.batch_size,
            dropout=args.dropout,
            learning_rate=args.learning_rate,
            epochs=args.epochs,
            patience=args.patience,
            seed=args.seed,
        )
        checkpoint, metrics = train(cfg, args.train, args.valid, args.out_dir, args.device)
        print("checkpoint: %s\nmetrics: %s" % (checkpoint, metrics))
        return 0
    if args.command == "predict":
        out = predict(args.checkpoint, args.test, args.out, args.device)
        print("predictions: %s" % out)
        return 0
    return 1


if __name__ == "__main__":
    sys.exit(main())
