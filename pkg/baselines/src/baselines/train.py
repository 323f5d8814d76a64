"""Training and prediction for the two baselines.

Training minimizes token cross-entropy with Adam, runs up to the configured
epoch count with early stopping on validation loss, and writes a per-epoch
metrics file next to the checkpoint.  Prediction greedily decodes a dataset
JSONL and emits `id TAB tokens` lines, raw and never post-corrected.
"""

from __future__ import annotations

import json
import random
from pathlib import Path

import torch
import torch.nn as nn

from .data import ParallelData, Vocab, batches, pad_batch, read_jsonl_inputs, read_tsv
from .models import TrainConfig, build_model


def _exact_match_probe(model, data: ParallelData, src_vocab, tgt_vocab, cfg, device, max_len):
    cap = min(len(data), cfg.valid_decode_cap)
    hits = 0
    model.eval()
    for start in range(0, cap, cfg.batch_size):
        chunk = range(start, min(start + cfg.batch_size, cap))
        src = pad_batch(
            [src_vocab.encode(data.sources[i]) for i in chunk], src_vocab.pad, device
        )
        decoded = model.greedy(src, tgt_vocab.bos, tgt_vocab.eos, max_len)
        for row, i in zip(decoded.tolist(), chunk):
            if tgt_vocab.decode(row) == data.targets[i]:
                hits += 1
    return hits / cap


def _epoch_loss(model, data, src_vocab, tgt_vocab, cfg, device, criterion, optimizer=None, rng=None):
    training = optimizer is not None
    model.train(training)
    total, count = 0.0, 0
    with torch.set_grad_enabled(training):
        for src, tgt in batches(data, src_vocab, tgt_vocab, cfg.batch_size, device, rng):
            logits = model(src, tgt[:, :-1])
            loss = criterion(logits.reshape(-1, logits.size(-1)), tgt[:, 1:].reshape(-1))
            if training:
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
            total += float(loss) * src.size(0)
            count += src.size(0)
    return total / count


def train(cfg: TrainConfig, train_tsv, valid_tsv, out_dir, device="cpu", log=print):
    torch.manual_seed(cfg.seed)
    rng = random.Random(cfg.seed)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    train_data = read_tsv(train_tsv)
    valid_data = read_tsv(valid_tsv)
    src_vocab = Vocab(t for s in train_data.sources for t in s)
    tgt_vocab = Vocab(t for s in train_data.targets for t in s)
    # decoding budget follows the longest target in the data
    max_len = max(train_data.max_target_len, valid_data.max_target_len) + cfg.max_decode_margin

    model = build_model(cfg, len(src_vocab), len(tgt_vocab), src_vocab.pad).to(device)
    optimizer = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate)
    criterion = nn.CrossEntropyLoss(ignore_index=tgt_vocab.pad)

    best_loss = float("inf")
    stale = 0
    curve = []
    checkpoint_path = out_dir / "model.pt"
    for epoch in range(1, cfg.epochs + 1):
        train_loss = _epoch_loss(
            model, train_data, src_vocab, tgt_vocab, cfg, device, criterion, optimizer, rng
        )
        valid_loss = _epoch_loss(model, valid_data, src_vocab, tgt_vocab, cfg, device, criterion)
        valid_exact = _exact_match_probe(
            model, valid_data, src_vocab, tgt_vocab, cfg, device, max_len
        )
        curve.append(
            {
                "epoch": epoch,
                "train_loss": round(train_loss, 6),
                "valid_loss": round(valid_loss, 6),
                "valid_exact": round(valid_exact, 6),
            }
        )
        log("epoch %2d | train %.4f | valid %.4f | exact %.3f" % (
            epoch, train_loss, valid_loss, valid_exact))
        if valid_loss < best_loss - 1e-5:
            best_loss = valid_loss
            stale = 0
            torch.save(
                {
                    "config": cfg.to_json(),
                    "model_state": model.state_dict(),
                    "src_vocab": src_vocab.to_json(),
                    "tgt_vocab": tgt_vocab.to_json(),
                    "max_len": max_len,
                },
                checkpoint_path,
            )
        else:
            stale += 1
            if stale >= cfg.patience:
                log("early stop at epoch %d" % epoch)
                break
    metrics_path = out_dir / "metrics.json"
    metrics_path.write_text(
        json.dumps({"config": cfg.to_json(), "curve": curve}, indent=2) + "\n",
        encoding="utf-8",
    )
    return checkpoint_path, metrics_path


def load_checkpoint(path, device="cpu"):
    payload = torch.load(path, map_location=device, weights_only=False)
    cfg = TrainConfig.from_json(payload["config"])
    src_vocab = Vocab.from_json(payload["src_vocab"])
    tgt_vocab = Vocab.from_json(payload["tgt_vocab"])
    model = build_model(cfg, len(src_vocab), len(tgt_vocab), src_vocab.pad).to(device)
    model.load_state_dict(payload["model_state"])
    model.eval()
    return model, cfg, src_vocab, tgt_vocab, payload["max_len"]


def predict(checkpoint, test_jsonl, out_path, device="cpu", batch_size=None):
    model, cfg, src_vocab, tgt_vocab, max_len = load_checkpoint(checkpoint, device)
    inputs = read_jsonl_inputs(test_jsonl)
    bs = batch_size or cfg.batch_size
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        for start in range(0, len(inputs), bs):
            chunk = inputs[start : start + bs]
            src = pad_batch(
                [src_vocab.encode(tokens) for _, tokens in chunk], src_vocab.pad, device
            )
            decoded = model.greedy(src, tgt_vocab.bos, tgt_vocab.eos, max_len)
            for (rid, _), row in zip(chunk, decoded.tolist()):
                fh.write("%s\t%s\n" % (rid, " ".join(tgt_vocab.decode(row))))
    return out_path
