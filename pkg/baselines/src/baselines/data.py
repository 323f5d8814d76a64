"""Data plumbing: whitespace-tokenized parallel TSV files, vocabularies and
padded batches.

Training/validation files are `sentence TAB target` TSV as written by the
dataset pipeline; prediction inputs are dataset JSONL records (id, sentence).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass

import torch

PAD, BOS, EOS, UNK = "<pad>", "<s>", "</s>", "<unk>"
SPECIALS = (PAD, BOS, EOS, UNK)


class Vocab:
    def __init__(self, tokens):
        self.itos = list(SPECIALS) + sorted(set(tokens) - set(SPECIALS))
        self.stoi = {t: i for i, t in enumerate(self.itos)}

    def __len__(self):
        return len(self.itos)

    @property
    def pad(self):
        return self.stoi[PAD]

    @property
    def bos(self):
        return self.stoi[BOS]

    @property
    def eos(self):
        return self.stoi[EOS]

    def encode(self, tokens):
        unk = self.stoi[UNK]
        return [self.stoi.get(t, unk) for t in tokens]

    def decode(self, ids):
        keep = []
        for i in ids:
            tok = self.itos[i]
            if tok == EOS:
                break
            if tok not in (PAD, BOS):
                keep.append(tok)
        return keep

    def to_json(self):
        return self.itos

    @staticmethod
    def from_json(itos):
        v = Vocab([])
        v.itos = list(itos)
        v.stoi = {t: i for i, t in enumerate(v.itos)}
        return v


@dataclass
class ParallelData:
    sources: list[list[str]]
    targets: list[list[str]]

    def __len__(self):
        return len(self.sources)

    @property
    def max_target_len(self):
        return max(len(t) for t in self.targets)


def read_tsv(path) -> ParallelData:
    sources, targets = [], []
    with open(path, encoding="utf-8") as fh:
        for i, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            if "\t" not in line:
                raise ValueError("%s line %d: expected 'source<TAB>target'" % (path, i))
            src, tgt = line.split("\t", 1)
            sources.append(src.split())
            targets.append(tgt.split())
    if not sources:
        raise ValueError("%s: no records" % path)
    return ParallelData(sources, targets)


def read_jsonl_inputs(path) -> list[tuple[str, list[str]]]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                d = json.loads(line)
                out.append((d["id"], d["sentence"].split()))
    return out


def pad_batch(seqs, pad_id, device):
    width = max(len(s) for s in seqs)
    out = torch.full((len(seqs), width), pad_id, dtype=torch.long, device=device)
    for i, s in enumerate(seqs):
        out[i, : len(s)] = torch.tensor(s, dtype=torch.long, device=device)
    return out


def batches(data: ParallelData, src_vocab, tgt_vocab, batch_size, device, shuffle_rng=None):
    order = list(range(len(data)))
    if shuffle_rng is not None:
        shuffle_rng.shuffle(order)
    for start in range(0, len(order), batch_size):
        chunk = order[start : start + batch_size]
        src = [src_vocab.encode(data.sources[i]) for i in chunk]
        tgt = [
            [tgt_vocab.bos] + tgt_vocab.encode(data.targets[i]) + [tgt_vocab.eos]
            for i in chunk
        ]
        yield pad_batch(src, src_vocab.pad, device), pad_batch(tgt, tgt_vocab.pad, device)
