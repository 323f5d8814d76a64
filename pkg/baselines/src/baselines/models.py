"""The two encoder-decoder baselines.

GRU: single-layer unidirectional encoder, GRU decoder with global (Luong)
attention using the dot-product score.  Transformer: three encoder and three
decoder layers, model size 512, feed-forward size 256.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, asdict

import torch
import torch.nn as nn


@dataclass
class TrainConfig:
    model: str = "gru"  # "gru" | "transformer"
    embedding_size: int = 256
    batch_size: int = 128
    dropout: float = 0.1
    transformer_layers: int = 3
    transformer_model_size: int = 512
    transformer_hidden_size: int = 256
    transformer_heads: int = 8
    learning_rate: float = 5e-4
    epochs: int = 25
    patience: int = 3
    seed: int = 0
    max_decode_margin: int = 8
    valid_decode_cap: int = 500  # exact-match probe size per epoch

    def to_json(self):
        return asdict(self)

    @staticmethod
    def from_json(d):
        return TrainConfig(**d)


class GruSeq2Seq(nn.Module):
    def __init__(self, src_vocab_size, tgt_vocab_size, cfg: TrainConfig, pad_id: int):
        super().__init__()
        h = cfg.embedding_size
        self.pad_id = pad_id
        self.src_embed = nn.Embedding(src_vocab_size, h, padding_idx=pad_id)
        self.tgt_embed = nn.Embedding(tgt_vocab_size, h, padding_idx=pad_id)
        self.encoder = nn.GRU(h, h, batch_first=True)
        self.decoder = nn.GRU(h, h, batch_first=True)
        self.dropout = nn.Dropout(cfg.dropout)
        self.combine = nn.Linear(2 * h, h)
        self.out = nn.Linear(h, tgt_vocab_size)

    def encode(self, src):
        memory, state = self.encoder(self.src_embed(src))
        mask = src.eq(self.pad_id)
        return memory, state, mask

    def decode_step(self, tokens, state, memory, mask):
        """One or more decoder steps with dot-product global attention."""
        dec, state = self.decoder(self.tgt_embed(tokens), state)
        scores = torch.bmm(dec, memory.transpose(1, 2))
        scores = scores.masked_fill(mask.unsqueeze(1), -1e9)
        context = torch.bmm(torch.softmax(scores, dim=-1), memory)
        mixed = torch.tanh(self.combine(torch.cat([dec, context], dim=-1)))
        return self.out(self.dropout(mixed)), state

    def forward(self, src, tgt_in):
        memory, state, mask = self.encode(src)
        logits, _ = self.decode_step(tgt_in, state, memory, mask)
        return logits

    @torch.no_grad()
    def greedy(self, src, bos, eos, max_len):
        memory, state, mask = self.encode(src)
        tokens = torch.full((src.size(0), 1), bos, dtype=torch.long, device=src.device)
        done = torch.zeros(src.size(0), dtype=torch.bool, device=src.device)
        out = []
        for _ in range(max_len):
            logits, state = self.decode_step(tokens, state, memory, mask)
            tokens = logits[:, -1].argmax(-1, keepdim=True)
            out.append(tokens)
            done |= tokens.squeeze(1).eq(eos)
            if bool(done.all()):
                break
        return torch.cat(out, dim=1)


class PositionalEncoding(nn.Module):
    def __init__(self, d_model, max_len=512):
        super().__init__()
        pe = torch.zeros(max_len, d_model)
        pos = torch.arange(max_len).unsqueeze(1).float()
        div = torch.exp(torch.arange(0, d_model, 2).float() * (-math.log(10000.0) / d_model))
        pe[:, 0::2] = torch.sin(pos * div)
        pe[:, 1::2] = torch.cos(pos * div)
        self.register_buffer("pe", pe)

    def forward(self, x):
        return x + self.pe[: x.size(1)].unsqueeze(0)


class TransformerSeq2Seq(nn.Module):
    def __init__(self, src_vocab_size, tgt_vocab_size, cfg: TrainConfig, pad_id: int):
        super().__init__()
        d = cfg.transformer_model_size
        self.pad_id = pad_id
        self.scale = math.sqrt(d)
        self.src_embed = nn.Embedding(src_vocab_size, d, padding_idx=pad_id)
        self.tgt_embed = nn.Embedding(tgt_vocab_size, d, padding_idx=pad_id)
        self.positional = PositionalEncoding(d)
        self.core = nn.Transformer(
            d_model=d,
            nhead=cfg.transformer_heads,
            num_encoder_layers=cfg.transformer_layers,
            num_decoder_layers=cfg.transformer_layers,
            dim_feedforward=cfg.transformer_hidden_size,
            dropout=cfg.dropout,
            batch_first=True,
        )
        self.out = nn.Linear(d, tgt_vocab_size)

    def forward(self, src, tgt_in):
        causal = nn.Transformer.generate_square_subsequent_mask(
            tgt_in.size(1), device=src.device
        )
        hidden = self.core(
            self.positional(self.src_embed(src) * self.scale),
            self.positional(self.tgt_embed(tgt_in) * self.scale),
            tgt_mask=causal,
            src_key_padding_mask=src.eq(self.pad_id),
            tgt_key_padding_mask=tgt_in.eq(self.pad_id),
            memory_key_padding_mask=src.eq(self.pad_id),
        )
        return self.out(hidden)

    @torch.no_grad()
    def greedy(self, src, bos, eos, max_len):
        tokens = torch.full((src.size(0), 1), bos, dtype=torch.long, device=src.device)
        done = torch.zeros(src.size(0), dtype=torch.bool, device=src.device)
        for _ in range(max_len):
            logits = self.forward(src, tokens)
            nxt = logits[:, -1].argmax(-1, keepdim=True)
            tokens = torch.cat([tokens, nxt], dim=1)
            done |= nxt.squeeze(1).eq(eos)
            if bool(done.all()):
                break
        return tokens[:, 1:]


def build_model(cfg: TrainConfig, src_vocab_size, tgt_vocab_size, pad_id):
    if cfg.model == "gru":
        return GruSeq2Seq(src_vocab_size, tgt_vocab_size, cfg, pad_id)
    if cfg.model == "transformer":
        return TransformerSeq2Seq(src_vocab_size, tgt_vocab_size, cfg, pad_id)
    raise ValueError("model must be 'gru' or 'transformer', not %r" % cfg.model)
