"""Miniature transformer encoder with a binary relevance head.

Token plus learned positional embeddings feed a small TransformerEncoder;
the final-layer vector at the sequence-start position goes through a
single linear layer to two logits (not-relevant, relevant). Probabilities
are the softmax over those logits.
"""

from __future__ import annotations

import torch
from torch import nn

EMBEDDING_DIM = 64
N_HEADS = 4
FEEDFORWARD_DIM = 128
N_LAYERS = 2


class MiniatureEncoder(nn.Module):
    def __init__(self, vocab_size: int, max_len: int):
        super().__init__()
        self.vocab_size = vocab_size
        self.max_len = max_len
        self.token_embedding = nn.Embedding(vocab_size, EMBEDDING_DIM)
        self.position_embedding = nn.Embedding(max_len, EMBEDDING_DIM)
        layer = nn.TransformerEncoderLayer(
            d_model=EMBEDDING_DIM,
            nhead=N_HEADS,
            dim_feedforward=FEEDFORWARD_DIM,
            batch_first=True,
            dropout=0.1,
        )
        self.encoder = nn.TransformerEncoder(
            layer, num_layers=N_LAYERS, enable_nested_tensor=False
        )
        self.classifier = nn.Linear(EMBEDDING_DIM, 2)

    def forward(
        self, input_ids: torch.Tensor, attention_mask: torch.Tensor
    ) -> torch.Tensor:
        """``input_ids`` and ``attention_mask`` are [batch, seq]; returns [batch, 2]."""
        positions = torch.arange(input_ids.size(1), device=input_ids.device)
        hidden = self.token_embedding(input_ids) + self.position_embedding(positions)
        encoded = self.encoder(hidden, src_key_padding_mask=~attention_mask.bool())
        return self.classifier(encoded[:, 0, :])
