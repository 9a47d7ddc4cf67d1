"""Fine-tuning on exported pairs and scoring with the saved artifact.

The artifact directory holds model.pt (weights), vocab.json, and
config.json; it is self-contained and reloadable. Only the shipped
"miniature" base model trains here; the full-size pre-trained variants
are deployment choices, out of scope at this scale.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Sequence

import torch
from torch import nn

from .data import PAD, TrainingPair, Vocabulary, encode
from .errors import DataError
from .model import MiniatureEncoder


@dataclass
class FineTuneConfig:
    base_model: str = "miniature"
    max_query_tokens: int = 64
    max_sequence_tokens: int = 384
    learning_rate: float = 3e-5
    epochs: int = 2
    batch_size: int = 24
    seed: int = 0

    def validate(self) -> None:
        if self.base_model != "miniature":
            raise DataError(
                f"unknown base model {self.base_model!r}; only 'miniature' ships"
            )
        if self.max_query_tokens < 1:
            raise DataError("max_query_tokens must be >= 1")
        if self.max_sequence_tokens <= self.max_query_tokens:
            raise DataError("max_sequence_tokens must exceed max_query_tokens")
        if self.learning_rate <= 0:
            raise DataError("learning_rate must be > 0")
        if self.epochs < 1:
            raise DataError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise DataError("batch_size must be >= 1")


def ci_preset(seed: int = 0) -> FineTuneConfig:
    """Seconds-scale training preset for continuous integration.

    The shipped encoder trains from scratch, so it needs a far larger
    learning rate than the fine-tuning default, and short sequences keep
    the forward pass cheap.
    """
    return FineTuneConfig(
        max_query_tokens=16,
        max_sequence_tokens=64,
        learning_rate=3e-3,
        epochs=2,
        batch_size=8,
        seed=seed,
    )


def _batch_tensors(
    encoded: Sequence[list[int]], max_len: int
) -> tuple[torch.Tensor, torch.Tensor]:
    width = min(max(len(ids) for ids in encoded), max_len)
    input_ids = torch.full((len(encoded), width), PAD, dtype=torch.long)
    mask = torch.zeros((len(encoded), width), dtype=torch.bool)
    for row, ids in enumerate(encoded):
        ids = ids[:width]
        input_ids[row, : len(ids)] = torch.tensor(ids, dtype=torch.long)
        mask[row, : len(ids)] = True
    return input_ids, mask


def train(
    pairs: Sequence[TrainingPair],
    config: FineTuneConfig,
    artifact_dir: str | Path,
) -> Path:
    """Train the relevance head and save a reloadable artifact directory."""
    config.validate()
    if not pairs:
        raise DataError("training file contains no pairs")
    labels = {p.label for p in pairs}
    if labels != {0, 1}:
        raise DataError(
            f"training needs both labels, found only {sorted(labels)}"
        )

    order = list(range(len(pairs)))
    random.Random(config.seed).shuffle(order)
    torch.manual_seed(config.seed)

    vocab = Vocabulary.build(
        text for p in pairs for text in (p.query, p.passage)
    )
    encoded = [
        encode(vocab, p.query, p.passage,
               config.max_query_tokens, config.max_sequence_tokens)
        for p in pairs
    ]
    model = MiniatureEncoder(len(vocab), config.max_sequence_tokens)
    model.train()
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    loss_fn = nn.CrossEntropyLoss()

    for _ in range(config.epochs):
        for lo in range(0, len(order), config.batch_size):
            chunk = order[lo : lo + config.batch_size]
            input_ids, mask = _batch_tensors(
                [encoded[i] for i in chunk], config.max_sequence_tokens
            )
            targets = torch.tensor([pairs[i].label for i in chunk])
            optimizer.zero_grad()
            loss = loss_fn(model(input_ids, mask), targets)
            loss.backward()
            optimizer.step()

    out = Path(artifact_dir)
    out.mkdir(parents=True, exist_ok=True)
    torch.save(model.state_dict(), out / "model.pt")
    vocab.save(out / "vocab.json")
    with open(out / "config.json", "w", encoding="utf-8") as fh:
        json.dump(asdict(config), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out


class ScoringModel:
    """A loaded artifact; scores query/passage pairs deterministically."""

    def __init__(self, model: MiniatureEncoder, vocab: Vocabulary,
                 config: FineTuneConfig):
        self.model = model
        self.vocab = vocab
        self.config = config
        self.model.eval()

    def score_batch(self, pairs: Sequence[tuple[str, str]]) -> list[float]:
        """Positive-class probability for each (query, passage)."""
        if not pairs:
            return []
        encoded = [
            encode(self.vocab, query, passage,
                   self.config.max_query_tokens, self.config.max_sequence_tokens)
            for query, passage in pairs
        ]
        input_ids, mask = _batch_tensors(encoded, self.config.max_sequence_tokens)
        with torch.no_grad():
            logits = self.model(input_ids, mask)
            probs = torch.softmax(logits, dim=1)[:, 1]
        return [float(p) for p in probs]


def load_artifact(artifact_dir: str | Path) -> ScoringModel:
    path = Path(artifact_dir)
    try:
        with open(path / "config.json", "r", encoding="utf-8") as fh:
            config = FineTuneConfig(**json.load(fh))
    except (OSError, json.JSONDecodeError, TypeError) as exc:
        raise DataError(f"cannot load artifact config from {path}: {exc}") from exc
    config.validate()
    vocab = Vocabulary.load(path / "vocab.json")
    model = MiniatureEncoder(len(vocab), config.max_sequence_tokens)
    try:
        state = torch.load(path / "model.pt", map_location="cpu")
        model.load_state_dict(state)
    except (OSError, RuntimeError) as exc:
        raise DataError(f"cannot load model weights from {path}: {exc}") from exc
    return ScoringModel(model, vocab, config)
