"""Shared fixtures: a separable synthetic pair set and a trained artifact."""

from __future__ import annotations

import random

import pytest

from scorer_service.data import TrainingPair
from scorer_service.train import ci_preset, load_artifact, train

CONDITIONS = [
    "dysphagia", "orthopnea", "bruxism", "tinnitus",
    "vertigo", "syncope", "pruritus", "epistaxis",
]
FILLERS = [
    "review", "unremarkable", "stable", "followup", "routine",
    "findings", "noted", "visit", "chart", "baseline",
]


def separable_sets(n_each: int = 100, seed: int = 7):
    """100/100 labeled pairs whose signal is a lexical overlap, split 160/40.

    Positives quote the query's condition token in the passage; negatives
    use only filler vocabulary. The split is stratified so the held-out
    40 stay balanced.
    """
    rng = random.Random(seed)
    positives, negatives = [], []
    for i in range(n_each):
        condition = rng.choice(CONDITIONS)
        query = f"Patients with {condition}."
        positives.append(TrainingPair(
            f"T{i:03d}", f"RP{i:03d}", query,
            f"progress note; {condition}; {rng.choice(FILLERS)}", 1,
        ))
        negatives.append(TrainingPair(
            f"T{i:03d}", f"RN{i:03d}", query,
            f"progress note; {rng.choice(FILLERS)}; {rng.choice(FILLERS)}", 0,
        ))
    rng.shuffle(positives)
    rng.shuffle(negatives)
    train_set = positives[: n_each - 20] + negatives[: n_each - 20]
    eval_set = positives[n_each - 20 :] + negatives[n_each - 20 :]
    rng.shuffle(train_set)
    rng.shuffle(eval_set)
    return train_set, eval_set


@pytest.fixture(scope="session")
def separable_data():
    return separable_sets()


@pytest.fixture(scope="session")
def artifact_dir(tmp_path_factory, separable_data):
    train_set, _ = separable_data
    return train(train_set, ci_preset(seed=0),
                 tmp_path_factory.mktemp("artifact"))


@pytest.fixture(scope="session")
def model(artifact_dir):
    return load_artifact(artifact_dir)
