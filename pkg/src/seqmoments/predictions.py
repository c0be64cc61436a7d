"""Classifier prediction sets: loading, validation, and synthetic predictors."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Alphabet, Sequence, SequenceCorpus, TaskBundle
from .errors import InputError


@dataclass
class PredictionSet:
    """Map from distinct sequence to positive-class probability in [0, 1]."""

    model_id: str
    entries: dict[Sequence, float]

    def __post_init__(self):
        for seq, p in self.entries.items():
            if not (0.0 <= p <= 1.0):
                raise InputError(f"probability {p!r} for model {self.model_id!r} is outside [0, 1]")

    def __len__(self) -> int:
        return len(self.entries)


def load_predictions(path, alphabet: Alphabet, model_id: str | None = None) -> PredictionSet:
    """Read ``sequence<TAB>probability`` lines.

    Probabilities accept decimal or scientific notation and must lie in
    [0, 1]; duplicate sequences are an error.  model_id defaults to the file
    stem.
    """
    path = Path(path)
    if model_id is None:
        model_id = path.stem
    entries: dict[Sequence, float] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            raise InputError(f"{path}:{lineno}: empty line")
        parts = line.split("\t")
        if len(parts) != 2:
            raise InputError(f"{path}:{lineno}: expected 'sequence<TAB>probability', got {raw!r}")
        seq_text, prob_text = parts
        try:
            seq = alphabet.parse(seq_text)
        except InputError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
        try:
            p = float(prob_text)
        except ValueError:
            raise InputError(f"{path}:{lineno}: bad probability {prob_text!r}") from None
        if not (0.0 <= p <= 1.0):
            raise InputError(f"{path}:{lineno}: probability {prob_text!r} outside [0, 1]")
        if seq in entries:
            raise InputError(f"{path}:{lineno}: duplicate sequence {seq_text!r}")
        entries[seq] = p
    if not entries:
        raise InputError(f"{path}: empty prediction file")
    return PredictionSet(model_id=model_id, entries=entries)


def save_predictions(predictions: PredictionSet, alphabet: Alphabet, path) -> None:
    render = alphabet.render
    lines = [
        f"{render(seq)}\t{format(predictions.entries[seq], '.17g')}"
        for seq in sorted(predictions.entries)
    ]
    Path(path).write_text("\n".join(lines) + "\n")


def validate_coverage(predictions: PredictionSet, domain: SequenceCorpus) -> list[Sequence]:
    """Distinct domain sequences with no prediction, sorted (empty = full coverage)."""
    entries = predictions.entries
    return [x for x in domain.distinct_sorted() if x not in entries]


def oracle_predictor(task: TaskBundle) -> PredictionSet:
    """Perfect classifier: probability 1 on the positive key, 0 elsewhere."""
    key = task.positive_key
    entries = {x: (1.0 if x in key else 0.0) for x in task.domain.entries}
    return PredictionSet(model_id="oracle", entries=entries)


def noisy_oracle_predictor(task: TaskBundle, flip_rate: float, seed: int) -> PredictionSet:
    """Oracle with each probability replaced by a uniform draw at rate flip_rate.

    Deterministic in (task, flip_rate, seed); flip_rate 0 reproduces the
    oracle exactly because the replacement draws are made either way.
    """
    if not (0.0 <= flip_rate < 1.0):
        raise InputError(f"flip rate must be in [0, 1), got {flip_rate}")
    ordered = task.domain.distinct_sorted()
    key = task.positive_key
    rng = np.random.Generator(np.random.PCG64(seed))
    flips = rng.random(len(ordered))
    draws = rng.random(len(ordered))
    entries = {}
    for i, x in enumerate(ordered):
        if flips[i] < flip_rate:
            entries[x] = float(draws[i])
        else:
            entries[x] = 1.0 if x in key else 0.0
    return PredictionSet(model_id=f"noisy-oracle-{flip_rate:g}-{seed}", entries=entries)
