"""Shared fixtures-in-plain-code: seeded random corpora, tasks, and tables."""

import random

from seqmoments import (
    Alphabet,
    MomentTable,
    SequenceCorpus,
    SupportSet,
    build_task,
    infer_alphabet,
)


def seq(text):
    """Shorthand: 'abc' -> ('a','b','c')."""
    return tuple(text)


def corpus_of(counted, tokenization="char"):
    """counted: dict like {'ab': 2, 'bb': 1}."""
    entries = {seq(k): v for k, v in counted.items()}
    alphabet = infer_alphabet(entries.keys(), tokenization)
    return SequenceCorpus(alphabet, entries)


def random_families(rng: random.Random, n_symbols=4, n_families=3,
                    n_seqs=20, min_len=3, max_len=8):
    symbols = "abcdefghijklmnopqrstuvwxyz"[:n_symbols]
    families = {}
    for f in range(n_families):
        count = rng.randint(1, n_seqs)
        seqs = []
        for _ in range(count):
            length = rng.randint(min_len, max_len)
            seqs.append(tuple(rng.choice(symbols) for _ in range(length)))
        families[f"F{f}"] = seqs
    return families


def random_task(rng: random.Random, segment_length=None, **kwargs):
    families = random_families(rng, **kwargs)
    max_l = kwargs.get("min_len", 3)
    segment_length = segment_length or rng.randint(1, max_l)
    alphabet = infer_alphabet((s for seqs in families.values() for s in seqs))
    return build_task(families, alphabet, segment_length)


def table_from_values(values, normalizer, support=None, n=None):
    """Build a MomentTable over an explicit support for metric-level tests."""
    keys = list(values)
    if n is None:
        n = len(keys[0])
    if support is None:
        support = SupportSet(n, frozenset(keys))
    nonzero = {k: v for k, v in values.items() if v != 0.0}
    return MomentTable(n=n, support=support, values=nonzero, normalizer=normalizer)
