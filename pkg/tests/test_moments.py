import math
import random

import pytest

import reference
from helpers import corpus_of, seq

from seqmoments import (
    ConsistencyError,
    CoverageError,
    InputError,
    LabeledSet,
    baseline_moments,
    count_occurrences,
    enumerate_support,
    gold_moments,
    load_moment_table,
    load_support,
    model_moments,
    save_moment_table,
    save_support,
    seen_partition,
)


def test_enumerate_support_examples():
    corpus = corpus_of({"ab": 2, "bb": 1})
    assert enumerate_support(corpus, 1).members == {seq("a"), seq("b")}
    assert enumerate_support(corpus, 2).members == {seq("ab"), seq("bb")}
    assert enumerate_support(corpus_of({"ab": 1}), 3).members == frozenset()
    with pytest.raises(InputError):
        enumerate_support(corpus, 0)


def test_count_occurrences_examples():
    assert count_occurrences(seq("aa"), seq("aaa")) == 2
    assert count_occurrences(seq("ab"), seq("abab")) == 2
    assert count_occurrences(seq("ba"), seq("aaa")) == 0
    assert count_occurrences(seq("aaaa"), seq("aa")) == 0
    with pytest.raises(InputError):
        count_occurrences((), seq("aa"))


def test_count_occurrences_matches_reference():
    rng = random.Random(2)
    for _ in range(200):
        x = tuple(rng.choice("ab") for _ in range(rng.randint(1, 10)))
        z = tuple(rng.choice("ab") for _ in range(rng.randint(1, 4)))
        assert count_occurrences(z, x) == reference.ref_count(z, x)


def test_gold_moments_examples():
    domain = corpus_of({"ab": 2, "bb": 1})
    target = corpus_of({"ab": 2})
    sup1 = enumerate_support(domain, 1)
    gold1 = gold_moments(domain, target, 1, sup1)
    assert gold1.get(seq("a")) == 2 / 3
    assert gold1.get(seq("b")) == 2 / 3
    sup2 = enumerate_support(domain, 2)
    gold2 = gold_moments(domain, target, 2, sup2)
    assert gold2.get(seq("ab")) == 2 / 3
    assert gold2.get(seq("bb")) == 0.0
    assert gold2.normalizer == 3


def test_gold_moments_empty_target():
    from seqmoments import SequenceCorpus

    domain = corpus_of({"ab": 2, "bb": 1})
    empty = SequenceCorpus(domain.alphabet, {})
    table = gold_moments(domain, empty, 2, enumerate_support(domain, 2))
    assert table.values == {}
    assert table.get(seq("ab")) == 0.0


def test_gold_moments_support_mismatch():
    domain = corpus_of({"ab": 2, "bb": 1})
    target = corpus_of({"ab": 2})
    with pytest.raises(ConsistencyError):
        gold_moments(domain, target, 2, enumerate_support(domain, 1))


def test_gold_moments_requires_containment():
    domain = corpus_of({"ab": 2})
    target = corpus_of({"ab": 3})
    with pytest.raises(InputError):
        gold_moments(domain, target, 2, enumerate_support(domain, 2))


def test_model_moments_perfect_equals_gold():
    domain = corpus_of({"ab": 2, "bb": 1})
    target = corpus_of({"ab": 2})
    support = enumerate_support(domain, 2)
    gold = gold_moments(domain, target, 2, support)
    model = model_moments(domain, {seq("ab"): 1.0, seq("bb"): 0.0}, 2, support)
    assert model.values == gold.values
    assert model.get(seq("ab")) == 2 / 3
    assert model.get(seq("bb")) == 0.0


def test_model_moments_hand_example():
    domain = corpus_of({"ab": 2, "bb": 1})
    support = enumerate_support(domain, 1)
    model = model_moments(domain, {seq("ab"): 0.5, seq("bb"): 0.5}, 1, support)
    assert model.get(seq("a")) == pytest.approx(1 / 3, abs=1e-15)
    assert model.get(seq("b")) == pytest.approx(2 / 3, abs=1e-15)


def test_model_moments_all_zero_predictions():
    domain = corpus_of({"ab": 2, "bb": 1})
    support = enumerate_support(domain, 2)
    model = model_moments(domain, {seq("ab"): 0.0, seq("bb"): 0.0}, 2, support)
    assert model.values == {}


def test_model_moments_missing_prediction():
    domain = corpus_of({"ab": 2, "bb": 1})
    support = enumerate_support(domain, 2)
    with pytest.raises(CoverageError) as exc_info:
        model_moments(domain, {seq("ab"): 1.0}, 2, support)
    assert "bb" in str(exc_info.value)
    # override: missing treated as probability zero
    table = model_moments(domain, {seq("ab"): 1.0}, 2, support, missing_as_zero=True)
    assert table.get(seq("bb")) == 0.0
    assert table.get(seq("ab")) == 2 / 3


def test_model_moments_probability_range():
    domain = corpus_of({"ab": 1})
    support = enumerate_support(domain, 2)
    with pytest.raises(InputError, match="outside"):
        model_moments(domain, {seq("ab"): 1.5}, 2, support)
    with pytest.raises(InputError, match="outside"):
        model_moments(domain, {seq("ab"): float("nan")}, 2, support)


def test_baseline_moments_examples():
    domain = corpus_of({"ab": 2, "bb": 1})
    support = enumerate_support(domain, 2)
    table = baseline_moments(domain, LabeledSet([(seq("ab"), 1), (seq("bb"), 0)]), 2, support)
    assert table.get(seq("ab")) == 1 / 3
    assert table.get(seq("bb")) == 0.0
    # no positives -> all-zero table
    empty = baseline_moments(domain, LabeledSet([(seq("bb"), 0)]), 2, support)
    assert empty.values == {}
    # T enumerating every positive occurrence reproduces the gold moments
    full = baseline_moments(domain, LabeledSet([(seq("ab"), 1), (seq("ab"), 1)]), 2, support)
    gold = gold_moments(domain, corpus_of({"ab": 2}), 2, support)
    assert full.values == gold.values


def test_baseline_ignores_windows_outside_support():
    domain = corpus_of({"ab": 2, "bb": 1})
    support = enumerate_support(domain, 2)
    training = LabeledSet([(seq("cc"), 1), (seq("ab"), 1)])
    table = baseline_moments(domain, training, 2, support)
    assert set(table.values) == {seq("ab")}


def test_seen_partition_examples():
    domain = corpus_of({"ab": 2, "bb": 1})
    support = enumerate_support(domain, 2)
    part = seen_partition(LabeledSet([(seq("ab"), 1)]), support)
    assert part.seen == {seq("ab")}
    assert part.unseen == {seq("bb")}
    empty = seen_partition(LabeledSet([]), support)
    assert empty.seen == frozenset()
    assert empty.unseen == support.members
    # negative items count under the default reading
    sup1 = enumerate_support(domain, 1)
    part1 = seen_partition(LabeledSet([(seq("ab"), 0)]), sup1)
    assert part1.seen == {seq("a"), seq("b")}
    # ... but not under the positives-only reading
    pos_only = seen_partition(LabeledSet([(seq("ab"), 0)]), sup1, reading="positives")
    assert pos_only.seen == frozenset()
    assert pos_only.unseen == sup1.members
    with pytest.raises(InputError):
        seen_partition(LabeledSet([]), support, reading="sometimes")


# --- random-instance equivalence with the naive oracle ---------------------------

def _random_instance(rng):
    symbols = "abcde"[: rng.randint(1, 5)]
    n_distinct = rng.randint(1, 40)
    entries = {}
    for _ in range(n_distinct):
        length = rng.randint(1, 8)
        x = tuple(rng.choice(symbols) for _ in range(length))
        entries[x] = rng.randint(1, 5)
    corpus = corpus_of({"".join(k): v for k, v in entries.items()})
    return corpus


def test_pipeline_matches_oracle_exactly():
    rng = random.Random(42)
    for _ in range(30):
        domain = _random_instance(rng)
        n = rng.randint(1, 4)
        support = enumerate_support(domain, n)
        assert support.members == reference.ref_support(domain.entries, n)

        preds = {x: rng.random() for x in domain.entries}
        model = model_moments(domain, preds, n, support)
        ref = reference.ref_model(domain.entries, preds, n, domain.total)
        for z in support.members:
            assert model.get(z) == ref[z]

        # target = restriction of U to a random subset of distinct sequences
        key = {x for x in domain.entries if rng.random() < 0.5}
        from seqmoments import SequenceCorpus

        target = SequenceCorpus(domain.alphabet, {x: domain.entries[x] for x in key})
        gold = gold_moments(domain, target, n, support)
        ref_gold = reference.ref_gold(domain.entries, target.entries, n, domain.total)
        for z in support.members:
            assert gold.get(z) == ref_gold[z]

        items = [
            (x, 1 if x in key else 0)
            for x in list(domain.entries) * 2
            if rng.random() < 0.5
        ]
        training = LabeledSet(items)
        baseline = baseline_moments(domain, training, n, support)
        ref_base = reference.ref_baseline(domain.total, items, n, support.members)
        for z in support.members:
            assert baseline.get(z) == ref_base[z]

        for reading in ("all", "positives"):
            part = seen_partition(training, support, reading=reading)
            assert part.seen == reference.ref_seen(items, n, support.members, reading)
            assert part.seen | part.unseen == support.members
            assert part.seen & part.unseen == frozenset()


def test_parallel_workers_are_bitwise_identical():
    rng = random.Random(7)
    domain = _random_instance(rng)
    while domain.distinct < 16:  # large enough that the pool path really runs
        domain = _random_instance(rng)
    preds = {x: rng.random() for x in domain.entries}
    for n in (1, 2, 3):
        support = enumerate_support(domain, n)
        serial = model_moments(domain, preds, n, support, workers=1)
        for workers in (2, 4):
            parallel = model_moments(domain, preds, n, support, workers=workers)
            assert parallel.values == serial.values
        from seqmoments import SequenceCorpus

        target = SequenceCorpus(domain.alphabet, dict(list(domain.entries.items())[:12]))
        g1 = gold_moments(domain, target, n, support, workers=1)
        g4 = gold_moments(domain, target, n, support, workers=4)
        assert g1.values == g4.values


def test_model_moments_linearity():
    rng = random.Random(13)
    domain = _random_instance(rng)
    p1 = {x: rng.random() for x in domain.entries}
    p2 = {x: rng.random() for x in domain.entries}
    alpha = 0.375
    mix = {x: alpha * p1[x] + (1 - alpha) * p2[x] for x in domain.entries}
    n = 2
    support = enumerate_support(domain, n)
    t1 = model_moments(domain, p1, n, support)
    t2 = model_moments(domain, p2, n, support)
    tm = model_moments(domain, mix, n, support)
    for z in support.members:
        expected = alpha * t1.get(z) + (1 - alpha) * t2.get(z)
        assert tm.get(z) == pytest.approx(expected, abs=1e-12)


def test_model_moments_monotone_in_probabilities():
    rng = random.Random(17)
    domain = _random_instance(rng)
    preds = {x: rng.random() * 0.5 for x in domain.entries}
    n = 2
    support = enumerate_support(domain, n)
    before = model_moments(domain, preds, n, support)
    bumped = dict(preds)
    some_x = next(iter(domain.entries))
    bumped[some_x] = min(1.0, preds[some_x] + 0.4)
    after = model_moments(domain, bumped, n, support)
    for z in support.members:
        assert after.get(z) >= before.get(z)


def test_gold_mass_bound():
    rng = random.Random(23)
    for _ in range(10):
        domain = _random_instance(rng)
        from seqmoments import SequenceCorpus

        key = {x for x in domain.entries if rng.random() < 0.5}
        target = SequenceCorpus(domain.alphabet, {x: domain.entries[x] for x in key})
        min_len = min((len(x) for x in domain.entries), default=1)
        for n in range(1, min_len + 1):
            support = enumerate_support(domain, n)
            gold = gold_moments(domain, target, n, support)
            lhs = math.fsum(gold.values.values())
            rhs = sum(m * (len(x) - n + 1) for x, m in target.entries.items()) / domain.total
            assert lhs == pytest.approx(rhs, abs=1e-12)


# --- serialization ----------------------------------------------------------------

def test_moment_table_round_trip(tmp_path):
    domain = corpus_of({"ab": 2, "bb": 1, "ba": 3})
    support = enumerate_support(domain, 2)
    preds = {seq("ab"): 1 / 3, seq("bb"): 0.123456789012345678, seq("ba"): 1.0}
    table = model_moments(domain, preds, 2, support)
    path = tmp_path / "m.tsv"
    save_moment_table(table, domain.alphabet, path)
    back = load_moment_table(path, domain.alphabet, support)
    assert back.values == table.values  # 17 significant digits round-trip doubles
    assert back.normalizer == table.normalizer
    assert back.n == table.n


def test_moment_table_serialization_is_stable(tmp_path):
    domain = corpus_of({"ab": 2, "bb": 1, "ba": 3})
    support = enumerate_support(domain, 2)
    preds = {x: 0.7 for x in domain.entries}
    p1, p2 = tmp_path / "a.tsv", tmp_path / "b.tsv"
    save_moment_table(model_moments(domain, preds, 2, support), domain.alphabet, p1)
    save_moment_table(model_moments(domain, preds, 2, support), domain.alphabet, p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_support_round_trip(tmp_path):
    domain = corpus_of({"abc": 1, "bca": 2})
    support = enumerate_support(domain, 2)
    path = tmp_path / "sup.txt"
    save_support(support, domain.alphabet, path)
    back = load_support(path, domain.alphabet, 2)
    assert back.members == support.members
    assert path.read_text().splitlines() == sorted(
        domain.alphabet.render(z) for z in support.members
    )
