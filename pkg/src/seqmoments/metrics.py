"""Rank-based agreement metrics between moment tables.

All metrics compare a candidate moment function against the gold moment
function over an evaluation domain (the full support, or its unseen part).
UNDEFINED outcomes are represented as None and never as NaN:

* MSPC   -- Spearman correlation over the whole domain, zeros materialized.
* MSPCP  -- Spearman restricted to subsequences with positive gold moments.
* MR     -- 1 minus the mean normalized descending rank of the candidate's
            values at gold-positive subsequences (rank 1 = largest value;
            ties share their average rank).
* *-U    -- the same three metrics on the unseen part of a seen/unseen split.
* MICRO  -- weighted mean across lengths; weights are the evaluated-domain
            sizes (MSPC, MR) or the gold-positive counts (MSPCP), with
            undefined lengths dropped and the weights renormalized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .errors import ConsistencyError, InputError
from .moments import MomentTable, SeenPartition
from .corpus import Sequence

METRICS = ("MSPC", "MSPCP", "MR", "MSPC-U", "MSPCP-U", "MR-U")
BASELINE_NAME = "BASELINE"


def average_ranks(values) -> np.ndarray:
    """Ascending 1-based ranks with ties averaged."""
    return rankdata(np.asarray(values, dtype=np.float64), method="average")


def spearman(a, b) -> float | None:
    """Spearman rank correlation with average ties.

    Returns None when either side has zero rank variance.  Identical rank
    vectors short-circuit to exactly 1.0 (no rounding on the happy path).
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InputError(f"length mismatch: {a.shape} vs {b.shape}")
    if a.ndim != 1 or a.size < 2:
        raise InputError("rank correlation needs two 1-d vectors of length >= 2")
    ra = rankdata(a, method="average")
    rb = rankdata(b, method="average")
    return _pearson_of_ranks(ra, rb)


def _pearson_of_ranks(ra: np.ndarray, rb: np.ndarray) -> float | None:
    if (ra == ra[0]).all() or (rb == rb[0]).all():
        return None
    if (ra == rb).all():
        return 1.0
    da = ra - ra.mean()
    db = rb - rb.mean()
    num = float(da @ db)
    den = math.sqrt(float(da @ da) * float(db @ db))
    if den == 0.0:
        return None
    r = num / den
    return min(1.0, max(-1.0, r))


def _check_compatible(a: MomentTable, b: MomentTable) -> None:
    if a.n != b.n:
        raise ConsistencyError(f"moment tables for different lengths: {a.n} vs {b.n}")
    if a.support is not b.support and a.support.members != b.support.members:
        raise ConsistencyError("moment tables built over different supports")
    if a.normalizer != b.normalizer:
        raise ConsistencyError(f"moment tables with different normalizers: {a.normalizer} vs {b.normalizer}")


def _domain_list(model: MomentTable, gold: MomentTable, domain) -> list[Sequence]:
    _check_compatible(model, gold)
    if domain is None:
        return model.support.sorted_members()
    dom = sorted(domain)
    for z in dom:
        if z not in model.support.members:
            raise ConsistencyError("evaluation domain contains subsequences outside the support")
    return dom


def _vector(table: MomentTable, domain: list[Sequence]) -> np.ndarray:
    get = table.values.get
    return np.array([get(z, 0.0) for z in domain], dtype=np.float64)


def mspc(model: MomentTable, gold: MomentTable, domain=None) -> float | None:
    """Spearman of model vs gold moments over the domain (default: full support)."""
    dom = _domain_list(model, gold, domain)
    if len(dom) < 2:
        return None
    return _pearson_of_ranks(
        average_ranks(_vector(model, dom)), average_ranks(_vector(gold, dom))
    )


def mspcp(model: MomentTable, gold: MomentTable, domain=None) -> float | None:
    """Spearman restricted to domain entries whose gold moment is positive."""
    dom = _domain_list(model, gold, domain)
    positive = [z for z in dom if gold.values.get(z, 0.0) > 0.0]
    if len(positive) < 2:
        return None
    return _pearson_of_ranks(
        average_ranks(_vector(model, positive)), average_ranks(_vector(gold, positive))
    )


def mr(model: MomentTable, gold: MomentTable, domain=None) -> float | None:
    """Mean-rank score of gold-positive entries under the model's ordering.

    Ranks are descending (rank 1 = largest model moment) with ties averaged;
    the score is 1 - mean(rank)/N.  None when no or all entries are
    gold-positive (the rank of the positives carries no signal).
    """
    dom = _domain_list(model, gold, domain)
    n_total = len(dom)
    gold_vec = _vector(gold, dom)
    positive = gold_vec > 0.0
    k = int(positive.sum())
    if k == 0 or k == n_total:
        return None
    desc_ranks = rankdata(-_vector(model, dom), method="average")
    return 1.0 - float(desc_ranks[positive].mean()) / n_total


def micro(per_length: dict[int, float | None], weights: dict[int, int]) -> float | None:
    """Weighted mean over lengths, dropping undefined values and renormalizing."""
    kept = []
    for n, value in per_length.items():
        if n not in weights:
            raise InputError(f"no weight for length {n}")
        w = weights[n]
        if w < 0:
            raise InputError(f"negative weight {w} for length {n}")
        if value is None or w == 0:
            continue
        kept.append((w, value))
    if not kept:
        return None
    first = kept[0][1]
    if all(value == first for _, value in kept):
        return first  # a weighted mean of equal values is that value, bit for bit
    return math.fsum(w * value for w, value in kept) / math.fsum(float(w) for w, _ in kept)


def model_pairwise(a: MomentTable, b: MomentTable) -> float | None:
    """Spearman agreement between two model moment tables over their support."""
    dom = _domain_list(a, b, None)
    if len(dom) < 2:
        return None
    return _pearson_of_ranks(average_ranks(_vector(a, dom)), average_ranks(_vector(b, dom)))


@dataclass
class MetricReport:
    """Per-length and MICRO metric values for a set of models.

    ``values`` is keyed by (metric, model, n); ``micro_values`` by
    (metric, model).  None means the metric is undefined there.
    """

    lengths: tuple[int, ...]
    models: tuple[str, ...]
    values: dict[tuple[str, str, int], float | None]
    micro_values: dict[tuple[str, str], float | None]
    support_sizes: dict[int, int]
    gold_nonzero: dict[int, int]
    unseen_sizes: dict[int, int]
    unseen_gold_nonzero: dict[int, int]
    seen_reading: str

    def value(self, metric: str, model: str, n: int) -> float | None:
        return self.values[(metric, model, n)]

    def micro_value(self, metric: str, model: str) -> float | None:
        return self.micro_values[(metric, model)]


def evaluate(models: dict[str, dict[int, MomentTable]],
             gold: dict[int, MomentTable],
             partitions: dict[int, SeenPartition],
             baseline: dict[int, MomentTable] | None = None,
             seen_reading: str = "all") -> MetricReport:
    """Score every model (plus the baseline) against gold moments.

    ``models`` maps model name -> {n: MomentTable}; ``gold`` and
    ``partitions`` must cover the same lengths.  The baseline, when given,
    is reported as an extra model column named BASELINE.
    """
    lengths = tuple(sorted(gold))
    if not lengths:
        raise InputError("no lengths to evaluate")
    for name, tables in models.items():
        if sorted(tables) != list(lengths):
            raise ConsistencyError(f"model {name!r} does not cover lengths {list(lengths)}")
    if sorted(partitions) != list(lengths):
        raise ConsistencyError(f"partitions do not cover lengths {list(lengths)}")
    if baseline is not None and sorted(baseline) != list(lengths):
        raise ConsistencyError(f"baseline does not cover lengths {list(lengths)}")

    columns = dict(models)
    if baseline is not None:
        if BASELINE_NAME in columns:
            raise InputError(f"model name {BASELINE_NAME!r} is reserved for the baseline column")
        columns[BASELINE_NAME] = baseline

    values: dict[tuple[str, str, int], float | None] = {}
    support_sizes: dict[int, int] = {}
    gold_nonzero: dict[int, int] = {}
    unseen_sizes: dict[int, int] = {}
    unseen_gold_nonzero: dict[int, int] = {}

    for n in lengths:
        gold_table = gold[n]
        part = partitions[n]
        if part.support is not gold_table.support and part.support.members != gold_table.support.members:
            raise ConsistencyError(f"partition for length {n} built over a different support")
        full = gold_table.support.sorted_members()
        unseen_set = part.unseen
        unseen = [z for z in full if z in unseen_set]

        support_sizes[n] = len(full)
        unseen_sizes[n] = len(unseen)
        gold_nonzero[n] = sum(1 for z in full if gold_table.values.get(z, 0.0) > 0.0)
        unseen_gold_nonzero[n] = sum(1 for z in unseen if gold_table.values.get(z, 0.0) > 0.0)

        for name, tables in columns.items():
            table = tables[n]
            values[("MSPC", name, n)] = mspc(table, gold_table, full)
            values[("MSPCP", name, n)] = mspcp(table, gold_table, full)
            values[("MR", name, n)] = mr(table, gold_table, full)
            values[("MSPC-U", name, n)] = mspc(table, gold_table, unseen)
            values[("MSPCP-U", name, n)] = mspcp(table, gold_table, unseen)
            values[("MR-U", name, n)] = mr(table, gold_table, unseen)

    weight_maps = {
        "MSPC": support_sizes,
        "MSPCP": gold_nonzero,
        "MR": support_sizes,
        "MSPC-U": unseen_sizes,
        "MSPCP-U": unseen_gold_nonzero,
        "MR-U": unseen_sizes,
    }
    micro_values: dict[tuple[str, str], float | None] = {}
    for metric in METRICS:
        weights = weight_maps[metric]
        for name in columns:
            per_length = {n: values[(metric, name, n)] for n in lengths}
            micro_values[(metric, name)] = micro(per_length, weights)

    return MetricReport(
        lengths=lengths,
        models=tuple(columns),
        values=values,
        micro_values=micro_values,
        support_sizes=support_sizes,
        gold_nonzero=gold_nonzero,
        unseen_sizes=unseen_sizes,
        unseen_gold_nonzero=unseen_gold_nonzero,
        seen_reading=seen_reading,
    )
