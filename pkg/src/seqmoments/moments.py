"""Subsequence supports and moment tables.

A moment table maps every distinct length-n subsequence of the domain corpus
to its expected per-segment occurrence count under one of three weightings:

* gold moments      -- weight 1 on target-class occurrences,
* model moments     -- weight = classifier probability per distinct sequence,
* baseline moments  -- weight 1 on memorized training positives.

All three divide by the domain multiset size, so a perfect classifier's
model table equals the gold table entry for entry.

Numerical contract: gold and baseline totals are integer-exact; model totals
are exactly rounded sums of the per-sequence contributions
``p(x) * (multiplicity * window_count)``.  Exactly rounded summation makes
every value a pure function of the underlying real number, so results are
bitwise identical for any worker count or accumulation order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .corpus import Alphabet, LabeledSet, Sequence, SequenceCorpus
from .errors import ConsistencyError, CoverageError, InputError

SEEN_READINGS = ("all", "positives")


@dataclass
class SupportSet:
    """All distinct length-n subsequences occurring in a corpus."""

    n: int
    members: frozenset[Sequence]
    _sorted: list[Sequence] | None = field(init=False, default=None, repr=False)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, seq: Sequence) -> bool:
        return seq in self.members

    def sorted_members(self) -> list[Sequence]:
        if self._sorted is None:
            self._sorted = sorted(self.members)
        return self._sorted


@dataclass
class MomentTable:
    """Sparse moment function over a support: absent keys are exact zeros."""

    n: int
    support: SupportSet
    values: dict[Sequence, float]
    normalizer: int  # domain multiset size |U|

    def get(self, seq: Sequence) -> float:
        return self.values.get(seq, 0.0)

    @property
    def nonzero(self) -> int:
        return len(self.values)


@dataclass
class SeenPartition:
    """Split of a support into training-seen and unseen subsequences."""

    n: int
    support: SupportSet
    seen: frozenset[Sequence]
    reading: str

    def __post_init__(self):
        if not self.seen <= self.support.members:
            raise ConsistencyError("seen set contains subsequences outside the support")

    @property
    def unseen(self) -> frozenset[Sequence]:
        return self.support.members - self.seen


def enumerate_support(corpus: SequenceCorpus, n: int) -> SupportSet:
    """Set of all distinct length-n windows across the corpus (n >= 1)."""
    if n < 1:
        raise InputError(f"subsequence length must be >= 1, got {n}")
    members: set[Sequence] = set()
    add = members.add
    for x in corpus.entries:
        for i in range(len(x) - n + 1):
            add(x[i : i + n])
    return SupportSet(n, frozenset(members))


def count_occurrences(z: Sequence, x: Sequence) -> int:
    """Number of (overlapping) positions at which z occurs inside x."""
    n = len(z)
    if n == 0:
        raise InputError("empty subsequence")
    count = 0
    for i in range(len(x) - n + 1):
        if x[i : i + n] == z:
            count += 1
    return count


# --- exact accumulation -----------------------------------------------------

def _grow(expansion: list[float], value: float) -> None:
    # Error-free transformation: after the call the expansion's components sum
    # to exactly (old exact value + value).  Branch-free two_sum per component;
    # zero components are dropped to keep expansions short.
    v = value
    n_out = 0
    for a in expansion:
        s = a + v
        bv = s - a
        err = (a - (s - bv)) + (v - bv)
        if err != 0.0:
            expansion[n_out] = err
            n_out += 1
        v = s
    del expansion[n_out:]
    expansion.append(v)


def _window_counts(x: Sequence, n: int) -> dict[Sequence, int]:
    counts: dict[Sequence, int] = {}
    get = counts.get
    for i in range(len(x) - n + 1):
        z = x[i : i + n]
        counts[z] = get(z, 0) + 1
    return counts


def _int_partial(chunk: list[tuple[Sequence, int]], n: int) -> dict[Sequence, int]:
    # Integer occurrence totals for one slice of (sequence, multiplicity) pairs.
    acc: dict[Sequence, int] = {}
    get = acc.get
    for x, mult in chunk:
        for i in range(len(x) - n + 1):
            z = x[i : i + n]
            acc[z] = get(z, 0) + mult
    return acc


def _model_partial(chunk: list[tuple[Sequence, int, float]], n: int) -> dict[Sequence, list[float]]:
    # Exact expansions of sum(p * (mult*count)) for one slice of the domain.
    acc: dict[Sequence, list[float]] = {}
    get = acc.get
    for x, mult, p in chunk:
        if len(x) < n:
            continue
        if len(x) == n:
            # single window, count 1: skip the per-window tally
            e = get(x)
            if e is None:
                acc[x] = [p * mult]
            else:
                _grow(e, p * mult)
            continue
        for z, count in _window_counts(x, n).items():
            v = p * (mult * count)
            e = get(z)
            if e is None:
                acc[z] = [v]
            else:
                _grow(e, v)
    return acc


def _chunks(items: list, k: int) -> list[list]:
    size = (len(items) + k - 1) // k if items else 1
    return [items[i : i + size] for i in range(0, len(items), size)]


def _check_support(support: SupportSet, n: int) -> None:
    if support.n != n:
        raise ConsistencyError(f"support is for length {support.n}, expected {n}")


def _check_workers(workers: int) -> None:
    if workers < 1:
        raise InputError(f"worker count must be >= 1, got {workers}")


def _spot_check_membership(keys, support: SupportSet, what: str) -> None:
    for z in keys:
        if z not in support.members:
            raise ConsistencyError(f"{what} produced subsequence outside the support")


def gold_moments(domain: SequenceCorpus, target: SequenceCorpus, n: int,
                 support: SupportSet, workers: int = 1) -> MomentTable:
    """Target-class moments: occurrence totals over Y, divided by |U|.

    Integer-exact up to the single final division.  An empty target yields
    the all-zero table.
    """
    _check_support(support, n)
    _check_workers(workers)
    if not target.is_submultiset_of(domain):
        raise InputError("target multiset is not contained in the domain multiset")
    items = [(x, mult) for x, mult in sorted(target.entries.items())]
    if workers == 1 or len(items) < 2 * workers:
        partials = [_int_partial(items, n)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_int_partial, _chunks(items, workers), [n] * workers))
    totals: dict[Sequence, int] = {}
    for part in partials:
        for z, t in part.items():
            totals[z] = totals.get(z, 0) + t
    _spot_check_membership(totals, support, "target corpus")
    norm = domain.total
    values = {z: totals[z] / norm for z in sorted(totals)}
    return MomentTable(n=n, support=support, values=values, normalizer=norm)


def model_moments(domain: SequenceCorpus, predictions: dict[Sequence, float], n: int,
                  support: SupportSet, workers: int = 1,
                  missing_as_zero: bool = False) -> MomentTable:
    """Classifier-induced moments over the domain.

    Every distinct domain sequence needs a probability in [0, 1]; missing
    entries raise CoverageError unless missing_as_zero is set.  Per-entry
    contribution is p * (multiplicity * window_count) with the integer product
    exact; totals are exactly rounded, then divided by |U|.
    """
    _check_support(support, n)
    _check_workers(workers)
    items: list[tuple[Sequence, int, float]] = []
    missing: list[Sequence] = []
    for x in domain.distinct_sorted():
        p = predictions.get(x)
        if p is None:
            missing.append(x)
            continue
        p = float(p)
        if not (0.0 <= p <= 1.0):
            raise InputError(
                f"probability {p!r} for {domain.alphabet.render(x)!r} is outside [0, 1]"
            )
        if p != 0.0:
            items.append((x, domain.entries[x], p))
    if missing and not missing_as_zero:
        rendered = [domain.alphabet.render(x) for x in missing]
        shown = ", ".join(rendered[:5]) + (", ..." if len(rendered) > 5 else "")
        raise CoverageError(
            f"{len(missing)} domain sequences lack predictions: {shown}", missing=rendered
        )
    if workers == 1 or len(items) < 2 * workers:
        partials = [_model_partial(items, n)]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_model_partial, _chunks(items, workers), [n] * workers))
    merged: dict[Sequence, list[float]] = {}
    for part in partials:
        for z, expansion in part.items():
            have = merged.get(z)
            if have is None:
                merged[z] = expansion
            else:
                have.extend(expansion)
    _spot_check_membership(merged, support, "domain corpus")
    norm = domain.total
    # fsum is exactly rounded, so the result is independent of how the
    # expansion components were produced or partitioned.
    values = {}
    for z in sorted(merged):
        total = math.fsum(merged[z])
        if total != 0.0:
            values[z] = total / norm
    return MomentTable(n=n, support=support, values=values, normalizer=norm)


def baseline_moments(domain: SequenceCorpus, training: LabeledSet, n: int,
                     support: SupportSet) -> MomentTable:
    """Memorization baseline: occurrence totals over training positives / |U|.

    Training items repeat as sampled; windows outside the support are ignored.
    Integer-exact, hence order-independent without further machinery.
    """
    _check_support(support, n)
    totals: dict[Sequence, int] = {}
    get = totals.get
    members = support.members
    for x, label in training.items:
        if label != 1:
            continue
        for i in range(len(x) - n + 1):
            z = x[i : i + n]
            if z in members:
                totals[z] = get(z, 0) + 1
    norm = domain.total
    values = {z: totals[z] / norm for z in sorted(totals)}
    return MomentTable(n=n, support=support, values=values, normalizer=norm)


def seen_partition(training: LabeledSet, support: SupportSet,
                   reading: str = "all") -> SeenPartition:
    """Mark support subsequences occurring in the training set as seen.

    reading='all' scans every training item; 'positives' only label-1 items.
    """
    if reading not in SEEN_READINGS:
        raise InputError(f"unknown seen reading {reading!r}; expected one of {SEEN_READINGS}")
    n = support.n
    members = support.members
    seen: set[Sequence] = set()
    add = seen.add
    for x, label in training.items:
        if reading == "positives" and label != 1:
            continue
        for i in range(len(x) - n + 1):
            z = x[i : i + n]
            if z in members:
                add(z)
    return SeenPartition(n=n, support=support, seen=frozenset(seen), reading=reading)


# --- serialization ----------------------------------------------------------

def save_support(support: SupportSet, alphabet: Alphabet, path) -> None:
    """One rendered subsequence per line, sorted."""
    render = alphabet.render
    Path(path).write_text("\n".join(render(z) for z in support.sorted_members()) + "\n")


def load_support(path, alphabet: Alphabet, n: int) -> SupportSet:
    members = set()
    path = Path(path)
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            raise InputError(f"{path}:{lineno}: empty line")
        try:
            z = alphabet.parse(line)
        except InputError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
        if len(z) != n:
            raise InputError(f"{path}:{lineno}: subsequence length {len(z)}, expected {n}")
        members.add(z)
    return SupportSet(n, frozenset(members))


def save_moment_table(table: MomentTable, alphabet: Alphabet, path) -> None:
    """Header ``n=<n>\\tnormalizer=<|U|>`` then sorted ``subsequence<TAB>value``.

    Values print with 17 significant digits so parsing them back reproduces
    the exact doubles.
    """
    render = alphabet.render
    lines = [f"n={table.n}\tnormalizer={table.normalizer}"]
    for z in sorted(table.values):
        lines.append(f"{render(z)}\t{format(table.values[z], '.17g')}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_moment_table(path, alphabet: Alphabet, support: SupportSet | None = None) -> MomentTable:
    path = Path(path)
    lines = path.read_text().splitlines()
    if not lines:
        raise InputError(f"{path}: empty moment table file")
    header = lines[0].split("\t")
    if len(header) != 2 or not header[0].startswith("n=") or not header[1].startswith("normalizer="):
        raise InputError(f"{path}:1: bad header {lines[0]!r}")
    try:
        n = int(header[0][2:])
        normalizer = int(header[1][len("normalizer="):])
    except ValueError:
        raise InputError(f"{path}:1: bad header {lines[0]!r}") from None
    values: dict[Sequence, float] = {}
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            raise InputError(f"{path}:{lineno}: empty line")
        parts = raw.split("\t")
        if len(parts) != 2:
            raise InputError(f"{path}:{lineno}: expected 'subsequence<TAB>value'")
        try:
            z = alphabet.parse(parts[0])
        except InputError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
        if len(z) != n:
            raise InputError(f"{path}:{lineno}: subsequence length {len(z)}, expected {n}")
        if z in values:
            raise InputError(f"{path}:{lineno}: duplicate subsequence {parts[0]!r}")
        try:
            values[z] = float(parts[1])
        except ValueError:
            raise InputError(f"{path}:{lineno}: bad value {parts[1]!r}") from None
    if support is None:
        support = SupportSet(n, frozenset(values))
    else:
        if support.n != n:
            raise ConsistencyError(f"support is for length {support.n}, expected {n}")
        for z in values:
            if z not in support.members:
                raise ConsistencyError(f"{path}: entry outside the provided support")
    return MomentTable(n=n, support=support, values=values, normalizer=normalizer)
