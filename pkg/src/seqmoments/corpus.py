"""Alphabets, symbol sequences, multiset corpora, and evaluation-task assembly.

A sequence is a tuple of symbol tokens.  Corpora are multisets of equal-length
sequences (windows cut from longer source sequences), stored as
``{sequence: multiplicity}``.  An evaluation task bundles the domain multiset
``U``, the target-class multiset ``Y`` (the restriction of ``U`` to the target
family's distinct windows), and the distinct-sequence set that defines
positive-class membership.
"""

from __future__ import annotations

import collections
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputError

# A sequence of symbol tokens. Tokens are non-empty and whitespace-free, so
# tuple order coincides with rendered-string order under both tokenizations.
Sequence = tuple[str, ...]

TOKENIZATIONS = ("char", "whitespace")


def tokenize(text: str, tokenization: str) -> Sequence:
    """Split raw text into symbol tokens (no alphabet validation)."""
    if tokenization == "char":
        return tuple(text)
    if tokenization == "whitespace":
        return tuple(text.split())
    raise InputError(f"unknown tokenization {tokenization!r}; expected one of {TOKENIZATIONS}")


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of distinct symbols plus the tokenization used to render them."""

    symbols: tuple[str, ...]
    tokenization: str = "char"

    def __post_init__(self):
        if self.tokenization not in TOKENIZATIONS:
            raise InputError(
                f"unknown tokenization {self.tokenization!r}; expected one of {TOKENIZATIONS}"
            )
        if not self.symbols:
            raise InputError("alphabet must contain at least one symbol")
        seen = set()
        for sym in self.symbols:
            if not sym or any(ch.isspace() for ch in sym):
                raise InputError(f"invalid symbol {sym!r}: symbols must be non-empty and whitespace-free")
            if self.tokenization == "char" and len(sym) != 1:
                raise InputError(f"symbol {sym!r} has length {len(sym)}; char tokenization needs single characters")
            if sym in seen:
                raise InputError(f"duplicate symbol {sym!r} in alphabet")
            seen.add(sym)
        object.__setattr__(self, "_symbol_set", frozenset(self.symbols))

    @property
    def sep(self) -> str:
        return "" if self.tokenization == "char" else " "

    def __contains__(self, symbol: str) -> bool:
        return symbol in self._symbol_set

    def __len__(self) -> int:
        return len(self.symbols)

    def render(self, seq: Sequence) -> str:
        """Serialize a sequence to its textual form (inverse of parse)."""
        return self.sep.join(seq)

    def parse(self, text: str) -> Sequence:
        """Tokenize text and validate every token against the alphabet."""
        seq = tokenize(text, self.tokenization)
        if not seq:
            raise InputError(f"empty sequence text {text!r}")
        for sym in seq:
            if sym not in self._symbol_set:
                raise InputError(f"unknown symbol {sym!r} in sequence {text!r}")
        return seq


def infer_alphabet(sequences, tokenization: str = "char") -> Alphabet:
    """Alphabet of all symbols observed across sequences, in sorted order."""
    symbols = set()
    for seq in sequences:
        symbols.update(seq)
    if not symbols:
        raise InputError("cannot infer an alphabet from zero sequences")
    return Alphabet(tuple(sorted(symbols)), tokenization)


def load_alphabet(path, tokenization: str = "char") -> Alphabet:
    """Read an explicit alphabet file: one symbol per line, order preserved."""
    symbols = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        sym = raw.strip()
        if not sym:
            raise InputError(f"{path}:{lineno}: empty symbol line")
        symbols.append(sym)
    return Alphabet(tuple(symbols), tokenization)


def iter_windows(seq: Sequence, n: int):
    """All overlapping length-n windows of seq, in position order."""
    for i in range(len(seq) - n + 1):
        yield seq[i : i + n]


@dataclass
class SequenceCorpus:
    """Multiset of equal-length sequences over a shared alphabet.

    ``entries`` maps each distinct sequence to its multiplicity (>= 1);
    ``total`` is the multiset cardinality.  Instances are treated as
    immutable after construction.
    """

    alphabet: Alphabet
    entries: dict[Sequence, int]
    total: int = field(init=False)
    _sorted: list[Sequence] | None = field(init=False, default=None, repr=False)

    def __post_init__(self):
        total = 0
        for seq, mult in self.entries.items():
            if not isinstance(mult, int) or mult < 1:
                raise InputError(f"multiplicity {mult!r} for {self.alphabet.render(seq)!r}: must be an integer >= 1")
            total += mult
        self.total = total

    @property
    def distinct(self) -> int:
        return len(self.entries)

    def multiplicity(self, seq: Sequence) -> int:
        return self.entries.get(seq, 0)

    def distinct_sorted(self) -> list[Sequence]:
        """Distinct sequences in lexicographic order (cached)."""
        if self._sorted is None:
            self._sorted = sorted(self.entries)
        return self._sorted

    def validate_symbols(self) -> None:
        """Check every sequence against the alphabet (O(total symbols))."""
        for seq in self.entries:
            for sym in seq:
                if sym not in self.alphabet:
                    raise InputError(f"sequence {self.alphabet.render(seq)!r} uses symbol {sym!r} outside the alphabet")

    def is_submultiset_of(self, other: SequenceCorpus) -> bool:
        return all(other.entries.get(seq, 0) >= mult for seq, mult in self.entries.items())


def load_corpus(path, fmt: str = "plain", tokenization: str = "char",
                alphabet: Alphabet | None = None) -> SequenceCorpus:
    """Read a corpus file.

    ``plain``: one sequence per line, repeats allowed.
    ``counted``: ``count<TAB>sequence`` per line, count >= 1.
    With no explicit alphabet, one is inferred as the sorted set of observed
    symbols.  Malformed lines raise InputError with their line number.
    """
    if fmt not in ("plain", "counted"):
        raise InputError(f"unknown corpus format {fmt!r}; expected 'plain' or 'counted'")
    path = Path(path)
    entries: collections.Counter[Sequence] = collections.Counter()
    n_lines = 0
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            raise InputError(f"{path}:{lineno}: empty line")
        n_lines += 1
        if fmt == "counted":
            parts = line.split("\t")
            if len(parts) != 2:
                raise InputError(f"{path}:{lineno}: expected 'count<TAB>sequence', got {raw!r}")
            count_text, seq_text = parts
            try:
                count = int(count_text)
            except ValueError:
                raise InputError(f"{path}:{lineno}: bad count {count_text!r}") from None
            if count < 1:
                raise InputError(f"{path}:{lineno}: count must be >= 1, got {count}")
        else:
            count, seq_text = 1, line
        seq = tokenize(seq_text, tokenization)
        if not seq:
            raise InputError(f"{path}:{lineno}: empty sequence")
        for sym in seq:
            if not sym.strip():
                raise InputError(f"{path}:{lineno}: whitespace symbol in {seq_text!r}")
        entries[seq] += count
    if n_lines == 0:
        raise InputError(f"{path}: empty corpus file")
    if alphabet is None:
        alphabet = infer_alphabet(entries.keys(), tokenization)
    corpus = SequenceCorpus(alphabet, dict(entries))
    try:
        corpus.validate_symbols()
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from None
    return corpus


def save_corpus(corpus: SequenceCorpus, path, fmt: str = "counted") -> None:
    """Write a corpus file; entries sorted lexicographically for determinism."""
    if fmt not in ("plain", "counted"):
        raise InputError(f"unknown corpus format {fmt!r}; expected 'plain' or 'counted'")
    render = corpus.alphabet.render
    lines = []
    for seq in corpus.distinct_sorted():
        mult = corpus.entries[seq]
        if fmt == "counted":
            lines.append(f"{mult}\t{render(seq)}")
        else:
            lines.extend([render(seq)] * mult)
    Path(path).write_text("\n".join(lines) + "\n")


@dataclass
class LabeledSet:
    """Ordered list of (sequence, label) training items; labels are 0/1."""

    items: list[tuple[Sequence, int]]

    def __post_init__(self):
        for seq, label in self.items:
            if label not in (0, 1):
                raise InputError(f"label {label!r} is not 0 or 1")

    @property
    def size(self) -> int:
        return len(self.items)

    def positives(self) -> list[Sequence]:
        return [seq for seq, label in self.items if label == 1]


def save_labeled_set(labeled: LabeledSet, alphabet: Alphabet, path) -> None:
    render = alphabet.render
    lines = [f"{label}\t{render(seq)}" for seq, label in labeled.items]
    Path(path).write_text("\n".join(lines) + "\n")


def load_labeled_set(path, alphabet: Alphabet) -> LabeledSet:
    """Read ``label<TAB>sequence`` lines; label must be 0 or 1."""
    path = Path(path)
    items = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            raise InputError(f"{path}:{lineno}: empty line")
        parts = line.split("\t")
        if len(parts) != 2:
            raise InputError(f"{path}:{lineno}: expected 'label<TAB>sequence', got {raw!r}")
        label_text, seq_text = parts
        if label_text not in ("0", "1"):
            raise InputError(f"{path}:{lineno}: label must be 0 or 1, got {label_text!r}")
        try:
            seq = alphabet.parse(seq_text)
        except InputError as exc:
            raise InputError(f"{path}:{lineno}: {exc}") from None
        items.append((seq, int(label_text)))
    if not items:
        raise InputError(f"{path}: empty training file")
    return LabeledSet(items)


@dataclass
class TaskBundle:
    """Domain multiset U, target multiset Y, and the positive-membership key.

    Tasks produced by build_task make ``target`` the restriction of ``domain``
    to ``positive_key``: a positive string keeps its full domain multiplicity
    no matter which source family each occurrence came from.  That property is
    what makes a perfect classifier's moments reproduce the gold moments.
    """

    domain: SequenceCorpus
    target: SequenceCorpus
    positive_key: frozenset[Sequence]
    segment_length: int
    target_family: str
    validation_family: str | None = None

    def __post_init__(self):
        if self.segment_length < 1:
            raise InputError(f"segment length must be >= 1, got {self.segment_length}")
        if not self.target.is_submultiset_of(self.domain):
            raise InputError("target multiset is not contained in the domain multiset")
        if frozenset(self.target.entries) != self.positive_key:
            raise InputError("positive key does not equal the distinct sequences of the target multiset")
        for seq in self.domain.entries:
            if len(seq) != self.segment_length:
                raise InputError(
                    f"domain sequence of length {len(seq)} does not match segment length {self.segment_length}"
                )

    @property
    def ratio(self) -> float:
        """Sparsity of the target class: |Y| / |U|."""
        return self.target.total / self.domain.total


def load_family_file(path, tokenization: str = "char",
                     alphabet: Alphabet | None = None):
    """Read ``familyId<TAB>sequence`` lines.

    Returns (families, alphabet) where families maps id -> list of sequences
    in file order.  Family ids must be non-empty and whitespace-free.
    """
    path = Path(path)
    families: dict[str, list[Sequence]] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line:
            raise InputError(f"{path}:{lineno}: empty line")
        parts = line.split("\t")
        if len(parts) != 2:
            raise InputError(f"{path}:{lineno}: expected 'familyId<TAB>sequence', got {raw!r}")
        family_id, seq_text = parts
        if not family_id or any(ch.isspace() for ch in family_id):
            raise InputError(f"{path}:{lineno}: bad family id {family_id!r}")
        seq = tokenize(seq_text, tokenization)
        if not seq:
            raise InputError(f"{path}:{lineno}: empty sequence")
        for sym in seq:
            if not sym.strip():
                raise InputError(f"{path}:{lineno}: whitespace symbol in {seq_text!r}")
        families.setdefault(family_id, []).append(seq)
    if not families:
        raise InputError(f"{path}: no families found")
    if alphabet is None:
        alphabet = infer_alphabet((s for seqs in families.values() for s in seqs), tokenization)
    else:
        for seqs in families.values():
            for seq in seqs:
                for sym in seq:
                    if sym not in alphabet:
                        raise InputError(f"{path}: symbol {sym!r} outside the explicit alphabet")
    return families, alphabet


def build_task(families: dict[str, list[Sequence]], alphabet: Alphabet,
               segment_length: int, target_family: str | None = None,
               validation_family: str | None = None) -> TaskBundle:
    """Cut every family sequence into length-L windows and assemble a task.

    U pools all windows (duplicates and overlaps included).  The target
    family is either explicit or the one whose restricted window multiset is
    rarest in U (ties broken lexicographically by family id); when a
    validation family is named it is excluded from rarest-candidate ranking.
    Y is the restriction of U to the target family's distinct windows.
    """
    if not families:
        raise InputError("family set is empty")
    if segment_length < 1:
        raise InputError(f"segment length must be >= 1, got {segment_length}")
    if validation_family is not None:
        if validation_family not in families:
            raise InputError(f"validation family {validation_family!r} not present")
        if len(families) < 2:
            raise InputError("an explicit validation family requires at least 2 families")
        if target_family is not None and target_family == validation_family:
            raise InputError("target family and validation family must differ")

    domain_counts: collections.Counter[Sequence] = collections.Counter()
    family_keys: dict[str, set[Sequence]] = {}
    for family_id in sorted(families):
        seqs = families[family_id]
        if not seqs:
            raise InputError(f"family {family_id!r} has no sequences")
        key: set[Sequence] = set()
        for seq in seqs:
            if len(seq) < segment_length:
                raise InputError(
                    f"family {family_id!r} has a sequence of length {len(seq)} "
                    f"shorter than segment length {segment_length}"
                )
            for i in range(len(seq) - segment_length + 1):
                window = seq[i : i + segment_length]
                domain_counts[window] += 1
                key.add(window)
        family_keys[family_id] = key

    if target_family is None:
        candidates = [fid for fid in sorted(family_keys) if fid != validation_family]
        # rarest = smallest restricted mass; lexicographic tie-break via sort order
        target_family = min(
            candidates,
            key=lambda fid: sum(domain_counts[z] for z in family_keys[fid]),
        )
    elif target_family not in families:
        raise InputError(f"target family {target_family!r} not present")

    key = family_keys[target_family]
    domain = SequenceCorpus(alphabet, dict(domain_counts))
    target = SequenceCorpus(alphabet, {z: domain_counts[z] for z in key})
    return TaskBundle(
        domain=domain,
        target=target,
        positive_key=frozenset(key),
        segment_length=segment_length,
        target_family=target_family,
        validation_family=validation_family,
    )


def sample_training_set(task: TaskBundle, m: int, seed: int) -> LabeledSet:
    """Draw m sequences i.i.d. from U (with replacement, weight = multiplicity).

    Labels are positive-key membership.  Same seed => same sample.
    """
    if m < 1:
        raise InputError(f"training size must be >= 1, got {m}")
    entries = task.domain.distinct_sorted()
    mults = np.array([task.domain.entries[seq] for seq in entries], dtype=np.float64)
    rng = np.random.Generator(np.random.PCG64(seed))
    idx = rng.choice(len(entries), size=m, replace=True, p=mults / mults.sum())
    key = task.positive_key
    items = []
    for i in idx:
        seq = entries[int(i)]
        items.append((seq, 1 if seq in key else 0))
    return LabeledSet(items)


# --- task bundle directory layout -----------------------------------------

_DOMAIN_FILE = "U.counted"
_TARGET_FILE = "Y.counted"
_KEY_FILE = "positive_key.txt"
_META_FILE = "meta.tsv"


def save_task(task: TaskBundle, directory) -> Path:
    """Write a task bundle directory: U.counted, Y.counted, positive_key.txt, meta.tsv."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    save_corpus(task.domain, directory / _DOMAIN_FILE, fmt="counted")
    save_corpus(task.target, directory / _TARGET_FILE, fmt="counted")
    render = task.domain.alphabet.render
    key_lines = sorted(render(seq) for seq in task.positive_key)
    (directory / _KEY_FILE).write_text("\n".join(key_lines) + "\n")
    meta_rows = [
        ("segment_length", str(task.segment_length)),
        ("target_family", task.target_family),
        ("validation_family", task.validation_family or "-"),
        ("ratio", format(task.ratio, ".17g")),
        ("tokenization", task.domain.alphabet.tokenization),
        ("alphabet", " ".join(task.domain.alphabet.symbols)),
    ]
    (directory / _META_FILE).write_text("\n".join(f"{k}\t{v}" for k, v in meta_rows) + "\n")
    return directory


def load_task(directory) -> TaskBundle:
    """Read a task bundle directory written by save_task."""
    directory = Path(directory)
    meta_path = directory / _META_FILE
    if not meta_path.exists():
        raise InputError(f"{directory}: not a task directory (missing {_META_FILE})")
    meta: dict[str, str] = {}
    for lineno, raw in enumerate(meta_path.read_text().splitlines(), start=1):
        if not raw.strip():
            continue
        parts = raw.split("\t")
        if len(parts) != 2:
            raise InputError(f"{meta_path}:{lineno}: expected 'key<TAB>value'")
        meta[parts[0]] = parts[1]
    for required in ("segment_length", "target_family", "tokenization", "alphabet"):
        if required not in meta:
            raise InputError(f"{meta_path}: missing {required!r} row")
    tokenization = meta["tokenization"]
    alphabet = Alphabet(tuple(meta["alphabet"].split(" ")), tokenization)
    domain = load_corpus(directory / _DOMAIN_FILE, fmt="counted",
                         tokenization=tokenization, alphabet=alphabet)
    target = load_corpus(directory / _TARGET_FILE, fmt="counted",
                         tokenization=tokenization, alphabet=alphabet)
    key = frozenset(
        alphabet.parse(line.strip())
        for line in (directory / _KEY_FILE).read_text().splitlines()
        if line.strip()
    )
    validation = meta.get("validation_family", "-")
    return TaskBundle(
        domain=domain,
        target=target,
        positive_key=key,
        segment_length=int(meta["segment_length"]),
        target_family=meta["target_family"],
        validation_family=None if validation == "-" else validation,
    )
