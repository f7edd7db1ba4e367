"""Byte-pair-encoding merges learned over word frequencies.

Every word is split into characters followed by a separate end-of-word
marker symbol, so ``low`` starts as ``l o w </w>``.  Merges never cross word
boundaries.  When several pairs are equally frequent the lexicographically
smallest ``(left, right)`` wins, which makes learning reproducible.
"""

from __future__ import annotations

import hashlib
import heapq
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Corpus

MARKER = "</w>"
FORMAT_VERSION = "v1"
_HEADER_TAG = "#iuprep-bpe"


@dataclass(frozen=True)
class BpeModel:
    merges: tuple[tuple[str, str], ...] = ()
    marker: str = MARKER
    requested: int | None = None
    ranks: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        merges = tuple((str(a), str(b)) for a, b in self.merges)
        object.__setattr__(self, "merges", merges)
        if not self.marker or any(c.isspace() for c in self.marker):
            raise ValueError(f"invalid end-of-word marker {self.marker!r}")
        ranks = {}
        known = set()
        for i, (a, b) in enumerate(merges):
            if (a, b) in ranks:
                raise ValueError(f"duplicate merge {a!r} {b!r} at position {i}")
            for sym in (a, b):
                if len(sym) != 1 and sym != self.marker and sym not in known:
                    raise ValueError(f"merge {i} uses {sym!r}, which no earlier merge produces")
            ranks[(a, b)] = i
            known.add(a + b)
        object.__setattr__(self, "ranks", ranks)
        object.__setattr__(self, "_cache", {})

    @property
    def n_merges(self) -> int:
        return len(self.merges)

    def segment_word(self, word: str) -> tuple[str, ...]:
        cached = self._cache.get(word)
        if cached is not None:
            return cached
        syms = list(word)
        syms.append(self.marker)
        ranks = self.ranks
        last = -1
        while len(syms) > 1:
            best = None
            for pair in zip(syms, syms[1:]):
                r = ranks.get(pair)
                if r is not None and r > last and (best is None or r < best):
                    best = r
            if best is None:
                break
            syms = merge_symbols(syms, self.merges[best])
            last = best
        out = tuple(syms)
        if len(self._cache) < 1_000_000:
            self._cache[word] = out
        return out

    def apply(self, text: str) -> list[str]:
        out = []
        for word in text.split():
            out.extend(self.segment_word(word))
        return out

    def detokenize(self, tokens: Sequence[str]) -> str:
        return detokenize(tokens, self.marker)

    def to_text(self) -> str:
        header = f"{_HEADER_TAG} {FORMAT_VERSION} marker={self.marker}"
        if self.requested is not None:
            header += f" requested={self.requested}"
        return "\n".join([header] + [f"{a} {b}" for a, b in self.merges]) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.to_text().encode("utf-8")).hexdigest()

    def save(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8", newline="\n")

    @classmethod
    def load(cls, path) -> BpeModel:
        return cls.from_text(Path(path).read_text(encoding="utf-8"))

    @classmethod
    def from_text(cls, text: str) -> BpeModel:
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if not lines or not lines[0].startswith(_HEADER_TAG + " "):
            raise ValueError("not a BPE model file: missing header line")
        fields = lines[0].split()[1:]
        if fields[0] != FORMAT_VERSION:
            raise ValueError(f"unsupported BPE model version {fields[0]!r}")
        opts = dict(f.split("=", 1) for f in fields[1:])
        merges = []
        for i, line in enumerate(lines[1:], start=2):
            parts = line.split(" ")
            if len(parts) != 2 or not all(parts):
                raise ValueError(f"line {i}: malformed merge {line!r}")
            merges.append((parts[0], parts[1]))
        requested = int(opts["requested"]) if "requested" in opts else None
        return cls(tuple(merges), opts.get("marker", MARKER), requested)


def merge_symbols(syms: Sequence[str], pair: tuple[str, str]) -> list[str]:
    """Merge non-overlapping occurrences of ``pair``, scanning left to right."""
    a, b = pair
    new = a + b
    out = []
    i = 0
    n = len(syms)
    while i < n:
        if i + 1 < n and syms[i] == a and syms[i + 1] == b:
            out.append(new)
            i += 2
        else:
            out.append(syms[i])
            i += 1
    return out


def word_counts(corpora: Iterable[Corpus]) -> Counter:
    """Whitespace-word frequencies over both sides of every corpus."""
    counts = Counter()
    for corpus in corpora:
        for seg in corpus.segments:
            counts.update(seg.source.split())
            counts.update(seg.target.split())
    return counts


def learn_from_counts(counts: dict[str, int], n_merges: int, marker: str = MARKER) -> BpeModel:
    if n_merges < 0:
        raise ValueError("n_merges must be non-negative")
    words = [list(w) + [marker] for w in sorted(counts)]
    freqs = [counts[w] for w in sorted(counts)]

    pair_counts = Counter()
    where = defaultdict(set)
    for idx, syms in enumerate(words):
        f = freqs[idx]
        for pair in zip(syms, syms[1:]):
            pair_counts[pair] += f
            where[pair].add(idx)

    heap = [(-c, p) for p, c in pair_counts.items()]
    heapq.heapify(heap)
    merges = []
    learned = set()
    while len(merges) < n_merges and heap:
        neg, pair = heapq.heappop(heap)
        count = pair_counts.get(pair, 0)
        # stale heap entry, or a pair re-formed after it was already learned
        if count != -neg or pair in learned:
            continue
        if count < 2:
            break
        merges.append(pair)
        learned.add(pair)
        touched = set()
        for idx in sorted(where.pop(pair, ())):
            syms = words[idx]
            f = freqs[idx]
            old = list(zip(syms, syms[1:]))
            if pair not in old:
                continue
            merged = merge_symbols(syms, pair)
            for p in old:
                pair_counts[p] -= f
                touched.add(p)
            for p in zip(merged, merged[1:]):
                pair_counts[p] += f
                where[p].add(idx)
                touched.add(p)
            words[idx] = merged
        for p in touched:
            c = pair_counts[p]
            if c <= 0:
                del pair_counts[p]
            elif p not in learned:
                heapq.heappush(heap, (-c, p))
    return BpeModel(tuple(merges), marker, n_merges)


def learn(corpora: Iterable[Corpus], n_merges: int, marker: str = MARKER) -> BpeModel:
    """Learn up to ``n_merges`` merges on the concatenation of all corpora.

    Learning stops early once no pair occurs at least twice; the requested
    count is kept on the model.
    """
    corpora = list(corpora)
    if not corpora:
        raise ValueError("learn needs at least one corpus")
    return learn_from_counts(word_counts(corpora), n_merges, marker)


def apply(model: BpeModel, text: str) -> list[str]:
    return model.apply(text)


def detokenize(tokens: Sequence[str], marker: str = MARKER) -> str:
    text = "".join(tokens).replace(marker, " ")
    return text[:-1] if text.endswith(" ") else text


@dataclass(frozen=True)
class Vocab:
    tokens: tuple[str, ...]
    counts: tuple[int, ...] = ()
    token_to_id: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ids = {}
        for i, tok in enumerate(self.tokens):
            if tok in ids:
                raise ValueError(f"duplicate vocabulary token {tok!r}")
            ids[tok] = i
        object.__setattr__(self, "token_to_id", ids)

    @property
    def size(self) -> int:
        return len(self.tokens)

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, tok):
        return tok in self.token_to_id

    def with_reserved(self, reserved: Iterable[str]) -> Vocab:
        """Prepend reserved tokens (target-language tags) at ids 0..k-1."""
        reserved = list(reserved)
        clash = [t for t in reserved if t in self.token_to_id]
        if clash:
            raise ValueError(f"reserved tokens already in vocabulary: {clash}")
        counts = self.counts or (0,) * len(self.tokens)
        return Vocab(tuple(reserved) + self.tokens, (0,) * len(reserved) + tuple(counts))

    def to_text(self) -> str:
        counts = self.counts or (0,) * len(self.tokens)
        return "".join(f"{t}\t{c}\n" for t, c in zip(self.tokens, counts))

    def save(self, path) -> None:
        Path(path).write_text(self.to_text(), encoding="utf-8", newline="\n")

    @classmethod
    def load(cls, path) -> Vocab:
        toks, counts = [], []
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            tok, _, c = line.rpartition("\t")
            toks.append(tok)
            counts.append(int(c))
        return cls(tuple(toks), tuple(counts))


def build_vocab(model: BpeModel, corpora: Iterable[Corpus]) -> Vocab:
    """Subword tokens produced on the corpora, most frequent first."""
    freq = Counter()
    for word, n in word_counts(corpora).items():
        for tok in model.segment_word(word):
            freq[tok] += n
    ordered = sorted(freq.items(), key=lambda kv: (-kv[1], kv[0]))
    return Vocab(tuple(t for t, _ in ordered), tuple(c for _, c in ordered))


@lru_cache(maxsize=8)
def _cached_model(text: str) -> BpeModel:
    return BpeModel.from_text(text)


def apply_lines(model_text: str, lines: Sequence[str]) -> list[str]:
    """Worker-friendly batch apply; the model travels as its file text."""
    model = _cached_model(model_text)
    return [" ".join(model.apply(line)) for line in lines]
