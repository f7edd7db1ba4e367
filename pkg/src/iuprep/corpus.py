"""Parallel corpus data model and line-oriented I/O."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator


class AlignmentError(ValueError):
    """Source and target files do not have the same number of lines."""


class CorpusDecodeError(ValueError):
    """A corpus file is not valid UTF-8."""

    def __init__(self, path, line_number: int, reason: str):
        self.path = str(path)
        self.line_number = line_number
        super().__init__(f"{path}: invalid UTF-8 on line {line_number}: {reason}")


@dataclass(frozen=True)
class ParallelSegment:
    source: str
    target: str
    src_lang: str
    tgt_lang: str
    dataset_id: str = ""

    def __post_init__(self):
        if "\n" in self.source or "\n" in self.target:
            raise ValueError("segment text may not contain newlines")
        if self.src_lang == self.tgt_lang:
            raise ValueError(f"src_lang and tgt_lang are both {self.src_lang!r}")

    def swapped(self) -> ParallelSegment:
        return ParallelSegment(self.target, self.source, self.tgt_lang, self.src_lang, self.dataset_id)


@dataclass(frozen=True)
class Corpus:
    """An ordered, immutable list of segments sharing one language pair."""

    name: str
    src_lang: str
    tgt_lang: str
    segments: tuple[ParallelSegment, ...] = ()
    weight: int = 1

    def __post_init__(self):
        # Accept any iterable for convenience; store a tuple.
        object.__setattr__(self, "segments", tuple(self.segments))
        if not isinstance(self.weight, int) or isinstance(self.weight, bool) or self.weight < 1:
            raise ValueError(f"corpus weight must be a positive integer, got {self.weight!r}")
        if self.src_lang == self.tgt_lang:
            raise ValueError(f"corpus {self.name!r} has identical languages {self.src_lang!r}")
        for seg in self.segments:
            if (seg.src_lang, seg.tgt_lang) != (self.src_lang, self.tgt_lang):
                raise ValueError(
                    f"corpus {self.name!r} is {self.src_lang}-{self.tgt_lang} "
                    f"but holds a {seg.src_lang}-{seg.tgt_lang} segment"
                )

    @classmethod
    def from_pairs(cls, name: str, src_lang: str, tgt_lang: str, pairs: Iterable[tuple[str, str]], weight: int = 1):
        segs = [ParallelSegment(s, t, src_lang, tgt_lang, name) for s, t in pairs]
        return cls(name, src_lang, tgt_lang, segs, weight)

    def with_segments(self, segments: Iterable[ParallelSegment]) -> Corpus:
        return Corpus(self.name, self.src_lang, self.tgt_lang, tuple(segments), self.weight)

    def pairs(self) -> list[tuple[str, str]]:
        return [(s.source, s.target) for s in self.segments]

    @property
    def lang_pair(self) -> tuple[str, str]:
        return self.src_lang, self.tgt_lang

    def __len__(self):
        return len(self.segments)

    def __iter__(self) -> Iterator[ParallelSegment]:
        return iter(self.segments)


@dataclass(frozen=True)
class CorpusStats:
    segment_count: int = 0
    src_token_count: int = 0
    tgt_token_count: int = 0
    src_char_count: int = field(default=0, repr=False)
    tgt_char_count: int = field(default=0, repr=False)

    @property
    def src_avg_token_len(self) -> float:
        return self.src_char_count / self.src_token_count if self.src_token_count else 0.0

    @property
    def tgt_avg_token_len(self) -> float:
        return self.tgt_char_count / self.tgt_token_count if self.tgt_token_count else 0.0

    def __add__(self, other: CorpusStats) -> CorpusStats:
        return CorpusStats(
            self.segment_count + other.segment_count,
            self.src_token_count + other.src_token_count,
            self.tgt_token_count + other.tgt_token_count,
            self.src_char_count + other.src_char_count,
            self.tgt_char_count + other.tgt_char_count,
        )

    def as_dict(self) -> dict:
        return {
            "segment_count": self.segment_count,
            "src_token_count": self.src_token_count,
            "tgt_token_count": self.tgt_token_count,
            "src_avg_token_len": self.src_avg_token_len,
            "tgt_avg_token_len": self.tgt_avg_token_len,
        }


def tokens(text: str) -> list[str]:
    """Whitespace tokens: maximal runs of non-whitespace characters."""
    return text.split()


def token_stats(text: str) -> tuple[int, int]:
    """Return (token count, total token characters) for ``text``."""
    toks = text.split()
    return len(toks), sum(map(len, toks))


def stats(corpus: Corpus | Iterable[ParallelSegment]) -> CorpusStats:
    n = src_tok = tgt_tok = src_chars = tgt_chars = 0
    for seg in corpus:
        n += 1
        a, b = token_stats(seg.source)
        src_tok += a
        src_chars += b
        a, b = token_stats(seg.target)
        tgt_tok += a
        tgt_chars += b
    return CorpusStats(n, src_tok, tgt_tok, src_chars, tgt_chars)


def _read_lines(path) -> list[str]:
    data = Path(path).read_bytes()
    if not data:
        return []
    raw_lines = data.split(b"\n")
    if raw_lines[-1] == b"":
        raw_lines.pop()
    lines = []
    for i, raw in enumerate(raw_lines, start=1):
        try:
            lines.append(raw.decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise CorpusDecodeError(path, i, exc.reason) from None
    return lines


def load_parallel(src_path, tgt_path, name: str, src_lang: str, tgt_lang: str, weight: int = 1) -> Corpus:
    """Pair line ``i`` of ``src_path`` with line ``i`` of ``tgt_path``.

    Only ``\\n`` separates records; a ``\\r`` or tab inside a line is kept as
    text.  The final newline is optional.
    """
    src = _read_lines(src_path)
    tgt = _read_lines(tgt_path)
    if len(src) != len(tgt):
        raise AlignmentError(
            f"line count mismatch: {len(src)} vs {len(tgt)} ({src_path} vs {tgt_path})"
        )
    return Corpus.from_pairs(name, src_lang, tgt_lang, zip(src, tgt), weight)


def write_lines(path, lines: Iterable[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for line in lines:
            f.write(line)
            f.write("\n")


def write_parallel(corpus: Corpus, src_path, tgt_path) -> None:
    for path in (src_path, tgt_path):
        parent = os.path.dirname(os.fspath(path))
        if parent:
            os.makedirs(parent, exist_ok=True)
    write_lines(src_path, (s.source for s in corpus.segments))
    write_lines(tgt_path, (s.target for s in corpus.segments))
