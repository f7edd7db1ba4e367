"""Exact deduplication and segment-level drop rules with per-rule accounting."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from .corpus import Corpus, ParallelSegment

AVG_TOKEN_LEN = "avg_token_len"
IDENTICAL = "identical"
NUMBER_MISMATCH = "number_mismatch"
CHAR_RATIO = "char_ratio"

# evaluation order; a segment failing several rules is charged to the first
RULES = (AVG_TOKEN_LEN, IDENTICAL, NUMBER_MISMATCH, CHAR_RATIO)

_GROUPING = re.compile(r"(?<=[0-9])[.,](?=[0-9])")


@dataclass(frozen=True)
class CleanConfig:
    min_avg_token_len: float = 1.0
    max_avg_token_len: float = 40.0
    max_char_ratio: float = 9.0
    number_pattern: str = r"[0-9]+"
    rules_enabled: frozenset = frozenset(RULES)

    def __post_init__(self):
        object.__setattr__(self, "rules_enabled", frozenset(self.rules_enabled))
        unknown = self.rules_enabled - set(RULES)
        if unknown:
            raise ValueError(f"unknown cleaning rules: {sorted(unknown)}")
        if not self.min_avg_token_len < self.max_avg_token_len:
            raise ValueError("min_avg_token_len must be below max_avg_token_len")
        if not self.max_char_ratio > 1:
            raise ValueError("max_char_ratio must be greater than 1")
        re.compile(self.number_pattern)

    @classmethod
    def from_dict(cls, d: dict) -> CleanConfig:
        d = dict(d)
        if "rules_enabled" in d:
            d["rules_enabled"] = frozenset(d["rules_enabled"])
        return cls(**d)

    def as_dict(self) -> dict:
        return {
            "min_avg_token_len": self.min_avg_token_len,
            "max_avg_token_len": self.max_avg_token_len,
            "max_char_ratio": self.max_char_ratio,
            "number_pattern": self.number_pattern,
            "rules_enabled": [r for r in RULES if r in self.rules_enabled],
        }


@dataclass(frozen=True)
class Decision:
    keep: bool
    rule: str | None = None

    def __post_init__(self):
        if self.keep != (self.rule is None):
            raise ValueError("a dropped segment needs exactly one rule")
        if self.rule is not None and self.rule not in RULES:
            raise ValueError(f"unknown rule {self.rule!r}")


KEEP = Decision(True)


@dataclass
class CleanReport:
    raw: int = 0
    selected: int = 0
    duplicates_removed: int = 0
    dropped_by_rule: dict = field(default_factory=lambda: dict.fromkeys(RULES, 0))

    def check(self):
        total = self.selected + self.duplicates_removed + sum(self.dropped_by_rule.values())
        if total != self.raw:
            raise AssertionError(f"report does not add up: {total} != raw {self.raw}")

    def as_dict(self) -> dict:
        return {
            "raw": self.raw,
            "selected": self.selected,
            "duplicates_removed": self.duplicates_removed,
            "dropped_by_rule": {r: self.dropped_by_rule.get(r, 0) for r in RULES},
        }

    def to_text(self) -> str:
        """Flat ``key: value`` lines, one per count."""
        lines = [f"raw: {self.raw}", f"selected: {self.selected}",
                 f"duplicates_removed: {self.duplicates_removed}"]
        lines += [f"dropped.{r}: {self.dropped_by_rule.get(r, 0)}" for r in RULES]
        return "\n".join(lines) + "\n"


def _avg_token_len(text: str) -> float:
    toks = text.split()
    return sum(map(len, toks)) / len(toks) if toks else 0.0


def numbers(text: str, pattern: str = r"[0-9]+") -> Counter:
    """Multiset of digit runs, with ``,``/``.`` digit-group separators removed."""
    return Counter(re.findall(pattern, _GROUPING.sub("", text)))


def evaluate_rules(seg: ParallelSegment, cfg: CleanConfig = CleanConfig()) -> Decision:
    enabled = cfg.rules_enabled
    src, tgt = seg.source, seg.target
    if AVG_TOKEN_LEN in enabled:
        for side in (src, tgt):
            avg = _avg_token_len(side)
            if avg < cfg.min_avg_token_len or avg > cfg.max_avg_token_len:
                return Decision(False, AVG_TOKEN_LEN)
    if IDENTICAL in enabled and src == tgt:
        return Decision(False, IDENTICAL)
    if NUMBER_MISMATCH in enabled and numbers(src, cfg.number_pattern) != numbers(tgt, cfg.number_pattern):
        return Decision(False, NUMBER_MISMATCH)
    if CHAR_RATIO in enabled:
        a, b = len(src), len(tgt)
        if max(a, b) / max(1, min(a, b)) > cfg.max_char_ratio:
            return Decision(False, CHAR_RATIO)
    return KEEP


def dedup(corpus: Corpus, seen: set | None = None) -> tuple[Corpus, int]:
    """Keep the first occurrence of every exact (source, target) pair.

    Passing the same ``seen`` set across several corpora deduplicates them
    jointly; by default each corpus is deduplicated on its own.
    """
    if seen is None:
        seen = set()
    kept = []
    for seg in corpus.segments:
        key = (seg.source, seg.target)
        if key not in seen:
            seen.add(key)
            kept.append(seg)
    return corpus.with_segments(kept), len(corpus) - len(kept)


def clean(corpus: Corpus, cfg: CleanConfig = CleanConfig(), seen: set | None = None,
          decide=None) -> tuple[Corpus, CleanReport]:
    """Deduplicate, then drop segments failing any enabled rule.

    ``decide`` maps a list of segments to their decisions; it defaults to a
    sequential :func:`evaluate_rules` pass and exists so callers can fan the
    pure rule evaluation out over worker processes.
    """
    unique, removed = dedup(corpus, seen)
    if decide is None:
        decisions = [evaluate_rules(seg, cfg) for seg in unique.segments]
    else:
        decisions = decide(list(unique.segments), cfg)
    report = CleanReport(raw=len(corpus), duplicates_removed=removed)
    kept = []
    for seg, d in zip(unique.segments, decisions):
        if d.keep:
            kept.append(seg)
        else:
            report.dropped_by_rule[d.rule] += 1
    report.selected = len(kept)
    report.check()
    return unique.with_segments(kept), report


def evaluate_many(segments: Iterable[ParallelSegment], cfg: CleanConfig) -> list[Decision]:
    return [evaluate_rules(seg, cfg) for seg in segments]
