"""Many-to-many example construction and weighted round-robin sampling.

One cycle of the stream takes ``weight_d`` consecutive examples from each
dataset ``d`` in declared order, so per-cycle proportions are exact rather
than expected.  Each dataset is drawn without replacement from a seeded
permutation; under the ``restart`` policy an exhausted dataset is
re-permuted with a fresh derived seed.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .corpus import Corpus, ParallelSegment

TAG_FORMAT = "<2{lang}>"
RESTART = "restart"
STOP = "stop"


class MixConfigError(ValueError):
    pass


@dataclass(frozen=True)
class MixConfig:
    weights: dict = field(default_factory=dict)
    directions: tuple = ()
    tag_format: str = TAG_FORMAT
    seed: int = 0
    exhaustion_policy: str = RESTART
    shuffle: bool = True

    def __post_init__(self):
        object.__setattr__(self, "weights", dict(self.weights))
        object.__setattr__(self, "directions", tuple(tuple(d) for d in self.directions))
        for name, w in self.weights.items():
            if not isinstance(w, int) or isinstance(w, bool) or w < 1:
                raise MixConfigError(f"weight for {name!r} must be a positive integer, got {w!r}")
        for d in self.directions:
            if len(d) != 2 or d[0] == d[1]:
                raise MixConfigError(f"bad direction {d!r}")
        if self.exhaustion_policy not in (RESTART, STOP):
            raise MixConfigError(f"exhaustion_policy must be {RESTART!r} or {STOP!r}")
        if "{lang}" not in self.tag_format:
            raise MixConfigError("tag_format must contain '{lang}'")
        if not 0 <= self.seed < 2 ** 64:
            raise MixConfigError("seed must fit in 64 unsigned bits")

    def tag_token(self, lang: str) -> str:
        return self.tag_format.format(lang=lang)

    def tag_tokens(self) -> list[str]:
        return sorted({self.tag_token(tgt) for _, tgt in self.directions})

    @property
    def cycle_length(self) -> int:
        return sum(self.weights.values())

    def validate_against(self, corpora: Sequence[Corpus]):
        names = {c.name for c in corpora}
        missing = sorted(set(self.weights) - names)
        if missing:
            raise MixConfigError(f"weights given for unknown datasets: {missing}")
        langs = {lang for c in corpora for lang in c.lang_pair}
        for d in self.directions:
            if not set(d) <= langs:
                raise MixConfigError(f"direction {d[0]}-{d[1]} is not covered by any dataset")


@dataclass(frozen=True)
class TaggedExample:
    source_tokens: tuple[str, ...]
    target_tokens: tuple[str, ...]
    dataset_id: str
    direction: tuple[str, str]

    def to_line(self) -> str:
        return " ".join(self.source_tokens) + "\t" + " ".join(self.target_tokens)


def expand_directions(corpus: Corpus, directions: Iterable) -> list[tuple[ParallelSegment, tuple[str, str]]]:
    """Emit each segment once per requested direction, swapping sides for the reverse.

    Output order is segment-major: all directions of segment 0, then segment 1.
    """
    fwd = corpus.lang_pair
    rev = (corpus.tgt_lang, corpus.src_lang)
    dirs = [tuple(d) for d in directions]
    for d in dirs:
        if d not in (fwd, rev):
            raise MixConfigError(
                f"corpus {corpus.name!r} ({fwd[0]}-{fwd[1]}) cannot provide direction {d[0]}-{d[1]}"
            )
    out = []
    for seg in corpus.segments:
        for d in dirs:
            out.append((seg if d == fwd else seg.swapped(), d))
    return out


def directions_for(corpus: Corpus, directions: Iterable) -> list[tuple[str, str]]:
    """The subset of ``directions`` this corpus can serve, in the given order."""
    pair = set(corpus.lang_pair)
    return [tuple(d) for d in directions if set(d) == pair]


def tag(source_tokens: Sequence[str], target_tokens: Sequence[str], direction, cfg: MixConfig,
        dataset_id: str = "", vocab=None) -> TaggedExample:
    """Prepend the target-language tag to an already tokenized source."""
    tag_tok = cfg.tag_token(direction[1])
    if vocab is not None and tag_tok in vocab:
        raise MixConfigError(f"tag token {tag_tok!r} collides with a vocabulary token")
    reserved = set(cfg.tag_tokens()) | {tag_tok}
    for tok in (*source_tokens, *target_tokens):
        if tok in reserved:
            raise MixConfigError(f"reserved tag token {tok!r} appears inside example text")
    return TaggedExample((tag_tok, *source_tokens), tuple(target_tokens), dataset_id, tuple(direction))


def derived_seed(seed: int, dataset_id: str, epoch: int = 0) -> np.random.SeedSequence:
    """Seed for one dataset's epoch; independent of every other dataset."""
    h = int.from_bytes(hashlib.sha256(dataset_id.encode("utf-8")).digest()[:8], "little")
    return np.random.SeedSequence([seed, h, epoch])


def epoch_order(n: int, n_directions: int, seed: int, dataset_id: str, epoch: int, shuffle: bool = True):
    """Index order over a pool laid out segment-major with ``n_directions`` per segment.

    Each direction gets its own permutation of segments and the directions
    are interleaved, so a bidirectional dataset alternates directions
    within its quota.
    """
    if not shuffle:
        return np.arange(n * n_directions)
    rng = np.random.default_rng(derived_seed(seed, dataset_id, epoch))
    perms = [rng.permutation(n) for _ in range(n_directions)]
    order = np.empty(n * n_directions, dtype=np.int64)
    for k, perm in enumerate(perms):
        order[k::n_directions] = perm * n_directions + k
    return order


class _Cursor:
    def __init__(self, name, pool, n_directions, cfg):
        self.name = name
        self.pool = pool
        self.n_dir = max(1, n_directions)
        self.cfg = cfg
        self.epoch = 0
        self.pos = 0
        self.order = self._order()

    def _order(self):
        n = len(self.pool) // self.n_dir
        return epoch_order(n, self.n_dir, self.cfg.seed, self.name, self.epoch, self.cfg.shuffle)

    def remaining(self):
        return len(self.order) - self.pos

    def take(self, k):
        out = []
        while k:
            if self.pos == len(self.order):
                self.epoch += 1
                self.pos = 0
                self.order = self._order()
            step = min(k, len(self.order) - self.pos)
            pool = self.pool
            out.extend(pool[i] for i in self.order[self.pos:self.pos + step].tolist())
            self.pos += step
            k -= step
        return out


def sample_stream(pools: Sequence[tuple[str, Sequence, int]], cfg: MixConfig,
                  max_cycles: int | None = None) -> Iterator:
    """Yield examples cycle by cycle.

    ``pools`` holds ``(dataset_id, examples, n_directions)`` in declared
    order; ``examples`` is laid out as :func:`expand_directions` returns it.
    Weights come from ``cfg.weights``.  With the ``stop`` policy the stream
    ends before the first cycle some dataset cannot fill.
    """
    cursors = []
    for name, pool, n_dir in pools:
        if name not in cfg.weights:
            raise MixConfigError(f"no weight configured for dataset {name!r}")
        if not pool:
            raise MixConfigError(f"dataset {name!r} has no examples to sample")
        if len(pool) % max(1, n_dir):
            raise MixConfigError(f"dataset {name!r}: pool size is not a multiple of its direction count")
        cursors.append((_Cursor(name, pool, n_dir, cfg), cfg.weights[name]))
    cycles = 0
    while max_cycles is None or cycles < max_cycles:
        if cfg.exhaustion_policy == STOP and any(c.remaining() < w for c, w in cursors):
            return
        for cursor, w in cursors:
            yield from cursor.take(w)
        cycles += 1


def default_cycles(pools: Sequence[tuple[str, Sequence, int]], cfg: MixConfig) -> int:
    """Cycles to emit when the caller does not say.

    ``restart``: enough for every dataset to be seen in full at least once.
    ``stop``: as many as fit before the first dataset runs dry.
    """
    per = [-(-len(pool) // cfg.weights[name]) if cfg.exhaustion_policy == RESTART
           else len(pool) // cfg.weights[name] for name, pool, _ in pools]
    if not per:
        return 0
    return max(per) if cfg.exhaustion_policy == RESTART else min(per)
