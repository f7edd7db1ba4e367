"""Corpus-level BLEU with mteval-13a tokenization, single reference."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from . import __version__

NGRAM_ORDER = 4
FLOOR_DEFAULT = 0.1

_13A_RULES = [
    (re.compile(r"([\{-\~\[-\` -\&\(-\+\:-\@\/])"), r" \1 "),
    # period and comma split unless they sit next to a digit
    (re.compile(r"([^0-9])([\.,])"), r"\1 \2 "),
    (re.compile(r"([\.,])([^0-9])"), r" \1 \2"),
    (re.compile(r"([0-9])(-)"), r"\1 \2 "),
]


def tokenize_13a(text: str) -> list[str]:
    norm = text.replace("<skipped>", "").replace("-\n", "").replace("\n", " ")
    norm = (norm.replace("&quot;", '"').replace("&amp;", "&")
            .replace("&lt;", "<").replace("&gt;", ">"))
    norm = f" {norm} "
    for pattern, repl in _13A_RULES:
        norm = pattern.sub(repl, norm)
    return norm.split()


def tokenize_none(text: str) -> list[str]:
    return text.split()


TOKENIZERS = {"13a": tokenize_13a, "none": tokenize_none}


@dataclass(frozen=True)
class BleuReport:
    score: float
    precisions: tuple[float, ...]
    brevity_penalty: float
    hyp_len: int
    ref_len: int
    matches: tuple[int, ...]
    totals: tuple[int, ...]
    signature: str

    def summary(self) -> str:
        prec = "/".join(f"{100 * p:.1f}" for p in self.precisions)
        ratio = self.hyp_len / self.ref_len if self.ref_len else 0.0
        return (f"BLEU = {self.score:.1f} {prec} (BP = {self.brevity_penalty:.3f} "
                f"ratio = {ratio:.3f} hyp_len = {self.hyp_len} ref_len = {self.ref_len}) "
                f"{self.signature}")

    def as_dict(self) -> dict:
        return {
            "score": self.score,
            "precisions": list(self.precisions),
            "brevity_penalty": self.brevity_penalty,
            "hyp_len": self.hyp_len,
            "ref_len": self.ref_len,
            "matches": list(self.matches),
            "totals": list(self.totals),
            "signature": self.signature,
        }


def ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def segment_stats(hyp: Sequence[str], ref: Sequence[str]) -> tuple[list[int], list[int]]:
    """Clipped n-gram matches and hypothesis n-gram totals, n = 1..4."""
    matches, totals = [], []
    for n in range(1, NGRAM_ORDER + 1):
        h = ngram_counts(hyp, n)
        r = ngram_counts(ref, n)
        matches.append(sum(min(c, r[g]) for g, c in h.items()))
        totals.append(max(0, len(hyp) - n + 1))
    return matches, totals


def signature(tokenize: str, smooth: str, script: str | None = None) -> str:
    sig = f"BLEU+case.mixed+numrefs.1+smooth.{smooth}+tok.{tokenize}"
    if script:
        sig += f"+script.{script}"
    return sig + f"+version.iuprep-{__version__}"


def compute_bleu(matches, totals, hyp_len, ref_len, smooth="none", floor=FLOOR_DEFAULT,
                 sig="") -> BleuReport:
    if hyp_len <= 0:
        raise ValueError("BLEU needs at least one non-empty hypothesis")
    precisions = []
    for m, t in zip(matches, totals):
        if t == 0:
            precisions.append(0.0)
        elif m == 0 and smooth == "floor":
            precisions.append(floor / t)
        else:
            precisions.append(m / t)
    bp = min(1.0, math.exp(1 - ref_len / hyp_len))
    if min(precisions) <= 0:
        score = 0.0
    else:
        score = 100 * bp * math.exp(sum(map(math.log, precisions)) / NGRAM_ORDER)
    return BleuReport(score, tuple(precisions), bp, hyp_len, ref_len,
                      tuple(matches), tuple(totals), sig)


def corpus_bleu(hyps: Sequence[str], refs: Sequence[str], tokenize: str = "13a",
                smooth: str = "none", floor: float = FLOOR_DEFAULT,
                script: str | None = None) -> BleuReport:
    """BLEU over a whole test set.

    ``smooth="none"`` gives 0 whenever some n-gram order has no match;
    ``"floor"`` replaces a zero match count by ``floor``.
    """
    if len(hyps) != len(refs):
        raise ValueError(f"hypothesis/reference count mismatch: {len(hyps)} vs {len(refs)}")
    if smooth not in ("none", "floor"):
        raise ValueError(f"unknown smoothing {smooth!r}")
    tok = TOKENIZERS[tokenize]
    matches = [0] * NGRAM_ORDER
    totals = [0] * NGRAM_ORDER
    hyp_len = ref_len = 0
    for h, r in zip(hyps, refs):
        ht, rt = tok(h.rstrip()), tok(r.rstrip())
        hyp_len += len(ht)
        ref_len += len(rt)
        m, t = segment_stats(ht, rt)
        for n in range(NGRAM_ORDER):
            matches[n] += m[n]
            totals[n] += t[n]
    return compute_bleu(matches, totals, hyp_len, ref_len, smooth, floor,
                        signature(tokenize, smooth, script))
