"""Data preparation for multilingual English-Inuktitut machine translation.

Romanization of syllabics, corpus cleaning, shared BPE, weighted
many-to-many mixing with target-language tags, and corpus BLEU.
"""

__version__ = "0.1.0"

from .corpus import Corpus, CorpusStats, ParallelSegment, load_parallel, stats, write_parallel  # noqa: E402
from .translit import TransliterationTable, deromanize, romanize  # noqa: E402
from .cleaner import CleanConfig, CleanReport, Decision, clean, dedup, evaluate_rules  # noqa: E402
from .bpe import BpeModel, Vocab, build_vocab, detokenize, learn  # noqa: E402
from .mixer import MixConfig, TaggedExample, expand_directions, sample_stream, tag  # noqa: E402
from .metrics import BleuReport, corpus_bleu, tokenize_13a  # noqa: E402

__all__ = [
    "Corpus", "CorpusStats", "ParallelSegment", "load_parallel", "stats", "write_parallel",
    "TransliterationTable", "romanize", "deromanize",
    "CleanConfig", "CleanReport", "Decision", "clean", "dedup", "evaluate_rules",
    "BpeModel", "Vocab", "build_vocab", "detokenize", "learn",
    "MixConfig", "TaggedExample", "expand_directions", "sample_stream", "tag",
    "BleuReport", "corpus_bleu", "tokenize_13a",
]
