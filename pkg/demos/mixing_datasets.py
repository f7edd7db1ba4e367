"""
Weighted mixing
===============

Each cycle draws ``weight`` examples from every dataset in turn.  With the
submitted system's weights a cycle holds 45 examples, 15 of them Hansard.
"""
from collections import Counter
from itertools import islice

from iuprep.corpus import Corpus
from iuprep.mixer import MixConfig, expand_directions, sample_stream, tag

weights = {"hansard": 15, "europarl-en-et": 2, "europarl-en-fi": 2, "paracrawl-en-et": 10,
           "paracrawl-en-fi": 10, "public-documents": 5, "public-websites": 1}
cfg = MixConfig(weights, seed=42)
pools = [(name, [name] * 20, 1) for name in weights]
first = list(islice(sample_stream(pools, cfg), 45))
print(cfg.cycle_length, Counter(first))

###############################################################################
# Tagging and both directions for one corpus.
corpus = Corpus.from_pairs("hansard", "en", "iu", [("thank you", "qujannamiik"), ("yes", "ii")])
directions = [("en", "iu"), ("iu", "en")]
cfg = MixConfig({"hansard": 2}, directions, seed=1)
pool = [tag(s.source.split(), s.target.split(), d, cfg, "hansard")
        for s, d in expand_directions(corpus, directions)]
for ex in sample_stream([("hansard", pool, 2)], cfg, max_cycles=2):
    print(ex.to_line())
