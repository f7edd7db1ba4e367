"""
Cleaning a parallel corpus
==========================

Exact duplicates go first, then four filters in a fixed order.  The report
always adds up: raw = selected + duplicates + drops.
"""
from iuprep.cleaner import CleanConfig, clean
from iuprep.corpus import Corpus

pairs = [
    ("Thank you, Mr. Speaker.", "ᖁᔭᓐᓇᒦᒃ, ᐅᖃᖅᑏ."),
    ("Thank you, Mr. Speaker.", "ᖁᔭᓐᓇᒦᒃ, ᐅᖃᖅᑏ."),   # duplicate
    ("Order, order.", "Order, order."),               # untranslated copy
    ("I saw 3 seals", "takujara 4"),                   # numbers disagree
    ("yes " * 60, "ii"),                               # lengths far apart
    ("x" * 45, "ᐄ"),                                   # one absurd token
    ("In 2020 we met 1,000 people.", "2020-ᒥ 1000 ᐃᓄᐃᑦ."),
]
corpus = Corpus.from_pairs("hansard", "en", "iu", pairs)

kept, report = clean(corpus)
print(report.to_text())
for seg in kept:
    print(seg.source, "|", seg.target)

###############################################################################
# Thresholds are plain config values.
loose = CleanConfig(max_char_ratio=200.0)
print(clean(corpus, loose)[1].dropped_by_rule)
