"""
Scoring with BLEU
=================

Corpus BLEU with the 13a tokenizer and a single reference.
"""
from iuprep.metrics import corpus_bleu, tokenize_13a

print(tokenize_13a("Hello, world! It costs 3.5 dollars."))

hyps = ["the cat sat on the mat", "nunavut is in the north"]
refs = ["the cat sat on a mat", "nunavut is in the north"]
report = corpus_bleu(hyps, refs)
print(report.summary())
print("matches", report.matches, "totals", report.totals)

###############################################################################
# Short single sentences often score zero without smoothing.
print(corpus_bleu(["a b c x"], ["a b c d"]).score)
print(corpus_bleu(["a b c x"], ["a b c d"], smooth="floor").score)
