"""
Learning and applying BPE
=========================

Merges are learned on word counts; each word ends with a separate
``</w>`` symbol so merges can attach to word ends.
"""
from iuprep.bpe import build_vocab, detokenize, learn, learn_from_counts
from iuprep.corpus import Corpus

counts = {"low": 5, "lower": 2, "newest": 6, "widest": 3}
model = learn_from_counts(counts, 10)
for i, (a, b) in enumerate(model.merges):
    print(i, a, "+", b)

###############################################################################
# Segmenting unseen words reuses the learned merges in order.
toks = model.apply("lowest newer widest")
print(toks)
print(detokenize(toks))

###############################################################################
# On a real corpus, both sides are pooled before learning.
corpus = Corpus.from_pairs("demo", "en", "iu", [
    ("the house of the north", "nunavut maligaliurvia"),
    ("the people of the north", "nunavut inuit"),
])
model = learn([corpus], 30)
vocab = build_vocab(model, [corpus])
print(model.n_merges, "merges,", vocab.size, "tokens")
print(vocab.to_text())
