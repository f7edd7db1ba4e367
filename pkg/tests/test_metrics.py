import math
import random

import pytest

from iuprep.metrics import compute_bleu, corpus_bleu, signature, tokenize_13a

from oracles import bleu_bruteforce


def test_tokenize_13a():
    assert tokenize_13a("") == []
    assert tokenize_13a("Hello, world!") == ["Hello", ",", "world", "!"]
    assert tokenize_13a("3.5") == ["3.5"]
    assert tokenize_13a("1,000 km.") == ["1,000", "km", "."]
    assert tokenize_13a("well-known 2-3") == ["well-known", "2", "-", "3"]
    assert tokenize_13a("a &amp; b") == ["a", "&", "b"]
    assert tokenize_13a("(ᐃᓄᒃᑎᑐᑦ)") == ["(", "ᐃᓄᒃᑎᑐᑦ", ")"]


def test_identity():
    refs = ["the house sat", "Nunavut is big .", "ᐃᓄᒃᑎᑐᑦ uqausiq 2020"]
    r = corpus_bleu(refs, refs)
    assert r.score == pytest.approx(100.0)
    assert r.brevity_penalty == 1.0
    assert r.precisions == (1.0, 1.0, 1.0, 1.0)


def test_no_overlap():
    assert corpus_bleu(["a b c d"], ["e f g h"]).score == 0.0


def test_cat_on_mat_hand_count():
    # hyp n-grams against "the cat sat on a mat":
    # 1-grams 5/6 (one "the" clipped), 2-grams 3/5, 3-grams 2/4, 4-grams 1/3
    r = corpus_bleu(["the cat sat on the mat"], ["the cat sat on a mat"])
    assert r.matches == (5, 3, 2, 1)
    assert r.totals == (6, 5, 4, 3)
    assert r.brevity_penalty == 1.0
    assert r.score == pytest.approx(100 * (5 / 6 * 3 / 5 * 2 / 4 * 1 / 3) ** 0.25, abs=1e-4)
    assert round(r.score, 4) == 53.7285


def test_last_word_substitution():
    # a mismatch in the final position costs one n-gram of every order
    r = corpus_bleu(["the cat sat on the mat"], ["the cat sat on the rug"])
    assert r.precisions == pytest.approx((5 / 6, 4 / 5, 3 / 4, 2 / 3))
    assert r.score == pytest.approx(100 * (5 / 6 * 4 / 5 * 3 / 4 * 2 / 3) ** 0.25, abs=1e-4)


def test_brevity_penalty():
    r = corpus_bleu(["a b c d"], ["a b c d e f"])
    assert r.brevity_penalty == pytest.approx(math.exp(1 - 6 / 4))
    assert r.score == pytest.approx(100 * math.exp(1 - 6 / 4))


def test_floor_smoothing():
    r = corpus_bleu(["a b c x"], ["a b c d"], smooth="floor")
    assert r.precisions[3] == pytest.approx(0.1 / 1)
    assert r.score > 0
    assert corpus_bleu(["a b c x"], ["a b c d"]).score == 0.0


def test_count_mismatch():
    with pytest.raises(ValueError, match="2 vs 1"):
        corpus_bleu(["a", "b"], ["a"])


def test_empty_hypotheses():
    with pytest.raises(ValueError):
        compute_bleu([0] * 4, [0] * 4, 0, 3)


def test_signature():
    assert signature("13a", "none", "roman").startswith(
        "BLEU+case.mixed+numrefs.1+smooth.none+tok.13a+script.roman+version.")
    r = corpus_bleu(["a"], ["a"], script="syllabics")
    assert "script.syllabics" in r.summary()


def test_matches_oracle_on_random_corpora():
    rng = random.Random(8)
    words = "a b c d e f".split()
    for _ in range(30):
        n = rng.randint(1, 6)
        hyps = [" ".join(rng.choice(words) for _ in range(rng.randint(1, 12))) for _ in range(n)]
        refs = [" ".join(rng.choice(words) for _ in range(rng.randint(1, 12))) for _ in range(n)]
        score, precisions, bp = bleu_bruteforce(hyps, refs)
        r = corpus_bleu(hyps, refs)
        assert r.score == pytest.approx(score, abs=1e-9)
        assert r.precisions == pytest.approx([float(p) for p in precisions])
        assert r.brevity_penalty == pytest.approx(bp)


def test_not_symmetric():
    h, r = ["a b c d e"], ["a b c d"]
    assert corpus_bleu(h, r).score != corpus_bleu(r, h).score


def test_clipping_caps_repeats():
    base = corpus_bleu(["the cat"], ["the cat sat"])
    padded = corpus_bleu(["the the the cat"], ["the cat sat"])
    assert padded.matches[0] == base.matches[0]
