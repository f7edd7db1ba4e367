import random

import pytest
from hypothesis import given, settings, strategies as st

from iuprep import bpe
from iuprep.bpe import MARKER, BpeModel, Vocab, build_vocab, detokenize, learn, learn_from_counts
from iuprep.corpus import Corpus

from generators import random_words
from oracles import bpe_bruteforce

CLASSIC = {"low": 5, "lower": 2, "newest": 6, "widest": 3}


def test_classic_example_prefix():
    model = learn_from_counts(CLASSIC, 4)
    assert model.merges == (("e", "s"), ("es", "t"), ("est", MARKER), ("l", "o"))


def test_classic_example_frozen():
    model = learn_from_counts(CLASSIC, 10)
    assert model.merges == (
        ("e", "s"), ("es", "t"), ("est", MARKER), ("l", "o"), ("lo", "w"),
        ("e", "w"), ("ew", "est</w>"), ("n", "ewest</w>"), ("low", MARKER), ("d", "est</w>"),
    )


def test_zero_merges_is_char_split():
    model = learn_from_counts(CLASSIC, 0)
    assert model.merges == ()
    assert model.apply("ab") == ["a", "b", MARKER]


def test_stops_when_no_pair_repeats():
    model = learn_from_counts({"aaaa": 1}, 10)
    # (a,a) occurs twice in a a a a </w>; after that every pair is unique
    assert model.merges == (("a", "a"),)


def test_only_ab_merge():
    model = BpeModel((("a", "b"),))
    assert model.apply("ab ab") == ["ab", MARKER, "ab", MARKER]


def test_chained_merges_attach_marker():
    model = BpeModel((("b", MARKER), ("a", "b" + MARKER)))
    assert model.apply("ab ab") == ["ab" + MARKER, "ab" + MARKER]


def test_detokenize():
    assert detokenize([]) == ""
    assert detokenize(["nu", "na", "vut" + MARKER]) == "nunavut"
    assert detokenize(["nu", "na", "vut", MARKER, "x", MARKER]) == "nunavut x"


def test_learn_on_corpora_concatenates_both_sides():
    c1 = Corpus.from_pairs("a", "en", "iu", [("low low", "nunavut")])
    c2 = Corpus.from_pairs("b", "en", "fi", [("nunavut", "low")])
    model = learn([c1, c2], 3)
    assert model == learn_from_counts({"low": 3, "nunavut": 2}, 3)


def test_model_text_round_trip(tmp_path):
    model = learn_from_counts(CLASSIC, 10)
    model.save(tmp_path / "m")
    back = BpeModel.load(tmp_path / "m")
    assert back == model
    assert back.requested == 10
    assert (tmp_path / "m").read_text().splitlines()[0] == "#iuprep-bpe v1 marker=</w> requested=10"


def test_model_rejects_duplicates_and_unknown_symbols():
    with pytest.raises(ValueError, match="duplicate"):
        BpeModel((("a", "b"), ("a", "b")))
    with pytest.raises(ValueError, match="no earlier merge"):
        BpeModel((("ab", "c"),))


def test_apply_lines_matches_apply():
    model = learn_from_counts(CLASSIC, 10)
    assert bpe.apply_lines(model.to_text(), ["lowest newer", ""]) == [
        " ".join(model.apply("lowest newer")), ""]


def test_vocab_for_char_split_model():
    c = Corpus.from_pairs("d", "en", "iu", [("ab", "ab")])
    v = build_vocab(BpeModel(), [c])
    assert v.tokens == (MARKER, "a", "b")
    assert v.counts == (2, 2, 2)


def test_vocab_reserved_and_io(tmp_path):
    v = Vocab(("x", "y"), (3, 1)).with_reserved(["<2fi>", "<2iu>"])
    assert v.token_to_id == {"<2fi>": 0, "<2iu>": 1, "x": 2, "y": 3}
    v.save(tmp_path / "v")
    assert Vocab.load(tmp_path / "v") == v
    with pytest.raises(ValueError):
        v.with_reserved(["x"])


def test_oracle_small_random():
    rng = random.Random(11)
    for _ in range(20):
        words = random_words(rng, rng.randint(1, 15))
        counts = {w: rng.randint(1, 6) for w in words}
        n = rng.randint(0, 40)
        assert list(learn_from_counts(counts, n).merges) == bpe_bruteforce(counts, n)


def test_replay_equals_sequential_merging():
    # applying every learned merge in order to each training word gives the same split
    rng = random.Random(3)
    counts = {w: rng.randint(1, 5) for w in random_words(rng, 40)}
    model = learn_from_counts(counts, 60)
    for w in counts:
        syms = list(w) + [MARKER]
        for pair in model.merges:
            syms = bpe.merge_symbols(syms, pair)
        assert tuple(syms) == model.segment_word(w)


word = st.text(st.characters(blacklist_categories=("Cs", "Zs", "Zl", "Zp", "Cc")), min_size=1, max_size=8)


@settings(max_examples=200, deadline=None)
@given(st.lists(word, max_size=10))
def test_reversible(words):
    model = learn_from_counts(CLASSIC, 10)
    words = [w for w in words if MARKER not in w and not any(c.isspace() for c in w)]
    s = " ".join(words)
    assert detokenize(model.apply(s)) == s


def test_vocab_can_shrink_with_more_merges():
    # merging (a,b) removes both "a" and "b", so size is not monotone in n_merges
    c = Corpus.from_pairs("d", "en", "iu", [("ab ab", "ab")])
    sizes = [build_vocab(learn([c], n), [c]).size for n in (0, 1)]
    assert sizes == [3, 2]


def test_learning_is_deterministic_across_input_order():
    words = list(CLASSIC.items())
    assert learn_from_counts(dict(words), 10) == learn_from_counts(dict(reversed(words)), 10)
