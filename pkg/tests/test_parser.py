import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chunkforge.corpus import Token, generate_synthetic_corpus, read_treebank
from chunkforge.features import Vocabulary, build_vector, encode
from chunkforge.parser import (
    OutOfVocabularyError,
    ShallowParser,
    ShallowTree,
    parse_sentence,
    parse_tagged_line,
    render_tree,
)
from chunkforge.rules import ChunkRule, RuleSet, segment
from chunkforge.svm import Hyperplane, MulticlassModel


@pytest.fixture(scope="module")
def synthetic_parser():
    return ShallowParser().fit(generate_synthetic_corpus(300, 42, 0.0))


def test_parse_pp(synthetic_parser):
    tree = synthetic_parser.parse([Token("fy", "PREP"), Token("byt", "NOUN")])
    assert render_tree(tree) == "(S (PP (PREP fy) (NOUN byt)))"


def test_parse_single_np(synthetic_parser):
    tree = synthetic_parser.parse([Token("X", "NOUN_PROP")])
    assert render_tree(tree) == "(S (NP (NOUN_PROP X)))"


def _hand_model():
    """Two-class model that sends vectors starting with PREP to PP and everything else to ADJP."""
    vocab = Vocabulary.build(["PREP", "NOUN", "ADJ", "CONJ"], ["ADJP", "PP"])
    w = -encode(build_vector(("PREP",)), vocab).features
    w[: len(vocab.tag_list)] *= 2  # only the POS-W block matters
    w[len(vocab.tag_list):] = 0
    return MulticlassModel((Hyperplane(w, 1.0, "ADJP", "PP"),), vocab)


def test_parse_hand_built_two_groups():
    rules = RuleSet([ChunkRule(("PREP", "NOUN"), "PP"), ChunkRule(("ADJ", "CONJ", "ADJ"), "ADJP")])
    tokens = [Token(w, t) for w, t in zip("abcde", ("PREP", "NOUN", "ADJ", "CONJ", "ADJ"))]
    tree = parse_sentence(tokens, _hand_model(), rules)
    assert [label for label, _ in tree.children] == ["PP", "ADJP"]
    assert [len(toks) for _, toks in tree.children] == [2, 3]
    assert tree.tokens == tuple(tokens)


def test_unmatched_tokens_still_labeled():
    tokens = [Token("x", "CONJ"), Token("y", "PREP")]
    tree = parse_sentence(tokens, _hand_model(), RuleSet())
    assert [label for label, _ in tree.children] == ["ADJP", "PP"]


def test_parse_errors(synthetic_parser):
    with pytest.raises(OutOfVocabularyError, match="token 1: tag ZZZ"):
        synthetic_parser.parse([Token("a", "NOUN"), Token("b", "ZZZ")])
    with pytest.raises(ValueError):
        synthetic_parser.parse([])


def test_render_single_child():
    tree = ShallowTree((("NP", (Token("X", "NOUN_PROP"),)),))
    assert render_tree(tree) == "(S (NP (NOUN_PROP X)))"
    with pytest.raises(ValueError):
        ShallowTree((("NP", ()),))


def test_tagged_line_splits_on_last_slash():
    assert parse_tagged_line("a/b/NOUN fy/PREP") == [Token("a/b", "NOUN"), Token("fy", "PREP")]
    with pytest.raises(ValueError):
        parse_tagged_line("nosplit")


def test_train_parse_self_consistency(synthetic_parser):
    corpus = generate_synthetic_corpus(200, 7, 0.0)
    gold = sum(len(s.chunks) for s in corpus)
    hit = 0
    for sent, chunks in zip(corpus, synthetic_parser.predict_chunks(corpus)):
        hit += len(set(sent.chunks) & set(chunks))
    assert hit / gold >= 0.99


_tags = ["PREP", "NOUN", "NOUN_PROP", "ADJ", "CONJ", "VERB", "POSS_PRON", "DET"]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from(_tags), min_size=1, max_size=25))
def test_tree_round_trip_and_group_count(synthetic_parser, tags):
    tokens = [Token(f"w{i}", t) for i, t in enumerate(tags)]
    tree = synthetic_parser.parse(tokens)
    again = synthetic_parser.parse(tokens)
    assert tree == again
    assert len(tree.children) == len(segment(tags, synthetic_parser.rules_))
    sent = read_treebank(render_tree(tree))[0]
    assert sent.tokens == tuple(tokens)
    assert list(sent.chunks) == tree.chunks()


def test_estimator_params():
    p = ShallowParser(C=2.0)
    assert p.get_params()["C"] == 2.0
    with pytest.raises(Exception):
        p.parse([Token("a", "NOUN")])


def test_predict_accepts_sentences(synthetic_parser):
    corpus = generate_synthetic_corpus(5, 1, 0.0)
    trees = synthetic_parser.predict(corpus)
    assert [t.tokens for t in trees] == [s.tokens for s in corpus]
    assert np.all([len(t.children) >= 1 for t in trees])
