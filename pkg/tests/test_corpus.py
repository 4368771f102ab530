import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chunkforge.corpus import (
    SYNTHETIC_GRAMMAR,
    Chunk,
    Corpus,
    Sentence,
    Token,
    TreebankParseError,
    corrupt_labels,
    extract_chunk_sequences,
    generate_synthetic_corpus,
    read_treebank,
    render_sentence,
    write_treebank,
)


def test_read_single_pp():
    corpus = read_treebank("(S (PP (PREP fy) (NOUN byt)))")
    assert len(corpus) == 1
    sent = corpus[0]
    assert sent.tokens == (Token("fy", "PREP"), Token("byt", "NOUN"))
    assert sent.chunks == (Chunk(0, 2, "PP"),)
    assert corpus.tag_inventory == {"PREP", "NOUN"}
    assert corpus.class_inventory == {"PP"}


def test_read_empty_text():
    assert len(read_treebank("")) == 0
    assert len(read_treebank("  \n\n")) == 0


def test_read_two_chunks():
    sent = read_treebank("(S (NP (NOUN_PROP X)) (PP (PREP fy) (NOUN byt)))")[0]
    assert len(sent) == 3
    assert sent.chunks == (Chunk(0, 1, "NP"), Chunk(1, 3, "PP"))


def test_chunkless_tokens_kept():
    sent = read_treebank("(S (NP (NOUN x)) (PUNC .))")[0]
    assert sent.tags == ("NOUN", "PUNC")
    assert sent.chunks == (Chunk(0, 1, "NP"),)


def test_nested_nodes_flatten_to_innermost():
    text = "(S (VP (VERB qAl) (NP (NOUN x) (ADJ y)) (PP (PREP fy) (NP (NOUN byt)))))"
    sent = read_treebank(text)[0]
    assert sent.words == ("qAl", "x", "y", "fy", "byt")
    # VERB and PREP sit next to phrase siblings, so they stay chunk-less
    assert sent.chunks == (Chunk(1, 3, "NP"), Chunk(4, 5, "NP"))


def test_multiline_trees():
    text = "(S\n  (NP (NOUN a))\n)\n(S (VP (VERB b)))\n"
    corpus = read_treebank(text)
    assert [s.tags for s in corpus] == [("NOUN",), ("VERB",)]


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("(S (NP (NOUN x))", 1, 17),
        ("(S (NP (NOUN x))))", 1, 18),
        ("(S\n (NP (NOUN x)))\n)", 3, 1),
    ],
)
def test_unbalanced_reports_position(text, line, column):
    with pytest.raises(TreebankParseError) as exc:
        read_treebank(text)
    assert (exc.value.line, exc.value.column) == (line, column)


@pytest.mark.parametrize(
    "text",
    [
        "(S ( (NOUN x)))",  # empty label
        "(S (NP (NOUN x) (NOUN)))",  # tag without word
        "(S (NP))",  # chunk without tokens
        "(S (NP (NOUN x y)))",  # two words in one leaf
        "(S (NOUN x (ADJ y)))",  # word mixed with a subtree
        "(S x)",  # root with a bare word
        "x (S (NP (NOUN y)))",  # text outside a tree
    ],
)
def test_malformed_input_rejected(text):
    with pytest.raises(TreebankParseError):
        read_treebank(text)


def test_extract_chunk_sequences():
    corpus = read_treebank("(S (PP (PREP fy) (NOUN byt)))\n(S (PUNC .))\n(S (NP (NOUN_PROP X)) (PP (PREP fy) (NOUN byt)))")
    assert extract_chunk_sequences(corpus[0]) == [(("PREP", "NOUN"), "PP")]
    assert extract_chunk_sequences(corpus[1]) == []
    assert extract_chunk_sequences(corpus[2]) == [(("NOUN_PROP",), "NP"), (("PREP", "NOUN"), "PP")]


def test_sentence_invariants():
    toks = (Token("a", "X"), Token("b", "Y"))
    with pytest.raises(ValueError):
        Sentence(toks, (Chunk(0, 2, "NP"), Chunk(1, 2, "PP")))
    with pytest.raises(ValueError):
        Sentence(toks, (Chunk(0, 3, "NP"),))
    with pytest.raises(ValueError):
        Chunk(1, 1, "NP")
    with pytest.raises(ValueError):
        Token("a", "BAD,TAG")


# ---------------------------------------------------------------------------
# synthetic corpus


def test_synthetic_deterministic():
    a = generate_synthetic_corpus(1, 42, 0.0)
    b = generate_synthetic_corpus(1, 42, 0.0)
    assert write_treebank(a).encode() == write_treebank(b).encode()
    assert write_treebank(generate_synthetic_corpus(50, 3, 0.3)) == write_treebank(generate_synthetic_corpus(50, 3, 0.3))


def test_synthetic_empty():
    assert len(generate_synthetic_corpus(0, 7, 0.0)) == 0


def test_synthetic_noise_free_is_functional():
    corpus = generate_synthetic_corpus(1000, 42, 0.0)
    seen = {}
    for sent in corpus:
        for pattern, label in extract_chunk_sequences(sent):
            assert seen.setdefault(pattern, label) == label


def test_synthetic_shape():
    corpus = generate_synthetic_corpus(300, 11, 0.0)
    assert len({p for p, _, _ in SYNTHETIC_GRAMMAR}) >= 10
    assert len({t for p, _, _ in SYNTHETIC_GRAMMAR for t in p}) >= 8
    assert len({c for _, c, _ in SYNTHETIC_GRAMMAR}) >= 6
    for sent in corpus:
        assert 1 <= len(sent.chunks) <= 8
        assert all(1 <= len(c) <= 5 for c in sent.chunks)


def test_noise_only_changes_labels():
    clean = generate_synthetic_corpus(400, 5, 0.0)
    noisy = generate_synthetic_corpus(400, 5, 0.5)
    changed = 0
    for a, b in zip(clean, noisy):
        assert a.tokens == b.tokens
        for ca, cb in zip(a.chunks, b.chunks):
            assert (ca.start, ca.end) == (cb.start, cb.end)
            changed += ca.label != cb.label
    total = sum(len(s.chunks) for s in clean)
    assert 0.4 < changed / total < 0.6


def test_noise_restricted_to_long_sentences():
    clean = generate_synthetic_corpus(400, 5, 0.0)
    noisy = corrupt_labels(clean, 1.0, 5, longer_than=20)
    for a, b in zip(clean, noisy):
        if len(a) <= 20:
            assert a == b
        else:
            assert all(ca.label != cb.label for ca, cb in zip(a.chunks, b.chunks))


# ---------------------------------------------------------------------------
# properties

_tag = st.sampled_from(["NOUN", "PREP", "ADJ", "VERB", "PUNC", "NOUN_PROP", "CONJ+DET"])
_label = st.sampled_from(["NP", "PP", "VP", "ADJP", "PRT"])
_word = st.text(alphabet=st.characters(blacklist_categories=("Cs", "Zs", "Zl", "Zp", "Cc"),
                                       blacklist_characters="()"), min_size=1, max_size=6)


@st.composite
def sentences(draw):
    """Random sentence whose groups are either chunks or chunk-less singletons."""
    tokens, chunks = [], []
    for _ in range(draw(st.integers(1, 8))):
        n = draw(st.integers(1, 5))
        chunked = draw(st.booleans()) or n > 1
        start = len(tokens)
        tokens += [Token(draw(_word), draw(_tag)) for _ in range(n)]
        if chunked:
            chunks.append(Chunk(start, len(tokens), draw(_label)))
    return Sentence(tuple(tokens), tuple(chunks))


@settings(max_examples=100, deadline=None)
@given(st.lists(sentences(), max_size=5))
def test_render_parse_fixed_point(sents):
    corpus = Corpus(tuple(sents))
    once = read_treebank(write_treebank(corpus))
    assert once == corpus
    assert read_treebank(write_treebank(once)) == once


@settings(max_examples=100, deadline=None)
@given(sentences())
def test_chunks_and_free_tokens_cover_sentence(sent):
    parsed = read_treebank(render_sentence(sent))[0]
    covered = [0] * len(parsed)
    for c in parsed.chunks:
        for i in range(c.start, c.end):
            covered[i] += 1
    # chunk-less positions are the zeros; no position is claimed twice
    assert max(covered) <= 1
    assert sum(covered) == sum(len(c) for c in parsed.chunks)
