import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chunkforge.corpus import Corpus, generate_synthetic_corpus, read_treebank
from chunkforge.features import (
    ExtractionVector,
    ExtractionVectorizer,
    UnknownSymbolError,
    VectorFileError,
    Vocabulary,
    build_vector,
    encode,
    read_vector_file,
    vectorize_corpus,
    write_vector_file,
)

VOCAB3 = Vocabulary(("?", "NOUN", "PREP"), ("NP", "PP"))


def test_build_vector_pads():
    assert build_vector(("PREP", "NOUN")).slots == ("PREP", "NOUN", "?", "?", "?")
    assert build_vector(("NOUN_PROP",)).slots == ("NOUN_PROP", "?", "?", "?", "?")
    assert build_vector(tuple("ABCDE")).slots == tuple("ABCDE")


@pytest.mark.parametrize("tags", [(), ("A",) * 6])
def test_build_vector_rejects_bad_length(tags):
    with pytest.raises(ValueError):
        build_vector(tags)


def test_pads_must_be_suffix():
    with pytest.raises(ValueError):
        ExtractionVector(("A", "?", "B", "?", "?"))


def test_encode_block_offsets():
    sample = encode(ExtractionVector(("PREP", "NOUN", "?", "?", "?"), "PP"), VOCAB3)
    assert set(np.flatnonzero(sample.features)) == {2, 4, 6, 9, 12}
    assert sample.label_index == 1


def test_encode_all_pad():
    sample = encode(ExtractionVector(("?",) * 5), VOCAB3)
    assert set(np.flatnonzero(sample.features)) == {0, 3, 6, 9, 12}
    assert sample.label_index is None


def test_encode_unknown_symbol():
    with pytest.raises(UnknownSymbolError, match="slot 1: unknown symbol XYZ"):
        encode(build_vector(("XYZ",)), VOCAB3)
    with pytest.raises(UnknownSymbolError, match="unknown class"):
        encode(build_vector(("NOUN",), "VP"), VOCAB3)


def test_vocabulary_sorted_with_pad():
    vocab = Vocabulary.build({"PREP", "NOUN"}, {"PP", "NP"})
    assert vocab.tag_list == ("?", "NOUN", "PREP")
    assert vocab.class_list == ("NP", "PP")
    with pytest.raises(ValueError):
        Vocabulary(("NOUN",))


def test_vectorize_corpus():
    vectors, vocab = vectorize_corpus(read_treebank("(S (PP (PREP fy) (NOUN byt)))"))
    assert vectors == [ExtractionVector(("PREP", "NOUN", "?", "?", "?"), "PP")]
    assert vocab.tag_list == ("?", "NOUN", "PREP")


def test_vectorize_empty():
    vectors, vocab = vectorize_corpus(Corpus())
    assert vectors == []
    assert vocab.tag_list == ("?",)
    assert vocab.class_list == ()


def test_vectorize_counts_short_chunks():
    corpus = generate_synthetic_corpus(100, 42, 0.0)
    vectors, _ = vectorize_corpus(corpus)
    assert len(vectors) == sum(1 for s in corpus for c in s.chunks if c.end - c.start <= 5)


def test_vector_file_body_line():
    buf = io.StringIO()
    write_vector_file([build_vector(("PREP", "NOUN"), "PP")], VOCAB3, buf)
    assert buf.getvalue() == (
        "@features POS-W,POS-LEFT-1,POS-LEFT-2,POS-LEFT-3,POS-LEFT-4\n"
        "@tags ?,NOUN,PREP\n"
        "@classes NP,PP\n"
        "PREP,NOUN,?,?,?,PP\n"
    )


def test_vector_file_empty():
    buf = io.StringIO()
    write_vector_file([], VOCAB3, buf)
    assert len(buf.getvalue().splitlines()) == 3
    assert read_vector_file(io.StringIO(buf.getvalue())) == ([], VOCAB3)


def test_vector_file_errors():
    head = "@features POS-W,POS-LEFT-1,POS-LEFT-2,POS-LEFT-3,POS-LEFT-4\n@tags ?,NOUN,PREP\n@classes NP,PP\n"
    with pytest.raises(VectorFileError, match="line 5"):
        read_vector_file(io.StringIO(head + "PREP,NOUN,?,?,?,PP\nPREP,NOUN,?,?,PP\n"))
    with pytest.raises(VectorFileError, match="line 4.*unknown class"):
        read_vector_file(io.StringIO(head + "PREP,NOUN,?,?,?,VP\n"))
    with pytest.raises(VectorFileError):
        read_vector_file(io.StringIO("@tags ?\n"))


_tags = ["ADJ", "CONJ", "NOUN", "NOUN_PROP", "POSS_PRON", "PREP"]
_classes = ["ADJP", "NP", "PP"]
_vectors = st.builds(
    build_vector,
    st.lists(st.sampled_from(_tags), min_size=1, max_size=5).map(tuple),
    st.one_of(st.none(), st.sampled_from(_classes)),
)


@settings(max_examples=100, deadline=None)
@given(st.lists(_vectors, max_size=40))
def test_vector_file_round_trip(vectors):
    vocab = Vocabulary.build(_tags, _classes)
    buf = io.StringIO()
    write_vector_file(vectors, vocab, buf)
    assert read_vector_file(io.StringIO(buf.getvalue())) == (vectors, vocab)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.sampled_from(_tags), min_size=1, max_size=5).map(tuple))
def test_build_vector_strips_back(tags):
    v = build_vector(tags)
    assert v.tags == tags
    x = encode(v, Vocabulary.build(_tags)).features
    assert x.sum() == 5


def test_encode_injective():
    vocab = Vocabulary.build(_tags[:4])
    seen = {}
    from itertools import product

    for n in range(1, 4):
        for tags in product(_tags[:4], repeat=n):
            key = encode(build_vector(tags), vocab).features.tobytes()
            assert seen.setdefault(key, tags) == tags


def test_vectorizer_estimator():
    groups = [("PREP", "NOUN"), ("NOUN_PROP",), ("ADJ", "CONJ", "ADJ")]
    vec = ExtractionVectorizer().fit(groups, ["PP", "NP", "ADJP"])
    X = vec.transform(groups)
    assert X.shape == (3, 5 * 6)
    assert (X.sum(axis=1) == 5).all()
    assert vec.vocabulary_.class_list == ("ADJP", "NP", "PP")
    assert vec.get_feature_names_out()[0] == "POS-W=?"
    assert vec.get_params() == {"vocabulary": None}
