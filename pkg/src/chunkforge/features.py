"""Extraction vectors: a group's tags padded to five slots, and their one-hot encoding.

Slot 1 (``POS-W``) holds the group-initial tag; slots 2-5 hold the following
tags of the group, and unused slots hold the pad mark ``?``.  Numerically
each slot becomes a one-hot block over the tag vocabulary, so an encoded
vector has exactly five ones.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import PAD, check_symbol, check_tag_sequence
from .corpus import extract_chunk_sequences

N_SLOTS = 5
FEATURE_NAMES = ("POS-W", "POS-LEFT-1", "POS-LEFT-2", "POS-LEFT-3", "POS-LEFT-4")


class UnknownSymbolError(ValueError):
    """A tag or class that is not part of the vocabulary."""


class VectorFileError(ValueError):
    pass


@dataclass(frozen=True)
class ExtractionVector:
    slots: tuple
    label: Optional[str] = None

    def __post_init__(self):
        slots = tuple(self.slots)
        if len(slots) != N_SLOTS:
            raise ValueError(f"an extraction vector has {N_SLOTS} slots, got {len(slots)}")
        padded = False
        for s in slots:
            if s == PAD:
                padded = True
                continue
            if padded:
                raise ValueError(f"tag {s} after a pad slot: pads must be a suffix")
            check_symbol(s, "tag")
        if self.label is not None:
            check_symbol(self.label, "class")
        object.__setattr__(self, "slots", slots)

    @property
    def tags(self):
        """The slots with the padding stripped."""
        return tuple(s for s in self.slots if s != PAD)

    def to_line(self):
        return ",".join(self.slots + (self.label if self.label is not None else PAD,))


def build_vector(tags, label=None):
    """Pad a group of 1 to 5 tags to an :class:`ExtractionVector`."""
    tags = check_tag_sequence(tags, 1, N_SLOTS)
    return ExtractionVector(tags + (PAD,) * (N_SLOTS - len(tags)), label)


@dataclass(frozen=True)
class Vocabulary:
    """Ordered tag and class lists; ``tag_list`` always includes the pad mark."""

    tag_list: tuple
    class_list: tuple = ()

    def __post_init__(self):
        tags = tuple(self.tag_list)
        classes = tuple(self.class_list)
        if PAD not in tags:
            raise ValueError("tag_list must contain the pad symbol '?'")
        if len(set(tags)) != len(tags) or len(set(classes)) != len(classes):
            raise ValueError("vocabulary entries must be unique")
        for t in tags:
            if t != PAD:
                check_symbol(t, "tag")
        for c in classes:
            check_symbol(c, "class")
        object.__setattr__(self, "tag_list", tags)
        object.__setattr__(self, "class_list", classes)
        object.__setattr__(self, "_tag_index", {t: i for i, t in enumerate(tags)})
        object.__setattr__(self, "_class_index", {c: i for i, c in enumerate(classes)})

    @classmethod
    def build(cls, tags=(), classes=()):
        return cls(tuple(sorted(set(tags) | {PAD})), tuple(sorted(set(classes))))

    @property
    def n_features(self):
        return N_SLOTS * len(self.tag_list)

    def tag_index(self, tag):
        return self._tag_index.get(tag)

    def class_index(self, label):
        return self._class_index.get(label)


@dataclass(frozen=True)
class EncodedSample:
    features: np.ndarray
    label_index: Optional[int] = None


def _feature_indices(vector, vocab):
    width = len(vocab.tag_list)
    out = []
    for slot, sym in enumerate(vector.slots):
        idx = vocab.tag_index(sym)
        if idx is None:
            raise UnknownSymbolError(f"slot {slot + 1}: unknown symbol {sym}")
        out.append(slot * width + idx)
    return out


def encode(vector, vocab):
    """Block one-hot encoding of one vector (feature ``s*|tags| + index(tag)`` for slot ``s``)."""
    x = np.zeros(vocab.n_features)
    x[_feature_indices(vector, vocab)] = 1.0
    label_index = None
    if vector.label is not None:
        label_index = vocab.class_index(vector.label)
        if label_index is None:
            raise UnknownSymbolError(f"label: unknown class {vector.label}")
    return EncodedSample(x, label_index)


def encode_many(vectors, vocab):
    """Stack the encodings of ``vectors`` into an ``(n, 5*|tags|)`` matrix; labels are ignored."""
    X = np.zeros((len(vectors), vocab.n_features))
    for row, vector in enumerate(vectors):
        X[row, _feature_indices(vector, vocab)] = 1.0
    return X


def vectorize_corpus(corpus, ruleset=None, extra_tags=()):
    """One labeled vector per gold chunk of at most five tags, plus the vocabulary.

    The vocabulary covers the corpus inventories; tags and classes named by
    ``ruleset`` and any ``extra_tags`` are added so that a model trained on
    it can encode everything those rules may produce.
    """
    vectors = [
        build_vector(pattern, label)
        for sentence in corpus
        for pattern, label in extract_chunk_sequences(sentence)
        if len(pattern) <= N_SLOTS
    ]
    tags = set(corpus.tag_inventory) | set(extra_tags)
    classes = set(corpus.class_inventory)
    if ruleset is not None:
        tags |= ruleset.tags
        classes |= ruleset.labels
    return vectors, Vocabulary.build(tags, classes)


# ---------------------------------------------------------------------------
# vector file

_FEATURES_LINE = "@features " + ",".join(FEATURE_NAMES)


def write_vector_file(vectors, vocab, sink):
    for v in vectors:
        encode(v, vocab)  # validates every symbol before anything is written
    sink.write(_FEATURES_LINE + "\n")
    sink.write(f"@tags {','.join(vocab.tag_list)}\n")
    sink.write(f"@classes {','.join(vocab.class_list)}\n")
    for v in vectors:
        sink.write(v.to_line() + "\n")


def _header(line, key, lineno):
    if line != key and not line.startswith(key + " "):
        raise VectorFileError(f"line {lineno}: expected '{key}' header")
    body = line[len(key):].strip()
    return tuple(body.split(",")) if body else ()


def read_vector_file(source):
    lines = (raw.rstrip("\n") for raw in source)
    try:
        first = next(lines)
        tags_line = next(lines)
        classes_line = next(lines)
    except StopIteration:
        raise VectorFileError("truncated vector file: missing header lines") from None
    if first != _FEATURES_LINE:
        raise VectorFileError(f"line 1: expected '{_FEATURES_LINE}'")
    try:
        vocab = Vocabulary(_header(tags_line, "@tags", 2), _header(classes_line, "@classes", 3))
    except ValueError as exc:
        raise VectorFileError(f"bad vocabulary header: {exc}") from None
    vectors = []
    for lineno, line in enumerate(lines, start=4):
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != N_SLOTS + 1:
            raise VectorFileError(f"line {lineno}: expected {N_SLOTS + 1} fields, got {len(fields)}")
        label = None if fields[-1] == PAD else fields[-1]
        try:
            vector = ExtractionVector(tuple(fields[:N_SLOTS]), label)
            encode(vector, vocab)
        except ValueError as exc:
            raise VectorFileError(f"line {lineno}: {exc}") from None
        vectors.append(vector)
    return vectors, vocab


class ExtractionVectorizer(TransformerMixin, BaseEstimator):
    """Scikit-learn transformer from tag groups to block one-hot rows.

    ``fit`` learns the tag vocabulary (and the class list from ``y`` if
    given) unless a fixed ``vocabulary`` is passed.  Inputs may be tag
    sequences of length 1-5 or :class:`ExtractionVector` instances.
    """

    def __init__(self, vocabulary=None):
        self.vocabulary = vocabulary

    @staticmethod
    def _as_vectors(X):
        return [x if isinstance(x, ExtractionVector) else build_vector(x) for x in X]

    def fit(self, X, y=None):
        if self.vocabulary is not None:
            self.vocabulary_ = self.vocabulary
        else:
            vectors = self._as_vectors(X)
            tags = {t for v in vectors for t in v.tags}
            self.vocabulary_ = Vocabulary.build(tags, () if y is None else set(y))
        self.n_features_out_ = self.vocabulary_.n_features
        return self

    def transform(self, X):
        check_is_fitted(self, "vocabulary_")
        return encode_many(self._as_vectors(X), self.vocabulary_)

    def get_feature_names_out(self, input_features=None):
        check_is_fitted(self, "vocabulary_")
        return np.array([f"{name}={t}" for name in FEATURE_NAMES for t in self.vocabulary_.tag_list], dtype=object)
