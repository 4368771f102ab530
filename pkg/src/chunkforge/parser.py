"""Analysis phase: rule-driven grouping followed by SVM labeling of each group."""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .corpus import Chunk, Corpus, Sentence, Token, render_sentence
from .features import build_vector, encode_many, vectorize_corpus
from .rules import extract_rules, segment
from .svm import TrainConfig, classify_many, train_multiclass


class OutOfVocabularyError(ValueError):
    def __init__(self, index, tag):
        super().__init__(f"token {index}: tag {tag} is not in the model vocabulary")
        self.index = index
        self.tag = tag


@dataclass(frozen=True)
class ShallowTree:
    """``(S (LABEL tok...) ...)``: one child per group, covering the sentence in order."""

    children: tuple

    def __post_init__(self):
        children = tuple((label, tuple(tokens)) for label, tokens in self.children)
        for label, tokens in children:
            if not tokens:
                raise ValueError(f"tree child {label} has no tokens")
        object.__setattr__(self, "children", children)

    @property
    def tokens(self):
        return tuple(t for _, toks in self.children for t in toks)

    def chunks(self):
        out, i = [], 0
        for label, toks in self.children:
            out.append(Chunk(i, i + len(toks), label))
            i += len(toks)
        return out

    def to_sentence(self):
        return Sentence(self.tokens, tuple(self.chunks()))


def parse_sentence(tokens, model, ruleset):
    """Group ``tokens`` with ``ruleset`` and label every group with ``model``."""
    tokens = tuple(tokens)
    if not tokens:
        raise ValueError("cannot parse an empty sentence")
    vocab = model.vocab
    for i, tok in enumerate(tokens):
        if vocab.tag_index(tok.tag) is None:
            raise OutOfVocabularyError(i, tok.tag)
    tags = tuple(t.tag for t in tokens)
    groups = segment(tags, ruleset)
    labels = classify_many(model, [build_vector(tags[g.start:g.end]) for g in groups])
    return ShallowTree(tuple((label, tokens[g.start:g.end]) for g, label in zip(groups, labels)))


def render_tree(tree):
    return render_sentence(tree.to_sentence())


def parse_tagged_line(line):
    """``word/TAG word/TAG ...`` -> tokens, splitting each item on its last ``/``."""
    tokens = []
    for item in line.split(" "):
        if not item:
            continue
        word, sep, tag = item.rpartition("/")
        if not sep or not word:
            raise ValueError(f"token {item!r} is not of the form word/TAG")
        tokens.append(Token(word, tag))
    return tokens


class ShallowParser(BaseEstimator):
    """Learns chunk rules and a one-vs-one SMO model from a gold corpus, then parses tagged sentences.

    Parameters mirror :class:`~chunkforge.svm.TrainConfig`.  ``extra_tags``
    widens the feature vocabulary with tags that may appear at parse time
    but not in training.
    """

    def __init__(self, C=1.0, tol=1e-3, max_passes=100, extra_tags=()):
        self.C = C
        self.tol = tol
        self.max_passes = max_passes
        self.extra_tags = extra_tags

    def fit(self, corpus, y=None):
        if not isinstance(corpus, Corpus):
            corpus = Corpus(tuple(corpus))
        self.rules_ = extract_rules(corpus)
        vectors, vocab = vectorize_corpus(corpus, self.rules_, extra_tags=self.extra_tags)
        X = encode_many(vectors, vocab)
        labels = np.array([v.label for v in vectors], dtype=object)
        self.model_ = train_multiclass(X, labels, vocab, TrainConfig(self.C, self.tol, self.max_passes))
        self.vocabulary_ = vocab
        return self

    @classmethod
    def from_artifacts(cls, model, ruleset):
        parser = cls(C=model.config.c, tol=model.config.tolerance, max_passes=model.config.max_passes)
        parser.model_ = model
        parser.rules_ = ruleset
        parser.vocabulary_ = model.vocab
        return parser

    def parse(self, tokens):
        check_is_fitted(self, "model_")
        return parse_sentence(tokens, self.model_, self.rules_)

    def predict(self, X):
        """Shallow trees for an iterable of token sequences (or :class:`Sentence` objects)."""
        return [self.parse(s.tokens if isinstance(s, Sentence) else s) for s in X]

    def predict_chunks(self, X):
        return [tree.chunks() for tree in self.predict(X)]

