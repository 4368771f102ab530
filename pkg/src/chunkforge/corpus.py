"""Bracketed treebank reading/writing and the synthetic corpus generator.

A treebank holds one tree per sentence::

    (S (NP (NOUN_PROP X)) (PP (PREP fy) (NOUN byt)) (PUNC .))

Every phrase node whose children are all ``(TAG word)`` leaves becomes a
chunk.  Deeper structure is flattened down to those innermost nodes, and
leaves that are not covered by such a node are kept as chunk-less tokens.
"""

import re
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_symbol


class TreebankParseError(ValueError):
    """Malformed bracketed input; carries the 1-based line and column."""

    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.reason = message
        self.line = line
        self.column = column


@dataclass(frozen=True)
class Token:
    surface: str
    tag: str

    def __post_init__(self):
        if not self.surface or any(c.isspace() for c in self.surface):
            raise ValueError(f"invalid token surface {self.surface!r}")
        check_symbol(self.tag, "tag")

    def __str__(self):
        return f"{self.surface}/{self.tag}"


@dataclass(frozen=True, order=True)
class Chunk:
    start: int
    end: int
    label: str

    def __post_init__(self):
        if not 0 <= self.start < self.end:
            raise ValueError(f"invalid chunk span [{self.start}, {self.end})")
        check_symbol(self.label, "class")

    def __len__(self):
        return self.end - self.start


@dataclass(frozen=True)
class Sentence:
    tokens: tuple
    chunks: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "chunks", tuple(self.chunks))
        prev_end = 0
        for chunk in self.chunks:
            if chunk.start < prev_end:
                raise ValueError("chunks must be sorted and non-overlapping")
            if chunk.end > len(self.tokens):
                raise ValueError(f"chunk {chunk} exceeds sentence length {len(self.tokens)}")
            prev_end = chunk.end

    def __len__(self):
        return len(self.tokens)

    @property
    def tags(self):
        return tuple(t.tag for t in self.tokens)

    @property
    def words(self):
        return tuple(t.surface for t in self.tokens)


@dataclass(frozen=True)
class Corpus:
    sentences: tuple = ()
    tag_inventory: frozenset = field(init=False)
    class_inventory: frozenset = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "sentences", tuple(self.sentences))
        tags = {t.tag for s in self.sentences for t in s.tokens}
        classes = {c.label for s in self.sentences for c in s.chunks}
        object.__setattr__(self, "tag_inventory", frozenset(tags))
        object.__setattr__(self, "class_inventory", frozenset(classes))

    def __len__(self):
        return len(self.sentences)

    def __iter__(self):
        return iter(self.sentences)

    def __getitem__(self, index):
        if isinstance(index, slice):
            return Corpus(self.sentences[index])
        return self.sentences[index]

    def subset(self, indices):
        return Corpus(tuple(self.sentences[i] for i in indices))


# ---------------------------------------------------------------------------
# reading

_LEX = re.compile(r"\(|\)|[^()\s]+")


def _lex(text):
    """Yield (kind, value, line, column) with kind in {'(', ')', 'atom'}."""
    line_starts = [0] + [m.end() for m in re.finditer("\n", text)]
    line_idx = 0
    for m in _LEX.finditer(text):
        pos = m.start()
        while line_idx + 1 < len(line_starts) and line_starts[line_idx + 1] <= pos:
            line_idx += 1
        value = m.group()
        kind = value if value in "()" else "atom"
        yield kind, value, line_idx + 1, pos - line_starts[line_idx] + 1


class _Node:
    __slots__ = ("label", "children", "line", "column")

    def __init__(self, label, line, column):
        self.label = label
        self.children = []
        self.line = line
        self.column = column

    def is_leaf(self):
        return len(self.children) == 1 and isinstance(self.children[0], str)


def _read_trees(text):
    toks = list(_lex(text))
    eof_line = text.count("\n") + 1
    eof_col = len(text) - text.rfind("\n")
    trees = []
    stack = []
    i = 0
    while i < len(toks):
        kind, value, line, col = toks[i]
        if kind == "(":
            if i + 1 >= len(toks):
                raise TreebankParseError("unbalanced parentheses: unexpected end of input", eof_line, eof_col)
            nkind, nvalue, nline, ncol = toks[i + 1]
            if nkind != "atom":
                raise TreebankParseError("empty label or tag", line, col)
            try:
                check_symbol(nvalue, "label")
            except ValueError as exc:
                raise TreebankParseError(str(exc), nline, ncol) from None
            node = _Node(nvalue, line, col)
            if stack:
                stack[-1].children.append(node)
            stack.append(node)
            i += 2
            continue
        if kind == ")":
            if not stack:
                raise TreebankParseError("unbalanced parentheses: unexpected ')'", line, col)
            node = stack.pop()
            if not node.children:
                raise TreebankParseError(f"node ({node.label}) has no tokens", node.line, node.column)
            if not stack:
                trees.append(node)
        else:
            if not stack:
                raise TreebankParseError(f"text {value!r} outside of any tree", line, col)
            stack[-1].children.append(value)
        i += 1
    if stack:
        node = stack[-1]
        raise TreebankParseError(
            f"unbalanced parentheses: ({node.label} opened at line {node.line}, column {node.column} is never closed",
            eof_line,
            eof_col,
        )
    return trees


def _check_node(node):
    """Reject nodes mixing words with subtrees, or holding more than one word."""
    n_atoms = sum(isinstance(c, str) for c in node.children)
    if n_atoms and (n_atoms > 1 or len(node.children) > 1):
        raise TreebankParseError(
            f"node ({node.label}) must hold exactly one word or only subtrees", node.line, node.column
        )


def _flatten(node, tokens, chunks, top):
    _check_node(node)
    if node.is_leaf():
        tokens.append(Token(node.children[0], node.label))
        return
    for child in node.children:
        _check_node(child)
    if not top and all(child.is_leaf() for child in node.children):
        start = len(tokens)
        for leaf in node.children:
            tokens.append(Token(leaf.children[0], leaf.label))
        chunks.append(Chunk(start, len(tokens), node.label))
        return
    for child in node.children:
        _flatten(child, tokens, chunks, top=False)


def _tree_to_sentence(tree):
    if tree.is_leaf():
        raise TreebankParseError(f"sentence root ({tree.label}) holds a bare word", tree.line, tree.column)
    tokens, chunks = [], []
    _flatten(tree, tokens, chunks, top=True)
    return Sentence(tuple(tokens), tuple(chunks))


def read_treebank(text):
    """Parse bracketed treebank text into a :class:`Corpus` (one sentence per top-level tree)."""
    return Corpus(tuple(_tree_to_sentence(t) for t in _read_trees(text)))


def read_treebank_file(path):
    with open(path, encoding="utf-8") as fh:
        return read_treebank(fh.read())


# ---------------------------------------------------------------------------
# writing


def render_sentence(sentence, root="S"):
    """Bracketed one-line rendering accepted back by :func:`read_treebank`."""
    parts = []
    chunk_at = {c.start: c for c in sentence.chunks}
    i = 0
    while i < len(sentence.tokens):
        chunk = chunk_at.get(i)
        if chunk is None:
            tok = sentence.tokens[i]
            parts.append(f"({tok.tag} {tok.surface})")
            i += 1
            continue
        inner = " ".join(f"({t.tag} {t.surface})" for t in sentence.tokens[chunk.start:chunk.end])
        parts.append(f"({chunk.label} {inner})")
        i = chunk.end
    return f"({root} {' '.join(parts)})"


def write_treebank(corpus):
    return "".join(render_sentence(s) + "\n" for s in corpus)


def extract_chunk_sequences(sentence):
    """``[(tag_tuple, label), ...]`` for each gold chunk, in sentence order."""
    tags = sentence.tags
    return [(tags[c.start:c.end], c.label) for c in sentence.chunks]


# ---------------------------------------------------------------------------
# synthetic data

# (pattern, class, relative weight).  Chosen so that greedy longest-match
# segmentation recovers every chunk boundary: no pattern, extended by the
# start of any chunk that may follow it, forms another pattern.
SYNTHETIC_GRAMMAR = (
    (("PREP", "NOUN"), "PP", 6),
    (("PREP", "NOUN", "POSS_PRON"), "PP", 4),
    (("PREP", "NOUN_PROP"), "PP", 3),
    (("PREP", "NOUN", "NOUN", "NOUN", "POSS_PRON"), "PP", 3),
    (("NOUN_PROP",), "NP", 5),
    (("NOUN", "ADJ"), "NP", 5),
    (("NOUN", "NOUN", "ADJ"), "NP", 3),
    (("DET", "NOUN"), "NP", 3),
    (("NOUN", "NOUN", "NOUN", "ADJ", "ADJ"), "NP", 3),
    (("ADJ", "CONJ", "ADJ"), "ADJP", 3),
    (("ADJ",), "ADJP", 2),
    (("VERB",), "VP", 5),
    (("VERB", "PRON"), "VP", 2),
    (("ADV",), "ADVP", 2),
    (("PART",), "PRT", 2),
    (("NUM", "NOUN", "ADJ", "ADJ"), "NP", 3),
    (("SUB_CONJ",), "SBAR", 1),
    (("REL_PRON",), "WHNP", 1),
    (("INTERJ",), "INTJ", 1),
)

_LEXICON_SIZE = 40


def corrupt_labels(corpus, rate, seed, longer_than=0):
    """Replace each chunk label, with probability ``rate``, by a different class.

    Only sentences with more than ``longer_than`` tokens are touched.  The
    replacement class is drawn uniformly from the corpus class inventory
    minus the original label.
    """
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"noise rate must lie in [0, 1], got {rate}")
    classes = sorted(corpus.class_inventory)
    rng = np.random.default_rng([seed, 1])
    out = []
    for sent in corpus:
        chunks = []
        for chunk in sent.chunks:
            flip, pick = rng.random(), rng.random()
            if len(sent) > longer_than and len(classes) > 1 and flip < rate:
                others = [c for c in classes if c != chunk.label]
                chunk = Chunk(chunk.start, chunk.end, others[int(pick * len(others))])
            chunks.append(chunk)
        out.append(Sentence(sent.tokens, tuple(chunks)))
    return Corpus(tuple(out))


def generate_synthetic_corpus(n_sentences, seed, noise=0.0, noisy_longer_than=0):
    """Deterministic toy treebank drawn from :data:`SYNTHETIC_GRAMMAR`.

    Each sentence has 1 to 8 chunks.  ``noise`` is the per-chunk probability
    of swapping the gold label for another class; ``noisy_longer_than``
    restricts that corruption to sentences longer than the given token count.
    """
    if n_sentences < 0:
        raise ValueError("n_sentences must be non-negative")
    rng = np.random.default_rng(seed)
    weights = np.array([w for _, _, w in SYNTHETIC_GRAMMAR], dtype=float)
    weights /= weights.sum()
    sentences = []
    for _ in range(n_sentences):
        n_chunks = int(rng.integers(1, 9))
        tokens, chunks = [], []
        for k in rng.choice(len(SYNTHETIC_GRAMMAR), size=n_chunks, p=weights):
            pattern, label, _ = SYNTHETIC_GRAMMAR[k]
            start = len(tokens)
            for tag in pattern:
                tokens.append(Token(f"{tag.lower()}{int(rng.integers(_LEXICON_SIZE))}", tag))
            chunks.append(Chunk(start, len(tokens), label))
        sentences.append(Sentence(tuple(tokens), tuple(chunks)))
    corpus = Corpus(tuple(sentences))
    if noise > 0:
        corpus = corrupt_labels(corpus, noise, seed, longer_than=noisy_longer_than)
    return corpus


def label_table(corpus):
    """Counter of (tag sequence, label) over every gold chunk."""
    return Counter(pair for s in corpus for pair in extract_chunk_sequences(s))
