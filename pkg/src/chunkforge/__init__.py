"""Rule-guided shallow parsing with a from-scratch one-vs-one linear SVM.

Chunk rules (POS tag sequences of length 1 to 5) are mined from a bracketed
treebank, each matched group becomes a padded 5-slot extraction vector, and
pairwise SMO-trained hyperplanes vote on the group's phrase class.
"""

from .corpus import (
    Chunk,
    Corpus,
    Sentence,
    Token,
    TreebankParseError,
    generate_synthetic_corpus,
    read_treebank,
    read_treebank_file,
    write_treebank,
)
from .evaluation import format_report, holdout_evaluate, kfold_cross_validate, prf, score_chunks
from .features import ExtractionVector, ExtractionVectorizer, Vocabulary, build_vector, encode
from .parser import ShallowParser, parse_sentence, render_tree
from .rules import ChunkRule, RuleSet, extract_rules, segment
from .svm import (
    Hyperplane,
    MulticlassModel,
    OneVsOneSMO,
    SMOClassifier,
    TrainConfig,
    classify,
    train_binary,
    train_multiclass,
)

__version__ = "0.1.0"

__all__ = [
    "Chunk",
    "ChunkRule",
    "Corpus",
    "ExtractionVector",
    "ExtractionVectorizer",
    "Hyperplane",
    "MulticlassModel",
    "OneVsOneSMO",
    "RuleSet",
    "SMOClassifier",
    "Sentence",
    "ShallowParser",
    "Token",
    "TrainConfig",
    "TreebankParseError",
    "Vocabulary",
    "build_vector",
    "classify",
    "encode",
    "extract_rules",
    "format_report",
    "generate_synthetic_corpus",
    "holdout_evaluate",
    "kfold_cross_validate",
    "parse_sentence",
    "prf",
    "read_treebank",
    "read_treebank_file",
    "render_tree",
    "score_chunks",
    "segment",
    "train_binary",
    "train_multiclass",
    "write_treebank",
]
