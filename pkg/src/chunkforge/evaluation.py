"""Chunk-level scoring plus holdout and k-fold protocols.

A predicted chunk counts as correct only when a gold chunk has the same
start, end and label.  Results are also broken down by sentence length
(at most 20 tokens versus longer).
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .parser import ShallowParser
from .rules import extract_rules
from .svm import TrainConfig

SHORT_SENTENCE_MAX = 20
BUCKETS = ("<=20", ">20")


@dataclass(frozen=True)
class ChunkCounts:
    true_positive: int = 0
    false_positive: int = 0
    false_negative: int = 0

    def __post_init__(self):
        if min(self.true_positive, self.false_positive, self.false_negative) < 0:
            raise ValueError("chunk counts must be non-negative")

    def __add__(self, other):
        return ChunkCounts(
            self.true_positive + other.true_positive,
            self.false_positive + other.false_positive,
            self.false_negative + other.false_negative,
        )


@dataclass(frozen=True)
class Metrics:
    precision: float
    recall: float
    f_score: float


def _check_disjoint(chunks, which):
    ordered = sorted(chunks, key=lambda c: (c.start, c.end))
    for a, b in zip(ordered, ordered[1:]):
        if b.start < a.end:
            raise ValueError(f"overlapping {which} chunks {a} and {b}")


def score_chunks(gold, predicted):
    """Exact-match chunk counts for one sentence."""
    _check_disjoint(gold, "gold")
    _check_disjoint(predicted, "predicted")
    # disjoint chunks have distinct spans, so a set intersection is a one-to-one matching
    key = lambda c: (c.start, c.end, c.label)  # noqa: E731
    gold_keys = {key(c) for c in gold}
    tp = sum(1 for c in predicted if key(c) in gold_keys)
    return ChunkCounts(tp, len(predicted) - tp, len(gold) - tp)


def prf(counts):
    """Precision, recall and their harmonic mean; an empty denominator yields 0."""
    tp, fp, fn = counts.true_positive, counts.false_positive, counts.false_negative
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f = 2 * p * r / (p + r) if p + r else 0.0
    return Metrics(p, r, f)


def length_bucket(n_tokens):
    return BUCKETS[0] if n_tokens <= SHORT_SENTENCE_MAX else BUCKETS[1]


@dataclass
class FoldResult:
    n_train: int
    n_test: int
    counts: ChunkCounts
    bucket_counts: dict
    n_rules: int
    n_hyperplanes: int
    skipped_long: int

    @property
    def metrics(self):
        return prf(self.counts)


@dataclass
class EvalResult:
    protocol: str
    seed: int
    n_sentences: int
    folds: list
    metrics: Metrics
    bucket_counts: dict
    n_rules: int
    n_hyperplanes: int
    skipped_long: int
    params: dict = field(default_factory=dict)

    @property
    def bucket_metrics(self):
        return {b: prf(self.bucket_counts[b]) for b in BUCKETS}


def _shuffled(n, seed):
    return np.random.default_rng(seed).permutation(n)


def _run_fold(corpus, train_idx, test_idx, config):
    train = corpus.subset(train_idx)
    test = corpus.subset(test_idx)
    if len(train.class_inventory) < 2:
        raise ValueError("training part needs at least 2 chunk classes")
    parser = ShallowParser(
        C=config.c, tol=config.tolerance, max_passes=config.max_passes, extra_tags=sorted(corpus.tag_inventory)
    ).fit(train)
    total = ChunkCounts()
    buckets = {b: ChunkCounts() for b in BUCKETS}
    for sentence, predicted in zip(test, parser.predict_chunks(test)):
        c = score_chunks(sentence.chunks, predicted)
        total = total + c
        b = length_bucket(len(sentence))
        buckets[b] = buckets[b] + c
    return FoldResult(
        n_train=len(train),
        n_test=len(test),
        counts=total,
        bucket_counts=buckets,
        n_rules=len(parser.rules_),
        n_hyperplanes=len(parser.model_.hyperplanes),
        skipped_long=parser.rules_.skipped_long,
    )


def holdout_evaluate(corpus, train_fraction=0.8, seed=0, config=TrainConfig()):
    """Shuffle sentences, train on the first ``ceil(train_fraction * n)`` and test on the rest."""
    n = len(corpus)
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must lie strictly between 0 and 1, got {train_fraction}")
    if n < 2:
        raise ValueError("holdout evaluation needs at least 2 sentences")
    n_train = math.ceil(train_fraction * n)
    if n_train >= n:
        raise ValueError(f"degenerate split: {n_train} of {n} sentences for training leaves no test data")
    order = _shuffled(n, seed)
    fold = _run_fold(corpus, order[:n_train], order[n_train:], config)
    return EvalResult(
        protocol="holdout",
        seed=seed,
        n_sentences=n,
        folds=[fold],
        metrics=fold.metrics,
        bucket_counts=fold.bucket_counts,
        n_rules=fold.n_rules,
        n_hyperplanes=fold.n_hyperplanes,
        skipped_long=fold.skipped_long,
        params={"train_fraction": train_fraction, "n_train": fold.n_train, "n_test": fold.n_test},
    )


def kfold_indices(n, k, seed):
    """Seeded shuffle split into ``k`` contiguous folds whose sizes differ by at most one."""
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if k > n:
        raise ValueError(f"k={k} exceeds the number of sentences ({n})")
    return np.array_split(_shuffled(n, seed), k)


def kfold_cross_validate(corpus, k=5, seed=0, config=TrainConfig()):
    """Per-fold results and their arithmetic-mean metrics.

    Bucket counts are pooled over folds.  The reported rule and hyperplane
    counts describe the full corpus; per-fold values live in ``folds``.
    """
    n = len(corpus)
    folds_idx = kfold_indices(n, k, seed)
    folds = []
    for i, test_idx in enumerate(folds_idx):
        train_idx = np.concatenate([f for j, f in enumerate(folds_idx) if j != i])
        folds.append(_run_fold(corpus, train_idx, test_idx, config))
    per_fold = [f.metrics for f in folds]
    mean = Metrics(
        float(np.mean([m.precision for m in per_fold])),
        float(np.mean([m.recall for m in per_fold])),
        float(np.mean([m.f_score for m in per_fold])),
    )
    buckets = {b: sum((f.bucket_counts[b] for f in folds), ChunkCounts()) for b in BUCKETS}
    rules = extract_rules(corpus)
    n_classes = len(corpus.class_inventory)
    return EvalResult(
        protocol="kfold",
        seed=seed,
        n_sentences=n,
        folds=folds,
        metrics=mean,
        bucket_counts=buckets,
        n_rules=len(rules),
        n_hyperplanes=n_classes * (n_classes - 1) // 2,
        skipped_long=rules.skipped_long,
        params={"k": k},
    )


# ---------------------------------------------------------------------------
# reports


def _pct(x):
    return f"{100 * x:.2f}"


def _bucket_key(b):
    return "le20" if b == BUCKETS[0] else "gt20"


def report_items(result):
    """Ordered ``(key, value)`` pairs shared by the text and key=value reports."""
    items = [("protocol", result.protocol), ("seed", str(result.seed)), ("sentences", str(result.n_sentences))]
    items += [(k, str(v)) for k, v in result.params.items()]
    items += [
        ("rules", str(result.n_rules)),
        ("hyperplanes", str(result.n_hyperplanes)),
        ("skipped_long", str(result.skipped_long)),
        ("precision", _pct(result.metrics.precision)),
        ("recall", _pct(result.metrics.recall)),
        ("f_score", _pct(result.metrics.f_score)),
    ]
    for b in BUCKETS:
        m, c = prf(result.bucket_counts[b]), result.bucket_counts[b]
        key = f"bucket.{_bucket_key(b)}"
        items += [
            (f"{key}.precision", _pct(m.precision)),
            (f"{key}.recall", _pct(m.recall)),
            (f"{key}.f_score", _pct(m.f_score)),
            (f"{key}.gold_chunks", str(c.true_positive + c.false_negative)),
        ]
    if result.protocol == "kfold":
        for i, f in enumerate(result.folds, start=1):
            m = f.metrics
            items += [
                (f"fold.{i}.precision", _pct(m.precision)),
                (f"fold.{i}.recall", _pct(m.recall)),
                (f"fold.{i}.f_score", _pct(m.f_score)),
                (f"fold.{i}.test_sentences", str(f.n_test)),
                (f"fold.{i}.rules", str(f.n_rules)),
                (f"fold.{i}.hyperplanes", str(f.n_hyperplanes)),
            ]
    return items


def format_report(result, style="text"):
    if style == "kv":
        return "".join(f"{k}={v}\n" for k, v in report_items(result))
    if style != "text":
        raise ValueError(f"unknown report style {style!r}")
    m = result.metrics
    lines = [f"protocol: {result.protocol} (seed {result.seed})"]
    if result.protocol == "holdout":
        p = result.params
        lines.append(
            f"sentences: {result.n_sentences} (train {p['n_train']}, test {p['n_test']}, "
            f"train fraction {p['train_fraction']})"
        )
    else:
        lines.append(f"sentences: {result.n_sentences} in {result.params['k']} folds")
    scope = " (full corpus)" if result.protocol == "kfold" else ""
    lines += [
        f"rules{scope}: {result.n_rules}",
        f"hyperplanes{scope}: {result.n_hyperplanes}",
        f"skipped long chunks{scope}: {result.skipped_long}",
        f"{'mean ' if result.protocol == 'kfold' else ''}P={_pct(m.precision)}% R={_pct(m.recall)}% F={_pct(m.f_score)}%",
    ]
    for b in BUCKETS:
        bm, c = prf(result.bucket_counts[b]), result.bucket_counts[b]
        lines.append(
            f"  sentences {b} tokens: P={_pct(bm.precision)}% R={_pct(bm.recall)}% F={_pct(bm.f_score)}% "
            f"({c.true_positive + c.false_negative} gold chunks)"
        )
    if result.protocol == "kfold":
        for i, f in enumerate(result.folds, start=1):
            fm = f.metrics
            lines.append(
                f"  fold {i}: P={_pct(fm.precision)}% R={_pct(fm.recall)}% F={_pct(fm.f_score)}% "
                f"(test {f.n_test}, rules {f.n_rules}, hyperplanes {f.n_hyperplanes})"
            )
    lines.append("F is the harmonic mean 2PR/(P+R) of chunk precision and recall (exact span and label)")
    return "\n".join(lines) + "\n"
