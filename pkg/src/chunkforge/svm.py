"""Linear soft-margin SVMs trained by SMO and combined one-vs-one.

The binary solver works on the dual

    min_a  1/2 sum_ij a_i a_j y_i y_j <x_i, x_j> - sum_i a_i
    s.t.   0 <= a_i <= C,  sum_i a_i y_i = 0

and updates two multipliers at a time, always picking the maximal violating
pair.  Because the kernel is linear the primal weight vector is kept
explicitly, so decision values cost one matrix-vector product.

Identical training rows with identical labels are merged before solving,
with the box bound scaled by the multiplicity.  The merged problem has the
same optimum; multipliers are spread back evenly over the copies.
"""

import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import ConvergenceWarning
from sklearn.utils.multiclass import unique_labels
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from ._validation import check_binary_problem
from .features import Vocabulary, encode_many

MODEL_MAGIC = "@model chunkforge-svm"
MODEL_VERSION = 1

# lower bound on the curvature of the pair objective
_TAU = 1e-12
_SNAP = 1e-12


class DimensionError(ValueError):
    pass


class ModelFormatError(ValueError):
    pass


class ModelVersionError(ModelFormatError):
    pass


class TruncatedModelError(ModelFormatError):
    pass


class ModelDimensionError(ModelFormatError, DimensionError):
    pass


@dataclass(frozen=True)
class TrainConfig:
    c: float = 1.0
    tolerance: float = 1e-3
    max_passes: int = 100

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c}")
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if int(self.max_passes) < 1:
            raise ValueError(f"max_passes must be a positive integer, got {self.max_passes}")


@dataclass(frozen=True, eq=False)
class Hyperplane:
    weights: np.ndarray
    bias: float
    class_pos: str = "+1"
    class_neg: str = "-1"

    def __post_init__(self):
        if self.class_pos == self.class_neg:
            raise ValueError("a hyperplane must separate two distinct classes")
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float).ravel())
        object.__setattr__(self, "bias", float(self.bias))

    @property
    def pair(self):
        return (self.class_pos, self.class_neg)

    @property
    def dimension(self):
        return self.weights.shape[0]

    def with_classes(self, class_pos, class_neg):
        return Hyperplane(self.weights, self.bias, class_pos, class_neg)


def decision_score(h, x):
    """``w . x + b``; positive (or zero) votes ``h.class_pos``."""
    x = np.asarray(x, dtype=float).ravel()
    if x.shape[0] != h.dimension:
        raise DimensionError(f"dimension mismatch: vector has {x.shape[0]} features, hyperplane {h.dimension}")
    return float(h.weights @ x + h.bias)


class DualSolution(NamedTuple):
    weights: np.ndarray
    bias: float
    alpha: np.ndarray
    n_iter: int
    converged: bool


def _smo(X, y, upper, tol, max_iter):
    n, d = X.shape
    alpha = np.zeros(n)
    w = np.zeros(d)
    f = np.zeros(n)
    sq = np.einsum("ij,ij->i", X, X)
    pos = y > 0
    converged = False
    it = 0
    while it < max_iter:
        v = y - f
        at_upper = alpha >= upper
        at_zero = alpha <= 0
        up = (pos & ~at_upper) | (~pos & ~at_zero)
        low = (pos & ~at_zero) | (~pos & ~at_upper)
        i = int(np.argmax(np.where(up, v, -np.inf)))
        j = int(np.argmin(np.where(low, v, np.inf)))
        if v[i] - v[j] < tol:
            converged = True
            break
        it += 1
        eta = max(sq[i] + sq[j] - 2.0 * (X[i] @ X[j]), _TAU)
        if y[i] != y[j]:
            lo = max(0.0, alpha[j] - alpha[i])
            hi = min(upper[j], upper[i] - alpha[i] + alpha[j])
        else:
            lo = max(0.0, alpha[i] + alpha[j] - upper[i])
            hi = min(upper[j], alpha[i] + alpha[j])
        aj = min(max(alpha[j] + y[j] * (v[j] - v[i]) / eta, lo), hi)
        dj = aj - alpha[j]
        if dj == 0.0:
            break
        di = -y[i] * y[j] * dj
        alpha[j] = aj
        alpha[i] = alpha[i] + di
        for t in (i, j):
            # snap round-off so that bound membership stays exact
            if alpha[t] <= _SNAP * upper[t]:
                alpha[t] = 0.0
            elif alpha[t] >= (1.0 - _SNAP) * upper[t]:
                alpha[t] = upper[t]
        w += di * y[i] * X[i] + dj * y[j] * X[j]
        f = X @ w
    v = y - f
    free = (alpha > 0) & (alpha < upper)
    if np.any(free):
        bias = float(np.mean(v[free]))
    else:
        up = (pos & (alpha < upper)) | (~pos & (alpha > 0))
        low = (pos & (alpha > 0)) | (~pos & (alpha < upper))
        hi = v[up].max() if up.any() else v[low].min()
        lo = v[low].min() if low.any() else hi
        bias = float((hi + lo) / 2.0)
    return w, bias, alpha, it, converged


def solve_dual(X, y, config=TrainConfig()):
    """Solve the soft-margin dual for labels in {-1, +1} and return the full dual state.

    ``alpha`` is indexed like the input rows.  The update budget is
    ``config.max_passes`` times the number of distinct rows; running out of
    budget emits a :class:`ConvergenceWarning`.
    """
    X, y = check_binary_problem(X, y)
    rows, inverse, counts = np.unique(
        np.column_stack([X, y]), axis=0, return_inverse=True, return_counts=True
    )
    inverse = inverse.ravel()
    Xu, yu = rows[:, :-1], rows[:, -1]
    upper = config.c * counts.astype(float)
    max_iter = int(config.max_passes) * max(len(yu), 10)
    w, bias, alpha_u, n_iter, converged = _smo(Xu, yu, upper, config.tolerance, max_iter)
    if not converged:
        warnings.warn(
            f"SMO stopped after {n_iter} updates without reaching tolerance {config.tolerance}",
            ConvergenceWarning,
            stacklevel=2,
        )
    alpha = (alpha_u / counts)[inverse]
    # exact bounds for copies of merged rows
    alpha[(alpha_u >= upper)[inverse]] = config.c
    return DualSolution(w, bias, alpha, n_iter, converged)


def train_binary(X, y, config=TrainConfig()):
    """Train one linear SVM on labels in {-1, +1}.

    The returned hyperplane carries placeholder class names ``"+1"`` and
    ``"-1"``; callers attach real classes with :meth:`Hyperplane.with_classes`.
    """
    sol = solve_dual(X, y, config)
    return Hyperplane(sol.weights, sol.bias)


def kkt_residuals(X, y, alpha, weights, bias, c):
    """Per-sample KKT violation of a dual solution (0 where a condition holds exactly).

    For ``alpha == 0`` the requirement is ``y f(x) >= 1``, for ``alpha == c``
    it is ``y f(x) <= 1``, and in between ``y f(x) == 1``.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    margin = np.asarray(y, dtype=float) * (X @ weights + bias)
    alpha = np.asarray(alpha, dtype=float)
    res = np.abs(margin - 1.0)
    res = np.where(alpha <= 0, np.maximum(0.0, 1.0 - margin), res)
    res = np.where(alpha >= c, np.maximum(0.0, margin - 1.0), res)
    return res


# ---------------------------------------------------------------------------
# one-vs-one


@dataclass(frozen=True, eq=False)
class MulticlassModel:
    hyperplanes: tuple
    vocab: Vocabulary = None
    config: TrainConfig = field(default_factory=TrainConfig)

    def __post_init__(self):
        planes = tuple(self.hyperplanes)
        if not planes:
            raise ValueError("no hyperplanes")
        dims = {h.dimension for h in planes}
        if len(dims) != 1:
            raise DimensionError(f"hyperplanes disagree on dimension: {sorted(dims)}")
        if self.vocab is not None and dims != {self.vocab.n_features}:
            raise DimensionError(
                f"hyperplane dimension {dims.pop()} does not match vocabulary dimension {self.vocab.n_features}"
            )
        pairs = [frozenset(h.pair) for h in planes]
        if len(set(pairs)) != len(pairs):
            raise ValueError("a class pair appears more than once")
        classes = tuple(sorted({c for h in planes for c in h.pair}))
        k = len(classes)
        if len(planes) != k * (k - 1) // 2:
            raise ValueError(f"{len(planes)} hyperplanes cannot cover every pair of {k} classes")
        object.__setattr__(self, "hyperplanes", planes)
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "_W", np.vstack([h.weights for h in planes]))
        object.__setattr__(self, "_b", np.array([h.bias for h in planes]))

    @property
    def pairs(self):
        return [h.pair for h in self.hyperplanes]

    def scores(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self._W.shape[1]:
            raise DimensionError(f"dimension mismatch: {X.shape[1]} features, model expects {self._W.shape[1]}")
        return X @ self._W.T + self._b

    def vote(self, S):
        """Winning class index per row of a pair-score matrix ``S``.

        One vote per hyperplane by score sign (zero votes ``class_pos``);
        ties are broken by the summed |score| of each tied class's winning
        votes, then by class name.
        """
        index = {c: i for i, c in enumerate(self.classes)}
        pos = np.array([index[h.class_pos] for h in self.hyperplanes])
        neg = np.array([index[h.class_neg] for h in self.hyperplanes])
        n, k = S.shape[0], len(self.classes)
        winners = np.where(S >= 0, pos, neg)
        votes = np.zeros((n, k))
        strength = np.zeros((n, k))
        rows = np.arange(n)
        for p in range(S.shape[1]):
            np.add.at(votes, (rows, winners[:, p]), 1.0)
            np.add.at(strength, (rows, winners[:, p]), np.abs(S[:, p]))
        tied = votes == votes.max(axis=1, keepdims=True)
        return np.argmax(np.where(tied, strength, -np.inf), axis=1)

    def predict_encoded(self, X):
        S = self.scores(X)
        return [self.classes[i] for i in self.vote(S)]


def train_multiclass(X, labels, vocab=None, config=TrainConfig()):
    """Train one hyperplane per unordered class pair ``(a, b)``, ``a < b``, with ``a`` as +1."""
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels, dtype=object)
    if X.ndim != 2 or X.shape[0] != labels.shape[0]:
        raise DimensionError(f"dimension mismatch: {X.shape} samples for {labels.shape[0]} labels")
    classes = sorted(set(labels.tolist()))
    if len(classes) < 2:
        raise ValueError(f"need at least 2 classes to train, got {len(classes)}")
    planes = []
    for a, b in combinations(classes, 2):
        mask = (labels == a) | (labels == b)
        y = np.where(labels[mask] == a, 1.0, -1.0)
        planes.append(train_binary(X[mask], y, config).with_classes(a, b))
    return MulticlassModel(tuple(planes), vocab, config)


def classify(model, vector):
    """Return ``(winning class, {(class_pos, class_neg): score})`` for one extraction vector."""
    x = encode_many([vector], model.vocab)
    S = model.scores(x)
    table = {h.pair: float(s) for h, s in zip(model.hyperplanes, S[0])}
    return model.classes[int(model.vote(S)[0])], table


def classify_many(model, vectors):
    if not vectors:
        return []
    return model.predict_encoded(encode_many(vectors, model.vocab))


# ---------------------------------------------------------------------------
# model file


def _fmt(x):
    return repr(float(x))


def save_model(model, sink):
    if model.vocab is None:
        raise ValueError("only models with a vocabulary can be saved")
    sink.write(f"{MODEL_MAGIC} {MODEL_VERSION}\n")
    sink.write(f"@tags {','.join(model.vocab.tag_list)}\n")
    sink.write(f"@classes {','.join(model.vocab.class_list)}\n")
    sink.write(f"@config c={_fmt(model.config.c)} tol={_fmt(model.config.tolerance)}\n")
    for h in model.hyperplanes:
        sink.write(f"@pair {h.class_pos} {h.class_neg}\n")
        sink.write(f"@bias {_fmt(h.bias)}\n")
        sink.write(f"@weights {' '.join(_fmt(w) for w in h.weights)}\n")


def _take(lines, key, what):
    for lineno, line in lines:
        if not line.strip():
            continue
        if line != key and not line.startswith(key + " "):
            raise ModelFormatError(f"line {lineno}: expected {key} for {what}")
        return lineno, line[len(key):].strip()
    raise TruncatedModelError(f"truncated model file: missing {key} for {what}")


def _csv(body):
    return tuple(body.split(",")) if body else ()


def load_model(source):
    lines = iter(enumerate((raw.rstrip("\n") for raw in source), start=1))
    _, version = _take(lines, MODEL_MAGIC, "header")
    if version != str(MODEL_VERSION):
        raise ModelVersionError(f"unsupported model version {version!r} (expected {MODEL_VERSION})")
    _, tags = _take(lines, "@tags", "vocabulary")
    _, classes = _take(lines, "@classes", "vocabulary")
    lineno, cfg = _take(lines, "@config", "training configuration")
    try:
        vocab = Vocabulary(_csv(tags), _csv(classes))
        opts = dict(item.split("=", 1) for item in cfg.split())
        config = TrainConfig(c=float(opts["c"]), tolerance=float(opts["tol"]))
    except (ValueError, KeyError) as exc:
        raise ModelFormatError(f"bad model header: {exc}") from None
    planes = []
    while True:
        try:
            lineno, pair = _take(lines, "@pair", "hyperplane")
        except TruncatedModelError:
            break
        names = pair.split()
        if len(names) != 2:
            raise ModelFormatError(f"line {lineno}: @pair needs two class names")
        for name in names:
            if vocab.class_index(name) is None:
                raise ModelFormatError(f"line {lineno}: class {name} is not in @classes")
        label = f"hyperplane {names[0]}/{names[1]}"
        lineno, bias = _take(lines, "@bias", label)
        wline, weights = _take(lines, "@weights", label)
        try:
            w = np.array([float(t) for t in weights.split()])
            b = float(bias)
        except ValueError as exc:
            raise ModelFormatError(f"line {wline}: {exc}") from None
        if w.shape[0] != vocab.n_features:
            raise ModelDimensionError(
                f"line {wline}: {w.shape[0]} weights but the vocabulary implies {vocab.n_features}"
            )
        planes.append(Hyperplane(w, b, names[0], names[1]))
    if not planes:
        raise ModelFormatError("no hyperplanes")
    try:
        return MulticlassModel(tuple(planes), vocab, config)
    except ValueError as exc:
        raise ModelFormatError(str(exc)) from None


def save_model_file(model, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        save_model(model, fh)


def load_model_file(path):
    with open(path, encoding="utf-8") as fh:
        return load_model(fh)


# ---------------------------------------------------------------------------
# scikit-learn estimators


class SMOClassifier(ClassifierMixin, BaseEstimator):
    """Binary linear SVM trained by SMO.

    Follows the scikit-learn convention: a positive decision value means
    ``classes_[1]``.
    """

    def __init__(self, C=1.0, tol=1e-3, max_passes=100):
        self.C = C
        self.tol = tol
        self.max_passes = max_passes

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_ = unique_labels(y)
        if len(self.classes_) != 2:
            raise ValueError(f"degenerate binary problem: {len(self.classes_)} classes")
        signed = np.where(y == self.classes_[1], 1.0, -1.0)
        sol = solve_dual(X, signed, TrainConfig(self.C, self.tol, self.max_passes))
        self.coef_ = sol.weights.reshape(1, -1)
        self.intercept_ = np.array([sol.bias])
        self.alpha_ = sol.alpha
        self.n_iter_ = sol.n_iter
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise DimensionError(f"dimension mismatch: {X.shape[1]} features, fitted on {self.n_features_in_}")
        return X @ self.coef_[0] + self.intercept_[0]

    def predict(self, X):
        return self.classes_[(self.decision_function(X) > 0).astype(int)]


class OneVsOneSMO(ClassifierMixin, BaseEstimator):
    """Multiclass linear SVM: one SMO hyperplane per class pair, combined by voting."""

    def __init__(self, C=1.0, tol=1e-3, max_passes=100):
        self.C = C
        self.tol = tol
        self.max_passes = max_passes

    def fit(self, X, y):
        X, y = check_X_y(X, y, dtype=float)
        self.model_ = train_multiclass(X, np.asarray(y, dtype=object), None, TrainConfig(self.C, self.tol, self.max_passes))
        self.classes_ = np.array(self.model_.classes)
        self.n_features_in_ = X.shape[1]
        return self

    def decision_function(self, X):
        """Pair scores, one column per hyperplane in ``model_.pairs`` order."""
        check_is_fitted(self, "model_")
        return self.model_.scores(check_array(X))

    def predict(self, X):
        S = self.decision_function(X)
        return self.classes_[self.model_.vote(S)]


def margin(weights, bias, X, y):
    """Geometric margin ``min_i y_i (w.x_i + b) / |w|`` (negative if some point is misclassified)."""
    norm = math.sqrt(float(np.dot(weights, weights)))
    return float(np.min(np.asarray(y) * (np.asarray(X) @ weights + bias))) / norm
