"""Input validation helpers shared by the readers, the vectorizer and the estimators."""

import re

import numpy as np

PAD = "?"

# characters reserved by the treebank, vector and model file formats
_METACHARS = re.compile(r"[\s,()?]")


def check_symbol(name, kind="tag"):
    """Return ``name`` if it is a usable POS tag or class name, else raise ValueError."""
    if not isinstance(name, str) or not name:
        raise ValueError(f"empty {kind}")
    bad = _METACHARS.search(name)
    if bad:
        raise ValueError(f"{kind} {name!r} contains reserved character {bad.group()!r}")
    return name


def check_tag_sequence(tags, min_len=1, max_len=5):
    tags = tuple(tags)
    if not min_len <= len(tags) <= max_len:
        raise ValueError(f"expected between {min_len} and {max_len} tags, got {len(tags)}")
    for t in tags:
        check_symbol(t, "tag")
    return tags


def check_binary_problem(X, y):
    """Validate a binary training set: 2-D float matrix and labels in {-1, +1}, both signs present."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D sample matrix, got {X.ndim} dimensions")
    y = np.asarray(y, dtype=float).ravel()
    if len(y) != X.shape[0]:
        raise ValueError(f"dimension mismatch: {X.shape[0]} samples but {len(y)} labels")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("binary labels must be -1 or +1")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise ValueError("degenerate binary problem: both classes must be present")
    if not np.all(np.isfinite(X)):
        raise ValueError("sample matrix contains NaN or infinity")
    return X, y
