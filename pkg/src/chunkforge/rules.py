"""Chunk rules: POS patterns of one to five tags mapped to a phrase class.

Rules are mined from gold chunks and then used to cut a raw tag sequence
into candidate groups by greedy longest match.
"""

from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import NamedTuple, Optional

from ._validation import check_symbol, check_tag_sequence
from .corpus import extract_chunk_sequences

MAX_RULE_LENGTH = 5


class RuleFileError(ValueError):
    pass


@dataclass(frozen=True)
class ChunkRule:
    pattern: tuple
    label: str
    support: int = 1

    def __post_init__(self):
        object.__setattr__(self, "pattern", check_tag_sequence(self.pattern, 1, MAX_RULE_LENGTH))
        check_symbol(self.label, "class")
        if self.support < 1:
            raise ValueError(f"rule support must be >= 1, got {self.support}")

    def __str__(self):
        return f"{','.join(self.pattern)} -> {self.label} ({self.support})"


def _rule_order(rule):
    return (-rule.support, rule.pattern)


class RuleSet:
    """Immutable set of rules with unique patterns.

    Rules are kept in descending support, then pattern order, which is also
    the order of the rule file.
    """

    def __init__(self, rules=(), skipped_long=0):
        rules = sorted(rules, key=_rule_order)
        index = {}
        for rule in rules:
            if rule.pattern in index:
                raise ValueError(f"duplicate rule pattern {','.join(rule.pattern)}")
            index[rule.pattern] = rule
        self._rules = tuple(rules)
        self._index = index
        self.skipped_long = skipped_long

    @property
    def rules(self):
        return self._rules

    def __len__(self):
        return len(self._rules)

    def __iter__(self):
        return iter(self._rules)

    def __contains__(self, pattern):
        return tuple(pattern) in self._index

    def get(self, pattern):
        return self._index.get(tuple(pattern))

    def __eq__(self, other):
        if not isinstance(other, RuleSet):
            return NotImplemented
        return self._rules == other._rules and self.skipped_long == other.skipped_long

    def __repr__(self):
        return f"RuleSet({len(self)} rules, skipped_long={self.skipped_long})"

    @property
    def tags(self):
        return frozenset(t for r in self._rules for t in r.pattern)

    @property
    def labels(self):
        return frozenset(r.label for r in self._rules)


def extract_rules(corpus):
    """Mine one rule per distinct gold chunk pattern of length <= 5.

    The label is the majority class for the pattern (ties go to the
    lexicographically smallest class) and the support counts every
    occurrence regardless of label.
    """
    counts = defaultdict(Counter)
    skipped = 0
    for sentence in corpus:
        for pattern, label in extract_chunk_sequences(sentence):
            if len(pattern) > MAX_RULE_LENGTH:
                skipped += 1
                continue
            counts[pattern][label] += 1
    rules = []
    for pattern, by_label in counts.items():
        label = min(by_label, key=lambda c: (-by_label[c], c))
        rules.append(ChunkRule(pattern, label, sum(by_label.values())))
    return RuleSet(rules, skipped_long=skipped)


def match_longest(ruleset, tags, start):
    """Return ``(length, rule)`` for the longest rule matching at ``start``, or None."""
    if not 0 <= start < len(tags):
        raise IndexError(f"start {start} outside tag sequence of length {len(tags)}")
    tags = tuple(tags)
    for k in range(min(MAX_RULE_LENGTH, len(tags) - start), 0, -1):
        rule = ruleset.get(tags[start:start + k])
        if rule is not None:
            return k, rule
    return None


class Group(NamedTuple):
    start: int
    end: int
    rule: Optional[ChunkRule] = None


def segment(tags, ruleset):
    """Greedy left-to-right longest-match segmentation.

    Positions no rule covers become singleton groups without a rule, so the
    groups always partition ``range(len(tags))``.
    """
    tags = tuple(tags)
    groups = []
    i = 0
    while i < len(tags):
        hit = match_longest(ruleset, tags, i)
        if hit is None:
            groups.append(Group(i, i + 1, None))
            i += 1
        else:
            k, rule = hit
            groups.append(Group(i, i + k, rule))
            i += k
    return groups


# ---------------------------------------------------------------------------
# rule file: TAG[,TAG...]<TAB>CLASS<TAB>support, '#' comments

_SKIPPED_KEY = "# skipped_long="


def write_rules(ruleset, sink):
    sink.write(f"{_SKIPPED_KEY}{ruleset.skipped_long}\n")
    for rule in ruleset:
        sink.write(f"{','.join(rule.pattern)}\t{rule.label}\t{rule.support}\n")


def read_rules(source):
    rules = []
    skipped = 0
    for lineno, raw in enumerate(source, start=1):
        line = raw.rstrip("\n")
        if line.startswith(_SKIPPED_KEY):
            try:
                skipped = int(line[len(_SKIPPED_KEY):])
            except ValueError:
                raise RuleFileError(f"line {lineno}: bad skipped_long count") from None
            continue
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split("\t")
        if len(fields) != 3:
            raise RuleFileError(f"line {lineno}: expected 3 tab-separated fields, got {len(fields)}")
        pattern, label, support = fields
        try:
            rules.append(ChunkRule(tuple(pattern.split(",")), label, int(support)))
        except ValueError as exc:
            raise RuleFileError(f"line {lineno}: {exc}") from None
    try:
        return RuleSet(rules, skipped_long=skipped)
    except ValueError as exc:
        raise RuleFileError(str(exc)) from None


def save_rules(ruleset, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        write_rules(ruleset, fh)


def load_rules(path):
    with open(path, encoding="utf-8") as fh:
        return read_rules(fh)
