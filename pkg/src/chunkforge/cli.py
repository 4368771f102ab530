"""Command-line front end.

Exit status: 0 on success, 1 for usage errors, 2 for data errors (malformed
or inconsistent input files).
"""

import argparse
import logging
import os
import sys

from .corpus import TreebankParseError, generate_synthetic_corpus, read_treebank_file, write_treebank
from .evaluation import format_report, holdout_evaluate, kfold_cross_validate
from .features import vectorize_corpus, write_vector_file
from .parser import OutOfVocabularyError, ShallowParser, parse_tagged_line, render_tree
from .rules import RuleFileError, extract_rules, load_rules, save_rules
from .svm import ModelFormatError, TrainConfig, load_model_file, save_model_file

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    def __init__(self, message, usage):
        super().__init__(message)
        self.usage = usage


class DataError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message, self.format_usage())


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive: {text}")
    return value


def _probability(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1]: {text}")
    return value


def _seed(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer: {text}")
    return value


def _fraction(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie strictly between 0 and 1: {text}")
    return value


def _folds(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 2:
        raise argparse.ArgumentTypeError(f"need at least 2 folds: {text}")
    return value


def _count(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text}")
    return value


def build_parser():
    parser = _ArgumentParser(prog="chunkforge", description="Rule-guided SVM shallow parser.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("rules", help="mine chunk rules from a treebank")
    p.add_argument("--treebank", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("vectors", help="export the labeled extraction vectors of a treebank")
    p.add_argument("--treebank", required=True)
    p.add_argument("--rules", required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("train", help="mine rules and train the pairwise SVM model")
    p.add_argument("--treebank", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--rules", required=True)
    p.add_argument("--c", type=_positive_float, default=TrainConfig.c)
    p.add_argument("--tol", type=_positive_float, default=TrainConfig.tolerance)

    p = sub.add_parser("parse", help="parse POS-tagged sentences (word/TAG per token, one sentence per line)")
    p.add_argument("--model", required=True)
    p.add_argument("--rules", required=True)
    p.add_argument("--input", required=True)
    p.add_argument("--out")

    p = sub.add_parser("eval", help="holdout or k-fold evaluation on a treebank")
    p.add_argument("--treebank", required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--holdout", type=_fraction, metavar="FRACTION")
    group.add_argument("--kfold", type=_folds, metavar="K")
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--c", type=_positive_float, default=TrainConfig.c)
    p.add_argument("--tol", type=_positive_float, default=TrainConfig.tolerance)
    p.add_argument("--report", choices=("text", "kv"), default="text")

    p = sub.add_parser("synth", help="write a deterministic synthetic treebank")
    p.add_argument("--sentences", type=_count, required=True)
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--noise", type=_probability, default=0.0)
    p.add_argument("--out", required=True)
    return parser


def _write(path, text):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _load_treebank(path):
    try:
        return read_treebank_file(path)
    except TreebankParseError as exc:
        raise DataError(f"{path}:{exc.line}:{exc.column}: {exc.reason}") from None
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: not valid UTF-8 ({exc.reason})") from None


def _load_rules(path):
    try:
        return load_rules(path)
    except RuleFileError as exc:
        raise DataError(f"{path}: {exc}") from None


def _load_model(path):
    try:
        return load_model_file(path)
    except ModelFormatError as exc:
        raise DataError(f"{path}: {exc}") from None


def cmd_rules(args):
    save_rules(extract_rules(_load_treebank(args.treebank)), args.out)


def cmd_vectors(args):
    corpus = _load_treebank(args.treebank)
    ruleset = _load_rules(args.rules)
    vectors, vocab = vectorize_corpus(corpus, ruleset)
    with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
        write_vector_file(vectors, vocab, fh)


def cmd_train(args):
    corpus = _load_treebank(args.treebank)
    if len(corpus.class_inventory) < 2:
        raise DataError(f"{args.treebank}: need at least 2 chunk classes to train, found {len(corpus.class_inventory)}")
    parser = ShallowParser(C=args.c, tol=args.tol).fit(corpus)
    save_rules(parser.rules_, args.rules)
    save_model_file(parser.model_, args.model)
    logger.info("%d rules, %d hyperplanes", len(parser.rules_), len(parser.model_.hyperplanes))


def cmd_parse(args):
    parser = ShallowParser.from_artifacts(_load_model(args.model), _load_rules(args.rules))
    out = []
    with open(args.input, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            try:
                tree = parser.parse(parse_tagged_line(line))
            except (OutOfVocabularyError, ValueError) as exc:
                raise DataError(f"{args.input}:{lineno}: {exc}") from None
            out.append(render_tree(tree) + "\n")
    text = "".join(out)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)


def cmd_eval(args):
    corpus = _load_treebank(args.treebank)
    config = TrainConfig(c=args.c, tolerance=args.tol)
    try:
        if args.kfold is not None:
            result = kfold_cross_validate(corpus, args.kfold, args.seed, config)
        else:
            fraction = 0.8 if args.holdout is None else args.holdout
            result = holdout_evaluate(corpus, fraction, args.seed, config)
    except ValueError as exc:
        raise DataError(f"{args.treebank}: {exc}") from None
    sys.stdout.write(format_report(result, args.report))


def cmd_synth(args):
    corpus = generate_synthetic_corpus(args.sentences, args.seed, args.noise)
    _write(args.out, write_treebank(corpus))


COMMANDS = {
    "rules": cmd_rules,
    "vectors": cmd_vectors,
    "train": cmd_train,
    "parse": cmd_parse,
    "eval": cmd_eval,
    "synth": cmd_synth,
}

_INPUTS = ("treebank", "input")
_OUTPUTS = {"rules": ("out",), "vectors": ("out",), "train": ("model", "rules"), "parse": ("out",), "synth": ("out",)}


def _check_paths(args, parser):
    inputs = [getattr(args, k) for k in _INPUTS if getattr(args, k, None)]
    if args.command in ("vectors", "parse"):
        inputs.append(args.rules)
    if args.command == "parse":
        inputs.append(args.model)
    outputs = [getattr(args, k) for k in _OUTPUTS.get(args.command, ()) if getattr(args, k, None)]
    for out in outputs:
        if any(os.path.abspath(out) == os.path.abspath(i) for i in inputs):
            raise UsageError(f"output {out} would overwrite an input file", parser.format_usage())
    if len(set(map(os.path.abspath, outputs))) != len(outputs):
        raise UsageError("output paths must differ", parser.format_usage())


def run(argv):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _check_paths(args, parser)
    except UsageError as exc:
        sys.stderr.write(f"chunkforge: error: {exc}\n{exc.usage}")
        return EXIT_USAGE
    try:
        COMMANDS[args.command](args)
    except DataError as exc:
        sys.stderr.write(f"chunkforge: {exc}\n")
        return EXIT_DATA
    except ValueError as exc:
        sys.stderr.write(f"chunkforge: {exc}\n")
        return EXIT_DATA
    except OSError as exc:
        sys.stderr.write(f"chunkforge: {exc.filename or ''}: {exc.strerror}\n")
        return EXIT_DATA
    return EXIT_OK


def main(argv=None):
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
