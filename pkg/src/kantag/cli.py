"""Command-line entry point: ``kantag {stats,split,train,tag,eval,inconsistencies}``.

Exit codes: 0 success, 1 usage or configuration error, 2 data/parse error,
3 numeric error.  Results go to stdout, logging to stderr.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import corpus as corpus_mod
from .corpus import (Dataset, Sentence, Token, corpus_stats, format_inconsistencies,
                     inconsistency_report)
from .errors import NumericError, TaggerError
from .evaluation import (confusion_matrix, evaluate, format_confusions, scores_from_tags,
                         top_confusions)
from .features import FeatureTemplateConfig, parse_bool, parse_key_values
from .linear import (TrainConfig, dumps_model, loads_model, tag_sentence, train_crf,
                     train_history_classifier, train_structured_perceptron)
from .neural import (PRESETS as NEURAL_PRESETS, Architecture, dumps_neural, format_history,
                     loads_neural, predict_indices, read_embeddings, train_neural)

log = logging.getLogger("kantag")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3
SEED_ENV = "KANTAG_SEED"
LINEAR_MODELS = ("crf", "perceptron", "svm")
NEURAL_MODELS = ("rnn", "lstm", "bilstm")
MODELS = LINEAR_MODELS + NEURAL_MODELS
PRESET_NAMES = ("paper-crf", "paper-neural-word", "paper-neural-charword")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# -- training options ----------------------------------------------------------------
#
# (name, parser, group, help).  Group "feature" applies to crf/perceptron/svm,
# "linear" to the linear trainers, "neural" to rnn/lstm/bilstm, "common" to all.

_DEFAULT_LINEAR = {"crf": TrainConfig(),
                   "perceptron": TrainConfig(epochs=10),
                   "svm": TrainConfig(epochs=10, learning_rate=0.1, l2=1e-5)}
_FC = FeatureTemplateConfig()
_NW = NEURAL_PRESETS["paper-neural-word"]
_NC = NEURAL_PRESETS["paper-neural-charword"]
_ARCH = Architecture()


def _on_off(raw):
    return parse_bool(raw)


def _opt_float(raw):
    return None if str(raw).lower() in ("none", "off", "0") else float(raw)


OPTIONS = [
    ("window", int, "feature", f"context window radius 0/1/2 (default {_FC.window}; svm: 2)"),
    ("prefix_max_len", int, "feature", f"longest prefix feature (default {_FC.prefix_max_len})"),
    ("suffix_max_len", int, "feature", f"longest suffix feature (default {_FC.suffix_max_len})"),
    ("length_threshold", int, "feature",
     f"length above which len=MORE (default {_FC.length_threshold})"),
    ("bigrams", _on_off, "feature", "word bigram features on/off (default off)"),
    ("trigrams", _on_off, "feature", "word trigram features on/off (default off)"),
    ("l2", float, "linear", "L2 strength (default 1e-5)"),
    ("full_batch", _on_off, "linear", "crf: one batch per epoch on/off (default off)"),
    ("shuffle", _on_off, "linear", "shuffle each epoch on/off (default on)"),
    ("epochs", int, "common",
     f"training epochs (default crf {_DEFAULT_LINEAR['crf'].epochs}, perceptron/svm "
     f"{_DEFAULT_LINEAR['svm'].epochs}, neural {_NW.epochs})"),
    ("learning_rate", float, "common",
     f"step size (default crf 0.1, svm 0.1, neural {_NW.learning_rate})"),
    ("batch_size", int, "common",
     f"mini-batch size (default crf 8, word models {_NW.batch_size}, char+word models "
     f"{_NC.batch_size})"),
    ("optimizer", str, "neural",
     f"adam or rmsprop (default {_NW.optimizer} for word models, {_NC.optimizer} for char+word)"),
    ("validation_fraction", float, "neural",
     f"held-out share of training sentences (default {_NW.validation_fraction})"),
    ("char_embeddings", _on_off, "neural", "character composition on/off (default off)"),
    ("word_embeddings", _on_off, "neural", "word vectors on/off (default on)"),
    ("embeddings", str, "neural", "pretrained word-vector file (default none: random vectors)"),
    ("freeze_embeddings", _on_off, "neural", "keep word vectors fixed on/off (default off)"),
    ("word_dim", int, "neural", f"word vector size without --embeddings (default {_ARCH.word_dim})"),
    ("char_dim", int, "neural", f"character embedding size (default {_ARCH.char_dim})"),
    ("char_hidden", int, "neural", f"char LSTM state per direction (default {_ARCH.char_hidden})"),
    ("char_out", int, "neural", f"composed word vector size (default {_ARCH.char_out})"),
    ("hidden", int, "neural", f"sentence layer state per direction (default {_ARCH.hidden})"),
    ("clip_norm", _opt_float, "neural", "max global gradient norm (default none)"),
    ("history", str, "neural", "write per-epoch history lines to this path (default none)"),
]
_OPTION_INDEX = {name: (conv, group) for name, conv, group, _ in OPTIONS}


@dataclass
class RunConfig:
    model: str
    corpus: Path
    output: Path
    preset: str
    seed: int
    features: FeatureTemplateConfig | None = None
    linear: TrainConfig | None = None
    neural: object = None
    arch: Architecture | None = None
    embeddings: Path | None = None
    history: Path | None = None
    values: dict = field(default_factory=dict)


def default_preset(model: str, char_embeddings: bool) -> str:
    if model in LINEAR_MODELS:
        return "paper-crf"
    return "paper-neural-charword" if char_embeddings else "paper-neural-word"


def resolve_run_config(args) -> RunConfig:
    """Merge preset < config file < flags and validate everything at once."""
    problems = []
    values = {}
    if args.config:
        try:
            raw = parse_key_values(Path(args.config).read_text(encoding="utf-8"))
        except OSError as exc:
            raise UsageError(f"cannot read config file: {exc}") from None
        for key, text in raw.items():
            key = key.replace("-", "_")
            if key == "preset":
                values["preset"] = text
                continue
            if key not in _OPTION_INDEX:
                problems.append(f"unknown config key {key!r}")
                continue
            try:
                values[key] = _OPTION_INDEX[key][0](text)
            except ValueError as exc:
                problems.append(f"config key {key}: {exc}")
    for name in _OPTION_INDEX:
        v = getattr(args, name, None)
        if v is not None:
            values[name] = v
    if args.preset is not None:
        values["preset"] = args.preset

    model = args.model
    linear = model in LINEAR_MODELS
    for name, v in values.items():
        if name == "preset":
            continue
        group = _OPTION_INDEX[name][1]
        if linear and group == "neural":
            problems.append(f"option {name} does not apply to {model}")
        if not linear and group in ("feature", "linear"):
            problems.append(f"option {name} does not apply to {model}")
    char = bool(values.get("char_embeddings", False))
    preset = values.get("preset") or default_preset(model, char)
    if preset not in PRESET_NAMES:
        problems.append(f"unknown preset {preset!r}; choose from {', '.join(PRESET_NAMES)}")
    elif linear and preset != "paper-crf":
        problems.append(f"preset {preset} is for neural models, not {model}")
    elif not linear and preset == "paper-crf":
        problems.append(f"preset paper-crf is for linear models, not {model}")
    if not linear and "preset" in values and preset == "paper-neural-charword" \
            and "char_embeddings" not in values:
        char = True
    if model == "svm" and values.get("window", 2) != 2:
        problems.append("svm uses a fixed window of 2")
    if not linear and not values.get("word_embeddings", True) and not char:
        problems.append("word and character embeddings are both off")
    if not linear and not values.get("word_embeddings", True) and values.get("embeddings"):
        problems.append("--embeddings given while word embeddings are off")

    corpus = Path(args.corpus)
    if not corpus.is_file():
        problems.append(f"corpus file not found: {corpus}")
    output = Path(args.output)
    if not output.parent.resolve().is_dir():
        problems.append(f"output directory does not exist: {output.parent}")
    emb = values.get("embeddings")
    if emb is not None and not Path(emb).is_file():
        problems.append(f"embeddings file not found: {emb}")
    hist = values.get("history")
    if hist is not None and not Path(hist).parent.resolve().is_dir():
        problems.append(f"history directory does not exist: {Path(hist).parent}")

    seed = args.seed
    if seed is None:
        env = os.environ.get(SEED_ENV)
        try:
            seed = int(env) if env else 0
        except ValueError:
            problems.append(f"{SEED_ENV} is not an integer: {env!r}")
            seed = 0

    run = RunConfig(model, corpus, output, preset, seed, values=values,
                    embeddings=Path(emb) if emb else None, history=Path(hist) if hist else None)
    try:
        if linear:
            feat = {k: values[k] for k in ("window", "prefix_max_len", "suffix_max_len",
                                           "length_threshold") if k in values}
            if "bigrams" in values:
                feat["use_bigrams"] = values["bigrams"]
            if "trigrams" in values:
                feat["use_trigrams"] = values["trigrams"]
            if model == "svm":
                feat["window"] = 2
            run.features = FeatureTemplateConfig(**feat)
            base = _DEFAULT_LINEAR[model]
            tc = {k: values[k] for k in ("epochs", "learning_rate", "l2", "batch_size",
                                         "full_batch", "shuffle") if k in values}
            run.linear = TrainConfig(**{**base.__dict__, **tc, "seed": seed})
        else:
            base = NEURAL_PRESETS.get(preset, _NW)
            nc = {k: values[k] for k in ("epochs", "learning_rate", "batch_size", "optimizer",
                                         "validation_fraction", "clip_norm") if k in values}
            if "freeze_embeddings" in values:
                nc["freeze_word_embeddings"] = values["freeze_embeddings"]
            run.neural = base.replace(**nc, seed=seed)
            arch = {k: values[k] for k in ("word_dim", "char_dim", "char_hidden", "char_out",
                                           "hidden") if k in values}
            run.arch = Architecture(kind=model, use_word=values.get("word_embeddings", True),
                                    use_char=char, **arch)
    except (ValueError, TypeError) as exc:
        problems.append(str(exc))
    if problems:
        raise UsageError("invalid configuration:\n  " + "\n  ".join(problems))
    return run


# -- helpers -------------------------------------------------------------------------

def atomic_write(path, text: str):
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent.resolve())
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_model_file(path):
    text = Path(path).read_text(encoding="utf-8")
    second = text.split("\n", 2)[1] if text.count("\n") >= 1 else ""
    if second == "model\tneural":
        return loads_neural(text)
    return loads_model(text)


def tag_dataset(model, dataset: Dataset, chunk: int = 64) -> Dataset:
    if not dataset.sentences:
        return dataset
    if hasattr(model, "blocks"):
        labels = model.tagset.labels
        forms = [s.forms for s in dataset.sentences]
        preds = []
        for start in range(0, len(forms), chunk):
            preds += [[labels[i] for i in seq]
                      for seq in predict_indices(model, forms[start:start + chunk])]
    else:
        preds = [tag_sentence(model, s) for s in dataset.sentences]
    out = []
    for s, p in zip(dataset.sentences, preds):
        out.append(Sentence(tuple(Token(t.form, t.gold_tag, y) for t, y in zip(s, p))))
    return Dataset(tuple(out), dataset.tagset)


# -- subcommands ---------------------------------------------------------------------

def cmd_stats(args) -> int:
    dataset = corpus_mod.read_corpus(args.corpus)
    vocab = corpus_mod.read_vocab(args.vocab) if args.vocab else None
    report = corpus_stats(dataset, vocab)
    sys.stdout.write(report.as_key_values() if args.machine else report.as_table())
    return EXIT_OK


def cmd_split(args) -> int:
    dataset = corpus_mod.read_corpus(args.corpus)
    seed = args.seed
    if seed is None:
        try:
            seed = int(os.environ.get(SEED_ENV) or 0)
        except ValueError:
            raise UsageError(f"{SEED_ENV} is not an integer") from None
    try:
        train, test = corpus_mod.split_dataset(dataset, args.test_fraction, seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    atomic_write(args.train_out, corpus_mod.serialize_column_corpus(train))
    atomic_write(args.test_out, corpus_mod.serialize_column_corpus(test))
    print(f"train\t{len(train)} sentences\t{train.n_tokens} tokens")
    print(f"test\t{len(test)} sentences\t{test.n_tokens} tokens")
    return EXIT_OK


def _accuracy(model, dataset) -> float:
    tagged = tag_dataset(model, dataset)
    g = [t.gold_tag for s in tagged for t in s]
    p = [t.pred_tag for s in tagged for t in s]
    return scores_from_tags(g, p).overall_accuracy


def cmd_train(args) -> int:
    run = resolve_run_config(args)
    dataset = corpus_mod.read_corpus(run.corpus)
    if not dataset.sentences:
        raise UsageError("training corpus is empty")
    start = time.perf_counter()
    if run.model in LINEAR_MODELS:
        trainer = {"crf": train_crf, "perceptron": train_structured_perceptron,
                   "svm": train_history_classifier}[run.model]
        model = trainer(dataset, run.features, run.linear)
        text = dumps_model(model)
        epochs = len(model.history)
        final = model.history[-1]
        label = {"crf": "objective", "perceptron": "mistakes", "svm": "hinge"}[run.model]
        summary = [f"final_{label}\t{final:.6f}" if isinstance(final, float)
                   else f"final_{label}\t{final}",
                   f"train_accuracy\t{_accuracy(model, dataset):.4f}"]
    else:
        emb = read_embeddings(run.embeddings, oov_seed=run.seed) if run.embeddings else None
        model, history = train_neural(dataset, run.neural, run.arch, emb)
        text = dumps_neural(model)
        epochs = len(history)
        last = history[-1]
        summary = [f"final_train_loss\t{last.train_loss:.6f}",
                   f"final_train_accuracy\t{last.train_acc:.4f}"]
        if last.val_loss is not None:
            summary += [f"final_val_loss\t{last.val_loss:.6f}",
                        f"final_val_accuracy\t{last.val_acc:.4f}"]
        if run.history:
            atomic_write(run.history, format_history(history))
    wall = time.perf_counter() - start
    atomic_write(run.output, text)
    print(f"model\t{run.model}")
    print(f"preset\t{run.preset}")
    print(f"epochs\t{epochs}")
    for line in summary:
        print(line)
    print(f"wall_time_s\t{wall:.2f}")
    return EXIT_OK


def cmd_tag(args) -> int:
    model = load_model_file(args.model)
    dataset = corpus_mod.read_corpus(args.input)
    tagged = tag_dataset(model, dataset)
    column = "both" if dataset.sentences and dataset.is_gold_tagged() else "pred"
    atomic_write(args.output, corpus_mod.serialize_column_corpus(tagged, column))
    return EXIT_OK


def cmd_eval(args) -> int:
    gold = corpus_mod.read_corpus(args.gold)
    pred = corpus_mod.read_corpus(args.pred, allow_pred_column=True)
    report = evaluate(gold, pred)
    sys.stdout.write(report.as_key_values() if args.machine else report.as_table())
    if args.confusions or args.matrix:
        m = confusion_matrix(gold, pred)
        if args.confusions:
            if not args.machine:
                sys.stdout.write(f"\ntop {args.confusions} confusions (gold, predicted, count)\n")
            sys.stdout.write(format_confusions(top_confusions(m, args.confusions)))
        if args.matrix:
            atomic_write(args.matrix, m.to_tsv())
    return EXIT_OK


def cmd_inconsistencies(args) -> int:
    dataset = corpus_mod.read_corpus(args.corpus)
    sys.stdout.write(format_inconsistencies(inconsistency_report(dataset)))
    return EXIT_OK


def _positive_int(raw):
    v = int(raw)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="kantag", description="POS tagging toolkit",
                formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    fmt = argparse.ArgumentDefaultsHelpFormatter

    s = sub.add_parser("stats", help="corpus statistics", formatter_class=fmt)
    s.add_argument("corpus")
    s.add_argument("--vocab", default=None, help="word list or embedding file for OOV counts")
    s.add_argument("--machine", action="store_true", help="key<TAB>value output")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("split", help="random sentence-level train/test split", formatter_class=fmt)
    s.add_argument("corpus")
    s.add_argument("--test-fraction", type=float, default=0.1)
    s.add_argument("--seed", type=int, default=None, help=f"default: ${SEED_ENV} or 0")
    s.add_argument("--train-out", required=True)
    s.add_argument("--test-out", required=True)
    s.set_defaults(func=cmd_split)

    s = sub.add_parser("train", help="train a tagger")
    s.add_argument("model", choices=MODELS, help="model family")
    s.add_argument("corpus")
    s.add_argument("-o", "--output", required=True, help="model file to write")
    s.add_argument("--config", default=None, help="'key = value' config file; flags win")
    s.add_argument("--preset", default=None, choices=PRESET_NAMES,
                   help="paper-crf for crf/perceptron/svm; paper-neural-word or "
                        "paper-neural-charword (chosen by --char-embeddings) for neural models")
    s.add_argument("--seed", type=int, default=None, help=f"default: ${SEED_ENV} or 0")
    for name, conv, _, help_text in OPTIONS:
        s.add_argument("--" + name.replace("_", "-"), dest=name, type=conv, default=None,
                       help=help_text)
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("tag", help="tag a corpus with a trained model", formatter_class=fmt)
    s.add_argument("model")
    s.add_argument("input")
    s.add_argument("output")
    s.set_defaults(func=cmd_tag)

    s = sub.add_parser("eval", help="score predictions against gold tags", formatter_class=fmt)
    s.add_argument("gold")
    s.add_argument("pred")
    s.add_argument("--confusions", type=_positive_int, default=None,
                   help="also list the top-k off-diagonal confusions")
    s.add_argument("--matrix", default=None, help="write the confusion matrix as TSV here")
    s.add_argument("--machine", action="store_true", help="key<TAB>value output")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("inconsistencies", help="forms with several gold tags",
                       formatter_class=fmt)
    s.add_argument("corpus")
    s.set_defaults(func=cmd_inconsistencies)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s",
                        level=logging.INFO if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"kantag: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"kantag: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (TaggerError, OSError, UnicodeDecodeError, ValueError) as exc:
        print(f"kantag: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
