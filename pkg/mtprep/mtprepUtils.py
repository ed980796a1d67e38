"""Usage:
    mtprep clean <source> <target> <out_source> <out_target> [--scores=FILE] [--out-scores=FILE] [--score-threshold=T] [--max-length=N] [--max-ratio=R] [--length-unit=U] [--dedup-key=K] [--no-copy-check] [--report=FILE] [options]
    mtprep split <source> <target> <out_prefix> [--valid=N] [--test=N] [--seed=S] [options]
    mtprep train-subword <inputs>... --model=FILE [--model-type=T] [--vocab-size=N] [--character-coverage=C] [--byte-fallback] [--split-digits] [--input-sentence-size=N] [--seed=S] [options]
    mtprep encode <input> <output> --model=FILE [--dropout=P] [--alpha=A] [--seed=S] [--workers=N] [options]
    mtprep decode <input> <output> [--model=FILE] [options]
    mtprep vocab <output> --model=FILE [--format=F] [--specials] [options]
    mtprep pretokenize <input> <output> [--kind=K] [--side=SIDE] [--lowercase] [options]
    mtprep detokenize <input> <output> [--kind=K] [--side=SIDE] [options]
    mtprep truecase train <input> <truecaser> [options]
    mtprep truecase apply <input> <output> <truecaser> [options]
    mtprep bleu <hyp> <ref> [--scheme=S] [--smoothing=M] [--epsilon=E] [--sentence] [--report=FILE] [options]
    mtprep bleu --diff <report_a> <report_b> [options]
    mtprep stats <inputs>... [--vocab=FILE] [--model=FILE] [--bins=N] [--report=FILE] [options]
    mtprep (-h | --help)
    mtprep --version

Arguments
    <source> <target>     Parallel files, one segment per line.
    <out_prefix>          Split outputs are written to
                          <out_prefix>.{train,valid,test}.<lang> plus
                          <out_prefix>.meta, for example

                              mtprep split corpus.en corpus.ja data/wmt --seed 42

                          writes data/wmt.train.en, data/wmt.train.ja, ...
    <inputs>              train-subword: several files train one shared
                          model, a single file trains a per-side model.
    <truecaser>           A truecase model file.

Commands:
    clean          Filter a parallel corpus and print the row ledger
    split          Seeded train/validation/test split
    train-subword  Train a BPE or Unigram model
    encode         Segment text into subword pieces
    decode         Turn subword pieces back into text
    vocab          Export a model vocabulary for an NMT framework
    pretokenize    Rule-based or external pretokenization
    detokenize     Undo a rule-based pretokenization
    truecase       Train or apply a frequency truecaser
    bleu           Score detokenized output, or compare two saved reports
                   with --diff
    stats          Token counts, length histogram and OOV rates

Options:
    -c, --config=FILE        Configuration file on top of the packaged defaults.
    -v, --verbose            Report progress.
    --debug                  Print debugging output.
    -h, --help               Show this help message.
    --version                Show the version.
    --scores=FILE            Per-pair scores in [0, 1], one per line.
    --out-scores=FILE        Where clean writes the surviving scores.
    --score-threshold=T      Drop pairs scored at or below T.
    --max-length=N           Longest segment allowed by clean.
    --max-ratio=R            Largest length ratio allowed by clean.
    --length-unit=U          whitespace_tokens or characters.
    --dedup-key=K            pair, source or target.
    --no-copy-check          Keep pairs whose target repeats the source.
    --report=FILE            Also write a machine-readable report.
    --valid=N                Validation pairs.
    --test=N                 Test pairs.
    --seed=S                 Seed for the split shuffle, the training sample
                             or encode sampling.
    --model=FILE             Subword model file.
    --model-type=T           unigram or bpe.
    --vocab-size=N           Number of pieces, byte pieces included.
    --character-coverage=C   Share of character occurrences given own pieces.
    --byte-fallback          Spell unknown characters as UTF-8 byte pieces.
    --split-digits           Keep every digit a piece of its own.
    --input-sentence-size=N  Train on a shuffled sample of N lines.
    --dropout=P              BPE merge dropout probability.
    --alpha=A                Sample Unigram segmentations with smoothing A.
    --workers=N              Encoding processes.
    --format=F               framework-tokens or piece-logprob.
    --specials               Put <unk>, <s> and </s> first in the vocabulary.
    --kind=K                 Pretokenizer: whitespace, intl13a, intl13a_strict,
                             character, unicode_script or external:<command>.
    --side=SIDE              Which [pretokenize] setting to use: source or target.
    --lowercase              Lowercase before pretokenizing.
    --scheme=S               BLEU tokenization: 13a, char, ja-char or none.
    --smoothing=M            none or floor.
    --epsilon=E              Floor smoothing value.
    --sentence               Also print one sentence BLEU per line.
    --vocab=FILE             Vocabulary file to measure OOV rates against.
    --bins=N                 Length histogram buckets.

mtprep prepares parallel corpora for NMT training: cleaning, splitting,
pretokenization, subword modelling and BLEU evaluation.  Settings not given
on the command line are read from the --config file and then from the
packaged mtprep.cfg.

Exit status is 0 on success, 1 on runtime or I/O errors, 2 on usage or
configuration errors, and 3 when bleu --diff finds reports that cannot be
compared.

"""
import logging
import sys
from collections import Counter
from multiprocessing import Pool

import numpy as np
from docopt import DocoptExit, docopt
from tqdm import tqdm

from . import __version__
from .cleaning import run_pipeline
from .config import load_config
from .corpus import (read_lines, read_parallel, split_corpus, split_metadata,
                     write_lines, write_parallel)
from .errors import (ConfigError, CorpusFormatError, EvaluationError,
                     MtprepError)
from .evaluation import (compare_reports, corpus_bleu, read_report,
                         sentence_bleu, write_report)
from .pretokenize import (PretokenizerKind, detokenize, load_truecaser,
                          lowercase, pretokenize_lines, save_truecaser,
                          train_truecaser, truecase)
from .subword import (UNK, VocabFormat, decode_pieces, encode, export_vocab,
                      is_byte_piece, load_model, oov_rate, read_vocab,
                      save_model, train_subword)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_USAGE = 2
EXIT_INCOMPARABLE = 3

STATS_HEADER = "#mtprep-stats v1"


def message(msg):
    print("mtprep: %s" % msg, file=sys.stderr)


def exc_to_str(action, e):
    return "Failed to %s: %s" % (action, e)


def setup_logging(args):
    if args["--debug"]:
        level = logging.DEBUG
    elif args["--verbose"]:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format="mtprep: %(levelname)s: %(message)s",
                        force=True)


def _progress(iterable, **kwargs):
    return tqdm(iterable, disable=not logger.isEnabledFor(logging.INFO), **kwargs)

################################################################################
##                                 Commands                                   ##
################################################################################


def cmd_clean(args, config):
    config = config.override("clean",
                             score_threshold=args["--score-threshold"],
                             max_length=args["--max-length"],
                             max_ratio=args["--max-ratio"],
                             length_unit=args["--length-unit"],
                             dedup_key=args["--dedup-key"],
                             source_copy_check=False if args["--no-copy-check"] else None)
    corpus = read_parallel(args["<source>"], args["<target>"], args["--scores"],
                           config.source_lang, config.target_lang)
    corpus, ledger = run_pipeline(corpus, config.filter)
    write_parallel(corpus, args["<out_source>"], args["<out_target>"],
                   args["--out-scores"])
    for line in ledger.render():
        print(line)
    if args["--report"]:
        ledger.write(args["--report"])
    return EXIT_OK


def cmd_split(args, config):
    config = config.override("split", valid_count=args["--valid"],
                             test_count=args["--test"], seed=args["--seed"])
    corpus = read_parallel(args["<source>"], args["<target>"],
                           source_lang=config.source_lang,
                           target_lang=config.target_lang)
    try:
        parts = split_corpus(corpus, config.split)
    except CorpusFormatError as e:
        raise ConfigError(str(e)) from None
    prefix = args["<out_prefix>"]
    for part, name in zip(parts, ("train", "valid", "test")):
        write_parallel(part,
                       "%s.%s.%s" % (prefix, name, config.source_lang),
                       "%s.%s.%s" % (prefix, name, config.target_lang),
                       "%s.%s.score" % (prefix, name) if part.has_scores else None)
        print("%-5s %d" % (name, len(part)))
    write_lines(prefix + ".meta", split_metadata(config.split, *parts))
    return EXIT_OK


def cmd_train_subword(args, config):
    config = config.override("subword",
                             model_type=args["--model-type"],
                             vocab_size=args["--vocab-size"],
                             character_coverage=args["--character-coverage"],
                             byte_fallback=True if args["--byte-fallback"] else None,
                             split_digits=True if args["--split-digits"] else None,
                             input_sentence_size=args["--input-sentence-size"],
                             seed=args["--seed"])
    lines = []
    for path in args["<inputs>"]:
        lines.extend(read_lines(path))
    if len(args["<inputs>"]) > 1:
        logger.info("Training one shared model on %d files", len(args["<inputs>"]))
    model = train_subword(lines, config.subword)
    save_model(model, args["--model"])
    print("Trained %s model with %d pieces: %s"
          % (model.model_type.value, len(model), args["--model"]))
    return EXIT_OK


_worker_model = None
_worker_settings = None


def _init_worker(model, settings):
    global _worker_model, _worker_settings
    _worker_model, _worker_settings = model, settings


def _line_rng(seed, index):
    # One stream per line keeps output independent of the worker count.
    return np.random.default_rng([seed & 0xFFFFFFFFFFFFFFFF, index])


def encode_line(model, settings, index, line):
    """Encode one line as space-separated pieces."""
    rng = _line_rng(settings.seed, index) if settings.sampling else None
    pieces = encode(model, line, dropout_p=settings.dropout, alpha=settings.alpha,
                    rng=rng, on_unknown=settings.on_unknown)
    return " ".join(pieces)


def _encode_job(job):
    index, line = job
    return encode_line(_worker_model, _worker_settings, index, line)


def cmd_encode(args, config):
    settings = config.override("encode", dropout=args["--dropout"],
                               alpha=args["--alpha"], seed=args["--seed"],
                               workers=args["--workers"]).encode
    settings.require_seed()
    model = load_model(args["--model"])
    settings.check_model_type(model.model_type)
    lines = read_lines(args["<input>"])
    if settings.workers > 1:
        with Pool(settings.workers, initializer=_init_worker,
                  initargs=(model, settings)) as pool:
            out = list(_progress(pool.imap(_encode_job, enumerate(lines),
                                           chunksize=256),
                                 total=len(lines), desc="encode"))
    else:
        out = [encode_line(model, settings, i, line)
               for i, line in _progress(enumerate(lines), total=len(lines),
                                        desc="encode")]
    write_lines(args["<output>"], out)
    return EXIT_OK


def cmd_decode(args, config):
    if args["--model"]:
        marker = load_model(args["--model"]).marker
    else:
        marker = config.subword.marker
    lines = read_lines(args["<input>"])
    write_lines(args["<output>"],
                (decode_pieces(line.split(), marker) for line in lines))
    return EXIT_OK


def cmd_vocab(args, config):
    fmt = (args["--format"] or "framework-tokens").replace("-", "_")
    try:
        fmt = VocabFormat(fmt)
    except ValueError:
        raise ConfigError("unknown vocabulary format %r" % args["--format"]) from None
    model = load_model(args["--model"])
    export_vocab(model, args["<output>"], fmt, include_specials=args["--specials"])
    return EXIT_OK


def _side_kind(args, config):
    if args["--kind"]:
        return PretokenizerKind.parse(args["--kind"])
    side = args["--side"] or "source"
    if side not in ("source", "target"):
        raise ConfigError("--side must be source or target, got %r" % side)
    return config.pretokenize_source if side == "source" else config.pretokenize_target


def cmd_pretokenize(args, config):
    kind = _side_kind(args, config)
    lines = read_lines(args["<input>"])
    if args["--lowercase"]:
        lines = [lowercase(line) for line in lines]
    write_lines(args["<output>"],
                (" ".join(toks) for toks in pretokenize_lines(lines, kind)))
    return EXIT_OK


def cmd_detokenize(args, config):
    kind = _side_kind(args, config)
    lines = read_lines(args["<input>"])
    write_lines(args["<output>"], (detokenize(line.split(), kind) for line in lines))
    return EXIT_OK


def cmd_truecase(args, config):
    if args["train"]:
        model = train_truecaser(read_lines(args["<input>"]))
        save_truecaser(model, args["<truecaser>"])
        print("Truecaser with %d forms: %s" % (len(model), args["<truecaser>"]))
    else:
        model = load_truecaser(args["<truecaser>"])
        lines = read_lines(args["<input>"])
        write_lines(args["<output>"], (truecase(line, model) for line in lines))
    return EXIT_OK


def cmd_bleu(args, config):
    if args["--diff"]:
        a = read_report(args["<report_a>"])
        b = read_report(args["<report_b>"])
        try:
            delta = compare_reports(a, b)
        except EvaluationError as e:
            logger.warning("Reports are not comparable: %s", e)
            return EXIT_INCOMPARABLE
        print("BLEU %.1f -> %.1f (%+.1f) sig:%s" % (a.score, b.score, delta,
                                                   a.signature))
        return EXIT_OK

    scheme = config.override("bleu", scheme=args["--scheme"],
                             smoothing=args["--smoothing"],
                             epsilon=args["--epsilon"]).bleu
    hyps = read_lines(args["<hyp>"])
    refs = read_lines(args["<ref>"])
    report = corpus_bleu(hyps, refs, scheme)
    if args["--sentence"]:
        for hyp, ref in zip(hyps, refs):
            print("%.1f" % sentence_bleu(hyp, ref, scheme).score)
    print(report.format())
    if args["--report"]:
        write_report(report, args["--report"])
    return EXIT_OK


def file_stats(lines, bins=10, vocab=None, model=None):
    """
    Counts for one side of a corpus.

    Returns
    -------
    stats : list of (str, object)
        In display order.
    """
    tokens = Counter()
    lengths = []
    for line in lines:
        toks = line.split()
        tokens.update(toks)
        lengths.append(len(toks))
    counts, edges = np.histogram(np.asarray(lengths, dtype=float), bins=bins)
    stats = [("lines", len(lines)),
             ("tokens", sum(tokens.values())),
             ("unique_tokens", len(tokens)),
             ("length_edges", ",".join("%g" % e for e in edges)),
             ("length_counts", ",".join(str(int(c)) for c in counts))]
    if vocab is not None:
        stats.append(("oov_rate", oov_rate(lines, vocab)))
    if model is not None:
        total = unknown = n_bytes = 0
        for line in lines:
            pieces = encode(model, line)
            total += len(pieces)
            unknown += sum(1 for p in pieces if p == UNK)
            n_bytes += sum(1 for p in pieces if is_byte_piece(p))
        stats.append(("pieces", total))
        stats.append(("byte_pieces", n_bytes))
        stats.append(("piece_oov_rate", unknown / total if total else 0.0))
    return stats


def cmd_stats(args, config):
    bins = int(args["--bins"] or 10)
    if bins < 1:
        raise ConfigError("--bins must be positive")
    vocab = read_vocab(args["--vocab"]) if args["--vocab"] else None
    model = load_model(args["--model"]) if args["--model"] else None
    report = [STATS_HEADER]
    for path in args["<inputs>"]:
        stats = file_stats(read_lines(path), bins, vocab, model)
        print(path)
        report.append("file\t%s" % path)
        for key, value in stats:
            print("    %-15s %s" % (key, value))
            report.append("%s\t%r" % (key, value) if isinstance(value, float)
                          else "%s\t%s" % (key, value))
    if args["--report"]:
        write_lines(args["--report"], report)
    return EXIT_OK


COMMANDS = (("clean", cmd_clean),
            ("split", cmd_split),
            ("train-subword", cmd_train_subword),
            ("encode", cmd_encode),
            ("decode", cmd_decode),
            ("vocab", cmd_vocab),
            ("pretokenize", cmd_pretokenize),
            ("detokenize", cmd_detokenize),
            ("truecase", cmd_truecase),
            ("bleu", cmd_bleu),
            ("stats", cmd_stats))

################################################################################
##                                   Main                                     ##
################################################################################


def main(argv=None):
    try:
        args = docopt(__doc__, argv=argv, version=__version__)
    except DocoptExit as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    setup_logging(args)
    name, command = next((n, c) for n, c in COMMANDS if args[n])
    try:
        config = load_config(args["--config"])
        return command(args, config)
    except (ConfigError, EvaluationError) as e:
        message(exc_to_str(name, e))
        return EXIT_USAGE
    except (MtprepError, OSError) as e:
        message(exc_to_str(name, e))
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
