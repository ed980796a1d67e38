"""Usage:
    throughput.py [--pairs=N] [--sentences=N] [--seed=S] [-v]
    throughput.py (-h | --help)

Time the two hot paths of a corpus build on synthetic data:

    clean + split   run_pipeline and split_corpus over --pairs pairs
    BPE encode      single-worker encode_bpe over --sentences short lines

Options:
    --pairs=N        Synthetic sentence pairs to clean and split [default: 1000000].
    --sentences=N    Short sentences to BPE-encode [default: 100000].
    --seed=S         Seed for the synthetic corpus [default: 0].
    -v               Show progress.
    -h, --help       Show this help message.

Targets on a desktop machine: clean + split of one million pairs under
120 s, and at least 10000 encoded sentences per second.
"""
import logging
import time

import numpy as np
from docopt import docopt

from mtprep.cleaning import FilterConfig, run_pipeline
from mtprep.corpus import ParallelCorpus, SentencePair, SplitSpec, split_corpus
from mtprep.subword import ModelType, SubwordTrainConfig, encode_bpe, train_bpe

SYLLABLES = ("ka", "to", "ri", "ne", "mo", "sa", "lu", "pi", "an", "ex", "or", "is")


def synthetic_lines(rng, n, max_words=20, n_words=5000, max_syllables=3):
    words = np.array(["".join(rng.choice(SYLLABLES, size=k))
                      for k in rng.integers(1, max_syllables + 1, size=n_words)])
    lengths = rng.integers(1, max_words + 1, size=n)
    picks = rng.integers(0, len(words), size=int(lengths.sum()))
    out = []
    start = 0
    for length in lengths:
        out.append(" ".join(words[picks[start:start + length]]))
        start += length
    return out


def synthetic_corpus(rng, n):
    sources = synthetic_lines(rng, n)
    targets = synthetic_lines(rng, n)
    pairs = [SentencePair(s, t) for s, t in zip(sources, targets)]
    # Some duplicates, copies and empty rows for the filters to find.
    for i in rng.integers(0, n, size=n // 20):
        pairs[i] = pairs[(i + 1) % n]
    for i in rng.integers(0, n, size=n // 100):
        pairs[i] = SentencePair(pairs[i].source, pairs[i].source)
    for i in rng.integers(0, n, size=n // 100):
        pairs[i] = SentencePair("", pairs[i].target)
    return ParallelCorpus(tuple(pairs))


def bench_clean_split(rng, n):
    corpus = synthetic_corpus(rng, n)
    start = time.perf_counter()
    cleaned, ledger = run_pipeline(corpus, FilterConfig())
    held_out = min(5000, len(cleaned) // 4)
    split_corpus(cleaned, SplitSpec(held_out, held_out, seed=0))
    elapsed = time.perf_counter() - start
    for line in ledger.render():
        print(line)
    print("clean + split of %d pairs: %.1f s" % (n, elapsed))
    return elapsed


def bench_encode(rng, n):
    model = train_bpe(synthetic_lines(rng, 20000, max_words=8),
                      SubwordTrainConfig(model_type=ModelType.BPE, vocab_size=2000))
    # Mostly distinct words; few lookups hit the per-word cache.
    lines = synthetic_lines(rng, n, max_words=8, n_words=max(5000, 2 * n),
                            max_syllables=6)
    distinct = len({w for line in lines for w in line.split()})
    start = time.perf_counter()
    for line in lines:
        encode_bpe(model, line)
    elapsed = time.perf_counter() - start
    print("BPE encode of %d sentences (%d distinct words): %.1f s, "
          "%.0f sentences/s" % (n, distinct, elapsed, n / elapsed))
    return n / elapsed


def main():
    args = docopt(__doc__)
    logging.basicConfig(level=logging.INFO if args["-v"] else logging.WARNING,
                        format="throughput: %(levelname)s: %(message)s")
    rng = np.random.default_rng(int(args["--seed"]))
    bench_clean_split(rng, int(args["--pairs"]))
    bench_encode(rng, int(args["--sentences"]))


if __name__ == "__main__":
    main()
