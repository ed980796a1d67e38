"""
Parallel corpora: the pair data model, file readers and writers,
concatenation and seeded train/valid/test splitting.

Files are UTF-8, one segment per line.  CR-LF line endings are accepted
on read; writes always use LF.
"""
import logging
import re
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional, Tuple

import numpy as np

from .errors import CorpusFormatError

logger = logging.getLogger(__name__)

# Identifies the shuffle used by split_corpus in split metadata files.
SPLIT_PRNG = "numpy.PCG64/permutation"

# Everything str.splitlines() treats as a line boundary.
_LINE_BREAK = re.compile("[\n\r\x0b\x0c\x1c\x1d\x1e\x85\u2028\u2029]")


class SentencePair(NamedTuple):
    """One aligned source/target segment with an optional quality score."""
    source: str
    target: str
    score: Optional[float] = None


def check_pair(pair, path=None, lineno=None):
    """
    Validate a SentencePair, raising CorpusFormatError if it is broken.

    Parameters
    ----------
    pair : SentencePair
        The pair to check.

    path, lineno : optional
        Location reported in the error.

    Returns
    -------
    pair : SentencePair
        The same pair, unchanged.
    """
    for side in (pair.source, pair.target):
        m = _LINE_BREAK.search(side)
        if m is not None:
            raise CorpusFormatError("segment contains line break U+%04X"
                                    % ord(m.group()), path, lineno)
    if pair.score is not None and not 0.0 <= pair.score <= 1.0:
        raise CorpusFormatError("score %r outside [0, 1]" % pair.score,
                                path, lineno)
    return pair


@dataclass(frozen=True)
class ParallelCorpus:
    """
    An ordered, immutable sequence of sentence pairs.

    Every pair is checked on construction, so a corpus can always be
    written out and read back line for line.

    Parameters
    ----------
    pairs : tuple of SentencePair
        The pairs, in corpus order.

    source_lang, target_lang : str
        Language tags, e.g. "en" and "ja".

    name : str
        Free text describing where the corpus came from.
    """
    pairs: Tuple[SentencePair, ...] = ()
    source_lang: str = "src"
    target_lang: str = "tgt"
    name: str = ""

    def __post_init__(self):
        if not isinstance(self.pairs, tuple):
            object.__setattr__(self, "pairs", tuple(self.pairs))
        for i, pair in enumerate(self.pairs, 1):
            check_pair(pair, self.name or None, i)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __getitem__(self, i):
        return self.pairs[i]

    @property
    def sources(self):
        return [p.source for p in self.pairs]

    @property
    def targets(self):
        return [p.target for p in self.pairs]

    @property
    def has_scores(self):
        return any(p.score is not None for p in self.pairs)

    def with_pairs(self, pairs, name=None):
        """Return a corpus with the same tags holding ``pairs``."""
        return replace(self, pairs=tuple(pairs),
                       name=self.name if name is None else name)


@dataclass(frozen=True)
class SplitSpec:
    """How many pairs go to validation and test, and the shuffle seed."""
    valid_count: int = 5000
    test_count: int = 5000
    seed: int = 0

    def __post_init__(self):
        if self.valid_count < 0 or self.test_count < 0:
            raise ValueError("split counts must be non-negative")


def read_lines(path):
    """
    Read a UTF-8 file as a list of segments, one per line.

    A trailing CR before each LF is dropped.  Invalid UTF-8 and stray
    line-break characters inside a line are reported with their line
    number.
    """
    lines = []
    with open(path, "rb") as fp:
        for lineno, raw in enumerate(fp, 1):
            if raw.endswith(b"\n"):
                raw = raw[:-1]
            if raw.endswith(b"\r"):
                raw = raw[:-1]
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as e:
                raise CorpusFormatError("invalid UTF-8 at byte %d" % e.start,
                                        path, lineno) from None
            m = _LINE_BREAK.search(line)
            if m is not None:
                raise CorpusFormatError("segment contains line break U+%04X"
                                        % ord(m.group()), path, lineno)
            lines.append(line)
    return lines


def _parse_score(text, path, lineno):
    if text == "":
        return None
    try:
        score = float(text)
    except ValueError:
        raise CorpusFormatError("unparsable score %r" % text,
                                path, lineno) from None
    if not 0.0 <= score <= 1.0:
        raise CorpusFormatError("score %r outside [0, 1]" % text, path, lineno)
    return score


def read_parallel(source_path, target_path, score_path=None,
                  source_lang="src", target_lang="tgt", name=None):
    """
    Read a corpus stored as one file per language.

    Parameters
    ----------
    source_path, target_path : str or Path
        Segment files; line i of each file forms pair i.

    score_path : str or Path, optional
        A file holding one score in [0, 1] per line.

    Returns
    -------
    corpus : ParallelCorpus
    """
    sources = read_lines(source_path)
    targets = read_lines(target_path)
    if len(sources) != len(targets):
        raise CorpusFormatError("line-count mismatch %d vs %d (%s, %s)"
                                % (len(sources), len(targets),
                                   source_path, target_path))
    if score_path is not None:
        raw = read_lines(score_path)
        if len(raw) != len(sources):
            raise CorpusFormatError("line-count mismatch %d vs %d (%s, %s)"
                                    % (len(sources), len(raw),
                                       source_path, score_path))
        scores = [_parse_score(s.strip(), score_path, i)
                  for i, s in enumerate(raw, 1)]
        pairs = tuple(map(SentencePair, sources, targets, scores))
    else:
        pairs = tuple(map(SentencePair, sources, targets))
    logger.info("Read %d pairs from %s / %s", len(pairs), source_path, target_path)
    return ParallelCorpus(pairs, source_lang, target_lang,
                          name if name is not None else str(source_path))


def read_tsv(path, has_score=False, source_lang="src", target_lang="tgt",
             name=None):
    """
    Read a corpus stored as ``source<TAB>target[<TAB>score]`` lines.
    """
    expected = 3 if has_score else 2
    pairs = []
    for lineno, line in enumerate(read_lines(path), 1):
        fields = line.split("\t")
        if len(fields) != expected:
            raise CorpusFormatError("expected %d fields, got %d, line %d"
                                    % (expected, len(fields), lineno),
                                    path, lineno)
        if has_score:
            pairs.append(SentencePair(fields[0], fields[1],
                                      _parse_score(fields[2].strip(), path, lineno)))
        else:
            pairs.append(SentencePair(fields[0], fields[1]))
    logger.info("Read %d pairs from %s", len(pairs), path)
    return ParallelCorpus(tuple(pairs), source_lang, target_lang,
                          name if name is not None else str(path))


def write_lines(path, lines):
    """Write segments one per line, LF-terminated; no lines gives an empty file."""
    with open(path, "w", encoding="utf-8", newline="\n") as fp:
        for line in lines:
            fp.write(line)
            fp.write("\n")


def write_parallel(corpus, source_path, target_path, score_path=None):
    """
    Write a corpus as one file per language (plus an optional score file).

    Pairs without a score are written as an empty score line.
    """
    write_lines(source_path, corpus.sources)
    write_lines(target_path, corpus.targets)
    if score_path is not None:
        write_lines(score_path, ("" if p.score is None else repr(p.score)
                                 for p in corpus))
    logger.info("Wrote %d pairs to %s / %s", len(corpus), source_path, target_path)


def write_tsv(corpus, path, with_score=False):
    """
    Write a corpus as ``source<TAB>target[<TAB>score]`` lines.

    Raises
    ------
    CorpusFormatError
        A segment contains a tab.
    """
    for i, p in enumerate(corpus, 1):
        if "\t" in p.source or "\t" in p.target:
            raise CorpusFormatError("segment contains a tab", corpus.name or None, i)

    def row(p):
        if with_score:
            return "%s\t%s\t%s" % (p.source, p.target,
                                   "" if p.score is None else repr(p.score))
        return "%s\t%s" % (p.source, p.target)
    write_lines(path, (row(p) for p in corpus))


def concat_corpora(corpora, name=None):
    """
    Concatenate corpora in list order.

    All corpora must carry the same language tags.
    """
    corpora = list(corpora)
    if not corpora:
        raise ValueError("concat_corpora needs at least one corpus")
    first = corpora[0]
    pairs = []
    for c in corpora:
        if (c.source_lang, c.target_lang) != (first.source_lang, first.target_lang):
            raise CorpusFormatError("language-tag mismatch: %s-%s vs %s-%s"
                                    % (first.source_lang, first.target_lang,
                                       c.source_lang, c.target_lang))
        pairs.extend(c.pairs)
    if name is None:
        name = "+".join(c.name for c in corpora)
    return ParallelCorpus(tuple(pairs), first.source_lang, first.target_lang, name)


def _rng_seed(seed):
    # PCG64 wants a non-negative integer; fold signed 64-bit seeds.
    return int(seed) & 0xFFFFFFFFFFFFFFFF


def split_corpus(corpus, spec):
    """
    Split a corpus into train, validation and test parts.

    A PCG64 permutation of the pair indices (seeded by ``spec.seed``)
    is drawn; its first ``test_count`` indices form the test set, the
    next ``valid_count`` the validation set and the rest the training
    set.  Each part keeps the original relative order of its pairs.

    Returns
    -------
    train, valid, test : ParallelCorpus
    """
    n = len(corpus)
    if spec.valid_count + spec.test_count > n:
        raise CorpusFormatError("cannot take %d validation + %d test pairs "
                                "from a corpus of %d"
                                % (spec.valid_count, spec.test_count, n))
    rng = np.random.Generator(np.random.PCG64(_rng_seed(spec.seed)))
    perm = rng.permutation(n)
    test_idx = np.sort(perm[:spec.test_count])
    valid_idx = np.sort(perm[spec.test_count:spec.test_count + spec.valid_count])
    train_idx = np.sort(perm[spec.test_count + spec.valid_count:])
    pairs = corpus.pairs

    def take(idx, suffix):
        return corpus.with_pairs((pairs[i] for i in idx.tolist()),
                                 name="%s:%s" % (corpus.name, suffix))

    logger.info("Split %d pairs into %d train / %d valid / %d test (seed %d)",
                n, len(train_idx), len(valid_idx), len(test_idx), spec.seed)
    return take(train_idx, "train"), take(valid_idx, "valid"), take(test_idx, "test")


def split_metadata(spec, train, valid, test):
    """Key/value lines recording how a split was produced."""
    return ["#mtprep-split v1",
            "prng\t%s" % SPLIT_PRNG,
            "seed\t%d" % spec.seed,
            "train\t%d" % len(train),
            "valid\t%d" % len(valid),
            "test\t%d" % len(test)]
