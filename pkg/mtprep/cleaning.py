"""
The parallel-corpus filtering cascade and its row-count ledger.

Stages run in a fixed order; each one records how many rows survive::

    Dataframe shape (rows, columns): (10120013, 2)
    --- Rows with Empty Cells Deleted      --> Rows: 10120013
    --- Duplicates Deleted                 --> Rows: 8800926
    ...

Comparisons are exact and case-sensitive.  "Empty" means empty after
stripping Unicode whitespace, but surviving text is never edited unless a
tokenizing stage is configured.
"""
import enum
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .corpus import SentencePair, read_lines, write_lines
from .errors import ConfigError, CorpusFormatError
from .pretokenize import NONE, Kind, PretokenizerKind, pretokenize_lines

logger = logging.getLogger(__name__)

EMPTY_STAGE = "Rows with Empty Cells Deleted"
SCORE_STAGE = "Low-Score Rows Deleted"
TOKENIZE_SOURCE_STAGE = "Tokenizing the Source Complete"
TOKENIZE_TARGET_STAGE = "Tokenizing the Target Complete"
DEDUP_STAGE = "Duplicates Deleted"
COPY_STAGE = "Source-Copied Rows Deleted"
LENGTH_STAGE = "Too-Long Source/Target Deleted"

STAGE_WIDTH = 35
LEDGER_HEADER = "#mtprep-ledger v1"


class LengthUnit(enum.Enum):
    CHARACTERS = "characters"
    WHITESPACE_TOKENS = "whitespace_tokens"


class DedupKey(enum.Enum):
    PAIR = "pair"
    SOURCE = "source"
    TARGET = "target"


@dataclass(frozen=True)
class FilterConfig:
    """
    Settings of the cleaning cascade.

    Parameters
    ----------
    max_length : int
        Longest allowed segment on either side, in ``length_unit``.

    length_unit : LengthUnit
        Count characters or whitespace-separated tokens.

    max_ratio : float
        Largest allowed longer/shorter length ratio; at least 1.

    dedup_key : DedupKey
        What makes two rows duplicates.

    score_threshold : float, optional
        Keep scored rows only if their score is strictly above this.

    source_copy_check : bool
        Drop rows whose target repeats the source.

    pretokenize_source, pretokenize_target : PretokenizerKind
        Tokenize a side after the first empty-row stage.  NONE leaves
        the text untouched.
    """
    max_length: int = 200
    length_unit: LengthUnit = LengthUnit.WHITESPACE_TOKENS
    max_ratio: float = 9.0
    dedup_key: DedupKey = DedupKey.PAIR
    score_threshold: Optional[float] = None
    source_copy_check: bool = True
    pretokenize_source: PretokenizerKind = NONE
    pretokenize_target: PretokenizerKind = NONE

    def __post_init__(self):
        if self.max_length <= 0:
            raise ConfigError("max_length must be positive, got %r" % self.max_length)
        if self.max_ratio < 1:
            raise ConfigError("max_ratio must be >= 1, got %r" % self.max_ratio)
        if self.score_threshold is not None and not 0.0 <= self.score_threshold <= 1.0:
            raise ConfigError("score_threshold must be in [0, 1], got %r"
                              % self.score_threshold)


@dataclass
class FilterLedger:
    """
    Rows remaining after each cleaning stage.

    Parameters
    ----------
    initial_rows : int
        Corpus size before the first stage.

    stages : list of (str, int)
        Stage name and rows remaining, in the order the stages ran.
    """
    initial_rows: int = 0
    stages: List[Tuple[str, int]] = field(default_factory=list)

    def record(self, name, rows):
        last = self.stages[-1][1] if self.stages else self.initial_rows
        if rows > last:
            raise ValueError("ledger counts must not increase (%s: %d > %d)"
                             % (name, rows, last))
        self.stages.append((name, rows))
        logger.info("%s: %d rows", name, rows)

    @property
    def final_rows(self):
        return self.stages[-1][1] if self.stages else self.initial_rows

    def render(self):
        """Human-readable lines, header first."""
        lines = ["Dataframe shape (rows, columns): (%d, 2)" % self.initial_rows]
        for name, rows in self.stages:
            lines.append("--- %s--> Rows: %d" % (name.ljust(STAGE_WIDTH), rows))
        return lines

    def report_lines(self):
        """Machine-readable ``stage<TAB>rows`` lines."""
        lines = [LEDGER_HEADER, "initial\t%d" % self.initial_rows]
        lines.extend("%s\t%d" % (name, rows) for name, rows in self.stages)
        return lines

    def write(self, path):
        write_lines(path, self.report_lines())

    @classmethod
    def read(cls, path):
        lines = read_lines(path)
        if not lines or lines[0] != LEDGER_HEADER:
            raise CorpusFormatError("not a ledger report", path, 1)
        ledger = cls()
        for lineno, line in enumerate(lines[1:], 2):
            name, _, rows = line.rpartition("\t")
            try:
                n = int(rows)
            except ValueError:
                raise CorpusFormatError("bad row count %r" % rows,
                                        path, lineno) from None
            if name == "initial" and lineno == 2:
                ledger.initial_rows = n
            else:
                ledger.record(name, n)
        return ledger

######################################################################


def _is_empty(text):
    return not text.strip()


def remove_empty(corpus):
    """Drop pairs whose source or target is blank."""
    return corpus.with_pairs(p for p in corpus
                             if not _is_empty(p.source) and not _is_empty(p.target))


def _dedup_key(key):
    if key is DedupKey.PAIR:
        return lambda p: (p.source, p.target)
    if key is DedupKey.SOURCE:
        return lambda p: p.source
    return lambda p: p.target


def dedup_pairs(corpus, key=DedupKey.PAIR):
    """Keep the first pair with each key value and drop later repeats."""
    keyf = _dedup_key(key)
    seen = set()
    kept = []
    for p in corpus:
        k = keyf(p)
        if k not in seen:
            seen.add(k)
            kept.append(p)
    return corpus.with_pairs(kept)


def remove_source_copies(corpus):
    """Drop pairs whose (stripped) target equals the (stripped) source."""
    return corpus.with_pairs(p for p in corpus
                             if p.source.strip() != p.target.strip())


def segment_length(text, unit):
    if unit is LengthUnit.CHARACTERS:
        return len(text)
    return len(text.split())


def keeps_length(pair, max_length, length_unit, max_ratio):
    """
    The length predicate of filter_length for a single pair.

    Pairs with an empty side never pass.
    """
    ls = segment_length(pair.source, length_unit)
    lt = segment_length(pair.target, length_unit)
    if ls > max_length or lt > max_length:
        return False
    shorter, longer = min(ls, lt), max(ls, lt)
    if shorter == 0:
        return False
    return longer / shorter <= max_ratio


def filter_length(corpus, max_length=200, length_unit=LengthUnit.WHITESPACE_TOKENS,
                  max_ratio=9.0):
    """Drop pairs that are too long or whose lengths differ too much."""
    if max_ratio < 1:
        raise ConfigError("max_ratio must be >= 1, got %r" % max_ratio)
    return corpus.with_pairs(p for p in corpus
                             if keeps_length(p, max_length, length_unit, max_ratio))


def filter_score(corpus, threshold):
    """
    Drop scored pairs whose score is not strictly above ``threshold``.

    Pairs without a score are kept.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ConfigError("score threshold must be in [0, 1], got %r" % threshold)
    return corpus.with_pairs(p for p in corpus
                             if p.score is None or p.score > threshold)


def _tokenize_side(corpus, kind, source):
    texts = corpus.sources if source else corpus.targets
    joined = [" ".join(toks) for toks in pretokenize_lines(texts, kind)]
    if source:
        pairs = (SentencePair(t, p.target, p.score) for t, p in zip(joined, corpus))
    else:
        pairs = (SentencePair(p.source, t, p.score) for t, p in zip(joined, corpus))
    return corpus.with_pairs(pairs)


def run_pipeline(corpus, config=None):
    """
    Run the full cleaning cascade.

    The order is: score filter (when a threshold is set), empty rows,
    optional source/target tokenization, duplicates, source copies
    (when enabled), length filter, empty rows again.

    Returns
    -------
    corpus : ParallelCorpus
        The surviving pairs.

    ledger : FilterLedger
        Rows left after each stage.
    """
    if config is None:
        config = FilterConfig()
    ledger = FilterLedger(initial_rows=len(corpus))
    if config.score_threshold is not None:
        corpus = filter_score(corpus, config.score_threshold)
        ledger.record(SCORE_STAGE, len(corpus))
    corpus = remove_empty(corpus)
    ledger.record(EMPTY_STAGE, len(corpus))
    if config.pretokenize_source.kind is not Kind.NONE:
        corpus = _tokenize_side(corpus, config.pretokenize_source, source=True)
        ledger.record(TOKENIZE_SOURCE_STAGE, len(corpus))
    if config.pretokenize_target.kind is not Kind.NONE:
        corpus = _tokenize_side(corpus, config.pretokenize_target, source=False)
        ledger.record(TOKENIZE_TARGET_STAGE, len(corpus))
    corpus = dedup_pairs(corpus, config.dedup_key)
    ledger.record(DEDUP_STAGE, len(corpus))
    if config.source_copy_check:
        corpus = remove_source_copies(corpus)
        ledger.record(COPY_STAGE, len(corpus))
    corpus = filter_length(corpus, config.max_length, config.length_unit,
                           config.max_ratio)
    ledger.record(LENGTH_STAGE, len(corpus))
    corpus = remove_empty(corpus)
    ledger.record(EMPTY_STAGE, len(corpus))
    return corpus, ledger
