"""
Training configuration and the word tables both subword trainers start
from.

Lines are split on whitespace and every word gets the boundary marker
(U+2581 by default) in front, so ``"ab abc"`` becomes the symbol
sequences ``▁ a b`` and ``▁ a b c``.  A literal marker inside a word
splits it: the parts are counted and encoded separately and the marker
itself is spelled with its UTF-8 byte pieces, so decoding restores it.
"""
import enum
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..errors import ConfigError

DEFAULT_MARKER = "▁"

# Entries kept by a model's per-word segmentation cache.
WORD_CACHE_SIZE = 2 ** 20


class ModelType(enum.Enum):
    BPE = "bpe"
    UNIGRAM = "unigram"


@dataclass(frozen=True)
class SubwordTrainConfig:
    """
    Settings for training a subword model.

    Parameters
    ----------
    model_type : ModelType
        BPE merges or a Unigram language model.

    vocab_size : int
        Upper bound on the number of pieces, byte pieces included.

    character_coverage : float
        Fraction of character occurrences that must get their own piece,
        in (0, 1].  Rarer characters fall back to bytes or ``<unk>``.

    byte_fallback : bool
        Add the 256 ``<0xHH>`` pieces and spell unknown characters with
        them.

    split_digits : bool
        Keep every decimal digit a piece of its own.

    seed : int
        Seeds the sentence sample drawn when ``input_sentence_size`` is
        set.  Training is otherwise deterministic.

    input_sentence_size : int, optional
        Train on a shuffled sample of this many input lines instead of
        all of them.

    marker : str
        Word-boundary marker prepended to every word.  May be empty.

    seed_vocab_size : int, optional
        Unigram: size of the initial substring vocabulary.  Defaults to
        four times ``vocab_size``, at most one million.

    max_piece_length : int
        Unigram: longest piece, in characters.

    em_iterations : int
        Unigram: EM passes between two pruning steps.

    prune_fraction : float
        Unigram: share of removable pieces dropped per pruning step.

    normalize : callable, optional
        Applied to every line before training and encoding.  The default
        passes text through unchanged.
    """
    model_type: ModelType = ModelType.UNIGRAM
    vocab_size: int = 32000
    character_coverage: float = 1.0
    byte_fallback: bool = False
    split_digits: bool = False
    seed: int = 0
    marker: str = DEFAULT_MARKER
    seed_vocab_size: Optional[int] = None
    max_piece_length: int = 16
    em_iterations: int = 2
    prune_fraction: float = 0.25
    normalize: Optional[Callable[[str], str]] = None
    input_sentence_size: Optional[int] = None

    def __post_init__(self):
        if self.vocab_size <= 0:
            raise ConfigError("vocab_size must be positive, got %r" % self.vocab_size)
        if not 0.0 < self.character_coverage <= 1.0:
            raise ConfigError("character_coverage must be in (0, 1], got %r"
                              % self.character_coverage)
        if len(self.marker) > 1 or self.marker.isspace():
            raise ConfigError("marker must be one non-space character or empty")
        if self.max_piece_length < 1:
            raise ConfigError("max_piece_length must be positive")
        if self.em_iterations < 1:
            raise ConfigError("em_iterations must be positive")
        if not 0.0 < self.prune_fraction < 1.0:
            raise ConfigError("prune_fraction must be in (0, 1), got %r"
                              % self.prune_fraction)
        if self.input_sentence_size is not None and self.input_sentence_size < 1:
            raise ConfigError("input_sentence_size must be positive, got %r"
                              % self.input_sentence_size)

    @property
    def effective_seed_vocab_size(self):
        if self.seed_vocab_size is not None:
            return self.seed_vocab_size
        return min(4 * self.vocab_size, 1000000)

    def normalized(self, lines):
        if self.normalize is None:
            return lines
        return (self.normalize(line) for line in lines)

    def training_lines(self, lines):
        """The sampled and normalized lines a trainer counts words from."""
        return self.normalized(sample_sentences(lines, self.input_sentence_size,
                                                self.seed))


def sample_sentences(lines, size, seed=0):
    """
    A seeded, shuffled sample of ``size`` lines.

    All lines come back unchanged, in input order, when ``size`` is None
    or not smaller than their number.
    """
    lines = list(lines)
    if size is None or size >= len(lines):
        return lines
    rng = np.random.default_rng(seed)
    return [lines[i] for i in rng.permutation(len(lines))[:size]]


def word_symbols(word, marker=DEFAULT_MARKER):
    """The initial symbol sequence of one word without literal markers."""
    return (marker,) + tuple(word) if marker else tuple(word)


def word_segments(word, marker=DEFAULT_MARKER):
    """
    Split a word at literal markers into symbol sequences.

    Only the first part carries the boundary marker.  Parts may be empty;
    a literal marker belongs between every two of them.

    >>> word_segments("a▁b")
    [('▁', 'a'), ('b',)]
    """
    if not marker:
        return [tuple(word)]
    first, *rest = word.split(marker)
    return [word_symbols(first, marker)] + [tuple(part) for part in rest]


def escaped_marker(marker=DEFAULT_MARKER):
    """The byte pieces standing for a literal marker in the text."""
    return tuple("<0x%02X>" % b for b in marker.encode("utf-8"))


class WordCache:
    """
    Segmentations of recently encoded words.

    A plain dict kept in insertion order so models stay picklable for
    worker processes; the least recently used entry goes first.
    """
    def __init__(self, maxsize=WORD_CACHE_SIZE):
        self.maxsize = maxsize
        self._entries = {}

    def __len__(self):
        return len(self._entries)

    def get(self, key):
        value = self._entries.pop(key, None)
        if value is not None:
            self._entries[key] = value
        return value

    def put(self, key, value):
        self._entries[key] = value
        if len(self._entries) > self.maxsize:
            del self._entries[next(iter(self._entries))]
        return value


def prepare_words(lines, marker=DEFAULT_MARKER, split_digits=False):
    """
    Count the words of a corpus as symbol sequences.

    Parameters
    ----------
    lines : iterable of str
        Training text.

    marker : str
        Word-boundary marker.

    split_digits : bool
        Digits are single-character symbols either way; the flag is
        enforced by ``is_mergeable`` when pieces are built.

    Returns
    -------
    words : Counter
        Symbol tuple -> occurrences.
    """
    counts = Counter()
    for line in lines:
        counts.update(line.split())
    words = Counter()
    for word, n in counts.items():
        for symbols in word_segments(word, marker):
            if symbols:
                words[symbols] += n
    return words


def is_mergeable(piece, split_digits):
    """Whether ``piece`` may exist as a multi-character piece."""
    if split_digits and len(piece) > 1:
        return not any(c.isdecimal() for c in piece)
    return True


def char_counts(words):
    chars = Counter()
    for symbols, n in words.items():
        for c in symbols:
            chars[c] += n
    return chars


def covered_chars(chars, coverage, marker=DEFAULT_MARKER):
    """
    The most frequent characters covering ``coverage`` of all occurrences.

    Characters are ranked by count (ties by code point) and the shortest
    prefix reaching the requested share is kept.  The marker is always
    kept.
    """
    total = sum(chars.values())
    ranked = sorted(chars.items(), key=lambda kv: (-kv[1], kv[0]))
    keep = set()
    running = 0
    for c, n in ranked:
        if total and running >= coverage * total:
            break
        keep.add(c)
        running += n
    if marker:
        keep.add(marker)
    return keep
