"""
Byte-pair encoding: merge learning and (dropout) encoding.

Training repeatedly merges the most frequent adjacent symbol pair.  Ties
go to the smallest ``(left, right)`` pair in code-point order, which
makes the merge list a pure function of the corpus.
"""
import heapq
import logging
from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from typing import ClassVar, Tuple

import numpy as np
from tqdm import tqdm

from ..errors import TrainingError
from .pieces import BYTE_PIECES, byte_fallback_pieces
from .words import (DEFAULT_MARKER, ModelType, SubwordTrainConfig, WordCache,
                    char_counts, covered_chars, escaped_marker, is_mergeable,
                    prepare_words, word_segments)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BpeModel:
    """
    A trained BPE model.

    Parameters
    ----------
    merges : tuple of (str, str)
        Merge rules in learning order; rank 0 first.

    vocab : tuple of (str, int)
        Pieces with their training frequency: single characters first,
        then merged pieces in merge order.  Byte pieces are implied by
        ``byte_fallback`` and not listed.

    marker : str
        Word-boundary marker.

    byte_fallback, split_digits : bool
        The flags the model was trained with.
    """
    merges: Tuple[Tuple[str, str], ...]
    vocab: Tuple[Tuple[str, int], ...]
    marker: str = DEFAULT_MARKER
    byte_fallback: bool = False
    split_digits: bool = False

    model_type: ClassVar[ModelType] = ModelType.BPE

    @cached_property
    def ranks(self):
        return {pair: i for i, pair in enumerate(self.merges)}

    @cached_property
    def alphabet(self):
        """Single-character pieces."""
        return frozenset(p for p, _ in self.vocab if len(p) == 1)

    @cached_property
    def pieces(self):
        """Every piece in model order, byte pieces last."""
        pieces = [p for p, _ in self.vocab]
        if self.byte_fallback:
            pieces.extend(BYTE_PIECES)
        return tuple(pieces)

    @cached_property
    def _word_cache(self):
        return WordCache()

    def __len__(self):
        return len(self.pieces)

    def base_symbols(self, word):
        """The symbols of ``word`` before any merge."""
        syms = []
        for k, part in enumerate(word_segments(word, self.marker)):
            if k:
                syms.extend(escaped_marker(self.marker))
            for c in part:
                if c in self.alphabet or not self.byte_fallback:
                    syms.append(c)
                else:
                    syms.extend(byte_fallback_pieces(c))
        return syms

    def encode_word(self, word, dropout_p=0.0, rng=None):
        if dropout_p == 0.0:
            cached = self._word_cache.get(word)
            if cached is None:
                cached = self._word_cache.put(word, tuple(
                    apply_merges(self.base_symbols(word), self.ranks)))
            return list(cached)
        return apply_merges(self.base_symbols(word), self.ranks, dropout_p, rng)


def apply_merges(syms, ranks, dropout_p=0.0, rng=None):
    """
    Merge symbols in place, lowest rank first.

    With dropout every candidate merge is skipped with probability
    ``dropout_p`` on every pass.
    """
    while len(syms) > 1:
        best_rank = best_i = None
        for i in range(len(syms) - 1):
            r = ranks.get((syms[i], syms[i + 1]))
            if r is None:
                continue
            if dropout_p and rng.random() < dropout_p:
                continue
            if best_rank is None or r < best_rank:
                best_rank, best_i = r, i
        if best_i is None:
            break
        syms[best_i:best_i + 2] = [syms[best_i] + syms[best_i + 1]]
    return syms


def encode_bpe(model, text, dropout_p=0.0, seed=None, rng=None):
    """
    Segment text with a BPE model.

    Parameters
    ----------
    model : BpeModel

    text : str

    dropout_p : float
        Probability of skipping each merge application, in [0, 1].  Zero
        gives plain deterministic BPE; one gives the base symbols.

    seed : int, optional
        Seeds the dropout generator when ``rng`` is not given.

    rng : numpy.random.Generator, optional

    Returns
    -------
    pieces : list of str
    """
    if not 0.0 <= dropout_p <= 1.0:
        raise ValueError("dropout_p must be in [0, 1], got %r" % dropout_p)
    if dropout_p and rng is None:
        rng = np.random.default_rng(seed)
    pieces = []
    for word in text.split():
        pieces.extend(model.encode_word(word, dropout_p, rng))
    return pieces

######################################################################


def _merge_word(syms, left, right):
    out = []
    i = 0
    n = len(syms)
    while i < n:
        if i < n - 1 and syms[i] == left and syms[i + 1] == right:
            out.append(left + right)
            i += 2
        else:
            out.append(syms[i])
            i += 1
    return out


def train_bpe(lines, config=None):
    """
    Learn BPE merges.

    Starting from single characters, the most frequent adjacent pair is
    merged until the model holds ``config.vocab_size`` pieces or no pair
    occurs twice.

    Returns
    -------
    model : BpeModel

    Raises
    ------
    TrainingError
        The vocabulary cannot even hold the base symbols.
    """
    if config is None:
        config = SubwordTrainConfig(model_type=ModelType.BPE)
    words = prepare_words(config.training_lines(lines), config.marker,
                          config.split_digits)
    chars = char_counts(words)
    keep = covered_chars(chars, config.character_coverage, config.marker) \
        if chars else set()
    alphabet = sorted((c for c in keep if c in chars), key=lambda c: (-chars[c], c))
    base = len(alphabet) + (len(BYTE_PIECES) if config.byte_fallback else 0)
    if config.vocab_size < base:
        raise TrainingError("vocab_size %d is smaller than the %d base symbols"
                            % (config.vocab_size, base))
    n_merges = config.vocab_size - base
    have = set(alphabet)
    blocked = set(chars) - keep
    split_digits = config.split_digits

    def mergeable(a, b):
        return a not in blocked and b not in blocked and \
            is_mergeable(a + b, split_digits)

    wlist = [list(w) for w in words]
    freqs = list(words.values())
    stats = defaultdict(int)
    where = defaultdict(set)
    for idx, syms in enumerate(wlist):
        f = freqs[idx]
        for pair in zip(syms, syms[1:]):
            if mergeable(*pair):
                stats[pair] += f
                where[pair].add(idx)
    heap = [(-c, a, b) for (a, b), c in stats.items()]
    heapq.heapify(heap)

    merges = []
    vocab = [(c, chars[c]) for c in alphabet]
    progress = tqdm(total=n_merges, desc="bpe merges", unit="merge",
                    disable=not logger.isEnabledFor(logging.INFO))
    while len(have) < len(alphabet) + n_merges:
        best = None
        while heap:
            negc, a, b = heapq.heappop(heap)
            if stats.get((a, b), 0) == -negc:
                best = (a, b)
                break
        if best is None or stats[best] < 2:
            break
        count = stats[best]
        left, right = best
        merges.append(best)
        if left + right not in have:
            have.add(left + right)
            vocab.append((left + right, count))
            progress.update(1)
        changed = set()
        for idx in list(where[best]):
            syms = wlist[idx]
            if not any(p == best for p in zip(syms, syms[1:])):
                continue
            f = freqs[idx]
            for pair in zip(syms, syms[1:]):
                if mergeable(*pair):
                    stats[pair] -= f
                    changed.add(pair)
            syms = wlist[idx] = _merge_word(syms, left, right)
            for pair in zip(syms, syms[1:]):
                if mergeable(*pair):
                    stats[pair] += f
                    where[pair].add(idx)
                    changed.add(pair)
        for pair in changed:
            c = stats[pair]
            if c > 0:
                heapq.heappush(heap, (-c, pair[0], pair[1]))
            else:
                del stats[pair]
    progress.close()
    logger.info("Learned %d merges over %d base symbols", len(merges), base)
    return BpeModel(tuple(merges), tuple(vocab), config.marker,
                    config.byte_fallback, config.split_digits)
