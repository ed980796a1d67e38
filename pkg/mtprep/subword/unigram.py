"""
Unigram language-model segmentation.

Each piece carries a log-probability (natural log) and a word is
segmented into the sequence of pieces with the largest total.  Training
follows the usual recipe:

1. seed vocabulary: the most frequent substrings of at most
   ``max_piece_length`` characters plus every single character;
2. EM: expected piece counts from forward-backward over each word's
   segmentation lattice, then renormalization;
3. pruning: drop the share ``prune_fraction`` of multi-character pieces
   whose removal is estimated to cost the least likelihood, run EM
   again, and repeat until the vocabulary fits.

The pruning cost of a piece is its Viterbi frequency times the
log-probability it loses against its best segmentation without it.
"""
import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import ClassVar, Mapping

import numpy as np
from tqdm import tqdm

from ..errors import SegmentationError, TrainingError
from .pieces import BYTE_PIECES, UNK, byte_fallback_pieces
from .words import (DEFAULT_MARKER, ModelType, SubwordTrainConfig, WordCache,
                    char_counts, covered_chars, escaped_marker, is_mergeable,
                    prepare_words, word_segments)

logger = logging.getLogger(__name__)

NEG_INF = float("-inf")

# Expected count every single character keeps during training, so no
# string ever loses its character-by-character segmentation.
CHAR_FLOOR = 1e-3


def _logaddexp(a, b):
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    if a > b:
        return a + math.log1p(math.exp(b - a))
    return b + math.log1p(math.exp(a - b))


@dataclass(frozen=True)
class UnigramModel:
    """
    A trained Unigram model.

    Parameters
    ----------
    pieces : Mapping
        Piece -> natural-log probability, most probable first.  The
        probabilities sum to one.  Byte pieces are implied by
        ``byte_fallback`` and not listed.

    marker : str
        Word-boundary marker.

    byte_fallback, split_digits : bool
        The flags the model was trained with.
    """
    pieces: Mapping[str, float] = field(default_factory=dict)
    marker: str = DEFAULT_MARKER
    byte_fallback: bool = False
    split_digits: bool = False

    model_type: ClassVar[ModelType] = ModelType.UNIGRAM

    @cached_property
    def max_piece_length(self):
        return max((len(p) for p in self.pieces), default=1)

    @cached_property
    def _word_cache(self):
        return WordCache()

    @property
    def all_pieces(self):
        pieces = list(self.pieces)
        if self.byte_fallback:
            pieces.extend(BYTE_PIECES)
        return tuple(pieces)

    def __len__(self):
        return len(self.pieces) + (len(BYTE_PIECES) if self.byte_fallback else 0)

    def runs(self, word, on_unknown="unk"):
        """
        Split a word's symbols into segmentable runs and fallback pieces.

        Yields ``(run, None)`` for text the pieces can cover and
        ``(None, pieces)`` for a character they cannot or a literal
        marker.
        """
        for k, part in enumerate(word_segments(word, self.marker)):
            if k:
                yield None, list(escaped_marker(self.marker))
            run = []
            for c in part:
                if c in self.pieces:
                    run.append(c)
                    continue
                if run:
                    yield "".join(run), None
                    run = []
                if self.byte_fallback:
                    yield None, byte_fallback_pieces(c)
                elif on_unknown == "unk":
                    yield None, [UNK]
                else:
                    raise SegmentationError(c)
            if run:
                yield "".join(run), None

######################################################################

#
# Lattice algorithms over a single string.
#

def _edges_ending(text, j, logprobs, max_len):
    for i in range(max(0, j - max_len), j):
        lp = logprobs.get(text[i:j])
        if lp is not None and lp != NEG_INF:
            yield i, lp


def _backtrack(back, j):
    out = []
    while j > 0:
        i = back[j]
        out.append((i, j))
        j = i
    out.reverse()
    return out


def viterbi_segment(text, logprobs, max_len=None):
    """
    The best segmentation of ``text`` into pieces of ``logprobs``.

    Ties in total log-probability go to fewer pieces, then to the
    lexicographically smaller piece sequence.

    Raises
    ------
    SegmentationError
        No segmentation exists.
    """
    n = len(text)
    if n == 0:
        return []
    if max_len is None:
        max_len = max((len(p) for p in logprobs), default=1)
    score = [NEG_INF] * (n + 1)
    count = [0] * (n + 1)
    back = [0] * (n + 1)
    score[0] = 0.0
    for j in range(1, n + 1):
        for i, lp in _edges_ending(text, j, logprobs, max_len):
            if score[i] == NEG_INF:
                continue
            s = score[i] + lp
            c = count[i] + 1
            if s > score[j] or (s == score[j] and c < count[j]):
                score[j], count[j], back[j] = s, c, i
            elif s == score[j] and c == count[j]:
                mine = [text[a:b] for a, b in _backtrack(back, i)] + [text[i:j]]
                theirs = [text[a:b] for a, b in _backtrack(back, j)]
                if mine < theirs:
                    back[j] = i
    if score[n] == NEG_INF:
        raise SegmentationError(_uncovered(text, logprobs))
    return [text[a:b] for a, b in _backtrack(back, n)]


def _uncovered(text, logprobs):
    for c in text:
        if logprobs.get(c, NEG_INF) == NEG_INF:
            return c
    return text[0]


def _forward(text, logprobs, max_len, alpha=1.0):
    n = len(text)
    fwd = [NEG_INF] * (n + 1)
    fwd[0] = 0.0
    for j in range(1, n + 1):
        acc = NEG_INF
        for i, lp in _edges_ending(text, j, logprobs, max_len):
            acc = _logaddexp(acc, fwd[i] + alpha * lp)
        fwd[j] = acc
    return fwd


def sample_segment(text, logprobs, alpha, rng, max_len=None):
    """
    Draw a segmentation of ``text`` by forward filtering, backward sampling.

    A segmentation is drawn with probability proportional to the product
    of its piece probabilities raised to ``alpha``.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive, got %r" % alpha)
    n = len(text)
    if n == 0:
        return []
    if max_len is None:
        max_len = max((len(p) for p in logprobs), default=1)
    fwd = _forward(text, logprobs, max_len, alpha)
    if fwd[n] == NEG_INF:
        return viterbi_segment(text, logprobs, max_len)
    out = []
    j = n
    while j > 0:
        cands = [(i, fwd[i] + alpha * lp) for i, lp in
                 _edges_ending(text, j, logprobs, max_len) if fwd[i] != NEG_INF]
        u = rng.random()
        acc = 0.0
        pick = cands[-1][0]
        for i, s in cands:
            acc += math.exp(s - fwd[j])
            if u < acc:
                pick = i
                break
        out.append(text[pick:j])
        j = pick
    out.reverse()
    return out


def _word_expectations(text, logprobs, max_len, weight, counts):
    """Add ``weight`` times the expected piece counts of ``text``; return log Z."""
    n = len(text)
    fwd = _forward(text, logprobs, max_len)
    bwd = [NEG_INF] * (n + 1)
    bwd[n] = 0.0
    for i in range(n - 1, -1, -1):
        acc = NEG_INF
        for j in range(i + 1, min(n, i + max_len) + 1):
            lp = logprobs.get(text[i:j])
            if lp is not None and lp != NEG_INF:
                acc = _logaddexp(acc, lp + bwd[j])
        bwd[i] = acc
    z = fwd[n]
    if z == NEG_INF:
        raise SegmentationError(_uncovered(text, logprobs))
    for j in range(1, n + 1):
        for i, lp in _edges_ending(text, j, logprobs, max_len):
            p = math.exp(fwd[i] + lp + bwd[j] - z)
            if p:
                counts[text[i:j]] += weight * p
    return z


def em_step(logprobs, words, max_len=None, char_floor=0.0):
    """
    One EM iteration.

    Parameters
    ----------
    logprobs : Mapping
        Current piece log-probabilities.

    words : Mapping
        Training string -> frequency.

    char_floor : float
        Smallest expected count a single-character piece is given before
        renormalizing.  Zero is plain EM.

    Returns
    -------
    new_logprobs : dict
        Re-estimated log-probabilities, summing to one in probability.

    log_likelihood : float
        Corpus log-likelihood under the *input* model.

    Raises
    ------
    SegmentationError
        A training string has no segmentation at all.
    """
    if max_len is None:
        max_len = max((len(p) for p in logprobs), default=1)
    counts = dict.fromkeys(logprobs, 0.0)
    loglik = 0.0
    for text, freq in words.items():
        loglik += freq * _word_expectations(text, logprobs, max_len, freq, counts)
    if char_floor:
        for p, c in counts.items():
            if len(p) == 1 and c < char_floor:
                counts[p] = char_floor
    total = sum(counts.values())
    new = {p: (math.log(c / total) if c > 0 else NEG_INF) for p, c in counts.items()}
    return new, loglik


def log_likelihood(logprobs, words, max_len=None):
    """Corpus log-likelihood summed over all segmentations."""
    if max_len is None:
        max_len = max((len(p) for p in logprobs), default=1)
    return sum(freq * _forward(text, logprobs, max_len)[-1]
               for text, freq in words.items())

######################################################################


def _training_strings(words, keep):
    """Split marked words at characters outside ``keep``."""
    out = Counter()
    for symbols, n in words.items():
        run = []
        for c in symbols:
            if c in keep:
                run.append(c)
            elif run:
                out["".join(run)] += n
                run = []
        if run:
            out["".join(run)] += n
    return out


def _seed_pieces(strings, chars, config):
    subs = Counter()
    max_len = config.max_piece_length
    for text, n in strings.items():
        for i in range(len(text)):
            for j in range(i + 2, min(len(text), i + max_len) + 1):
                piece = text[i:j]
                if config.marker and config.marker in piece[1:]:
                    continue
                if is_mergeable(piece, config.split_digits):
                    subs[piece] += n
    room = max(0, config.effective_seed_vocab_size - len(chars))
    best = sorted(subs.items(), key=lambda kv: (-kv[1], kv[0]))[:room]
    freq = dict(chars)
    freq.update(best)
    total = sum(freq.values())
    return {p: math.log(n / total) for p, n in freq.items()}


def _normalize(logprobs):
    z = NEG_INF
    for lp in logprobs.values():
        z = _logaddexp(z, lp)
    return {p: lp - z for p, lp in logprobs.items()}


class _Without:
    """A read-only view of a piece table with one piece hidden."""
    def __init__(self, logprobs, piece):
        self.logprobs = logprobs
        self.piece = piece

    def get(self, key, default=None):
        if key == self.piece:
            return default
        return self.logprobs.get(key, default)


def _pruning_losses(logprobs, strings, max_len):
    vfreq = Counter()
    for text, n in strings.items():
        for piece in viterbi_segment(text, logprobs, max_len):
            vfreq[piece] += n
    losses = {}
    for piece, lp in logprobs.items():
        if len(piece) == 1:
            continue
        if vfreq[piece] == 0:
            losses[piece] = 0.0
            continue
        alt = viterbi_segment(piece, _Without(logprobs, piece), max_len)
        losses[piece] = vfreq[piece] * (lp - sum(logprobs[q] for q in alt))
    return losses


def train_unigram(lines, config=None):
    """
    Train a Unigram model.

    Returns
    -------
    model : UnigramModel

    Raises
    ------
    TrainingError
        ``vocab_size`` cannot hold every covered character (plus the
        byte pieces when byte fallback is on).
    """
    if config is None:
        config = SubwordTrainConfig(model_type=ModelType.UNIGRAM)
    words = prepare_words(config.training_lines(lines), config.marker,
                          config.split_digits)
    counts = char_counts(words)
    keep = covered_chars(counts, config.character_coverage, config.marker) \
        if counts else set()
    chars = {c: n for c, n in counts.items() if c in keep}
    budget = config.vocab_size - (len(BYTE_PIECES) if config.byte_fallback else 0)
    if budget < len(chars):
        raise TrainingError("vocab_size %d cannot hold %d characters%s"
                            % (config.vocab_size, len(chars),
                               " and 256 byte pieces" if config.byte_fallback else ""))
    strings = _training_strings(words, keep)
    if not strings:
        return UnigramModel({}, config.marker, config.byte_fallback,
                            config.split_digits)
    logprobs = _seed_pieces(strings, chars, config)
    max_len = config.max_piece_length
    logger.info("Unigram seed vocabulary: %d pieces", len(logprobs))

    progress = tqdm(total=max(0, len(logprobs) - budget), desc="unigram pruning",
                    unit="piece", disable=not logger.isEnabledFor(logging.INFO))
    while True:
        for it in range(config.em_iterations):
            logprobs, loglik = em_step(logprobs, strings, max_len, CHAR_FLOOR)
            logger.debug("EM iteration %d: log-likelihood %.6f, %d pieces",
                         it, loglik, len(logprobs))
        logprobs = {p: lp for p, lp in logprobs.items()
                    if lp != NEG_INF or len(p) == 1}
        if len(logprobs) <= budget:
            break
        removable = sum(1 for p in logprobs if len(p) > 1)
        n_drop = min(len(logprobs) - budget,
                     max(1, int(removable * config.prune_fraction)))
        losses = _pruning_losses(logprobs, strings, max_len)
        drop = sorted(losses, key=lambda p: (losses[p], p))[:n_drop]
        before = len(logprobs)
        for p in drop:
            del logprobs[p]
        logprobs = _normalize(logprobs)
        progress.update(before - len(logprobs))
        logger.debug("Pruned %d pieces, %d left", len(drop), len(logprobs))
    progress.close()

    ordered = dict(sorted(logprobs.items(), key=lambda kv: (-kv[1], kv[0])))
    logger.info("Trained Unigram model with %d pieces", len(ordered))
    return UnigramModel(ordered, config.marker, config.byte_fallback,
                        config.split_digits)

######################################################################


def _encode_word(model, word, on_unknown):
    out = []
    for run, fallback in model.runs(word, on_unknown):
        if run is None:
            out.extend(fallback)
        else:
            out.extend(viterbi_segment(run, model.pieces, model.max_piece_length))
    return out


def encode_unigram_viterbi(model, text, on_unknown="unk"):
    """
    Segment text with the most probable pieces.

    Parameters
    ----------
    model : UnigramModel

    text : str

    on_unknown : {"unk", "error"}
        What to do with a character no piece covers when byte fallback is
        off: emit ``<unk>`` or raise SegmentationError.

    Returns
    -------
    pieces : list of str
    """
    cache = model._word_cache
    pieces = []
    for word in text.split():
        key = (word, on_unknown)
        seg = cache.get(key)
        if seg is None:
            seg = cache.put(key, tuple(_encode_word(model, word, on_unknown)))
        pieces.extend(seg)
    return pieces


def sample_unigram(model, text, alpha=1.0, seed=None, rng=None, on_unknown="unk"):
    """
    Sample a segmentation of text.

    Larger ``alpha`` concentrates the draws on the Viterbi segmentation.
    The result is a pure function of the inputs and ``seed``.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive, got %r" % alpha)
    if rng is None:
        rng = np.random.default_rng(seed)
    pieces = []
    for word in text.split():
        for run, fallback in model.runs(word, on_unknown):
            if run is None:
                pieces.extend(fallback)
            else:
                pieces.extend(sample_segment(run, model.pieces, alpha, rng,
                                             model.max_piece_length))
    return pieces
