"""
Vocabularies: export for NMT frameworks, reading them back, and OOV
rates.

``framework_tokens`` files hold one piece per line in model order.  The
reserved ``<unk>``, ``<s>`` and ``</s>`` are left out unless asked for,
since the consuming framework adds its own.  ``piece_logprob`` files hold
``piece<TAB>score`` lines: the log-probability for Unigram pieces, the
negated merge rank (``-index``) for BPE pieces, and 0 for byte pieces.
"""
import enum
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Tuple

from ..corpus import read_lines, write_lines
from ..errors import CorpusFormatError
from .pieces import BYTE_PIECES, SPECIALS, is_byte_piece
from .words import ModelType

logger = logging.getLogger(__name__)


class VocabFormat(enum.Enum):
    FRAMEWORK_TOKENS = "framework_tokens"
    PIECE_LOGPROB = "piece_logprob"


@dataclass(frozen=True)
class Vocabulary:
    """
    An ordered token list with one score per token.

    Parameters
    ----------
    tokens : tuple of str

    scores : tuple of float
        Log-probabilities, negated ranks or frequencies, depending on
        where the vocabulary came from.
    """
    tokens: Tuple[str, ...]
    scores: Tuple[float, ...] = ()

    @cached_property
    def _index(self):
        return frozenset(self.tokens)

    def __contains__(self, token):
        return token in self._index

    def __len__(self):
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)

    def table(self):
        """Token -> score, without byte pieces and reserved tokens."""
        return {t: s for t, s in zip(self.tokens, self.scores)
                if not is_byte_piece(t) and t not in SPECIALS}


def vocabulary(model):
    """The Vocabulary of a trained BpeModel or UnigramModel."""
    if model.model_type is ModelType.BPE:
        tokens = [p for p, _ in model.vocab]
        scores = [-float(i) for i in range(len(tokens))]
    else:
        tokens = list(model.pieces)
        scores = list(model.pieces.values())
    if model.byte_fallback:
        tokens.extend(BYTE_PIECES)
        scores.extend([0.0] * len(BYTE_PIECES))
    return Vocabulary(tuple(tokens), tuple(scores))


def export_vocab(model, path, format=VocabFormat.FRAMEWORK_TOKENS,
                 include_specials=False):
    """
    Write a model's vocabulary.

    Parameters
    ----------
    model : BpeModel or UnigramModel

    path : str or Path

    format : VocabFormat

    include_specials : bool
        Put ``<unk>``, ``<s>``, ``</s>`` first.
    """
    vocab = vocabulary(model)
    entries = list(zip(vocab.tokens, vocab.scores))
    if include_specials:
        entries = [(t, 0.0) for t in SPECIALS] + entries
    if format is VocabFormat.FRAMEWORK_TOKENS:
        write_lines(path, (t for t, _ in entries))
    else:
        write_lines(path, ("%s\t%r" % (t, s) for t, s in entries))
    logger.info("Wrote %d vocabulary entries to %s", len(entries), path)


def read_vocab(path, format=None):
    """
    Read a vocabulary file.

    Without ``format`` the layout is guessed from the first line: a tab
    means ``piece_logprob``.
    """
    lines = read_lines(path)
    if format is None:
        format = VocabFormat.PIECE_LOGPROB if lines and "\t" in lines[0] \
            else VocabFormat.FRAMEWORK_TOKENS
    if format is VocabFormat.FRAMEWORK_TOKENS:
        return Vocabulary(tuple(lines), tuple(0.0 for _ in lines))
    tokens, scores = [], []
    for lineno, line in enumerate(lines, 1):
        token, sep, score = line.rpartition("\t")
        if not sep:
            raise CorpusFormatError("expected piece<TAB>score", path, lineno)
        try:
            scores.append(float(score))
        except ValueError:
            raise CorpusFormatError("bad score %r" % score, path, lineno) from None
        tokens.append(token)
    return Vocabulary(tuple(tokens), tuple(scores))


def oov_rate(lines, vocab):
    """
    Share of whitespace tokens in ``lines`` missing from ``vocab``.

    Returns 0.0 when there are no tokens at all.
    """
    total = missing = 0
    for line in lines:
        for tok in line.split():
            total += 1
            if tok not in vocab:
                missing += 1
    return missing / total if total else 0.0
