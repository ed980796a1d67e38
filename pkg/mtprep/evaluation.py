"""
Corpus and sentence BLEU with a declared metric-internal tokenization.

Inputs are detokenized plain text.  Both sides are tokenized with the
scheme of a MetricScheme, clipped n-gram matches for n = 1..4 are summed
over the whole corpus, and the score is::

    100 * BP * exp(sum(log p_n) / 4)

An order for which neither side has any n-gram (every line shorter than
n tokens) has precision 1.  An order with reference n-grams but no
hypothesis n-grams has precision 0.  Scores are never rounded except in
``BleuReport.format``.
"""
import enum
import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Tuple

from ._version import get_versions
from .corpus import read_lines, write_lines
from .errors import ConfigError, CorpusFormatError, EvaluationError
from .pretokenize import CHARACTER, INTL13A, pretokenize

logger = logging.getLogger(__name__)

MAX_ORDER = 4
REPORT_HEADER = "#mtprep-bleu v1"


class Scheme(enum.Enum):
    INTL13A = "13a"
    CHAR = "char"
    # Character stand-in for a morphological analyzer; never "ja-mecab".
    JA_CHAR = "ja-char"
    NONE = "none"


class Smoothing(enum.Enum):
    NONE = "none"
    FLOOR = "floor"


@dataclass(frozen=True)
class MetricScheme:
    """
    How BLEU tokenizes and smooths.

    Parameters
    ----------
    scheme : Scheme

    smoothing : Smoothing
        FLOOR replaces a zero match count by ``epsilon``.

    epsilon : float
        Must be positive when smoothing is FLOOR.
    """
    scheme: Scheme = Scheme.INTL13A
    smoothing: Smoothing = Smoothing.NONE
    epsilon: float = 0.1

    def __post_init__(self):
        if self.smoothing is Smoothing.FLOOR and not self.epsilon > 0:
            raise ConfigError("floor smoothing needs epsilon > 0, got %r"
                              % self.epsilon)

    @classmethod
    def parse(cls, scheme="13a", smoothing="none", epsilon=0.1):
        """Build a scheme from its command-line spelling."""
        try:
            scheme = Scheme(scheme.strip().lower().replace("_", "-"))
        except ValueError:
            raise ConfigError("unknown BLEU tokenization %r" % scheme) from None
        try:
            smoothing = Smoothing(smoothing.strip().lower())
        except ValueError:
            raise ConfigError("unknown BLEU smoothing %r" % smoothing) from None
        return cls(scheme, smoothing, float(epsilon))

    @property
    def signature(self):
        smooth = self.smoothing.value
        if self.smoothing is Smoothing.FLOOR:
            smooth += "-%s" % self.epsilon
        return "nrefs:1|tok:%s|smooth:%s|version:%s" % (
            self.scheme.value, smooth, get_versions()["version"])


def metric_tokenize(text, scheme=Scheme.INTL13A):
    """Tokenize one detokenized segment for scoring."""
    if isinstance(scheme, MetricScheme):
        scheme = scheme.scheme
    if scheme is Scheme.INTL13A:
        return pretokenize(text, INTL13A)
    if scheme in (Scheme.CHAR, Scheme.JA_CHAR):
        return pretokenize(text, CHARACTER)
    return text.split()


def ngram_counts(tokens, n):
    """Every contiguous n-gram of ``tokens`` with its multiplicity."""
    if not 1 <= n <= MAX_ORDER:
        raise ValueError("n must be in 1..%d, got %r" % (MAX_ORDER, n))
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def _clipped(hyp, ref, n):
    hyp_counts = ngram_counts(hyp, n)
    ref_counts = ngram_counts(ref, n)
    matches = sum(min(c, ref_counts[g]) for g, c in hyp_counts.items())
    return matches, max(len(hyp) - n + 1, 0), max(len(ref) - n + 1, 0)


def _check_aligned(hyps, refs):
    if len(hyps) != len(refs):
        raise EvaluationError("line-count mismatch: %d hypotheses vs %d references"
                              % (len(hyps), len(refs)))


def modified_precision(hyp_tokens_list, ref_tokens_list, n):
    """
    Clipped n-gram matches and hypothesis n-gram total over a corpus.

    Parameters
    ----------
    hyp_tokens_list, ref_tokens_list : list of list of str
        Sentence-aligned, one reference per hypothesis.

    n : int
        1 to 4.

    Returns
    -------
    (clipped_matches, total) : (int, int)
    """
    _check_aligned(hyp_tokens_list, ref_tokens_list)
    matches = total = 0
    for hyp, ref in zip(hyp_tokens_list, ref_tokens_list):
        m, t, _ = _clipped(hyp, ref, n)
        matches += m
        total += t
    return matches, total


def brevity_penalty(c, r):
    """``min(1, exp(1 - r/c))``; zero for an empty hypothesis."""
    if c < 0 or r < 0:
        raise ValueError("lengths must be non-negative, got c=%r r=%r" % (c, r))
    if c == 0:
        return 0.0
    if c >= r:
        return 1.0
    return math.exp(1.0 - r / c)


@dataclass(frozen=True)
class BleuReport:
    """
    A BLEU score together with everything needed to recompute it.

    ``correct`` and ``total`` hold the clipped matches and hypothesis
    n-gram totals per order; ``precisions`` the (possibly smoothed)
    ratios the score was computed from.
    """
    score: float
    precisions: Tuple[float, ...]
    brevity_penalty: float
    hyp_len: int
    ref_len: int
    signature: str
    correct: Tuple[int, ...] = ()
    total: Tuple[int, ...] = ()

    @property
    def ratio(self):
        return self.hyp_len / self.ref_len if self.ref_len else 0.0

    def format(self):
        """The one-line human summary; the only place scores are rounded."""
        precs = "/".join("%.1f" % (100 * p) for p in self.precisions)
        return ("BLEU = %.1f %s (BP = %.3f, ratio = %.3f, hyp_len = %d, "
                "ref_len = %d) sig:%s" % (self.score, precs, self.brevity_penalty,
                                          self.ratio, self.hyp_len, self.ref_len,
                                          self.signature))

    def __str__(self):
        return self.format()


def _precision(correct, total, ref_total, scheme):
    if total == 0 and ref_total == 0:
        return 1.0
    if correct == 0 and scheme.smoothing is Smoothing.FLOOR:
        # A hypothesis without n-grams of this order counts as one miss.
        return scheme.epsilon / max(total, 1)
    if total == 0:
        return 0.0
    return correct / total


def corpus_bleu(hyp_lines, ref_lines, metric_scheme=None):
    """
    Score a detokenized hypothesis corpus against one reference per line.

    Parameters
    ----------
    hyp_lines, ref_lines : sequence of str

    metric_scheme : MetricScheme, optional
        Defaults to ``13a`` tokenization without smoothing.

    Returns
    -------
    report : BleuReport

    Raises
    ------
    EvaluationError
        The line counts differ or the corpus is empty.
    """
    scheme = metric_scheme or MetricScheme()
    hyp_lines, ref_lines = list(hyp_lines), list(ref_lines)
    _check_aligned(hyp_lines, ref_lines)
    if not hyp_lines:
        raise EvaluationError("cannot score an empty corpus")

    correct = [0] * MAX_ORDER
    total = [0] * MAX_ORDER
    ref_total = [0] * MAX_ORDER
    c = r = 0
    for hyp_line, ref_line in zip(hyp_lines, ref_lines):
        hyp = metric_tokenize(hyp_line, scheme)
        ref = metric_tokenize(ref_line, scheme)
        c += len(hyp)
        r += len(ref)
        for n in range(1, MAX_ORDER + 1):
            m, t, rt = _clipped(hyp, ref, n)
            correct[n - 1] += m
            total[n - 1] += t
            ref_total[n - 1] += rt

    precisions = tuple(_precision(correct[i], total[i], ref_total[i], scheme)
                       for i in range(MAX_ORDER))
    bp = brevity_penalty(c, r)
    if bp == 0.0 or min(precisions) == 0.0:
        score = 0.0
    else:
        score = 100.0 * bp * math.exp(sum(math.log(p) for p in precisions)
                                      / MAX_ORDER)
    report = BleuReport(score, precisions, bp, c, r, scheme.signature,
                        tuple(correct), tuple(total))
    logger.debug("%s", report.format())
    return report


def sentence_bleu(hyp, ref, metric_scheme=None):
    """BLEU of a single segment; floor smoothing is advisable here."""
    return corpus_bleu([hyp], [ref], metric_scheme)

######################################################################


def report_lines(report):
    lines = [REPORT_HEADER,
             "score\t%r" % report.score,
             "precisions\t%s" % ",".join(repr(p) for p in report.precisions),
             "brevity_penalty\t%r" % report.brevity_penalty,
             "hyp_len\t%d" % report.hyp_len,
             "ref_len\t%d" % report.ref_len,
             "correct\t%s" % ",".join(map(str, report.correct)),
             "total\t%s" % ",".join(map(str, report.total)),
             "signature\t%s" % report.signature]
    return lines


def write_report(report, path):
    write_lines(path, report_lines(report))


def _ints(text):
    return tuple(int(v) for v in text.split(",") if v)


def read_report(path):
    """
    Read a report written by write_report.

    Raises
    ------
    CorpusFormatError
        Missing header, key or malformed value.
    """
    lines = read_lines(path)
    if not lines or lines[0] != REPORT_HEADER:
        raise CorpusFormatError("not an mtprep BLEU report", path, 1)
    fields = {}
    for lineno, line in enumerate(lines[1:], 2):
        key, sep, value = line.partition("\t")
        if not sep:
            raise CorpusFormatError("expected key<TAB>value", path, lineno)
        fields[key] = value
    try:
        return BleuReport(
            score=float(fields["score"]),
            precisions=tuple(float(v) for v in fields["precisions"].split(",")),
            brevity_penalty=float(fields["brevity_penalty"]),
            hyp_len=int(fields["hyp_len"]),
            ref_len=int(fields["ref_len"]),
            signature=fields["signature"],
            correct=_ints(fields.get("correct", "")),
            total=_ints(fields.get("total", "")))
    except KeyError as e:
        raise CorpusFormatError("missing key %s" % e, path) from None
    except ValueError as e:
        raise CorpusFormatError(str(e), path) from None


def compare_reports(a, b):
    """
    Score difference ``b - a``.

    Raises
    ------
    EvaluationError
        The reports were computed with different tokenization, smoothing
        or toolkit versions and are not comparable.
    """
    if a.signature != b.signature:
        raise EvaluationError("signatures differ: %s vs %s"
                              % (a.signature, b.signature))
    return b.score - a.score
