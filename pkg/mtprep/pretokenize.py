"""
Rule-based pretokenizers, their detokenizers, a frequency truecaser and a
hook for external tokenizers (Moses, MeCab, ...).

The ``intl13a`` rules are a simplified, documented stand-in for the
mteval-v13a tokenizer, applied in order:

1. collapse whitespace runs to one space;
2. put spaces around every character in ``,.!?;:()[]"「」、。！？``,
   except a period with a digit on both sides;
3. split on spaces.

Detokenizing ``intl13a`` output joins tokens with spaces and then removes
the space before ``,.!?;:)]」、。！？`` and after ``([「``.  Full-width
Japanese punctuation and brackets attach on both sides, and straight
double quotes alternate between opening (attach right) and closing
(attach left).
"""
import enum
import logging
import shlex
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional, Tuple

import regex

from .corpus import read_lines
from .errors import ConfigError, CorpusFormatError, ExternalToolError

logger = logging.getLogger(__name__)


class Kind(enum.Enum):
    NONE = "none"
    WHITESPACE = "whitespace"
    INTL13A = "intl13a"
    CHARACTER = "character"
    UNICODE_SCRIPT = "unicode_script"
    EXTERNAL = "external"


_KIND_ALIASES = {"13a": Kind.INTL13A, "char": Kind.CHARACTER,
                 "script": Kind.UNICODE_SCRIPT, "ws": Kind.WHITESPACE}


@dataclass(frozen=True)
class PretokenizerKind:
    """
    A pretokenizer selection.

    Parameters
    ----------
    kind : Kind
        Which rule set to apply.

    command : str, optional
        The shell-style command line of an external tokenizer.  Required
        when ``kind`` is EXTERNAL.

    batch_size : int
        Lines handed to one external process.

    workers : int
        External batches allowed to run at the same time.

    strict_attach : bool
        intl13a only: detokenize with the bare rule list.  By default
        Japanese punctuation and straight double quotes also attach, which
        lets Japanese and quoted text round-trip.  Spelled
        ``intl13a_strict`` in configuration.
    """
    kind: Kind = Kind.NONE
    command: Optional[str] = None
    batch_size: int = 10000
    workers: int = 1
    strict_attach: bool = False

    def __post_init__(self):
        if self.kind is Kind.EXTERNAL and not (self.command or "").strip():
            raise ConfigError("external pretokenizer needs a command")

    @classmethod
    def parse(cls, text):
        """
        Build a kind from its configuration spelling.

        ``"intl13a"``, ``"13a"``, ``"character"``, ``"unicode_script"``,
        ``"whitespace"``, ``"none"`` or ``"external:<command line>"``.
        """
        text = text.strip()
        if text.startswith("external:"):
            return cls(Kind.EXTERNAL, text[len("external:"):].strip())
        name = text.lower().replace("-", "_")
        if name in ("intl13a_strict", "13a_strict"):
            return cls(Kind.INTL13A, strict_attach=True)
        if name in _KIND_ALIASES:
            return cls(_KIND_ALIASES[name])
        try:
            return cls(Kind(name))
        except ValueError:
            raise ConfigError("unknown pretokenizer %r" % text) from None

    def __str__(self):
        if self.kind is Kind.EXTERNAL:
            return "external:%s" % self.command
        if self.strict_attach:
            return "intl13a_strict"
        return self.kind.value


NONE = PretokenizerKind(Kind.NONE)
WHITESPACE = PretokenizerKind(Kind.WHITESPACE)
INTL13A = PretokenizerKind(Kind.INTL13A)
CHARACTER = PretokenizerKind(Kind.CHARACTER)
UNICODE_SCRIPT = PretokenizerKind(Kind.UNICODE_SCRIPT)

######################################################################

#
# intl13a
#
_PAD_13A = regex.compile(r'(?<!\d)\.|\.(?!\d)|[,!?;:()\[\]"「」、。！？]')
_NO_SPACE_BEFORE = frozenset(',.!?;:)]」、。！？')
_NO_SPACE_AFTER = frozenset('([「')
# Extended attachment: 「 also glues to the token before it and Japanese
# punctuation to the token after it.
_NO_SPACE_BEFORE_EXT = _NO_SPACE_BEFORE | {"「"}
_NO_SPACE_AFTER_EXT = _NO_SPACE_AFTER | frozenset('、。！？」')


def _tokenize_13a(text):
    text = " ".join(text.split())
    return _PAD_13A.sub(r" \g<0> ", text).split()


def _detokenize_13a(tokens, strict=False):
    no_before = _NO_SPACE_BEFORE if strict else _NO_SPACE_BEFORE_EXT
    no_after = _NO_SPACE_AFTER if strict else _NO_SPACE_AFTER_EXT
    out = []
    glue = True          # no space before the next token
    quote_open = False
    for tok in tokens:
        if tok == '"' and not strict:
            if quote_open:
                out.append(tok)
                glue = False
            else:
                if not glue:
                    out.append(" ")
                out.append(tok)
                glue = True
            quote_open = not quote_open
            continue
        if not glue and tok not in no_before:
            out.append(" ")
        out.append(tok)
        glue = tok in no_after
    return "".join(out)

#
# Script classes.
#
LATIN, DIGIT, HAN, HIRAGANA, KATAKANA, OTHER = (
    "Latin", "Digit", "Han", "Hiragana", "Katakana", "Other")

_SCRIPT_RUN = regex.compile(
    r"(?P<Han>\p{Han}+)"
    r"|(?P<Hiragana>\p{Hiragana}+)"
    r"|(?P<Katakana>[\p{Katakana}ー]+)"
    r"|(?P<Latin>\p{Latin}+)"
    r"|(?P<Digit>\d+)"
    r"|(?P<Other>[^\s\p{Han}\p{Hiragana}\p{Katakana}ー\p{Latin}\d]+)")


def script_class(char):
    """The script class of a single character."""
    m = _SCRIPT_RUN.match(char)
    return OTHER if m is None else m.lastgroup


def _tokenize_script(text):
    tokens = []
    for m in _SCRIPT_RUN.finditer(text):
        if m.lastgroup == HAN:
            tokens.extend(m.group())
        else:
            tokens.append(m.group())
    return tokens


_GRAPHEME = regex.compile(r"\X")


def _tokenize_chars(text):
    tokens = []
    for cluster in _GRAPHEME.findall(text):
        if not cluster.isspace():
            # A combining mark can cling to a space; keep the mark only.
            tok = "".join(c for c in cluster if not c.isspace())
            if tok:
                tokens.append(tok)
    return tokens


_SPACED = frozenset((LATIN, DIGIT))


def _detokenize_script(tokens):
    out = []
    prev = None
    for tok in tokens:
        if prev is not None and script_class(prev[-1]) in _SPACED \
                and script_class(tok[0]) in _SPACED:
            out.append(" ")
        out.append(tok)
        prev = tok
    return "".join(out)

######################################################################

#
# External tokenizers.  The command reads lines on stdin and writes exactly
# one tokenized line per input line on stdout.
#

def _run_batch(argv, batch):
    payload = "".join(line + "\n" for line in batch)
    try:
        proc = subprocess.run(argv, input=payload.encode("utf-8"),
                              stdout=subprocess.PIPE, stderr=subprocess.PIPE)
    except OSError as e:
        raise ExternalToolError("cannot run %s: %s" % (argv[0], e)) from e
    if proc.returncode != 0:
        raise ExternalToolError("%s exited with status %d: %s"
                                % (" ".join(argv), proc.returncode,
                                   proc.stderr.decode("utf-8", "replace").strip()))
    out = proc.stdout.decode("utf-8", "replace").split("\n")
    if out and out[-1] == "":
        out.pop()
    if len(out) != len(batch):
        raise ExternalToolError("%s returned %d lines for %d input lines"
                                % (" ".join(argv), len(out), len(batch)))
    return [line.rstrip("\r") for line in out]


def run_external(command, lines, batch_size=10000, workers=1):
    """
    Feed lines through an external tokenizer in batches.

    Parameters
    ----------
    command : str
        Command line, split with shell rules (no shell is started).

    lines : sequence of str
        Input lines, without line breaks.

    batch_size : int
        Lines per subprocess.

    workers : int
        Batches run concurrently; output keeps input order.

    Returns
    -------
    out : list of str
        One output line per input line.
    """
    argv = shlex.split(command)
    lines = list(lines)
    batches = [lines[i:i + batch_size] for i in range(0, len(lines), batch_size)]
    logger.debug("Running %s on %d lines in %d batches", command,
                 len(lines), len(batches))
    if workers > 1 and len(batches) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda b: _run_batch(argv, b), batches))
    else:
        results = [_run_batch(argv, b) for b in batches]
    return [line for batch in results for line in batch]

######################################################################


def pretokenize(text, kind=WHITESPACE):
    """
    Split text into tokens.

    Parameters
    ----------
    text : str
        One segment.

    kind : PretokenizerKind
        The rules to apply.

    Returns
    -------
    tokens : list of str
        Never contains empty tokens.
    """
    k = kind.kind
    if k is Kind.WHITESPACE:
        return text.split()
    if k is Kind.INTL13A:
        return _tokenize_13a(text)
    if k is Kind.CHARACTER:
        return _tokenize_chars(text)
    if k is Kind.UNICODE_SCRIPT:
        return _tokenize_script(text)
    if k is Kind.NONE:
        return [text] if text else []
    return run_external(kind.command, [text], kind.batch_size)[0].split()


def pretokenize_lines(lines, kind=WHITESPACE):
    """Pretokenize many segments; external commands see them in batches."""
    if kind.kind is Kind.EXTERNAL:
        return [line.split() for line in
                run_external(kind.command, lines, kind.batch_size, kind.workers)]
    return [pretokenize(line, kind) for line in lines]


def detokenize(tokens, kind=WHITESPACE):
    """
    Join tokens back into text.

    Script and character tokens carry no spacing information; a single
    space is put back only between two Latin/digit neighbours.
    """
    k = kind.kind
    if k is Kind.INTL13A:
        return _detokenize_13a(tokens, kind.strict_attach)
    if k in (Kind.UNICODE_SCRIPT, Kind.CHARACTER):
        return _detokenize_script(tokens)
    return " ".join(tokens)


class _SimpleLower(dict):
    """Code point -> simple lowercase, filled on demand by str.translate."""
    def __missing__(self, cp):
        # Only U+0130 lowers to two code points; the simple mapping is the first.
        value = self[cp] = chr(cp).lower()[0]
        return value


_SIMPLE_LOWER = _SimpleLower()


def lowercase(text):
    """
    Simple per-code-point lowercasing.

    Unlike ``str.lower`` the result has as many code points as the input
    and no context rule applies: final sigma stays U+03C3.
    """
    return text.translate(_SIMPLE_LOWER)

######################################################################


@dataclass(frozen=True)
class TruecaseModel:
    """
    Preferred surface forms of words.

    Parameters
    ----------
    forms : Mapping
        Lowercased token -> (most frequent surface form, count).
    """
    forms: Mapping[str, Tuple[str, int]] = field(default_factory=dict)

    def __len__(self):
        return len(self.forms)

    def __contains__(self, word):
        return lowercase(word) in self.forms

    def form(self, word):
        entry = self.forms.get(lowercase(word))
        return None if entry is None else entry[0]


def train_truecaser(lines):
    """
    Learn the most frequent casing of every word.

    Only tokens that do not start a sentence are counted.  Ties go to the
    form seen first.
    """
    counts = {}
    for line in lines:
        for tok in line.split()[1:]:
            forms = counts.setdefault(lowercase(tok), {})
            forms[tok] = forms.get(tok, 0) + 1
    model = {}
    for key, forms in counts.items():
        best, best_n = None, 0
        for form, n in forms.items():
            if n > best_n:
                best, best_n = form, n
        model[key] = (best, best_n)
    logger.info("Truecaser learned %d forms", len(model))
    return TruecaseModel(model)


def truecase(text, model):
    """
    Restore casing with a TruecaseModel.

    Known words take their stored form.  An unknown first word gets its
    first character uppercased.
    """
    out = []
    for i, tok in enumerate(text.split()):
        form = model.form(tok)
        if form is not None:
            out.append(form)
        elif i == 0:
            out.append(tok[:1].upper() + tok[1:])
        else:
            out.append(tok)
    return " ".join(out)


def save_truecaser(model, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fp:
        fp.write("#mtprep-truecase v1\n")
        for key, (form, n) in model.forms.items():
            fp.write("%s\t%s\t%d\n" % (key, form, n))


def load_truecaser(path):
    lines = read_lines(path)
    if not lines or lines[0] != "#mtprep-truecase v1":
        raise CorpusFormatError("not a truecase model", path, 1)
    forms = {}
    for lineno, line in enumerate(lines[1:], 2):
        fields = line.split("\t")
        if len(fields) != 3:
            raise CorpusFormatError("expected 3 fields, got %d" % len(fields),
                                    path, lineno)
        forms[fields[0]] = (fields[1], int(fields[2]))
    return TruecaseModel(forms)
