"""
Reading and writing subword models.

A model file is UTF-8 text.  The first line is a tab-separated header::

    #mtprep-model v1	model_type=bpe	marker=2581	byte_fallback=1	split_digits=0

(the marker is written as hex code points, empty for no marker) and
every following line is one record:

    BPE       ``symbol<TAB>piece<TAB>freq`` and ``merge<TAB>left<TAB>right<TAB>freq``
    Unigram   ``piece<TAB>piece<TAB>logprob``

Floats are written with ``repr`` so a model reloads bit for bit.
"""
import logging

from ..corpus import read_lines, write_lines
from ..errors import CorpusFormatError
from .bpe import BpeModel
from .unigram import UnigramModel
from .words import ModelType

logger = logging.getLogger(__name__)

MAGIC = "#mtprep-model v1"


def _encode_marker(marker):
    return ",".join("%04X" % ord(c) for c in marker)


def _decode_marker(text):
    return "".join(chr(int(h, 16)) for h in text.split(",") if h)


def model_lines(model):
    header = [MAGIC,
              "model_type=%s" % model.model_type.value,
              "marker=%s" % _encode_marker(model.marker),
              "byte_fallback=%d" % model.byte_fallback,
              "split_digits=%d" % model.split_digits]
    lines = ["\t".join(header)]
    if model.model_type is ModelType.BPE:
        merged = {a + b for a, b in model.merges}
        lines.extend("symbol\t%s\t%d" % (p, n) for p, n in model.vocab
                     if p not in merged)
        freq = dict(model.vocab)
        lines.extend("merge\t%s\t%s\t%d" % (a, b, freq.get(a + b, 0))
                     for a, b in model.merges)
    else:
        lines.extend("piece\t%s\t%r" % (p, lp) for p, lp in model.pieces.items())
    return lines


def save_model(model, path):
    """Write a BpeModel or UnigramModel to ``path``."""
    write_lines(path, model_lines(model))
    logger.info("Saved %s model with %d pieces to %s",
                model.model_type.value, len(model), path)


def load_model(path):
    """
    Read a model written by save_model.

    Raises
    ------
    CorpusFormatError
        The file is not a model file or a record is malformed.
    """
    lines = read_lines(path)
    if not lines or not lines[0].startswith(MAGIC):
        raise CorpusFormatError("not an mtprep model file", path, 1)
    opts = dict(f.split("=", 1) for f in lines[0].split("\t")[1:] if "=" in f)
    try:
        model_type = ModelType(opts["model_type"])
        marker = _decode_marker(opts.get("marker", ""))
        byte_fallback = opts.get("byte_fallback", "0") == "1"
        split_digits = opts.get("split_digits", "0") == "1"
    except (KeyError, ValueError) as e:
        raise CorpusFormatError("bad model header: %s" % e, path, 1) from None

    symbols, merges, vocab_merged, pieces = [], [], [], {}
    seen = set()
    for lineno, line in enumerate(lines[1:], 2):
        fields = line.split("\t")
        try:
            if fields[0] == "symbol" and len(fields) == 3:
                symbols.append((fields[1], int(fields[2])))
            elif fields[0] == "merge" and len(fields) == 4:
                merges.append((fields[1], fields[2]))
                piece = fields[1] + fields[2]
                if piece not in seen:
                    seen.add(piece)
                    vocab_merged.append((piece, int(fields[3])))
            elif fields[0] == "piece" and len(fields) == 3:
                pieces[fields[1]] = float(fields[2])
            else:
                raise ValueError("unknown record %r" % fields[0])
        except ValueError as e:
            raise CorpusFormatError(str(e), path, lineno) from None

    if model_type is ModelType.BPE:
        model = BpeModel(tuple(merges), tuple(symbols + vocab_merged), marker,
                         byte_fallback, split_digits)
    else:
        model = UnigramModel(pieces, marker, byte_fallback, split_digits)
    logger.info("Loaded %s model with %d pieces from %s",
                model_type.value, len(model), path)
    return model
