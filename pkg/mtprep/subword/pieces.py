"""
Byte pieces, reserved tokens and turning pieces back into text.
"""
import re

from .words import DEFAULT_MARKER

UNK = "<unk>"
BOS = "<s>"
EOS = "</s>"
SPECIALS = (UNK, BOS, EOS)

# Rendered in place of <unk> when decoding.
UNK_SURFACE = "⁇"

BYTE_PIECES = tuple("<0x%02X>" % b for b in range(256))
_BYTE_PIECE = re.compile(r"<0x([0-9A-F]{2})>")


def is_byte_piece(piece):
    return _BYTE_PIECE.fullmatch(piece) is not None


def byte_fallback_pieces(char):
    """
    Spell a character as ``<0xHH>`` pieces, one per UTF-8 byte.

    >>> byte_fallback_pieces("é")
    ['<0xC3>', '<0xA9>']
    """
    return ["<0x%02X>" % b for b in char.encode("utf-8")]


def normalize_ws(text):
    """Collapse whitespace runs to single spaces and trim the ends."""
    return " ".join(text.split())


def decode_pieces(pieces, marker=DEFAULT_MARKER):
    """
    Turn a piece sequence back into text.

    Runs of byte pieces are joined and decoded as UTF-8, with U+FFFD for
    invalid sequences.  The marker in a piece becomes a space and the
    leading space is dropped; a marker spelled in byte pieces stays a
    literal marker.
    """
    out = []
    buf = bytearray()
    for piece in pieces:
        m = _BYTE_PIECE.fullmatch(piece)
        if m is not None:
            buf.append(int(m.group(1), 16))
            continue
        if buf:
            out.append(buf.decode("utf-8", "replace"))
            buf = bytearray()
        if piece == UNK:
            out.append(UNK_SURFACE)
        else:
            out.append(piece.replace(marker, " ") if marker else piece)
    if buf:
        out.append(buf.decode("utf-8", "replace"))
    text = "".join(out)
    if marker and text.startswith(" "):
        text = text[1:]
    return text
