"""Random text generators shared by the property tests."""
import random

# Mixed scripts, astral characters and combining marks; no line breaks
# and no word-boundary marker.
ALPHABET = ("abcdeABCDE012" "éüß" "猫犬私は好き" "カタ" "😀𝄞" "́" ",.!?")


def make_rng(seed):
    return random.Random(seed)


def random_word(rng, alphabet=ALPHABET, max_len=6):
    return "".join(rng.choice(alphabet) for _ in range(rng.randint(1, max_len)))


def random_line(rng, alphabet=ALPHABET, max_words=6, max_len=6):
    return " ".join(random_word(rng, alphabet, max_len)
                    for _ in range(rng.randint(1, max_words)))


def random_unicode(rng, max_len=12):
    """Arbitrary code points except surrogates; the marker comes up often."""
    out = []
    for _ in range(rng.randint(0, max_len)):
        while True:
            cp = rng.choice((rng.randint(0x20, 0x7E), rng.randint(0xA0, 0xFFFF),
                             rng.randint(0x10000, 0x10FFFF), 0x2581))
            if 0xD800 <= cp <= 0xDFFF:
                continue
            out.append(chr(cp))
            break
    return "".join(out)
