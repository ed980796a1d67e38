from collections import Counter

import pytest

from mtprep.errors import TrainingError
from mtprep.subword import (BpeModel, ModelType, SubwordTrainConfig, decode_pieces,
                            encode_bpe, is_byte_piece, normalize_ws,
                            prepare_words, train_bpe)

from mtprep.subword.words import WordCache, sample_sentences

from .utils import make_rng, random_line, random_unicode

M = "▁"


def config(vocab_size, **kwargs):
    return SubwordTrainConfig(model_type=ModelType.BPE, vocab_size=vocab_size, **kwargs)


def merge(seq, pair):
    out, i = [], 0
    while i < len(seq):
        if i + 1 < len(seq) and (seq[i], seq[i + 1]) == pair:
            out.append(seq[i] + seq[i + 1])
            i += 2
        else:
            out.append(seq[i])
            i += 1
    return out


def oracle_merges(lines, vocab_size, split_digits=False):
    """Recount every pair from scratch before each merge."""
    words = Counter()
    for line in lines:
        for w in line.split():
            words[(M,) + tuple(w)] += 1
    seqs = {w: list(w) for w in words}
    have = {c for w in words for c in w}
    merges = []
    while len(have) < vocab_size:
        counts = Counter()
        for w, n in words.items():
            s = seqs[w]
            for a, b in zip(s, s[1:]):
                if split_digits and any(c.isdecimal() for c in a + b):
                    continue
                counts[(a, b)] += n
        if not counts:
            break
        best = min(counts, key=lambda p: (-counts[p], p))
        if counts[best] < 2:
            break
        merges.append(best)
        have.add(best[0] + best[1])
        seqs = {w: merge(s, best) for w, s in seqs.items()}
    return merges


def test_prepare_words():
    assert prepare_words(["ab ab abc"]) == Counter({(M, "a", "b"): 2,
                                                   (M, "a", "b", "c"): 1})
    assert prepare_words([""]) == Counter()
    assert prepare_words(["a12"], split_digits=True) == Counter({(M, "a", "1", "2"): 1})
    assert prepare_words(["a▁b ▁"]) == Counter({(M, "a"): 1, ("b",): 1, (M,): 1})


def test_train_worked_example():
    model = train_bpe(["ab ab abc"], config(6))
    assert model.merges == (("a", "b"), (M, "ab"))
    assert [p for p, _ in model.vocab] == ["a", "b", M, "c", "ab", M + "ab"]
    # No pair occurs twice after that.
    assert train_bpe(["ab ab abc"], config(100)).merges == model.merges


def test_zero_merges():
    model = train_bpe(["ab ab abc"], config(4))
    assert model.merges == ()
    assert encode_bpe(model, "abc") == [M, "a", "b", "c"]


def test_vocab_too_small():
    with pytest.raises(TrainingError):
        train_bpe(["ab ab abc"], config(3))
    with pytest.raises(TrainingError):
        train_bpe(["ab ab abc"], config(100, byte_fallback=True))


def worked_model():
    return BpeModel(merges=(("a", "b"), (M, "ab")),
                    vocab=((M, 3), ("a", 3), ("b", 3), ("c", 1), ("ab", 3), (M + "ab", 3)))


def test_encode_examples():
    model = worked_model()
    assert encode_bpe(model, "ab") == [M + "ab"]
    assert encode_bpe(model, "abc") == [M + "ab", "c"]
    assert encode_bpe(model, "abc", dropout_p=1.0, seed=1) == [M, "a", "b", "c"]


def test_unknown_characters():
    model = worked_model()
    assert encode_bpe(model, "abz") == [M + "ab", "z"]
    fallback = BpeModel(model.merges, model.vocab, byte_fallback=True)
    assert encode_bpe(fallback, "abé") == [M + "ab", "<0xC3>", "<0xA9>"]


def test_dropout_range():
    with pytest.raises(ValueError):
        encode_bpe(worked_model(), "ab", dropout_p=1.5)


@pytest.mark.parametrize("seed", range(50))
def test_merges_match_oracle(seed):
    rng = make_rng(seed)
    alphabet = "abcdefgh"[:rng.randint(2, 8)]
    if seed % 5 == 0:
        alphabet = "ab12"
    lines = [random_line(rng, alphabet, max_words=5, max_len=6)
             for _ in range(rng.randint(1, 6))]
    split_digits = seed % 10 == 0
    base = len({c for line in lines for c in line if not c.isspace()}) + 1
    vocab_size = base + rng.randint(0, 25)
    model = train_bpe(lines, config(vocab_size, split_digits=split_digits))
    assert list(model.merges) == oracle_merges(lines, vocab_size, split_digits)
    assert len(model) <= vocab_size


def test_ties_use_code_point_order():
    # Every pair occurs exactly twice.
    model = train_bpe(["ba ba dc dc"], config(7))
    assert model.merges == tuple(oracle_merges(["ba ba dc dc"], 7))
    assert model.merges[0] == ("b", "a")


def test_merge_order_is_sound():
    rng = make_rng(21)
    lines = [random_line(rng, "abcde", max_words=8) for _ in range(40)]
    model = train_bpe(lines, config(40))
    have = set(model.alphabet)
    for a, b in model.merges:
        assert a in have and b in have
        have.add(a + b)


def test_split_digits_keeps_digits_apart():
    model = train_bpe(["a12 a12 a12 b2021 b2021"], config(30, split_digits=True))
    for piece in model.pieces:
        if len(piece) > 1:
            assert not any(c.isdecimal() for c in piece)
    assert "1" in encode_bpe(model, "a12")


def test_dropout_endpoints():
    rng = make_rng(8)
    lines = [random_line(rng, "abcdef", max_words=8) for _ in range(100)]
    model = train_bpe(lines, config(60))
    for i in range(1000):
        text = random_line(rng, "abcdefg", max_words=3)
        plain = encode_bpe(model, text)
        assert encode_bpe(model, text, dropout_p=0.0, seed=i) == plain
        base = [s for w in text.split() for s in model.base_symbols(w)]
        assert encode_bpe(model, text, dropout_p=1.0, seed=i) == base


def test_dropout_is_seeded_and_lossless():
    rng = make_rng(9)
    lines = [random_line(rng, "abcdef", max_words=8) for _ in range(100)]
    model = train_bpe(lines, config(60))
    text = " ".join(lines[:5])
    first = encode_bpe(model, text, dropout_p=0.3, seed=7)
    assert encode_bpe(model, text, dropout_p=0.3, seed=7) == first
    assert decode_pieces(first) == normalize_ws(text)
    draws = {tuple(encode_bpe(model, text, dropout_p=0.3, seed=s)) for s in range(20)}
    assert len(draws) > 1


def test_byte_fallback_roundtrip():
    rng = make_rng(12)
    lines = [random_line(rng) for _ in range(200)]
    model = train_bpe(lines, config(600, byte_fallback=True))
    assert len(model) <= 600
    assert sum(is_byte_piece(p) for p in model.pieces) == 256
    for _ in range(10000):
        text = random_unicode(rng)
        assert decode_pieces(encode_bpe(model, text)) == normalize_ws(text)


@pytest.mark.parametrize("byte_fallback", [False, True])
def test_literal_marker_roundtrip(byte_fallback):
    model = train_bpe(["ab ab abc"], config(300 if byte_fallback else 6,
                                            byte_fallback=byte_fallback))
    assert encode_bpe(model, "ab▁c") == [M + "ab", "<0xE2>", "<0x96>", "<0x81>", "c"]
    for text in ("a▁b", "▁", "x ▁▁ ab▁", "▁ab"):
        assert decode_pieces(encode_bpe(model, text)) == text
        assert decode_pieces(encode_bpe(model, text, dropout_p=0.5, seed=1)) == text


def test_sample_sentences():
    lines = ["line %d" % i for i in range(50)]
    first = sample_sentences(lines, 10, seed=3)
    assert first == sample_sentences(lines, 10, seed=3)
    assert len(set(first)) == 10 and set(first) <= set(lines)
    assert first != sample_sentences(lines, 10, seed=4)
    assert sample_sentences(iter(lines), None) == lines
    assert sample_sentences(lines, 80) == lines


def test_train_on_sample():
    rng = make_rng(21)
    lines = [random_line(rng, "abcde") for _ in range(100)]
    sampled = train_bpe(lines, config(40, input_sentence_size=30, seed=5))
    assert sampled == train_bpe(sample_sentences(lines, 30, 5), config(40))
    assert sampled == train_bpe(lines, config(40, input_sentence_size=30, seed=5))


def test_word_cache_is_bounded():
    cache = WordCache(maxsize=3)
    for word in "abcd":
        cache.put(word, (word,))
    assert len(cache) == 3
    assert cache.get("a") is None
    assert cache.get("b") == ("b",)
    cache.put("e", ("e",))
    assert cache.get("c") is None
    assert cache.get("b") == ("b",)


def test_encode_cache_stays_bounded():
    model = train_bpe(["ab ab abc"], config(6))
    model._word_cache.maxsize = 5
    for i in range(50):
        encode_bpe(model, "ab%d" % i)
    assert len(model._word_cache) == 5
    assert encode_bpe(model, "ab7") == [M + "ab", "7"]
