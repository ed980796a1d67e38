import pytest

from mtprep.corpus import (SPLIT_PRNG, ParallelCorpus, SentencePair, SplitSpec,
                           concat_corpora, read_lines, read_parallel, read_tsv,
                           split_corpus, split_metadata, write_parallel, write_tsv)
from mtprep.errors import CorpusFormatError

from .utils import make_rng, random_line


def write(path, text):
    path.write_bytes(text.encode("utf-8"))
    return path


def corpus_of(n, name="c", source_lang="src", target_lang="tgt"):
    pairs = [SentencePair("s%d" % i, "t%d" % i) for i in range(n)]
    return ParallelCorpus(tuple(pairs), source_lang, target_lang, name)


def test_read_parallel_aligns_lines(tmp_path):
    src = write(tmp_path / "a.src", "a\nb\n")
    tgt = write(tmp_path / "a.tgt", "x\ny\n")
    corpus = read_parallel(src, tgt)
    assert list(corpus) == [("a", "x", None), ("b", "y", None)]
    assert len(corpus) == 2


def test_read_parallel_line_count_mismatch(tmp_path):
    src = write(tmp_path / "a.src", "a\nb\nc\n")
    tgt = write(tmp_path / "a.tgt", "x\ny\n")
    with pytest.raises(CorpusFormatError, match="line-count mismatch 3 vs 2"):
        read_parallel(src, tgt)


def test_read_parallel_scores(tmp_path):
    src = write(tmp_path / "a.src", "a\n")
    tgt = write(tmp_path / "a.tgt", "x\n")
    scores = write(tmp_path / "a.score", "0.71\n")
    corpus = read_parallel(src, tgt, scores)
    assert corpus[0].score == 0.71
    assert corpus.has_scores


@pytest.mark.parametrize("score", ["1.5", "-0.1", "high"])
def test_read_parallel_rejects_bad_scores(tmp_path, score):
    src = write(tmp_path / "a.src", "a\n")
    tgt = write(tmp_path / "a.tgt", "x\n")
    scores = write(tmp_path / "a.score", score + "\n")
    with pytest.raises(CorpusFormatError) as info:
        read_parallel(src, tgt, scores)
    assert info.value.lineno == 1


def test_invalid_utf8_reports_line(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_bytes(b"ok\n\xff\xfe\n")
    with pytest.raises(CorpusFormatError) as info:
        read_lines(path)
    assert info.value.lineno == 2
    assert str(path) in str(info.value)


def test_embedded_line_break_is_an_error(tmp_path):
    path = write(tmp_path / "ls.txt", "one two\n")
    with pytest.raises(CorpusFormatError, match="U\\+2028"):
        read_lines(path)


def test_crlf_is_accepted(tmp_path):
    path = tmp_path / "crlf.txt"
    path.write_bytes(b"a\r\nb\r\n")
    assert read_lines(path) == ["a", "b"]


def test_read_tsv(tmp_path):
    assert list(read_tsv(write(tmp_path / "p.tsv", "a\tx\n"))) == [("a", "x", None)]
    scored = read_tsv(write(tmp_path / "s.tsv", "a\tx\t0.5\n"), has_score=True)
    assert list(scored) == [("a", "x", 0.5)]


def test_read_tsv_field_count(tmp_path):
    with pytest.raises(CorpusFormatError, match="expected 2 fields, got 1, line 1"):
        read_tsv(write(tmp_path / "bad.tsv", "a\n"))


def test_write_parallel(tmp_path):
    corpus = ParallelCorpus((SentencePair("a", "x"),))
    write_parallel(corpus, tmp_path / "o.src", tmp_path / "o.tgt")
    assert (tmp_path / "o.src").read_bytes() == b"a\n"
    assert (tmp_path / "o.tgt").read_bytes() == b"x\n"


@pytest.mark.parametrize("pair, match", [
    (SentencePair("a\nb", "x"), r"U\+000A"),
    (SentencePair("a", "x\u2028y"), r"U\+2028"),
    (SentencePair("c", "y", 1.7), "outside"),
    (SentencePair("c", "y", -0.1), "outside"),
])
def test_corpus_rejects_broken_pairs(pair, match):
    with pytest.raises(CorpusFormatError, match=match) as info:
        ParallelCorpus((SentencePair("ok", "ok"), pair))
    assert info.value.lineno == 2


def test_write_tsv_rejects_tabs(tmp_path):
    corpus = ParallelCorpus((SentencePair("a\tb", "x"),))
    with pytest.raises(CorpusFormatError, match="tab"):
        write_tsv(corpus, tmp_path / "t.tsv")
    write_parallel(corpus, tmp_path / "t.src", tmp_path / "t.tgt")
    assert read_parallel(tmp_path / "t.src", tmp_path / "t.tgt").pairs == corpus.pairs


def test_empty_corpus_roundtrip(tmp_path):
    write_parallel(ParallelCorpus(), tmp_path / "e.src", tmp_path / "e.tgt")
    assert (tmp_path / "e.src").read_bytes() == b""
    assert (tmp_path / "e.tgt").read_bytes() == b""
    assert len(read_parallel(tmp_path / "e.src", tmp_path / "e.tgt")) == 0


def test_random_roundtrip(tmp_path):
    rng = make_rng(3)
    pairs = tuple(SentencePair(random_line(rng), random_line(rng),
                               rng.choice([None, rng.random()]))
                  for _ in range(1000))
    corpus = ParallelCorpus(pairs)
    write_parallel(corpus, tmp_path / "r.src", tmp_path / "r.tgt", tmp_path / "r.score")
    back = read_parallel(tmp_path / "r.src", tmp_path / "r.tgt", tmp_path / "r.score")
    assert back.pairs == pairs

    write_tsv(corpus, tmp_path / "r.tsv", with_score=True)
    assert read_tsv(tmp_path / "r.tsv", has_score=True).pairs == pairs


def test_concat_corpora():
    a, b = corpus_of(3, "a"), corpus_of(4, "b")
    joined = concat_corpora([a, b])
    assert len(joined) == 7
    assert joined.pairs[:3] == a.pairs
    assert concat_corpora([a]).pairs == a.pairs


def test_concat_language_mismatch():
    with pytest.raises(CorpusFormatError, match="language-tag mismatch"):
        concat_corpora([corpus_of(1, source_lang="en"),
                        corpus_of(1, source_lang="de")])


def test_split_sizes_and_partition():
    corpus = corpus_of(20000)
    train, valid, test = split_corpus(corpus, SplitSpec(5000, 5000, seed=42))
    assert (len(train), len(valid), len(test)) == (10000, 5000, 5000)
    merged = sorted(train.pairs + valid.pairs + test.pairs)
    assert merged == sorted(corpus.pairs)
    for part in (train, valid, test):
        positions = [int(p.source[1:]) for p in part]
        assert positions == sorted(positions)


def test_split_is_deterministic():
    corpus = corpus_of(500)
    first = split_corpus(corpus, SplitSpec(50, 50, seed=7))
    second = split_corpus(corpus, SplitSpec(50, 50, seed=7))
    assert [p.pairs for p in first] == [p.pairs for p in second]
    other = split_corpus(corpus, SplitSpec(50, 50, seed=8))
    assert other[2].pairs != first[2].pairs


def test_split_nothing_held_out():
    corpus = corpus_of(10)
    train, valid, test = split_corpus(corpus, SplitSpec(0, 0, seed=1))
    assert train.pairs == corpus.pairs
    assert len(valid) == len(test) == 0


def test_split_too_large():
    with pytest.raises(CorpusFormatError):
        split_corpus(corpus_of(10), SplitSpec(6, 5, seed=1))


def test_split_metadata_names_prng():
    spec = SplitSpec(1, 1, seed=5)
    lines = split_metadata(spec, *split_corpus(corpus_of(4), spec))
    assert lines[0] == "#mtprep-split v1"
    assert "prng\t%s" % SPLIT_PRNG in lines
    assert "train\t2" in lines
