import pytest

from mtprep.cleaning import (COPY_STAGE, DEDUP_STAGE, EMPTY_STAGE, LENGTH_STAGE,
                             SCORE_STAGE, TOKENIZE_SOURCE_STAGE,
                             TOKENIZE_TARGET_STAGE, DedupKey, FilterConfig,
                             FilterLedger, LengthUnit, dedup_pairs, filter_length,
                             filter_score, keeps_length, remove_empty,
                             remove_source_copies, run_pipeline)
from mtprep.corpus import ParallelCorpus, SentencePair
from mtprep.errors import ConfigError
from mtprep.pretokenize import INTL13A

from .utils import make_rng


def corpus(*pairs):
    return ParallelCorpus(tuple(SentencePair(*p) for p in pairs))


def test_remove_empty():
    assert list(remove_empty(corpus(("a", "x"), ("", "y")))) == [("a", "x", None)]
    assert len(remove_empty(corpus((" ", "y")))) == 0
    clean = corpus(("a", "x"), ("b", "y"))
    assert remove_empty(clean).pairs == clean.pairs


def test_remove_empty_does_not_trim_survivors():
    assert remove_empty(corpus((" a ", "x\t"))).pairs[0] == (" a ", "x\t", None)


def test_dedup_keys():
    c = corpus(("a", "x"), ("a", "x"), ("b", "y"))
    assert [p[:2] for p in dedup_pairs(c)] == [("a", "x"), ("b", "y")]
    c = corpus(("a", "x"), ("a", "z"))
    assert len(dedup_pairs(c, DedupKey.PAIR)) == 2
    assert [p[:2] for p in dedup_pairs(c, DedupKey.SOURCE)] == [("a", "x")]
    assert [p[:2] for p in dedup_pairs(c, DedupKey.TARGET)] == [("a", "x"), ("a", "z")]


def test_dedup_injected_duplicates():
    rng = make_rng(11)
    pairs = [("s%d" % i, "t%d" % i) for i in range(963)]
    for _ in range(37):
        pairs.insert(rng.randrange(len(pairs) + 1), rng.choice(pairs[:963]))
    out = dedup_pairs(corpus(*pairs))
    assert len(out) == 963
    seen = set()
    expected = [p for p in pairs if not (p in seen or seen.add(p))]
    assert [p[:2] for p in out] == expected


def test_remove_source_copies():
    assert len(remove_source_copies(corpus(("hello", "hello")))) == 0
    assert len(remove_source_copies(corpus(("Hello", "hello")))) == 1
    mixed = corpus(*[("s%d" % i, "t%d" % i) for i in range(8)],
                   ("x", "x"), ("y ", "y"))
    assert len(remove_source_copies(mixed)) == 8


def test_filter_length():
    ten = " ".join("w" * 10)
    hundred = " ".join("w" * 100)
    assert len(filter_length(corpus((ten, ten)), 200, max_ratio=9)) == 1
    assert len(filter_length(corpus((ten, hundred)), 200, max_ratio=9)) == 0
    assert len(filter_length(corpus((hundred, hundred)), 50)) == 0
    assert len(filter_length(corpus(("abc", "abcdef")), 10,
                             LengthUnit.CHARACTERS, max_ratio=1.5)) == 0


def test_filter_length_matches_predicate():
    rng = make_rng(5)
    pairs = [(" ".join("a" * rng.randint(0, 30)), " ".join("b" * rng.randint(0, 30)))
             for _ in range(300)]
    c = corpus(*pairs)
    out = filter_length(c, 20, LengthUnit.WHITESPACE_TOKENS, 3.0)
    expected = []
    for s, t in pairs:
        ls, lt = len(s.split()), len(t.split())
        if 0 < min(ls, lt) and max(ls, lt) <= 20 and max(ls, lt) / min(ls, lt) <= 3.0:
            expected.append((s, t))
    assert [p[:2] for p in out] == expected
    assert all(keeps_length(p, 20, LengthUnit.WHITESPACE_TOKENS, 3.0) for p in out)


def test_filter_score():
    c = corpus(("a", "x", 0.65), ("b", "y", 0.71), ("c", "z"), ("d", "w", 0.7))
    assert [p.source for p in filter_score(c, 0.7)] == ["b", "c"]


def test_filter_config_validation():
    with pytest.raises(ConfigError):
        FilterConfig(max_ratio=0.5)
    with pytest.raises(ConfigError):
        FilterConfig(score_threshold=1.5)
    with pytest.raises(ConfigError):
        filter_length(corpus(("a", "b")), max_ratio=0.9)


def test_ledger_render_matches_printout():
    ledger = FilterLedger(initial_rows=10120013)
    ledger.record(EMPTY_STAGE, 10120013)
    ledger.record(TOKENIZE_SOURCE_STAGE, 10120013)
    ledger.record(TOKENIZE_TARGET_STAGE, 10120013)
    ledger.record(DEDUP_STAGE, 8800926)
    ledger.record(COPY_STAGE, 8800780)
    ledger.record(LENGTH_STAGE, 3350814)
    ledger.record(EMPTY_STAGE, 3350814)
    assert ledger.render() == [
        "Dataframe shape (rows, columns): (10120013, 2)",
        "--- Rows with Empty Cells Deleted      --> Rows: 10120013",
        "--- Tokenizing the Source Complete     --> Rows: 10120013",
        "--- Tokenizing the Target Complete     --> Rows: 10120013",
        "--- Duplicates Deleted                 --> Rows: 8800926",
        "--- Source-Copied Rows Deleted         --> Rows: 8800780",
        "--- Too-Long Source/Target Deleted     --> Rows: 3350814",
        "--- Rows with Empty Cells Deleted      --> Rows: 3350814",
    ]


def test_ledger_rejects_increase():
    ledger = FilterLedger(initial_rows=5)
    ledger.record(EMPTY_STAGE, 4)
    with pytest.raises(ValueError):
        ledger.record(DEDUP_STAGE, 5)


def test_ledger_report_roundtrip(tmp_path):
    ledger = FilterLedger(initial_rows=9)
    ledger.record(SCORE_STAGE, 7)
    ledger.record(EMPTY_STAGE, 6)
    ledger.write(tmp_path / "ledger.tsv")
    lines = (tmp_path / "ledger.tsv").read_text(encoding="utf-8").splitlines()
    assert lines[0] == "#mtprep-ledger v1"
    assert lines[2] == "%s\t7" % SCORE_STAGE
    back = FilterLedger.read(tmp_path / "ledger.tsv")
    assert back == ledger


def dirty_corpus(rng, n=60):
    words = ["a", "b", "c", "hello", "猫", "x", " ", ""]
    pairs = []
    for _ in range(n):
        s = " ".join(rng.choice(words) for _ in range(rng.randint(0, 4)))
        t = s if rng.random() < 0.1 else \
            " ".join(rng.choice(words) for _ in range(rng.randint(0, 12)))
        score = rng.choice([None, round(rng.random(), 2)])
        pairs.append(SentencePair(s, t, score))
        if rng.random() < 0.2:
            pairs.append(pairs[rng.randrange(len(pairs))])
    return ParallelCorpus(tuple(pairs))


@pytest.mark.parametrize("seed", range(100))
def test_pipeline_idempotent_and_monotone(seed):
    rng = make_rng(seed)
    c = dirty_corpus(rng)
    config = FilterConfig(max_length=8, max_ratio=3.0,
                          score_threshold=rng.choice([None, 0.3]))
    once, ledger = run_pipeline(c, config)
    counts = [ledger.initial_rows] + [n for _, n in ledger.stages]
    assert counts == sorted(counts, reverse=True)
    assert ledger.final_rows == len(once)

    twice, second = run_pipeline(once, config)
    assert twice.pairs == once.pairs
    assert all(n == len(once) for _, n in second.stages)
    originals = set(c.pairs)
    assert all(p in originals for p in once)


def test_pipeline_is_composition():
    c = dirty_corpus(make_rng(99), 200)
    config = FilterConfig(max_length=8, max_ratio=3.0, score_threshold=0.3)
    out, ledger = run_pipeline(c, config)
    manual = filter_score(c, 0.3)
    manual = remove_empty(manual)
    manual = dedup_pairs(manual)
    manual = remove_source_copies(manual)
    manual = filter_length(manual, 8, LengthUnit.WHITESPACE_TOKENS, 3.0)
    manual = remove_empty(manual)
    assert out.pairs == manual.pairs
    assert [name for name, _ in ledger.stages] == [
        SCORE_STAGE, EMPTY_STAGE, DEDUP_STAGE, COPY_STAGE, LENGTH_STAGE, EMPTY_STAGE]


def test_clean_corpus_flat_ledger():
    c = corpus(("a b", "x y"), ("c", "z"))
    out, ledger = run_pipeline(c)
    assert out.pairs == c.pairs
    assert all(n == 2 for _, n in ledger.stages)


def test_pipeline_tokenizing_stages():
    c = corpus(("Hello, world!", "Bonjour, monde!"), ("Hi!", "Salut!"))
    config = FilterConfig(pretokenize_source=INTL13A, pretokenize_target=INTL13A)
    out, ledger = run_pipeline(c, config)
    assert [name for name, _ in ledger.stages][1:3] == [
        TOKENIZE_SOURCE_STAGE, TOKENIZE_TARGET_STAGE]
    assert out[0].source == "Hello , world !"
    assert out[1].target == "Salut !"
