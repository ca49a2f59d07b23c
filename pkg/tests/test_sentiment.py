import itertools
import re

import pytest
from hypothesis import given, settings, strategies as st

from eventlens import sentiment as S
from eventlens.corpus import Corpus, record_from_dict

LEX = S.SentimentLexicon(
    entries={"great": 3, "good": 2, "awful": -4, "bad": -2, "hass*": -4, "love": 3},
    boosters={"very": 1, "slightly": -1},
    negators=frozenset({"not", "never"}),
    emoticons={":)": 2, ":(": -2},
)
EMO = S.EmotionLexicon({
    "abandon": frozenset({"fear", "sadness"}),
    "happy": frozenset({"joy", "trust"}),
    "joy": frozenset({"joy"}),
    "smile": frozenset({"joy"}),
    "trust": frozenset({"trust"}),
    "threat": frozenset({"anger", "fear"}),
})


# categories -------------------------------------------------------------------

# written out by hand, independent of the implementation
DECISION_TABLE = {}
for p in range(1, 6):
    for n in range(-5, 0):
        if p == 1 and n == -1:
            DECISION_TABLE[(p, n)] = "Neutral"
        elif p >= 2 and n == -1:
            DECISION_TABLE[(p, n)] = "Positive"
        elif p == 1 and n <= -2:
            DECISION_TABLE[(p, n)] = "Negative"
        else:
            DECISION_TABLE[(p, n)] = "Overlap"


def test_decision_table_exhaustive():
    assert len(DECISION_TABLE) == 25
    for (p, n), want in DECISION_TABLE.items():
        assert S.categorize_polarity(S.SentimentScore(p, n)).value == want


def test_category_examples():
    assert S.categorize_polarity(S.SentimentScore(1, -1)) is S.PolarityCategory.NEUTRAL
    assert S.categorize_polarity(S.SentimentScore(4, -1)) is S.PolarityCategory.POSITIVE
    assert S.categorize_polarity(S.SentimentScore(3, -4)) is S.PolarityCategory.OVERLAP


@pytest.mark.parametrize("p,n", [(0, -1), (1, 0), (6, -1), (1, -6)])
def test_score_bounds(p, n):
    with pytest.raises(ValueError):
        S.SentimentScore(p, n)


# polarity rules ---------------------------------------------------------------------

@pytest.mark.parametrize("text,expected", [
    ("nothing to see here", (1, -1)),
    ("great great day", (3, -1)),
    ("not great", (1, -2)),
    ("not bad", (1, -1)),
    ("very good", (3, -1)),
    ("slightly good", (2, -1)),
    ("slightly awful", (1, -3)),
    ("very great", (4, -1)),
    ("greaaat", (4, -1)),
    ("never very great", (1, -3)),
    ("good. awful!", (2, -4)),
    ("hassen", (1, -4)),
    ("fine :)", (2, -1)),
    ("fine :( ok", (1, -2)),
    ("not at all great", (3, -1)),
])
def test_rule_traces(text, expected):
    s = S.score_polarity(text, LEX)
    assert (s.positive, s.negative) == expected


def test_negation_does_not_cross_sentences():
    assert S.score_polarity("not. great", LEX).positive == 3


def test_magnitude_clamped():
    lex = S.SentimentLexicon({"superb": 5}, boosters={"very": 1})
    assert S.score_polarity("very superrrb", lex).positive == 5


def test_lexicon_rejects_weak_entries():
    for bad in (-1, 0, 1, 6):
        with pytest.raises(S.LexiconError):
            S.SentimentLexicon({"x": bad})
    with pytest.raises(S.LexiconError):
        S.SentimentLexicon({"x": 2}, boosters={"very": 2})


def test_lexicon_file_sections(tmp_path):
    p = tmp_path / "lex.tsv"
    p.write_text("// comment\n[terms]\nGood\t2\nhass*\t-4\n[boosters]\nsehr\t1\n[negators]\nnicht\n"
                 "[emoticons]\n:-)\t2\n", encoding="utf-8")
    lex = S.SentimentLexicon.load(p)
    assert lex.entries == {"good": 2, "hass*": -4}
    assert lex.negators == frozenset({"nicht"})
    s = S.score_polarity("nicht sehr good :-)", lex)
    assert (s.positive, s.negative) == (2, -2)


def test_lexicon_file_errors(tmp_path):
    p = tmp_path / "lex.tsv"
    p.write_text("[weird]\nx\t2\n", encoding="utf-8")
    with pytest.raises(S.LexiconError):
        S.SentimentLexicon.load(p)
    p.write_text("x\ttwo\n", encoding="utf-8")
    with pytest.raises(S.LexiconError):
        S.SentimentLexicon.load(p)


WORDS = ["great", "good", "awful", "bad", "love", "very", "slightly", "not", "never", "the", "day",
         "greaaat", "hassen", ":)", ":(", ".", "!", "?", "ok"]
text_st = st.lists(st.sampled_from(WORDS), max_size=15).map(" ".join)


@settings(max_examples=1000)
@given(text_st, st.sampled_from(["great", "good", "love", ":)"]))
def test_positive_evidence_monotone(text, term):
    before = S.score_polarity(text, LEX)
    after = S.score_polarity(text + " " + term, LEX)
    assert after.positive >= before.positive


@given(text_st)
def test_scores_in_range_and_deterministic(text):
    a = S.score_polarity(text, LEX)
    assert 1 <= a.positive <= 5 and -5 <= a.negative <= -1
    assert S.score_polarity(text, LEX) == a


# emotions --------------------------------------------------------------------------

def scan_oracle(text, lexicon):
    counts = dict.fromkeys(S.EMOTIONS, 0)
    for tok in re.split(r"\W+", text):
        if not tok:
            continue
        for e in S.EMOTIONS:
            if e in lexicon.entries.get(tok.lower(), ()):
                counts[e] += 1
    return counts


def test_emotion_examples():
    assert S.emotion_vector("", EMO).counts == (0,) * 8
    v = S.emotion_vector("abandon abandon", EMO)
    assert v.to_dict() == {**dict.fromkeys(S.EMOTIONS, 0), "fear": 2, "sadness": 2}
    v = S.emotion_vector("Joy, smile and joy! I trust you", EMO)
    assert v["joy"] == 3 and v["trust"] == 1 and sum(v.counts) == 4


def test_emotion_fixture_against_scan():
    import random

    rnd = random.Random(5)
    vocab = list(EMO.entries) + ["the", "a", "day", "Happy", "THREAT", "x1"]
    for _ in range(200):
        text = " ".join(rnd.choice(vocab) for _ in range(rnd.randint(0, 12)))
        text = text.replace(" a ", ", a! ")
        assert S.emotion_vector(text, EMO).to_dict() == scan_oracle(text, EMO)


emo_text = st.lists(st.sampled_from(list(EMO.entries) + ["the", "day", "ok"]), max_size=12).map(" ".join)


@settings(max_examples=1000)
@given(emo_text, emo_text)
def test_emotion_additivity(a, b):
    assert S.emotion_vector(a + " " + b, EMO) == S.emotion_vector(a, EMO) + S.emotion_vector(b, EMO)


@given(emo_text)
def test_emotion_counts_bounded_by_tokens(text):
    v = S.emotion_vector(text, EMO)
    n_tokens = len(text.split())
    assert all(0 <= c <= n_tokens for c in v.counts)


@given(st.lists(emo_text, max_size=10))
def test_aggregate_equals_sum(texts):
    vectors = [S.emotion_vector(t, EMO) for t in texts]
    total = S.total_emotions(vectors)
    for i, e in enumerate(S.EMOTIONS):
        assert total.counts[i] == sum(v[e] for v in vectors)


def test_emotion_file_format(tmp_path):
    p = tmp_path / "emo.txt"
    p.write_text("abandon\tfear\t1\nabandon\tjoy\t0\nabandon\tnegative\t1\n", encoding="utf-8")
    lex = S.EmotionLexicon.load(p)
    assert lex.entries == {"abandon": frozenset({"fear"})}
    assert lex.polarity == {"abandon": frozenset({"negative"})}
    p.write_text("abandon\thunger\t1\n", encoding="utf-8")
    with pytest.raises(S.LexiconError):
        S.EmotionLexicon.load(p)


# records and targets ------------------------------------------------------------------

def corpus(texts, lang="en"):
    return Corpus([record_from_dict({"id": str(i), "author": f"u{i}", "ts": 1479600000 + i,
                                     "text": t, "lang": lang}) for i, t in enumerate(texts)])


def test_bundled_resources_cover_both_languages():
    res = S.Resources.bundled()
    assert set(res.sentiment) == {"de", "en"} == set(res.emotion)
    de = corpus(["Das ist nicht gut"], lang="de").records[0]
    assert S.score_record(de, res).category is S.PolarityCategory.NEGATIVE


def test_unsupported_language_flagged():
    res = S.Resources.bundled()
    r = corpus(["great great"], lang="fr").records[0]
    out = S.score_record(r, res)
    assert out.unsupported_language
    assert (out.score.positive, out.score.negative) == (1, -1) and sum(out.emotions.counts) == 0


def test_sentiment_toward_no_match():
    res = S.Resources.bundled()
    assert S.sentiment_toward(corpus(["hello", "world"]), ["Hofer"], res) == []


def test_sentiment_toward_selects_matching_records():
    res = S.Resources.bundled()
    texts = ["Hofer is great", "hello", "#hofer wins", "@NorbertHofer hi", "Hoferei is a place",
             "bad day", "I hate Hofer", "nothing", "Hofers cousin", "vdb is good"]
    c = corpus(texts)
    pats = ["Hofer", "#hofer", "@norberthofer"]
    rx = [re.compile(r"(?<![\w@#])" + re.escape(p) + r"(?!\w)", re.I) for p in pats]
    expected = [r.key for r in c.records if any(x.search(r.text) for x in rx)]
    got = S.sentiment_toward(c, pats, res)
    assert [g.key for g in got] == expected
    assert len(got) == 4


def test_sentiment_toward_flags_ambiguous():
    res = S.Resources.bundled()
    c = corpus(["Hofer and Van der Bellen debate", "Hofer alone"])
    got = S.sentiment_toward(c, ["Hofer"], res, others=[["Van der Bellen"]])
    assert [g.ambiguous for g in got] == [True, False]


def test_empty_target_rejected():
    with pytest.raises(ValueError):
        S.compile_patterns([])
