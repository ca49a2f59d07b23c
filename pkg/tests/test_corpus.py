import io
import json
from datetime import date, datetime, timedelta, timezone

import pytest
from hypothesis import given, strategies as st

from eventlens import corpus as C
from eventlens import text as T


def rec(author="alice", ts="2016-11-20T10:00:00Z", text="hello #bpw16", **kw):
    obj = {"author": author, "ts": ts, "text": text, **kw}
    return C.record_from_dict(obj)


def jsonl(*objs):
    return "\n".join(json.dumps(o) for o in objs).encode()


# ingestion ------------------------------------------------------------------

def test_ingest_empty_stream():
    c = C.ingest(b"")
    assert len(c) == 0 and c.rejects == []


def test_ingest_sorts_by_timestamp():
    rows = [{"id": str(i), "author": "a", "ts": ts, "text": "x"}
            for i, ts in enumerate(["2016-11-22T00:00:00Z", "2016-11-20T00:00:00Z", "2016-11-21T05:00:00Z"])]
    c = C.ingest(jsonl(*rows))
    got = [r.timestamp for r in c.records]
    assert got == sorted(got)
    assert [r.id for r in c.records] == ["1", "2", "0"]


def test_ingest_collects_malformed_line():
    good = [{"author": f"u{i}", "ts": 1479600000 + i, "text": "t"} for i in range(4)]
    data = jsonl(*good[:2]) + b"\n{not json\n" + jsonl(*good[2:])
    c = C.ingest(data)
    assert len(c) == 4
    assert len(c.rejects) == 1 and c.rejects[0].line == 3


def test_ingest_missing_fields_become_rejects():
    data = jsonl({"author": "a", "ts": "2016-11-20T00:00:00Z"},
                 {"text": "x", "ts": "2016-11-20T00:00:00Z"},
                 {"author": "a", "text": "x"},
                 {"author": "a", "text": "x", "ts": "2016-11-20T00:00:00Z", "rt_count": -1})
    c = C.ingest(data)
    assert len(c) == 0
    assert [r.reason for r in c.rejects][:3] == ["missing text", "missing author", "missing timestamp"]


def test_ingest_invalid_utf8_is_fatal():
    with pytest.raises(C.IngestError):
        C.ingest(b'{"author": "a", "text": "\xff\xfe", "ts": 0}')


def test_ingest_unreadable_path_is_fatal(tmp_path):
    with pytest.raises(C.IngestError):
        C.ingest(tmp_path / "missing.jsonl")


def test_ingest_csv_matches_jsonl():
    csv_data = ("id,author,ts,text,rt_count,like_count,reply_count,lang\n"
                "1,Bob,2016-11-20T01:00:00Z,RT @alice: hi,0,2,,de\n"
                "2,alice,2016-11-20T00:00:00Z,hi there,3,4,1,en\n").encode()
    c = C.ingest(io.BytesIO(csv_data), fmt="csv")
    assert [r.id for r in c.records] == ["2", "1"]
    bob = c.records[1]
    assert bob.is_retweet and bob.reply_count is None and bob.language == "de" and bob.user == "bob"
    assert c.records[0].retweet_count == 3


def test_timestamps_normalised_to_utc_seconds():
    r = rec(ts="2016-11-20T01:30:15.750+01:00")
    assert r.timestamp == datetime(2016, 11, 20, 0, 30, 15, tzinfo=timezone.utc)
    assert rec(ts="2016-11-20 00:00:00").timestamp.tzinfo is not None


def test_retweet_rule():
    assert rec(text="rt @bob: hello").is_retweet
    assert not rec(text="hello RT @bob").is_retweet
    assert rec(text="hello", is_retweet=True).is_retweet


def test_language_guess_when_absent():
    assert rec(text="das ist nicht gut und wir sind hier").language == "de"
    assert rec(text="this is not what we want for the country").language == "en"
    assert rec(text="xyz qqq").language == "other"
    assert rec(text="das ist", lang="fr").language == "other"


def test_jsonl_round_trip(tmp_path):
    c = C.ingest(jsonl({"id": "7", "author": "A", "ts": 1479600000, "text": "hi #vdb", "rt_count": 2,
                        "like_count": 1, "reply_count": 3, "lang": "de", "follower_code": 2}))
    c.write_jsonl(tmp_path / "c.jsonl")
    again = C.ingest(tmp_path / "c.jsonl")
    assert again.records == c.records


# deduplication ----------------------------------------------------------------

def test_dedup_identity_when_unique():
    c = C.Corpus([rec(text=f"t{i}") for i in range(3)])
    d = C.deduplicate(c)
    assert d.records == c.records and d.dedup_removed == 0


def test_dedup_triple_key():
    a = rec(author="Alice", text="same  text")
    b = rec(author="alice", text="same text")
    d = C.deduplicate(C.Corpus([a, b, rec(text="other")]))
    assert len(d) == 2 and d.dedup_removed == 1
    assert d.records[0] is a


def test_dedup_planted_duplicates():
    # 343766 -> 343645 at reduced scale: 2000 records with 121 planted copies
    base = [C.MessageRecord(f"id{i}", f"u{i % 50}", datetime(2016, 11, 20, tzinfo=timezone.utc)
                            + timedelta(seconds=i), f"msg {i}") for i in range(2000 - 121)]
    dups = [base[i * 7] for i in range(121)]
    c = C.Corpus(C.sort_records(base + dups))
    d = C.deduplicate(c)
    assert len(d) == 2000 - 121 and d.dedup_removed == 121
    assert len({r.dedup_key() for r in d.records}) == len(d)


record_st = st.builds(
    lambda i, a, s, t, has_id: C.MessageRecord(
        f"id{i}" if has_id else None, a, datetime(2016, 11, 20, tzinfo=timezone.utc) + timedelta(seconds=s), t),
    st.integers(0, 5), st.sampled_from(["a", "B", "c"]), st.integers(0, 3),
    st.sampled_from(["x", "x ", "#vdb y", "#austria #election", "#austria"]), st.booleans())


@given(st.lists(record_st, max_size=30))
def test_dedup_idempotent_and_conserving(records):
    c = C.Corpus(C.sort_records(records))
    d = C.deduplicate(c)
    assert C.deduplicate(d).records == d.records
    assert d.dedup_removed == len(c) - len(d)
    assert len({r.dedup_key() for r in d.records}) == len(d)


# normalisation ------------------------------------------------------------------

def test_shipped_table_fixes():
    table = C.NormalizationTable.default()
    assert C.normalize_text("van der Belen", table) == "Van der Bellen"
    assert C.normalize_text("", table) == ""
    assert C.normalize_text("Oesterreich Oesterreich", table) == "Österreich Österreich"
    assert C.normalize_text("der Praesident von Östereich", table) == "der Präsident von Österreich"


@given(st.text(alphabet="OesterichPaäÖ vanderBlb", max_size=40))
def test_shipped_table_idempotent(s):
    table = C.NormalizationTable.default()
    once = C.normalize_text(s, table)
    assert C.normalize_text(once, table) == once


def test_table_rejects_empty_pattern():
    with pytest.raises(ValueError):
        C.NormalizationTable.from_pairs([("", "x")])


def test_table_load_with_ci_column(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("foo,bar\nBaz,qux,ci\n", encoding="utf-8")
    t = C.NormalizationTable.load(p)
    assert C.normalize_text("Foo foo BAZ", t) == "Foo bar qux"


# selectors ------------------------------------------------------------------------

def test_selector_single_and_conjunction():
    s = C.DEFAULT_SELECTORS
    assert s.matches("vote #BPW16 now")
    assert not s.matches("trip to #austria")
    assert s.matches("#Austria #election today")


def test_selector_validation():
    with pytest.raises(ValueError):
        C.SelectorSet(frozenset({"vdb"}))
    with pytest.raises(ValueError):
        C.SelectorSet(frozenset())


def test_filter_mixed_fixture_against_scan():
    texts = ["#vdb", "#hofer!", "nothing", "#austria", "#austria #election", "#Election #AUSTRIA",
             "#bpw16x", "#MehrDennJe yes", "#other", "#NorbertHofer2016"]
    c = C.Corpus([rec(text=t, id=str(i)) for i, t in enumerate(texts)])
    out = C.filter_by_selectors(c, C.DEFAULT_SELECTORS)
    singles = C.DEFAULT_SELECTORS.hashtags
    expected = [r for r in c.records
                if {h.lower() for h in T.hashtags(r.text)} & singles
                or {"#austria", "#election"} <= {h.lower() for h in T.hashtags(r.text)}]
    assert out.records == expected
    assert len(out) == 6


@given(st.lists(record_st, max_size=20))
def test_filter_subset_and_idempotent(records):
    c = C.Corpus(records)
    f = C.filter_by_selectors(c, C.DEFAULT_SELECTORS)
    assert all(r in c.records for r in f.records)
    assert C.filter_by_selectors(f, C.DEFAULT_SELECTORS).records == f.records


# follower codes and language --------------------------------------------------------

def test_follower_codes_all_cases():
    c = C.Corpus([rec(author=a) for a in ("none", "OnlyA", "onlyb", "Both")])
    out = C.assign_follower_codes(c, {"onlya", "both"}, {"onlyb", "both"})
    assert [r.follower_code for r in out.records] == [0, 1, 2, 3]
    assert all(r.follower_code == 0 for r in C.assign_follower_codes(c, set(), set()).records)


@given(st.lists(record_st, max_size=20), st.randoms())
def test_follower_codes_order_independent(records, rnd):
    a, b = {"a"}, {"a", "c"}
    one = C.assign_follower_codes(C.Corpus(records), a, b)
    shuffled = list(records)
    rnd.shuffle(shuffled)
    two = C.assign_follower_codes(C.Corpus(shuffled), a, b)
    assert sorted(map(C.MessageRecord.sort_key, one.records)) == sorted(map(C.MessageRecord.sort_key, two.records))
    assert {(r.user, r.follower_code) for r in one.records} == {(r.user, r.follower_code) for r in two.records}


@given(st.lists(st.sampled_from(["de", "en", "other"]), max_size=30))
def test_language_partition_total(langs):
    c = C.Corpus([rec(text="x", lang=l) for l in langs])
    parts = C.partition_by_language(c)
    assert sum(len(p) for p in parts.values()) == len(c)
    assert C.select_language(c, "all") is c


# daily series -------------------------------------------------------------------------

def test_daily_counts_empty_and_hand_count():
    s = C.daily_counts(C.Corpus([]), "2016-11-20", "2016-11-22")
    assert s.counts == [0, 0, 0]
    recs = [rec(ts=f"2016-11-20T0{h}:00:00Z") for h in range(3)] + [rec(ts=f"2016-11-21T2{h}:00:00Z") for h in range(2)]
    s = C.daily_counts(C.Corpus(recs), date(2016, 11, 20), date(2016, 11, 21))
    assert s.counts == [3, 2] and sum(s.counts) == 5


def test_daily_counts_marker_index():
    s = C.daily_counts(C.Corpus([rec()]), "2016-11-20", "2016-12-06", markers=[("2016-12-04", "election day")])
    assert s.marker_indices() == [(14, "election day")]
    assert s.dates[14] == date(2016, 12, 4)


def test_daily_counts_errors():
    with pytest.raises(ValueError):
        C.daily_counts(C.Corpus([]), "2016-11-22", "2016-11-20")
    with pytest.raises(ValueError):
        C.daily_counts(C.Corpus([]), "2016-11-20", "2016-11-21", markers=[("2016-12-01", "x")])


@given(st.lists(st.integers(0, 30 * 86400), max_size=40), st.integers(0, 20), st.integers(0, 20))
def test_daily_counts_conserves_in_range(secs, a, b):
    lo, hi = sorted((a, b))
    base = datetime(2016, 11, 1, tzinfo=timezone.utc)
    recs = [C.MessageRecord(None, "u", base + timedelta(seconds=s), f"t{s}") for s in secs]
    start, end = date(2016, 11, 1) + timedelta(days=lo), date(2016, 11, 1) + timedelta(days=hi)
    s = C.daily_counts(C.Corpus(recs), start, end)
    assert sum(s.counts) == sum(start <= r.day <= end for r in recs)
    assert len(s.counts) == hi - lo + 1


# text helpers -------------------------------------------------------------------------------

def test_mentions_grammar():
    assert T.mentions("hi @Bob, @carol_1 and mail@x.com @abcdefghijklmnopq") == ["bob", "carol_1"]


def test_hashtags_surface_forms():
    assert T.hashtags("#VdB and #bpw16, not a#b nor ##x") == ["#VdB", "#bpw16"]


def test_content_key_ignores_retweet_head():
    assert T.content_key("RT @bob: Hello  world") == T.content_key("Hello world")
