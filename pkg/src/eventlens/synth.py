"""Seeded synthetic corpora and planted fixtures with known structure."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from datetime import date, datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from .corpus import Corpus, MessageRecord

EPOCH = datetime(2016, 11, 20, tzinfo=timezone.utc)
WINDOW = (date(2016, 11, 20), date(2016, 12, 6))
DEBATE = date(2016, 12, 1)
CANDIDATE_A = "vanderbellen"
CANDIDATE_B = "norbertghofer"


def _ts(day: int, second: int = 0) -> datetime:
    return EPOCH + timedelta(days=day, seconds=second)


def _rec(i: int, author: str, text: str, day: int = 0, second: int = 0, **kw) -> MessageRecord:
    return MessageRecord(id=f"m{i:06d}", author=author, timestamp=_ts(day, second), text=text, **kw)


def corpus_from_edges(edges, prefix: str = "") -> Corpus:
    """One message per directed edge ``(src, dst)``: ``src`` writes ``@dst``."""
    recs = [_rec(i, src, f"{prefix}@{dst} hi", i % 14, i % 86400) for i, (src, dst) in enumerate(edges)]
    return Corpus(recs)


# --------------------------------------------------------------------------- #
# network fixtures
# --------------------------------------------------------------------------- #

def planted_components(n_vertices: int, n_edges: int, n_components: int, seed: int = 0):
    """Directed edge list with exactly the requested vertex, edge and weak-component counts.

    All but one component are two- or three-vertex trees; the rest is one giant component
    (a random spanning tree plus distinct extra edges).
    """
    rng = np.random.default_rng(seed)
    names = [f"u{i:05d}" for i in range(n_vertices)]
    rng.shuffle(names)
    small = rng.choice([2, 3], size=n_components - 1, p=[0.7, 0.3]).tolist()
    giant = n_vertices - sum(small)
    small_edges = sum(s - 1 for s in small)
    extra = n_edges - small_edges - (giant - 1)
    if giant < 2 or extra < 0 or extra > giant * (giant - 1) - (giant - 1):
        raise ValueError("infeasible component plan")
    edges: list[tuple[str, str]] = []
    seen: set[tuple[str, str]] = set()

    def add(a, b):
        if rng.random() < 0.5:
            a, b = b, a
        seen.add((a, b))
        edges.append((a, b))

    g = names[:giant]
    for i in range(1, giant):
        add(g[i], g[int(rng.integers(0, i))])
    while extra:
        a, b = rng.integers(0, giant, size=2)
        if a == b or (g[a], g[b]) in seen:
            continue
        seen.add((g[a], g[b]))
        edges.append((g[a], g[b]))
        extra -= 1
    pos = giant
    for s in small:
        comp = names[pos:pos + s]
        pos += s
        for i in range(1, s):
            add(comp[i], comp[i - 1])
    return edges


def planted_hub(hub: str = CANDIDATE_A, in_degree: int = 3665, n_background: int = 3000,
                seed: int = 0):
    """Edges where ``hub`` is mentioned by ``in_degree`` distinct users over a sparse background."""
    rng = np.random.default_rng(seed)
    users = [f"user{i:05d}" for i in range(in_degree + 500)]
    edges = [(u, hub) for u in users[:in_degree]]
    seen = set(edges)
    while len(edges) < in_degree + n_background:
        a, b = rng.integers(0, len(users), size=2)
        # background targets skew to a few popular accounts but stay far below the hub
        b = int(min(b, rng.zipf(1.6) - 1)) % len(users)
        if a == b or (users[a], users[b]) in seen:
            continue
        seen.add((users[a], users[b]))
        edges.append((users[a], users[b]))
    return edges


def planted_hashtag_corpus(n_components: int = 9, giant_tags: int = 400, n_messages: int = 3000,
                           seed: int = 0) -> Corpus:
    """Hashtag co-occurrence corpus with one giant component and isolated or paired small tags."""
    rng = np.random.default_rng(seed)
    tags = [f"#tag{i}" for i in range(giant_tags)]
    recs = []
    for i in range(1, giant_tags):
        recs.append(f"{tags[i]} {tags[int(rng.integers(0, i))]}")
    while len(recs) < n_messages:
        k = int(rng.integers(1, 4))
        pick = rng.choice(giant_tags, size=k, replace=False)
        recs.append(" ".join(tags[j] for j in pick))
    for c in range(n_components - 1):
        if c % 2:
            recs.append(f"#solo{c}")
        else:
            recs.append(f"#pair{c}a #pair{c}b")
    return Corpus([_rec(i, f"a{i % 97}", t + " text", i % 14) for i, t in enumerate(recs)])


@dataclass(frozen=True)
class EgoPlant:
    corpus: Corpus
    categories: dict
    ego: str
    kept_vertices: int
    kept_edges: int
    label_counts: dict


def planted_ego(ego: str = "#vdb", counts: dict | None = None, n_other: int = 40,
                kept_edges: int = 1057, seed: int = 0) -> EgoPlant:
    """Hashtag ego network whose category-filtered version has a planted size.

    The filtered network (ego plus every neighbour outside Other) has
    ``1 + sum(counts)`` vertices and exactly ``kept_edges`` edges.
    """
    from .graphs import HashtagCategory as HC

    counts = counts or {HC.SUPPORTING: 10, HC.AGAINST: 5, HC.GENERAL: 56, HC.IMPORTANT_TOPICS: 59}
    rng = np.random.default_rng(seed)
    labels = {}
    kept = []
    for cat, k in counts.items():
        for j in range(k):
            t = f"#{cat.value.lower()}{j}"
            labels[t] = cat
            kept.append(t)
    others = [f"#other{j}" for j in range(n_other)]
    for t in others:
        labels[t] = HC.OTHER
    texts = [f"{ego} {t}" for t in kept + others]
    inner = kept_edges - len(kept)
    pairs = set()
    while len(pairs) < inner:
        a, b = sorted(rng.choice(len(kept), size=2, replace=False).tolist())
        pairs.add((a, b))
    texts += [f"{kept[a]} {kept[b]}" for a, b in sorted(pairs)]
    # edges touching Other vertices vanish from the filtered network
    for t in others:
        texts.append(f"{t} {kept[int(rng.integers(0, len(kept)))]}")
    # a distant tag outside the ego network
    texts.append("#faraway #elsewhere")
    labels[ego] = HC.GENERAL
    corpus = Corpus([_rec(i, f"a{i % 50}", t, i % 14) for i, t in enumerate(texts)])
    return EgoPlant(corpus, labels, ego, 1 + len(kept), kept_edges,
                    {c: k for c, k in counts.items()})


# --------------------------------------------------------------------------- #
# bots
# --------------------------------------------------------------------------- #

def planted_bot_scores(human: int = 20645, potential: int = 1117, bot: int = 148,
                       absent: int = 540, seed: int = 0) -> list:
    """Score set with a planted band partition; band edges 0.5 and 0.9 are included on purpose."""
    from .botdetect import AbsenceReason, BotScore

    rng = np.random.default_rng(seed)
    scores = [0.0, 0.5] + rng.uniform(0.0, 0.5, human - 2).round(4).tolist()
    scores += [0.51, 0.9] + rng.uniform(0.5001, 0.9, potential - 2).round(4).tolist()
    scores += [0.91, 1.0] + rng.uniform(0.9001, 1.0, bot - 2).round(4).tolist()
    out = [BotScore(f"acct{i:05d}", float(s)) for i, s in enumerate(scores)]
    out += [BotScore(f"gone{i:04d}", None, AbsenceReason.ACCOUNT_GONE) for i in range(absent)]
    order = rng.permutation(len(out))
    return [out[i] for i in order]


@dataclass(frozen=True)
class BotPlant:
    corpus: Corpus
    flagged: frozenset
    expected: dict


def _split(total: int, parts: int, rng) -> list[int]:
    if parts == 0:
        return []
    cuts = np.sort(rng.integers(0, total + 1, size=parts - 1))
    return np.diff(np.concatenate([[0], cuts, [total]])).astype(int).tolist()


def planted_bot_activity(seed: int = 0) -> BotPlant:
    """10000-message corpus whose 20-account cohort reproduces one activity-share column after rounding.

    Planted counts: 102/10000 messages, 495/50000 retweets received, 456/80000 likes,
    31/2900 retweets generated, 10/1100 and 10/1064 of each candidate's followers.
    """
    rng = np.random.default_rng(seed)
    bots = [f"cohort{i:02d}" for i in range(20)]
    bot_codes = [1] * 10 + [2] * 10
    humans = ([(f"fa{i:04d}", 1) for i in range(1090)] + [(f"fb{i:04d}", 2) for i in range(1054)]
              + [(f"fn{i:04d}", 0) for i in range(500)])
    recs = []

    def emit(author, code, is_rt, rt=0, likes=0):
        i = len(recs)
        text = f"RT @{CANDIDATE_A}: message {i}" if is_rt else f"message {i} #bpw16"
        recs.append(_rec(i, author, text, i % 14, i % 86400, retweet_count=rt, like_count=likes,
                         reply_count=0, follower_code=code, is_retweet=is_rt, language="de"))

    bot_orig = 71
    bot_rt_recv = _split(495, bot_orig, rng)
    bot_likes = _split(456, bot_orig, rng)
    for j in range(bot_orig):
        b = j % 20
        emit(bots[b], bot_codes[b], False, bot_rt_recv[j], bot_likes[j])
    for j in range(31):
        b = j % 20
        emit(bots[b], bot_codes[b], True)
    hum_orig = 7100 - bot_orig
    hum_rt = 2900 - 31
    rt_recv = _split(50000 - 495, hum_orig, rng)
    likes = _split(80000 - 456, hum_orig, rng)
    order = list(range(len(humans))) + rng.integers(0, len(humans), hum_orig + hum_rt - len(humans)).tolist()
    for j, h in enumerate(order):
        author, code = humans[h]
        if j < hum_orig:
            emit(author, code, False, rt_recv[j], likes[j])
        else:
            emit(author, code, True)
    expected = {"generated_content": 1.02, "rt_received": 0.99, "like_count": 0.57,
                "rt_generated": 1.07, "follower_share_A": 0.91, "follower_share_B": 0.94}
    return BotPlant(Corpus(recs), frozenset(bots), expected)


# --------------------------------------------------------------------------- #
# streams
# --------------------------------------------------------------------------- #

SPY_LABELS = {"seek": 53, "annoy": 13, "threat": 23, "sarcasm": 36, "amuse": 10}


@dataclass(frozen=True)
class StreamPlant:
    corpus: Corpus
    annotations: dict
    peaks: dict
    streams: list


def planted_streams(seed: int = 0) -> StreamPlant:
    """Four keyword streams with known peak days; the spy stream carries 135 labelled reactions."""
    from .streams import KeywordStream

    rng = np.random.default_rng(seed)
    days = (WINDOW[1] - WINDOW[0]).days + 1
    defs = {"spy": (["\\bspy\\b", "\\bspion\\w*"], DEBATE),
            "poll": (["fake poll", "umfrage gefälscht"], date(2016, 11, 24)),
            "health": (["\\bhealth rumou?r", "krank\\w*"], date(2016, 11, 27)),
            "ballot": (["ballot fraud", "wahlbetrug"], date(2016, 12, 4))}
    words = {"spy": "spy", "poll": "fake poll", "health": "health rumor", "ballot": "wahlbetrug"}
    recs, peaks = [], {}
    spy_keys = []
    for name, (pats, peak) in defs.items():
        peaks[name] = peak
        p = (peak - WINDOW[0]).days
        for d in range(days):
            lo, hi = (6, 16) if name == "spy" else (0, 12)
            n = 30 if d == p else int(rng.integers(lo, hi))
            for _ in range(n):
                i = len(recs)
                text = f"talk about the {words[name]} story"
                # a few records hit two patterns of the same stream
                if name == "spy" and i % 7 == 0:
                    text += " spion"
                recs.append(_rec(i, f"user{i % 300}", text, d, i))
                if name == "spy":
                    spy_keys.append(recs[-1].key)
    recs.append(_rec(len(recs), "quiet", "nothing to see", 3))
    total = sum(SPY_LABELS.values())
    if len(spy_keys) < total:
        raise RuntimeError("spy stream too small for the planted labels")
    chosen = rng.choice(len(spy_keys), size=total, replace=False)
    labels = [l for l, k in SPY_LABELS.items() for _ in range(k)]
    annotations = {spy_keys[j]: labels[i] for i, j in enumerate(sorted(chosen))}
    streams = [KeywordStream(n, tuple(p)) for n, (p, _) in defs.items()]
    return StreamPlant(Corpus(recs), annotations, peaks, streams)


@dataclass(frozen=True)
class TrajectoryPlant:
    corpus: Corpus
    key: str


def planted_trajectory(seed: int = 0) -> TrajectoryPlant:
    """One message retweeted 68 times by 18 spreaders, the busiest of whom retweets 12 times."""
    rng = np.random.default_rng(seed)
    text = "Statement video: watch now #vdb"
    orig = _rec(0, CANDIDATE_A, text, 0, 10, follower_code=0, language="en")
    per = [12] + [4] * 5 + [3] * 12
    recs = [orig]
    for s, k in enumerate(per):
        code = int(rng.integers(0, 4))
        for _ in range(k):
            i = len(recs)
            day = int(rng.integers(0, 10))
            recs.append(_rec(i, f"spreader{s:02d}", f"RT @{CANDIDATE_A}: {text}", day, 1000 + i,
                             follower_code=code, is_retweet=True, language="en"))
    recs.append(_rec(len(recs), "other", "unrelated message", 2))
    return TrajectoryPlant(Corpus(recs), orig.key)


# --------------------------------------------------------------------------- #
# correlations
# --------------------------------------------------------------------------- #

def planted_correlation(x, r: float, seed: int = 0):
    """Real vector with Pearson correlation exactly ``r`` against ``x`` (up to rounding)."""
    rng = np.random.default_rng(seed)
    x = np.asarray(x, dtype=float)
    zx = (x - x.mean()) / x.std()
    noise = rng.normal(size=x.size)
    noise -= noise.mean()
    noise -= (noise @ zx) / (zx @ zx) * zx
    zn = noise / noise.std()
    return r * zx + math.sqrt(1 - r * r) * zn


def planted_count_pair(n: int, r: float, seed: int = 0, x=None, scale: float = 200.0):
    """Non-negative integer pair whose correlation is ``r`` to within integer rounding."""
    rng = np.random.default_rng(seed)
    if x is None:
        x = rng.geometric(0.05, size=n) - 1
    y = planted_correlation(x, r, seed + 1)
    y = np.round(scale * (y - y.min())).astype(int)
    return np.asarray(x).astype(int), y


# --------------------------------------------------------------------------- #
# bundled corpus
# --------------------------------------------------------------------------- #

_VOCAB = {
    "de": {"pos": ["gut", "super", "toll", "großartig", "hoffnung", "stolz", "danke", "wunderbar", "sieg"],
           "neg": ["schlecht", "furchtbar", "hass", "traurig", "lüge", "angst", "schande", "katastrophe"],
           "fill": ["die", "der", "und", "wahl", "heute", "präsident", "österreich", "ist", "nicht",
                    "wir", "sehr", "das", "mit", "für", "ein"]},
    "en": {"pos": ["good", "great", "love", "happy", "hope", "proud", "thanks", "wonderful", "win"],
           "neg": ["bad", "awful", "hate", "sad", "lie", "fear", "shame", "disaster"],
           "fill": ["the", "and", "election", "today", "president", "austria", "is", "not", "we",
                    "very", "this", "with", "for", "a", "vote"]},
}
_TAGS_A = ["#vdb", "#VanDerBellen", "#vdb16", "#MehrDennJe"]
_TAGS_B = ["#Hofer", "#NorbertHofer", "#NorbertHofer2016"]
_TAGS_GEN = ["#bpw16", "#AustrianElection", "#bpw16", "#bpw16"]
_TAGS_TOPIC = ["#fpoe", "#gruene", "#eu", "#refugees", "#oexit", "#tvduell", "#wahlkarte", "#orf",
               "#trump", "#brexit", "#italy", "#referendum"]
_TAGS_OTHER = ["#news", "#wien", "#live", "#breaking", "#politik", "#video"]
CATEGORY_ROWS = ([(t, "Supporting") for t in ("#vdb", "#vanderbellen", "#vdb16", "#mehrdennje")]
                 + [(t, "Against") for t in ("#nohofer", "#stopvdb")]
                 + [(t, "General") for t in ("#bpw16", "#austrianelection", "#hofer", "#norberthofer",
                                             "#norberthofer2016", "#austria", "#election")]
                 + [(t.casefold(), "ImportantTopics") for t in _TAGS_TOPIC]
                 + [(t.casefold(), "Other") for t in _TAGS_OTHER])
STREAM_DEFS = [
    {"name": "spy", "patterns": ["\\bspy\\b", "\\bspion\\w*"], "lang": "all"},
    {"name": "fake_poll", "patterns": ["fake poll", "umfrage gefälscht"], "lang": "all"},
    {"name": "health", "patterns": ["health rumou?r", "\\bkrank\\w*"], "lang": "all"},
    {"name": "ballot_fraud", "patterns": ["ballot fraud", "wahlbetrug"], "lang": "all"},
]


def _sentence(rng, lang: str, mood: str) -> str:
    v = _VOCAB[lang]
    words = list(rng.choice(v["fill"], size=int(rng.integers(3, 8))))
    if mood in ("pos", "mixed"):
        words.insert(int(rng.integers(0, len(words) + 1)), str(rng.choice(v["pos"])))
    if mood in ("neg", "mixed"):
        words.insert(int(rng.integers(0, len(words) + 1)), str(rng.choice(v["neg"])))
    return " ".join(words)


def generate_bundle(seed: int = 7, n_messages: int = 5000) -> dict:
    """Synthetic election-style corpus plus every side file the full pipeline needs."""
    rng = np.random.default_rng(seed)
    n_users = 900
    users = [f"user_{i:04d}" for i in range(n_users)]
    codes = rng.choice([0, 1, 2, 3], size=n_users, p=[0.45, 0.25, 0.25, 0.05])
    langs = np.where(rng.random(n_users) < 0.6, "de", "en")
    activity = np.exp(rng.normal(0.8, 1.0, n_users))
    activity /= activity.sum()
    popularity = 1.0 / np.arange(1, n_users + 1) ** 0.9
    popularity /= popularity.sum()
    bots = {"newsbot_at": None, "flooder_one": (55, 3), "ticker_eu": (60, 4)}
    day_span = (WINDOW[1] - WINDOW[0]).days + 1
    debate = (DEBATE - WINDOW[0]).days
    recs: list[dict] = []
    rec_day: list[int] = []
    originals: list[int] = []

    def add(author, text, day, lang, code, is_rt=False):
        i = len(recs)
        recs.append({"id": f"t{i:06d}", "author": author,
                     "ts": (_ts(day, int(rng.integers(0, 86400)))).strftime("%Y-%m-%dT%H:%M:%SZ"),
                     "text": text, "rt_count": 0, "like_count": 0,
                     "reply_count": int(rng.poisson(0.6)), "lang": lang, "follower_code": code,
                     "is_retweet": is_rt})
        rec_day.append(day)
        if not is_rt:
            originals.append(i)

    def tags(k):
        pools = [_TAGS_A, _TAGS_B, _TAGS_GEN, _TAGS_TOPIC, _TAGS_OTHER]
        out = [str(rng.choice(_TAGS_GEN + _TAGS_A + _TAGS_B))]
        for _ in range(k):
            pool = pools[int(rng.choice(5, p=[0.2, 0.2, 0.15, 0.3, 0.15]))]
            out.append(str(rng.choice(pool)))
        # long tail of rarely used tags
        while rng.random() < 0.45:
            out.append(f"#thema{min(int(rng.zipf(1.5)), 900)}")
        return " ".join(dict.fromkeys(out))

    for name, vol in bots.items():
        if vol is None:
            for d in range(day_span):
                add(name, f"news update {d} #bpw16 #news", d, "de", 0)
            continue
        per_day, n_days = vol
        for d in range(n_days):
            for j in range(per_day):
                add(name, f"auto post {d}-{j} #bpw16 #AustrianElection", 2 + d, "en", 0)
    stream_words = {"de": ["spion", "umfrage gefälscht", "krank", "wahlbetrug"],
                    "en": ["spy", "fake poll", "health rumor", "ballot fraud"]}
    stream_peaks = [debate, 4, 7, 14]
    while len(recs) < n_messages:
        u = int(rng.choice(n_users, p=activity))
        lang, code = str(langs[u]), int(codes[u])
        day = int(rng.integers(0, day_span))
        if originals and rng.random() < 0.25:
            j = int(originals[int(rng.integers(0, len(originals)))])
            src = recs[j]
            rt_day = min(day_span - 1, rec_day[j] + int(rng.geometric(0.5)) - 1)
            add(users[u], f"RT @{src['author']}: {src['text']}", rt_day, src["lang"], code, True)
            recs[-1]["ts"] = max(recs[-1]["ts"], src["ts"])
            src["rt_count"] += 1
            continue
        mood = str(rng.choice(["pos", "neg", "mixed", "none"], p=[0.3, 0.3, 0.1, 0.3]))
        text = _sentence(rng, lang, mood)
        n_mention = int(rng.choice([0, 1, 2, 3], p=[0.35, 0.4, 0.18, 0.07]))
        targets = set()
        for _ in range(n_mention):
            r = rng.random()
            if r < 0.15:
                targets.add(CANDIDATE_A)
            elif r < 0.27:
                targets.add(CANDIDATE_B)
            else:
                targets.add(users[int(rng.choice(n_users, p=popularity))])
        targets.discard(users[u])
        text = " ".join(f"@{t}" for t in sorted(targets)) + (" " if targets else "") + text
        if rng.random() < 0.25:
            text += " " + str(rng.choice(["Van der Bellen", "van der Belen", "VdB"]))
        if rng.random() < 0.2:
            text += " " + str(rng.choice(["Hofer", "Norbert Hofer"]))
        for s, peak in enumerate(stream_peaks):
            p = 0.3 if day == peak else 0.02
            if rng.random() < p:
                text += " " + stream_words[lang][s]
        if rng.random() < 0.03:
            text += " #offtopic"
            recs_tags = "#offtopic"
        else:
            recs_tags = tags(int(rng.integers(0, 4)))
        add(users[u], f"{text} {recs_tags}", day, lang, code)
    # engagement: likes track retweets with noise
    for r in recs:
        if not r["is_retweet"]:
            r["rt_count"] += int(rng.poisson(1.0))
            r["like_count"] = int(round(2.5 * r["rt_count"] + rng.poisson(1.5)))
    # a few off-selector messages, exact duplicates and malformed lines
    dups = [dict(recs[int(i)]) for i in rng.choice(len(recs), size=12, replace=False)]
    order = rng.permutation(len(recs)).tolist()
    lines = [json.dumps(recs[i], ensure_ascii=False, sort_keys=True) for i in order]
    lines += [json.dumps(d, ensure_ascii=False, sort_keys=True) for d in dups]
    lines += ['{"id": "broken", "author": "x"', '{"id": "t999999", "author": "", "ts": "2016-11-21T00:00:00Z", "text": "no author"}']
    all_users = users + list(bots)
    followers_a = sorted(u for u, c in zip(users, codes) if c & 1)
    followers_b = sorted(u for u, c in zip(users, codes) if c & 2)
    score_rows = []
    for u in sorted(all_users):
        if rng.random() < 0.024:
            continue
        s = float(rng.beta(1.2, 6.0)) if u not in bots else float(rng.uniform(0.55, 0.99))
        score_rows.append((u, round(s, 4)))
    spy_keys = [r["id"] for r in recs if ("spion" in r["text"] or " spy" in r["text"])
                and not r["is_retweet"]]
    spy_labels = list(SPY_LABELS)
    annotations = [(k, spy_labels[j % len(spy_labels)]) for j, k in enumerate(spy_keys)]
    annotations.append(("t999998", "seek"))
    config = {
        "inputs": ["corpus.jsonl"],
        "lang": "all",
        "seed": 0,
        "window": {"start": WINDOW[0].isoformat(), "end": WINDOW[1].isoformat()},
        "markers": [[DEBATE.isoformat(), "TV debate"]],
        "categories": "categories.csv",
        "ego": ["#vdb", "#hofer"],
        "streams": "streams.json",
        "annotations": "annotations.csv",
        "followers": {"a": "followers_a.txt", "b": "followers_b.txt"},
        "targets": {"a": ["Van der Bellen", "VdB", "@vanderbellen", "#vdb", "#vanderbellen"],
                    "b": ["Hofer", "Norbert Hofer", "@norbertghofer", "#hofer", "#norberthofer"]},
        "bots": {"provider": "offline", "scores": "bot_scores.csv"},
        "tailfit": {"n_sims": 100, "significance": 0.1},
        "workers": 1,
    }
    return {"corpus.jsonl": "\n".join(lines) + "\n",
            "followers_a.txt": "\n".join(followers_a) + "\n",
            "followers_b.txt": "\n".join(followers_b) + "\n",
            "bot_scores.csv": "username,score\n" + "".join(f"{u},{s}\n" for u, s in score_rows),
            "categories.csv": "hashtag,category\n" + "".join(f"{t},{c}\n" for t, c in CATEGORY_ROWS),
            "streams.json": json.dumps(STREAM_DEFS, indent=2, ensure_ascii=False) + "\n",
            "annotations.csv": "message_key,label\n" + "".join(f"{k},{l}\n" for k, l in annotations),
            "config.json": json.dumps(config, indent=2, sort_keys=True) + "\n"}


def write_bundle(out_dir: str | Path, seed: int = 7, n_messages: int = 5000) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for name, content in generate_bundle(seed, n_messages).items():
        (out / name).write_text(content, encoding="utf-8")
    return out / "config.json"


def bundled_dir() -> Path:
    from importlib import resources

    return Path(str(resources.files("eventlens") / "data" / "bundled"))
