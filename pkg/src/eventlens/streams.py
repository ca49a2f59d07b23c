"""Keyword-defined message streams, retweet trajectories and annotation joins."""

from __future__ import annotations

import csv
import json
import re
from collections import Counter
from dataclasses import dataclass, field
from datetime import date, timedelta
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import FOLLOWER_CODES, Corpus, DailySeries, MessageRecord, daily_counts


class StreamConfigError(ValueError):
    pass


class AnnotationError(ValueError):
    pass


class MessageNotFound(KeyError):
    pass


@dataclass(frozen=True)
class KeywordStream:
    name: str
    patterns: tuple[str, ...]
    lang: str = "all"

    def __post_init__(self):
        if not self.patterns:
            raise StreamConfigError(f"stream {self.name!r} has no patterns")
        if self.lang not in ("de", "en", "other", "all"):
            raise StreamConfigError(f"stream {self.name!r}: unknown language scope {self.lang!r}")
        compiled = []
        for p in self.patterns:
            try:
                compiled.append(re.compile(p, re.IGNORECASE))
            except re.error as exc:
                raise StreamConfigError(f"stream {self.name!r}: bad pattern {p!r}: {exc}") from None
        object.__setattr__(self, "_compiled", tuple(compiled))

    def matches(self, record: MessageRecord) -> bool:
        if self.lang != "all" and record.language != self.lang:
            return False
        return any(c.search(record.text) for c in self._compiled)


def load_streams(path: str | Path) -> list[KeywordStream]:
    try:
        with open(path, encoding="utf-8") as fh:
            entries = json.load(fh)
    except json.JSONDecodeError as exc:
        raise StreamConfigError(f"{path}: {exc}") from None
    if not isinstance(entries, list):
        raise StreamConfigError(f"{path}: expected a list of stream objects")
    out, seen = [], set()
    for entry in entries:
        try:
            s = KeywordStream(str(entry["name"]), tuple(entry["patterns"]), entry.get("lang", "all"))
        except (KeyError, TypeError):
            raise StreamConfigError(f"{path}: each stream needs 'name' and 'patterns'") from None
        if s.name in seen:
            raise StreamConfigError(f"{path}: duplicate stream name {s.name!r}")
        seen.add(s.name)
        out.append(s)
    return out


def track_stream(corpus: Corpus, stream: KeywordStream, start, end, markers: Iterable = ()) -> DailySeries:
    """Daily number of records matching any of the stream's patterns; each record counts once."""
    return daily_counts(corpus, start, end, markers, where=stream.matches)


def track_streams(corpus: Corpus, streams: Sequence[KeywordStream], start, end) -> dict[str, DailySeries]:
    return {s.name: track_stream(corpus, s, start, end) for s in streams}


def write_series_csv(series: Mapping[str, DailySeries], path: str | Path) -> None:
    names = sorted(series)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["date"] + names)
        if not names:
            return
        first = series[names[0]]
        for i, d in enumerate(first.dates):
            w.writerow([d.isoformat()] + [series[n].counts[i] for n in names])


# --------------------------------------------------------------------------- #
# trajectories
# --------------------------------------------------------------------------- #

@dataclass
class Trajectory:
    key: str
    start: date
    cumulative: dict[int, list[int]]
    per_spreader: dict[int, Counter] = field(default_factory=dict)

    @property
    def days(self) -> int:
        return len(next(iter(self.cumulative.values())))

    @property
    def dates(self) -> list[date]:
        return [self.start + timedelta(days=i) for i in range(self.days)]

    @property
    def total(self) -> int:
        return sum(c[-1] for c in self.cumulative.values())

    @property
    def distinct_spreaders(self) -> dict[int, int]:
        return {code: len(c) for code, c in self.per_spreader.items()}

    def spreader_counts(self) -> Counter:
        out = Counter()
        for c in self.per_spreader.values():
            out.update(c)
        return out

    @property
    def mean_per_spreader(self) -> float:
        counts = self.spreader_counts()
        return self.total / len(counts) if counts else 0.0

    @property
    def max_spreader_share(self) -> float:
        """Percentage of all retweets made by the most active spreader."""
        counts = self.spreader_counts()
        return 100.0 * max(counts.values()) / self.total if counts else 0.0

    def to_dict(self) -> dict:
        return {"key": self.key, "start": self.start.isoformat(), "total": self.total,
                "cumulative": {str(k): v for k, v in sorted(self.cumulative.items())},
                "distinct_spreaders": {str(k): v for k, v in sorted(self.distinct_spreaders.items())},
                "mean_per_spreader": self.mean_per_spreader,
                "max_spreader_share": self.max_spreader_share}

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["date", "code", "cumulative"])
            for i, d in enumerate(self.dates):
                for code in sorted(self.cumulative):
                    w.writerow([d.isoformat(), code, self.cumulative[code][i]])


def retweet_trajectory(corpus: Corpus, key: str, end=None) -> Trajectory:
    """Cumulative daily retweets of one message, split by the retweeter's follower code.

    Retweets are identified by the normalised-text hash of the original, so exact copies
    carrying an ``RT @user:`` head are counted too.
    """
    originals = [r for r in corpus.records if r.key == key]
    if not originals:
        raise MessageNotFound(key)
    origin = min(originals, key=MessageRecord.sort_key)
    ck = origin.content_key
    retweets = [r for r in corpus.records
                if r is not origin and r.is_retweet and r.content_key == ck]
    start = origin.day
    last = max([r.day for r in retweets] + [start])
    if end is not None:
        last = end if isinstance(end, date) else date.fromisoformat(str(end))
    n_days = (last - start).days + 1
    daily = {code: [0] * n_days for code in FOLLOWER_CODES}
    spreaders = {code: Counter() for code in FOLLOWER_CODES}
    for r in retweets:
        i = (r.day - start).days
        if 0 <= i < n_days:
            daily[r.follower_code][i] += 1
            spreaders[r.follower_code][r.user] += 1
    cumulative = {}
    for code, d in daily.items():
        run, acc = 0, []
        for x in d:
            run += x
            acc.append(run)
        cumulative[code] = acc
    return Trajectory(key, start, cumulative, {c: s for c, s in spreaders.items()})


# --------------------------------------------------------------------------- #
# annotations
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class AnnotationSet:
    entries: Mapping[str, str]
    vocabulary: frozenset[str]

    def __post_init__(self):
        if not self.vocabulary:
            raise AnnotationError("annotation vocabulary is empty")
        bad = {l for l in self.entries.values() if l not in self.vocabulary}
        if bad:
            raise AnnotationError(f"labels outside the vocabulary: {sorted(bad)}")

    @classmethod
    def load(cls, path: str | Path, vocabulary: Iterable[str] | None = None) -> "AnnotationSet":
        entries: dict[str, str] = {}
        with open(path, encoding="utf-8", newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), 1):
                if not row or (lineno == 1 and row[0].strip() == "message_key"):
                    continue
                if len(row) < 2:
                    raise AnnotationError(f"{path}:{lineno}: expected message_key,label")
                k, label = row[0].strip(), row[1].strip()
                if entries.get(k, label) != label:
                    raise AnnotationError(f"{path}:{lineno}: {k} carries two labels")
                entries[k] = label
        vocab = frozenset(vocabulary) if vocabulary is not None else frozenset(entries.values())
        if vocabulary is None and not entries:
            vocab = frozenset({"unlabelled"})
        return cls(entries, vocab)


@dataclass(frozen=True)
class JoinResult:
    counts: dict[str, int]
    unmatched: list[str]

    def to_dict(self) -> dict:
        return {"counts": dict(self.counts), "unmatched": list(self.unmatched)}


def join_annotations(corpus: Corpus, annotations: AnnotationSet) -> JoinResult:
    keys = {r.key for r in corpus.records}
    counts = Counter()
    unmatched = []
    for k in sorted(annotations.entries):
        if k in keys:
            counts[annotations.entries[k]] += 1
        else:
            unmatched.append(k)
    return JoinResult(dict(sorted(counts.items())), unmatched)


def suggest_labels(corpus: Corpus, rules: Mapping[str, Sequence[str]],
                   exclude: Iterable[str] = ()) -> dict[str, str]:
    """Keyword-rule label suggestions for analyst review; the first matching rule wins.

    The result is a proposal only and is never merged into an AnnotationSet here.
    """
    compiled = [(label, [re.compile(p, re.IGNORECASE) for p in pats]) for label, pats in rules.items()]
    skip = set(exclude)
    out = {}
    for r in corpus.records:
        if r.key in skip:
            continue
        for label, pats in compiled:
            if any(p.search(r.text) for p in pats):
                out[r.key] = label
                break
    return out
