"""Message corpus: ingestion, deduplication, normalisation, selection and daily series."""

from __future__ import annotations

import csv
import io
import json
import logging
import re
from dataclasses import dataclass, field, replace
from datetime import date, datetime, timedelta, timezone
from importlib import resources
from pathlib import Path
from typing import BinaryIO, Callable, Iterable, Sequence

from . import text as textutil

log = logging.getLogger(__name__)

LANGUAGES = ("de", "en", "other")
FOLLOWER_CODES = (0, 1, 2, 3)


class IngestError(RuntimeError):
    """The input stream as a whole cannot be read."""


class RecordError(ValueError):
    """A single input record is unusable."""


@dataclass(frozen=True)
class MessageRecord:
    id: str | None
    author: str
    timestamp: datetime
    text: str
    retweet_count: int = 0
    like_count: int = 0
    reply_count: int | None = None
    language: str = "other"
    follower_code: int = 0
    is_retweet: bool = False

    def __post_init__(self):
        if self.timestamp.tzinfo is None:
            raise ValueError("timestamp must be timezone-aware")
        if self.retweet_count < 0 or self.like_count < 0 or (self.reply_count or 0) < 0:
            raise ValueError("engagement counts must be non-negative")
        if self.language not in LANGUAGES:
            raise ValueError(f"language must be one of {LANGUAGES}")
        if self.follower_code not in FOLLOWER_CODES:
            raise ValueError("follower_code must be 0, 1, 2 or 3")

    @property
    def user(self) -> str:
        return self.author.casefold()

    @property
    def day(self) -> date:
        return self.timestamp.astimezone(timezone.utc).date()

    @property
    def key(self) -> str:
        """Message identity: explicit id, else a hash of author, time and text."""
        if self.id:
            return self.id
        return "h:" + textutil.text_hash(f"{self.user}|{self.timestamp.isoformat()}|{self.text}")[:20]

    @property
    def content_key(self) -> str:
        """Hash of the canonical text with any retweet head removed."""
        return textutil.content_key(self.text)

    def dedup_key(self) -> tuple:
        if self.id:
            return ("id", self.id)
        return ("triple", self.user, self.timestamp, textutil.canonical_text(self.text))

    def sort_key(self) -> tuple:
        return (self.timestamp, self.author, textutil.text_hash(self.text))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "author": self.author,
            "ts": self.timestamp.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
            "text": self.text,
            "rt_count": self.retweet_count,
            "like_count": self.like_count,
            "reply_count": self.reply_count,
            "lang": self.language,
            "follower_code": self.follower_code,
            "is_retweet": self.is_retweet,
        }


@dataclass(frozen=True)
class Reject:
    line: int
    reason: str


@dataclass
class Corpus:
    records: list[MessageRecord]
    provenance: dict = field(default_factory=dict)
    dedup_removed: int = 0
    rejects: list[Reject] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def derive(self, records: Iterable[MessageRecord], **changes) -> "Corpus":
        return replace(self, records=list(records), **changes)

    @property
    def authors(self) -> set[str]:
        return {r.user for r in self.records}

    def write_jsonl(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for r in self.records:
                fh.write(json.dumps(r.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")


def sort_records(records: Iterable[MessageRecord]) -> list[MessageRecord]:
    return sorted(records, key=MessageRecord.sort_key)


# --------------------------------------------------------------------------- #
# ingestion
# --------------------------------------------------------------------------- #

def parse_timestamp(value) -> datetime:
    if isinstance(value, bool) or value is None or value == "":
        raise RecordError("missing timestamp")
    if isinstance(value, (int, float)) or (isinstance(value, str) and re.fullmatch(r"\d+(\.\d+)?", value)):
        ts = datetime.fromtimestamp(int(float(value)), tz=timezone.utc)
    else:
        s = str(value).strip()
        if s.endswith(("Z", "z")):
            s = s[:-1] + "+00:00"
        try:
            ts = datetime.fromisoformat(s)
        except ValueError:
            raise RecordError(f"unparseable timestamp {value!r}") from None
        if ts.tzinfo is None:
            ts = ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc).replace(microsecond=0)


def _count(obj: dict, name: str, optional: bool = False) -> int | None:
    v = obj.get(name)
    if v is None or v == "":
        return None if optional else 0
    try:
        n = int(v)
    except (TypeError, ValueError):
        raise RecordError(f"{name} is not an integer: {v!r}") from None
    if n != float(v) or n < 0:
        raise RecordError(f"{name} must be a non-negative integer: {v!r}")
    return n


def _flag(v) -> bool:
    if isinstance(v, str):
        return v.strip().lower() in ("1", "true", "yes", "y")
    return bool(v)


def record_from_dict(obj: dict, lang_threshold: float = 0.15) -> MessageRecord:
    """Build a record from the ingestion schema (id, author, ts, text, rt_count, ...)."""
    if not isinstance(obj, dict):
        raise RecordError("record is not an object")
    author = obj.get("author")
    text = obj.get("text")
    if not author or not isinstance(author, str):
        raise RecordError("missing author")
    if text is None or not isinstance(text, str):
        raise RecordError("missing text")
    if "ts" not in obj or obj.get("ts") in (None, ""):
        raise RecordError("missing timestamp")
    ts = parse_timestamp(obj["ts"])
    rid = obj.get("id")
    rid = str(rid) if rid not in (None, "") else None
    lang = obj.get("lang")
    if lang in (None, ""):
        language = textutil.guess_language(text, lang_threshold)
    else:
        language = lang if lang in ("de", "en") else "other"
    code = obj.get("follower_code")
    code = 0 if code in (None, "") else _count(obj, "follower_code")
    if code not in FOLLOWER_CODES:
        raise RecordError(f"follower_code out of range: {code}")
    explicit_rt = _flag(obj.get("is_retweet", False))
    return MessageRecord(
        id=rid,
        author=author,
        timestamp=ts,
        text=text,
        retweet_count=_count(obj, "rt_count"),
        like_count=_count(obj, "like_count"),
        reply_count=_count(obj, "reply_count", optional=True),
        language=language,
        follower_code=code,
        is_retweet=explicit_rt or textutil.is_retweet_text(text),
    )


def _rows(data: str, fmt: str):
    if fmt == "json-lines":
        for lineno, line in enumerate(data.splitlines(), 1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                yield lineno, RecordError(f"malformed JSON: {exc.msg}")
    elif fmt == "csv":
        reader = csv.DictReader(io.StringIO(data, newline=""))
        if reader.fieldnames is None:
            return
        for row in reader:
            if None in row:
                yield reader.line_num, RecordError("too many fields")
                continue
            yield reader.line_num, row
    else:
        raise ValueError(f"unknown format {fmt!r}; expected 'json-lines' or 'csv'")


def ingest(source: BinaryIO | bytes | str | Path, fmt: str | None = None,
           lang_threshold: float = 0.15) -> Corpus:
    """Read a JSON-lines or CSV message file into a sorted corpus.

    Bad records are collected in ``Corpus.rejects``; an unreadable stream
    (I/O failure, invalid UTF-8) raises :class:`IngestError`.
    """
    name = "<stream>"
    try:
        if isinstance(source, (str, Path)):
            name = str(source)
            if fmt is None:
                fmt = "csv" if name.lower().endswith(".csv") else "json-lines"
            raw = Path(source).read_bytes()
        elif isinstance(source, bytes):
            raw = source
        else:
            raw = source.read()
    except OSError as exc:
        raise IngestError(f"cannot read {name}: {exc}") from exc
    try:
        data = raw.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise IngestError(f"{name} is not valid UTF-8: {exc}") from exc
    fmt = fmt or "json-lines"
    records, rejects = [], []
    for lineno, obj in _rows(data, fmt):
        if isinstance(obj, RecordError):
            rejects.append(Reject(lineno, str(obj)))
            continue
        try:
            records.append(record_from_dict(obj, lang_threshold))
        except (RecordError, ValueError) as exc:
            rejects.append(Reject(lineno, str(exc)))
    if rejects:
        log.warning("%s: %d record(s) rejected", name, len(rejects))
    return Corpus(
        records=sort_records(records),
        provenance={"sources": [name], "format": fmt,
                    "ingested_at": datetime.now(timezone.utc).isoformat(timespec="seconds")},
        rejects=rejects,
    )


def merge(corpora: Sequence[Corpus]) -> Corpus:
    records = [r for c in corpora for r in c.records]
    sources = [s for c in corpora for s in c.provenance.get("sources", [])]
    rejects = [rj for c in corpora for rj in c.rejects]
    prov = {"sources": sources}
    if corpora:
        prov["ingested_at"] = corpora[-1].provenance.get("ingested_at")
    return Corpus(sort_records(records), prov, sum(c.dedup_removed for c in corpora), rejects)


def deduplicate(corpus: Corpus) -> Corpus:
    """Keep the first record (in corpus order) for each dedup key."""
    seen, kept = set(), []
    for r in corpus.records:
        k = r.dedup_key()
        if k not in seen:
            seen.add(k)
            kept.append(r)
    removed = len(corpus.records) - len(kept)
    return corpus.derive(kept, dedup_removed=corpus.dedup_removed + removed)


# --------------------------------------------------------------------------- #
# normalisation
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class NormalizationTable:
    replacements: tuple[tuple[str, str, bool], ...]

    def __post_init__(self):
        for pattern, _, _ in self.replacements:
            if not pattern:
                raise ValueError("normalisation patterns must be non-empty")

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence]) -> "NormalizationTable":
        out = []
        for p in pairs:
            ci = len(p) > 2 and str(p[2]).strip().lower() in ("ci", "1", "true")
            out.append((str(p[0]), str(p[1]), ci))
        return cls(tuple(out))

    @classmethod
    def load(cls, path: str | Path) -> "NormalizationTable":
        with open(path, encoding="utf-8", newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].startswith("#")]
        if rows and [c.strip().lower() for c in rows[0][:2]] == ["pattern", "replacement"]:
            rows = rows[1:]
        return cls.from_pairs(rows)

    @classmethod
    def default(cls) -> "NormalizationTable":
        with resources.as_file(resources.files("eventlens") / "data" / "normalization.csv") as p:
            return cls.load(p)


def normalize_text(text: str, table: NormalizationTable) -> str:
    """Apply the table's replacements in order; matches are literal."""
    for pattern, repl, ci in table.replacements:
        if ci:
            text = re.sub(re.escape(pattern), lambda _m, r=repl: r, text, flags=re.IGNORECASE)
        else:
            text = text.replace(pattern, repl)
    return text


def normalize_corpus(corpus: Corpus, table: NormalizationTable) -> Corpus:
    return corpus.derive(replace(r, text=normalize_text(r.text, table)) for r in corpus.records)


# --------------------------------------------------------------------------- #
# selection and annotation
# --------------------------------------------------------------------------- #

@dataclass(frozen=True)
class SelectorSet:
    hashtags: frozenset[str]
    conjunctions: tuple[frozenset[str], ...] = ()

    def __post_init__(self):
        tags = list(self.hashtags) + [t for c in self.conjunctions for t in c]
        if not tags:
            raise ValueError("selector set must not be empty")
        for t in tags:
            if not t.startswith("#") or t != t.casefold():
                raise ValueError(f"selector {t!r} must start with '#' and be case-folded")

    @classmethod
    def build(cls, hashtags: Iterable[str], conjunctions: Iterable[Iterable[str]] = ()):
        return cls(frozenset(h.casefold() for h in hashtags),
                   tuple(frozenset(h.casefold() for h in c) for c in conjunctions))

    def matches(self, text: str) -> bool:
        tags = {h.casefold() for h in textutil.hashtags(text)}
        return bool(tags & self.hashtags) or any(c <= tags for c in self.conjunctions)


DEFAULT_SELECTORS = SelectorSet.build(
    ["#vdb", "#vdb16", "#VanDerBellen", "#MehrDennJe", "#NorbertHofer", "#NorbertHofer2016",
     "#Hofer", "#bpw16", "#AustrianElection"],
    [["#Austria", "#election"]],
)


def filter_by_selectors(corpus: Corpus, selectors: SelectorSet) -> Corpus:
    return corpus.derive(r for r in corpus.records if selectors.matches(r.text))


def load_usernames(path: str | Path) -> set[str]:
    with open(path, encoding="utf-8") as fh:
        return {line.strip().lstrip("@").casefold() for line in fh if line.strip()}


def follower_code(user: str, followers_a: set[str], followers_b: set[str]) -> int:
    return (1 if user in followers_a else 0) + (2 if user in followers_b else 0)


def assign_follower_codes(corpus: Corpus, followers_a: Iterable[str],
                          followers_b: Iterable[str]) -> Corpus:
    a = {u.casefold() for u in followers_a}
    b = {u.casefold() for u in followers_b}
    return corpus.derive(replace(r, follower_code=follower_code(r.user, a, b))
                         for r in corpus.records)


def partition_by_language(corpus: Corpus) -> dict[str, Corpus]:
    parts = {lang: [] for lang in LANGUAGES}
    for r in corpus.records:
        parts[r.language].append(r)
    return {lang: corpus.derive(recs) for lang, recs in parts.items()}


def select_language(corpus: Corpus, lang: str) -> Corpus:
    if lang == "all":
        return corpus
    return partition_by_language(corpus)[lang]


# --------------------------------------------------------------------------- #
# daily series
# --------------------------------------------------------------------------- #

@dataclass
class DailySeries:
    start_date: date
    end_date: date
    counts: list[int]
    markers: list[tuple[date, str]] = field(default_factory=list)

    def __post_init__(self):
        if len(self.counts) != (self.end_date - self.start_date).days + 1:
            raise ValueError("series length does not match its date range")
        for d, _ in self.markers:
            if not (self.start_date <= d <= self.end_date):
                raise ValueError(f"marker {d} outside {self.start_date}..{self.end_date}")

    @property
    def dates(self) -> list[date]:
        return [self.start_date + timedelta(days=i) for i in range(len(self.counts))]

    def index_of(self, d: date) -> int:
        return (d - self.start_date).days

    def marker_indices(self) -> list[tuple[int, str]]:
        return [(self.index_of(d), label) for d, label in self.markers]

    def peak(self) -> date:
        return self.dates[max(range(len(self.counts)), key=lambda i: (self.counts[i], -i))]

    def to_dict(self) -> dict:
        return {"start": self.start_date.isoformat(), "end": self.end_date.isoformat(),
                "counts": list(self.counts),
                "markers": [[d.isoformat(), label] for d, label in self.markers]}


def _as_date(d) -> date:
    if isinstance(d, datetime):
        return d.date()
    if isinstance(d, date):
        return d
    return date.fromisoformat(str(d))


def daily_counts(corpus: Corpus, start, end, markers: Iterable = (),
                 where: Callable[[MessageRecord], bool] | None = None) -> DailySeries:
    """Number of records per UTC day in [start, end], optionally filtered by ``where``."""
    start, end = _as_date(start), _as_date(end)
    if end < start:
        raise ValueError(f"end date {end} precedes start date {start}")
    counts = [0] * ((end - start).days + 1)
    for r in corpus.records:
        d = r.day
        if start <= d <= end and (where is None or where(r)):
            counts[(d - start).days] += 1
    marks = [(_as_date(d), str(label)) for d, label in markers]
    return DailySeries(start, end, counts, marks)
