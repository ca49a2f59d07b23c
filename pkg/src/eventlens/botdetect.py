"""Bot scores from an external provider, three-band thresholds, activity heuristics and share tables."""

from __future__ import annotations

import csv
import enum
import logging
import threading
import time
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Protocol, Sequence

from .corpus import Corpus

log = logging.getLogger(__name__)

TABLE_ROWS = ("generated_content", "rt_received", "like_count", "rt_generated",
              "follower_share_A", "follower_share_B")


class BotCategory(str, enum.Enum):
    HUMAN = "Human"
    POTENTIAL_BOT = "PotentialBot"
    BOT = "Bot"

    @property
    def rank(self) -> int:
        return _RANK[self]


_RANK = {BotCategory.HUMAN: 0, BotCategory.POTENTIAL_BOT: 1, BotCategory.BOT: 2}


class AbsenceReason(str, enum.Enum):
    ACCOUNT_GONE = "AccountGone"
    INSUFFICIENT_DATA = "InsufficientData"
    PROVIDER_ERROR = "ProviderError"


@dataclass(frozen=True)
class BotScore:
    username: str
    score: float | None = None
    absence_reason: AbsenceReason | None = None

    def __post_init__(self):
        if (self.score is None) == (self.absence_reason is None):
            raise ValueError("exactly one of score and absence_reason must be set")
        if self.score is not None and not (0.0 <= self.score <= 1.0):
            raise ValueError(f"score {self.score} outside [0, 1]")


def categorize_score(score: float, t1: float = 0.5, t2: float = 0.9) -> BotCategory:
    """Half-open bands: [0, t1] human, (t1, t2] potential bot, (t2, 1] bot."""
    if not (0.0 <= score <= 1.0):
        raise ValueError(f"score {score} outside [0, 1]")
    if score <= t1:
        return BotCategory.HUMAN
    if score <= t2:
        return BotCategory.POTENTIAL_BOT
    return BotCategory.BOT


def category_counts(scores: Iterable[BotScore], t1: float = 0.5, t2: float = 0.9) -> dict[str, int]:
    out = {c.value: 0 for c in BotCategory}
    out["absent"] = 0
    for s in scores:
        if s.score is None:
            out["absent"] += 1
        else:
            out[categorize_score(s.score, t1, t2).value] += 1
    return out


# --------------------------------------------------------------------------- #
# activity heuristics
# --------------------------------------------------------------------------- #

@dataclass
class ActivityProfile:
    username: str
    daily_counts: dict[date, int] = field(default_factory=dict)
    tweets: int = 0
    retweets_generated: int = 0
    retweets_received: int = 0
    likes_received: int = 0


def build_profiles(corpus: Corpus) -> dict[str, ActivityProfile]:
    """Per-author activity; engagement received is summed over the author's own (non-retweet) posts."""
    profiles: dict[str, ActivityProfile] = {}
    for r in corpus.records:
        p = profiles.get(r.user)
        if p is None:
            p = profiles[r.user] = ActivityProfile(r.user)
        p.daily_counts[r.day] = p.daily_counts.get(r.day, 0) + 1
        p.tweets += 1
        if r.is_retweet:
            p.retweets_generated += 1
        else:
            p.retweets_received += r.retweet_count
            p.likes_received += r.like_count
    return profiles


@dataclass(frozen=True)
class HeuristicFlag:
    flagged: bool
    reasons: frozenset[str] = frozenset()


def heuristic_flag(profile: ActivityProfile, username: str | None = None,
                   per_day: int = 50, min_days: int = 3) -> HeuristicFlag:
    name = profile.username if username is None else username
    reasons = set()
    if sum(1 for c in profile.daily_counts.values() if c >= per_day) >= min_days:
        reasons.add("Volume")
    if "bot" in name.casefold():
        reasons.add("Name")
    return HeuristicFlag(bool(reasons), frozenset(reasons))


def flag_accounts(corpus: Corpus, per_day: int = 50, min_days: int = 3) -> dict[str, HeuristicFlag]:
    return {u: heuristic_flag(p, per_day=per_day, min_days=min_days)
            for u, p in sorted(build_profiles(corpus).items())}


# --------------------------------------------------------------------------- #
# score providers
# --------------------------------------------------------------------------- #

class ScoreProvider(Protocol):
    def score(self, username: str) -> BotScore: ...


def _read_score_csv(path: str | Path) -> dict[str, BotScore]:
    out = {}
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            user = row["username"].strip().lstrip("@").casefold()
            raw = (row.get("score") or "").strip()
            reason = (row.get("absence_reason") or "").strip()
            if raw:
                out[user] = BotScore(user, float(raw))
            else:
                out[user] = BotScore(user, None, AbsenceReason(reason or "InsufficientData"))
    return out


class OfflineProvider:
    """Scores from a local ``username,score`` CSV; unknown accounts count as gone."""

    def __init__(self, path: str | Path):
        self.table = _read_score_csv(path)

    def score(self, username: str) -> BotScore:
        user = username.casefold()
        return self.table.get(user, BotScore(user, None, AbsenceReason.ACCOUNT_GONE))


class RateLimiter:
    def __init__(self, per_second: float):
        self.interval = 1.0 / per_second if per_second > 0 else 0.0
        self._lock = threading.Lock()
        self._next = 0.0

    def wait(self) -> None:
        if not self.interval:
            return
        with self._lock:
            now = time.monotonic()
            at = max(now, self._next)
            self._next = at + self.interval
        if at > now:
            time.sleep(at - now)


class HttpProvider:
    """``GET {base}/score?username=NAME`` returning ``{"username", "score"}``."""

    def __init__(self, base_url: str, rate_limit: float = 5.0, attempts: int = 3,
                 backoff: float = 0.5, timeout: float = 10.0, session=None):
        import requests

        self.base_url = base_url.rstrip("/")
        self.attempts = attempts
        self.backoff = backoff
        self.timeout = timeout
        self.session = session or requests.Session()
        self.limiter = RateLimiter(rate_limit)

    def score(self, username: str) -> BotScore:
        user = username.casefold()
        for attempt in range(self.attempts):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            self.limiter.wait()
            try:
                resp = self.session.get(f"{self.base_url}/score", params={"username": username},
                                        timeout=self.timeout)
            except Exception as exc:  # connection-level failure, retried
                log.debug("score request for %s failed: %s", username, exc)
                continue
            if resp.status_code == 404:
                return BotScore(user, None, AbsenceReason.ACCOUNT_GONE)
            if resp.status_code != 200:
                continue
            try:
                value = resp.json().get("score")
            except ValueError:
                continue
            if value is None:
                return BotScore(user, None, AbsenceReason.INSUFFICIENT_DATA)
            try:
                return BotScore(user, float(value))
            except ValueError:
                continue
        return BotScore(user, None, AbsenceReason.PROVIDER_ERROR)


class ScoreCache:
    """On-disk cache: ``username,score,absence_reason,fetched_at``. Provider errors are not cached."""

    FIELDS = ("username", "score", "absence_reason", "fetched_at")

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.entries: dict[str, tuple[BotScore, str]] = {}
        if self.path.exists():
            with open(self.path, encoding="utf-8", newline="") as fh:
                for row in csv.DictReader(fh):
                    raw = row["score"].strip()
                    s = (BotScore(row["username"], float(raw)) if raw else
                         BotScore(row["username"], None, AbsenceReason(row["absence_reason"])))
                    self.entries[row["username"]] = (s, row.get("fetched_at", ""))

    def get(self, username: str) -> BotScore | None:
        hit = self.entries.get(username.casefold())
        return hit[0] if hit else None

    def put(self, s: BotScore, fetched_at: str | None = None) -> None:
        if s.absence_reason is AbsenceReason.PROVIDER_ERROR:
            return
        stamp = fetched_at or datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
        self.entries[s.username] = (s, stamp)

    def save(self) -> None:
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.FIELDS)
            for user in sorted(self.entries):
                s, stamp = self.entries[user]
                w.writerow([user, "" if s.score is None else repr(s.score),
                            "" if s.absence_reason is None else s.absence_reason.value, stamp])


def fetch_scores(usernames: Sequence[str], provider: ScoreProvider, cache: ScoreCache | None = None,
                 workers: int = 4) -> list[BotScore]:
    """One score per requested name, in request order. Failures become absences, never exceptions."""
    def one(name: str) -> BotScore:
        try:
            return provider.score(name)
        except Exception as exc:
            log.warning("score provider failed for %s: %s", name, exc)
            return BotScore(name.casefold(), None, AbsenceReason.PROVIDER_ERROR)

    results: list[BotScore | None] = [cache.get(u) if cache else None for u in usernames]
    todo = [i for i, r in enumerate(results) if r is None]
    if todo:
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            fetched = list(pool.map(one, [usernames[i] for i in todo]))
        for i, s in zip(todo, fetched):
            results[i] = s
            if cache is not None:
                cache.put(s)
        if cache is not None:
            cache.save()
    return results  # type: ignore[return-value]


# --------------------------------------------------------------------------- #
# activity share tables
# --------------------------------------------------------------------------- #

def _pct(num: float, den: float) -> float:
    return 100.0 * num / den if den else 0.0


def activity_shares(corpus: Corpus, flagged: Iterable[str],
                    followers_a: Iterable[str] | None = None,
                    followers_b: Iterable[str] | None = None) -> dict[str, float]:
    """Activity-share percentages for one flagged set; denominators are whole-corpus totals.

    Follower sets default to the authors whose follower code marks them as following A (bit 1)
    or B (bit 2).
    """
    if not corpus.records:
        raise ValueError("activity shares need a non-empty corpus")
    flagged = {u.casefold() for u in flagged}
    authors = corpus.authors
    stray = flagged - authors
    if stray:
        log.warning("%d flagged accounts are not corpus authors and are ignored", len(stray))
    flagged &= authors
    if followers_a is None or followers_b is None:
        codes = {r.user: r.follower_code for r in corpus.records}
        followers_a = {u for u, c in codes.items() if c & 1}
        followers_b = {u for u, c in codes.items() if c & 2}
    fa = {u.casefold() for u in followers_a}
    fb = {u.casefold() for u in followers_b}
    tot = defaultdict(int)
    bot = defaultdict(int)
    for r in corpus.records:
        hit = r.user in flagged
        tot["generated_content"] += 1
        bot["generated_content"] += hit
        if r.is_retweet:
            tot["rt_generated"] += 1
            bot["rt_generated"] += hit
        else:
            tot["rt_received"] += r.retweet_count
            bot["rt_received"] += r.retweet_count * hit
            tot["like_count"] += r.like_count
            bot["like_count"] += r.like_count * hit
    shares = {k: _pct(bot[k], tot[k]) for k in TABLE_ROWS[:4]}
    shares["follower_share_A"] = _pct(len(flagged & fa), len(fa))
    shares["follower_share_B"] = _pct(len(flagged & fb), len(fb))
    return shares


@dataclass
class ActivityTable:
    columns: dict[str, dict[str, float]]

    def write_csv(self, path: str | Path) -> None:
        names = sorted(self.columns)
        with open(path, "w", encoding="utf-8", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["row"] + names)
            for row in TABLE_ROWS:
                w.writerow([row] + [f"{self.columns[n][row]:.6g}" for n in names])

    def to_dict(self) -> dict:
        return {n: dict(c) for n, c in sorted(self.columns.items())}


def bot_activity_table(corpus: Corpus, methods: Mapping[str, Iterable[str]] | Iterable[str],
                       followers_a=None, followers_b=None) -> ActivityTable:
    """One column per detection method; a bare set of names becomes a single column."""
    if not isinstance(methods, Mapping):
        methods = {"flagged": methods}
    return ActivityTable({name: activity_shares(corpus, users, followers_a, followers_b)
                          for name, users in methods.items()})


def confusion_table(flags: Mapping[str, HeuristicFlag], scores: Iterable[BotScore],
                    t1: float = 0.5, t2: float = 0.9) -> dict[str, dict[str, int]]:
    """Heuristic verdict (rows) against score band (columns) for accounts present in both."""
    band = {}
    for s in scores:
        band[s.username] = "absent" if s.score is None else categorize_score(s.score, t1, t2).value
    cols = [c.value for c in BotCategory] + ["absent"]
    table = {"flagged": Counter(), "not_flagged": Counter()}
    for user, f in flags.items():
        if user in band:
            table["flagged" if f.flagged else "not_flagged"][band[user]] += 1
    return {row: {c: table[row][c] for c in cols} for row in table}
