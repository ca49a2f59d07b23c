"""Correlations, engagement summaries, opinion tallies and deterministic report output."""

from __future__ import annotations

import csv
import enum
import json
import math
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .corpus import Corpus, MessageRecord
from .sentiment import PolarityCategory, Resources, sentiment_toward


class UndefinedCorrelation(ValueError):
    pass


def pearson(x: Sequence[float], y: Sequence[float]) -> float:
    """Product-moment correlation of raw values.

    When exactly one input is constant there is no linear association to measure and
    0.0 is returned; both constant is an error.
    """
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("pearson needs two equal-length vectors")
    if a.size < 2:
        raise ValueError("pearson needs at least two observations")
    da, db = a - a.mean(), b - b.mean()
    sa, sb = math.sqrt(float(da @ da)), math.sqrt(float(db @ db))
    const_a = sa == 0.0 or np.ptp(a) == 0
    const_b = sb == 0.0 or np.ptp(b) == 0
    if const_a and const_b:
        raise UndefinedCorrelation("both inputs are constant")
    if const_a or const_b:
        return 0.0
    r = float(da @ db) / (sa * sb)
    return max(-1.0, min(1.0, r))


@dataclass(frozen=True)
class EngagementSummary:
    group: str
    n: int
    mean_retweets: float
    mean_replies: float
    mean_likes: float

    def to_dict(self) -> dict:
        return {"group": self.group, "n": self.n, "mean_retweets": self.mean_retweets,
                "mean_replies": self.mean_replies, "mean_likes": self.mean_likes}


def engagement_summary(corpus: Corpus, grouping: Callable[[MessageRecord], Any]) -> list[EngagementSummary]:
    """Mean retweet, reply and like counts per group. Missing reply counts are read as 0."""
    acc: dict[str, list[int]] = defaultdict(lambda: [0, 0, 0, 0])
    for r in corpus.records:
        a = acc[str(grouping(r))]
        a[0] += 1
        a[1] += r.retweet_count
        a[2] += r.reply_count or 0
        a[3] += r.like_count
    return [EngagementSummary(g, n, rt / n, rp / n, lk / n)
            for g, (n, rt, rp, lk) in sorted(acc.items())]


# --------------------------------------------------------------------------- #
# opinion matrix
# --------------------------------------------------------------------------- #

_CELL_FIELDS = ("positive", "negative", "overlap", "neutral", "ambiguous")


@dataclass
class OpinionMatrix:
    """Counts per (follower group, target); overlap is its own column, not folded into either."""

    cells: dict[tuple[str, str], dict[str, int]]
    unit: str = "tweets"

    def cell(self, group: str, target: str) -> dict[str, int]:
        return self.cells[(group, target)]

    def to_rows(self) -> list[dict]:
        return [{"group": g, "target": t, **c} for (g, t), c in sorted(self.cells.items())]


def opinion_matrix(corpus: Corpus, groups: Mapping[str, Iterable[int]],
                   targets: Mapping[str, Iterable[str]], res: Resources,
                   unit: str = "tweets") -> OpinionMatrix:
    """Polarity of target mentions split by author follower group.

    ``groups`` maps a group name to the follower codes it contains. With ``unit="users"`` a
    cell counts distinct authors per category instead of tweets.
    """
    if unit not in ("tweets", "users"):
        raise ValueError("unit must be 'tweets' or 'users'")
    by_key = {r.key: r for r in corpus.records}
    targets = {name: list(p) for name, p in targets.items()}
    cells: dict[tuple[str, str], dict[str, int]] = {}
    for tname, patterns in targets.items():
        others = [p for n, p in targets.items() if n != tname]
        scored = sentiment_toward(corpus, patterns, res, others)
        for gname, codes in groups.items():
            codes = set(codes)
            seen: dict[str, set] = defaultdict(set)
            cell = dict.fromkeys(_CELL_FIELDS, 0)
            for s in scored:
                rec = by_key[s.key]
                if rec.follower_code not in codes:
                    continue
                col = {PolarityCategory.POSITIVE: "positive", PolarityCategory.NEGATIVE: "negative",
                       PolarityCategory.OVERLAP: "overlap", PolarityCategory.NEUTRAL: "neutral"}[s.category]
                cols = [col] + (["ambiguous"] if s.ambiguous else [])
                for c in cols:
                    if unit == "users":
                        if rec.user in seen[c]:
                            continue
                        seen[c].add(rec.user)
                    cell[c] += 1
            cells[(gname, tname)] = cell
    return OpinionMatrix(cells, unit)


# --------------------------------------------------------------------------- #
# reports
# --------------------------------------------------------------------------- #

def round_sig(value: Any, digits: int = 6) -> Any:
    """Recursively round floats to ``digits`` significant digits for byte-stable output."""
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return None
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return float(f"{v:.{digits}g}")
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, Mapping):
        return {str(k.value if isinstance(k, enum.Enum) else k): round_sig(v, digits)
                for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_sig(v, digits) for v in value]
    if hasattr(value, "isoformat"):
        return value.isoformat()
    raise TypeError(f"cannot serialise {type(value).__name__}")


def dumps(obj: Any) -> str:
    return json.dumps(round_sig(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


@dataclass
class Section:
    module: str
    data: Any
    config: dict = field(default_factory=dict)
    rows: list[dict] | None = None


@dataclass
class ReportBundle:
    sections: dict[str, Section] = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    seeds: dict[str, int] = field(default_factory=dict)

    def add(self, name: str, module: str, data: Any, config: dict | None = None,
            rows: list[dict] | None = None) -> None:
        self.sections[name] = Section(module, data, config or {}, rows)


def _write_rows(rows: list[dict], path: Path) -> None:
    cols = sorted({k for r in rows for k in r})
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in rows:
            w.writerow(["" if r.get(c) is None else _csv_cell(r.get(c)) for c in cols])


def _csv_cell(v: Any) -> str:
    v = round_sig(v)
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True, ensure_ascii=False)
    return str(v)


def emit_report(bundle: ReportBundle, out_dir: str | Path) -> list[Path]:
    """Write ``index.json`` plus one JSON (and optional CSV) file per section."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    index = {"config": bundle.config, "seeds": bundle.seeds, "sections": {}}
    for name in sorted(bundle.sections):
        sec = bundle.sections[name]
        files = [f"{name}.json"]
        p = out / f"{name}.json"
        p.write_text(dumps({"module": sec.module, "config": sec.config, "data": sec.data}),
                     encoding="utf-8")
        written.append(p)
        if sec.rows is not None:
            q = out / f"{name}.csv"
            _write_rows(sec.rows, q)
            files.append(q.name)
            written.append(q)
        index["sections"][name] = {"module": sec.module, "files": files}
    p = out / "index.json"
    p.write_text(dumps(index), encoding="utf-8")
    written.append(p)
    return written
