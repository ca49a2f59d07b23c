"""Run configuration and the cached, phase-by-phase analysis pipeline."""

from __future__ import annotations

import json
import logging
import time
from collections import Counter
from dataclasses import dataclass, field, replace
from datetime import date
from pathlib import Path
from typing import Any, Callable, Iterable

from . import botdetect, corpus as corp, graphs, sentiment, stats, streams, tailfit

log = logging.getLogger(__name__)

PHASES = ("ingest", "sentiment", "network", "streams", "bots", "fit", "report")
DEPENDS = {"ingest": (), "sentiment": ("ingest",), "network": ("ingest",), "streams": ("ingest",),
           "bots": ("ingest",), "fit": ("network",), "report": ("ingest",)}
REPORT_SECTIONS = {"corpus": "ingest", "sentiment": "sentiment", "engagement": "sentiment",
                   "network": "network", "tailfit": "fit", "bots": "bots", "streams": "streams"}


class ConfigError(ValueError):
    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


class PhaseError(RuntimeError):
    pass


class DependencyError(PhaseError):
    pass


# --------------------------------------------------------------------------- #
# configuration
# --------------------------------------------------------------------------- #

@dataclass
class RunConfig:
    base_dir: Path
    raw: dict
    inputs: list[Path]
    out: Path
    seed: int = 0
    lang: str = "all"
    window: tuple[date, date] | None = None
    markers: list = field(default_factory=list)
    selectors: corp.SelectorSet = corp.DEFAULT_SELECTORS
    normalization: Path | None = None
    lexicons: dict | None = None
    categories: Path | None = None
    ego: list[str] = field(default_factory=list)
    streams: Path | None = None
    annotations: Path | None = None
    followers: dict[str, Path] = field(default_factory=dict)
    targets: dict[str, list[str]] = field(default_factory=dict)
    bots: dict = field(default_factory=dict)
    tailfit: dict = field(default_factory=dict)
    workers: int = 1
    offline: bool = False

    def snapshot(self) -> dict:
        """The resolved configuration with every seed materialised; paths stay as given."""
        snap = dict(self.raw)
        snap.update({"seed": self.seed, "lang": self.lang, "offline": self.offline,
                     "workers": self.workers})
        tf = dict(snap.get("tailfit", {}))
        tf.update(self.tailfit)
        snap["tailfit"] = tf
        snap.pop("out", None)
        return snap

    @property
    def seeds(self) -> dict[str, int]:
        return {"run": self.seed, "tailfit": int(self.tailfit["seed"]), "communities": self.seed}


def load_config(path: str | Path | None, overrides: dict | None = None) -> RunConfig:
    """Read a JSON config; flag overrides win. Paths resolve relative to the config file."""
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    problems: list[str] = []
    raw: dict = {}
    base = Path.cwd()
    if path is not None:
        p = Path(path)
        try:
            raw = json.loads(p.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError([f"config: file not found: {p}"]) from None
        except json.JSONDecodeError as exc:
            raise ConfigError([f"config: invalid JSON: {exc}"]) from None
        if not isinstance(raw, dict):
            raise ConfigError(["config: top level must be an object"])
        base = p.resolve().parent
    raw = dict(raw)
    for k in ("seed", "lang"):
        if k in overrides:
            raw[k] = overrides[k]

    def path_of(key: str, value, required: bool = False) -> Path | None:
        if value in (None, ""):
            if required:
                problems.append(f"{key}: required")
            return None
        q = Path(value)
        q = q if q.is_absolute() else base / q
        if not q.exists():
            problems.append(f"{key}: path does not exist: {value}")
        return q

    inputs = [path_of(f"inputs[{i}]", v) for i, v in enumerate(raw.get("inputs") or [])]
    if not inputs:
        problems.append("inputs: at least one input file is required")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        problems.append(f"seed: must be a non-negative integer, got {seed!r}")
        seed = 0
    lang = raw.get("lang", "all")
    if lang not in ("de", "en", "all"):
        problems.append(f"lang: must be de, en or all, got {lang!r}")
    window = None
    if "window" in raw:
        try:
            window = (date.fromisoformat(raw["window"]["start"]), date.fromisoformat(raw["window"]["end"]))
            if window[1] < window[0]:
                problems.append("window: end precedes start")
        except (KeyError, TypeError, ValueError):
            problems.append("window: needs ISO 'start' and 'end' dates")
    markers = []
    for m in raw.get("markers", []):
        try:
            markers.append((date.fromisoformat(m[0]), str(m[1])))
        except (TypeError, ValueError, IndexError):
            problems.append(f"markers: bad entry {m!r}")
    selectors = corp.DEFAULT_SELECTORS
    if "selectors" in raw:
        try:
            s = raw["selectors"]
            selectors = corp.SelectorSet.build(s.get("hashtags", []), s.get("conjunctions", []))
        except (ValueError, AttributeError) as exc:
            problems.append(f"selectors: {exc}")
    lexicons = None
    if "lexicons" in raw:
        lx = raw["lexicons"]
        lexicons = {kind: {lg: path_of(f"lexicons.{kind}.{lg}", v, True) for lg, v in lx.get(kind, {}).items()}
                    for kind in ("sentiment", "emotion")}
    followers = {}
    for side in ("a", "b"):
        v = (raw.get("followers") or {}).get(side)
        if v is not None:
            followers[side] = path_of(f"followers.{side}", v)
    targets = raw.get("targets", {})
    if not isinstance(targets, dict) or any(not v for v in targets.values()):
        problems.append("targets: map each target name to a non-empty pattern list")
        targets = {}
    bots = dict(raw.get("bots", {"provider": "offline"}))
    provider = bots.get("provider", "offline")
    if provider not in ("offline", "http"):
        problems.append(f"bots.provider: must be offline or http, got {provider!r}")
    if provider == "offline" and bots.get("scores"):
        bots["scores"] = path_of("bots.scores", bots["scores"])
    if provider == "http" and not bots.get("url"):
        problems.append("bots.url: required for the http provider")
    th = bots.get("thresholds", [0.5, 0.9])
    if not (isinstance(th, list) and len(th) == 2 and 0 <= th[0] < th[1] <= 1):
        problems.append("bots.thresholds: need [t1, t2] with 0 <= t1 < t2 <= 1")
    tf = {"n_sims": 5000, "seed": seed, "significance": 0.1, "families": list(tailfit.FAMILIES),
          "comparison_xmin": "min"}
    tf.update(raw.get("tailfit", {}))
    if "seed" not in raw.get("tailfit", {}) or "seed" in overrides:
        tf["seed"] = seed
    if not isinstance(tf["n_sims"], int) or tf["n_sims"] < 100:
        problems.append("tailfit.n_sims: must be an integer >= 100")
    if not (0 < float(tf["significance"]) < 1):
        problems.append("tailfit.significance: must lie in (0, 1)")
    bad_fam = set(tf["families"]) - set(tailfit.FAMILIES)
    if bad_fam:
        problems.append(f"tailfit.families: unknown {sorted(bad_fam)}")
    out_value = overrides.get("out") or raw.get("out") or "out"
    out = Path(out_value)
    if not out.is_absolute():
        out = (Path.cwd() if "out" in overrides else base) / out
    workers = raw.get("workers", 1)
    if not isinstance(workers, int) or workers < 1:
        problems.append("workers: must be a positive integer")
    cfg = RunConfig(
        base_dir=base, raw=raw, inputs=[p for p in inputs if p], out=out, seed=seed, lang=lang,
        window=window, markers=markers, selectors=selectors,
        normalization=path_of("normalization", raw.get("normalization")),
        lexicons=lexicons, categories=path_of("categories", raw.get("categories")),
        ego=list(raw.get("ego", [])), streams=path_of("streams", raw.get("streams")),
        annotations=path_of("annotations", raw.get("annotations")), followers=followers,
        targets={k: list(v) for k, v in targets.items()}, bots=bots, tailfit=tf,
        workers=workers if isinstance(workers, int) and workers > 0 else 1,
        offline=bool(overrides.get("offline", raw.get("offline", False))),
    )
    if cfg.offline and provider == "http":
        problems.append("bots.provider: http provider is not allowed with --offline")
    if problems:
        raise ConfigError(problems)
    return cfg


# --------------------------------------------------------------------------- #
# caches
# --------------------------------------------------------------------------- #

class Cache:
    def __init__(self, out: Path):
        self.dir = out / "cache"

    def path(self, phase: str) -> Path:
        return self.dir / f"{phase}.json"

    def has(self, phase: str) -> bool:
        return self.path(phase).exists() and not (self.dir / f"{phase}.failed").exists()

    def load(self, phase: str) -> Any:
        if not self.has(phase):
            raise DependencyError(f"missing cache for phase '{phase}' ({self.path(phase)}); "
                                  f"run that phase first")
        return json.loads(self.path(phase).read_text(encoding="utf-8"))

    def save(self, phase: str, data: Any) -> None:
        self.dir.mkdir(parents=True, exist_ok=True)
        self.path(phase).write_text(stats.dumps(data), encoding="utf-8")

    def mark_failed(self, phase: str, message: str) -> None:
        self.dir.mkdir(parents=True, exist_ok=True)
        (self.dir / f"{phase}.failed").write_text(message + "\n", encoding="utf-8")

    def clear_failed(self, phase: str) -> None:
        (self.dir / f"{phase}.failed").unlink(missing_ok=True)

    def corpus(self) -> corp.Corpus:
        self.load("ingest")
        return corp.ingest(self.dir / "corpus.jsonl")


# --------------------------------------------------------------------------- #
# phases
# --------------------------------------------------------------------------- #

def _resources(cfg: RunConfig) -> sentiment.Resources:
    if cfg.lexicons:
        return sentiment.Resources.from_paths(cfg.lexicons["sentiment"], cfg.lexicons["emotion"])
    return sentiment.Resources.bundled()


def _window(cfg: RunConfig, c: corp.Corpus) -> tuple[date, date]:
    if cfg.window:
        return cfg.window
    days = [r.day for r in c.records]
    if not days:
        raise PhaseError("empty corpus and no window configured")
    return min(days), max(days)


def phase_ingest(cfg: RunConfig, cache: Cache) -> dict:
    raw = corp.merge([corp.ingest(p) for p in cfg.inputs])
    n_raw = len(raw) + len(raw.rejects)
    deduped = corp.deduplicate(raw)
    table = corp.NormalizationTable.load(cfg.normalization) if cfg.normalization else corp.NormalizationTable.default()
    normed = corp.normalize_corpus(deduped, table)
    selected = corp.filter_by_selectors(normed, cfg.selectors)
    if cfg.followers:
        fa = corp.load_usernames(cfg.followers["a"]) if "a" in cfg.followers else set()
        fb = corp.load_usernames(cfg.followers["b"]) if "b" in cfg.followers else set()
        selected = corp.assign_follower_codes(selected, fa, fb)
    final = corp.select_language(selected, cfg.lang)
    cache.dir.mkdir(parents=True, exist_ok=True)
    final.write_jsonl(cache.dir / "corpus.jsonl")
    meta = {
        "sources": [p.name for p in cfg.inputs],
        "input_rows": n_raw,
        "rejected": len(raw.rejects),
        "rejects": [{"line": r.line, "reason": r.reason} for r in raw.rejects],
        "duplicates_removed": deduped.dedup_removed,
        "after_dedup": len(deduped),
        "after_selectors": len(selected),
        "records": len(final),
        "languages": dict(sorted(Counter(r.language for r in selected.records).items())),
        "follower_codes": dict(sorted(Counter(str(r.follower_code) for r in final.records).items())),
        "authors": len(final.authors),
    }
    cache.save("ingest", meta)
    return meta


def phase_sentiment(cfg: RunConfig, cache: Cache) -> dict:
    c = cache.corpus()
    res = _resources(cfg)
    scored = sentiment.score_corpus(c, res)
    cats = Counter((r.language, s.category.value) for r, s in zip(c.records, scored))
    langs = sorted({r.language for r in c.records})
    categories = {lg: {pc.value: cats[(lg, pc.value)] for pc in sentiment.PolarityCategory} for lg in langs}
    emotions = {lg: sentiment.total_emotions(s.emotions for r, s in zip(c.records, scored)
                                             if r.language == lg).to_dict() for lg in langs}
    unsupported = sum(s.unsupported_language for s in scored)
    by_key = {s.key: s for s in scored}
    originals = [r for r in c.records if not r.is_retweet]
    corr = {}
    if len(originals) >= 2:
        rts = [r.retweet_count for r in originals]
        corr["retweets_likes"] = stats.pearson(rts, [r.like_count for r in originals])
        for e in sentiment.EMOTIONS:
            present = [int(by_key[r.key].emotions[e] > 0) for r in originals]
            try:
                corr[f"{e}_replies"] = stats.pearson(present, [r.reply_count or 0 for r in originals])
            except stats.UndefinedCorrelation:
                corr[f"{e}_replies"] = None
    engagement = {
        "by_category": [e.to_dict() for e in stats.engagement_summary(c, lambda r: by_key[r.key].category.value)],
        "by_follower_code": [e.to_dict() for e in stats.engagement_summary(c, lambda r: r.follower_code)],
    }
    toward, matrix = {}, []
    if cfg.targets:
        for name, pats in cfg.targets.items():
            others = [p for n, p in cfg.targets.items() if n != name]
            ts = sentiment.sentiment_toward(c, pats, res, others)
            toward[name] = {"mentions": len(ts), "ambiguous": sum(t.ambiguous for t in ts),
                            "categories": dict(sorted(Counter(t.category.value for t in ts).items()))}
            matcher = sentiment.compile_patterns(pats)
            engagement[f"mentions_{name}"] = [e.to_dict() for e in stats.engagement_summary(
                c, lambda r, m=matcher: "mentions" if sentiment.mentions_target(r.text, m) else "other")]
        groups = {"followers_a": [1], "followers_b": [2], "both": [3], "neither": [0]}
        matrix = stats.opinion_matrix(c, groups, cfg.targets, res).to_rows()
    data = {"categories": categories, "emotions": emotions, "unsupported_language": unsupported,
            "correlations": corr, "toward": toward, "opinion_matrix": matrix, "engagement": engagement}
    cache.save("sentiment", data)
    return data


def phase_network(cfg: RunConfig, cache: Cache) -> dict:
    c = cache.corpus()
    mg = graphs.build_mention_graph(c)
    hg = graphs.build_hashtag_graph(c)
    gdir = cfg.out / "graphs"
    gdir.mkdir(parents=True, exist_ok=True)
    categories = graphs.load_category_map(cfg.categories) if cfg.categories else None
    comm = graphs.detect_communities(hg, seed=cfg.seed)
    graphs.write_edge_list(mg, gdir / "mentions.csv")
    graphs.write_edge_list(hg, gdir / "hashtags.csv")
    graphs.write_graphml(hg, gdir / "hashtags.graphml", categories, comm.membership)
    in_deg = graphs.degree_sequence(mg, "in")
    out_deg = graphs.degree_sequence(mg, "out")
    bc = graphs.betweenness(mg)
    top_bc = sorted(bc.items(), key=lambda kv: (-kv[1], kv[0]))[:10]
    egos = {}
    for v in cfg.ego:
        try:
            full = graphs.ego_network(hg, v, categories)
        except graphs.VertexNotFound:
            egos[v] = {"error": "not found"}
            continue
        entry = {"vertices": full.graph.n, "edges": full.graph.m,
                 "density": graphs.density(full.graph) if full.graph.n >= 2 else None}
        if categories is not None:
            kept = graphs.ego_network(hg, v, categories, keep=graphs.REPORTED_CATEGORIES)
            entry["filtered"] = {"vertices": kept.graph.n, "edges": kept.graph.m,
                                 "density": graphs.density(kept.graph) if kept.graph.n >= 2 else None}
            try:
                entry["shares"] = {k.value: x for k, x in graphs.hashtag_category_shares(full).items()}
            except graphs.GraphError as exc:
                entry["shares"] = {"error": str(exc)}
        egos[v] = entry
    hub = max(in_deg, key=lambda kv: (kv[1], kv[0])) if in_deg else None
    data = {
        "mention": graphs.graph_stats(mg),
        "hashtag": graphs.graph_stats(hg),
        "communities": {"count": comm.n_communities, "modularity": comm.modularity},
        "top_in_degree": {"vertex": hub[0], "in_degree": hub[1]} if hub else None,
        "top_betweenness": [{"vertex": v, "betweenness": x} for v, x in top_bc],
        "ego": egos,
        "degrees": {"in": [d for _, d in in_deg], "out": [d for _, d in out_deg]},
    }
    cache.save("network", data)
    return data


def phase_fit(cfg: RunConfig, cache: Cache) -> dict:
    net = cache.load("network")
    tf = cfg.tailfit
    sel = tailfit.SelectionConfig(n_sims=int(tf["n_sims"]), seed=int(tf["seed"]),
                                  significance=float(tf["significance"]), workers=cfg.workers,
                                  comparison_xmin=tf.get("comparison_xmin", "min"))
    data = {}
    for i, direction in enumerate(("out", "in")):
        sample = tailfit.DegreeSample.from_degrees(net["degrees"][direction])
        conf = replace(sel, seed=tailfit.family_seed(sel.seed, 100 + i))
        try:
            rep = tailfit.select_best(sample, tf["families"], conf)
            data[f"{direction}_degree"] = rep.to_dict()
        except tailfit.FitError as exc:
            data[f"{direction}_degree"] = {"error": str(exc)}
    cache.save("fit", data)
    return data


def phase_bots(cfg: RunConfig, cache: Cache) -> dict:
    c = cache.corpus()
    flags = botdetect.flag_accounts(c)
    flagged = sorted(u for u, f in flags.items() if f.flagged)
    users = sorted(c.authors)
    b = cfg.bots
    t1, t2 = b.get("thresholds", [0.5, 0.9])
    if b.get("provider", "offline") == "http":
        provider = botdetect.HttpProvider(b["url"], rate_limit=float(b.get("rate_limit", 5.0)))
        cache_file = botdetect.ScoreCache(cfg.out / "cache" / "bot_scores_cache.csv")
        scores = botdetect.fetch_scores(users, provider, cache_file, workers=cfg.workers)
    elif b.get("scores"):
        scores = botdetect.fetch_scores(users, botdetect.OfflineProvider(b["scores"]), workers=1)
    else:
        scores = []
    score_bots = sorted(s.username for s in scores
                        if s.score is not None and botdetect.categorize_score(s.score, t1, t2) == botdetect.BotCategory.BOT)
    methods = {"heuristic": flagged}
    if scores:
        methods["score"] = score_bots
    table = botdetect.bot_activity_table(c, methods)
    table.write_csv(cfg.out / "bot_activity.csv")
    data = {
        "flagged": [{"username": u, "reasons": sorted(flags[u].reasons)} for u in flagged],
        "score_bands": botdetect.category_counts(scores, t1, t2),
        "activity_table": table.to_dict(),
        "confusion": botdetect.confusion_table(flags, scores, t1, t2) if scores else None,
        "thresholds": [t1, t2],
    }
    cache.save("bots", data)
    return data


def phase_streams(cfg: RunConfig, cache: Cache) -> dict:
    c = cache.corpus()
    start, end = _window(cfg, c)
    data: dict = {"window": [start.isoformat(), end.isoformat()]}
    if cfg.streams:
        defs = streams.load_streams(cfg.streams)
        series = {s.name: streams.track_stream(c, s, start, end, cfg.markers) for s in defs}
        streams.write_series_csv(series, cfg.out / "streams_daily.csv")
        data["streams"] = {n: {**s.to_dict(), "total": sum(s.counts), "peak": s.peak().isoformat()}
                           for n, s in sorted(series.items())}
    if cfg.annotations:
        ann = streams.AnnotationSet.load(cfg.annotations)
        data["annotations"] = streams.join_annotations(c, ann).to_dict()
    originals = [r for r in c.records if not r.is_retweet]
    if originals:
        counts = Counter(r.content_key for r in c.records if r.is_retweet)
        top = max(originals, key=lambda r: (counts.get(r.content_key, 0), r.key))
        traj = streams.retweet_trajectory(c, top.key)
        traj.write_csv(cfg.out / "trajectory.csv")
        data["top_trajectory"] = traj.to_dict()
    cache.save("streams", data)
    return data


def phase_report(cfg: RunConfig, cache: Cache) -> dict:
    bundle = stats.ReportBundle(config=cfg.snapshot(), seeds=cfg.seeds)
    ingest_meta = cache.load("ingest")
    bundle.add("corpus", "corpus", ingest_meta)
    if cache.has("sentiment"):
        s = cache.load("sentiment")
        eng = s.pop("engagement")
        bundle.add("sentiment", "sentiment", s, rows=s["opinion_matrix"] or None)
        bundle.add("engagement", "stats", eng, rows=eng["by_category"])
    if cache.has("network"):
        n = cache.load("network")
        n.pop("degrees")
        bundle.add("network", "graphs", n)
    if cache.has("fit"):
        bundle.add("tailfit", "tailfit", cache.load("fit"), config=cfg.tailfit)
    if cache.has("bots"):
        b = cache.load("bots")
        rows = [{"row": r, **{m: b["activity_table"][m][r] for m in b["activity_table"]}}
                for r in botdetect.TABLE_ROWS]
        bundle.add("bots", "botdetect", b, config={"thresholds": b["thresholds"]}, rows=rows)
    if cache.has("streams"):
        bundle.add("streams", "streams", cache.load("streams"))
    stats.emit_report(bundle, cfg.out / "report")
    return {"sections": sorted(bundle.sections)}


PHASE_FUNCS: dict[str, Callable[[RunConfig, Cache], dict]] = {
    "ingest": phase_ingest, "sentiment": phase_sentiment, "network": phase_network,
    "fit": phase_fit, "bots": phase_bots, "streams": phase_streams, "report": phase_report,
}


def order_phases(requested: Iterable[str]) -> list[str]:
    req = set(requested)
    bad = req - set(PHASES)
    if bad:
        raise ConfigError([f"phases: unknown phase(s) {sorted(bad)}"])
    return [p for p in PHASES if p in req]


@dataclass
class RunResult:
    status: int
    completed: list[str]
    failed: str | None = None
    message: str = ""
    timings: dict[str, float] = field(default_factory=dict)


def run(cfg: RunConfig, phases: Iterable[str] = PHASES) -> RunResult:
    """Run phases in dependency order. Each phase reads its inputs only from the cache."""
    order = order_phases(phases)
    cache = Cache(cfg.out)
    cfg.out.mkdir(parents=True, exist_ok=True)
    (cfg.out / "config_snapshot.json").write_text(stats.dumps(cfg.snapshot()), encoding="utf-8")
    done, timings = [], {}
    for phase in order:
        t0 = time.perf_counter()
        try:
            for dep in DEPENDS[phase]:
                if not cache.has(dep):
                    raise DependencyError(f"phase '{phase}' needs the '{dep}' cache "
                                          f"({cache.path(dep)}), which is missing")
            PHASE_FUNCS[phase](cfg, cache)
        except Exception as exc:
            msg = f"{phase}: {exc}"
            if not isinstance(exc, DependencyError):
                cache.mark_failed(phase, msg)
            log.error("phase failed: %s", msg)
            return RunResult(1, done, phase, msg, timings)
        cache.clear_failed(phase)
        timings[phase] = time.perf_counter() - t0
        done.append(phase)
        log.info("phase %s done in %.2fs", phase, timings[phase])
    return RunResult(0, done, None, "ok", timings)
