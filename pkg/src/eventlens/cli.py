"""Command-line entry point: ``eventlens <subcommand> --config FILE``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import graphs, pipeline, stats

EXIT_OK, EXIT_RUNTIME, EXIT_CONFIG = 0, 1, 2

SINGLE_PHASE = ("ingest", "sentiment", "network", "fit", "bots", "streams", "report")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--seed", type=int, help="override the run seed")
    p.add_argument("--lang", choices=("de", "en", "all"), help="language scope")
    p.add_argument("--out", help="output directory")
    p.add_argument("--offline", action="store_true", default=None,
                   help="forbid network access by the bot-score provider")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eventlens", description="Social-media event analysis pipeline.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SINGLE_PHASE:
        _common(sub.add_parser(name, help=f"run the {name} phase from cached inputs"))
    r = sub.add_parser("run", help="run several phases in dependency order")
    _common(r)
    r.add_argument("--phases", default=",".join(pipeline.PHASES),
                   help="comma-separated subset of " + ",".join(pipeline.PHASES))
    e = sub.add_parser("ego", help="ego network of one vertex from the cached corpus")
    _common(e)
    e.add_argument("vertex")
    e.add_argument("--graph", choices=("hashtag", "mention"), default="hashtag")
    e.add_argument("--filter", action="store_true", help="drop neighbours labelled Other")
    return parser


def _ego(cfg: pipeline.RunConfig, args) -> dict:
    cache = pipeline.Cache(cfg.out)
    c = cache.corpus()
    g = graphs.build_hashtag_graph(c) if args.graph == "hashtag" else graphs.build_mention_graph(c)
    cats = graphs.load_category_map(cfg.categories) if cfg.categories else None
    keep = graphs.REPORTED_CATEGORIES if args.filter and cats else None
    ego = graphs.ego_network(g, args.vertex, cats, keep)
    out = {"ego": ego.ego, "vertices": ego.graph.n, "edges": ego.graph.m,
           "density": graphs.density(ego.graph) if ego.graph.n >= 2 else None}
    if ego.categories:
        try:
            out["shares"] = {k.value: v for k, v in graphs.hashtag_category_shares(ego).items()}
        except graphs.GraphError:
            pass
    return out


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {"seed": args.seed, "lang": args.lang, "out": args.out, "offline": args.offline}
    try:
        cfg = pipeline.load_config(args.config, overrides)
        if args.command == "run":
            phases = pipeline.order_phases(p.strip() for p in args.phases.split(",") if p.strip())
        elif args.command in SINGLE_PHASE:
            phases = [args.command]
        else:
            phases = []
    except pipeline.ConfigError as exc:
        for problem in exc.problems:
            print(f"config error: {problem}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "ego":
        try:
            result = _ego(cfg, args)
        except (pipeline.PhaseError, graphs.VertexNotFound, graphs.GraphError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_RUNTIME
        sys.stdout.write(stats.dumps(result))
        return EXIT_OK
    res = pipeline.run(cfg, phases)
    summary = {"status": res.status, "completed": res.completed, "failed": res.failed,
               "message": res.message, "out": str(cfg.out)}
    if res.status:
        print(f"error: {res.message}", file=sys.stderr)
    print(json.dumps(summary, sort_keys=True))
    return res.status


if __name__ == "__main__":
    sys.exit(main())
