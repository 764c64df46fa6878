"""Command line surface: ingest, index, pipeline, vocab, query, curate,
events, serve.

State lives under a data directory (--data-dir or HEMEROCLIM_DATA, default
./hemeroclim-data); seed resources ship with the package.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .corpus import ArticleFilter, MetadataMapping
from .curation import AnalystAction, task_to_json
from .dates import parse_year_range
from .errors import HemeroclimError
from .events import (
    EventFilter,
    decade_buckets,
    event_to_record,
    export_events,
    export_heatmap,
    heatmap,
    most_reported,
    query_events,
    term_evolution,
)
from .query import GeoQueryContext, evaluate, parse_query, render_query
from .vocab import build_tf_matrix, export_tf_csv, top_terms
from .workspace import Workspace, load_config


def _print(data) -> None:
    print(json.dumps(data, ensure_ascii=False, indent=2))


def _date_range(args) -> tuple[int, int] | None:
    if getattr(args, "period", None):
        return parse_year_range(args.period)
    date_from = getattr(args, "date_from", None)
    date_to = getattr(args, "date_to", None)
    if date_from is not None or date_to is not None:
        return (date_from or 1, date_to or 9999)
    return None


def cmd_ingest(ws: Workspace, args) -> int:
    mapping = MetadataMapping.from_file(args.mapping) if args.mapping else None
    with open(args.input, encoding="utf-8") as fh:
        report = ws.store.ingest(fh, mapping)
    print(f"accepted: {report.accepted}")
    for line, reason in report.rejected:
        print(f"rejected line {line}: {reason}")
    return 0 if not report.rejected else 1


def cmd_index(ws: Workspace, args) -> int:
    index = ws.store.rebuild_index()
    print(f"indexed {len(index.doc_lengths)} articles, {len(index.postings)} terms")
    return 0


def cmd_pipeline(ws: Workspace, args) -> int:
    result = ws.run_pipeline(article_id=None if args.all else args.article)
    print(
        f"articles: {result['articles']}  candidates: {result['candidates']}"
        f"  tasks created: {result['tasks_created']}"
    )
    return 0


def cmd_vocab(ws: Workspace, args) -> int:
    if args.vocab_cmd == "add":
        entry = ws.vocab.add_term(args.term, args.country, args.register)
        _print({"term": entry.term, "country": entry.country, "register": entry.register})
    elif args.vocab_cmd == "link":
        relation = ws.vocab.link_terms(args.source, args.target, args.kind, country=args.country)
        _print(
            {
                "source": relation.source,
                "target": relation.target,
                "kind": relation.kind,
                "country": relation.country,
            }
        )
    elif args.vocab_cmd == "expand":
        expansion = ws.vocab.expand_term(args.term)
        _print({k: sorted(v) for k, v in expansion.items()})
    elif args.vocab_cmd == "tf":
        matrix = build_tf_matrix(
            ws.store,
            ArticleFilter(country=args.country, date_range=_date_range(args)),
            stop_terms=ws.stoplist if not args.no_stopwords else None,
        )
        if args.export:
            Path(args.export).write_text(export_tf_csv(matrix), encoding="utf-8")
            print(f"wrote {args.export}")
        else:
            _print({"docs": len(matrix.docs), "terms": len(matrix.terms), "top": top_terms(matrix, args.top)})
    return 0


def cmd_query(ws: Workspace, args) -> int:
    from .query import RewritePlan, extend_with_thesaurus, localize_query, rule_expand

    expr = parse_query(args.q)
    geo = GeoQueryContext.parse(args.geo) if args.geo else None
    plan = RewritePlan(
        original=expr,
        extended=extend_with_thesaurus(expr, ws.vocab, conjunctive_hypernyms=args.conjunctive_hypernyms)
        if args.extend
        else expr,
        localized={args.localize.upper(): localize_query(expr, args.localize, ws.vocab)}
        if args.localize
        else {},
        rule_variants=rule_expand(expr, ws.rules, geo, ws.gazetteer) if args.rules else [expr],
    )
    _print(plan.to_json())
    chosen = expr
    if args.execute == "extended":
        chosen = plan.extended
    elif args.execute.startswith("localized:"):
        chosen = plan.localized[args.execute.split(":", 1)[1].upper()]
    elif args.execute.startswith("variant:"):
        chosen = plan.rule_variants[int(args.execute.split(":", 1)[1])]
    results = evaluate(chosen, ws.store.index, ws.events, store=ws.store)
    print(f"-- executed: {render_query(chosen)}")
    for doc, score in results:
        print(f"{score}\t{doc}")
    return 0


def cmd_curate(ws: Workspace, args) -> int:
    if args.curate_cmd == "list":
        tasks = ws.queue.next_tasks(status=args.status or None, limit=args.limit)
        for task in tasks:
            triggers = ", ".join(t for t, _ in task.candidate.trigger_terms)
            print(f"{task.id}\t{task.status}\t{task.candidate.article_id}\t{triggers}")
    elif args.curate_cmd == "show":
        _print(task_to_json(ws.queue.get(args.task_id)))
    elif args.curate_cmd == "apply":
        action = AnalystAction.make(args.kind, json.loads(args.payload) if args.payload else {})
        task = ws.queue.apply_action(args.task_id, action, expected_version=args.version)
        _print(task_to_json(task))
    elif args.curate_cmd == "promote":
        event = ws.queue.promote(args.task_id, ws.events)
        _print(event_to_record(event))
    return 0


def cmd_events(ws: Workspace, args) -> int:
    flt = EventFilter(
        country=args.country,
        time_range=_date_range(args),
        name=getattr(args, "name", None),
        damage_term=getattr(args, "damage", None),
    )
    if args.events_cmd == "query":
        for event in query_events(ws.events, flt):
            _print(event_to_record(event))
    elif args.events_cmd == "heatmap":
        grid = heatmap(ws.events, flt, cell_deg=args.cell_deg)
        doc = export_heatmap(grid)
        if args.out:
            Path(args.out).write_text(json.dumps(doc, ensure_ascii=False), encoding="utf-8")
            print(f"wrote {args.out} ({len(doc['features'])} cells)")
        else:
            _print(doc)
    elif args.events_cmd == "famous":
        for event, count in most_reported(ws.events, flt, k=args.k):
            name = event.name or "(unnamed)"
            print(f"{count}\t{event.id}\t{str(event.date)}\t{name}")
    elif args.events_cmd == "evolution":
        buckets = decade_buckets(args.date_from or 1780, args.date_to or 1900, args.bucket_years)
        series = term_evolution(
            ws.store, ws.vocab, args.term, buckets, [args.country] if args.country else None
        )
        _print({"buckets": buckets, "series": series})
    elif args.events_cmd == "export":
        text = export_events(ws.events, flt, format=args.format)
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
            print(f"wrote {args.out}")
        else:
            sys.stdout.write(text)
    return 0


def cmd_serve(ws: Workspace, args) -> int:
    import uvicorn

    from .service import create_app

    host, port, token = args.host, args.port, args.token
    if args.config:
        config = load_config(args.config)
        host = config.get("host", host)
        port = int(config.get("port", port))
        token = config.get("auth_token", token)
        if config.get("data_dir") or config.get("resources"):
            ws = Workspace.open(
                config.get("data_dir", args.data_dir), resources=config.get("resources")
            )
    app = create_app(ws, auth_token=token)
    uvicorn.run(app, host=host, port=port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hemeroclim",
        description="Curate historical newspapers into a climatologic event history.",
    )
    parser.add_argument(
        "--data-dir",
        default=os.environ.get("HEMEROCLIM_DATA", "hemeroclim-data"),
        help="state directory (default: ./hemeroclim-data or $HEMEROCLIM_DATA)",
    )
    sub = parser.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("ingest", help="ingest line-delimited article records")
    p.add_argument("--input", required=True)
    p.add_argument("--mapping", help="JSON field-rename mapping file")
    p.set_defaults(fn=cmd_ingest)

    p = sub.add_parser("index", help="rebuild the inverted index")
    p.add_argument("--rebuild", action="store_true", default=True)
    p.set_defaults(fn=cmd_index)

    p = sub.add_parser("pipeline", help="run the preprocessing pipeline")
    run = p.add_subparsers(dest="pipeline_cmd", required=True).add_parser("run")
    group = run.add_mutually_exclusive_group(required=True)
    group.add_argument("--all", action="store_true")
    group.add_argument("--article")
    run.set_defaults(fn=cmd_pipeline)

    p = sub.add_parser("vocab", help="vocabulary operations")
    vsub = p.add_subparsers(dest="vocab_cmd", required=True)
    v = vsub.add_parser("add")
    v.add_argument("term")
    v.add_argument("--country", required=True)
    v.add_argument("--register", choices=("colloquial", "scientific"), default="colloquial")
    v.set_defaults(fn=cmd_vocab)
    v = vsub.add_parser("link")
    v.add_argument("source")
    v.add_argument("target")
    v.add_argument("--kind", required=True)
    v.add_argument("--country")
    v.set_defaults(fn=cmd_vocab)
    v = vsub.add_parser("expand")
    v.add_argument("term")
    v.set_defaults(fn=cmd_vocab)
    v = vsub.add_parser("tf")
    v.add_argument("--country")
    v.add_argument("--period")
    v.add_argument("--date-from", dest="date_from", type=int)
    v.add_argument("--date-to", dest="date_to", type=int)
    v.add_argument("--top", type=int, default=20)
    v.add_argument("--no-stopwords", action="store_true")
    v.add_argument("--export", help="write the full grid as CSV")
    v.set_defaults(fn=cmd_vocab)

    p = sub.add_parser("query", help="parse, rewrite and evaluate a query")
    qsub = p.add_subparsers(dest="query_cmd", required=True)
    q = qsub.add_parser("run")
    q.add_argument("--q", required=True)
    q.add_argument("--extend", action="store_true")
    q.add_argument("--localize", metavar="CC")
    q.add_argument("--rules", action="store_true")
    q.add_argument("--geo", metavar='"<place>,<radius_km>"')
    q.add_argument("--conjunctive-hypernyms", action="store_true", dest="conjunctive_hypernyms")
    q.add_argument("--execute", default="original",
                   help="original | extended | localized:CC | variant:N")
    q.set_defaults(fn=cmd_query)

    p = sub.add_parser("curate", help="human-in-the-loop curation")
    csub = p.add_subparsers(dest="curate_cmd", required=True)
    c = csub.add_parser("list")
    c.add_argument("--status", default="pending")
    c.add_argument("--limit", type=int, default=50)
    c.set_defaults(fn=cmd_curate)
    c = csub.add_parser("show")
    c.add_argument("task_id")
    c.set_defaults(fn=cmd_curate)
    c = csub.add_parser("apply")
    c.add_argument("task_id")
    c.add_argument("--kind", required=True)
    c.add_argument("--payload", help="JSON payload")
    c.add_argument("--version", type=int)
    c.set_defaults(fn=cmd_curate)
    c = csub.add_parser("promote")
    c.add_argument("task_id")
    c.set_defaults(fn=cmd_curate)

    p = sub.add_parser("events", help="event history queries and analytics")
    esub = p.add_subparsers(dest="events_cmd", required=True)
    for name in ("query", "heatmap", "famous", "evolution", "export"):
        e = esub.add_parser(name)
        e.add_argument("--country")
        e.add_argument("--period", help='e.g. "1800-1810" or "XIX c."')
        e.add_argument("--date-from", dest="date_from", type=int)
        e.add_argument("--date-to", dest="date_to", type=int)
        if name == "query":
            e.add_argument("--name")
            e.add_argument("--damage")
        if name == "heatmap":
            e.add_argument("--cell-deg", dest="cell_deg", type=float, default=1.0)
            e.add_argument("--out")
        if name == "famous":
            e.add_argument("--k", type=int, default=10)
        if name == "evolution":
            e.add_argument("--term", required=True)
            e.add_argument("--bucket-years", dest="bucket_years", type=int, default=10)
        if name == "export":
            e.add_argument("--format", default="jsonl", choices=("jsonl", "json"))
            e.add_argument("--out")
        e.set_defaults(fn=cmd_events)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--token", help="static auth token")
    p.add_argument("--config", help="JSON config file")
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        workspace = Workspace.open(args.data_dir)
        return args.fn(workspace, args)
    except HemeroclimError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
