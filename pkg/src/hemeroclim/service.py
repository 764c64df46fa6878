"""HTTP facade over the curation loop.

Every endpoint is a thin adapter around the module operations: identical
inputs through the service and through direct calls yield identical domain
results. Responses are enveloped as {"status": "ok", "data": ...} or
{"status": "error", "error": {code, message, details}}; list endpoints
paginate with an opaque cursor.
"""

from __future__ import annotations

import base64
import json

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .corpus import MetadataMapping, article_to_record
from .curation import AnalystAction, task_to_json
from .dates import parse_year_range
from .errors import HemeroclimError, NotFoundError, ParseError, ValidationError
from .events import (
    EventFilter,
    decade_buckets,
    event_to_record,
    export_heatmap,
    heatmap,
    most_reported,
    query_events,
    term_evolution,
)
from .pipeline import Leaf, Node
from .query import (
    GeoQueryContext,
    build_rewrite_plan,
    evaluate,
    parse_query,
    render_query,
)
from .vocab import build_tf_matrix, export_tf_csv, heat_grid, top_terms
from .workspace import Workspace

DEFAULT_PAGE = 50

_STATUS = {
    "not_found": 404,
    "conflict": 409,
    "version_conflict": 409,
    "task_closed": 409,
    "validation_failed": 422,
    "parse_error": 400,
    "unknown_span": 400,
    "unsupported_country": 400,
    "cycle": 400,
    "constraints_need_event_history": 400,
}


def ok(data) -> dict:
    return {"status": "ok", "data": data}


def _encode_cursor(offset: int) -> str:
    return base64.urlsafe_b64encode(f"o:{offset}".encode()).decode()


def _decode_cursor(cursor: str | None) -> int:
    if not cursor:
        return 0
    try:
        decoded = base64.urlsafe_b64decode(cursor.encode()).decode()
        kind, _, offset = decoded.partition(":")
        if kind != "o":
            raise ValueError(cursor)
        return int(offset)
    except Exception:
        raise ValidationError(f"invalid cursor {cursor!r}")


def _page(items: list, cursor: str | None, limit: int) -> dict:
    offset = _decode_cursor(cursor)
    window = items[offset:offset + limit]
    payload = {"items": window, "total": len(items)}
    if offset + limit < len(items):
        payload["next_cursor"] = _encode_cursor(offset + limit)
    return payload


def _tree_to_json(node) -> dict:
    if isinstance(node, Leaf):
        return {"term": node.term}
    data: dict = {"tag": node.tag, "children": [_tree_to_json(c) for c in node.children]}
    if isinstance(node, Node) and node.canonical:
        data["canonical"] = node.canonical
    return data


def create_app(workspace: Workspace, auth_token: str | None = None) -> FastAPI:
    app = FastAPI(title="hemeroclim", docs_url=None, redoc_url=None)
    app.state.workspace = workspace

    @app.exception_handler(HemeroclimError)
    async def domain_error(request: Request, exc: HemeroclimError):
        body = {
            "status": "error",
            "error": {"code": exc.code, "message": str(exc), "details": exc.details},
        }
        return JSONResponse(status_code=_STATUS.get(exc.code, 400), content=body)

    @app.middleware("http")
    async def check_token(request: Request, call_next):
        if auth_token and request.url.path != "/healthz":
            if request.headers.get("x-auth-token") != auth_token:
                return JSONResponse(
                    status_code=401,
                    content={
                        "status": "error",
                        "error": {"code": "unauthorized", "message": "bad or missing token", "details": None},
                    },
                )
        return await call_next(request)

    ws = workspace

    @app.get("/healthz")
    async def healthz():
        return ok({"articles": len(ws.store), "events": len(ws.events)})

    # -- corpus ---------------------------------------------------------------

    @app.post("/articles:ingest")
    async def ingest(body: dict):
        records = body.get("records")
        if records is None and "text" in body:
            lines = str(body["text"]).splitlines()
        elif isinstance(records, list):
            lines = [json.dumps(r, ensure_ascii=False) for r in records]
        else:
            raise ValidationError("body needs 'records' (list) or 'text' (lines)")
        mapping = MetadataMapping(body.get("mapping") or {})
        report = ws.store.ingest(lines, mapping)
        return ok({"accepted": report.accepted, "rejected": [
            {"line": line, "reason": reason} for line, reason in report.rejected
        ]})

    @app.get("/articles")
    async def list_articles(
        country: str | None = None,
        date_from: int | None = None,
        date_to: int | None = None,
        period: str | None = None,
        newspaper: str | None = None,
        cursor: str | None = None,
        limit: int = DEFAULT_PAGE,
    ):
        date_range = _date_range(date_from, date_to, period)
        articles = ws.store.list_articles(country=country, date_range=date_range, newspaper=newspaper)
        summaries = [
            {
                "id": a.id,
                "date": str(a.publication_date),
                "newspaper": a.newspaper.name,
                "country": a.newspaper.country,
            }
            for a in articles
        ]
        return ok(_page(summaries, cursor, limit))

    @app.get("/articles/{article_id}")
    async def get_article(article_id: str, view: str | None = None):
        article = ws.store.get(article_id)
        record = article_to_record(article)
        if view == "content_tree":
            tree = ws.content_tree(article_id)
            record["content_tree"] = {
                "article_id": tree.article_id,
                "sentences": [_tree_to_json(s.root) for s in tree.sentences],
            }
        return ok(record)

    # -- pipeline ---------------------------------------------------------------

    @app.post("/pipeline/run")
    async def pipeline_run(body: dict | None = None):
        body = body or {}
        article_id = body.get("article_id")
        return ok(ws.run_pipeline(article_id=article_id))

    # -- vocabulary ---------------------------------------------------------------

    @app.get("/vocab/terms")
    async def vocab_terms(country: str | None = None, term: str | None = None):
        if term:
            expansion = ws.vocab.expand_term(term)
            return ok(
                {
                    "term": term,
                    "synonyms": sorted(expansion["synonyms"]),
                    "hypernyms": sorted(expansion["hypernyms"]),
                    "hyponyms": sorted(expansion["hyponyms"]),
                }
            )
        entries = ws.vocab.entries(country)
        return ok(
            [
                {"term": e.term, "country": e.country, "register": e.register, "added_by": e.added_by}
                for e in entries
            ]
        )

    @app.post("/vocab/terms")
    async def vocab_add(body: dict):
        entry = ws.vocab.add_term(
            str(body.get("term", "")),
            str(body.get("country", "*")),
            str(body.get("register", "colloquial")),
        )
        return ok({"term": entry.term, "country": entry.country, "register": entry.register})

    @app.post("/vocab/links")
    async def vocab_link(body: dict):
        relation = ws.vocab.link_terms(
            str(body.get("source", body.get("from", ""))),
            str(body.get("target", body.get("to", ""))),
            str(body.get("kind", "synonym")),
            country=body.get("country"),
        )
        return ok(
            {
                "source": relation.source,
                "target": relation.target,
                "kind": relation.kind,
                "country": relation.country,
            }
        )

    @app.get("/vocab/tf")
    async def vocab_tf(
        country: str | None = None,
        date_from: int | None = None,
        date_to: int | None = None,
        period: str | None = None,
        top: int = 20,
        stopwords: bool = True,
        format: str = "json",
    ):
        from .corpus import ArticleFilter

        date_range = _date_range(date_from, date_to, period)
        matrix = build_tf_matrix(
            ws.store,
            ArticleFilter(country=country, date_range=date_range),
            stop_terms=ws.stoplist if stopwords else None,
        )
        if format == "csv":
            return ok({"csv": export_tf_csv(matrix)})
        return ok(
            {
                "docs": matrix.docs,
                "terms": matrix.terms,
                "counts": matrix.counts.tolist(),
                "normalized": [[round(v, 6) for v in row] for row in heat_grid(matrix).tolist()],
                "top": top_terms(matrix, top),
            }
        )

    # -- query ---------------------------------------------------------------------

    @app.post("/query")
    async def run_query(body: dict):
        text = str(body.get("q", ""))
        expr = parse_query(text)
        countries = body.get("localize")
        if isinstance(countries, str):
            countries = [countries]
        geo = None
        if body.get("geo"):
            geo_body = body["geo"]
            if isinstance(geo_body, str):
                geo = GeoQueryContext.parse(geo_body)
            else:
                geo = GeoQueryContext(
                    str(geo_body.get("place", "")), geo_body.get("radius_km")
                )
        plan = build_rewrite_plan(
            expr,
            ws.vocab,
            ws.rules if body.get("rules", True) else [],
            countries=countries,
            geo_context=geo,
            gazetteer=ws.gazetteer,
            conjunctive_hypernyms=bool(body.get("conjunctive_hypernyms", False)),
        )
        chosen = _choose_variant(plan, body.get("execute", "original"))
        results = evaluate(chosen, ws.store.index, ws.events, store=ws.store)
        return ok(
            {
                "plan": plan.to_json(),
                "executed": render_query(chosen),
                "results": [{"article_id": doc, "score": score} for doc, score in results],
            }
        )

    # -- curation ---------------------------------------------------------------------

    @app.get("/curation/tasks")
    async def curation_tasks(
        status: str | None = "pending", cursor: str | None = None, limit: int = DEFAULT_PAGE
    ):
        tasks = ws.queue.next_tasks(status=status or None, limit=10**9)
        return ok(_page([task_to_json(t) for t in tasks], cursor, limit))

    @app.get("/curation/tasks/{task_id}")
    async def curation_task(task_id: str):
        return ok(task_to_json(ws.queue.get(task_id)))

    @app.post("/curation/tasks/{task_id}/actions")
    async def curation_action(task_id: str, body: dict):
        action = AnalystAction.make(str(body.get("kind", "")), body.get("payload") or {})
        version = body.get("version")
        task = ws.queue.apply_action(
            task_id, action, expected_version=int(version) if version is not None else None
        )
        return ok(task_to_json(task))

    @app.post("/curation/tasks/{task_id}:promote")
    async def curation_promote(task_id: str):
        event = ws.queue.promote(task_id, ws.events)
        return ok(event_to_record(event))

    # -- events -----------------------------------------------------------------------

    @app.get("/events")
    async def events_list(
        country: str | None = None,
        period: str | None = None,
        date_from: int | None = None,
        date_to: int | None = None,
        name: str | None = None,
        damage: str | None = None,
        center_lat: float | None = None,
        center_lon: float | None = None,
        radius_km: float | None = None,
        cursor: str | None = None,
        limit: int = DEFAULT_PAGE,
    ):
        flt = EventFilter(
            country=country,
            time_range=_date_range(date_from, date_to, period),
            name=name,
            damage_term=damage,
            center=(center_lat, center_lon) if center_lat is not None and center_lon is not None else None,
            radius_km=radius_km,
        )
        events = [event_to_record(e) for e in query_events(ws.events, flt)]
        return ok(_page(events, cursor, limit))

    @app.get("/events/heatmap")
    async def events_heatmap(
        cell_deg: float = 1.0,
        period: str | None = None,
        date_from: int | None = None,
        date_to: int | None = None,
        country: str | None = None,
    ):
        flt = EventFilter(country=country, time_range=_date_range(date_from, date_to, period))
        grid = heatmap(ws.events, flt, cell_deg=cell_deg)
        return ok(export_heatmap(grid))

    @app.get("/events/famous")
    async def events_famous(
        k: int = 10,
        country: str | None = None,
        period: str | None = None,
        date_from: int | None = None,
        date_to: int | None = None,
    ):
        flt = EventFilter(country=country, time_range=_date_range(date_from, date_to, period))
        ranked = most_reported(ws.events, flt, k=k)
        return ok(
            [
                {"event": event_to_record(e), "article_count": n}
                for e, n in ranked
            ]
        )

    @app.get("/events/evolution")
    async def events_evolution(
        term: str,
        date_from: int = 1780,
        date_to: int = 1900,
        bucket_years: int = 10,
        country: str | None = None,
    ):
        buckets = decade_buckets(date_from, date_to, bucket_years)
        countries = [country] if country else None
        series = term_evolution(ws.store, ws.vocab, term, buckets, countries)
        return ok(
            {
                "term": term,
                "buckets": [[start, end] for start, end in buckets],
                "series": series,
            }
        )

    return app


def _date_range(
    date_from: int | None, date_to: int | None, period: str | None
) -> tuple[int, int] | None:
    if period:
        return parse_year_range(period)
    if date_from is not None or date_to is not None:
        return (date_from if date_from is not None else 1, date_to if date_to is not None else 9999)
    return None


def _choose_variant(plan, which: str):
    """Pick the query to execute: "original", "extended", "localized:CC" or
    "variant:<index>"."""
    if which == "original":
        return plan.original
    if which == "extended":
        return plan.extended
    kind, _, arg = str(which).partition(":")
    if kind == "localized":
        country = arg.upper()
        if country not in plan.localized:
            raise NotFoundError(f"no localized variant for {country!r}")
        return plan.localized[country]
    if kind == "variant":
        try:
            return plan.rule_variants[int(arg)]
        except (ValueError, IndexError):
            raise NotFoundError(f"no rule variant {arg!r}")
    raise ValidationError(f"unknown execute choice {which!r}")
