"""HTTP/JSON API over a frozen :class:`~newsevents.store.SearchEngine`.

All responses are JSON; errors come back as ``{"error", "message"}`` with
400 for bad query parameters and 404 for unknown ids. The engine is
immutable, so request handling is lock-free and safely concurrent.
"""

from __future__ import annotations

from datetime import date
from typing import Optional

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .store import PropertyFilter, QueryError, SearchEngine, SearchQuery, UnknownIdError


def parse_filter_param(raw: str) -> PropertyFilter:
    """Parse one ``PID:comparator:value`` filter parameter."""
    parts = raw.split(":", 2)
    if len(parts) != 3:
        raise QueryError(f"filter must look like P1120:gte:50, got {raw!r}")
    pid, comparator, value = parts
    parsed: object = value
    if comparator in ("gte", "lte"):
        try:
            parsed = float(value)
        except ValueError:
            raise QueryError(f"filter value for {pid} must be numeric, got {value!r}")
    return PropertyFilter(pid=pid, comparator=comparator, value=parsed)


def _parse_date(raw: Optional[str], name: str) -> Optional[date]:
    if raw is None or raw == "":
        return None
    try:
        return date.fromisoformat(raw)
    except ValueError:
        raise QueryError(f"{name} must be YYYY-MM-DD, got {raw!r}")


def create_app(engine: SearchEngine) -> FastAPI:
    app = FastAPI(title="newsevents search", docs_url=None, redoc_url=None)
    # the browser client is served separately; the API itself is read-only
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["GET"], allow_headers=["*"]
    )

    @app.exception_handler(QueryError)
    async def on_query_error(request: Request, exc: QueryError):
        return JSONResponse(status_code=400, content={"error": "bad_request", "message": str(exc)})

    @app.exception_handler(UnknownIdError)
    async def on_unknown_id(request: Request, exc: UnknownIdError):
        return JSONResponse(status_code=404, content={"error": "not_found", "message": str(exc)})

    @app.get("/api/search")
    def search(
        q: Optional[str] = None,
        schema: Optional[str] = None,
        location: Optional[str] = None,
        date_from: Optional[str] = Query(default=None, alias="from"),
        date_to: Optional[str] = Query(default=None, alias="to"),
        filter: list[str] = Query(default=[]),
        page: int = 1,
        size: int = 10,
    ):
        query = SearchQuery(
            keywords=q,
            schema_id=schema or None,
            location=location or None,
            date_from=_parse_date(date_from, "from"),
            date_to=_parse_date(date_to, "to"),
            filters=tuple(parse_filter_param(raw) for raw in filter),
            page=page,
            page_size=size,
        )
        result = engine.search(query)
        return {
            "total": result.total,
            "page": result.page,
            "size": result.page_size,
            "hits": [
                {
                    "article_id": h.article_id,
                    "headline": h.headline,
                    "created": h.created,
                    "schema_id": h.schema_id,
                    "snippet": h.snippet,
                    "score": h.score,
                }
                for h in result.hits
            ],
        }

    @app.get("/api/articles/{article_id:path}")
    def article_detail(article_id: str):
        return engine.article_detail(article_id)

    @app.get("/api/schemas")
    def schema_list():
        return engine.schema_list()

    @app.get("/api/schemas/{schema_id}")
    def schema_detail(schema_id: str):
        return engine.schema_detail(schema_id)

    @app.get("/api/events/{qid}")
    def event_detail(qid: str):
        return engine.event_detail(qid)

    return app
