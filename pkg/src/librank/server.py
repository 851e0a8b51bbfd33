"""HTTP API over the search engine, consumed by the browser UI.

Endpoints (JSON in and out):

    GET  /api/search?q=...&location=&group=&facet=dim:value&page=&page_size=&session=
    GET  /api/records/{record_id}
    POST /api/click            {"session_id", "record_id", "position"}
    GET  /api/facets?q=...&facet=dim:value
    POST /api/admin/recompute
    GET  /api/admin/stats

When no explicit location is given it is derived from the client address
against the configured campus/library ranges, defaulting to home. A static
UI directory, when present, is served at the root path.
"""

from __future__ import annotations

import ipaddress
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .config import ServiceConfig
from .engine import SearchEngine, result_page_to_dict
from .catalog import record_to_dict
from .errors import EmptyQueryError, EngineStateError
from .ranking import UserContext, UserGroup, UserLocation


class ClickReport(BaseModel):
    session_id: str
    record_id: str
    position: int


def resolve_location(client_host: str | None, config: ServiceConfig) -> UserLocation:
    """Map the client address onto home/campus/library via configured ranges."""
    if not client_host:
        return UserLocation.HOME
    try:
        address = ipaddress.ip_address(client_host)
    except ValueError:
        return UserLocation.HOME
    for cidr in config.campus_networks:
        if address in ipaddress.ip_network(cidr, strict=False):
            return UserLocation.CAMPUS
    for cidr in config.library_networks:
        if address in ipaddress.ip_network(cidr, strict=False):
            return UserLocation.LIBRARY
    return UserLocation.HOME


def _parse_facets(raw: list[str]) -> list[tuple[str, str]]:
    filters = []
    for item in raw:
        if ":" not in item:
            raise HTTPException(status_code=400, detail=f"bad facet filter: {item!r}")
        dim, value = item.split(":", 1)
        filters.append((dim, value))
    return filters


def _context(
    request: Request,
    engine: SearchEngine,
    location: str | None,
    group: str | None,
) -> UserContext:
    if location:
        try:
            user_location = UserLocation(location)
        except ValueError:
            raise HTTPException(status_code=400, detail=f"unknown location {location!r}")
    else:
        client_host = request.client.host if request.client else None
        user_location = resolve_location(client_host, engine.config.service)
    user_group = UserGroup.ANONYMOUS
    if group:
        try:
            user_group = UserGroup(group)
        except ValueError:
            raise HTTPException(status_code=400, detail=f"unknown group {group!r}")
    return UserContext(user_location=user_location, user_group=user_group)


def create_app(engine: SearchEngine, ui_dir: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="librank", docs_url=None, redoc_url=None)

    @app.get("/api/search")
    def search(
        request: Request,
        q: str,
        location: str | None = None,
        group: str | None = None,
        facet: list[str] = Query(default=[]),
        page: int = 1,
        page_size: int | None = None,
        session: str = "-",
    ):
        ctx = _context(request, engine, location, group)
        try:
            result = engine.search(
                q,
                ctx=ctx,
                facet_filters=_parse_facets(facet),
                page=page,
                page_size=page_size,
                session_id=session,
            )
        except EmptyQueryError:
            raise HTTPException(status_code=400, detail="empty query")
        except EngineStateError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return result_page_to_dict(result)

    @app.get("/api/records/{record_id}")
    def get_record(record_id: str):
        record = engine.get_record(record_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"unknown record {record_id!r}")
        return record_to_dict(record)

    @app.post("/api/click")
    def click(report: ClickReport):
        try:
            logged = engine.record_click(
                report.session_id, report.record_id, report.position
            )
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return {"ok": True, "logged": logged}

    @app.get("/api/facets")
    def facets(q: str, facet: list[str] = Query(default=[])):
        try:
            facet_set = engine.facet_overview(q, _parse_facets(facet))
        except EmptyQueryError:
            raise HTTPException(status_code=400, detail="empty query")
        except EngineStateError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        return {
            dim: [[value, count] for value, count in values]
            for dim, values in facet_set.as_dict().items()
        }

    @app.post("/api/admin/recompute")
    def recompute():
        summary = engine.admin_recompute()
        return {
            "records": summary.records,
            "popularity_computed_at": (
                summary.popularity_computed_at.isoformat()
                if summary.popularity_computed_at
                else None
            ),
            "freshness_computed_at": (
                summary.freshness_computed_at.isoformat()
                if summary.freshness_computed_at
                else None
            ),
            "intent_cache_entries": summary.intent_cache_entries,
            "log_events_scanned": summary.log_events_scanned,
        }

    @app.get("/api/admin/stats")
    def stats():
        return engine.stats_summary()

    if ui_dir:
        ui_path = Path(ui_dir)
        if ui_path.is_dir():
            app.mount("/", StaticFiles(directory=ui_path, html=True), name="ui")

    return app
