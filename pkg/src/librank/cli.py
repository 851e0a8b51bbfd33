"""Command-line interface.

    librank index <catalog-file>       load a catalog, build the snapshots
    librank usage <stats-file>         load usage counters
    librank search <query> [...]       run a search against the data dir
    librank serve [--addr HOST:PORT]   run the HTTP service + UI
    librank logs analyze <log-file>    offline log-mining reports
    librank recompute                  refresh snapshots and intent cache

State lives in --data-dir (default ./librank_data). The config file is
taken from --config or the LIBRANK_CONFIG environment variable.
"""

from __future__ import annotations

import sys
from pathlib import Path

import click

from .config import AppConfig, load_config
from .engine import SearchEngine, result_page_to_dict
from .errors import EmptyQueryError, EngineStateError, LibrankError
from .logmining import (
    click_preferences,
    failure_click_paths,
    format_query_stats,
    parse_log,
    query_stats,
    serialize_event,
    zero_result_report,
)
from .ranking import UserContext, UserGroup, UserLocation


def _engine(ctx: click.Context) -> SearchEngine:
    config: AppConfig = ctx.obj["config"]
    return SearchEngine(config=config, data_dir=ctx.obj["data_dir"])


@click.group()
@click.option(
    "--data-dir",
    default="librank_data",
    show_default=True,
    type=click.Path(path_type=Path),
    help="Directory holding catalog, snapshots and the event log.",
)
@click.option(
    "--config",
    "config_path",
    default=None,
    type=click.Path(exists=True, path_type=Path),
    help="Config file (YAML); LIBRANK_CONFIG also works.",
)
@click.pass_context
def main(ctx: click.Context, data_dir: Path, config_path: Path | None) -> None:
    """Library catalog search and ranking engine."""
    ctx.ensure_object(dict)
    ctx.obj["data_dir"] = data_dir
    ctx.obj["config"] = load_config(config_path)


@main.command()
@click.argument("catalog_file", type=click.Path(exists=True, path_type=Path))
@click.pass_context
def index(ctx: click.Context, catalog_file: Path) -> None:
    """Ingest a catalog file (one JSON record per line)."""
    engine = _engine(ctx)
    report = engine.ingest_catalog(catalog_file)
    click.echo(f"loaded {report.loaded} records, {len(report.rejects)} rejected")
    for reject in report.rejects:
        click.echo(f"  line {reject.line_no}: {reject.reason}", err=True)


@main.command()
@click.argument("stats_file", type=click.Path(exists=True, path_type=Path))
@click.pass_context
def usage(ctx: click.Context, stats_file: Path) -> None:
    """Ingest a usage-stats file and refresh popularity/freshness."""
    engine = _engine(ctx)
    try:
        report = engine.ingest_usage(stats_file)
    except EngineStateError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"loaded {report.loaded} stats rows, {len(report.rejects)} rejected")
    for reject in report.rejects:
        click.echo(f"  line {reject.line_no}: {reject.reason}", err=True)


@main.command()
@click.argument("query")
@click.option(
    "--location",
    type=click.Choice([loc.value for loc in UserLocation]),
    default=UserLocation.HOME.value,
    show_default=True,
)
@click.option(
    "--group",
    type=click.Choice([g.value for g in UserGroup]),
    default=UserGroup.ANONYMOUS.value,
    show_default=True,
)
@click.option("--facet", "facets", multiple=True, help="dimension:value, repeatable.")
@click.option("--page", default=1, show_default=True)
@click.option("--page-size", default=None, type=int)
@click.option("--session", default="cli", show_default=True)
@click.option("--json", "as_json", is_flag=True, help="Print the raw wire response.")
@click.pass_context
def search(
    ctx: click.Context,
    query: str,
    location: str,
    group: str,
    facets: tuple[str, ...],
    page: int,
    page_size: int | None,
    session: str,
    as_json: bool,
) -> None:
    """Search the indexed catalog."""
    engine = _engine(ctx)
    filters = []
    for item in facets:
        if ":" not in item:
            raise click.ClickException(f"bad facet filter {item!r}, expected dim:value")
        dim, value = item.split(":", 1)
        filters.append((dim, value))
    user_ctx = UserContext(UserLocation(location), UserGroup(group))
    try:
        result = engine.search(
            query,
            ctx=user_ctx,
            facet_filters=filters,
            page=page,
            page_size=page_size,
            session_id=session,
        )
    except (EmptyQueryError, EngineStateError) as exc:
        raise click.ClickException(str(exc))

    if as_json:
        import json as json_mod

        click.echo(
            json_mod.dumps(
                result_page_to_dict(result), indent=2, ensure_ascii=False
            )
        )
        return

    click.echo(
        f"intent: {result.intent.kind.value} "
        f"(confidence {result.intent.confidence:.2f}, {result.intent.evidence}); "
        f"{result.total_results} results in {result.total_clusters} clusters"
    )
    if result.zero_result:
        click.echo("no results")
        if result.suggestions:
            click.echo("try: " + ", ".join(result.suggestions))
        return
    offset = (result.page - 1) * result.page_size
    for i, cluster in enumerate(result.clusters):
        description = result.descriptions.get(cluster.representative)
        first_line = description.text.splitlines()[0] if description else cluster.representative
        click.echo(f"{offset + i + 1:3d}. [{cluster.score:.4f}] {first_line}")
        for member in cluster.members[1:]:
            click.echo(f"       also: {member}")


@main.command()
@click.option("--addr", default="127.0.0.1:8080", show_default=True)
@click.option(
    "--ui-dir",
    default=None,
    type=click.Path(path_type=Path),
    help="Static UI directory; defaults to ./frontend/dist when present.",
)
@click.pass_context
def serve(ctx: click.Context, addr: str, ui_dir: Path | None) -> None:
    """Run the HTTP search service."""
    import uvicorn

    from .server import create_app

    host, _, port_text = addr.partition(":")
    port = int(port_text) if port_text else 8080
    if ui_dir is None:
        default_ui = Path("frontend") / "dist"
        ui_dir = default_ui if default_ui.is_dir() else None
    engine = _engine(ctx)
    app = create_app(engine, ui_dir=ui_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=port, log_level="info")


@main.group()
def logs() -> None:
    """Offline transaction-log analyses."""


@logs.command()
@click.argument("log_file", type=click.Path(exists=True, path_type=Path))
@click.option(
    "--report",
    type=click.Choice(["zero", "clicks", "stats", "paths"]),
    default="stats",
    show_default=True,
)
def analyze(log_file: Path, report: str) -> None:
    """Mine a transaction log for one of the standard reports."""
    with open(log_file, encoding="utf-8") as fh:
        events, rejects = parse_log(fh)
    if rejects:
        click.echo(f"{len(rejects)} malformed lines:", err=True)
        for reject in rejects:
            click.echo(f"  line {reject.line_no}: {reject.reason}", err=True)

    if report == "zero":
        rows = zero_result_report(events)
        if not rows:
            click.echo("no zero-result queries")
        for query, count in rows:
            click.echo(f"{count:5d}  {query}")
    elif report == "clicks":
        pairs = click_preferences(events)
        if not pairs:
            click.echo("no preference pairs")
        for pair in pairs:
            click.echo(
                f"{pair.weight:5d}  [{pair.query}] {pair.preferred} > {pair.over}"
            )
    elif report == "paths":
        paths = failure_click_paths(events)
        if not paths:
            click.echo("no failure paths")
        for query in sorted(paths):
            click.echo(f"[{query}] ({len(paths[query])} sessions)")
            for i, path in enumerate(paths[query], start=1):
                click.echo(f"  session path {i}: {len(path)} events")
                for event in path:
                    click.echo(f"    {serialize_event(event)}")
    else:
        click.echo(format_query_stats(query_stats(events)))


@main.command()
@click.pass_context
def recompute(ctx: click.Context) -> None:
    """Refresh popularity, freshness and the intent cache from logs."""
    engine = _engine(ctx)
    summary = engine.admin_recompute()
    click.echo(
        f"records: {summary.records}; "
        f"intent cache entries: {summary.intent_cache_entries}; "
        f"log events scanned: {summary.log_events_scanned}"
    )
    if summary.popularity_computed_at:
        click.echo(f"popularity computed at {summary.popularity_computed_at.isoformat()}")
    if summary.freshness_computed_at:
        click.echo(f"freshness computed at {summary.freshness_computed_at.isoformat()}")


def run() -> None:
    try:
        main(obj={})
    except LibrankError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


if __name__ == "__main__":
    run()
