"""Engine state and lifecycle: ingestion, generations, search, click
logging and recomputation.

All query-time reads go against one immutable Generation (index plus
precomputed score snapshots plus intent cache); ingest and recompute build
a complete new generation and swap it in atomically under a lock, so a
search never mixes snapshots from two generations. The log sink is
append-only and best-effort: it must never fail the user-facing path.
"""

from __future__ import annotations

import json
import math
import os
import threading
from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from pathlib import Path
from typing import Any, Mapping, Sequence

from .catalog import (
    BibRecord,
    UsageStats,
    record_from_dict,
    record_to_dict,
    stats_from_dict,
    stats_to_dict,
    validate_record,
    validate_stats,
)
from .config import AppConfig
from .errors import EmptyQueryError, EngineStateError
from .intent import (
    Intent,
    classify_from_clicks,
    classify_heuristic,
    load_intent_cache,
    save_intent_cache,
)
from .logmining import (
    EventKind,
    LogEvent,
    is_log_safe,
    parse_log,
    sanitize_query,
    serialize_event,
)
from .ranking import (
    FreshnessProfile,
    PopularityScores,
    ScoredResult,
    UserContext,
    combine,
    compute_freshness_profile,
    compute_popularity_scores,
)
from .shaping import (
    Description,
    FacetSet,
    ResultPage,
    build_facets,
    cluster_versions,
    describe_result,
    diversify_top,
    matches_facet,
)
from .textindex import InvertedIndex, build_index, load_index, save_index, tokenize

CATALOG_FILE = "catalog.jsonl"
USAGE_FILE = "usage.jsonl"
INDEX_FILE = "index.json"
INTENT_CACHE_FILE = "intent_cache.tsv"
EVENTS_FILE = "events.log"

MAX_SUGGESTIONS = 3


@dataclass(frozen=True)
class IngestReject:
    line_no: int
    reason: str


@dataclass(frozen=True)
class IngestReport:
    loaded: int
    rejects: list[IngestReject]


@dataclass(frozen=True)
class RecomputeSummary:
    records: int
    popularity_computed_at: datetime | None
    freshness_computed_at: datetime | None
    intent_cache_entries: int
    log_events_scanned: int


@dataclass(frozen=True)
class Generation:
    """One immutable, mutually consistent set of snapshots."""

    records: dict[str, BibRecord]
    stats: dict[str, UsageStats]
    index: InvertedIndex
    popularity: PopularityScores
    freshness: FreshnessProfile
    intent_cache: dict[str, Intent]
    created_at: datetime


class LogSink:
    """Append-only event sink; file backed when a path is given.

    Writes are best-effort: failures bump the overflow counter instead of
    propagating into the search/click path.
    """

    def __init__(self, path: Path | None = None):
        self.path = path
        self.overflow_count = 0
        self._memory: list[LogEvent] = []
        self._lock = threading.Lock()

    def append(self, event: LogEvent) -> bool:
        line = serialize_event(event)
        with self._lock:
            if self.path is None:
                self._memory.append(event)
                return True
            try:
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(line + "\n")
                return True
            except OSError:
                self.overflow_count += 1
                return False

    def read_events(self) -> list[LogEvent]:
        with self._lock:
            if self.path is None:
                return list(self._memory)
            if not self.path.exists():
                return []
            with open(self.path, encoding="utf-8") as fh:
                events, _rejects = parse_log(fh)
            return events


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


def _atomic_write(path: Path, content: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(content, encoding="utf-8")
    os.replace(tmp, path)


class SearchEngine:
    """The deployable artifact: catalog, snapshots, search and logging.

    `data_dir` enables persistence: ingested catalogs, the index snapshot,
    the intent cache and the event log live there and are reloaded on
    startup. Without it the engine is purely in-memory (events are kept in
    a list so analyses still work).
    """

    def __init__(self, config: AppConfig | None = None, data_dir: str | Path | None = None):
        self.config = config or AppConfig()
        self.config.validate()
        self.data_dir = Path(data_dir) if data_dir else None
        if self.data_dir:
            self.data_dir.mkdir(parents=True, exist_ok=True)
        self.log_sink = LogSink(self.data_dir / EVENTS_FILE if self.data_dir else None)
        self._generation: Generation | None = None
        self._swap_lock = threading.Lock()
        if self.data_dir:
            self._load_from_disk()

    # -- state ----------------------------------------------------------

    @property
    def generation(self) -> Generation | None:
        return self._generation

    def _require_generation(self) -> Generation:
        gen = self._generation
        if gen is None:
            raise EngineStateError("no catalog ingested")
        return gen

    def _swap(self, generation: Generation) -> None:
        with self._swap_lock:
            self._generation = generation

    def _build_generation(
        self,
        records: dict[str, BibRecord],
        stats: dict[str, UsageStats],
        index: InvertedIndex | None = None,
        intent_cache: dict[str, Intent] | None = None,
        now: date | None = None,
    ) -> Generation:
        record_list = list(records.values())
        stats_list = list(stats.values())
        built = index if index is not None else build_index(record_list)
        popularity = compute_popularity_scores(record_list, stats_list, self.config.ranking)
        freshness = compute_freshness_profile(
            record_list, stats_list, now or date.today(), self.config.ranking
        )
        previous = self._generation
        cache = intent_cache
        if cache is None:
            cache = dict(previous.intent_cache) if previous else {}
        return Generation(
            records=records,
            stats=stats,
            index=built,
            popularity=popularity,
            freshness=freshness,
            intent_cache=cache,
            created_at=_utcnow(),
        )

    # -- ingestion ------------------------------------------------------

    def ingest_catalog(self, path: str | Path) -> IngestReport:
        """Load a catalog file, rebuild every snapshot, swap atomically.

        The file replaces the current catalog. Lines that do not parse or
        violate record invariants are rejected with their line numbers;
        duplicate record_ids reject the later line, naming both.
        """
        records: dict[str, BibRecord] = {}
        first_line: dict[str, int] = {}
        rejects: list[IngestReject] = []
        with open(path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line:
                    continue
                try:
                    record = record_from_dict(json.loads(line))
                except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
                    rejects.append(IngestReject(line_no, f"unparseable record: {exc}"))
                    continue
                violations = validate_record(record)
                if violations:
                    rejects.append(IngestReject(line_no, "; ".join(violations)))
                    continue
                if record.record_id in records:
                    rejects.append(
                        IngestReject(
                            line_no,
                            f"duplicate record_id {record.record_id} "
                            f"(first seen at line {first_line[record.record_id]})",
                        )
                    )
                    continue
                records[record.record_id] = record
                first_line[record.record_id] = line_no

        previous = self._generation
        stats: dict[str, UsageStats] = {}
        if previous:
            stats = {
                rid: row for rid, row in previous.stats.items() if rid in records
            }
        generation = self._build_generation(records, stats)
        self._swap(generation)
        self._persist_generation()
        return IngestReport(loaded=len(records), rejects=rejects)

    def ingest_usage(self, path: str | Path) -> IngestReport:
        """Load a usage-stats file and recompute popularity and freshness.

        The file replaces the current stats set (stats exports are
        periodic full dumps); rows naming unknown records or violating
        counter invariants are rejected. Re-ingesting an identical file
        yields identical snapshot contents.
        """
        gen = self._require_generation()
        stats: dict[str, UsageStats] = {}
        rejects: list[IngestReject] = []
        with open(path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line:
                    continue
                try:
                    row = stats_from_dict(json.loads(line))
                except (json.JSONDecodeError, KeyError, ValueError, TypeError) as exc:
                    rejects.append(IngestReject(line_no, f"unparseable stats row: {exc}"))
                    continue
                violations = validate_stats(row)
                if violations:
                    rejects.append(IngestReject(line_no, "; ".join(violations)))
                    continue
                if row.record_id not in gen.records:
                    rejects.append(
                        IngestReject(line_no, f"unknown record_id {row.record_id}")
                    )
                    continue
                stats[row.record_id] = row

        generation = self._build_generation(dict(gen.records), stats, index=gen.index)
        self._swap(generation)
        self._persist_generation()
        return IngestReport(loaded=len(stats), rejects=rejects)

    def ingest_records(
        self, records: Sequence[BibRecord], stats: Sequence[UsageStats] = ()
    ) -> None:
        """Programmatic ingestion used by tests and embedders."""
        record_map = {r.record_id: r for r in records}
        stats_map = {s.record_id: s for s in stats}
        self._swap(self._build_generation(record_map, stats_map))
        self._persist_generation()

    # -- search ---------------------------------------------------------

    def _classify(self, query_tokens: list[str], gen: Generation) -> Intent:
        heuristic = classify_heuristic(
            query_tokens,
            gen.index,
            gen.records,
            self.config.intent,
            self.config.ranking.field_weights,
        )
        cached = gen.intent_cache.get(" ".join(query_tokens))
        if cached is not None and cached.confidence > heuristic.confidence:
            return cached
        return heuristic

    def _candidates(
        self,
        query_tokens: list[str],
        gen: Generation,
        facet_filters: Sequence[tuple[str, str]],
    ) -> list[str]:
        matching = gen.index.matching_records(query_tokens)
        out = []
        for rid in matching:
            record = gen.records[rid]
            if all(matches_facet(record, dim, value) for dim, value in facet_filters):
                out.append(rid)
        return sorted(out)

    def search(
        self,
        query: str,
        ctx: UserContext | None = None,
        facet_filters: Sequence[tuple[str, str]] = (),
        page: int = 1,
        page_size: int | None = None,
        session_id: str = "-",
        now: date | None = None,
    ) -> ResultPage:
        """Run the full pipeline and append a search event to the log.

        tokenize -> candidate retrieval (any-term match, then facet
        filters) -> intent -> combine -> cluster versions -> diversify ->
        facets -> descriptions -> page slice. Raises EmptyQueryError when
        the query has no tokens.
        """
        tokens = tokenize(query)
        if not tokens:
            raise EmptyQueryError()
        gen = self._require_generation()
        ctx = ctx or UserContext()
        today = now or date.today()
        shaping_cfg = self.config.shaping
        page_size = page_size or self.config.service.page_size
        page = max(1, page)

        candidates = self._candidates(tokens, gen, facet_filters)
        intent = self._classify(tokens, gen)
        results = combine(
            tokens,
            candidates,
            intent.kind,
            ctx,
            gen.index,
            gen.records,
            gen.popularity,
            gen.freshness,
            self.config.ranking,
            today,
        )
        clusters = cluster_versions(
            results, gen.records, shaping_cfg.cluster_similarity_threshold
        )
        clusters = diversify_top(
            clusters,
            intent.kind,
            gen.records,
            slots=shaping_cfg.diversify_slots,
            now=today,
            fresh_years=shaping_cfg.fresh_work_years,
        )
        facets = build_facets(results, gen.records)

        total_clusters = len(clusters)
        max_page = max(1, math.ceil(total_clusters / page_size)) if total_clusters else 1
        page = min(page, max_page)
        sliced = clusters[(page - 1) * page_size : page * page_size]

        descriptions: dict[str, Description] = {}
        for cluster in sliced:
            for rid in cluster.members:
                descriptions[rid] = describe_result(
                    gen.records[rid], tokens, shaping_cfg.snippet_max_chars
                )

        zero_result = len(candidates) == 0
        suggestions: list[str] = []
        if zero_result:
            suggestions = self._suggestions(tokens, gen)

        self.log_sink.append(
            LogEvent.search(
                _utcnow(),
                session_id if is_log_safe(session_id) else "-",
                sanitize_query(query),
                result_count=len(candidates),
                shown=tuple(c.representative for c in sliced),
            )
        )

        visible = {rid for cluster in sliced for rid in cluster.members}
        scores = {r.record_id: r for r in results if r.record_id in visible}
        return ResultPage(
            query=query,
            intent=intent,
            clusters=sliced,
            facets=facets,
            descriptions=descriptions,
            zero_result=zero_result,
            suggestions=suggestions,
            page=page,
            page_size=page_size,
            total_results=len(candidates),
            total_clusters=total_clusters,
            scores=scores,
            member_records={rid: gen.records[rid] for rid in visible},
        )

    def _suggestions(self, tokens: list[str], gen: Generation) -> list[str]:
        """Single-term relaxations of the query that do have matches."""
        seen: set[str] = set()
        out: list[str] = []
        for token in tokens:
            if token in seen:
                continue
            seen.add(token)
            if gen.index.df(token) > 0:
                out.append(token)
            if len(out) >= MAX_SUGGESTIONS:
                break
        return out

    def facet_overview(
        self,
        query: str,
        facet_filters: Sequence[tuple[str, str]] = (),
    ) -> FacetSet:
        """Facets for a query without ranking, logging or paging."""
        tokens = tokenize(query)
        if not tokens:
            raise EmptyQueryError()
        gen = self._require_generation()
        candidates = self._candidates(tokens, gen, facet_filters)
        placeholder = [ScoredResult(rid, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0) for rid in candidates]
        return build_facets(placeholder, gen.records)

    def get_record(self, record_id: str) -> BibRecord | None:
        gen = self._generation
        if gen is None:
            return None
        return gen.records.get(record_id)

    # -- clicks ---------------------------------------------------------

    def record_click(self, session_id: str, record_id: str, position: int) -> bool:
        """Append a click event; returns whether the event reached the log.

        Malformed ids (empty, or containing characters the line format
        cannot carry) and positions < 1 raise ValueError; unknown sessions
        and records are accepted, ids are opaque.
        """
        if not isinstance(position, int) or position < 1:
            raise ValueError("position must be >= 1")
        if not is_log_safe(session_id):
            raise ValueError("malformed session_id")
        if not is_log_safe(record_id):
            raise ValueError("malformed record_id")
        return self.log_sink.append(
            LogEvent.click(_utcnow(), session_id, record_id, position)
        )

    # -- recomputation ---------------------------------------------------

    def admin_recompute(self, now: date | None = None) -> RecomputeSummary:
        """Rebuild popularity, freshness and the intent cache, swap atomically.

        The intent cache is rebuilt from the click log: every repeat query
        with enough sessions gets its click-derived intent. A run without
        a catalog generation is a no-op summary.
        """
        gen = self._generation
        events = self.log_sink.read_events()
        if gen is None:
            return RecomputeSummary(
                records=0,
                popularity_computed_at=None,
                freshness_computed_at=None,
                intent_cache_entries=0,
                log_events_scanned=len(events),
            )

        cache: dict[str, Intent] = {}
        queries = {
            " ".join(tokenize(e.query))
            for e in events
            if e.kind == EventKind.SEARCH and e.query.strip()
        }
        for query in sorted(queries):
            intent = classify_from_clicks(
                query, events, gen.records, self.config.intent
            )
            if intent is not None:
                cache[query] = intent

        generation = self._build_generation(
            dict(gen.records),
            dict(gen.stats),
            index=gen.index,
            intent_cache=cache,
            now=now,
        )
        self._swap(generation)
        if self.data_dir:
            save_intent_cache(cache, self.data_dir / INTENT_CACHE_FILE)
        return RecomputeSummary(
            records=len(generation.records),
            popularity_computed_at=generation.popularity.computed_at,
            freshness_computed_at=generation.freshness.computed_at,
            intent_cache_entries=len(cache),
            log_events_scanned=len(events),
        )

    # -- persistence ------------------------------------------------------

    def _persist_generation(self) -> None:
        if not self.data_dir or self._generation is None:
            return
        gen = self._generation
        catalog_lines = "".join(
            json.dumps(record_to_dict(r), ensure_ascii=False, sort_keys=True) + "\n"
            for r in gen.records.values()
        )
        _atomic_write(self.data_dir / CATALOG_FILE, catalog_lines)
        usage_lines = "".join(
            json.dumps(stats_to_dict(s), ensure_ascii=False, sort_keys=True) + "\n"
            for s in gen.stats.values()
        )
        _atomic_write(self.data_dir / USAGE_FILE, usage_lines)
        save_index(gen.index, self.data_dir / INDEX_FILE)

    def _load_from_disk(self) -> None:
        assert self.data_dir is not None
        catalog_path = self.data_dir / CATALOG_FILE
        if not catalog_path.exists():
            return
        records: dict[str, BibRecord] = {}
        with open(catalog_path, encoding="utf-8") as fh:
            for raw in fh:
                line = raw.strip()
                if not line:
                    continue
                record = record_from_dict(json.loads(line))
                records[record.record_id] = record
        stats: dict[str, UsageStats] = {}
        usage_path = self.data_dir / USAGE_FILE
        if usage_path.exists():
            with open(usage_path, encoding="utf-8") as fh:
                for raw in fh:
                    line = raw.strip()
                    if not line:
                        continue
                    row = stats_from_dict(json.loads(line))
                    if row.record_id in records:
                        stats[row.record_id] = row
        index: InvertedIndex | None = None
        index_path = self.data_dir / INDEX_FILE
        if index_path.exists():
            try:
                candidate = load_index(index_path)
                if candidate.record_ids == frozenset(records):
                    index = candidate
            except (ValueError, KeyError, json.JSONDecodeError):
                index = None
        cache = load_intent_cache(self.data_dir / INTENT_CACHE_FILE)
        self._swap(self._build_generation(records, stats, index=index, intent_cache=cache))

    # -- introspection ----------------------------------------------------

    def stats_summary(self) -> dict[str, Any]:
        gen = self._generation
        return {
            "records": len(gen.records) if gen else 0,
            "stats_rows": len(gen.stats) if gen else 0,
            "generation_created_at": gen.created_at.isoformat() if gen else None,
            "popularity_computed_at": (
                gen.popularity.computed_at.isoformat() if gen else None
            ),
            "freshness_computed_at": (
                gen.freshness.computed_at.isoformat()
                if gen and gen.freshness.computed_at
                else None
            ),
            "intent_cache_entries": len(gen.intent_cache) if gen else 0,
            "log_overflow_count": self.log_sink.overflow_count,
            "data_dir": str(self.data_dir) if self.data_dir else None,
        }


# --- wire format -------------------------------------------------------------


def _member_summary(record: BibRecord) -> dict[str, Any]:
    from .ranking import availability_class

    return {
        "record_id": record.record_id,
        "title": record.title,
        "subtitle": record.subtitle,
        "authors": list(record.authors),
        "publication_year": record.publication_year,
        "document_type": record.document_type.value,
        "language": record.language,
        "availability": availability_class(record).value,
    }


def result_page_to_dict(
    page: ResultPage, records: Mapping[str, BibRecord] | None = None
) -> dict[str, Any]:
    """Serialize a ResultPage for the HTTP API and the CLI.

    Contains no timestamps, so identical searches serialize to identical
    bytes. Member data comes from the page's own generation snapshot
    unless an explicit records map is given.
    """
    if records is None:
        records = page.member_records
    clusters = []
    offset = (page.page - 1) * page.page_size
    for i, cluster in enumerate(page.clusters):
        entry: dict[str, Any] = {
            "position": offset + i + 1,
            "score": cluster.score,
            "representative": cluster.representative,
            "members": [
                _member_summary(records[rid]) if rid in records else {"record_id": rid}
                for rid in cluster.members
            ],
        }
        if cluster.representative in page.scores:
            entry["breakdown"] = page.scores[cluster.representative].breakdown()
        clusters.append(entry)
    return {
        "query": page.query,
        "intent": {
            "kind": page.intent.kind.value,
            "confidence": page.intent.confidence,
            "evidence": page.intent.evidence,
        },
        "zero_result": page.zero_result,
        "suggestions": page.suggestions,
        "page": page.page,
        "page_size": page.page_size,
        "total_results": page.total_results,
        "total_clusters": page.total_clusters,
        "clusters": clusters,
        "descriptions": {
            rid: {"text": d.text, "spans": [list(span) for span in d.spans]}
            for rid, d in page.descriptions.items()
        },
        "facets": {
            dim: [[value, count] for value, count in values]
            for dim, values in page.facets.as_dict().items()
        },
    }
