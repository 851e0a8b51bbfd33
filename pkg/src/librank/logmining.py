"""Transaction-log parsing and the batch analyses built on it.

Log format, one event per line, tab-separated (normative, bit-exact
round-trip):

    search: <iso-timestamp> TAB <session_id> TAB S TAB <result_count>
            TAB <shown ids, comma separated, empty when none> TAB <query>
    click:  <iso-timestamp> TAB <session_id> TAB C TAB <record_id>
            TAB <position>

The query is the last field and may contain spaces; tabs and newlines are
not representable (the engine sanitizes them before logging). Record and
session ids must not contain tabs, commas or newlines. Malformed lines
never abort a run; they are collected with their line numbers.

Analyses are pure functions over the parsed event list. Sessions are
identified by explicit session_id; inter-session order carries no meaning,
intra-session order is the timestamp order.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from typing import Iterable, Sequence

from .catalog import normalize_text
from .textindex import tokenize

# Mean query length reported by German query-log studies; printed as a
# fixed comparison line next to the measured mean.
REFERENCE_MEAN_QUERY_WORDS = 1.7

_FORBIDDEN_ID_CHARS = ("\t", "\n", "\r", ",")


class EventKind(str, Enum):
    SEARCH = "search"
    CLICK = "click"


@dataclass(frozen=True)
class LogEvent:
    timestamp: datetime
    session_id: str
    kind: EventKind
    query: str = ""
    result_count: int = 0
    shown: tuple[str, ...] = ()
    clicked_record: str = ""
    position: int = 0

    @staticmethod
    def search(
        timestamp: datetime,
        session_id: str,
        query: str,
        result_count: int,
        shown: Sequence[str] = (),
    ) -> "LogEvent":
        return LogEvent(
            timestamp=timestamp,
            session_id=session_id,
            kind=EventKind.SEARCH,
            query=query,
            result_count=result_count,
            shown=tuple(shown),
        )

    @staticmethod
    def click(
        timestamp: datetime, session_id: str, record_id: str, position: int
    ) -> "LogEvent":
        return LogEvent(
            timestamp=timestamp,
            session_id=session_id,
            kind=EventKind.CLICK,
            clicked_record=record_id,
            position=position,
        )


@dataclass(frozen=True)
class RejectedLine:
    line_no: int
    line: str
    reason: str


@dataclass(frozen=True)
class PreferencePair:
    """clicked-over-skipped preference observed in one or more impressions."""

    query: str
    preferred: str
    over: str
    weight: int


def is_log_safe(value: str) -> bool:
    """Ids must survive the tab/comma separated line format."""
    return bool(value) and not any(ch in value for ch in _FORBIDDEN_ID_CHARS)


def sanitize_query(query: str) -> str:
    """Make a raw query representable as the last field of a log line."""
    return " ".join(query.replace("\t", " ").replace("\r", " ").replace("\n", " ").split())


def serialize_event(event: LogEvent) -> str:
    ts = event.timestamp.isoformat()
    if event.kind == EventKind.SEARCH:
        shown = ",".join(event.shown)
        return f"{ts}\t{event.session_id}\tS\t{event.result_count}\t{shown}\t{event.query}"
    return f"{ts}\t{event.session_id}\tC\t{event.clicked_record}\t{event.position}"


def parse_line(line: str) -> LogEvent:
    """Parse one log line; raises ValueError with a reason on malformed input."""
    parts = line.split("\t")
    if len(parts) < 5:
        raise ValueError("too few fields")
    timestamp = datetime.fromisoformat(parts[0])
    session_id = parts[1]
    marker = parts[2]
    if not session_id:
        raise ValueError("empty session_id")
    if marker == "S":
        if len(parts) != 6:
            raise ValueError("search line must have 6 fields")
        result_count = int(parts[3])
        if result_count < 0:
            raise ValueError("negative result_count")
        shown = tuple(parts[4].split(",")) if parts[4] else ()
        return LogEvent.search(timestamp, session_id, parts[5], result_count, shown)
    if marker == "C":
        if len(parts) != 5:
            raise ValueError("click line must have 5 fields")
        record_id = parts[3]
        if not record_id:
            raise ValueError("empty record_id")
        position = int(parts[4])
        if position < 1:
            raise ValueError("position must be >= 1")
        return LogEvent.click(timestamp, session_id, record_id, position)
    raise ValueError(f"unknown event kind {marker!r}")


def parse_log(lines: Iterable[str]) -> tuple[list[LogEvent], list[RejectedLine]]:
    """Parse a log stream; malformed lines become rejects, blank lines are
    skipped."""
    events: list[LogEvent] = []
    rejects: list[RejectedLine] = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            continue
        try:
            events.append(parse_line(line))
        except (ValueError, OverflowError) as exc:
            rejects.append(RejectedLine(line_no, line, str(exc)))
    return events, rejects


def sessionize(events: Sequence[LogEvent]) -> list[tuple[str, list[LogEvent]]]:
    """Group events by session, each session in deterministic time order.

    The sort key includes all event fields so the result is invariant under
    any permutation of the input list.
    """
    by_session: dict[str, list[LogEvent]] = {}
    for event in events:
        by_session.setdefault(event.session_id, []).append(event)

    def order_key(e: LogEvent):
        # searches sort before clicks at equal timestamps: a click always
        # follows the search that displayed it
        return (
            e.timestamp,
            0 if e.kind == EventKind.SEARCH else 1,
            e.query,
            e.result_count,
            e.shown,
            e.clicked_record,
            e.position,
        )

    return [
        (sid, sorted(by_session[sid], key=order_key)) for sid in sorted(by_session)
    ]


def zero_result_report(events: Sequence[LogEvent]) -> list[tuple[str, int]]:
    """Unsuccessful queries grouped by normalized form.

    Sorted by frequency descending, then query ascending.
    """
    counts: Counter[str] = Counter(
        normalize_text(e.query)
        for e in events
        if e.kind == EventKind.SEARCH and e.result_count == 0
    )
    return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))


def failure_click_paths(
    events: Sequence[LogEvent],
) -> dict[str, list[list[LogEvent]]]:
    """What users did after a zero-result search.

    For every zero-result search, the ordered remainder of its session
    (reformulations and clicks) is recorded under the failing query's
    normalized form. A failing search at session end records an empty path.
    """
    paths: dict[str, list[list[LogEvent]]] = {}
    for _sid, session_events in sessionize(events):
        for i, event in enumerate(session_events):
            if event.kind == EventKind.SEARCH and event.result_count == 0:
                key = normalize_text(event.query)
                paths.setdefault(key, []).append(session_events[i + 1 :])
    return paths


def click_preferences(events: Sequence[LogEvent]) -> list[PreferencePair]:
    """Skip-above preference pairs from clickthrough data.

    A click at position p prefers the clicked record over every unclicked
    record shown above it in the same impression. Identical
    (query, preferred, over) triples aggregate into one weighted pair.
    Queries are grouped by normalized form.
    """
    weights: Counter[tuple[str, str, str]] = Counter()
    for _sid, session_events in sessionize(events):
        impression: LogEvent | None = None
        impression_clicks: list[LogEvent] = []

        def flush() -> None:
            if impression is None or not impression_clicks:
                return
            query = normalize_text(impression.query)
            clicked_positions = {c.position for c in impression_clicks}
            for click in impression_clicks:
                upper = min(click.position - 1, len(impression.shown))
                for i in range(upper):
                    if (i + 1) in clicked_positions:
                        continue
                    over = impression.shown[i]
                    if over != click.clicked_record:
                        weights[(query, click.clicked_record, over)] += 1

        for event in session_events:
            if event.kind == EventKind.SEARCH:
                flush()
                impression = event
                impression_clicks = []
            elif impression is not None:
                impression_clicks.append(event)
        flush()

    pairs = [
        PreferencePair(query=q, preferred=p, over=o, weight=w)
        for (q, p, o), w in weights.items()
    ]
    pairs.sort(key=lambda p: (-p.weight, p.query, p.preferred, p.over))
    return pairs


@dataclass
class QueryStats:
    """Aggregate query statistics for one log."""

    search_count: int
    click_count: int
    distinct_query_count: int
    token_length_histogram: dict[int, int]
    mean_token_length: float
    top_queries: list[tuple[str, int]]
    reference_mean_words: float = REFERENCE_MEAN_QUERY_WORDS


def query_stats(events: Sequence[LogEvent], top_n: int = 10) -> QueryStats:
    """Search frequency, query-length distribution and top queries."""
    searches = [e for e in events if e.kind == EventKind.SEARCH]
    clicks = sum(1 for e in events if e.kind == EventKind.CLICK)
    lengths = [len(tokenize(e.query)) for e in searches]
    histogram: dict[int, int] = {}
    for n in lengths:
        histogram[n] = histogram.get(n, 0) + 1
    counts: Counter[str] = Counter(normalize_text(e.query) for e in searches)
    top = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:top_n]
    return QueryStats(
        search_count=len(searches),
        click_count=clicks,
        distinct_query_count=len(counts),
        token_length_histogram=dict(sorted(histogram.items())),
        mean_token_length=sum(lengths) / len(lengths) if lengths else 0.0,
        top_queries=top,
    )


def format_query_stats(stats: QueryStats) -> str:
    lines = [
        f"searches: {stats.search_count}",
        f"clicks: {stats.click_count}",
        f"distinct queries: {stats.distinct_query_count}",
        f"mean query length: {stats.mean_token_length:.2f} words",
        f"reference mean (German query-log studies): {stats.reference_mean_words} words",
        "length histogram:",
    ]
    for length, count in stats.token_length_histogram.items():
        lines.append(f"  {length} words: {count}")
    lines.append("top queries:")
    for query, count in stats.top_queries:
        lines.append(f"  {count:5d}  {query}")
    return "\n".join(lines)
