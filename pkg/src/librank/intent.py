"""Query intent classification.

Queries are assigned one of three intents: navigational (known-item
searches expecting a single correct title), informational (topic searches
expecting a diversity of documents) and transactional (searches for a
source such as a database or journal to continue the research in).

Two classifiers: a pure index-driven heuristic applied at query time, and
an offline click-concentration analysis over logged sessions that can
override the heuristic for repeat queries once it has enough evidence.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import TYPE_CHECKING, Mapping, Sequence

from .catalog import BibRecord, DocumentType, normalize_text
from .errors import EmptyQueryError
from .textindex import FieldWeights, InvertedIndex, text_score, tokenize

if TYPE_CHECKING:
    from .logmining import LogEvent

SOURCE_DOCUMENT_TYPES = frozenset({DocumentType.DATABASE, DocumentType.JOURNAL})

# English/German terms that mark a search for a source to continue in.
DEFAULT_SOURCE_TERMS = (
    "database",
    "databank",
    "journal",
    "zeitschrift",
    "bibliography",
    "index",
    "portal",
)


class IntentKind(str, Enum):
    NAVIGATIONAL = "navigational"
    INFORMATIONAL = "informational"
    TRANSACTIONAL = "transactional"


@dataclass(frozen=True)
class Intent:
    kind: IntentKind
    confidence: float
    evidence: str


@dataclass
class IntentConfig:
    """Thresholds for both classifiers; defaults are desk-scale testable."""

    title_coverage: float = 0.8
    min_sessions: int = 5
    click_concentration: float = 0.8
    type_concentration: float = 0.6
    source_terms: tuple[str, ...] = DEFAULT_SOURCE_TERMS
    top_matches: int = 5
    top_type_hits: int = 3
    confidence_title: float = 0.9
    confidence_source: float = 0.7
    confidence_default: float = 0.5


def _author_title_tokens(record: BibRecord) -> set[str]:
    tokens = set(tokenize(record.title))
    for author in record.authors:
        tokens.update(tokenize(author))
    return tokens


def _is_token_run(query_norm: str, title_norm: str) -> bool:
    """True when the query appears as a contiguous token run of the title."""
    return f" {query_norm} " in f" {title_norm} "


def classify_heuristic(
    query_tokens: Sequence[str],
    index: InvertedIndex,
    records: Mapping[str, BibRecord],
    config: IntentConfig | None = None,
    weights: FieldWeights | None = None,
) -> Intent:
    """Classify a query by a three-rule cascade against the catalog.

    1. The query matches a known item: it is a contiguous token run of
       some title, or author-plus-title tokens of one record cover at
       least `title_coverage` of the query tokens -> navigational.
    2. The query names a source: a token from the source-term lexicon, or
       the top text matches are predominantly databases/journals
       -> transactional.
    3. Otherwise -> informational.

    Raises EmptyQueryError on an empty token list.
    """
    if not query_tokens:
        raise EmptyQueryError()
    cfg = config or IntentConfig()
    w = weights or FieldWeights()
    query_norm = " ".join(query_tokens)
    query_set = set(query_tokens)

    for record in records.values():
        title_norm = normalize_text(record.title)
        if title_norm and _is_token_run(query_norm, title_norm):
            return Intent(IntentKind.NAVIGATIONAL, cfg.confidence_title, "title-run")
        covered = len(query_set & _author_title_tokens(record))
        if covered / len(query_set) >= cfg.title_coverage:
            return Intent(
                IntentKind.NAVIGATIONAL, cfg.confidence_title, "author-title-coverage"
            )

    if any(token in cfg.source_terms for token in query_tokens):
        return Intent(IntentKind.TRANSACTIONAL, cfg.confidence_source, "source-term")

    candidates = index.matching_records(query_set)
    if candidates:
        scored = sorted(
            ((text_score(list(query_tokens), rid, index, w), rid) for rid in candidates),
            key=lambda pair: (-pair[0], pair[1]),
        )
        top = scored[: cfg.top_matches]
        source_hits = sum(
            1
            for _score, rid in top
            if rid in records and records[rid].document_type in SOURCE_DOCUMENT_TYPES
        )
        if source_hits >= cfg.top_type_hits:
            return Intent(
                IntentKind.TRANSACTIONAL, cfg.confidence_source, "top-match-types"
            )

    return Intent(IntentKind.INFORMATIONAL, cfg.confidence_default, "default")


def classify_from_clicks(
    query: str,
    events: Sequence["LogEvent"],
    records: Mapping[str, BibRecord],
    config: IntentConfig | None = None,
) -> Intent | None:
    """Classify a repeat query from logged click behavior.

    Sessions that searched this exact normalized query vote: a session
    whose clicks all land on one single record signals a known item; clicks
    concentrated on database/journal records signal a source search.
    Returns None when fewer than `min_sessions` sessions contain the query
    (insufficient evidence; callers fall back to the heuristic).
    """
    from .logmining import EventKind, sessionize

    cfg = config or IntentConfig()
    query_norm = normalize_text(query)

    single_target = 0
    neither = 0
    total_clicks = 0
    source_clicks = 0
    matching_sessions = 0

    for _sid, session_events in sessionize(events):
        clicked: list[str] = []
        current_matches = False
        session_matches = False
        for event in session_events:
            if event.kind == EventKind.SEARCH:
                current_matches = normalize_text(event.query) == query_norm
                session_matches = session_matches or current_matches
            elif event.kind == EventKind.CLICK and current_matches:
                clicked.append(event.clicked_record)
        if not session_matches:
            continue
        matching_sessions += 1
        session_source = sum(
            1
            for rid in clicked
            if rid in records and records[rid].document_type in SOURCE_DOCUMENT_TYPES
        )
        total_clicks += len(clicked)
        source_clicks += session_source
        if clicked and len(set(clicked)) == 1:
            single_target += 1
        elif not clicked or session_source * 2 <= len(clicked):
            neither += 1

    if matching_sessions < cfg.min_sessions:
        return None

    p = single_target / matching_sessions
    if p >= cfg.click_concentration:
        return Intent(IntentKind.NAVIGATIONAL, p, "click-concentration")
    type_fraction = source_clicks / total_clicks if total_clicks else 0.0
    if type_fraction >= cfg.type_concentration:
        return Intent(IntentKind.TRANSACTIONAL, type_fraction, "click-type-concentration")
    confidence = max(p, type_fraction, neither / matching_sessions)
    return Intent(IntentKind.INFORMATIONAL, confidence, "click-dispersion")


# --- intent cache persistence -----------------------------------------------
#
# Flat file, one row per query: normalized_query <TAB> kind <TAB> confidence.


def save_intent_cache(cache: Mapping[str, Intent], path: str | Path) -> None:
    lines = [
        f"{query}\t{intent.kind.value}\t{intent.confidence:.6f}"
        for query, intent in sorted(cache.items())
    ]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def load_intent_cache(path: str | Path) -> dict[str, Intent]:
    cache: dict[str, Intent] = {}
    p = Path(path)
    if not p.exists():
        return cache
    for line in p.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        query, kind, confidence = line.split("\t")
        cache[query] = Intent(IntentKind(kind), float(confidence), "cached")
    return cache
