"""Result-list shaping: version clustering, deliberate mixing, facets,
and highlighted result descriptions.

Ranking assigns scores; shaping decides what the first screen looks like.
Near-identical versions of the same work collapse into one cluster (the
versions stay enumerable), broad informational queries get a deliberate
mix of document types at the top, and drill-down facets are recomputed
from the current result set on every query.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import date
from typing import Mapping, Sequence

from .catalog import BibRecord
from .intent import Intent, IntentKind
from .ranking import ScoredResult, availability_class
from .textindex import tokenize

# Slot priority for the informational top-of-list mix.
DIVERSIFY_PRIORITY = ("dictionary", "textbook", "database", "journal", "fresh")

_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass
class ShapingConfig:
    cluster_similarity_threshold: float = 0.9
    diversify_slots: int = 5
    fresh_work_years: int = 2
    snippet_max_chars: int = 160


@dataclass
class ResultCluster:
    """Versions of one work presented as a single result."""

    representative: str
    members: list[str]
    score: float


@dataclass
class FacetSet:
    """Per-dimension (value, count) lists, counts descending.

    Counts are derived from the current result set only. document_type,
    language, availability and publication_year are single-valued per
    record, so their counts sum to the result count; subject_heading is
    multi-valued and may exceed it.
    """

    document_type: list[tuple[str, int]] = field(default_factory=list)
    subject_heading: list[tuple[str, int]] = field(default_factory=list)
    publication_year: list[tuple[str, int]] = field(default_factory=list)
    language: list[tuple[str, int]] = field(default_factory=list)
    availability: list[tuple[str, int]] = field(default_factory=list)

    def as_dict(self) -> dict[str, list[tuple[str, int]]]:
        return {
            "document_type": self.document_type,
            "subject_heading": self.subject_heading,
            "publication_year": self.publication_year,
            "language": self.language,
            "availability": self.availability,
        }


@dataclass
class Description:
    """Result description: a static line plus an optional snippet.

    Spans are (start, end) offsets into `text`, one per highlighted query
    token occurrence inside the snippet part.
    """

    text: str
    spans: list[tuple[int, int]] = field(default_factory=list)


@dataclass
class ResultPage:
    """The final shaped response for one search.

    `scores` carries the per-factor breakdown and `member_records` the
    record of every item visible on the page, keyed by record_id, so a
    page is self-contained: serializing it never has to reach back into a
    possibly newer catalog generation.
    """

    query: str
    intent: Intent
    clusters: list[ResultCluster]
    facets: FacetSet
    descriptions: dict[str, Description]
    zero_result: bool
    suggestions: list[str] = field(default_factory=list)
    page: int = 1
    page_size: int = 10
    total_results: int = 0
    total_clusters: int = 0
    scores: dict[str, ScoredResult] = field(default_factory=dict)
    member_records: dict[str, BibRecord] = field(default_factory=dict)


def _first_author_surname(record: BibRecord) -> str:
    if not record.authors:
        return ""
    tokens = tokenize(record.authors[0])
    return tokens[-1] if tokens else ""


def title_similarity(a: BibRecord, b: BibRecord) -> float:
    """Jaccard over normalized title tokens, gated on matching first-author
    surnames (no shared first author, no similarity)."""
    if _first_author_surname(a) != _first_author_surname(b):
        return 0.0
    ta, tb = set(tokenize(a.title)), set(tokenize(b.title))
    if not ta or not tb:
        return 0.0
    return len(ta & tb) / len(ta | tb)


def cluster_versions(
    results: Sequence[ScoredResult],
    records: Mapping[str, BibRecord],
    threshold: float = 0.9,
) -> list[ResultCluster]:
    """Single-link clustering of near-identical versions.

    Results must already be sorted by total descending. The representative
    is the cluster's highest-scored member; cluster order follows the
    representatives' positions in the input, so the list stays score
    ordered. Assigns cluster_id on the inputs as a side product.
    """
    n = len(results)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i: int, j: int) -> None:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    for i in range(n):
        rec_i = records[results[i].record_id]
        for j in range(i + 1, n):
            if title_similarity(rec_i, records[results[j].record_id]) >= threshold:
                union(i, j)

    clusters: list[ResultCluster] = []
    cluster_index: dict[int, int] = {}
    for i, result in enumerate(results):
        root = find(i)
        idx = cluster_index.get(root)
        if idx is None:
            idx = len(clusters)
            cluster_index[root] = idx
            clusters.append(
                ResultCluster(
                    representative=result.record_id,
                    members=[result.record_id],
                    score=result.total,
                )
            )
        else:
            clusters[idx].members.append(result.record_id)
        result.cluster_id = idx
    return clusters


def _is_fresh(record: BibRecord, now: date, fresh_years: int) -> bool:
    return record.publication_year >= now.year - fresh_years


def diversify_top(
    clusters: Sequence[ResultCluster],
    intent_kind: IntentKind,
    records: Mapping[str, BibRecord],
    slots: int = 5,
    now: date | None = None,
    fresh_years: int = 2,
) -> list[ResultCluster]:
    """Deliberately mix document types at the top for broad topic searches.

    Informational queries only: the first slots are claimed, in priority
    order, by the highest-scored cluster whose representative is a
    dictionary, textbook, database, journal, or a fresh work (published
    within `fresh_years`), one cluster per type when such clusters exist
    anywhere in the list. Everything else keeps pure score order. The
    output is always a permutation of the input.
    """
    ordered = list(clusters)
    if intent_kind != IntentKind.INFORMATIONAL or not ordered:
        return ordered
    today = now or date.today()

    def matches(cluster: ResultCluster, target: str) -> bool:
        rep = records[cluster.representative]
        if target == "fresh":
            return _is_fresh(rep, today, fresh_years)
        return rep.document_type.value == target

    picked: list[ResultCluster] = []
    remaining = ordered[:]
    for target in DIVERSIFY_PRIORITY:
        if len(picked) >= slots:
            break
        for cluster in remaining:
            if matches(cluster, target):
                picked.append(cluster)
                remaining.remove(cluster)
                break
    return picked + remaining


def _decade_label(year: int) -> str:
    return f"{(year // 10) * 10}s"


def year_facet_value(year: int, bucket_by_decade: bool) -> str:
    return _decade_label(year) if bucket_by_decade else str(year)


def build_facets(
    results: Sequence[ScoredResult], records: Mapping[str, BibRecord]
) -> FacetSet:
    """Tally drill-down dimensions over the current result set.

    Years bucket by decade when the result set spans more than 20 years,
    otherwise per year. Each dimension is sorted by count descending, then
    value, for deterministic pages.
    """
    if not results:
        return FacetSet()
    items = [records[r.record_id] for r in results]

    years = [r.publication_year for r in items]
    bucket_by_decade = (max(years) - min(years)) > 20

    def tally(values: list[str]) -> list[tuple[str, int]]:
        counts: dict[str, int] = {}
        for v in values:
            counts[v] = counts.get(v, 0) + 1
        return sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))

    subjects: list[str] = []
    for rec in items:
        subjects.extend(rec.subject_headings)

    return FacetSet(
        document_type=tally([r.document_type.value for r in items]),
        subject_heading=tally(subjects),
        publication_year=tally(
            [year_facet_value(r.publication_year, bucket_by_decade) for r in items]
        ),
        language=tally([r.language for r in items]),
        availability=tally([availability_class(r).value for r in items]),
    )


def matches_facet(record: BibRecord, dimension: str, value: str) -> bool:
    """Does a record fall under one facet value? Used by the drill-down filters."""
    if dimension == "document_type":
        return record.document_type.value == value
    if dimension == "language":
        return record.language == value
    if dimension == "subject_heading":
        return value in record.subject_headings
    if dimension == "availability":
        return availability_class(record).value == value
    if dimension == "publication_year":
        if value.endswith("s") and value[:-1].isdigit():
            decade = int(value[:-1])
            return decade <= record.publication_year <= decade + 9
        return value.isdigit() and record.publication_year == int(value)
    return False


def _word_spans(text: str) -> list[tuple[int, int]]:
    return [(m.start(), m.end()) for m in _WORD_RE.finditer(text)]


def _word_matches(word: str, query_set: frozenset[str] | set[str]) -> bool:
    return any(tok in query_set for tok in tokenize(word))


def best_snippet_window(
    text: str, query_tokens: Sequence[str], max_chars: int = 160
) -> tuple[str, list[tuple[int, int]]] | None:
    """Word-aligned window of at most max_chars with the densest query hits.

    Returns (snippet, spans-into-snippet) or None when no token matches.
    Among equal-density windows the earliest wins.
    """
    words = _word_spans(text)
    if not words:
        return None
    query_set = set(query_tokens)
    hits = [1 if _word_matches(text[s:e], query_set) else 0 for s, e in words]
    if not any(hits):
        return None

    best: tuple[int, int, int] | None = None  # (-count, start_word, end_word)
    j = 0
    count = 0
    for i in range(len(words)):
        if j < i:
            j, count = i, 0
        while j < len(words) and words[j][1] - words[i][0] <= max_chars:
            count += hits[j]
            j += 1
        if count > 0 and (best is None or count > -best[0]):
            best = (-count, i, j - 1)
        count -= hits[i]
    if best is None:
        return None
    _neg, wi, wj = best
    start = words[wi][0]
    end = words[wj][1]
    snippet = text[start:end]
    spans = [
        (ws - start, we - start)
        for (ws, we), hit in zip(words[wi : wj + 1], hits[wi : wj + 1])
        if hit
    ]
    return snippet, spans


def describe_result(
    record: BibRecord,
    query_tokens: Sequence[str],
    max_chars: int = 160,
) -> Description:
    """Static description line plus the best-matching enrichment snippet.

    The static part names title, authors, year, document type and best
    availability; the context part is the single window (over all
    enrichment texts) containing the most query-token occurrences, with
    each matched word's span marked. No enrichment, or no match: static
    part only.
    """
    authors = "; ".join(record.authors) if record.authors else "—"
    static = (
        f"{record.title} / {authors} ({record.publication_year}) · "
        f"{record.document_type.value} · {availability_class(record).value}"
    )
    best: tuple[int, str, list[tuple[int, int]]] | None = None
    if record.enrichment:
        for _name, text in record.enrichment.texts():
            window = best_snippet_window(text, query_tokens, max_chars)
            if window is None:
                continue
            snippet, spans = window
            if best is None or len(spans) > best[0]:
                best = (len(spans), snippet, spans)
    if best is None:
        return Description(text=static)
    _count, snippet, spans = best
    offset = len(static) + 1  # newline between static part and snippet
    return Description(
        text=f"{static}\n{snippet}",
        spans=[(s + offset, e + offset) for s, e in spans],
    )
