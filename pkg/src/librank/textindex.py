"""Inverted index over per-field tokens and the text-statistic score.

The index is built once per catalog generation and is immutable afterwards;
queries only read it. Scoring is a field-weighted tf-idf:

    score = sum over query terms t and fields f of
            weight(f) * tf(t, record, f) * idf(t)

with tf length-normalized per field (catalog fields range from three-word
titles to full texts, one formula has to fit all of them) and
idf = ln((N + 1) / (df + 1)), df counted over all fields jointly.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .catalog import BibRecord, normalize_text
from .errors import DuplicateRecordError, UnknownRecordError

INDEX_FORMAT = "librank-index"
INDEX_VERSION = 1


class FieldName(str, Enum):
    TITLE = "title"
    AUTHOR = "author"
    SUBJECT = "subject"
    SERIES = "series"
    PUBLISHER = "publisher"
    ABSTRACT = "abstract"
    TOC = "toc"
    REVIEW = "review"
    FULL_TEXT = "full_text"


DEFAULT_FIELD_WEIGHTS: dict[FieldName, float] = {
    FieldName.TITLE: 3.0,
    FieldName.AUTHOR: 2.5,
    FieldName.SUBJECT: 2.0,
    FieldName.SERIES: 1.0,
    FieldName.PUBLISHER: 0.5,
    FieldName.ABSTRACT: 1.0,
    FieldName.TOC: 0.8,
    FieldName.REVIEW: 0.5,
    FieldName.FULL_TEXT: 0.3,
}


@dataclass
class FieldWeights:
    """Non-negative per-field weights; at least one must be positive."""

    weights: dict[FieldName, float] = field(
        default_factory=lambda: dict(DEFAULT_FIELD_WEIGHTS)
    )

    def __post_init__(self) -> None:
        for name, w in self.weights.items():
            if w < 0:
                raise ValueError(f"field weight {name.value} negative: {w}")
        if not any(w > 0 for w in self.weights.values()):
            raise ValueError("all field weights are zero")

    def get(self, name: FieldName) -> float:
        return self.weights.get(name, 0.0)

    def scaled(self, c: float) -> "FieldWeights":
        return FieldWeights({k: v * c for k, v in self.weights.items()})


@dataclass(frozen=True)
class EnrichmentBonuses:
    """Query-independent score for the mere existence of enrichment texts."""

    toc: float = 0.3
    full_text: float = 0.5
    review: float = 0.1
    abstract: float = 0.1


def tokenize(s: str) -> list[str]:
    """normalize_text then split on spaces; empty tokens dropped, no stemming."""
    normalized = normalize_text(s)
    return normalized.split() if normalized else []


def field_texts(record: BibRecord) -> dict[FieldName, str]:
    """Raw text per index field; only populated fields appear.

    The title field covers title and subtitle (the field enum has no
    separate subtitle slot and subtitles must be searchable).
    """
    texts: dict[FieldName, str] = {}
    title = record.title if not record.subtitle else f"{record.title} {record.subtitle}"
    texts[FieldName.TITLE] = title
    if record.authors:
        texts[FieldName.AUTHOR] = " ".join(record.authors)
    if record.subject_headings:
        texts[FieldName.SUBJECT] = " ".join(record.subject_headings)
    if record.series:
        texts[FieldName.SERIES] = record.series
    if record.publisher:
        texts[FieldName.PUBLISHER] = record.publisher
    if record.enrichment:
        enr = record.enrichment
        if enr.abstract:
            texts[FieldName.ABSTRACT] = enr.abstract
        if enr.table_of_contents:
            texts[FieldName.TOC] = enr.table_of_contents
        if enr.review:
            texts[FieldName.REVIEW] = enr.review
        if enr.full_text:
            texts[FieldName.FULL_TEXT] = enr.full_text
    return texts


@dataclass(frozen=True)
class InvertedIndex:
    """Immutable per-field postings for one catalog generation.

    postings maps (field, term) to the posting list [(record_id, tf), ...]
    in record insertion order; field_lengths maps (record_id, field) to the
    field's token count. doc_frequency counts, per term, the records
    containing the term in any field.
    """

    doc_count: int
    postings: dict[tuple[FieldName, str], list[tuple[str, int]]]
    field_lengths: dict[tuple[str, FieldName], int]
    record_ids: frozenset[str]
    doc_frequency: dict[str, int]
    # (record_id, field) -> {term: tf}; lookup acceleration, derived from postings
    term_counts: dict[tuple[str, FieldName], dict[str, int]] = field(repr=False, default_factory=dict)

    def df(self, term: str) -> int:
        return self.doc_frequency.get(term, 0)

    def idf(self, term: str) -> float:
        return math.log((self.doc_count + 1) / (self.df(term) + 1))

    def matching_records(self, tokens: Iterable[str]) -> set[str]:
        """Record ids containing at least one of the tokens in any field."""
        hits: set[str] = set()
        for token in tokens:
            for fname in FieldName:
                for record_id, _tf in self.postings.get((fname, token), []):
                    hits.add(record_id)
        return hits


def build_index(records: Sequence[BibRecord]) -> InvertedIndex:
    """Index every populated field of every record.

    Raises DuplicateRecordError when two records share a record_id. The
    returned index is treated as immutable.
    """
    seen: set[str] = set()
    postings: dict[tuple[FieldName, str], list[tuple[str, int]]] = {}
    field_lengths: dict[tuple[str, FieldName], int] = {}
    term_records: dict[str, set[str]] = {}
    term_counts: dict[tuple[str, FieldName], dict[str, int]] = {}

    for record in records:
        if record.record_id in seen:
            raise DuplicateRecordError(record.record_id)
        seen.add(record.record_id)
        for fname, text in field_texts(record).items():
            tokens = tokenize(text)
            if not tokens:
                continue
            field_lengths[(record.record_id, fname)] = len(tokens)
            counts = Counter(tokens)
            term_counts[(record.record_id, fname)] = dict(counts)
            for term, tf in counts.items():
                postings.setdefault((fname, term), []).append((record.record_id, tf))
                term_records.setdefault(term, set()).add(record.record_id)

    return InvertedIndex(
        doc_count=len(records),
        postings=postings,
        field_lengths=field_lengths,
        record_ids=frozenset(seen),
        doc_frequency={term: len(ids) for term, ids in term_records.items()},
        term_counts=term_counts,
    )


def text_score(
    query_tokens: Sequence[str],
    record_id: str,
    index: InvertedIndex,
    weights: FieldWeights,
) -> float:
    """Field-weighted tf-idf of a record against the query tokens.

    Repeated query tokens contribute once per occurrence. Returns 0.0 when
    no term matches; raises UnknownRecordError for ids outside the index.
    """
    if record_id not in index.record_ids:
        raise UnknownRecordError(record_id)
    score = 0.0
    for term in query_tokens:
        df = index.df(term)
        if df == 0:
            continue
        idf = index.idf(term)
        for fname in FieldName:
            counts = index.term_counts.get((record_id, fname))
            if not counts:
                continue
            tf_raw = counts.get(term)
            if not tf_raw:
                continue
            length = index.field_lengths[(record_id, fname)]
            score += weights.get(fname) * (tf_raw / length) * idf
    return score


def enrichment_bonus(
    record: BibRecord, bonuses: EnrichmentBonuses | None = None
) -> float:
    """Query-independent bonus for each enrichment text the record carries."""
    b = bonuses or EnrichmentBonuses()
    enr = record.enrichment
    if enr is None:
        return 0.0
    bonus = 0.0
    if enr.table_of_contents:
        bonus += b.toc
    if enr.full_text:
        bonus += b.full_text
    if enr.review:
        bonus += b.review
    if enr.abstract:
        bonus += b.abstract
    return bonus


# --- snapshot persistence ---------------------------------------------------


def save_index(index: InvertedIndex, path: str | Path) -> None:
    """Write the index as a version-tagged JSON container."""
    postings_out: dict[str, dict[str, list[list]]] = {}
    for (fname, term), plist in index.postings.items():
        postings_out.setdefault(fname.value, {})[term] = [[rid, tf] for rid, tf in plist]
    lengths_out: dict[str, dict[str, int]] = {}
    for (rid, fname), length in index.field_lengths.items():
        lengths_out.setdefault(fname.value, {})[rid] = length
    payload = {
        "format": INDEX_FORMAT,
        "version": INDEX_VERSION,
        "doc_count": index.doc_count,
        "record_ids": sorted(index.record_ids),
        "postings": postings_out,
        "field_lengths": lengths_out,
    }
    Path(path).write_text(
        json.dumps(payload, sort_keys=True, ensure_ascii=False), encoding="utf-8"
    )


def load_index(path: str | Path) -> InvertedIndex:
    """Read a snapshot written by save_index; rejects foreign containers."""
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("format") != INDEX_FORMAT:
        raise ValueError(f"not an index snapshot: {path}")
    if payload.get("version") != INDEX_VERSION:
        raise ValueError(f"unsupported index version {payload.get('version')}")

    postings: dict[tuple[FieldName, str], list[tuple[str, int]]] = {}
    term_records: dict[str, set[str]] = {}
    term_counts: dict[tuple[str, FieldName], dict[str, int]] = {}
    for fvalue, terms in payload["postings"].items():
        fname = FieldName(fvalue)
        for term, plist in terms.items():
            pairs = [(str(rid), int(tf)) for rid, tf in plist]
            postings[(fname, term)] = pairs
            for rid, tf in pairs:
                term_records.setdefault(term, set()).add(rid)
                term_counts.setdefault((rid, fname), {})[term] = tf
    field_lengths: dict[tuple[str, FieldName], int] = {}
    for fvalue, by_record in payload["field_lengths"].items():
        fname = FieldName(fvalue)
        for rid, length in by_record.items():
            field_lengths[(rid, fname)] = int(length)

    return InvertedIndex(
        doc_count=int(payload["doc_count"]),
        postings=postings,
        field_lengths=field_lengths,
        record_ids=frozenset(payload["record_ids"]),
        doc_frequency={term: len(ids) for term, ids in term_records.items()},
        term_counts=term_counts,
    )
