"""Bibliographic domain model.

Value types for catalog records, holdings and usage counters, plus the
record validation and text normalization shared by indexing, ranking and
version clustering. Everything here is immutable and side-effect free.
"""

from __future__ import annotations

import logging
import unicodedata
from dataclasses import dataclass, fields
from datetime import date
from enum import Enum
from typing import Any

log = logging.getLogger(__name__)

MAX_RATING = 5

# Circulation counters are expected to cover a fixed trailing window;
# purely documentary here, the engine ingests the numbers as given.
DEFAULT_STATS_WINDOW_MONTHS = 24


class DocumentType(str, Enum):
    MONOGRAPH = "monograph"
    EDITED_BOOK = "edited_book"
    JOURNAL_ARTICLE = "journal_article"
    JOURNAL = "journal"
    TEXTBOOK = "textbook"
    DICTIONARY = "dictionary"
    DATABASE = "database"
    CONFERENCE_PAPER = "conference_paper"
    THESIS = "thesis"


class HoldingLocation(str, Enum):
    CENTRAL = "central"
    BRANCH = "branch"
    ONLINE = "online"


class HoldingStatus(str, Enum):
    AVAILABLE = "available"
    ON_LOAN = "on_loan"
    DOWNLOAD = "download"


@dataclass(frozen=True)
class Holding:
    """One physical or electronic copy of a record."""

    branch_id: str
    location: HoldingLocation
    status: HoldingStatus


@dataclass(frozen=True)
class Enrichment:
    """Optional descriptive texts attached to a record beyond its fields."""

    abstract: str | None = None
    table_of_contents: str | None = None
    review: str | None = None
    full_text: str | None = None

    def texts(self) -> list[tuple[str, str]]:
        """Non-empty enrichment texts as (name, text) pairs, in field order."""
        out = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value:
                out.append((f.name, value))
        return out


@dataclass(frozen=True)
class BibRecord:
    """One bibliographic item with its descriptive fields and holdings.

    Collections are stored as tuples so records are hashable and safely
    shared between index generations.
    """

    record_id: str
    title: str
    publication_year: int
    accession_date: date
    document_type: DocumentType
    discipline_group: str
    language: str
    subtitle: str | None = None
    authors: tuple[str, ...] = ()
    publisher: str | None = None
    series: str | None = None
    subject_headings: tuple[str, ...] = ()
    page_count: int | None = None
    enrichment: Enrichment | None = None
    holdings: tuple[Holding, ...] = ()


@dataclass(frozen=True)
class UsageStats:
    """Per-item usage counters for one stats window."""

    record_id: str
    view_count: int = 0
    circulation_count: int = 0
    download_count: int = 0
    rating_sum: int = 0
    rating_count: int = 0
    citation_count: int = 0

    @property
    def mean_rating(self) -> float:
        """Mean user rating, 0.0 when the item has no ratings."""
        if self.rating_count == 0:
            return 0.0
        return self.rating_sum / self.rating_count


def normalize_text(s: str) -> str:
    """Normalize text for matching: case, diacritics, punctuation, spacing.

    Lowercases, applies Unicode compatibility decomposition, folds
    diacritics to base letters, replaces punctuation with single spaces and
    collapses whitespace. Idempotent.
    """
    decomposed = unicodedata.normalize("NFKD", s)
    stripped = "".join(
        ch for ch in decomposed if not unicodedata.category(ch).startswith("M")
    )
    lowered = stripped.lower()
    spaced = "".join(ch if ch.isalnum() else " " for ch in lowered)
    return " ".join(spaced.split())


def validate_record(record: BibRecord) -> list[str]:
    """Check a record against the catalog invariants.

    Returns an empty list when the record is valid, otherwise one message
    per violated invariant. Violations are data, not faults.
    """
    violations: list[str] = []
    if not record.record_id or not record.record_id.strip():
        violations.append("record_id empty")
    if not record.title or not record.title.strip():
        violations.append("title empty")
    if not isinstance(record.document_type, DocumentType):
        violations.append(f"document_type not recognized: {record.document_type!r}")
    if record.publication_year > record.accession_date.year + 1:
        violations.append(
            "publication_year "
            f"{record.publication_year} exceeds accession year "
            f"{record.accession_date.year} + 1"
        )
    if record.page_count is not None and record.page_count <= 0:
        violations.append("page_count must be positive")
    for i, holding in enumerate(record.holdings):
        online = holding.location == HoldingLocation.ONLINE
        download = holding.status == HoldingStatus.DOWNLOAD
        if online != download:
            violations.append(f"holding {i}: online implies download")
    return violations


def validate_stats(stats: UsageStats) -> list[str]:
    """Check usage counters; empty list when valid."""
    violations: list[str] = []
    counters = (
        ("view_count", stats.view_count),
        ("circulation_count", stats.circulation_count),
        ("download_count", stats.download_count),
        ("rating_sum", stats.rating_sum),
        ("rating_count", stats.rating_count),
        ("citation_count", stats.citation_count),
    )
    for name, value in counters:
        if value < 0:
            violations.append(f"{name} negative")
    if stats.rating_sum > stats.rating_count * MAX_RATING:
        violations.append(
            f"rating_sum {stats.rating_sum} exceeds rating_count x {MAX_RATING}"
        )
    return violations


# --- catalog file representation -------------------------------------------
#
# One record per line as a JSON object, field names exactly as on BibRecord.
# Optional fields are omitted when absent so records round-trip losslessly.


def record_to_dict(record: BibRecord) -> dict[str, Any]:
    d: dict[str, Any] = {
        "record_id": record.record_id,
        "title": record.title,
        "publication_year": record.publication_year,
        "accession_date": record.accession_date.isoformat(),
        "document_type": record.document_type.value,
        "discipline_group": record.discipline_group,
        "language": record.language,
        "authors": list(record.authors),
        "subject_headings": list(record.subject_headings),
        "holdings": [
            {"branch_id": h.branch_id, "location": h.location.value, "status": h.status.value}
            for h in record.holdings
        ],
    }
    if record.subtitle is not None:
        d["subtitle"] = record.subtitle
    if record.publisher is not None:
        d["publisher"] = record.publisher
    if record.series is not None:
        d["series"] = record.series
    if record.page_count is not None:
        d["page_count"] = record.page_count
    if record.enrichment is not None:
        enr = {
            name: getattr(record.enrichment, name)
            for name in ("abstract", "table_of_contents", "review", "full_text")
            if getattr(record.enrichment, name) is not None
        }
        d["enrichment"] = enr
    return d


def _parse_document_type(value: Any) -> DocumentType:
    try:
        return DocumentType(value)
    except ValueError:
        log.warning("unknown document_type %r, mapping to monograph", value)
        return DocumentType.MONOGRAPH


def record_from_dict(d: dict[str, Any]) -> BibRecord:
    """Build a BibRecord from its file representation.

    Raises KeyError/ValueError/TypeError on structurally broken input;
    unknown document types map to monograph with a warning.
    """
    enrichment = None
    if "enrichment" in d and d["enrichment"] is not None:
        enr = d["enrichment"]
        enrichment = Enrichment(
            abstract=enr.get("abstract"),
            table_of_contents=enr.get("table_of_contents"),
            review=enr.get("review"),
            full_text=enr.get("full_text"),
        )
    holdings = tuple(
        Holding(
            branch_id=str(h["branch_id"]),
            location=HoldingLocation(h["location"]),
            status=HoldingStatus(h["status"]),
        )
        for h in d.get("holdings", [])
    )
    return BibRecord(
        record_id=str(d["record_id"]),
        title=str(d["title"]),
        publication_year=int(d["publication_year"]),
        accession_date=date.fromisoformat(d["accession_date"]),
        document_type=_parse_document_type(d["document_type"]),
        discipline_group=str(d["discipline_group"]),
        language=str(d["language"]),
        subtitle=d.get("subtitle"),
        authors=tuple(str(a) for a in d.get("authors", [])),
        publisher=d.get("publisher"),
        series=d.get("series"),
        subject_headings=tuple(str(s) for s in d.get("subject_headings", [])),
        page_count=d.get("page_count"),
        enrichment=enrichment,
        holdings=holdings,
    )


def stats_to_dict(stats: UsageStats) -> dict[str, Any]:
    return {
        "record_id": stats.record_id,
        "view_count": stats.view_count,
        "circulation_count": stats.circulation_count,
        "download_count": stats.download_count,
        "rating_sum": stats.rating_sum,
        "rating_count": stats.rating_count,
        "citation_count": stats.citation_count,
    }


def stats_from_dict(d: dict[str, Any]) -> UsageStats:
    return UsageStats(
        record_id=str(d["record_id"]),
        view_count=int(d.get("view_count", 0)),
        circulation_count=int(d.get("circulation_count", 0)),
        download_count=int(d.get("download_count", 0)),
        rating_sum=int(d.get("rating_sum", 0)),
        rating_count=int(d.get("rating_count", 0)),
        citation_count=int(d.get("citation_count", 0)),
    )
