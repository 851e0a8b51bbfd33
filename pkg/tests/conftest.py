"""Shared fixtures: record builders and deterministic corpora."""

from __future__ import annotations

import random
from datetime import date, datetime, timedelta, timezone

import pytest

from librank.catalog import (
    BibRecord,
    DocumentType,
    Enrichment,
    Holding,
    HoldingLocation,
    HoldingStatus,
    UsageStats,
)
from librank.logmining import LogEvent

TODAY = date(2026, 8, 10)

CENTRAL_AVAILABLE = Holding("main", HoldingLocation.CENTRAL, HoldingStatus.AVAILABLE)
CENTRAL_ON_LOAN = Holding("main", HoldingLocation.CENTRAL, HoldingStatus.ON_LOAN)
BRANCH_AVAILABLE = Holding("north", HoldingLocation.BRANCH, HoldingStatus.AVAILABLE)
BRANCH_ON_LOAN = Holding("north", HoldingLocation.BRANCH, HoldingStatus.ON_LOAN)
ONLINE_DOWNLOAD = Holding("elib", HoldingLocation.ONLINE, HoldingStatus.DOWNLOAD)


def make_record(
    record_id: str,
    title: str = "Untitled Work",
    year: int = 2010,
    doc_type: DocumentType = DocumentType.MONOGRAPH,
    discipline: str = "general",
    language: str = "en",
    **kwargs,
) -> BibRecord:
    kwargs.setdefault("accession_date", date(max(year, 1900), 6, 1))
    kwargs.setdefault("holdings", (CENTRAL_AVAILABLE,))
    return BibRecord(
        record_id=record_id,
        title=title,
        publication_year=year,
        document_type=doc_type,
        discipline_group=discipline,
        language=language,
        **kwargs,
    )


def make_stats(record_id: str, **kwargs) -> UsageStats:
    return UsageStats(record_id=record_id, **kwargs)


VOCABULARY = [
    "history", "logic", "systems", "ranking", "library", "catalog", "search",
    "information", "retrieval", "classification", "language", "society",
    "statistics", "method", "analysis", "digital", "archive", "culture",
    "modern", "theory", "practice", "europa", "wissen", "ordnung",
]


def random_corpus(seed: int, size: int) -> list[BibRecord]:
    """Deterministic synthetic corpus with varied fields and enrichment."""
    rng = random.Random(seed)
    records = []
    doc_types = list(DocumentType)
    disciplines = ["informatics", "history", "philosophy", "law"]
    holding_choices = [
        (CENTRAL_AVAILABLE,),
        (BRANCH_AVAILABLE,),
        (ONLINE_DOWNLOAD,),
        (CENTRAL_ON_LOAN,),
        (CENTRAL_AVAILABLE, BRANCH_AVAILABLE),
        (),
    ]
    for i in range(size):
        title = " ".join(rng.sample(VOCABULARY, rng.randint(2, 4))).title()
        enrichment = None
        if rng.random() < 0.6:
            abstract = " ".join(rng.choices(VOCABULARY, k=rng.randint(8, 25)))
            full_text = (
                " ".join(rng.choices(VOCABULARY, k=rng.randint(30, 80)))
                if rng.random() < 0.4
                else None
            )
            enrichment = Enrichment(abstract=abstract, full_text=full_text)
        year = rng.randint(1975, 2026)
        records.append(
            make_record(
                f"r{i:03d}",
                title=title,
                year=year,
                doc_type=rng.choice(doc_types),
                discipline=rng.choice(disciplines),
                language=rng.choice(["en", "de"]),
                authors=tuple(
                    f"{rng.choice(['Anna', 'Karl', 'Mira', 'Otto'])} "
                    f"{rng.choice(['Berg', 'Dorn', 'Ewald', 'Falk', 'Grau'])}"
                    for _ in range(rng.randint(0, 2))
                ),
                publisher=rng.choice([None, "Harbour Press", "Fachverlag Nord"]),
                series=rng.choice([None, None, "Studies in Order"]),
                subject_headings=tuple(rng.sample(VOCABULARY, rng.randint(0, 3))),
                enrichment=enrichment,
                holdings=rng.choice(holding_choices),
                accession_date=date(min(max(year, 1975) + 1, 2026), 3, 1),
            )
        )
    return records


def random_stats(seed: int, records: list[BibRecord]) -> list[UsageStats]:
    rng = random.Random(seed + 1)
    rows = []
    for record in records:
        if rng.random() < 0.15:
            continue
        rating_count = rng.randint(0, 6)
        rows.append(
            UsageStats(
                record_id=record.record_id,
                view_count=rng.randint(0, 400),
                circulation_count=rng.randint(0, 150),
                download_count=rng.randint(0, 250),
                rating_sum=rng.randint(0, rating_count * 5),
                rating_count=rating_count,
                citation_count=rng.randint(0, 40),
            )
        )
    return rows


def random_log(seed: int, n_events: int, record_ids: list[str]) -> list[LogEvent]:
    """Synthetic log with sessions, zero-result searches and clicks."""
    rng = random.Random(seed)
    base = datetime(2026, 8, 1, 9, 0, 0, tzinfo=timezone.utc)
    queries = [
        "history of logic", "catalog search", "qq zz", "library ranking",
        "statistik", "alte drucke", "classification", "no hits here",
    ]
    events: list[LogEvent] = []
    t = 0
    while len(events) < n_events:
        session = f"s{rng.randint(1, 40):02d}"
        for _ in range(rng.randint(1, 5)):
            if len(events) >= n_events:
                break
            query = rng.choice(queries)
            zero = rng.random() < 0.25
            shown = () if zero else tuple(rng.sample(record_ids, min(5, len(record_ids))))
            t += 1
            events.append(
                LogEvent.search(
                    base + timedelta(seconds=t),
                    session,
                    query,
                    result_count=0 if zero else len(shown) + rng.randint(0, 30),
                    shown=shown,
                )
            )
            for _ in range(rng.randint(0, 3)):
                if len(events) >= n_events or not shown:
                    break
                position = rng.randint(1, len(shown))
                t += 1
                events.append(
                    LogEvent.click(
                        base + timedelta(seconds=t), session, shown[position - 1], position
                    )
                )
    return events


@pytest.fixture
def small_corpus() -> list[BibRecord]:
    """Three records sharing the term "history" in two titles."""
    return [
        make_record(
            "a1",
            title="History of Logic",
            year=1981,
            authors=("Karl Weiss",),
        ),
        make_record(
            "a2",
            title="European History",
            year=1995,
            authors=("Mira Falk",),
            enrichment=Enrichment(abstract="States, peoples and institutions."),
        ),
        make_record(
            "a3",
            title="Modern Art",
            year=2001,
            authors=("Otto Grau",),
        ),
    ]
