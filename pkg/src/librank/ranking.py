"""Multi-factor ranking.

Five factor groups contribute to a record's score: text statistics,
popularity, freshness, locality and type/user-group preference. Popularity
and the per-discipline need-for-freshness are query-independent and
precomputed into immutable snapshots that are only refreshed at intervals;
the remaining factors are cheap per-record lookups at query time. The
final score is a linear combination under an intent-specific weight
profile, so a known-item search can lean on text match while a topic
search blends in popularity and freshness.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date, datetime, timezone
from enum import Enum
from typing import Mapping, Sequence

from .catalog import (
    BibRecord,
    DocumentType,
    HoldingLocation,
    HoldingStatus,
    UsageStats,
    normalize_text,
)
from .errors import ConfigError, UnknownRecordError
from .intent import IntentKind
from .textindex import EnrichmentBonuses, FieldWeights, InvertedIndex, enrichment_bonus, text_score

WEIGHT_SUM_TOLERANCE = 1e-9


class UserLocation(str, Enum):
    HOME = "home"
    CAMPUS = "campus"
    LIBRARY = "library"


class UserGroup(str, Enum):
    STUDENT = "student"
    GRADUATE = "graduate"
    PROFESSOR = "professor"
    ANONYMOUS = "anonymous"


class AvailabilityClass(str, Enum):
    DOWNLOAD = "download"
    AVAILABLE_LOCAL = "available_local"
    AVAILABLE_OTHER_BRANCH = "available_other_branch"
    ON_LOAN_ONLY = "on_loan_only"


@dataclass(frozen=True)
class UserContext:
    """Where the user is and which group they belong to.

    The location is derived upstream (network address or an explicit UI
    selector); personalization never goes below user_group granularity.
    """

    user_location: UserLocation = UserLocation.HOME
    user_group: UserGroup = UserGroup.ANONYMOUS


def availability_class(record: BibRecord) -> AvailabilityClass:
    """Best availability among the record's holdings.

    Order: download > available at the central (local) site > available at
    another branch > on loan only. A record without holdings counts as on
    loan only.
    """
    best = AvailabilityClass.ON_LOAN_ONLY
    for holding in record.holdings:
        if holding.status == HoldingStatus.DOWNLOAD:
            return AvailabilityClass.DOWNLOAD
        if holding.status == HoldingStatus.AVAILABLE:
            if holding.location == HoldingLocation.CENTRAL:
                best = AvailabilityClass.AVAILABLE_LOCAL
            elif best != AvailabilityClass.AVAILABLE_LOCAL:
                best = AvailabilityClass.AVAILABLE_OTHER_BRANCH
    return best


@dataclass(frozen=True)
class FactorWeights:
    """Weight of each factor group for one intent; must sum to 1."""

    text: float
    popularity: float
    freshness: float
    locality: float
    other: float

    def validate(self, label: str) -> None:
        values = (self.text, self.popularity, self.freshness, self.locality, self.other)
        if any(v < 0 for v in values):
            raise ConfigError(f"factor weights for {label} contain a negative value")
        if abs(sum(values) - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise ConfigError(f"factor weights for {label} must sum to 1, got {sum(values)}")


@dataclass(frozen=True)
class PopularityComponentWeights:
    """Mix of the popularity evidence sources; must sum to 1."""

    copies: float = 0.10
    views: float = 0.15
    circulation: float = 0.25
    downloads: float = 0.10
    ratings: float = 0.10
    citations: float = 0.10
    author_group: float = 0.10
    publisher_group: float = 0.05
    series_group: float = 0.05

    def validate(self) -> None:
        values = (
            self.copies, self.views, self.circulation, self.downloads, self.ratings,
            self.citations, self.author_group, self.publisher_group, self.series_group,
        )
        if any(v < 0 for v in values):
            raise ConfigError("popularity component weights contain a negative value")
        if abs(sum(values) - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise ConfigError(f"popularity component weights must sum to 1, got {sum(values)}")


DEFAULT_FACTOR_WEIGHTS: dict[IntentKind, FactorWeights] = {
    IntentKind.NAVIGATIONAL: FactorWeights(0.70, 0.15, 0.05, 0.05, 0.05),
    IntentKind.INFORMATIONAL: FactorWeights(0.35, 0.25, 0.15, 0.15, 0.10),
    IntentKind.TRANSACTIONAL: FactorWeights(0.40, 0.20, 0.10, 0.15, 0.15),
}

DEFAULT_LOCALITY_MATRIX: dict[UserLocation, dict[AvailabilityClass, float]] = {
    UserLocation.HOME: {
        AvailabilityClass.DOWNLOAD: 1.0,
        AvailabilityClass.AVAILABLE_LOCAL: 0.5,
        AvailabilityClass.AVAILABLE_OTHER_BRANCH: 0.4,
        AvailabilityClass.ON_LOAN_ONLY: 0.1,
    },
    UserLocation.CAMPUS: {
        AvailabilityClass.DOWNLOAD: 1.0,
        AvailabilityClass.AVAILABLE_LOCAL: 0.8,
        AvailabilityClass.AVAILABLE_OTHER_BRANCH: 0.5,
        AvailabilityClass.ON_LOAN_ONLY: 0.1,
    },
    UserLocation.LIBRARY: {
        AvailabilityClass.DOWNLOAD: 1.0,
        AvailabilityClass.AVAILABLE_LOCAL: 1.0,
        AvailabilityClass.AVAILABLE_OTHER_BRANCH: 0.5,
        AvailabilityClass.ON_LOAN_ONLY: 0.1,
    },
}


def _default_locality_matrix() -> dict[UserLocation, dict[AvailabilityClass, float]]:
    return {loc: dict(row) for loc, row in DEFAULT_LOCALITY_MATRIX.items()}


@dataclass
class RankingConfig:
    """Everything the ranking pipeline can be tuned with."""

    field_weights: FieldWeights = field(default_factory=FieldWeights)
    factor_weights: dict[IntentKind, FactorWeights] = field(
        default_factory=lambda: dict(DEFAULT_FACTOR_WEIGHTS)
    )
    locality_matrix: dict[UserLocation, dict[AvailabilityClass, float]] = field(
        default_factory=_default_locality_matrix
    )
    freshness_half_life_years: float = 5.0
    # items published within this many years count as "fresh" when deriving
    # the per-discipline need-for-freshness from circulation
    freshness_recent_years: int = 5
    default_need: float = 0.5
    # discipline_group -> document_type -> multiplier in [0, 2]
    type_preferences_discipline: dict[str, dict[DocumentType, float]] = field(default_factory=dict)
    # user_group -> document_type -> multiplier in [0, 2]
    type_preferences_user_group: dict[UserGroup, dict[DocumentType, float]] = field(default_factory=dict)
    popularity_component_weights: PopularityComponentWeights = field(
        default_factory=PopularityComponentWeights
    )
    enrichment_bonuses: EnrichmentBonuses = field(default_factory=EnrichmentBonuses)

    def validate(self) -> None:
        for kind in IntentKind:
            if kind not in self.factor_weights:
                raise ConfigError(f"missing factor weights for intent {kind.value}")
            self.factor_weights[kind].validate(kind.value)
        for location in UserLocation:
            row = self.locality_matrix.get(location)
            if row is None:
                raise ConfigError(f"locality matrix missing row for {location.value}")
            for cls in AvailabilityClass:
                value = row.get(cls)
                if value is None:
                    raise ConfigError(
                        f"locality matrix missing {location.value}/{cls.value}"
                    )
                if not 0.0 <= value <= 1.0:
                    raise ConfigError(
                        f"locality matrix {location.value}/{cls.value} outside [0,1]: {value}"
                    )
        for prefs in (self.type_preferences_discipline, self.type_preferences_user_group):
            for key, row in prefs.items():
                for doc_type, multiplier in row.items():
                    if not 0.0 <= multiplier <= 2.0:
                        raise ConfigError(
                            f"type preference {key}/{doc_type} outside [0,2]: {multiplier}"
                        )
        if self.freshness_half_life_years <= 0:
            raise ConfigError("freshness_half_life_years must be positive")
        if not 0.0 <= self.default_need <= 1.0:
            raise ConfigError("default_need outside [0,1]")
        self.popularity_component_weights.validate()


@dataclass(frozen=True)
class PopularityScores:
    """Query-independent popularity snapshot, refreshed only at intervals."""

    item_score: dict[str, float]
    author_scores: dict[str, float]
    publisher_scores: dict[str, float]
    series_scores: dict[str, float]
    computed_at: datetime


@dataclass(frozen=True)
class FreshnessProfile:
    """Per-discipline need-for-freshness coefficients derived from circulation."""

    need: dict[str, float]
    default_need: float = 0.5
    computed_at: datetime | None = None


@dataclass
class ScoredResult:
    """One ranked record with its per-factor breakdown.

    All breakdown components lie in [0, 1]; the text component is min-max
    normalized over the candidate set before combining.
    """

    record_id: str
    total: float
    text: float
    popularity: float
    freshness: float
    locality: float
    other: float
    cluster_id: int | None = None

    def breakdown(self) -> dict[str, float]:
        return {
            "text": self.text,
            "popularity": self.popularity,
            "freshness": self.freshness,
            "locality": self.locality,
            "other": self.other,
        }


def min_max_normalize(values: Mapping[str, float]) -> dict[str, float]:
    """Scale values into [0, 1]; a constant map normalizes to all zeros."""
    if not values:
        return {}
    lo = min(values.values())
    hi = max(values.values())
    if hi <= lo:
        return {k: 0.0 for k in values}
    span = hi - lo
    return {k: (v - lo) / span for k, v in values.items()}


def _mean(values: Sequence[float]) -> float:
    return sum(values) / len(values) if values else 0.0


def compute_popularity_scores(
    records: Sequence[BibRecord],
    stats: Sequence[UsageStats],
    config: RankingConfig,
) -> PopularityScores:
    """Precompute the popularity snapshot for a catalog.

    Raw per-record components (copy count, views, circulation, downloads,
    mean rating, citations) are min-max normalized over the catalog; group
    scores are the mean normalized circulation of all items sharing an
    author, publisher or series. Records lacking a grouping attribute fall
    back to their own normalized circulation for that component.

    Raises UnknownRecordError for stats rows naming unknown records.
    Duplicate rows for the same record: the last one wins.
    """
    known = {r.record_id for r in records}
    by_id: dict[str, UsageStats] = {}
    for row in stats:
        if row.record_id not in known:
            raise UnknownRecordError(row.record_id)
        by_id[row.record_id] = row

    def stat(rid: str) -> UsageStats:
        return by_id.get(rid, UsageStats(record_id=rid))

    copies = {r.record_id: float(len(r.holdings)) for r in records}
    views = {r.record_id: float(stat(r.record_id).view_count) for r in records}
    circulation = {r.record_id: float(stat(r.record_id).circulation_count) for r in records}
    downloads = {r.record_id: float(stat(r.record_id).download_count) for r in records}
    ratings = {r.record_id: stat(r.record_id).mean_rating for r in records}
    citations = {r.record_id: float(stat(r.record_id).citation_count) for r in records}

    copies_n = min_max_normalize(copies)
    views_n = min_max_normalize(views)
    circulation_n = min_max_normalize(circulation)
    downloads_n = min_max_normalize(downloads)
    ratings_n = min_max_normalize(ratings)
    citations_n = min_max_normalize(citations)

    author_members: dict[str, list[str]] = {}
    publisher_members: dict[str, list[str]] = {}
    series_members: dict[str, list[str]] = {}
    for r in records:
        for author in r.authors:
            author_members.setdefault(normalize_text(author), []).append(r.record_id)
        if r.publisher:
            publisher_members.setdefault(normalize_text(r.publisher), []).append(r.record_id)
        if r.series:
            series_members.setdefault(normalize_text(r.series), []).append(r.record_id)

    def group_scores(members: dict[str, list[str]]) -> dict[str, float]:
        return {
            key: _mean([circulation_n[rid] for rid in rids])
            for key, rids in members.items()
        }

    author_scores = group_scores(author_members)
    publisher_scores = group_scores(publisher_members)
    series_scores = group_scores(series_members)

    w = config.popularity_component_weights
    item_score: dict[str, float] = {}
    for r in records:
        rid = r.record_id
        if r.authors:
            author_component = _mean(
                [author_scores[normalize_text(a)] for a in r.authors]
            )
        else:
            author_component = circulation_n[rid]
        publisher_component = (
            publisher_scores[normalize_text(r.publisher)] if r.publisher else circulation_n[rid]
        )
        series_component = (
            series_scores[normalize_text(r.series)] if r.series else circulation_n[rid]
        )
        item_score[rid] = (
            w.copies * copies_n[rid]
            + w.views * views_n[rid]
            + w.circulation * circulation_n[rid]
            + w.downloads * downloads_n[rid]
            + w.ratings * ratings_n[rid]
            + w.citations * citations_n[rid]
            + w.author_group * author_component
            + w.publisher_group * publisher_component
            + w.series_group * series_component
        )

    return PopularityScores(
        item_score=item_score,
        author_scores=author_scores,
        publisher_scores=publisher_scores,
        series_scores=series_scores,
        computed_at=datetime.now(timezone.utc),
    )


def compute_freshness_profile(
    records: Sequence[BibRecord],
    stats: Sequence[UsageStats],
    now: date,
    config: RankingConfig | None = None,
) -> FreshnessProfile:
    """Derive each discipline's need for fresh items from circulation.

    need(g) = circulation of recent items / total circulation for the
    group, where "recent" means published within `freshness_recent_years`
    of now. Groups without any circulation get the configured default.
    """
    cfg = config or RankingConfig()
    circulation = {row.record_id: row.circulation_count for row in stats}
    recent: dict[str, int] = {}
    old: dict[str, int] = {}
    for record in records:
        group = record.discipline_group
        recent.setdefault(group, 0)
        old.setdefault(group, 0)
        circ = circulation.get(record.record_id, 0)
        if now.year - record.publication_year <= cfg.freshness_recent_years:
            recent[group] += circ
        else:
            old[group] += circ

    need: dict[str, float] = {}
    for group in recent:
        total = recent[group] + old[group]
        need[group] = recent[group] / total if total > 0 else cfg.default_need
    return FreshnessProfile(
        need=need,
        default_need=cfg.default_need,
        computed_at=datetime.now(timezone.utc),
    )


def freshness_score(
    record: BibRecord,
    profile: FreshnessProfile,
    now: date,
    config: RankingConfig,
) -> float:
    """Publication-age decay blended with the discipline's need for freshness.

    A discipline with need 0 scores a constant 0.5 regardless of age
    (authority over freshness); need 1 scores the pure half-life decay.
    """
    need = profile.need.get(record.discipline_group, profile.default_need)
    age = max(0, now.year - record.publication_year)
    decay = 2.0 ** (-age / config.freshness_half_life_years)
    return need * decay + (1.0 - need) * 0.5


def locality_score(
    record: BibRecord, ctx: UserContext, config: RankingConfig
) -> float:
    """Look up the user-location/availability cell of the locality matrix."""
    return config.locality_matrix[ctx.user_location][availability_class(record)]


def type_preference_score(
    record: BibRecord, ctx: UserContext, config: RankingConfig
) -> float:
    """Document-type fit for the discipline and the user group.

    Neutral configs score a constant 0.5; configured multipliers (e.g.
    conference papers for informatics, textbooks for students) scale it
    within [0, 1].
    """
    discipline_multiplier = config.type_preferences_discipline.get(
        record.discipline_group, {}
    ).get(record.document_type, 1.0)
    group_multiplier = config.type_preferences_user_group.get(
        ctx.user_group, {}
    ).get(record.document_type, 1.0)
    score = 0.5 * discipline_multiplier * group_multiplier
    return min(max(score, 0.0), 1.0)


def combine(
    query_tokens: Sequence[str],
    candidates: Sequence[str],
    intent_kind: IntentKind,
    ctx: UserContext,
    index: InvertedIndex,
    records: Mapping[str, BibRecord],
    popularity: PopularityScores,
    freshness: FreshnessProfile,
    config: RankingConfig,
    now: date,
) -> list[ScoredResult]:
    """Score and order a candidate set; never drops or adds a candidate.

    The text component (tf-idf plus enrichment bonus) is min-max
    normalized over the candidate set, all other components already live
    in [0, 1]. Ties break by higher popularity, then record_id, so equal
    inputs always produce the same order.
    """
    raw_text: dict[str, float] = {}
    for rid in candidates:
        record = records.get(rid)
        if record is None:
            raise UnknownRecordError(rid)
        raw_text[rid] = text_score(
            query_tokens, rid, index, config.field_weights
        ) + enrichment_bonus(record, config.enrichment_bonuses)
    text_norm = min_max_normalize(raw_text)

    weights = config.factor_weights[intent_kind]
    results: list[ScoredResult] = []
    for rid in candidates:
        record = records[rid]
        text = text_norm[rid]
        pop = popularity.item_score.get(rid, 0.0)
        fresh = freshness_score(record, freshness, now, config)
        loc = locality_score(record, ctx, config)
        other = type_preference_score(record, ctx, config)
        total = (
            weights.text * text
            + weights.popularity * pop
            + weights.freshness * fresh
            + weights.locality * loc
            + weights.other * other
        )
        results.append(ScoredResult(rid, total, text, pop, fresh, loc, other))

    results.sort(key=lambda r: (-r.total, -r.popularity, r.record_id))
    return results
