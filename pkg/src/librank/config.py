"""Configuration: one YAML file covering ranking weights, shaping
thresholds, intent thresholds and service settings.

The file path can be overridden with the LIBRANK_CONFIG environment
variable; absent any file, built-in defaults apply. All defaults are also
shipped verbatim as config/default.yaml so operators can start from a
complete example.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import yaml

from .catalog import DEFAULT_STATS_WINDOW_MONTHS, DocumentType
from .errors import ConfigError
from .intent import IntentConfig, IntentKind
from .ranking import (
    AvailabilityClass,
    FactorWeights,
    PopularityComponentWeights,
    RankingConfig,
    UserGroup,
    UserLocation,
)
from .shaping import ShapingConfig
from .textindex import EnrichmentBonuses, FieldName, FieldWeights

CONFIG_ENV_VAR = "LIBRANK_CONFIG"


@dataclass
class ServiceConfig:
    page_size: int = 10
    # CIDR ranges used to derive the user's location from the client address
    campus_networks: tuple[str, ...] = ()
    library_networks: tuple[str, ...] = ()
    usage_stats_window_months: int = DEFAULT_STATS_WINDOW_MONTHS


@dataclass
class AppConfig:
    ranking: RankingConfig = field(default_factory=RankingConfig)
    shaping: ShapingConfig = field(default_factory=ShapingConfig)
    intent: IntentConfig = field(default_factory=IntentConfig)
    service: ServiceConfig = field(default_factory=ServiceConfig)

    def validate(self) -> None:
        self.ranking.validate()
        if not 0 < self.shaping.cluster_similarity_threshold <= 1:
            raise ConfigError("cluster_similarity_threshold outside (0,1]")
        if self.shaping.diversify_slots < 0:
            raise ConfigError("diversify_slots negative")
        if self.shaping.snippet_max_chars <= 0:
            raise ConfigError("snippet_max_chars must be positive")
        if self.intent.min_sessions < 1:
            raise ConfigError("min_sessions must be >= 1")
        if self.service.page_size < 1:
            raise ConfigError("page_size must be >= 1")


def config_to_dict(config: AppConfig) -> dict[str, Any]:
    r = config.ranking
    return {
        "ranking": {
            "field_weights": {f.value: r.field_weights.get(f) for f in FieldName},
            "factor_weights": {
                kind.value: {
                    "text": fw.text,
                    "popularity": fw.popularity,
                    "freshness": fw.freshness,
                    "locality": fw.locality,
                    "other": fw.other,
                }
                for kind, fw in r.factor_weights.items()
            },
            "locality_matrix": {
                loc.value: {cls.value: row[cls] for cls in AvailabilityClass}
                for loc, row in r.locality_matrix.items()
            },
            "freshness_half_life_years": r.freshness_half_life_years,
            "freshness_recent_years": r.freshness_recent_years,
            "default_need": r.default_need,
            "type_preferences": {
                "discipline": {
                    group: {dt.value: m for dt, m in prefs.items()}
                    for group, prefs in r.type_preferences_discipline.items()
                },
                "user_group": {
                    ug.value: {dt.value: m for dt, m in prefs.items()}
                    for ug, prefs in r.type_preferences_user_group.items()
                },
            },
            "popularity_component_weights": {
                "copies": r.popularity_component_weights.copies,
                "views": r.popularity_component_weights.views,
                "circulation": r.popularity_component_weights.circulation,
                "downloads": r.popularity_component_weights.downloads,
                "ratings": r.popularity_component_weights.ratings,
                "citations": r.popularity_component_weights.citations,
                "author_group": r.popularity_component_weights.author_group,
                "publisher_group": r.popularity_component_weights.publisher_group,
                "series_group": r.popularity_component_weights.series_group,
            },
            "enrichment_bonus": {
                "toc": r.enrichment_bonuses.toc,
                "full_text": r.enrichment_bonuses.full_text,
                "review": r.enrichment_bonuses.review,
                "abstract": r.enrichment_bonuses.abstract,
            },
        },
        "shaping": {
            "cluster_similarity_threshold": config.shaping.cluster_similarity_threshold,
            "diversify_slots": config.shaping.diversify_slots,
            "fresh_work_years": config.shaping.fresh_work_years,
            "snippet_max_chars": config.shaping.snippet_max_chars,
        },
        "intent": {
            "min_sessions": config.intent.min_sessions,
            "title_coverage": config.intent.title_coverage,
            "click_concentration": config.intent.click_concentration,
            "type_concentration": config.intent.type_concentration,
            "source_terms": list(config.intent.source_terms),
        },
        "service": {
            "page_size": config.service.page_size,
            "campus_networks": list(config.service.campus_networks),
            "library_networks": list(config.service.library_networks),
            "usage_stats_window_months": config.service.usage_stats_window_months,
        },
    }


def _ranking_from_dict(d: dict[str, Any]) -> RankingConfig:
    base = RankingConfig()
    if "field_weights" in d:
        base.field_weights = FieldWeights(
            {FieldName(k): float(v) for k, v in d["field_weights"].items()}
        )
    if "factor_weights" in d:
        base.factor_weights = {
            IntentKind(kind): FactorWeights(
                text=float(fw["text"]),
                popularity=float(fw["popularity"]),
                freshness=float(fw["freshness"]),
                locality=float(fw["locality"]),
                other=float(fw["other"]),
            )
            for kind, fw in d["factor_weights"].items()
        }
    if "locality_matrix" in d:
        base.locality_matrix = {
            UserLocation(loc): {AvailabilityClass(cls): float(v) for cls, v in row.items()}
            for loc, row in d["locality_matrix"].items()
        }
    if "freshness_half_life_years" in d:
        base.freshness_half_life_years = float(d["freshness_half_life_years"])
    if "freshness_recent_years" in d:
        base.freshness_recent_years = int(d["freshness_recent_years"])
    if "default_need" in d:
        base.default_need = float(d["default_need"])
    prefs = d.get("type_preferences", {})
    if "discipline" in prefs:
        base.type_preferences_discipline = {
            group: {DocumentType(dt): float(m) for dt, m in row.items()}
            for group, row in prefs["discipline"].items()
        }
    if "user_group" in prefs:
        base.type_preferences_user_group = {
            UserGroup(ug): {DocumentType(dt): float(m) for dt, m in row.items()}
            for ug, row in prefs["user_group"].items()
        }
    if "popularity_component_weights" in d:
        base.popularity_component_weights = PopularityComponentWeights(
            **{k: float(v) for k, v in d["popularity_component_weights"].items()}
        )
    if "enrichment_bonus" in d:
        base.enrichment_bonuses = EnrichmentBonuses(
            **{k: float(v) for k, v in d["enrichment_bonus"].items()}
        )
    return base


def config_from_dict(data: dict[str, Any]) -> AppConfig:
    config = AppConfig()
    try:
        if "ranking" in data:
            config.ranking = _ranking_from_dict(data["ranking"])
        if "shaping" in data:
            s = data["shaping"]
            config.shaping = ShapingConfig(
                cluster_similarity_threshold=float(
                    s.get("cluster_similarity_threshold", 0.9)
                ),
                diversify_slots=int(s.get("diversify_slots", 5)),
                fresh_work_years=int(s.get("fresh_work_years", 2)),
                snippet_max_chars=int(s.get("snippet_max_chars", 160)),
            )
        if "intent" in data:
            i = data["intent"]
            defaults = IntentConfig()
            config.intent = IntentConfig(
                min_sessions=int(i.get("min_sessions", defaults.min_sessions)),
                title_coverage=float(i.get("title_coverage", defaults.title_coverage)),
                click_concentration=float(
                    i.get("click_concentration", defaults.click_concentration)
                ),
                type_concentration=float(
                    i.get("type_concentration", defaults.type_concentration)
                ),
                source_terms=tuple(i.get("source_terms", defaults.source_terms)),
            )
        if "service" in data:
            s = data["service"]
            config.service = ServiceConfig(
                page_size=int(s.get("page_size", 10)),
                campus_networks=tuple(s.get("campus_networks", ())),
                library_networks=tuple(s.get("library_networks", ())),
                usage_stats_window_months=int(
                    s.get("usage_stats_window_months", DEFAULT_STATS_WINDOW_MONTHS)
                ),
            )
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    config.validate()
    return config


def load_config(path: str | Path | None = None) -> AppConfig:
    """Load the config file, honoring the LIBRANK_CONFIG override.

    Without a path (explicit or via environment) the defaults apply.
    """
    if path is None:
        env = os.environ.get(CONFIG_ENV_VAR)
        if env:
            path = env
    if path is None:
        return AppConfig()
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    data = yaml.safe_load(p.read_text(encoding="utf-8")) or {}
    if not isinstance(data, dict):
        raise ConfigError(f"config root must be a mapping: {p}")
    return config_from_dict(data)


def save_config(config: AppConfig, path: str | Path) -> None:
    Path(path).write_text(
        yaml.safe_dump(config_to_dict(config), sort_keys=False, allow_unicode=True),
        encoding="utf-8",
    )
