"""librank: search and multi-factor ranking engine for library catalogs."""

from .catalog import (
    BibRecord,
    DocumentType,
    Enrichment,
    Holding,
    HoldingLocation,
    HoldingStatus,
    UsageStats,
    normalize_text,
    validate_record,
)
from .config import AppConfig, load_config, save_config
from .engine import SearchEngine
from .errors import (
    ConfigError,
    DuplicateRecordError,
    EmptyQueryError,
    EngineStateError,
    LibrankError,
    UnknownRecordError,
)
from .intent import Intent, IntentKind, classify_from_clicks, classify_heuristic
from .logmining import (
    LogEvent,
    PreferencePair,
    click_preferences,
    failure_click_paths,
    parse_log,
    query_stats,
    zero_result_report,
)
from .ranking import (
    AvailabilityClass,
    FreshnessProfile,
    PopularityScores,
    RankingConfig,
    ScoredResult,
    UserContext,
    UserGroup,
    UserLocation,
    combine,
    compute_freshness_profile,
    compute_popularity_scores,
    freshness_score,
    locality_score,
    type_preference_score,
)
from .shaping import (
    FacetSet,
    ResultCluster,
    ResultPage,
    build_facets,
    cluster_versions,
    describe_result,
    diversify_top,
)
from .textindex import (
    FieldName,
    FieldWeights,
    InvertedIndex,
    build_index,
    enrichment_bonus,
    text_score,
    tokenize,
)

__version__ = "0.1.0"
