"""Popularity, freshness, locality, type preference and the combined score."""

from __future__ import annotations

import math
import random
from datetime import date

import pytest

from librank.catalog import DocumentType
from librank.errors import UnknownRecordError
from librank.intent import IntentKind
from librank.ranking import (
    AvailabilityClass,
    FreshnessProfile,
    RankingConfig,
    UserContext,
    UserGroup,
    UserLocation,
    availability_class,
    combine,
    compute_freshness_profile,
    compute_popularity_scores,
    freshness_score,
    locality_score,
    min_max_normalize,
    type_preference_score,
)
from librank.textindex import build_index

from conftest import (
    BRANCH_AVAILABLE,
    CENTRAL_AVAILABLE,
    CENTRAL_ON_LOAN,
    ONLINE_DOWNLOAD,
    TODAY,
    make_record,
    make_stats,
    random_corpus,
    random_stats,
)
from oracles import naive_combine_totals, naive_freshness_need, naive_popularity

CONFIG = RankingConfig()


def popularity_fixture():
    records = [
        make_record("A", authors=("Aa Aa",), publisher="Pa", series="Sa",
                    holdings=(CENTRAL_AVAILABLE, BRANCH_AVAILABLE)),
        make_record("B", authors=("Bb Bb",), publisher="Pb", series="Sb",
                    holdings=(CENTRAL_AVAILABLE,)),
        make_record("C", authors=("Cc Cc",), publisher="Pc", series="Sc",
                    holdings=(CENTRAL_AVAILABLE, BRANCH_AVAILABLE,
                              CENTRAL_ON_LOAN, ONLINE_DOWNLOAD)),
        make_record("D", authors=("Dd Dd",), publisher="Pd", series="Sd",
                    holdings=(CENTRAL_AVAILABLE,)),
    ]
    stats = [
        make_stats("A", view_count=10, circulation_count=20, download_count=0,
                   rating_sum=8, rating_count=2, citation_count=5),
        make_stats("B", view_count=0, circulation_count=10, download_count=4,
                   rating_sum=0, rating_count=0, citation_count=0),
        make_stats("C", view_count=40, circulation_count=0, download_count=8,
                   rating_sum=10, rating_count=2, citation_count=1),
        make_stats("D", view_count=20, circulation_count=40, download_count=2,
                   rating_sum=3, rating_count=1, citation_count=10),
    ]
    return records, stats


class TestPopularity:
    def test_all_zero_counters_score_zero(self):
        records = [make_record(f"r{i}", holdings=(CENTRAL_AVAILABLE,)) for i in range(3)]
        scores = compute_popularity_scores(records, [], CONFIG)
        assert all(v == 0.0 for v in scores.item_score.values())

    def test_catalog_max_in_every_component_scores_one(self):
        records = [
            make_record("top", authors=("Solo Star",), publisher="Px", series="Sx",
                        holdings=(CENTRAL_AVAILABLE, BRANCH_AVAILABLE)),
            make_record("rest", holdings=(CENTRAL_AVAILABLE,)),
        ]
        stats = [
            make_stats("top", view_count=9, circulation_count=9, download_count=9,
                       rating_sum=10, rating_count=2, citation_count=9),
        ]
        scores = compute_popularity_scores(records, stats, CONFIG)
        assert scores.item_score["top"] == pytest.approx(1.0, abs=1e-12)

    def test_four_record_fixture_hand_computed(self):
        # components min-max normalized over the catalog, weighted with the
        # defaults (.10 copies, .15 views, .25 circ, .10 downloads, .10
        # ratings, .10 citations, .10 author, .05 publisher, .05 series);
        # singleton groups reduce to the item's own normalized circulation
        records, stats = popularity_fixture()
        scores = compute_popularity_scores(records, stats, CONFIG).item_score
        circ_a = 20 / 40
        expected_a = (0.10 * (1 / 3) + 0.15 * (10 / 40) + 0.25 * circ_a + 0.10 * 0.0
                      + 0.10 * (4 / 5) + 0.10 * (5 / 10)
                      + 0.10 * circ_a + 0.05 * circ_a + 0.05 * circ_a)
        circ_b = 10 / 40
        expected_b = (0.10 * 0.0 + 0.15 * 0.0 + 0.25 * circ_b + 0.10 * (4 / 8)
                      + 0.10 * 0.0 + 0.10 * 0.0
                      + 0.10 * circ_b + 0.05 * circ_b + 0.05 * circ_b)
        expected_c = (0.10 * 1.0 + 0.15 * 1.0 + 0.25 * 0.0 + 0.10 * 1.0
                      + 0.10 * 1.0 + 0.10 * (1 / 10)
                      + 0.10 * 0.0 + 0.05 * 0.0 + 0.05 * 0.0)
        expected_d = (0.10 * 0.0 + 0.15 * (20 / 40) + 0.25 * 1.0 + 0.10 * (2 / 8)
                      + 0.10 * (3 / 5) + 0.10 * 1.0
                      + 0.10 * 1.0 + 0.05 * 1.0 + 0.05 * 1.0)
        assert scores["A"] == pytest.approx(expected_a, abs=1e-12)
        assert scores["B"] == pytest.approx(expected_b, abs=1e-12)
        assert scores["C"] == pytest.approx(expected_c, abs=1e-12)
        assert scores["D"] == pytest.approx(expected_d, abs=1e-12)
        # frozen literals from the oracle run
        assert scores["A"] == pytest.approx(0.4258333333333333, abs=1e-12)
        assert scores["B"] == pytest.approx(0.1625, abs=1e-12)
        assert scores["C"] == pytest.approx(0.46, abs=1e-12)
        assert scores["D"] == pytest.approx(0.71, abs=1e-12)

    def test_unknown_stats_record_faults(self):
        records = [make_record("known")]
        with pytest.raises(UnknownRecordError) as exc:
            compute_popularity_scores(records, [make_stats("ghost")], CONFIG)
        assert "ghost" in str(exc.value)

    def test_scores_bounded_and_complete(self):
        records = random_corpus(seed=11, size=30)
        stats = random_stats(seed=11, records=records)
        snapshot = compute_popularity_scores(records, stats, CONFIG)
        assert set(snapshot.item_score) == {r.record_id for r in records}
        assert all(0.0 <= v <= 1.0 + 1e-12 for v in snapshot.item_score.values())

    def test_matches_bruteforce(self):
        records = random_corpus(seed=23, size=50)
        stats = random_stats(seed=23, records=records)
        snapshot = compute_popularity_scores(records, stats, CONFIG)
        raw = {
            "copies": 0.10, "views": 0.15, "circulation": 0.25, "downloads": 0.10,
            "ratings": 0.10, "citations": 0.10, "author_group": 0.10,
            "publisher_group": 0.05, "series_group": 0.05,
        }
        oracle = naive_popularity(records, {s.record_id: s for s in stats}, raw)
        assert snapshot.item_score == oracle

    def test_monotone_in_circulation(self):
        # two-record corpus where the bumped record already holds the max
        records = [make_record("hot", authors=("A B",)), make_record("cold")]
        low = [make_stats("hot", circulation_count=10), make_stats("cold", circulation_count=5)]
        high = [make_stats("hot", circulation_count=20), make_stats("cold", circulation_count=5)]
        s_low = compute_popularity_scores(records, low, CONFIG).item_score["hot"]
        s_high = compute_popularity_scores(records, high, CONFIG).item_score["hot"]
        assert s_high >= s_low


class TestFreshnessProfile:
    def test_all_recent_circulation(self):
        records = [make_record("n1", year=2025, discipline="informatics")]
        stats = [make_stats("n1", circulation_count=12)]
        profile = compute_freshness_profile(records, stats, TODAY, CONFIG)
        assert profile.need["informatics"] == 1.0

    def test_zero_circulation_falls_back(self):
        records = [make_record("n1", year=2025, discipline="quietfield")]
        profile = compute_freshness_profile(records, [], TODAY, CONFIG)
        assert profile.need["quietfield"] == 0.5

    def test_thirty_recent_ninety_old(self):
        records = [
            make_record("new", year=2024, discipline="g"),
            make_record("old", year=1990, discipline="g"),
        ]
        stats = [
            make_stats("new", circulation_count=30),
            make_stats("old", circulation_count=90),
        ]
        profile = compute_freshness_profile(records, stats, TODAY, CONFIG)
        assert profile.need["g"] == 0.25

    def test_matches_bruteforce(self):
        records = random_corpus(seed=31, size=50)
        stats = random_stats(seed=31, records=records)
        profile = compute_freshness_profile(records, stats, TODAY, CONFIG)
        oracle = naive_freshness_need(records, {s.record_id: s for s in stats}, TODAY)
        assert profile.need == oracle


class TestFreshnessScore:
    def test_age_zero_full_need(self):
        profile = FreshnessProfile(need={"g": 1.0})
        record = make_record("r", year=TODAY.year, discipline="g")
        assert freshness_score(record, profile, TODAY, CONFIG) == 1.0

    def test_age_equals_half_life(self):
        profile = FreshnessProfile(need={"g": 1.0})
        record = make_record("r", year=TODAY.year - 5, discipline="g")
        assert freshness_score(record, profile, TODAY, CONFIG) == pytest.approx(0.5)

    def test_need_zero_is_constant(self):
        profile = FreshnessProfile(need={"g": 0.0})
        young = make_record("r1", year=TODAY.year, discipline="g")
        ancient = make_record("r2", year=1950, discipline="g")
        assert freshness_score(young, profile, TODAY, CONFIG) == 0.5
        assert freshness_score(ancient, profile, TODAY, CONFIG) == 0.5

    def test_unknown_group_uses_default_need(self):
        profile = FreshnessProfile(need={}, default_need=0.5)
        record = make_record("r", year=TODAY.year, discipline="unseen")
        assert freshness_score(record, profile, TODAY, CONFIG) == pytest.approx(0.75)


class TestLocality:
    def test_home_download_is_top(self):
        record = make_record("r", holdings=(ONLINE_DOWNLOAD,))
        ctx = UserContext(UserLocation.HOME)
        assert locality_score(record, ctx, CONFIG) == 1.0

    def test_home_prefers_electronic_over_local_print(self):
        electronic = make_record("e", holdings=(ONLINE_DOWNLOAD,))
        print_twin = make_record("p", holdings=(CENTRAL_AVAILABLE,))
        ctx = UserContext(UserLocation.HOME)
        assert locality_score(electronic, ctx, CONFIG) > locality_score(
            print_twin, ctx, CONFIG
        )

    def test_library_prefers_local_over_other_branch(self):
        local = make_record("l", holdings=(CENTRAL_AVAILABLE,))
        other = make_record("o", holdings=(BRANCH_AVAILABLE,))
        ctx = UserContext(UserLocation.LIBRARY)
        assert locality_score(local, ctx, CONFIG) > locality_score(other, ctx, CONFIG)

    def test_no_holdings_counts_as_on_loan_only(self):
        record = make_record("r", holdings=())
        assert availability_class(record) == AvailabilityClass.ON_LOAN_ONLY
        assert locality_score(record, UserContext(), CONFIG) == 0.1

    def test_best_class_wins(self):
        record = make_record("r", holdings=(CENTRAL_ON_LOAN, BRANCH_AVAILABLE))
        assert availability_class(record) == AvailabilityClass.AVAILABLE_OTHER_BRANCH


class TestTypePreference:
    def test_all_defaults_neutral(self):
        record = make_record("r")
        assert type_preference_score(record, UserContext(), CONFIG) == 0.5

    def test_discipline_multiplier(self):
        config = RankingConfig(
            type_preferences_discipline={
                "informatics": {DocumentType.CONFERENCE_PAPER: 1.6}
            }
        )
        paper = make_record("p", doc_type=DocumentType.CONFERENCE_PAPER,
                            discipline="informatics")
        mono = make_record("m", discipline="informatics")
        ctx = UserContext()
        assert type_preference_score(paper, ctx, config) == pytest.approx(0.8)
        assert type_preference_score(mono, ctx, config) == 0.5

    def test_student_textbook_preference(self):
        config = RankingConfig(
            type_preferences_user_group={
                UserGroup.STUDENT: {DocumentType.TEXTBOOK: 1.8}
            }
        )
        textbook = make_record("t", doc_type=DocumentType.TEXTBOOK)
        mono = make_record("m")
        ctx = UserContext(user_group=UserGroup.STUDENT)
        assert type_preference_score(textbook, ctx, config) == pytest.approx(0.9)
        assert type_preference_score(textbook, ctx, config) > type_preference_score(
            mono, ctx, config
        )

    def test_clamped_to_one(self):
        config = RankingConfig(
            type_preferences_discipline={"g": {DocumentType.MONOGRAPH: 2.0}},
            type_preferences_user_group={
                UserGroup.PROFESSOR: {DocumentType.MONOGRAPH: 2.0}
            },
        )
        record = make_record("r", discipline="g")
        ctx = UserContext(user_group=UserGroup.PROFESSOR)
        assert type_preference_score(record, ctx, config) == 1.0


def _combine_setup(records, stats):
    index = build_index(records)
    record_map = {r.record_id: r for r in records}
    popularity = compute_popularity_scores(records, stats, CONFIG)
    freshness = compute_freshness_profile(records, stats, TODAY, CONFIG)
    return index, record_map, popularity, freshness


class TestCombine:
    def test_empty_candidates(self):
        records = [make_record("r1")]
        index, record_map, pop, fresh = _combine_setup(records, [])
        assert combine(["x"], [], IntentKind.INFORMATIONAL, UserContext(), index,
                       record_map, pop, fresh, CONFIG, TODAY) == []

    def test_degenerate_text_weights_follow_text_order(self):
        from librank.ranking import FactorWeights

        records = [
            make_record("r1", title="logic"),
            make_record("r2", title="logic and more words here"),
            make_record("r3", title="something else"),
        ]
        stats = [make_stats("r2", circulation_count=50)]
        index, record_map, pop, fresh = _combine_setup(records, stats)
        config = RankingConfig(
            factor_weights={
                IntentKind.NAVIGATIONAL: FactorWeights(1.0, 0.0, 0.0, 0.0, 0.0),
                IntentKind.INFORMATIONAL: FactorWeights(1.0, 0.0, 0.0, 0.0, 0.0),
                IntentKind.TRANSACTIONAL: FactorWeights(1.0, 0.0, 0.0, 0.0, 0.0),
            }
        )
        results = combine(["logic"], ["r1", "r2", "r3"], IntentKind.INFORMATIONAL,
                          UserContext(), index, record_map, pop, fresh, config, TODAY)
        texts = [r.text for r in results]
        assert texts == sorted(texts, reverse=True)
        assert results[0].record_id == "r1"  # shorter title, higher tf/length

    def test_identical_records_tie_break_by_record_id(self):
        records = [
            make_record("zz", title="same title"),
            make_record("aa", title="same title"),
        ]
        index, record_map, pop, fresh = _combine_setup(records, [])
        results = combine(["same"], ["zz", "aa"], IntentKind.INFORMATIONAL,
                          UserContext(), index, record_map, pop, fresh, CONFIG, TODAY)
        assert results[0].total == results[1].total
        assert [r.record_id for r in results] == ["aa", "zz"]

    def test_five_candidate_fixture_matches_bruteforce(self):
        records = random_corpus(seed=41, size=12)
        stats = random_stats(seed=41, records=records)
        index, record_map, pop, fresh = _combine_setup(records, stats)
        candidates = sorted(r.record_id for r in records)[:5]
        results = combine(["history", "library"], candidates,
                          IntentKind.INFORMATIONAL, UserContext(), index,
                          record_map, pop, fresh, CONFIG, TODAY)
        oracle = naive_combine_totals(
            ["history", "library"], candidates, records,
            {s.record_id: s for s in stats}, "informational", "home", "anonymous",
            TODAY,
        )
        for result in results:
            assert math.isclose(result.total, oracle[result.record_id],
                                rel_tol=1e-9, abs_tol=1e-12)

    def test_permutation_completeness_and_bounds(self):
        rng = random.Random(5)
        records = random_corpus(seed=51, size=25)
        stats = random_stats(seed=51, records=records)
        index, record_map, pop, fresh = _combine_setup(records, stats)
        ids = [r.record_id for r in records]
        for _ in range(25):
            candidates = rng.sample(ids, rng.randint(0, len(ids)))
            query = rng.sample(["history", "logic", "library", "zzz"], 2)
            kind = rng.choice(list(IntentKind))
            results = combine(query, candidates, kind, UserContext(), index,
                              record_map, pop, fresh, CONFIG, TODAY)
            assert sorted(r.record_id for r in results) == sorted(candidates)
            for r in results:
                assert -1e-9 <= r.total <= 1.0 + 1e-9
                recomposed = sum(
                    getattr(CONFIG.factor_weights[kind], name) * value
                    for name, value in r.breakdown().items()
                    if name != "popularity"
                ) + CONFIG.factor_weights[kind].popularity * r.popularity
                assert abs(recomposed - r.total) <= 1e-9

    def test_query_independence_of_precomputed_components(self):
        records = random_corpus(seed=61, size=10)
        stats = random_stats(seed=61, records=records)
        index, record_map, pop, fresh = _combine_setup(records, stats)
        ids = sorted(record_map)
        a = combine(["history"], ids, IntentKind.INFORMATIONAL, UserContext(),
                    index, record_map, pop, fresh, CONFIG, TODAY)
        b = combine(["library", "catalog"], ids, IntentKind.INFORMATIONAL,
                    UserContext(), index, record_map, pop, fresh, CONFIG, TODAY)
        pop_a = {r.record_id: (r.popularity, r.freshness) for r in a}
        pop_b = {r.record_id: (r.popularity, r.freshness) for r in b}
        assert pop_a == pop_b

    def test_navigational_weights_favor_exact_title_over_popularity(self):
        exact = make_record("exact", title="catalog ranking handbook")
        popular = make_record("pop", title="catalog systems",
                              authors=("Star Author",),
                              holdings=(CENTRAL_AVAILABLE, BRANCH_AVAILABLE))
        records = [exact, popular]
        stats = [make_stats("pop", view_count=100, circulation_count=100,
                            download_count=100, rating_sum=25, rating_count=5,
                            citation_count=50)]
        index, record_map, pop, fresh = _combine_setup(records, stats)
        assert pop.item_score["pop"] > 0.9
        results = combine(["catalog", "ranking", "handbook"], ["exact", "pop"],
                          IntentKind.NAVIGATIONAL, UserContext(), index,
                          record_map, pop, fresh, CONFIG, TODAY)
        assert results[0].record_id == "exact"


class TestMinMax:
    def test_constant_maps_to_zero(self):
        assert min_max_normalize({"a": 3.0, "b": 3.0}) == {"a": 0.0, "b": 0.0}

    def test_bounds(self):
        out = min_max_normalize({"a": 1.0, "b": 2.0, "c": 4.0})
        assert out["a"] == 0.0 and out["c"] == 1.0 and 0.0 < out["b"] < 1.0
