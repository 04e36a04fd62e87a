import math
import random

import pytest

from trendforge.exceptions import PreconditionError
from trendforge.fpgrowth import frequent_itemsets
from trendforge.trendmine import (ATTRACTIVE, CLASSES, CLASSIC,
                                  CLASSIC_ATTRACTIVE, DOWN, FLAT, NEUTRAL,
                                  POPULAR, POPULAR_DISTINCTIVE, SHARED,
                                  UNPOPULAR, UNPOPULAR_DISTINCTIVE, UP,
                                  FeatureStats, MinedCollection,
                                  SupportPair, classify, compute_lift,
                                  feature_stats, frequent_sets_report,
                                  trend_deltas)
from trendforge.utils import UNDEFINED


def make_stats(supports):
    """supports: {(season, attribute): (sup_pop, sup_unpop)}"""
    vocabulary = sorted({attribute for _, attribute in supports})
    seasons = {season for season, _ in supports}
    return FeatureStats(
        tuple(vocabulary),
        {key: SupportPair(*pair) for key, pair in supports.items()},
        {season: (10, 10) for season in seasons},
    )


def random_stats(rng, attributes=8):
    return make_stats({
        (season, f'attr{n}'): (round(rng.random(), 2), round(rng.random(), 2))
        for season in ('spring', 'winter')
        for n in range(attributes)
    })


class TestFeatureStats:
    def test_support_ratio(self):
        popular = {'spring': [{'collar'}, {'collar', 'belt'}, {'collar'},
                              set()]}
        unpopular = {'spring': [{'belt'}, set()]}
        stats = feature_stats(popular, unpopular, ['belt', 'collar'])
        assert stats[('spring', 'collar')].sup_pop == 0.75
        assert stats[('spring', 'collar')].sup_unpop == 0.0
        assert stats[('spring', 'belt')].sup_unpop == 0.5
        assert stats.sizes == {'spring': (4, 2)}

    def test_empty_side_is_skipped(self):
        stats = feature_stats({'spring': [{'a'}]}, {'spring': []}, ['a'])
        assert stats.seasons == []

    def test_lift(self):
        assert compute_lift(0.3, 0.1) == pytest.approx(3.0)
        assert compute_lift(0.2, 0.0) == math.inf
        assert compute_lift(0.0, 0.0) == UNDEFINED


class TestClassify:
    def test_classic(self):
        stats = make_stats({('spring', 'white'): (0.6, 0.6),
                            ('winter', 'white'): (0.6, 0.6)})
        result = classify(stats, 0.3, 1.5)
        assert result.of('spring', 'white') == CLASSIC
        assert result.of('winter', 'white') == CLASSIC

    def test_attractive_in_one_season(self):
        stats = make_stats({('spring', 'belt'): (0.5, 0.4),
                            ('winter', 'belt'): (0.1, 0.1)})
        result = classify(stats, 0.3, 1.5)
        assert result.of('spring', 'belt') == ATTRACTIVE
        assert result.of('winter', 'belt') == NEUTRAL

    def test_popular(self):
        stats = make_stats({('spring', 'floral'): (0.4, 0.1),
                            ('winter', 'floral'): (0.1, 0.1)})
        assert classify(stats, 0.5, 1.5).of('spring', 'floral') == POPULAR

    def test_unpopular(self):
        stats = make_stats({('spring', 'brown'): (0.05, 0.2),
                            ('winter', 'brown'): (0.1, 0.1)})
        assert classify(stats, 0.3, 1.5).of('spring', 'brown') == UNPOPULAR

    def test_infinite_lift_is_popular(self):
        stats = make_stats({('spring', 'a'): (0.2, 0.0),
                            ('winter', 'a'): (0.0, 0.0)})
        result = classify(stats, 0.3, 1.5)
        assert result.of('spring', 'a') == POPULAR
        assert result.of('winter', 'a') == NEUTRAL

    def test_single_season_never_classic(self):
        stats = make_stats({('spring', 'white'): (0.6, 0.6)})
        result = classify(stats, 0.3, 1.5)
        assert result.of('spring', 'white') == ATTRACTIVE
        assert result.seasons == ('spring',)

    def test_totality(self):
        rng = random.Random(1)
        for _ in range(50):
            stats = random_stats(rng)
            result = classify(stats, rng.uniform(0.05, 1), rng.uniform(1, 4))
            assert set(result.classes) == set(stats.stats)
            assert set(result.classes.values()) <= set(CLASSES)

    def test_monotone_in_tau_popular(self):
        rng = random.Random(2)
        for _ in range(50):
            stats = random_stats(rng)
            loose = classify(stats, 0.3, 1.2).classes
            strict = classify(stats, 0.3, 2.5).classes
            for key, cls in strict.items():
                if cls in (POPULAR, UNPOPULAR):
                    assert loose[key] == cls

    def test_merged_view(self):
        stats = make_stats({
            ('spring', 'white'): (0.6, 0.6), ('winter', 'white'): (0.6, 0.6),
            ('spring', 'belt'): (0.5, 0.4), ('winter', 'belt'): (0.1, 0.1),
        })
        view = classify(stats, 0.3, 1.5).merged_view()
        assert view['spring'][CLASSIC_ATTRACTIVE] == ['belt', 'white']
        assert view['winter'][CLASSIC_ATTRACTIVE] == ['white']

    @pytest.mark.parametrize('tau_classic, tau_popular', [
        (0, 1.5), (1.2, 1.5), (0.3, 0.9),
    ])
    def test_threshold_domain(self, tau_classic, tau_popular):
        with pytest.raises(PreconditionError):
            classify(make_stats({('spring', 'a'): (0.1, 0.1)}),
                     tau_classic, tau_popular)


class TestTrendDeltas:
    def test_directions(self):
        stats = make_stats({
            ('spring', 'up'): (0.5, 0.0), ('winter', 'up'): (0.2, 0.0),
            ('spring', 'down'): (0.2, 0.0), ('winter', 'down'): (0.5, 0.0),
            ('spring', 'same'): (0.4, 0.0), ('winter', 'same'): (0.4, 0.0),
        })
        deltas = {d.attribute: d for d in trend_deltas(stats, 0.05)}
        assert deltas['up'].delta == pytest.approx(0.3)
        assert deltas['up'].direction == UP
        assert deltas['down'].delta == pytest.approx(-0.3)
        assert deltas['down'].direction == DOWN
        assert deltas['same'].delta == 0
        assert deltas['same'].direction == FLAT

    def test_ordered_by_magnitude(self):
        rng = random.Random(3)
        deltas = trend_deltas(random_stats(rng, 20))
        magnitudes = [abs(d.delta) for d in deltas]
        assert magnitudes == sorted(magnitudes, reverse=True)

    def test_antisymmetry(self):
        rng = random.Random(4)
        for _ in range(20):
            stats = random_stats(rng)
            forward = {d.attribute: d for d in trend_deltas(stats, 0.05)}
            backward = {
                d.attribute: d for d in
                trend_deltas(stats, 0.05, first='winter', second='spring')
            }
            swap = {UP: DOWN, DOWN: UP, FLAT: FLAT}
            for attribute, d in forward.items():
                assert backward[attribute].delta == -d.delta
                assert backward[attribute].direction == swap[d.direction]

    def test_missing_season(self):
        stats = make_stats({('spring', 'a'): (0.1, 0.1)})
        assert trend_deltas(stats) == []

    def test_band_domain(self):
        with pytest.raises(PreconditionError):
            trend_deltas(make_stats({('spring', 'a'): (0.1, 0.1)}), -0.1)


def collection(transactions, fraction=0.5, min_support=2):
    return MinedCollection(
        frequent_itemsets(transactions, min_support),
        len(transactions), fraction, min_support,
    )


class TestFrequentSetsReport:
    def test_shared_with_equal_support(self):
        popular = collection([{'a'}, {'a'}, {'b'}, {'b'}])
        unpopular = collection([{'a'}, {'a'}, {'c'}, {'c'}])
        report = {c.items: c for c in frequent_sets_report(popular,
                                                           unpopular)}
        shared = report[frozenset({'a'})]
        assert shared.kind == SHARED
        assert shared.popular_support == shared.unpopular_support == 2
        assert shared.contrast == 0
        assert report[frozenset({'b'})].kind == POPULAR_DISTINCTIVE
        assert report[frozenset({'b'})].unpopular_support is None
        assert report[frozenset({'c'})].kind == UNPOPULAR_DISTINCTIVE

    def test_matches_set_difference(self):
        popular = collection([{'a', 'b', 'c'}, {'a', 'b', 'c'}, {'a', 'd'},
                              {'a', 'd'}])
        unpopular = collection([{'a', 'b'}, {'a', 'b'}, {'c', 'e'},
                                {'c', 'e'}])
        pop = set(popular.by_items())
        unpop = set(unpopular.by_items())
        report = frequent_sets_report(popular, unpopular)
        kinds = {c.items: c.kind for c in report}
        assert {k for k, v in kinds.items() if v == SHARED} == pop & unpop
        assert {k for k, v in kinds.items()
                if v == POPULAR_DISTINCTIVE} == pop - unpop
        assert {k for k, v in kinds.items()
                if v == UNPOPULAR_DISTINCTIVE} == unpop - pop
        assert frozenset({'a', 'b', 'c'}) in pop - unpop
        contrasts = [c.contrast for c in report]
        assert contrasts == sorted(contrasts, reverse=True)

    def test_min_support_mismatch(self):
        with pytest.raises(PreconditionError):
            frequent_sets_report(collection([{'a'}], 0.5),
                                 collection([{'a'}], 0.1))
