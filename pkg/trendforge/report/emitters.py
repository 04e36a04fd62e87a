import typing as ty

from ..trendmine import NEUTRAL
from ..utils import join_items
from .base import Emitter
from .model import POPULAR_SET, UNPOPULAR_SET


class FeaturesEmitter(Emitter):
    NAME = 'features'
    FILENAME = 'features.csv'
    COLUMNS = ('season', 'attribute', 'sup_pop', 'sup_unpop', 'lift',
               'class')

    def rows(self):
        for row in self.report.feature_rows():
            yield (row.season, row.attribute, row.sup_pop, row.sup_unpop,
                   row.lift, row.cls)


class TrendEmitter(Emitter):
    NAME = 'trend'
    FILENAME = 'trend.csv'

    def columns(self):
        first, second = self.report.seasons
        return ['attribute', f'{first}_sup', f'{second}_sup', 'delta',
                'direction']

    def rows(self):
        for d in self.report.trend:
            yield d.attribute, d.first_sup, d.second_sup, d.delta, d.direction


class ItemsetsEmitter(Emitter):
    NAME = 'itemsets'
    FILENAME = 'itemsets.csv'
    COLUMNS = ('season', 'category', 'set_kind', 'items', 'support',
               'relative_support')

    def rows(self):
        for (season, category), collections in sorted(
                self.report.mined.items()):
            for name, mined in zip((POPULAR_SET, UNPOPULAR_SET), collections):
                for itemset in mined.itemsets:
                    yield (
                        season, category, name, join_items(itemset.items),
                        itemset.support,
                        itemset.relative_support(mined.n_transactions),
                    )


class ItemsetComparisonEmitter(Emitter):
    NAME = 'itemset_comparison'
    FILENAME = 'itemset_comparison.csv'
    COLUMNS = ('season', 'category', 'itemset', 'kind', 'popular_support',
               'popular_relative', 'unpopular_support', 'unpopular_relative',
               'contrast')

    def rows(self):
        for (season, category), comparisons in sorted(
                self.report.comparisons.items()):
            for c in comparisons:
                yield (
                    season, category, join_items(c.items), c.kind,
                    c.popular_support, c.popular_relative,
                    c.unpopular_support, c.unpopular_relative, c.contrast,
                )


class SelectionEmitter(Emitter):
    NAME = 'selection'
    FILENAME = 'selection.csv'
    COLUMNS = ('season', 'category', 'collection', 'rank', 'item_id',
               'count')

    def rows(self):
        selection = self.report.selection
        freq = self.report.frequencies
        for season, category in selection.cells:
            for name, ids in (
                    (POPULAR_SET, selection.popular[(season, category)]),
                    (UNPOPULAR_SET, selection.unpopular[(season, category)]),
            ):
                for rank, item_id in enumerate(ids, start=1):
                    yield (season, category, name, rank, item_id,
                           freq[(season, category, item_id)])


class DiagnosticsEmitter(Emitter):
    NAME = 'diagnostics'
    FILENAME = 'diagnostics.csv'
    COLUMNS = ('severity', 'source', 'row', 'message')

    def rows(self):
        for log in self.report.logs:
            for d in log:
                yield d.severity.value, d.source, d.row, d.message


class MonthlyPlot(Emitter):
    NAME = 'months'
    FILENAME = 'months.csv'
    COLUMNS = ('year', 'month', 'count')
    PLOT = True

    def rows(self):
        for (year, month), count in sorted(self.report.months.items()):
            yield year, month, count


class FeatureBarsPlot(Emitter):
    NAME = 'feature_bars'
    FILENAME = 'feature_bars.csv'
    COLUMNS = ('season', 'attribute', 'class', 'view_class', 'sup_pop',
               'sup_unpop')
    PLOT = True

    def rows(self):
        for row in self.report.feature_rows():
            if row.cls == NEUTRAL:
                continue
            yield (row.season, row.attribute, row.cls, row.view_class,
                   row.sup_pop, row.sup_unpop)


class DeltasPlot(Emitter):
    NAME = 'deltas'
    FILENAME = 'deltas.csv'
    COLUMNS = ('attribute', 'delta', 'abs_delta', 'direction')
    PLOT = True

    def rows(self) -> ty.Iterator[ty.Tuple]:
        # trend deltas are already ordered by |delta| descending
        for d in self.report.trend:
            yield d.attribute, d.delta, abs(d.delta), d.direction
