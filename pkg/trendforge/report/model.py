import typing as ty
from dataclasses import dataclass, field

from ..diagnostics import DiagnosticLog
from ..popularity import Cell, FrequencyTable, PopularitySelection
from ..trendmine import (CLASSIC, CLASSIC_ATTRACTIVE, ATTRACTIVE,
                         FeatureClassification, FeatureStats,
                         ItemsetComparison, MinedCollection, TrendDelta)
from ..utils import format_number, join_items

POOLED = 'all'
POPULAR_SET = 'popular'
UNPOPULAR_SET = 'unpopular'


@dataclass(frozen=True)
class FeatureRow:
    season: str
    attribute: str
    sup_pop: float
    sup_unpop: float
    lift: str
    cls: str

    @property
    def view_class(self) -> str:
        if self.cls in (CLASSIC, ATTRACTIVE):
            return CLASSIC_ATTRACTIVE
        return self.cls


@dataclass
class RunReport:
    config: ty.Dict[str, ty.Any]
    logs: ty.List[DiagnosticLog]
    stage_rows: ty.Dict[str, ty.Dict[str, ty.Any]]
    noise: ty.Dict[str, ty.Any]
    frequencies: FrequencyTable
    selection: PopularitySelection
    months: ty.Dict[ty.Tuple[int, int], int]
    stats: FeatureStats
    classification: FeatureClassification
    trend: ty.List[TrendDelta]
    mined: ty.Dict[Cell, ty.Tuple[MinedCollection, MinedCollection]]
    comparisons: ty.Dict[Cell, ty.List[ItemsetComparison]]
    timings: ty.Dict[str, float] = field(default_factory=dict)

    @property
    def seasons(self) -> ty.Tuple[str, str]:
        first, second = self.config['seasons']
        return first, second

    def feature_rows(self) -> ty.List[FeatureRow]:
        rows = []
        for (season, attribute), cls in sorted(
                self.classification.classes.items()):
            pair = self.stats[(season, attribute)]
            rows.append(FeatureRow(
                season=season,
                attribute=attribute,
                sup_pop=pair.sup_pop,
                sup_unpop=pair.sup_unpop,
                lift=format_number(pair.lift),
                cls=cls,
            ))
        return rows

    def diagnostics_summary(self) -> ty.Dict[str, ty.Dict[str, int]]:
        return {log.source: log.summary() for log in self.logs}

    def as_dict(self) -> ty.Dict[str, ty.Any]:
        """Deterministic report body, timings live in the run metadata"""
        first, second = self.seasons
        return {
            'config': self.config,
            'diagnostics': self.diagnostics_summary(),
            'stages': self.stage_rows,
            'noise': self.noise,
            'selection': self.selection.summary(),
            'features': [
                {
                    'season': row.season,
                    'attribute': row.attribute,
                    'sup_pop': row.sup_pop,
                    'sup_unpop': row.sup_unpop,
                    'lift': row.lift,
                    'class': row.cls,
                }
                for row in self.feature_rows()
            ],
            'merged_view': self.classification.merged_view(),
            'trend': [
                {
                    'attribute': d.attribute,
                    f'{first}_sup': d.first_sup,
                    f'{second}_sup': d.second_sup,
                    'delta': d.delta,
                    'direction': d.direction,
                }
                for d in self.trend
            ],
            'itemset_comparisons': {
                f'{season}/{category}': [
                    {
                        'itemset': join_items(c.items),
                        'kind': c.kind,
                        'popular_support': c.popular_support,
                        'popular_relative': c.popular_relative,
                        'unpopular_support': c.unpopular_support,
                        'unpopular_relative': c.unpopular_relative,
                    }
                    for c in comparisons
                ]
                for (season, category), comparisons in sorted(
                    self.comparisons.items(),
                )
            },
        }
