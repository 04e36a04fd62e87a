import logging
import math
import typing as ty
from dataclasses import dataclass

from .diagnostics import DiagnosticLog
from .exceptions import PreconditionError
from .fpgrowth import AttributeItemset, AttributeSet
from .popularity import SPRING, WINTER
from .utils import UNDEFINED, MaybeFloat

_LOGGER = logging.getLogger(__name__)

CLASSIC = 'classic'
ATTRACTIVE = 'attractive'
POPULAR = 'popular'
UNPOPULAR = 'unpopular'
NEUTRAL = 'neutral'
CLASSES = (CLASSIC, ATTRACTIVE, POPULAR, UNPOPULAR, NEUTRAL)
CLASSIC_ATTRACTIVE = 'classic/attractive'

UP = 'up'
DOWN = 'down'
FLAT = 'flat'

POPULAR_DISTINCTIVE = 'popular-distinctive'
UNPOPULAR_DISTINCTIVE = 'unpopular-distinctive'
SHARED = 'shared'

DEFAULT_TAU_CLASSIC = 0.3
DEFAULT_TAU_POPULAR = 1.5
DEFAULT_FLAT_BAND = 0.05
DEFAULT_SEASONS = (SPRING, WINTER)

StatKey = ty.Tuple[str, str]  # (season, attribute)


def compute_lift(sup_pop: float, sup_unpop: float) -> MaybeFloat:
    if sup_unpop == 0:
        return math.inf if sup_pop > 0 else UNDEFINED
    return sup_pop / sup_unpop


@dataclass(frozen=True)
class SupportPair:
    sup_pop: float
    sup_unpop: float

    @property
    def lift(self) -> MaybeFloat:
        return compute_lift(self.sup_pop, self.sup_unpop)


@dataclass(frozen=True)
class FeatureStats:
    vocabulary: ty.Tuple[str, ...]
    stats: ty.Mapping[StatKey, SupportPair]
    sizes: ty.Mapping[str, ty.Tuple[int, int]]  # season -> (n_pop, n_unpop)

    @property
    def seasons(self) -> ty.List[str]:
        return sorted(self.sizes)

    def __getitem__(self, key: StatKey) -> SupportPair:
        return self.stats[key]

    def season(self, season: str) -> ty.Dict[str, SupportPair]:
        return {
            attribute: self.stats[(season, attribute)]
            for attribute in self.vocabulary
        }


def support_of(sets: ty.Sequence[AttributeSet], attribute: str) -> float:
    return sum(1 for s in sets if attribute in s) / len(sets)


def feature_stats(
        popular: ty.Mapping[str, ty.Sequence[AttributeSet]],
        unpopular: ty.Mapping[str, ty.Sequence[AttributeSet]],
        vocabulary: ty.Sequence[str],
        log: ty.Optional[DiagnosticLog] = None,
) -> FeatureStats:
    log = log if log is not None else DiagnosticLog('feature_stats')
    stats = {}
    sizes = {}
    for season in sorted(set(popular) | set(unpopular)):
        pop_sets = popular.get(season) or []
        unpop_sets = unpopular.get(season) or []
        if not pop_sets or not unpop_sets:
            log.warning(0, f'season {season} has {len(pop_sets)} popular and '
                           f'{len(unpop_sets)} unpopular items, skipped')
            continue
        sizes[season] = (len(pop_sets), len(unpop_sets))
        for attribute in vocabulary:
            stats[(season, attribute)] = SupportPair(
                sup_pop=support_of(pop_sets, attribute),
                sup_unpop=support_of(unpop_sets, attribute),
            )
    return FeatureStats(tuple(vocabulary), stats, sizes)


@dataclass(frozen=True)
class FeatureClassification:
    classes: ty.Mapping[StatKey, str]
    tau_classic: float
    tau_popular: float
    seasons: ty.Tuple[str, ...]

    def of(self, season: str, attribute: str) -> str:
        return self.classes[(season, attribute)]

    def by_class(self, season: str) -> ty.Dict[str, ty.List[str]]:
        result: ty.Dict[str, ty.List[str]] = {c: [] for c in CLASSES}
        for (s, attribute), cls in sorted(self.classes.items()):
            if s == season:
                result[cls].append(attribute)
        return result

    def merged_view(self) -> ty.Dict[str, ty.Dict[str, ty.List[str]]]:
        """Classic and attractive merged per season"""
        view = {}
        for season in self.seasons:
            groups = self.by_class(season)
            view[season] = {
                CLASSIC_ATTRACTIVE: sorted(
                    groups[CLASSIC] + groups[ATTRACTIVE],
                ),
                POPULAR: groups[POPULAR],
                UNPOPULAR: groups[UNPOPULAR],
            }
        return view


def check_thresholds(tau_classic: float, tau_popular: float) -> None:
    if not (0 < tau_classic <= 1):
        raise PreconditionError('tau_classic must be in (0,1]')
    if not tau_popular >= 1:
        raise PreconditionError('tau_popular must be >= 1')


def _contrast_class(lift: MaybeFloat, tau_popular: float) -> str:
    if isinstance(lift, str):
        return NEUTRAL
    if lift >= tau_popular:
        return POPULAR
    if lift <= 1 / tau_popular:
        return UNPOPULAR
    return NEUTRAL


def classify(
        stats: FeatureStats,
        tau_classic: float = DEFAULT_TAU_CLASSIC,
        tau_popular: float = DEFAULT_TAU_POPULAR,
        seasons: ty.Sequence[str] = DEFAULT_SEASONS,
        log: ty.Optional[DiagnosticLog] = None,
) -> FeatureClassification:
    check_thresholds(tau_classic, tau_popular)
    log = log if log is not None else DiagnosticLog('classify')
    present = tuple(s for s in seasons if s in stats.sizes)
    missing = [s for s in seasons if s not in stats.sizes]
    cross_season = not missing and len(present) > 1
    if missing:
        log.warning(0, f'no statistics for season(s) {", ".join(missing)}, '
                       f'classic features are not evaluated')

    classes = {}
    for attribute in stats.vocabulary:
        pairs = [stats[(season, attribute)] for season in present]
        is_classic = cross_season and min(
            min(p.sup_pop, p.sup_unpop) for p in pairs
        ) >= tau_classic
        for season, pair in zip(present, pairs):
            if is_classic:
                cls = CLASSIC
            elif min(pair.sup_pop, pair.sup_unpop) >= tau_classic:
                cls = ATTRACTIVE
            else:
                cls = _contrast_class(pair.lift, tau_popular)
            classes[(season, attribute)] = cls

    return FeatureClassification(classes, tau_classic, tau_popular, present)


@dataclass(frozen=True)
class TrendDelta:
    attribute: str
    first_sup: float
    second_sup: float
    delta: float
    direction: str


def trend_deltas(
        stats: FeatureStats,
        flat_band: float = DEFAULT_FLAT_BAND,
        first: str = SPRING,
        second: str = WINTER,
) -> ty.List[TrendDelta]:
    if flat_band < 0:
        raise PreconditionError('flat band must be >= 0')
    if first not in stats.sizes or second not in stats.sizes:
        _LOGGER.warning(f'Trend between {first} and {second} skipped, '
                        f'season statistics missing')
        return []
    deltas = []
    for attribute in stats.vocabulary:
        a = stats[(first, attribute)].sup_pop
        b = stats[(second, attribute)].sup_pop
        delta = a - b
        if delta > flat_band:
            direction = UP
        elif delta < -flat_band:
            direction = DOWN
        else:
            direction = FLAT
        deltas.append(TrendDelta(attribute, a, b, delta, direction))
    deltas.sort(key=lambda d: (-abs(d.delta), d.attribute))
    return deltas


@dataclass(frozen=True)
class MinedCollection:
    itemsets: ty.Sequence[AttributeItemset]
    n_transactions: int
    min_support_fraction: float
    min_support: int = 1

    def by_items(self) -> ty.Dict[AttributeSet, AttributeItemset]:
        return {s.items: s for s in self.itemsets}


@dataclass(frozen=True)
class ItemsetComparison:
    items: AttributeSet
    kind: str
    popular_support: ty.Optional[int] = None
    popular_relative: ty.Optional[float] = None
    unpopular_support: ty.Optional[int] = None
    unpopular_relative: ty.Optional[float] = None

    @property
    def contrast(self) -> float:
        return (self.popular_relative or 0.0) - \
            (self.unpopular_relative or 0.0)


def frequent_sets_report(popular: MinedCollection,
                         unpopular: MinedCollection,
                         ) -> ty.List[ItemsetComparison]:
    if popular.min_support_fraction != unpopular.min_support_fraction:
        raise PreconditionError(
            f'min_support mismatch: {popular.min_support_fraction} vs '
            f'{unpopular.min_support_fraction}',
        )
    pop = popular.by_items()
    unpop = unpopular.by_items()
    result = []
    for items in set(pop) | set(unpop):
        p = pop.get(items)
        u = unpop.get(items)
        if p and u:
            kind = SHARED
        elif p:
            kind = POPULAR_DISTINCTIVE
        else:
            kind = UNPOPULAR_DISTINCTIVE
        result.append(ItemsetComparison(
            items=items,
            kind=kind,
            popular_support=p.support if p else None,
            popular_relative=(
                p.relative_support(popular.n_transactions) if p else None
            ),
            unpopular_support=u.support if u else None,
            unpopular_relative=(
                u.relative_support(unpopular.n_transactions) if u else None
            ),
        ))
    result.sort(key=lambda c: (-c.contrast, len(c.items), sorted(c.items)))
    return result
