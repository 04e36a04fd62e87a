import datetime
import json
import logging
import typing as ty
from collections import Counter
from dataclasses import dataclass, field

from .exceptions import DataError, PreconditionError
from .ingest.schema import Dataset, TransactionRecord
from .utils import percent_slots

_LOGGER = logging.getLogger(__name__)

SPRING = 'spring'
SUMMER = 'summer'
FALL = 'fall'
WINTER = 'winter'
SEASONS = (SPRING, SUMMER, FALL, WINTER)

DEFAULT_TOP_PERCENT = 10.0

# northern hemisphere
DEFAULT_ASSIGNMENT = {
    3: SPRING, 4: SPRING, 5: SPRING,
    6: SUMMER, 7: SUMMER, 8: SUMMER,
    9: FALL, 10: FALL, 11: FALL,
    12: WINTER, 1: WINTER, 2: WINTER,
}

EXCLUDED_DANGLING = 'dangling'
EXCLUDED_PRUNED = 'pruned'
EXCLUDED_UNMAPPED = 'unmapped'

Cell = ty.Tuple[str, str]  # (season, category)
CellKey = ty.Tuple[str, str, int]  # (season, category, item_id)


def check_percentile(percent: float) -> None:
    if not (0 < percent <= 50):
        raise PreconditionError('percentile must be in (0,50]')


@dataclass(frozen=True)
class SeasonMap:
    assignment: ty.Mapping[int, str] = field(
        default_factory=lambda: dict(DEFAULT_ASSIGNMENT),
    )

    def __post_init__(self):
        if set(self.assignment) != set(range(1, 13)):
            raise PreconditionError(
                'season map must assign every month 1-12 exactly once',
            )
        unknown = set(self.assignment.values()) - set(SEASONS)
        if unknown:
            raise PreconditionError(
                f'unknown seasons in season map: {sorted(unknown)}',
            )

    @classmethod
    def from_mapping(cls, raw: ty.Mapping[ty.Any, str]) -> 'SeasonMap':
        try:
            assignment = {int(month): season for month, season in raw.items()}
        except (TypeError, ValueError) as e:
            raise PreconditionError(f'invalid season map: {e}') from e
        return cls(assignment)

    @classmethod
    def from_json(cls, path) -> 'SeasonMap':
        try:
            with open(path, 'r', encoding='utf-8') as f:
                raw = json.load(f)
        except (OSError, ValueError) as e:
            raise DataError(f'cannot read season map: {e}', source=str(path))
        if not isinstance(raw, dict):
            raise DataError('season map must be a json object',
                            source=str(path))
        return cls.from_mapping(raw)

    def season_of(self, day: datetime.date) -> str:
        return self.assignment[day.month]

    def months_of(self, season: str) -> ty.List[int]:
        return sorted(m for m, s in self.assignment.items() if s == season)

    def as_dict(self) -> ty.Dict[str, str]:
        return {str(m): self.assignment[m] for m in range(1, 13)}


class FrequencyTable:
    """Selling frequency per (season, category, item)"""

    def __init__(self,
                 counts: ty.Optional[ty.Mapping[CellKey, int]] = None,
                 excluded: ty.Optional[ty.Mapping[str, int]] = None):
        self.counts: ty.Counter[CellKey] = Counter(counts or {})
        self.excluded: ty.Counter[str] = Counter(excluded or {})

    @property
    def included(self) -> int:
        return sum(self.counts.values())

    @property
    def total(self) -> int:
        return self.included + sum(self.excluded.values())

    def cells(self) -> ty.Dict[Cell, ty.Dict[int, int]]:
        result: ty.Dict[Cell, ty.Dict[int, int]] = {}
        for (season, category, item_id), count in sorted(self.counts.items()):
            result.setdefault((season, category), {})[item_id] = count
        return result

    def scaled(self, factor: int) -> 'FrequencyTable':
        return FrequencyTable(
            {k: v * factor for k, v in self.counts.items()},
            self.excluded,
        )

    def __add__(self, other: 'FrequencyTable') -> 'FrequencyTable':
        if not isinstance(other, FrequencyTable):
            return NotImplemented
        return FrequencyTable(
            self.counts + other.counts,
            self.excluded + other.excluded,
        )

    def __eq__(self, other):
        if not isinstance(other, FrequencyTable):
            return NotImplemented
        return self.counts == other.counts and self.excluded == other.excluded

    def __len__(self):
        return len(self.counts)

    def __getitem__(self, key: CellKey) -> int:
        return self.counts[key]

    def __repr__(self):
        return (
            f'<FrequencyTable: {len(self)} cells, {self.included} included, '
            f'{sum(self.excluded.values())} excluded>'
        )


def merge_tables(*tables: FrequencyTable) -> FrequencyTable:
    merged = FrequencyTable()
    for table in tables:
        merged = merged + table
    return merged


def count_partition(
        dataset: Dataset,
        transactions: ty.Iterable[TransactionRecord],
        kept: ty.Optional[ty.AbstractSet[int]],
        season_map: SeasonMap,
) -> FrequencyTable:
    table = FrequencyTable()
    for tx in transactions:
        item = dataset.items.get(tx.item_id)
        if item is None:
            table.excluded[EXCLUDED_DANGLING] += 1
        elif kept is not None and tx.item_id not in kept:
            table.excluded[EXCLUDED_PRUNED] += 1
        elif not item.is_mapped:
            table.excluded[EXCLUDED_UNMAPPED] += 1
        else:
            season = season_map.season_of(tx.date)
            table.counts[(season, item.category, tx.item_id)] += 1
    return table


def count_frequencies(
        dataset: Dataset,
        kept: ty.Optional[ty.AbstractSet[int]] = None,
        season_map: ty.Optional[SeasonMap] = None,
) -> FrequencyTable:
    season_map = season_map or SeasonMap()
    table = count_partition(dataset, dataset.transactions, kept, season_map)
    _LOGGER.info(
        f'Counted {table.included} transactions into {len(table)} cells, '
        f'excluded {dict(sorted(table.excluded.items()))}',
    )
    return table


def monthly_histogram(dataset: Dataset) -> ty.Dict[ty.Tuple[int, int], int]:
    histogram = {month: 0 for month in dataset.window.months()}
    for tx in dataset.transactions:
        key = (tx.date.year, tx.date.month)
        if key in histogram:
            histogram[key] += 1
    return histogram


def rank_cell(counts: ty.Mapping[int, int]) -> ty.List[int]:
    return sorted(
        (item_id for item_id, count in counts.items() if count >= 1),
        key=lambda item_id: (-counts[item_id], item_id),
    )


@dataclass(frozen=True)
class PopularitySelection:
    popular: ty.Mapping[Cell, ty.List[int]]
    unpopular: ty.Mapping[Cell, ty.List[int]]
    percentile: float

    @property
    def cells(self) -> ty.List[Cell]:
        return sorted(self.popular)

    @property
    def seasons(self) -> ty.List[str]:
        return sorted({season for season, _ in self.popular})

    def pooled(self, season: str) -> ty.Tuple[ty.List[int], ty.List[int]]:
        popular: ty.List[int] = []
        unpopular: ty.List[int] = []
        for cell in self.cells:
            if cell[0] == season:
                popular.extend(self.popular[cell])
                unpopular.extend(self.unpopular[cell])
        return sorted(popular), sorted(unpopular)

    def summary(self) -> ty.List[ty.Dict[str, ty.Any]]:
        return [
            {
                'season': season,
                'category': category,
                'popular': len(self.popular[(season, category)]),
                'unpopular': len(self.unpopular[(season, category)]),
            }
            for season, category in self.cells
        ]


def select_popular(freq: FrequencyTable,
                   percentile: float = DEFAULT_TOP_PERCENT,
                   ) -> PopularitySelection:
    check_percentile(percentile)
    popular = {}
    unpopular = {}
    for cell, counts in freq.cells().items():
        ranked = rank_cell(counts)
        if not ranked:
            continue
        slots = percent_slots(percentile, len(ranked))
        top = ranked[:slots]
        taken = set(top)
        popular[cell] = top
        unpopular[cell] = [i for i in ranked[-slots:] if i not in taken]
    _LOGGER.info(
        f'Selected top/bottom {percentile}% in {len(popular)} cells',
    )
    return PopularitySelection(popular, unpopular, percentile)
