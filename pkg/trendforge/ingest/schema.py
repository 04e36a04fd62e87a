import datetime
import logging
import typing as ty
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..exceptions import DataError

_LOGGER = logging.getLogger(__name__)

UNMAPPED = 'unmapped'

DEFAULT_WINDOW_START = datetime.date(2014, 6, 1)
DEFAULT_WINDOW_END = datetime.date(2015, 6, 30)


class Zone(Enum):
    UPPER = 'upper'
    LOWER = 'lower'
    WHOLE = 'whole'


# clothing item categories grouped by body zone
TABLE_CATEGORIES: ty.Dict[Zone, ty.Tuple[str, ...]] = {
    Zone.UPPER: (
        'Coat', 'T-shirt', 'Shirt', 'Spaghette', 'Smock', 'Tank', 'Sweater',
        'Collar', 'Underwear', 'Sport', 'Winter', 'Raincoat', 'Leather',
        'Suit', 'Trench', 'Furs',
    ),
    Zone.LOWER: (
        'Pants', 'Legging', 'Skirt', 'Bloomers', 'Wedding', 'Jeans',
        'Briefs', 'Silk', 'Short', 'Casual Shoes', 'Rainy Shoes',
        'Sports Shoes', 'Boots', 'Slipper',
    ),
    Zone.WHOLE: (
        'Suit', 'Pajamas', 'Sport', 'Sun Protection', 'Uniform', 'Wedding',
        'Chenogsum', 'Dress', 'Work (Server)', 'Work (Doctor)',
        'Activewear (Cheer)', 'Activewear (Performance)',
    ),
}


@dataclass(frozen=True)
class DateWindow:
    start: datetime.date = DEFAULT_WINDOW_START
    end: datetime.date = DEFAULT_WINDOW_END

    def __post_init__(self):
        if self.start > self.end:
            raise DataError(f'empty date window {self.start}..{self.end}')

    def __contains__(self, day: datetime.date) -> bool:
        return self.start <= day <= self.end

    def months(self) -> ty.List[ty.Tuple[int, int]]:
        year, month = self.start.year, self.start.month
        result = []
        while (year, month) <= (self.end.year, self.end.month):
            result.append((year, month))
            year, month = (year + 1, 1) if month == 12 else (year, month + 1)
        return result


@dataclass(frozen=True)
class ItemRecord:
    item_id: int
    raw_cat_id: int
    name: str
    img_ref: str
    category: str = UNMAPPED

    @property
    def is_mapped(self) -> bool:
        return self.category != UNMAPPED


@dataclass(frozen=True)
class TransactionRecord:
    user_id: int
    item_id: int
    date: datetime.date


@dataclass(frozen=True)
class TaxonomyEntry:
    name: str
    zone: Zone


@dataclass(frozen=True)
class Taxonomy:
    entries: ty.Mapping[int, TaxonomyEntry]
    _labels: ty.Dict[int, str] = field(
        init=False, repr=False, compare=False, default_factory=dict,
    )
    _zones: ty.Dict[str, Zone] = field(
        init=False, repr=False, compare=False, default_factory=dict,
    )

    def __post_init__(self):
        zones_by_name: ty.Dict[str, ty.Set[Zone]] = {}
        for raw_cat_id, entry in self.entries.items():
            if not isinstance(entry.zone, Zone):
                raise DataError(
                    f'cat_id {raw_cat_id}: unknown zone {entry.zone!r}',
                )
            if not entry.name or entry.name == UNMAPPED:
                raise DataError(
                    f'cat_id {raw_cat_id}: invalid category name '
                    f'{entry.name!r}',
                )
            zones_by_name.setdefault(entry.name, set()).add(entry.zone)

        # a name shared by several zones (e.g. Suit) is qualified by zone
        # so each label denotes exactly one (name, zone) category
        first_id: ty.Dict[str, int] = {}
        for raw_cat_id, entry in self.entries.items():
            if len(zones_by_name[entry.name]) > 1:
                label = f'{entry.zone.value}:{entry.name}'
            else:
                label = entry.name
            if label in first_id:
                _LOGGER.info(
                    f'cat_ids {first_id[label]} and {raw_cat_id} share '
                    f'category {label}',
                )
            else:
                first_id[label] = raw_cat_id
            self._labels[raw_cat_id] = label
            self._zones[label] = entry.zone

    def category_of(self, raw_cat_id: int) -> str:
        return self._labels.get(raw_cat_id, UNMAPPED)

    def zone_of(self, category: str) -> ty.Optional[Zone]:
        return self._zones.get(category)

    @property
    def categories(self) -> ty.List[str]:
        return sorted(self._zones)

    def __contains__(self, raw_cat_id: int) -> bool:
        return raw_cat_id in self.entries

    def __len__(self):
        return len(self.entries)


class AttributeTable:
    """Attribute posteriors per item over an ordered vocabulary"""

    def __init__(self, vocabulary: ty.Sequence[str],
                 rows: ty.Mapping[int, ty.Sequence[float]]) -> None:
        if not vocabulary:
            raise DataError('attribute vocabulary is empty')
        self.vocabulary: ty.Tuple[str, ...] = tuple(vocabulary)
        self.item_ids: ty.Tuple[int, ...] = tuple(rows)
        self._index = {item_id: n for n, item_id in enumerate(self.item_ids)}
        matrix = np.array(
            [rows[item_id] for item_id in self.item_ids],
            dtype=float,
        ).reshape(len(self.item_ids), len(self.vocabulary))
        if matrix.size and (matrix.min() < 0 or matrix.max() > 1):
            raise DataError('attribute posteriors must lie in [0, 1]')
        matrix.setflags(write=False)
        self.matrix = matrix

    def vector(self, item_id: int) -> np.ndarray:
        return self.matrix[self._index[item_id]]

    def __contains__(self, item_id) -> bool:
        return item_id in self._index

    def __len__(self):
        return len(self.item_ids)

    def __eq__(self, other):
        if not isinstance(other, AttributeTable):
            return NotImplemented
        return (
            self.vocabulary == other.vocabulary and
            self.item_ids == other.item_ids and
            np.array_equal(self.matrix, other.matrix)
        )

    def __repr__(self):
        return (
            f'<AttributeTable: {len(self)} items x '
            f'{len(self.vocabulary)} attributes>'
        )


@dataclass(frozen=True)
class Dataset:
    """Cross-linked, read-only view over the three input tables"""

    items: ty.Mapping[int, ItemRecord]
    transactions: ty.Tuple[TransactionRecord, ...]
    attributes: AttributeTable
    taxonomy: Taxonomy
    window: DateWindow = DateWindow()
    transactions_by_item: ty.Mapping[int, ty.Tuple[TransactionRecord, ...]] \
        = field(default_factory=dict, compare=False, repr=False)
    dangling: ty.Tuple[int, ...] = field(
        default=(), compare=False, repr=False,
    )
    attribute_less: ty.FrozenSet[int] = field(
        default=frozenset(), compare=False, repr=False,
    )

