"""
Synthetic catalog, transaction, attribute and noise-score tables with
planted ground truth.

Every item gets an independent Zipf rank per season inside its category.
Transactions are drawn item-first from those seasonal profiles. Planted
attributes are injected with one probability for items in the top
stratum of their season ranking and another for the rest, so the
selected popular and unpopular items carry them at known rates.
"""
import datetime
import json
import logging
import os
import typing as ty
from dataclasses import asdict, dataclass, field

import numpy as np
import pandas as pd

from .exceptions import ConfigError
from .ingest.loaders import (ATTRIBUTES_FILE, ITEMS_FILE, TAXONOMY_FILE,
                             TRANSACTIONS_FILE, format_date)
from .ingest.schema import (DEFAULT_WINDOW_END, DEFAULT_WINDOW_START,
                            TABLE_CATEGORIES, Zone)
from .noise_filter import SCORES_FILE
from .popularity import SEASONS, SPRING, WINTER, SeasonMap
from .trendmine import POPULAR, UNPOPULAR

_LOGGER = logging.getLogger(__name__)

TRUTH_FILE = 'truth.json'
FIRST_RAW_CAT_ID = 100

DEFAULT_CATEGORIES = ('T-shirt', 'Coat', 'Skirt', 'Dress')

DEFAULT_BASE_RATES = {
    'white': 0.35,
    'black': 0.35,
    'multicolor': 0.3,
    'lower_solid': 0.3,
    'round_neckline': 0.3,
    'v_neckline': 0.2,
    'collar': 0.25,
    'belt': 0.2,
    'placket': 0.2,
    'bags_accessories': 0.15,
    'upper_floral': 0.2,
    'upper_graphics': 0.2,
    'upper_blue': 0.2,
    'upper_red': 0.15,
    'lower_gray': 0.2,
    'lower_brown': 0.2,
}


@dataclass(frozen=True)
class PlantedFeature:
    season: str
    attribute: str
    p_popular: float
    p_unpopular: float
    kind: str = POPULAR


@dataclass(frozen=True)
class CoOccurrence:
    first: str
    second: str
    joint: float


def _default_planted() -> ty.Tuple[PlantedFeature, ...]:
    return (
        PlantedFeature(SPRING, 'upper_floral', 0.8, 0.1, POPULAR),
        PlantedFeature(SPRING, 'lower_brown', 0.1, 0.8, UNPOPULAR),
        PlantedFeature(WINTER, 'collar', 0.8, 0.1, POPULAR),
        PlantedFeature(WINTER, 'upper_blue', 0.1, 0.8, UNPOPULAR),
    )


@dataclass(frozen=True)
class GeneratorSpec:
    seed: int = 0
    n_items: int = 1000
    n_users: int = 200
    n_transactions: int = 50000
    categories: ty.Tuple[str, ...] = DEFAULT_CATEGORIES
    base_rates: ty.Mapping[str, float] = field(
        default_factory=lambda: dict(DEFAULT_BASE_RATES),
    )
    planted: ty.Tuple[PlantedFeature, ...] = field(
        default_factory=_default_planted,
    )
    co_occurrences: ty.Tuple[CoOccurrence, ...] = (
        CoOccurrence('black', 'lower_solid', 0.2),
    )
    noise_fraction: float = 0.05
    popular_stratum: float = 0.2
    zipf_exponent: float = 1.0
    window_start: datetime.date = DEFAULT_WINDOW_START
    window_end: datetime.date = DEFAULT_WINDOW_END

    def validate(self) -> None:
        errors = []
        for name in ('n_items', 'n_users', 'n_transactions'):
            if getattr(self, name) < 1:
                errors.append(f'{name} must be a positive integer')
        if not (0 <= self.noise_fraction < 1):
            errors.append('noise_fraction must be in [0,1)')
        if not (0 < self.popular_stratum < 1):
            errors.append('popular_stratum must be in (0,1)')
        if self.zipf_exponent < 0:
            errors.append('zipf_exponent must be >= 0')
        if self.window_start > self.window_end:
            errors.append('window is empty')
        if not self.categories:
            errors.append('at least one category is required')
        for category in self.categories:
            if _zone_of(category) is None:
                errors.append(f'unknown category {category!r}')
        for name, rate in self.base_rates.items():
            if not (0 <= rate <= 1):
                errors.append(f'base rate of {name} must be in [0,1]')

        seen: ty.Set[str] = set()
        for planted in self.planted:
            where = f'planted {planted.attribute} in {planted.season}'
            if planted.season not in SEASONS:
                errors.append(f'{where}: unknown season')
            if planted.attribute not in self.base_rates:
                errors.append(f'{where}: attribute not in vocabulary')
            if planted.attribute in seen:
                errors.append(f'{where}: attribute planted twice')
            seen.add(planted.attribute)
            for p in (planted.p_popular, planted.p_unpopular):
                if not (0 <= p <= 1):
                    errors.append(f'{where}: probabilities must be in [0,1]')
            if planted.kind == POPULAR and \
                    planted.p_popular < planted.p_unpopular:
                errors.append(f'{where}: popular stratum probability must '
                              f'be >= unpopular stratum probability')
            elif planted.kind == UNPOPULAR and \
                    planted.p_popular > planted.p_unpopular:
                errors.append(f'{where}: unpopular stratum probability must '
                              f'be >= popular stratum probability')
            elif planted.kind not in (POPULAR, UNPOPULAR):
                errors.append(f'{where}: unknown kind {planted.kind!r}')

        paired: ty.Set[str] = set()
        for pair in self.co_occurrences:
            where = f'co-occurrence {pair.first},{pair.second}'
            names = (pair.first, pair.second)
            if any(n not in self.base_rates for n in names):
                errors.append(f'{where}: attribute not in vocabulary')
                continue
            if pair.first == pair.second or any(n in seen for n in names) \
                    or any(n in paired for n in names):
                errors.append(f'{where}: attributes must be distinct, '
                              f'unplanted and used in one pair only')
            paired.update(names)
            p_a = self.base_rates[pair.first]
            p_b = self.base_rates[pair.second]
            if not (max(0.0, p_a + p_b - 1) <= pair.joint <= min(p_a, p_b)):
                errors.append(f'{where}: joint probability {pair.joint} is '
                              f'infeasible for marginals {p_a}, {p_b}')
        if errors:
            raise ConfigError(errors)

    def as_dict(self) -> ty.Dict[str, ty.Any]:
        raw = asdict(self)
        raw['window_start'] = self.window_start.isoformat()
        raw['window_end'] = self.window_end.isoformat()
        raw['categories'] = list(self.categories)
        raw['base_rates'] = dict(self.base_rates)
        raw['planted'] = [asdict(p) for p in self.planted]
        raw['co_occurrences'] = [asdict(p) for p in self.co_occurrences]
        return raw

    @classmethod
    def from_dict(cls, raw: ty.Mapping[str, ty.Any]) -> 'GeneratorSpec':
        known = set(cls.__dataclass_fields__)  # type: ignore
        unknown = set(raw) - known
        if unknown:
            raise ConfigError([f'unknown generator fields: {sorted(unknown)}'])
        values = dict(raw)
        try:
            if 'planted' in values:
                values['planted'] = tuple(
                    PlantedFeature(**p) for p in values['planted']
                )
            if 'co_occurrences' in values:
                values['co_occurrences'] = tuple(
                    CoOccurrence(**p) for p in values['co_occurrences']
                )
            if 'categories' in values:
                values['categories'] = tuple(values['categories'])
            for name in ('window_start', 'window_end'):
                if name in values:
                    values[name] = datetime.date.fromisoformat(values[name])
        except (TypeError, ValueError) as e:
            raise ConfigError([f'invalid generator spec: {e}']) from e
        spec = cls(**values)
        try:
            spec.validate()
        except TypeError as e:
            raise ConfigError([f'invalid generator spec: {e}']) from e
        return spec

    @classmethod
    def from_json(cls, path) -> 'GeneratorSpec':
        try:
            with open(path, 'r', encoding='utf-8') as f:
                raw = json.load(f)
        except (OSError, ValueError) as e:
            raise ConfigError([f'cannot read generator spec {path}: {e}'])
        if not isinstance(raw, dict):
            raise ConfigError(['generator spec must be a json object'])
        return cls.from_dict(raw)


def _zone_of(category: str) -> ty.Optional[Zone]:
    for zone, names in TABLE_CATEGORIES.items():
        if category in names:
            return zone
    return None


@dataclass(frozen=True)
class GeneratedDataset:
    directory: str
    manifest: ty.Dict[str, ty.Any]

    def path(self, name: str) -> str:
        return os.path.join(self.directory, name)


class _Generator:
    def __init__(self, spec: GeneratorSpec) -> None:
        self.spec = spec
        self.rng = np.random.default_rng(spec.seed)
        self.vocabulary = list(spec.base_rates)
        self.item_ids = np.arange(1, spec.n_items + 1)
        self.season_map = SeasonMap()

    def categories(self) -> np.ndarray:
        n_cat = len(self.spec.categories)
        # balanced categories, shuffled over item ids
        return self.rng.permutation(np.arange(self.spec.n_items) % n_cat)

    def seasonal_ranks(self, category_of: np.ndarray
                       ) -> ty.Dict[str, np.ndarray]:
        ranks = {}
        for season in SEASONS:
            rank = np.empty(self.spec.n_items, dtype=int)
            for c in range(len(self.spec.categories)):
                members = np.flatnonzero(category_of == c)
                rank[self.rng.permutation(members)] = np.arange(members.size)
            ranks[season] = rank
        return ranks

    def attributes(self, category_of, ranks, noise) -> np.ndarray:
        spec = self.spec
        n = spec.n_items
        index = {name: k for k, name in enumerate(self.vocabulary)}
        present = np.zeros((n, len(self.vocabulary)), dtype=bool)
        rates = np.array([spec.base_rates[a] for a in self.vocabulary])
        present[:] = self.rng.random((n, len(self.vocabulary))) < rates

        for pair in spec.co_occurrences:
            a, b = index[pair.first], index[pair.second]
            p_a = spec.base_rates[pair.first]
            p_b = spec.base_rates[pair.second]
            given_a = pair.joint / p_a if p_a else 0.0
            given_not_a = (p_b - pair.joint) / (1 - p_a) if p_a < 1 else 0.0
            u = self.rng.random(n)
            present[:, b] = np.where(present[:, a], u < given_a,
                                     u < given_not_a)

        sizes = np.bincount(category_of, minlength=len(spec.categories))
        for planted in spec.planted:
            k = index[planted.attribute]
            cutoff = spec.popular_stratum * sizes[category_of]
            top = ranks[planted.season] < cutoff
            p = np.where(top, planted.p_popular, planted.p_unpopular)
            injected = self.rng.random(n) < p
            # noise items keep their base rate draw
            present[:, k] = np.where(noise, present[:, k], injected)
        return present

    def posteriors(self, present: np.ndarray) -> np.ndarray:
        high = self.rng.uniform(0.55, 1.0, present.shape)
        low = self.rng.uniform(0.0, 0.45, present.shape)
        return np.round(np.where(present, high, low), 4)

    def transactions(self, ranks) -> pd.DataFrame:
        spec = self.spec
        days = (spec.window_end - spec.window_start).days + 1
        offsets = np.sort(self.rng.integers(0, days, spec.n_transactions))
        dates = [spec.window_start + datetime.timedelta(days=int(d))
                 for d in offsets]
        seasons = np.array([self.season_map.season_of(d) for d in dates])
        items = np.empty(spec.n_transactions, dtype=int)
        for season in SEASONS:
            rows = np.flatnonzero(seasons == season)
            if not rows.size:
                continue
            weights = 1.0 / (ranks[season] + 1.0) ** spec.zipf_exponent
            items[rows] = self.rng.choice(
                self.item_ids, size=rows.size, p=weights / weights.sum(),
            )
        users = self.rng.integers(1, spec.n_users + 1, spec.n_transactions)
        return pd.DataFrame({
            'user_id': users,
            'item_id': items,
            'date': [format_date(d) for d in dates],
        })

    def run(self, directory: str) -> GeneratedDataset:
        spec = self.spec
        os.makedirs(directory, exist_ok=True)

        category_of = self.categories()
        ranks = self.seasonal_ranks(category_of)
        noise = self.rng.random(spec.n_items) < spec.noise_fraction
        present = self.attributes(category_of, ranks, noise)
        posteriors = self.posteriors(present)
        tx = self.transactions(ranks)

        raw_ids = FIRST_RAW_CAT_ID + 2 * category_of + \
            self.rng.integers(0, 2, spec.n_items)
        taxonomy = {}
        for c, name in enumerate(spec.categories):
            zone = _zone_of(name)
            assert zone is not None
            for raw in (FIRST_RAW_CAT_ID + 2 * c, FIRST_RAW_CAT_ID + 2 * c + 1):
                taxonomy[str(raw)] = {'name': name, 'zone': zone.value}
        with open(os.path.join(directory, TAXONOMY_FILE), 'w',
                  encoding='utf-8') as f:
            json.dump(taxonomy, f, indent=2, sort_keys=True)

        items = pd.DataFrame({
            'item_id': self.item_ids,
            'cat_id': raw_ids,
            'name': [f'{spec.categories[c]} item {i}'
                     for c, i in zip(category_of, self.item_ids)],
            'img_ref': [f'img/{i}.jpg' for i in self.item_ids],
        })
        attributes = pd.DataFrame(posteriors, columns=self.vocabulary)
        attributes.insert(0, 'item_id', self.item_ids)

        scores = np.where(
            noise,
            self.rng.uniform(0.4, 1.0, spec.n_items),
            self.rng.uniform(0.0, 0.6, spec.n_items),
        )
        noise_scores = pd.DataFrame({
            'item_id': self.item_ids,
            'score': np.round(scores, 4),
            'label': noise.astype(int),
        })

        for frame, name in (
                (items, ITEMS_FILE),
                (tx, TRANSACTIONS_FILE),
                (attributes, ATTRIBUTES_FILE),
                (noise_scores, SCORES_FILE),
        ):
            frame.to_csv(os.path.join(directory, name), index=False,
                         lineterminator='\n')

        manifest = self.manifest(category_of, ranks, noise, present)
        with open(os.path.join(directory, TRUTH_FILE), 'w',
                  encoding='utf-8') as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
        _LOGGER.info(
            f'Generated {spec.n_items} items ({int(noise.sum())} noise), '
            f'{spec.n_transactions} transactions into {directory}',
        )
        return GeneratedDataset(directory, manifest)

    def manifest(self, category_of, ranks, noise, present):
        spec = self.spec
        index = {name: k for k, name in enumerate(self.vocabulary)}
        clean = ~noise
        sizes = np.bincount(category_of, minlength=len(spec.categories))

        planted = []
        for p in spec.planted:
            top = ranks[p.season] < spec.popular_stratum * sizes[category_of]
            column = present[:, index[p.attribute]]
            planted.append({
                'season': p.season,
                'attribute': p.attribute,
                'class': p.kind,
                'p_popular': p.p_popular,
                'p_unpopular': p.p_unpopular,
                'empirical_popular': _mean(column[clean & top]),
                'empirical_unpopular': _mean(column[clean & ~top]),
            })

        co_occurrences = []
        for pair in spec.co_occurrences:
            both = present[clean, index[pair.first]] & \
                present[clean, index[pair.second]]
            co_occurrences.append({
                'first': pair.first,
                'second': pair.second,
                'joint': pair.joint,
                'empirical_joint': _mean(both),
            })

        true_ranks = {}
        for season in SEASONS:
            true_ranks[season] = {}
            for c, name in enumerate(spec.categories):
                members = np.flatnonzero(category_of == c)
                order = members[np.argsort(ranks[season][members])]
                true_ranks[season][name] = self.item_ids[order].tolist()

        return {
            'seed': spec.seed,
            'spec': spec.as_dict(),
            'noise_items': self.item_ids[noise].tolist(),
            'planted': planted,
            'co_occurrences': co_occurrences,
            'marginals': {
                name: _mean(present[clean, k]) for name, k in index.items()
            },
            'ranks': true_ranks,
        }


def _mean(values: np.ndarray) -> float:
    return round(float(values.mean()), 6) if values.size else 0.0


def generate(spec: GeneratorSpec, directory: str) -> GeneratedDataset:
    spec.validate()
    return _Generator(spec).run(directory)
