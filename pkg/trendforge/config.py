import datetime
import json
import logging
import os
import typing as ty
from dataclasses import dataclass

from .exceptions import ConfigError, DataError, PreconditionError
from .fpgrowth import DEFAULT_ATTR_CUTOFF, DEFAULT_MIN_SUPPORT
from .attribute_model import DEFAULT_ALPHA, DEFAULT_SWEEPS
from .ingest.loaders import (ATTRIBUTES_FILE, ITEMS_FILE, TAXONOMY_FILE,
                             TRANSACTIONS_FILE)
from .ingest.schema import (DEFAULT_WINDOW_END, DEFAULT_WINDOW_START,
                            DateWindow)
from .noise_filter import DEFAULT_THRESHOLD, SCORES_FILE, check_threshold
from .popularity import (DEFAULT_TOP_PERCENT, SEASONS, SeasonMap,
                         check_percentile)
from .tasks import worker_count
from .trendmine import (DEFAULT_FLAT_BAND, DEFAULT_SEASONS,
                        DEFAULT_TAU_CLASSIC, DEFAULT_TAU_POPULAR,
                        check_thresholds)

_LOGGER = logging.getLogger(__name__)

CONFIG_ENV = 'TRENDFORGE_CONFIG'
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL')

DEFAULTS: ty.Dict[str, ty.Any] = {
    'data_dir': None,
    'items': None,
    'transactions': None,
    'attributes': None,
    'taxonomy': None,
    'noise_scores': None,
    'out_dir': 'out',
    'window_start': DEFAULT_WINDOW_START.isoformat(),
    'window_end': DEFAULT_WINDOW_END.isoformat(),
    'season_map': None,
    'noise_threshold': DEFAULT_THRESHOLD,
    'top_percent': DEFAULT_TOP_PERCENT,
    'min_support': DEFAULT_MIN_SUPPORT,
    'attr_cutoff': DEFAULT_ATTR_CUTOFF,
    'max_itemset_size': None,
    'crf_rescore': False,
    'crf_sweeps': DEFAULT_SWEEPS,
    'smoothing_alpha': DEFAULT_ALPHA,
    'priors': None,
    'tau_classic': DEFAULT_TAU_CLASSIC,
    'tau_popular': DEFAULT_TAU_POPULAR,
    'flat_band': DEFAULT_FLAT_BAND,
    'seasons': list(DEFAULT_SEASONS),
    'threads': None,
    'log_level': 'INFO',
}

# input key -> file name inside data_dir
DATA_FILES = {
    'items': ITEMS_FILE,
    'transactions': TRANSACTIONS_FILE,
    'attributes': ATTRIBUTES_FILE,
    'taxonomy': TAXONOMY_FILE,
}


@dataclass(frozen=True)
class PipelineConfig:
    items: str
    transactions: str
    attributes: str
    taxonomy: str
    noise_scores: ty.Optional[str]
    out_dir: str
    window: DateWindow
    season_map: SeasonMap
    noise_threshold: float
    top_percent: float
    min_support: float
    attr_cutoff: float
    max_itemset_size: ty.Optional[int]
    crf_rescore: bool
    crf_sweeps: int
    smoothing_alpha: float
    priors: ty.Optional[str]
    tau_classic: float
    tau_popular: float
    flat_band: float
    seasons: ty.Tuple[str, str]
    threads: ty.Optional[int]
    log_level: str

    @property
    def workers(self) -> int:
        if self.threads is not None:
            return self.threads
        return worker_count()

    def as_dict(self) -> ty.Dict[str, ty.Any]:
        return {
            'items': self.items,
            'transactions': self.transactions,
            'attributes': self.attributes,
            'taxonomy': self.taxonomy,
            'noise_scores': self.noise_scores,
            'out_dir': self.out_dir,
            'window_start': self.window.start.isoformat(),
            'window_end': self.window.end.isoformat(),
            'season_map': self.season_map.as_dict(),
            'noise_threshold': self.noise_threshold,
            'top_percent': self.top_percent,
            'min_support': self.min_support,
            'attr_cutoff': self.attr_cutoff,
            'max_itemset_size': self.max_itemset_size,
            'crf_rescore': self.crf_rescore,
            'crf_sweeps': self.crf_sweeps,
            'smoothing_alpha': self.smoothing_alpha,
            'priors': self.priors,
            'tau_classic': self.tau_classic,
            'tau_popular': self.tau_popular,
            'flat_band': self.flat_band,
            'seasons': list(self.seasons),
            'threads': self.threads,
            'log_level': self.log_level,
        }


def read_config_file(path: str) -> ty.Dict[str, ty.Any]:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            raw = json.load(f)
    except (OSError, ValueError) as e:
        raise ConfigError([f'cannot read config {path}: {e}'])
    if not isinstance(raw, dict):
        raise ConfigError([f'config {path} must be a json object'])
    return raw


def layered_config(
        explicit_path: ty.Optional[str] = None,
        overrides: ty.Optional[ty.Mapping[str, ty.Any]] = None,
        environ: ty.Optional[ty.Mapping[str, str]] = None,
) -> ty.Dict[str, ty.Any]:
    """defaults <- $TRENDFORGE_CONFIG <- explicit file <- overrides"""
    environ = os.environ if environ is None else environ
    config = dict(DEFAULTS)
    env_path = environ.get(CONFIG_ENV)
    if env_path and os.path.exists(env_path):
        config.update(read_config_file(env_path))
    if explicit_path:
        config.update(read_config_file(explicit_path))
    config.update({
        k: v for k, v in (overrides or {}).items() if v is not None
    })
    return config


class _Checker:
    """Collects every violation instead of stopping at the first one"""

    def __init__(self, raw: ty.Mapping[str, ty.Any]) -> None:
        self.raw = raw
        self.errors: ty.List[str] = []

    def number(self, key: str) -> float:
        value = self.raw.get(key)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            try:
                return float(value)  # type: ignore
            except (TypeError, ValueError):
                self.errors.append(f'{key} must be a number, got {value!r}')
                return float('nan')
        return float(value)

    def integer(self, key: str, minimum: int = 1,
                optional: bool = False) -> ty.Optional[int]:
        value = self.raw.get(key)
        if value is None and optional:
            return None
        try:
            if isinstance(value, bool) or float(value) != int(value):
                raise ValueError
            result = int(value)
        except (TypeError, ValueError):
            self.errors.append(f'{key} must be an integer, got {value!r}')
            return None
        if result < minimum:
            self.errors.append(f'{key} must be >= {minimum}')
        return result

    def flag(self, key: str) -> bool:
        value = self.raw.get(key)
        if isinstance(value, bool):
            return value
        if isinstance(value, str) and value.lower() in ('true', 'false'):
            return value.lower() == 'true'
        self.errors.append(f'{key} must be true or false, got {value!r}')
        return False

    def date(self, key: str) -> ty.Optional[datetime.date]:
        value = self.raw.get(key)
        try:
            return datetime.date.fromisoformat(str(value))
        except ValueError:
            self.errors.append(f'{key} must be an ISO date, got {value!r}')
            return None

    def precondition(self, check: ty.Callable, *args) -> None:
        try:
            check(*args)
        except PreconditionError as e:
            self.errors.append(str(e))

    def optional_path(self, key: str) -> ty.Optional[str]:
        value = self.raw.get(key)
        if value is None:
            return None
        if not isinstance(value, str) or not value:
            self.errors.append(f'{key} must be a path, got {value!r}')
            return None
        return value


def _season_map(checker: _Checker) -> SeasonMap:
    raw = checker.raw.get('season_map')
    if raw is None:
        return SeasonMap()
    try:
        if isinstance(raw, str):
            return SeasonMap.from_json(raw)
        if not isinstance(raw, dict):
            raise PreconditionError('season_map must map months to seasons')
        return SeasonMap.from_mapping(raw)
    except (DataError, PreconditionError) as e:
        checker.errors.append(f'invalid season_map: {e}')
    return SeasonMap()


def _seasons(checker: _Checker) -> ty.Tuple[str, str]:
    raw = checker.raw.get('seasons')
    if isinstance(raw, str):
        raw = [s.strip() for s in raw.split(',')]
    if not isinstance(raw, (list, tuple)) or len(raw) != 2 or \
            raw[0] == raw[1] or any(s not in SEASONS for s in raw):
        checker.errors.append(
            f'seasons must name two distinct seasons of '
            f'{",".join(SEASONS)}, got {raw!r}',
        )
        return DEFAULT_SEASONS
    return raw[0], raw[1]


def validate_config(raw: ty.Mapping[str, ty.Any]) -> PipelineConfig:
    checker = _Checker(raw)
    unknown = sorted(set(raw) - set(DEFAULTS))
    if unknown:
        checker.errors.append(f'unknown config keys: {", ".join(unknown)}')

    data_dir = checker.optional_path('data_dir')
    paths: ty.Dict[str, str] = {}
    for key, filename in DATA_FILES.items():
        path = checker.optional_path(key)
        if path is None and data_dir is not None:
            path = os.path.join(data_dir, filename)
        if path is None:
            checker.errors.append(f'{key} is required (or data_dir)')
        paths[key] = path or ''
    noise_scores = checker.optional_path('noise_scores')
    if noise_scores is None and data_dir is not None and \
            os.path.exists(os.path.join(data_dir, SCORES_FILE)):
        noise_scores = os.path.join(data_dir, SCORES_FILE)

    start = checker.date('window_start')
    end = checker.date('window_end')
    window = DateWindow()
    if start and end:
        if start > end:
            checker.errors.append(f'window {start}..{end} is empty')
        else:
            window = DateWindow(start, end)

    noise_threshold = checker.number('noise_threshold')
    checker.precondition(check_threshold, noise_threshold)
    top_percent = checker.number('top_percent')
    checker.precondition(check_percentile, top_percent)

    min_support = checker.number('min_support')
    if not (0 < min_support <= 1):
        checker.errors.append('min_support must be in (0,1]')
    attr_cutoff = checker.number('attr_cutoff')
    if not (0 < attr_cutoff < 1):
        checker.errors.append('attr_cutoff must be in (0,1)')
    smoothing_alpha = checker.number('smoothing_alpha')
    if not smoothing_alpha > 0:
        checker.errors.append('smoothing_alpha must be > 0')

    tau_classic = checker.number('tau_classic')
    tau_popular = checker.number('tau_popular')
    checker.precondition(check_thresholds, tau_classic, tau_popular)
    flat_band = checker.number('flat_band')
    if not flat_band >= 0:
        checker.errors.append('flat_band must be >= 0')

    log_level = str(raw.get('log_level', '')).upper()
    if log_level not in LOG_LEVELS:
        checker.errors.append(
            f'log_level must be one of {", ".join(LOG_LEVELS)}',
        )

    threads = checker.integer('threads', optional=True)
    if raw.get('threads') is None:
        try:
            worker_count()
        except ConfigError as e:
            checker.errors.extend(e.errors)

    config = PipelineConfig(
        items=paths['items'],
        transactions=paths['transactions'],
        attributes=paths['attributes'],
        taxonomy=paths['taxonomy'],
        noise_scores=noise_scores,
        out_dir=checker.optional_path('out_dir') or DEFAULTS['out_dir'],
        window=window,
        season_map=_season_map(checker),
        noise_threshold=noise_threshold,
        top_percent=top_percent,
        min_support=min_support,
        attr_cutoff=attr_cutoff,
        max_itemset_size=checker.integer('max_itemset_size', optional=True),
        crf_rescore=checker.flag('crf_rescore'),
        crf_sweeps=checker.integer('crf_sweeps') or DEFAULT_SWEEPS,
        smoothing_alpha=smoothing_alpha,
        priors=checker.optional_path('priors'),
        tau_classic=tau_classic,
        tau_popular=tau_popular,
        flat_band=flat_band,
        seasons=_seasons(checker),
        threads=threads,
        log_level=log_level,
    )
    if checker.errors:
        raise ConfigError(checker.errors)
    return config
