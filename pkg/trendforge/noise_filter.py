"""
Pruning of non-clothing catalog items from externally produced noise
scores, plus the confusion bookkeeping used to evaluate the scorer.
"""
import logging
import math
import typing as ty
from dataclasses import dataclass

from .diagnostics import DiagnosticLog, RowOutcome
from .exceptions import DataError, PreconditionError
from .ingest.loaders import Loaded, PathLike, parse_uint, read_csv_rows
from .ingest.schema import Dataset
from .utils import UNDEFINED, MaybeFloat, ratio

_LOGGER = logging.getLogger(__name__)

DEFAULT_THRESHOLD = 0.5
SCORES_FILE = 'noise_scores.csv'
SCORES_HEADER = ('item_id', 'score')
LABEL_COLUMN = 'label'


def check_threshold(threshold: float) -> None:
    if not (0.0 <= threshold <= 1.0):
        raise PreconditionError(
            f'noise threshold must be in [0,1], got {threshold}',
        )


@dataclass(frozen=True)
class NoiseScore:
    item_id: int
    score: float
    label: ty.Optional[bool] = None  # True means the item is noise

    def __post_init__(self):
        if not (0.0 <= self.score <= 1.0):
            raise PreconditionError(
                f'noise score of item {self.item_id} must be in [0,1], '
                f'got {self.score}',
            )

    def is_pruned(self, threshold: float) -> bool:
        return self.score >= threshold


@dataclass(frozen=True)
class FilterResult:
    kept: ty.FrozenSet[int]
    pruned: ty.FrozenSet[int]
    unscored: ty.FrozenSet[int]
    threshold: float

    def summary(self) -> ty.Dict[str, ty.Any]:
        return {
            'threshold': self.threshold,
            'kept': len(self.kept),
            'pruned': len(self.pruned),
            'unscored': len(self.unscored),
        }


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int = 0
    fp: int = 0
    fn: int = 0
    tn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn, self.tn) < 0:
            raise PreconditionError('confusion counts must be non-negative')

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def as_dict(self) -> ty.Dict[str, int]:
        return {'tp': self.tp, 'fp': self.fp, 'fn': self.fn, 'tn': self.tn}


@dataclass(frozen=True)
class Metrics:
    accuracy: MaybeFloat
    precision: MaybeFloat
    recall: MaybeFloat
    f1: MaybeFloat

    def as_dict(self) -> ty.Dict[str, MaybeFloat]:
        return {
            'accuracy': self.accuracy,
            'precision': self.precision,
            'recall': self.recall,
            'f1': self.f1,
        }


def load_noise_scores(path: PathLike) -> Loaded:
    header, rows = read_csv_rows(path)
    has_label = tuple(header) == (*SCORES_HEADER, LABEL_COLUMN)
    if tuple(header) != SCORES_HEADER and not has_label:
        raise DataError(
            f'malformed header {",".join(header)!r}, expected '
            f'item_id,score[,label]',
            source=str(path),
        )
    log = DiagnosticLog(str(path))
    width = len(header)
    records: ty.List[NoiseScore] = []
    first_seen: ty.Dict[int, int] = {}

    for n, row in rows:
        if len(row) != width:
            log.fatal(n, f'expected {width} fields, got {len(row)}')
            log.count_row(RowOutcome.REJECTED)
            continue
        try:
            item_id = parse_uint(row[0], 'item_id')
            score = float(row[1])
            if not math.isfinite(score) or not (0.0 <= score <= 1.0):
                raise ValueError(f'score must be in [0,1], got {row[1]!r}')
            label = None
            if has_label and row[2].strip():
                if row[2].strip() not in ('0', '1'):
                    raise ValueError(f'label must be 0 or 1, got {row[2]!r}')
                label = row[2].strip() == '1'
        except ValueError as e:
            log.fatal(n, str(e))
            log.count_row(RowOutcome.REJECTED)
            continue
        if item_id in first_seen:
            log.fatal(n, f'duplicate item_id {item_id} '
                         f'(first seen at row {first_seen[item_id]})')
            log.count_row(RowOutcome.REJECTED)
            continue
        first_seen[item_id] = n
        records.append(NoiseScore(item_id, score, label))
        log.count_row(RowOutcome.KEPT)

    log.log_summary()
    return Loaded(records, log)


def apply_filter(
        dataset: Dataset,
        scores: ty.Iterable[NoiseScore],
        threshold: float = DEFAULT_THRESHOLD,
        log: ty.Optional[DiagnosticLog] = None,
) -> FilterResult:
    check_threshold(threshold)
    log = log if log is not None else DiagnosticLog('noise_filter')

    kept: ty.Set[int] = set()
    pruned: ty.Set[int] = set()
    for score in scores:
        if score.is_pruned(threshold):
            pruned.add(score.item_id)
            kept.discard(score.item_id)
        else:
            kept.add(score.item_id)
            pruned.discard(score.item_id)

    # unscored items stay in, pruning them would bias mining
    unscored = {
        item_id for item_id in dataset.items
        if item_id not in kept and item_id not in pruned
    }
    for item_id in sorted(unscored):
        log.warning(0, f'item {item_id} has no noise score, kept')
    kept |= unscored

    _LOGGER.info(
        f'Noise filter at {threshold}: pruned {len(pruned)}, '
        f'kept {len(kept)} ({len(unscored)} unscored)',
    )
    return FilterResult(
        kept=frozenset(kept),
        pruned=frozenset(pruned),
        unscored=frozenset(unscored),
        threshold=threshold,
    )


def confusion(scores: ty.Iterable[NoiseScore],
              threshold: float = DEFAULT_THRESHOLD) -> ConfusionMatrix:
    check_threshold(threshold)
    tp = fp = fn = tn = 0
    for score in scores:
        if score.label is None:
            continue
        predicted = score.is_pruned(threshold)
        if predicted and score.label:
            tp += 1
        elif predicted:
            fp += 1
        elif score.label:
            fn += 1
        else:
            tn += 1
    cm = ConfusionMatrix(tp=tp, fp=fp, fn=fn, tn=tn)
    if not cm.total:
        raise PreconditionError('no labeled noise scores to evaluate')
    return cm


def metrics(cm: ConfusionMatrix) -> Metrics:
    if not cm.total:
        raise PreconditionError('confusion matrix is empty')
    precision = ratio(cm.tp, cm.tp + cm.fp)
    recall = ratio(cm.tp, cm.tp + cm.fn)
    f1: MaybeFloat = UNDEFINED
    if isinstance(precision, float) and isinstance(recall, float) and \
            precision and recall:
        f1 = 2 * precision * recall / (precision + recall)
    return Metrics(
        accuracy=(cm.tp + cm.tn) / cm.total,
        precision=precision,
        recall=recall,
        f1=f1,
    )
