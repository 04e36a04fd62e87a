import csv
import datetime
import json
import logging
import math
import os
import re
import typing as ty

from ..diagnostics import DiagnosticLog, RowOutcome
from ..exceptions import DataError
from .schema import (AttributeTable, Dataset, DateWindow, ItemRecord,
                     Taxonomy, TaxonomyEntry, TransactionRecord, Zone)

_LOGGER = logging.getLogger(__name__)

ITEMS_HEADER = ('item_id', 'cat_id', 'name', 'img_ref')
TRANSACTIONS_HEADER = ('user_id', 'item_id', 'date')
ATTRIBUTES_ID_COLUMN = 'item_id'

ITEMS_FILE = 'items.csv'
TRANSACTIONS_FILE = 'transactions.csv'
ATTRIBUTES_FILE = 'attributes.csv'
TAXONOMY_FILE = 'taxonomy.json'

DATE_FORMAT = '%Y%m%d'

_UINT_RE = re.compile(r'^[0-9]+$')
_DATE_RE = re.compile(r'^[0-9]{8}$')

PathLike = ty.Union[str, os.PathLike]


class Loaded(ty.NamedTuple):
    records: ty.Any
    diagnostics: DiagnosticLog


def parse_uint(value: str, column: str) -> int:
    if not _UINT_RE.match(value):
        raise ValueError(f'{column} must be a non-negative integer, '
                         f'got {value!r}')
    return int(value)


def parse_date(value: str) -> datetime.date:
    if not _DATE_RE.match(value):
        raise ValueError(f'date must be YYYYMMDD, got {value!r}')
    return datetime.datetime.strptime(value, DATE_FORMAT).date()


def format_date(day: datetime.date) -> str:
    return day.strftime(DATE_FORMAT)


def read_csv_rows(path: PathLike) -> ty.Tuple[ty.List[str], ty.Iterator]:
    try:
        f = open(path, 'r', newline='', encoding='utf-8')
    except OSError as e:
        raise DataError(f'cannot read file: {e}', source=str(path)) from e
    with f:
        try:
            rows = list(csv.reader(f))
        except (UnicodeDecodeError, csv.Error) as e:
            raise DataError(f'cannot parse file: {e}', source=str(path)) \
                from e
    if not rows:
        raise DataError('malformed header: file is empty', source=str(path))
    header = [column.strip() for column in rows[0]]
    # blank lines keep their row number but carry no data
    data = (
        (n, row) for n, row in enumerate(rows[1:], start=1) if row
    )
    return header, data


def _check_header(header, expected, path) -> None:
    if tuple(header) != expected:
        raise DataError(
            f'malformed header {",".join(header)!r}, '
            f'expected {",".join(expected)!r}',
            source=str(path),
        )


def load_taxonomy(path: PathLike) -> Taxonomy:
    try:
        with open(path, 'r', encoding='utf-8') as f:
            raw = json.load(f)
    except OSError as e:
        raise DataError(f'cannot read file: {e}', source=str(path)) from e
    except ValueError as e:
        raise DataError(f'invalid json: {e}', source=str(path)) from e
    if not isinstance(raw, dict):
        raise DataError('taxonomy must be a json object', source=str(path))

    entries = {}
    for key, value in raw.items():
        try:
            raw_cat_id = parse_uint(key, 'cat_id')
            name = value['name']
            zone = Zone(value['zone'])
        except (ValueError, KeyError, TypeError) as e:
            raise DataError(f'invalid entry {key!r}: {e}', source=str(path)) \
                from e
        if not isinstance(name, str):
            raise DataError(f'invalid name for {key!r}', source=str(path))
        entries[raw_cat_id] = TaxonomyEntry(name=name, zone=zone)
    try:
        return Taxonomy(entries=entries)
    except DataError as e:
        raise DataError(str(e), source=str(path)) from e


def load_items(path: PathLike, taxonomy: Taxonomy) -> Loaded:
    header, rows = read_csv_rows(path)
    _check_header(header, ITEMS_HEADER, path)
    log = DiagnosticLog(str(path))
    records: ty.List[ItemRecord] = []
    first_seen: ty.Dict[int, int] = {}

    for n, row in rows:
        if len(row) != len(ITEMS_HEADER):
            log.fatal(n, f'expected {len(ITEMS_HEADER)} fields, '
                         f'got {len(row)}')
            log.count_row(RowOutcome.REJECTED)
            continue
        try:
            item_id = parse_uint(row[0], 'item_id')
            raw_cat_id = parse_uint(row[1], 'cat_id')
        except ValueError as e:
            log.fatal(n, str(e))
            log.count_row(RowOutcome.REJECTED)
            continue
        if item_id in first_seen:
            log.fatal(
                n,
                f'duplicate item_id {item_id} '
                f'(first seen at row {first_seen[item_id]})',
            )
            log.count_row(RowOutcome.REJECTED)
            continue
        first_seen[item_id] = n

        category = taxonomy.category_of(raw_cat_id)
        record = ItemRecord(
            item_id=item_id,
            raw_cat_id=raw_cat_id,
            name=row[2],
            img_ref=row[3],
            category=category,
        )
        if not record.is_mapped:
            log.warning(n, f'cat_id {raw_cat_id} of item {item_id} is not '
                           f'in the taxonomy, category is unmapped')
        records.append(record)
        log.count_row(RowOutcome.KEPT)

    log.log_summary()
    return Loaded(records, log)


def load_transactions(
        path: PathLike,
        window: DateWindow = DateWindow(),
) -> Loaded:
    header, rows = read_csv_rows(path)
    _check_header(header, TRANSACTIONS_HEADER, path)
    log = DiagnosticLog(str(path))
    records: ty.List[TransactionRecord] = []

    for n, row in rows:
        if len(row) != len(TRANSACTIONS_HEADER):
            log.fatal(n, f'expected {len(TRANSACTIONS_HEADER)} fields, '
                         f'got {len(row)}')
            log.count_row(RowOutcome.REJECTED)
            continue
        try:
            user_id = parse_uint(row[0], 'user_id')
            item_id = parse_uint(row[1], 'item_id')
            date = parse_date(row[2])
        except ValueError as e:
            log.fatal(n, str(e))
            log.count_row(RowOutcome.REJECTED)
            continue
        if date not in window:
            log.warning(n, f'date {row[2]} is outside of '
                           f'{window.start}..{window.end}, row dropped')
            log.count_row(RowOutcome.DROPPED)
            continue
        records.append(TransactionRecord(user_id, item_id, date))
        log.count_row(RowOutcome.KEPT)

    log.log_summary()
    return Loaded(records, log)


def load_attributes(path: PathLike) -> Loaded:
    header, rows = read_csv_rows(path)
    if not header or header[0] != ATTRIBUTES_ID_COLUMN:
        raise DataError(
            f'malformed header: first column must be {ATTRIBUTES_ID_COLUMN}',
            source=str(path),
        )
    vocabulary = header[1:]
    if not vocabulary:
        raise DataError('attribute vocabulary is empty', source=str(path))
    if len(set(vocabulary)) != len(vocabulary) or not all(vocabulary):
        raise DataError(
            'attribute names must be unique and non-empty',
            source=str(path),
        )

    log = DiagnosticLog(str(path))
    width = len(vocabulary) + 1
    vectors: ty.Dict[int, ty.List[float]] = {}
    first_seen: ty.Dict[int, int] = {}

    for n, row in rows:
        if len(row) != width:
            log.fatal(n, f'ragged row: expected {width} fields, '
                         f'got {len(row)}')
            log.count_row(RowOutcome.REJECTED)
            continue
        try:
            item_id = parse_uint(row[0], 'item_id')
            values = [float(v) for v in row[1:]]
        except ValueError as e:
            log.fatal(n, str(e))
            log.count_row(RowOutcome.REJECTED)
            continue
        if not all(math.isfinite(v) for v in values):
            log.fatal(n, 'attribute posteriors must be finite numbers')
            log.count_row(RowOutcome.REJECTED)
            continue
        if item_id in first_seen:
            log.fatal(
                n,
                f'duplicate item_id {item_id} '
                f'(first seen at row {first_seen[item_id]})',
            )
            log.count_row(RowOutcome.REJECTED)
            continue
        first_seen[item_id] = n

        clamped = []
        for name, value in zip(vocabulary, values):
            bounded = min(max(value, 0.0), 1.0)
            if bounded != value:
                log.warning(n, f'{name}={value} clamped to {bounded}')
            clamped.append(bounded)
        vectors[item_id] = clamped
        log.count_row(RowOutcome.KEPT)

    log.log_summary()
    return Loaded(AttributeTable(vocabulary, vectors), log)


def link_dataset(
        items: ty.Sequence[ItemRecord],
        transactions: ty.Sequence[TransactionRecord],
        attributes: AttributeTable,
        taxonomy: Taxonomy,
        window: DateWindow = DateWindow(),
) -> Loaded:
    log = DiagnosticLog('link')
    items_by_id = {item.item_id: item for item in items}

    by_item: ty.Dict[int, ty.List[TransactionRecord]] = {}
    dangling = []
    for n, tx in enumerate(transactions):
        by_item.setdefault(tx.item_id, []).append(tx)
        if tx.item_id not in items_by_id:
            dangling.append(n)
            log.warning(n + 1, f'transaction references unknown item '
                               f'{tx.item_id}')

    attribute_less = frozenset(
        item_id for item_id in items_by_id if item_id not in attributes
    )
    for item_id in sorted(attribute_less):
        log.warning(0, f'item {item_id} has no attribute row')

    _LOGGER.info(
        f'Linked {len(items_by_id)} items, {len(transactions)} '
        f'transactions ({len(dangling)} dangling), '
        f'{len(attribute_less)} items without attributes',
    )
    dataset = Dataset(
        items=items_by_id,
        transactions=tuple(transactions),
        attributes=attributes,
        taxonomy=taxonomy,
        window=window,
        transactions_by_item={k: tuple(v) for k, v in by_item.items()},
        dangling=tuple(dangling),
        attribute_less=attribute_less,
    )
    return Loaded(dataset, log)


def dump_dataset(dataset: Dataset, directory: PathLike) -> None:
    """Write the dataset back in the canonical input formats"""
    os.makedirs(directory, exist_ok=True)

    with open(os.path.join(directory, TAXONOMY_FILE), 'w',
              encoding='utf-8') as f:
        json.dump(
            {
                str(raw_cat_id): {'name': entry.name,
                                  'zone': entry.zone.value}
                for raw_cat_id, entry in sorted(
                    dataset.taxonomy.entries.items(),
                )
            },
            f,
            indent=2,
            sort_keys=True,
        )

    with open(os.path.join(directory, ITEMS_FILE), 'w', newline='',
              encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(ITEMS_HEADER)
        for item in dataset.items.values():
            writer.writerow(
                (item.item_id, item.raw_cat_id, item.name, item.img_ref),
            )

    with open(os.path.join(directory, TRANSACTIONS_FILE), 'w', newline='',
              encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow(TRANSACTIONS_HEADER)
        for tx in dataset.transactions:
            writer.writerow((tx.user_id, tx.item_id, format_date(tx.date)))

    attributes = dataset.attributes
    with open(os.path.join(directory, ATTRIBUTES_FILE), 'w', newline='',
              encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerow((ATTRIBUTES_ID_COLUMN, *attributes.vocabulary))
        for item_id in attributes.item_ids:
            writer.writerow((
                item_id,
                *(repr(float(v)) for v in attributes.vector(item_id)),
            ))


def load_dataset(directory: PathLike,
                 window: DateWindow = DateWindow()) -> Loaded:
    """Sequential counterpart of the pipeline ingest stage"""
    taxonomy = load_taxonomy(os.path.join(directory, TAXONOMY_FILE))
    items = load_items(os.path.join(directory, ITEMS_FILE), taxonomy)
    transactions = load_transactions(
        os.path.join(directory, TRANSACTIONS_FILE), window,
    )
    attributes = load_attributes(os.path.join(directory, ATTRIBUTES_FILE))
    return link_dataset(
        items.records,
        transactions.records,
        attributes.records,
        taxonomy,
        window,
    )
