import datetime
import filecmp
import logging
import os

import numpy as np
import pytest

from conftest import write_csv, write_json
from trendforge.diagnostics import Severity
from trendforge.exceptions import DataError
from trendforge.ingest import (UNMAPPED, AttributeTable, DateWindow, Zone,
                               dump_dataset, load_attributes, load_dataset,
                               load_items, load_taxonomy, load_transactions)
from trendforge.ingest.loaders import ITEMS_HEADER, TRANSACTIONS_HEADER


@pytest.fixture
def taxonomy(taxonomy_file):
    return load_taxonomy(taxonomy_file)


class TestTaxonomy:
    def test_labels(self, taxonomy):
        assert taxonomy.category_of(10) == 'T-shirt'
        assert taxonomy.category_of(20) == 'Skirt'
        assert taxonomy.category_of(99) == UNMAPPED
        assert taxonomy.zone_of('Skirt') == Zone.LOWER

    def test_name_shared_by_zones_is_qualified(self, taxonomy):
        assert taxonomy.category_of(30) == 'upper:Suit'
        assert taxonomy.category_of(31) == 'whole:Suit'
        assert taxonomy.zone_of('whole:Suit') == Zone.WHOLE

    def test_ids_sharing_a_category(self, tmp_path, caplog):
        path = write_json(tmp_path / 't.json', {
            '1': {'name': 'Coat', 'zone': 'upper'},
            '2': {'name': 'Coat', 'zone': 'upper'},
        })
        with caplog.at_level(logging.INFO, logger='trendforge.ingest'):
            taxonomy = load_taxonomy(path)
        assert taxonomy.category_of(1) == taxonomy.category_of(2) == 'Coat'
        assert taxonomy.categories == ['Coat']
        assert 'cat_ids 1 and 2 share category Coat' in caplog.text

    def test_unknown_zone(self, tmp_path):
        path = write_json(tmp_path / 't.json',
                          {'1': {'name': 'Coat', 'zone': 'feet'}})
        with pytest.raises(DataError):
            load_taxonomy(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / 't.json'
        path.write_text('{not json')
        with pytest.raises(DataError):
            load_taxonomy(str(path))


class TestLoadItems:
    def test_header_only(self, tmp_path, taxonomy):
        path = write_csv(tmp_path / 'items.csv', [ITEMS_HEADER])
        records, log = load_items(path, taxonomy)
        assert records == []
        assert len(log) == 0

    def test_unmapped_category(self, tmp_path, taxonomy):
        rows = [ITEMS_HEADER, (1, 10, 'a', 'x'), (2, 20, 'b', 'y'),
                (3, 77, 'c', 'z')]
        records, log = load_items(write_csv(tmp_path / 'i.csv', rows),
                                  taxonomy)
        assert len(records) == 3
        assert [r.category for r in records] == ['T-shirt', 'Skirt',
                                                 UNMAPPED]
        assert len(log.warnings) == 1
        assert log.warnings[0].row == 3
        assert not log.fatals

    def test_duplicate_item_id(self, tmp_path, taxonomy):
        rows = [ITEMS_HEADER, (7, 10, 'a', 'x'), (7, 20, 'b', 'y')]
        records, log = load_items(write_csv(tmp_path / 'i.csv', rows),
                                  taxonomy)
        assert [r.item_id for r in records] == [7]
        assert len(log.fatals) == 1
        assert log.fatals[0].row == 2
        assert 'duplicate' in log.fatals[0].message

    def test_blank_line_keeps_row_numbers(self, tmp_path, taxonomy):
        path = tmp_path / 'i.csv'
        path.write_text('item_id,cat_id,name,img_ref\n7,10,a,x\n\n'
                        '7,20,b,y\n')
        records, log = load_items(str(path), taxonomy)
        assert [r.item_id for r in records] == [7]
        assert log.fatals[0].row == 3

    def test_malformed_header(self, tmp_path, taxonomy):
        path = write_csv(tmp_path / 'i.csv', [('id', 'cat', 'name', 'img')])
        with pytest.raises(DataError):
            load_items(path, taxonomy)

    def test_missing_file(self, tmp_path, taxonomy):
        with pytest.raises(DataError):
            load_items(str(tmp_path / 'nope.csv'), taxonomy)

    def test_row_conservation(self, tmp_path, taxonomy):
        rows = [ITEMS_HEADER, (1, 10, 'a', 'x'), ('x', 10, 'b', 'y'),
                (2, 10, 'c'), (1, 20, 'd', 'z'), (3, 55, 'e', 'w')]
        records, log = load_items(write_csv(tmp_path / 'i.csv', rows),
                                  taxonomy)
        assert log.kept + log.dropped + log.rejected == len(rows) - 1
        assert log.kept == len(records) == 2
        assert log.rejected == 3


class TestLoadTransactions:
    def test_window(self, tmp_path):
        rows = [TRANSACTIONS_HEADER, (1, 1, '20140531'), (1, 1, '20140601'),
                (1, 2, '20150630'), (2, 2, '20150701')]
        records, log = load_transactions(write_csv(tmp_path / 't.csv', rows))
        assert [r.date for r in records] == [
            datetime.date(2014, 6, 1), datetime.date(2015, 6, 30),
        ]
        assert log.dropped == 2
        assert all(d.severity == Severity.WARNING for d in log)

    def test_invalid_rows_rejected(self, tmp_path):
        rows = [TRANSACTIONS_HEADER, (1, 1, '2015-01-01'),
                (1, -3, '20150101'), (1, 1, '20150230'), (1, 1, '20150101')]
        records, log = load_transactions(write_csv(tmp_path / 't.csv', rows))
        assert len(records) == 1
        assert log.rejected == 3
        assert [d.row for d in log.fatals] == [1, 2, 3]

    def test_custom_window(self, tmp_path):
        rows = [TRANSACTIONS_HEADER, (1, 1, '20200101')]
        window = DateWindow(datetime.date(2020, 1, 1),
                            datetime.date(2020, 1, 31))
        records, _ = load_transactions(write_csv(tmp_path / 't.csv', rows),
                                       window)
        assert len(records) == 1


class TestLoadAttributes:
    def test_vectors(self, tmp_path):
        rows = [('item_id', 'collar', 'white'), (1, 0.25, 1), (2, 0, 0.5)]
        table, log = load_attributes(write_csv(tmp_path / 'a.csv', rows))
        assert table.vocabulary == ('collar', 'white')
        np.testing.assert_array_equal(table.vector(1), [0.25, 1.0])
        assert 2 in table and 3 not in table
        assert not log.diagnostics

    def test_empty_vocabulary(self, tmp_path):
        path = write_csv(tmp_path / 'a.csv', [('item_id',), (1,)])
        with pytest.raises(DataError):
            load_attributes(path)

    def test_ragged_and_out_of_range(self, tmp_path):
        rows = [('item_id', 'collar', 'white'), (1, 0.5), (2, 1.2, -0.1),
                (3, 'nan', 0.1)]
        table, log = load_attributes(write_csv(tmp_path / 'a.csv', rows))
        assert table.item_ids == (2,)
        np.testing.assert_array_equal(table.vector(2), [1.0, 0.0])
        assert log.rejected == 2
        assert len(log.warnings) == 2

    def test_matrix_is_read_only(self, tmp_path):
        table = AttributeTable(['a'], {1: [0.5]})
        with pytest.raises(ValueError):
            table.matrix[0, 0] = 1.0


class TestDataset:
    def test_link(self, dataset_dir):
        dataset, log = load_dataset(dataset_dir)
        assert set(dataset.items) == {1, 2, 3, 4, 5}
        assert len(dataset.transactions) == 8
        assert len(dataset.dangling) == 1
        assert dataset.attribute_less == frozenset({5})
        assert len(dataset.transactions_by_item[1]) == 3
        messages = [d.message for d in log]
        assert any('unknown item 42' in m for m in messages)

    def test_dump_round_trip(self, dataset_dir, tmp_path):
        dataset, _ = load_dataset(dataset_dir)
        out = tmp_path / 'dump'
        dump_dataset(dataset, str(out))
        reloaded, _ = load_dataset(str(out))
        assert reloaded == dataset

        again = tmp_path / 'again'
        dump_dataset(reloaded, str(again))
        for name in os.listdir(out):
            assert filecmp.cmp(out / name, again / name, shallow=False)
