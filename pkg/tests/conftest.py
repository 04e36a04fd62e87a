import csv
import json
import os

import pytest

from trendforge.synthgen import GeneratorSpec, generate

TAXONOMY = {
    '10': {'name': 'T-shirt', 'zone': 'upper'},
    '11': {'name': 'T-shirt', 'zone': 'upper'},
    '20': {'name': 'Skirt', 'zone': 'lower'},
    '30': {'name': 'Suit', 'zone': 'upper'},
    '31': {'name': 'Suit', 'zone': 'whole'},
}

ITEMS = [
    ('item_id', 'cat_id', 'name', 'img_ref'),
    (1, 10, 'striped tee', 'img/1.jpg'),
    (2, 10, 'plain tee', 'img/2.jpg'),
    (3, 20, 'pleated skirt', 'img/3.jpg'),
    (4, 20, 'denim skirt', 'img/4.jpg'),
    (5, 99, 'gift card', 'img/5.jpg'),
]

TRANSACTIONS = [
    ('user_id', 'item_id', 'date'),
    (1, 1, '20150301'),
    (2, 1, '20150315'),
    (3, 2, '20150402'),
    (1, 3, '20150410'),
    (4, 3, '20141205'),
    (5, 4, '20150120'),
    (6, 1, '20141224'),
    (7, 42, '20150105'),
]

ATTRIBUTES = [
    ('item_id', 'collar', 'upper_blue', 'white'),
    (1, 0.9, 0.1, 0.8),
    (2, 0.2, 0.7, 0.6),
    (3, 0.1, 0.2, 0.9),
    (4, 0.6, 0.4, 0.3),
]


def write_csv(path, rows):
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator='\n')
        writer.writerows(rows)
    return str(path)


def write_json(path, data):
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f)
    return str(path)


@pytest.fixture
def taxonomy_file(tmp_path):
    return write_json(tmp_path / 'taxonomy.json', TAXONOMY)


@pytest.fixture
def dataset_dir(tmp_path):
    directory = tmp_path / 'data'
    directory.mkdir()
    write_json(directory / 'taxonomy.json', TAXONOMY)
    write_csv(directory / 'items.csv', ITEMS)
    write_csv(directory / 'transactions.csv', TRANSACTIONS)
    write_csv(directory / 'attributes.csv', ATTRIBUTES)
    return str(directory)


SMALL_SPEC = dict(
    seed=7,
    n_items=400,
    n_users=50,
    n_transactions=12000,
)


@pytest.fixture(scope='session')
def synthetic_dir(tmp_path_factory):
    directory = tmp_path_factory.mktemp('synthetic')
    generated = generate(GeneratorSpec(**SMALL_SPEC), str(directory))
    return generated


def input_paths(directory):
    return {
        'items': os.path.join(directory, 'items.csv'),
        'transactions': os.path.join(directory, 'transactions.csv'),
        'attributes': os.path.join(directory, 'attributes.csv'),
        'taxonomy': os.path.join(directory, 'taxonomy.json'),
    }
