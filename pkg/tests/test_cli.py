import json
import os

import pytest

from conftest import write_csv
from trendforge.__main__ import (EXIT_CONFIG_ERROR, EXIT_DATA_ERROR, EXIT_OK,
                                 main)
from trendforge.config import CONFIG_ENV
from trendforge.tasks import THREADS_ENV


@pytest.fixture(autouse=True)
def clean_environ(monkeypatch):
    monkeypatch.delenv(CONFIG_ENV, raising=False)
    monkeypatch.delenv(THREADS_ENV, raising=False)


def test_gen_and_run(tmp_path):
    spec = tmp_path / 'gen.json'
    spec.write_text(json.dumps({'n_items': 200, 'n_users': 10,
                                'n_transactions': 3000}))
    data = tmp_path / 'data'
    assert main(['gen', '--spec', str(spec), '--out', str(data),
                 '--seed', '5']) == EXIT_OK
    with open(data / 'truth.json', encoding='utf-8') as f:
        assert json.load(f)['seed'] == 5

    out = tmp_path / 'out'
    assert main(['run', '--data-dir', str(data), '--out', str(out),
                 '--threads', '2', '--top-percent', '20']) == EXIT_OK
    assert (out / 'report.json').is_file()
    with open(out / 'report.json', encoding='utf-8') as f:
        assert json.load(f)['config']['top_percent'] == 20


def test_config_file(tmp_path, dataset_dir):
    config = tmp_path / 'config.json'
    config.write_text(json.dumps({'data_dir': dataset_dir,
                                  'top_percent': 50, 'threads': 1}))
    out = tmp_path / 'out'
    assert main(['run', '--config', str(config), '--out', str(out)]) == \
        EXIT_OK
    with open(out / 'report.json', encoding='utf-8') as f:
        assert json.load(f)['config']['top_percent'] == 50


def test_config_error(dataset_dir, tmp_path):
    assert main(['run', '--data-dir', dataset_dir, '--out',
                 str(tmp_path / 'out'), '--top-percent', '60']) == \
        EXIT_CONFIG_ERROR


def test_data_error(tmp_path):
    empty = tmp_path / 'empty'
    empty.mkdir()
    assert main(['run', '--data-dir', str(empty), '--out',
                 str(tmp_path / 'out')]) == EXIT_DATA_ERROR


def test_bad_generator_spec(tmp_path):
    spec = tmp_path / 'gen.json'
    spec.write_text(json.dumps({'noise_fraction': 2}))
    assert main(['gen', '--spec', str(spec), '--out',
                 str(tmp_path / 'data')]) == EXIT_CONFIG_ERROR


def test_metrics(tmp_path, capsys):
    path = write_csv(tmp_path / 'scores.csv', [
        ('item_id', 'score', 'label'),
        (1, 0.9, 1), (2, 0.8, 0), (3, 0.2, 1), (4, 0.1, 0),
    ])
    assert main(['metrics', '--scores', path]) == EXIT_OK
    body = json.loads(capsys.readouterr().out)
    assert body['confusion'] == {'tp': 1, 'fp': 1, 'fn': 1, 'tn': 1}
    assert body['metrics']['accuracy'] == 0.5


def test_metrics_threshold_domain(tmp_path):
    path = write_csv(tmp_path / 'scores.csv', [('item_id', 'score')])
    assert main(['metrics', '--scores', path, '--threshold', '2']) == \
        EXIT_CONFIG_ERROR


def test_mine(tmp_path, capsys):
    path = tmp_path / 'baskets.txt'
    path.write_text('a;b\nb;c;d\na;c;d;e\na;d;e\na;b;c\n')
    assert main(['mine', '--input', str(path), '--min-count', '2',
                 '--oracle']) == EXIT_OK
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == 'a,4'
    assert 'a;d;e,2' in lines
    assert len(lines) == 13


def test_mine_relative_support(tmp_path, capsys):
    path = tmp_path / 'baskets.txt'
    path.write_text('a;b\na\nb\nc\n')
    assert main(['mine', '--input', str(path), '--min-support',
                 '0.5']) == EXIT_OK
    assert capsys.readouterr().out.splitlines() == ['a,2', 'b,2']


def test_mine_missing_input(tmp_path):
    assert main(['mine', '--input', str(tmp_path / 'none.txt')]) == \
        EXIT_DATA_ERROR


def test_unreadable_file_is_data_error(tmp_path):
    assert not os.path.exists(tmp_path / 'nope')
    assert main(['metrics', '--scores', str(tmp_path / 'nope')]) == \
        EXIT_DATA_ERROR


@pytest.mark.parametrize('switch,expected', [('on', True), ('off', False)])
def test_crf_rescore_switch(tmp_path, dataset_dir, switch, expected):
    config = tmp_path / 'config.json'
    config.write_text(json.dumps({'crf_rescore': not expected}))
    out = tmp_path / 'out'
    assert main(['run', '--config', str(config), '--data-dir', dataset_dir,
                 '--out', str(out), '--threads', '1', '--top-percent', '50',
                 '--crf-rescore', switch]) == EXIT_OK
    with open(out / 'report.json', encoding='utf-8') as f:
        assert json.load(f)['config']['crf_rescore'] is expected
    assert (out / 'priors.json').is_file() is expected


def test_crf_rescore_rejects_other_values(tmp_path, dataset_dir):
    with pytest.raises(SystemExit) as e:
        main(['run', '--data-dir', dataset_dir, '--out', str(tmp_path),
              '--crf-rescore', 'yes'])
    assert e.value.code == 2


def test_mine_min_count_is_config_error(tmp_path):
    path = tmp_path / 'baskets.txt'
    path.write_text('a;b\n')
    assert main(['mine', '--input', str(path), '--min-count', '0']) == \
        EXIT_CONFIG_ERROR
