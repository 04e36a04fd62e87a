import json
import os

import pytest

from trendforge.config import (CONFIG_ENV, DEFAULTS, layered_config,
                               validate_config)
from trendforge.exceptions import ConfigError
from trendforge.tasks import THREADS_ENV


@pytest.fixture(autouse=True)
def clean_environ(monkeypatch):
    monkeypatch.delenv(CONFIG_ENV, raising=False)
    monkeypatch.delenv(THREADS_ENV, raising=False)


def config_with(**overrides):
    raw = dict(DEFAULTS)
    raw['data_dir'] = 'data'
    raw.update(overrides)
    return raw


class TestValidate:
    def test_defaults(self):
        config = validate_config(config_with())
        assert config.items == os.path.join('data', 'items.csv')
        assert config.top_percent == 10
        assert config.seasons == ('spring', 'winter')
        assert config.noise_scores is None

    def test_input_paths_required(self):
        raw = dict(DEFAULTS)
        with pytest.raises(ConfigError) as e:
            validate_config(raw)
        assert len(e.value.errors) == 4

    def test_noise_scores_detected(self, tmp_path):
        (tmp_path / 'noise_scores.csv').write_text('item_id,score\n')
        config = validate_config(config_with(data_dir=str(tmp_path)))
        assert config.noise_scores == str(tmp_path / 'noise_scores.csv')

    def test_percentile_message(self):
        with pytest.raises(ConfigError) as e:
            validate_config(config_with(top_percent=60))
        assert e.value.errors == ['percentile must be in (0,50]']

    def test_every_violation_reported(self):
        with pytest.raises(ConfigError) as e:
            validate_config(config_with(top_percent=60, tau_popular=0.5))
        assert len(e.value.errors) == 2

    @pytest.mark.parametrize('key, value', [
        ('noise_threshold', 1.5),
        ('min_support', 0),
        ('attr_cutoff', 1),
        ('smoothing_alpha', 0),
        ('tau_classic', 0),
        ('flat_band', -0.1),
        ('threads', 0),
        ('max_itemset_size', 'x'),
        ('crf_rescore', 'maybe'),
        ('window_start', '2014-13-01'),
        ('seasons', ['spring', 'spring']),
        ('seasons', ['spring', 'monsoon']),
        ('log_level', 'LOUD'),
        ('season_map', {'1': 'winter'}),
        ('colour', 'red'),
    ])
    def test_invalid(self, key, value):
        with pytest.raises(ConfigError):
            validate_config(config_with(**{key: value}))

    def test_empty_window(self):
        with pytest.raises(ConfigError, match='empty'):
            validate_config(config_with(window_start='2015-01-01',
                                        window_end='2014-01-01'))

    def test_seasons_string(self):
        config = validate_config(config_with(seasons='summer, fall'))
        assert config.seasons == ('summer', 'fall')

    def test_season_map_file(self, tmp_path):
        raw = {str(m): 'winter' if m < 7 else 'summer' for m in range(1, 13)}
        path = tmp_path / 'seasons.json'
        path.write_text(json.dumps(raw))
        config = validate_config(config_with(season_map=str(path)))
        assert config.season_map.as_dict() == raw

    def test_season_map_file_missing(self, tmp_path):
        with pytest.raises(ConfigError, match='invalid season_map'):
            validate_config(config_with(
                season_map=str(tmp_path / 'none.json'),
            ))

    def test_string_flags(self):
        config = validate_config(config_with(crf_rescore='true',
                                             tau_classic='0.4'))
        assert config.crf_rescore is True
        assert config.tau_classic == 0.4

    def test_echo(self):
        config = validate_config(config_with(threads=3))
        echo = config.as_dict()
        assert echo['threads'] == 3
        assert echo['season_map']['12'] == 'winter'
        assert validate_config(echo).as_dict() == echo


class TestLayering:
    def test_order(self, tmp_path):
        env_file = tmp_path / 'env.json'
        env_file.write_text(json.dumps({'top_percent': 5, 'flat_band': 0.1,
                                        'tau_popular': 2}))
        explicit = tmp_path / 'explicit.json'
        explicit.write_text(json.dumps({'top_percent': 20,
                                        'flat_band': 0.2}))
        raw = layered_config(
            str(explicit), {'top_percent': 25, 'tau_classic': None},
            environ={CONFIG_ENV: str(env_file)},
        )
        assert raw['top_percent'] == 25
        assert raw['flat_band'] == 0.2
        assert raw['tau_popular'] == 2
        assert raw['tau_classic'] == DEFAULTS['tau_classic']

    def test_missing_env_file_is_ignored(self, tmp_path):
        raw = layered_config(environ={CONFIG_ENV: str(tmp_path / 'no')})
        assert raw == DEFAULTS

    def test_unreadable_explicit_file(self, tmp_path):
        path = tmp_path / 'bad.json'
        path.write_text('[1, 2]')
        with pytest.raises(ConfigError):
            layered_config(str(path), environ={})


class TestWorkers:
    def test_threads_override(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, '2')
        assert validate_config(config_with()).workers == 2
        assert validate_config(config_with(threads=5)).workers == 5

    def test_invalid_threads_env(self, monkeypatch):
        monkeypatch.setenv(THREADS_ENV, 'many')
        with pytest.raises(ConfigError, match=THREADS_ENV):
            validate_config(config_with())
