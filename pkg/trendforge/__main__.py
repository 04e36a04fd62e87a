import argparse
import asyncio as aio
import json
import logging
import sys
import typing as ty

from trendforge.__version__ import VERSION

from . import pipeline
from .config import layered_config, validate_config
from .exceptions import ConfigError, TrendforgeError
from .fpgrowth import (DEFAULT_MIN_SUPPORT, brute_force_oracle,
                       frequent_itemsets, load_baskets)
from .noise_filter import (DEFAULT_THRESHOLD, check_threshold, confusion,
                           load_noise_scores, metrics)
from .synthgen import GeneratorSpec, generate
from .utils import absolute_support, join_items

_LOGGER = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DATA_ERROR = 1
EXIT_CONFIG_ERROR = 2

SWITCH = {'on': True, 'off': False}

# cli flag -> config key, None values are not applied
RUN_FLAGS = (
    'data_dir', 'items', 'transactions', 'attributes', 'taxonomy',
    'noise_scores', 'out_dir', 'window_start', 'window_end', 'season_map',
    'noise_threshold', 'top_percent', 'min_support', 'attr_cutoff',
    'max_itemset_size', 'crf_rescore', 'crf_sweeps', 'smoothing_alpha',
    'priors', 'tau_classic', 'tau_popular', 'flat_band', 'seasons',
    'threads', 'log_level',
)


def setup_logging(level: str) -> None:
    level = level.upper()
    if not isinstance(logging.getLevelName(level), int):
        level = 'INFO'
    logging.basicConfig(
        format='%(asctime)s %(levelname)s: %(message)s',
        level=level,
        datefmt='%Y-%m-%d %H:%M:%S',
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='trendforge',
        description='Seasonal clothing feature mining from sales data',
    )
    parser.add_argument('--version', action='version', version=VERSION)
    commands = parser.add_subparsers(dest='command', required=True)

    gen = commands.add_parser('gen', help='generate a synthetic dataset')
    gen.add_argument('--spec', help='generator spec json')
    gen.add_argument('--out', required=True, help='output directory')
    gen.add_argument('--seed', type=int, help='override the spec seed')
    gen.add_argument('--log-level', default='INFO')

    run = commands.add_parser('run', help='run the mining pipeline')
    run.add_argument('--config', help='json config file')
    run.add_argument('--data-dir', help='directory with the input files')
    run.add_argument('--items')
    run.add_argument('--transactions')
    run.add_argument('--attributes')
    run.add_argument('--taxonomy')
    run.add_argument('--noise-scores')
    run.add_argument('--out', dest='out_dir')
    run.add_argument('--window-start', help='YYYY-MM-DD')
    run.add_argument('--window-end', help='YYYY-MM-DD')
    run.add_argument('--season-map', help='json month -> season map')
    run.add_argument('--noise-threshold', type=float)
    run.add_argument('--top-percent', type=float)
    run.add_argument('--min-support', type=float)
    run.add_argument('--attr-cutoff', type=float)
    run.add_argument('--max-itemset-size', type=int)
    run.add_argument('--crf-rescore', choices=SWITCH,
                     help='joint pairwise rescoring of attribute posteriors')
    run.add_argument('--crf-sweeps', type=int)
    run.add_argument('--smoothing-alpha', type=float)
    run.add_argument('--priors', help='priors json, estimated if missing')
    run.add_argument('--tau-classic', type=float)
    run.add_argument('--tau-popular', type=float)
    run.add_argument('--flat-band', type=float)
    run.add_argument('--seasons', help='two seasons, e.g. spring,winter')
    run.add_argument('--threads', type=int)
    run.add_argument('--log-level')

    evaluate = commands.add_parser(
        'metrics', help='evaluate labeled noise scores',
    )
    evaluate.add_argument('--scores', required=True)
    evaluate.add_argument('--threshold', type=float,
                          default=DEFAULT_THRESHOLD)
    evaluate.add_argument('--log-level', default='WARNING')

    mine = commands.add_parser('mine', help='mine a bare basket file')
    mine.add_argument('--input', required=True,
                      help="one transaction per line, items split by ';'")
    mine.add_argument('--min-support', type=float,
                      default=DEFAULT_MIN_SUPPORT,
                      help='relative support threshold')
    mine.add_argument('--min-count', type=int,
                      help='absolute support, overrides --min-support')
    mine.add_argument('--max-size', type=int)
    mine.add_argument('--oracle', action='store_true',
                      help='cross-check against exhaustive enumeration')
    mine.add_argument('--log-level', default='WARNING')
    return parser


def cmd_gen(args) -> int:
    spec = GeneratorSpec.from_json(args.spec) if args.spec \
        else GeneratorSpec()
    if args.seed is not None:
        spec = GeneratorSpec.from_dict({**spec.as_dict(), 'seed': args.seed})
    generate(spec, args.out)
    return EXIT_OK


def cmd_run(args) -> int:
    overrides = {key: getattr(args, key) for key in RUN_FLAGS}
    if args.crf_rescore is not None:
        overrides['crf_rescore'] = SWITCH[args.crf_rescore]
    config = validate_config(layered_config(args.config, overrides))
    logging.getLogger().setLevel(config.log_level)
    _LOGGER.info(f'Starting trendforge version {VERSION}')
    report = aio.run(pipeline.run(config))
    _LOGGER.info(
        f'Classified {len(report.classification.classes)} season '
        f'features into {config.out_dir}',
    )
    return EXIT_OK


def cmd_metrics(args) -> int:
    try:
        check_threshold(args.threshold)
    except ValueError as e:
        raise ConfigError([str(e)])
    scores = load_noise_scores(args.scores).records
    cm = confusion(scores, args.threshold)
    print(json.dumps({
        'threshold': args.threshold,
        'confusion': cm.as_dict(),
        'metrics': metrics(cm).as_dict(),
    }, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_mine(args) -> int:
    baskets = load_baskets(args.input)
    if args.min_count is not None:
        if args.min_count < 1:
            raise ConfigError(['min_count must be a positive integer'])
        min_support = args.min_count
    else:
        if not (0 < args.min_support <= 1):
            raise ConfigError(['min_support must be in (0,1]'])
        min_support = absolute_support(args.min_support, len(baskets))
    found = frequent_itemsets(baskets, min_support, args.max_size)
    for itemset in found:
        print(f'{join_items(itemset.items)},{itemset.support}')
    if args.oracle:
        expected = brute_force_oracle(baskets, min_support, args.max_size)
        if expected != found:
            _LOGGER.error(
                f'FP-growth returned {len(found)} itemsets, exhaustive '
                f'enumeration {len(expected)}',
            )
            return EXIT_DATA_ERROR
        _LOGGER.info(f'Oracle agrees on {len(found)} itemsets')
    return EXIT_OK


COMMANDS: ty.Dict[str, ty.Callable[[argparse.Namespace], int]] = {
    'gen': cmd_gen,
    'run': cmd_run,
    'metrics': cmd_metrics,
    'mine': cmd_mine,
}


def main(argv: ty.Optional[ty.Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(getattr(args, 'log_level', None) or 'INFO')
    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        for error in e.errors:
            _LOGGER.error(f'Config error: {error}')
        return EXIT_CONFIG_ERROR
    except (TrendforgeError, OSError) as e:
        _LOGGER.error(str(e))
        return EXIT_DATA_ERROR
    except KeyboardInterrupt:
        _LOGGER.info('Exiting...')
        return EXIT_DATA_ERROR


if __name__ == '__main__':
    sys.exit(main())
