"""
End-to-end run: ingest, noise filter, popularity selection, optional
pairwise attribute rescoring, binarization, frequent itemset mining per
collection, feature classification and report emission.
"""
import contextlib
import datetime
import logging
import os
import time
import typing as ty
from functools import partial

from . import report as reports
from .__version__ import VERSION
from .attribute_model import (PRIORS_FILE, estimate_priors, load_priors,
                              rescore, save_priors)
from .config import PipelineConfig
from .diagnostics import DiagnosticLog
from .exceptions import DataError, PreconditionError, handle_stage_errors
from .fpgrowth import AttributeSet, binarize, frequent_itemsets
from .ingest.loaders import (link_dataset, load_attributes, load_items,
                             load_taxonomy, load_transactions)
from .ingest.schema import Dataset
from .noise_filter import (FilterResult, NoiseScore, apply_filter,
                           confusion, load_noise_scores, metrics)
from .popularity import (Cell, count_partition, merge_tables,
                         monthly_histogram, select_popular)
from .report import POOLED, RunReport
from .tasks import chunked, make_executor, run_in_workers
from .trendmine import (MinedCollection, classify, feature_stats,
                        frequent_sets_report, trend_deltas)
from .utils import absolute_support, ratio

_LOGGER = logging.getLogger(__name__)


def mine_collection(sets: ty.Sequence[AttributeSet],
                    min_support_fraction: float,
                    max_size: ty.Optional[int] = None) -> MinedCollection:
    if not sets:
        return MinedCollection([], 0, min_support_fraction)
    min_support = absolute_support(min_support_fraction, len(sets))
    return MinedCollection(
        itemsets=frequent_itemsets(sets, min_support, max_size),
        n_transactions=len(sets),
        min_support_fraction=min_support_fraction,
        min_support=min_support,
    )


def _merge_dicts(parts: ty.Iterable[ty.Mapping]) -> ty.Dict:
    merged: ty.Dict = {}
    for part in parts:
        merged.update(part)
    return merged


class PipelineRun:
    def __init__(self, config: PipelineConfig) -> None:
        self.config = config
        self.logs: ty.List[DiagnosticLog] = []
        self.stage_rows: ty.Dict[str, ty.Dict[str, ty.Any]] = {}
        self.timings: ty.Dict[str, float] = {}
        self.scores: ty.Optional[ty.List[NoiseScore]] = None

    @contextlib.contextmanager
    def stage(self, name: str):
        _LOGGER.info(f'Stage {name} started')
        started = time.perf_counter()
        with handle_stage_errors(name):
            yield
        elapsed = time.perf_counter() - started
        self.timings[name] = elapsed
        _LOGGER.info(f'Stage {name} finished in {elapsed:.3f}s')

    async def ingest(self, executor) -> Dataset:
        cfg = self.config
        taxonomy = load_taxonomy(cfg.taxonomy)
        calls: ty.List[ty.Callable] = [
            partial(load_items, cfg.items, taxonomy),
            partial(load_transactions, cfg.transactions, cfg.window),
            partial(load_attributes, cfg.attributes),
        ]
        if cfg.noise_scores:
            calls.append(partial(load_noise_scores, cfg.noise_scores))
        loaded = await run_in_workers(executor, calls)
        items, transactions, attributes = loaded[:3]
        self.scores = loaded[3].records if cfg.noise_scores else None
        linked = link_dataset(
            items.records,
            transactions.records,
            attributes.records,
            taxonomy,
            cfg.window,
        )
        self.logs.extend(part.diagnostics for part in (*loaded, linked))
        dataset = linked.records
        self.stage_rows['ingest'] = {
            'items': len(dataset.items),
            'transactions': len(dataset.transactions),
            'attribute_rows': len(dataset.attributes),
            'dangling_transactions': len(dataset.dangling),
            'items_without_attributes': len(dataset.attribute_less),
        }
        return dataset

    def noise_filter(self, dataset: Dataset
                     ) -> ty.Tuple[ty.Optional[FilterResult], ty.Dict]:
        if self.scores is None:
            self.stage_rows['noise_filter'] = {'applied': False}
            return None, {'applied': False}
        log = DiagnosticLog('noise_filter')
        self.logs.append(log)
        result = apply_filter(dataset, self.scores,
                              self.config.noise_threshold, log)
        noise: ty.Dict[str, ty.Any] = {
            'applied': True,
            **result.summary(),
            'pruned_share': ratio(len(result.pruned), len(dataset.items)),
        }
        try:
            cm = confusion(self.scores, self.config.noise_threshold)
        except PreconditionError:
            _LOGGER.info('Noise scores carry no labels, metrics skipped')
        else:
            noise['confusion'] = cm.as_dict()
            noise['metrics'] = metrics(cm).as_dict()
        self.stage_rows['noise_filter'] = result.summary()
        return result, noise

    async def attribute_sets(self, executor, dataset: Dataset,
                             selected: ty.List[int],
                             kept: ty.Optional[ty.AbstractSet[int]],
                             ) -> ty.Dict[int, AttributeSet]:
        cfg = self.config
        attributes = dataset.attributes
        log = DiagnosticLog('binarize')
        self.logs.append(log)
        if not cfg.crf_rescore:
            with self.stage('binarize'):
                sets = binarize(attributes, selected, cfg.attr_cutoff, log)
                self.stage_rows['binarize'] = {'items': len(sets)}
            return sets

        with self.stage('rescore'):
            if cfg.priors:
                priors = load_priors(cfg.priors)
                if priors.names != attributes.vocabulary:
                    raise DataError('priors vocabulary does not match the '
                                    'attribute table', source=cfg.priors)
            else:
                base = binarize(
                    attributes,
                    [i for i in attributes.item_ids
                     if i in dataset.items and (kept is None or i in kept)],
                    cfg.attr_cutoff,
                )
                priors = estimate_priors(list(base.values()),
                                         attributes.vocabulary,
                                         cfg.smoothing_alpha)
            save_priors(priors, os.path.join(cfg.out_dir, PRIORS_FILE))

            present = []
            for item_id in selected:
                if item_id in attributes:
                    present.append(item_id)
                else:
                    log.warning(0, f'item {item_id} has no attributes, '
                                   f'skipped')
            calls = [
                partial(
                    rescore,
                    {i: attributes.vector(i) for i in chunk},
                    attributes.vocabulary,
                    priors,
                    cfg.crf_sweeps,
                )
                for chunk in chunked(present, cfg.workers)
            ]
            sets = _merge_dicts(await run_in_workers(executor, calls))
            self.stage_rows['rescore'] = {
                'items': len(sets),
                'prior_sets': priors.n_sets,
            }
        return sets

    async def run(self) -> RunReport:
        cfg = self.config
        os.makedirs(cfg.out_dir, exist_ok=True)
        executor = make_executor(cfg.workers)
        try:
            with self.stage('ingest'):
                dataset = await self.ingest(executor)

            with self.stage('noise_filter'):
                filtered, noise = self.noise_filter(dataset)
            kept = filtered.kept if filtered is not None else None

            with self.stage('popularity'):
                tables = await run_in_workers(executor, [
                    partial(count_partition, dataset, chunk, kept,
                            cfg.season_map)
                    for chunk in chunked(dataset.transactions, cfg.workers)
                ])
                freq = merge_tables(*tables)
                selection = select_popular(freq, cfg.top_percent)
                months = monthly_histogram(dataset)
                self.stage_rows['popularity'] = {
                    'included': freq.included,
                    'excluded': dict(sorted(freq.excluded.items())),
                    'cells': len(selection.cells),
                    'popular_items': sum(
                        len(v) for v in selection.popular.values()
                    ),
                    'unpopular_items': sum(
                        len(v) for v in selection.unpopular.values()
                    ),
                }

            selected = sorted(
                {i for ids in selection.popular.values() for i in ids} |
                {i for ids in selection.unpopular.values() for i in ids},
            )
            sets = await self.attribute_sets(executor, dataset, selected,
                                             kept)

            def collect(ids):
                return [sets[i] for i in ids if i in sets]

            with self.stage('fpgrowth'):
                groups: ty.Dict[Cell, ty.Tuple[ty.List, ty.List]] = {}
                for cell in selection.cells:
                    groups[cell] = (
                        collect(selection.popular[cell]),
                        collect(selection.unpopular[cell]),
                    )
                for season in selection.seasons:
                    popular, unpopular = selection.pooled(season)
                    groups[(season, POOLED)] = (
                        collect(popular), collect(unpopular),
                    )
                keys = sorted(groups)
                calls = [
                    partial(mine_collection, group, cfg.min_support,
                            cfg.max_itemset_size)
                    for key in keys for group in groups[key]
                ]
                results = await run_in_workers(executor, calls)
                mined = {
                    key: (results[2 * n], results[2 * n + 1])
                    for n, key in enumerate(keys)
                }
                self.stage_rows['fpgrowth'] = {
                    'collections': len(results),
                    'itemsets': sum(len(r.itemsets) for r in results),
                }

            with self.stage('trendmine'):
                log = DiagnosticLog('trendmine')
                self.logs.append(log)
                pooled = {
                    season: groups[(season, POOLED)]
                    for season in selection.seasons
                }
                stats = feature_stats(
                    {s: g[0] for s, g in pooled.items()},
                    {s: g[1] for s, g in pooled.items()},
                    dataset.attributes.vocabulary,
                    log,
                )
                classification = classify(stats, cfg.tau_classic,
                                          cfg.tau_popular, cfg.seasons, log)
                trend = trend_deltas(stats, cfg.flat_band, *cfg.seasons)
                comparisons = {
                    key: frequent_sets_report(*pair)
                    for key, pair in mined.items()
                }
                self.stage_rows['trendmine'] = {
                    'classified': len(classification.classes),
                    'deltas': len(trend),
                }
        finally:
            executor.shutdown(wait=True)

        report = RunReport(
            config=cfg.as_dict(),
            logs=self.logs,
            stage_rows=self.stage_rows,
            noise=noise,
            frequencies=freq,
            selection=selection,
            months=months,
            stats=stats,
            classification=classification,
            trend=trend,
            mined=mined,
            comparisons=comparisons,
            timings=self.timings,
        )
        with self.stage('reports'):
            reports.emit_reports(report, cfg.out_dir)
            reports.emit_plotdata(report, cfg.out_dir)
        self.write_meta()
        return report

    def write_meta(self) -> None:
        meta = {
            'version': VERSION,
            'finished': datetime.datetime.now().isoformat(timespec='seconds'),
            'workers': self.config.workers,
            'min_support': self.config.min_support,
            'timings': self.timings,
        }
        with open(os.path.join(self.config.out_dir, reports.META_FILE), 'w',
                  encoding='utf-8') as f:
            f.write(reports.dump_json(meta))


async def run(config: PipelineConfig) -> RunReport:
    return await PipelineRun(config).run()
