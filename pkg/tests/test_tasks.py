import asyncio as aio
import os

import pytest

from trendforge.exceptions import ConfigError, DataError
from trendforge.tasks import (THREADS_ENV, chunked, make_executor,
                              run_in_workers, worker_count)


class TestWorkerCount:
    def test_default(self):
        assert worker_count({}) == max(os.cpu_count() or 1, 1)

    def test_env(self):
        assert worker_count({THREADS_ENV: '3'}) == 3

    @pytest.mark.parametrize('value', ['0', '-2', 'four'])
    def test_invalid(self, value):
        with pytest.raises(ConfigError):
            worker_count({THREADS_ENV: value})


class TestChunked:
    def test_balanced(self):
        assert chunked(list(range(7)), 3) == [[0, 1, 2], [3, 4], [5, 6]]

    def test_more_parts_than_items(self):
        assert chunked([1, 2], 8) == [[1], [2]]

    def test_empty(self):
        assert chunked([], 4) == []

    def test_preserves_order(self):
        seq = tuple(range(100))
        parts = chunked(seq, 7)
        assert len(parts) == 7
        assert sum(parts, ()) == seq


class TestRunInWorkers:
    def test_results_in_call_order(self):
        executor = make_executor(4)
        calls = [lambda n=n: n * n for n in range(10)]
        try:
            assert aio.run(run_in_workers(executor, calls)) == \
                [n * n for n in range(10)]
        finally:
            executor.shutdown()

    def test_no_calls(self):
        executor = make_executor(1)
        try:
            assert aio.run(run_in_workers(executor, [])) == []
        finally:
            executor.shutdown()

    def test_failure_is_raised(self):
        def fail():
            raise DataError('broken partition')

        executor = make_executor(2)
        try:
            with pytest.raises(DataError, match='broken partition'):
                aio.run(run_in_workers(executor, [lambda: 1, fail]))
        finally:
            executor.shutdown()
