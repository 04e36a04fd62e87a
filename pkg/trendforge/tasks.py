import asyncio as aio
import logging
import os
import typing as ty
from concurrent.futures import Executor, ThreadPoolExecutor

from .exceptions import ConfigError

_LOGGER = logging.getLogger(__name__)

THREADS_ENV = 'TRENDFORGE_THREADS'

T = ty.TypeVar('T')


def worker_count(environ: ty.Optional[ty.Mapping[str, str]] = None) -> int:
    environ = os.environ if environ is None else environ
    raw = environ.get(THREADS_ENV)
    if not raw:
        return max(os.cpu_count() or 1, 1)
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError([f'{THREADS_ENV} must be a positive integer'])
    if value < 1:
        raise ConfigError([f'{THREADS_ENV} must be a positive integer'])
    return value


def make_executor(workers: int) -> ThreadPoolExecutor:
    return ThreadPoolExecutor(
        max_workers=workers,
        thread_name_prefix='trendforge',
    )


async def run_tasks_and_cancel_on_first_return(
        *tasks: aio.Future,
        return_when=aio.FIRST_EXCEPTION,
) -> ty.Sequence[aio.Future]:
    async def cancel_tasks(_tasks) -> ty.List[aio.Future]:
        # cancel first, then await. Other tasks can raise exceptions
        # while switching tasks
        canceled = []
        for t in _tasks:
            if not t.done():
                t.cancel()
                canceled.append(t)
        tasks_raise_exceptions = []
        for t in canceled:
            try:
                await t
            except aio.CancelledError:
                pass
            except Exception:
                _LOGGER.exception(
                    f'Unexpected exception while cancelling tasks! {t}',
                )
                tasks_raise_exceptions.append(t)
        return tasks_raise_exceptions

    assert all(isinstance(t, aio.Future) for t in tasks)
    try:
        done, pending = await aio.wait(tasks, return_when=return_when)
    except aio.CancelledError:
        await cancel_tasks(tasks)
        raise

    await cancel_tasks(pending)

    task_remains = [t for t in pending if not t.cancelled()]
    return [*done, *task_remains]


async def handle_returned_tasks(*tasks: aio.Future) -> ty.List[ty.Any]:
    """
    Re-raise the first failure, otherwise return results in the order
    the tasks were given
    """
    raised = [t for t in tasks if t.done() and not t.cancelled() and
              t.exception()]
    if raised:
        task_for_raise = raised.pop(0)
        for t in raised:
            try:
                await t
            except aio.CancelledError:
                raise
            except Exception:
                _LOGGER.exception('Task raised an error')
        await task_for_raise
    return [await t for t in tasks]


async def run_in_workers(
        executor: Executor,
        calls: ty.Sequence[ty.Callable[[], T]],
) -> ty.List[T]:
    if not calls:
        return []
    loop = aio.get_running_loop()
    futs = [loop.run_in_executor(executor, call) for call in calls]
    await run_tasks_and_cancel_on_first_return(*futs)
    return await handle_returned_tasks(*futs)


def chunked(seq: ty.Sequence[T], parts: int) -> ty.List[ty.Sequence[T]]:
    parts = max(1, min(parts, len(seq)))
    size, rest = divmod(len(seq), parts)
    chunks = []
    start = 0
    for i in range(parts):
        end = start + size + (1 if i < rest else 0)
        chunks.append(seq[start:end])
        start = end
    return [c for c in chunks if len(c)]
