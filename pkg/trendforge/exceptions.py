import contextlib
import logging
import typing as ty

_LOGGER = logging.getLogger(__name__)


class TrendforgeError(Exception):
    pass


class ConfigError(TrendforgeError):
    def __init__(self, errors: ty.Sequence[str]) -> None:
        self.errors = list(errors)
        super().__init__('; '.join(self.errors))


class DataError(TrendforgeError):
    def __init__(self, message: str, source: ty.Optional[str] = None):
        self.source = source
        if source:
            message = f'{source}: {message}'
        super().__init__(message)


class StageError(DataError):
    def __init__(self, stage: str, cause: BaseException) -> None:
        self.stage = stage
        self.cause = cause
        super().__init__(f'stage {stage} failed: {cause}')


class PreconditionError(TrendforgeError, ValueError):
    pass


# errors that abort a pipeline stage, everything else is a bug
ListOfStageErrors = (
    DataError,
    PreconditionError,
    OSError,
    UnicodeDecodeError,
)


@contextlib.contextmanager
def handle_stage_errors(stage: str):
    try:
        yield
    except StageError:
        raise
    except ListOfStageErrors as e:
        _LOGGER.error(f'Stage {stage} aborted: {e}')
        raise StageError(stage, e) from e
