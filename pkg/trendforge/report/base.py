import abc
import logging
import os
import typing as ty

import pandas as pd

from ..utils import format_number
from .model import RunReport

_LOGGER = logging.getLogger(__name__)
registered_emitters: ty.Dict[str, ty.Type['Emitter']] = {}

PLOTS_DIR = 'plots'


def cell(value: ty.Any) -> ty.Any:
    """CSV cell text: empty for missing values, markers for ratios"""
    if value is None:
        return ''
    if isinstance(value, float):
        return format_number(value)
    return value


class RegisteredEmitter(abc.ABCMeta):
    def __new__(mcs, clsname, superclasses, attributedict):
        newclass = type.__new__(mcs, clsname, superclasses, attributedict)
        # condition to prevent base class registration
        if superclasses and abc.ABC not in superclasses:
            if newclass.NAME is not None:
                registered_emitters[newclass.NAME] = newclass
            assert newclass.FILENAME, f'{clsname} requires FILENAME to be set'
        return newclass


class Emitter(abc.ABC, metaclass=RegisteredEmitter):
    NAME: str = None  # type: ignore
    FILENAME: str = None  # type: ignore
    COLUMNS: ty.Tuple[str, ...] = ()
    PLOT: bool = False

    def __init__(self, report: RunReport) -> None:
        self.report = report

    @property
    def path(self) -> str:
        if self.PLOT:
            return os.path.join(PLOTS_DIR, self.FILENAME)
        return self.FILENAME

    def columns(self) -> ty.List[str]:
        return list(self.COLUMNS)

    @abc.abstractmethod
    def rows(self) -> ty.Iterable[ty.Sequence[ty.Any]]:
        pass

    def frame(self) -> pd.DataFrame:
        data = [[cell(v) for v in row] for row in self.rows()]
        # object dtype keeps integers and the text markers untouched
        return pd.DataFrame(data, columns=self.columns(), dtype=object)

    def write(self, out_dir: str) -> str:
        path = os.path.join(out_dir, self.path)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        frame = self.frame()
        frame.to_csv(path, index=False, lineterminator='\n')
        _LOGGER.debug(f'Wrote {len(frame)} rows to {path}')
        return path


def write_emitters(report: RunReport, out_dir: str,
                   plots: bool) -> ty.List[str]:
    return [
        klass(report).write(out_dir)
        for _, klass in sorted(registered_emitters.items())
        if klass.PLOT == plots
    ]
