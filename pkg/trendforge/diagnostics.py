import logging
import typing as ty
from collections import Counter
from dataclasses import dataclass
from enum import Enum

_LOGGER = logging.getLogger(__name__)


class Severity(Enum):
    WARNING = 'warning'
    FATAL = 'fatal'


class RowOutcome(Enum):
    KEPT = 'kept'
    DROPPED = 'dropped'
    REJECTED = 'rejected'


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    source: str
    row: int  # 1-based data row, 0 for file-level messages
    message: str

    def as_dict(self):
        return {
            'severity': self.severity.value,
            'source': self.source,
            'row': self.row,
            'message': self.message,
        }

    def __str__(self):
        where = f'{self.source}:{self.row}' if self.row else self.source
        return f'[{self.severity.value}] {where}: {self.message}'


class DiagnosticLog:
    """
    Collects row diagnostics of a single source together with the row
    outcome counters used for the conservation check
    """

    def __init__(self, source: str) -> None:
        self.source = source
        self.diagnostics: ty.List[Diagnostic] = []
        self.outcomes: ty.Counter[RowOutcome] = Counter()

    def warning(self, row: int, message: str) -> None:
        self._add(Severity.WARNING, row, message)

    def fatal(self, row: int, message: str) -> None:
        self._add(Severity.FATAL, row, message)

    def _add(self, severity: Severity, row: int, message: str) -> None:
        diagnostic = Diagnostic(severity, self.source, row, message)
        _LOGGER.debug(str(diagnostic))
        self.diagnostics.append(diagnostic)

    def count_row(self, outcome: RowOutcome) -> None:
        self.outcomes[outcome] += 1

    @property
    def kept(self) -> int:
        return self.outcomes[RowOutcome.KEPT]

    @property
    def dropped(self) -> int:
        return self.outcomes[RowOutcome.DROPPED]

    @property
    def rejected(self) -> int:
        return self.outcomes[RowOutcome.REJECTED]

    @property
    def rows(self) -> int:
        return sum(self.outcomes.values())

    @property
    def warnings(self) -> ty.List[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == Severity.WARNING]

    @property
    def fatals(self) -> ty.List[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == Severity.FATAL]

    def log_summary(self) -> None:
        _LOGGER.info(
            f'{self.source}: {self.rows} rows, kept {self.kept}, '
            f'dropped {self.dropped}, rejected {self.rejected}',
        )
        if self.diagnostics:
            _LOGGER.warning(
                f'{self.source}: {len(self.warnings)} warnings, '
                f'{len(self.fatals)} fatal diagnostics',
            )

    def summary(self) -> ty.Dict[str, int]:
        return {
            'rows': self.rows,
            'kept': self.kept,
            'dropped': self.dropped,
            'rejected': self.rejected,
            'warnings': len(self.warnings),
            'fatal': len(self.fatals),
        }

    def __iter__(self):
        return iter(self.diagnostics)

    def __len__(self):
        return len(self.diagnostics)
