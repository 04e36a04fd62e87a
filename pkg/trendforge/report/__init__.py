import json
import os
import typing as ty

from . import emitters  # noqa: F401
from .base import PLOTS_DIR, registered_emitters, write_emitters  # noqa: F401
from .model import (POOLED, POPULAR_SET, UNPOPULAR_SET,  # noqa: F401
                    FeatureRow, RunReport)

REPORT_FILE = 'report.json'
META_FILE = 'run_meta.json'


def dump_json(data: ty.Any) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + '\n'


def emit_reports(report: RunReport, out_dir: str) -> ty.List[str]:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, REPORT_FILE)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(dump_json(report.as_dict()))
    return [path, *write_emitters(report, out_dir, plots=False)]


def emit_plotdata(report: RunReport, out_dir: str) -> ty.List[str]:
    return write_emitters(report, out_dir, plots=True)
