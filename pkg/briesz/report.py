"""
Experiment reports and their CSV / JSON renderings.

A CSV report starts with a ``# `` line holding the full experiment
configuration as sorted JSON, followed by the table and a trailing
``# summary`` line. Files are written to a temporary sibling and renamed
into place.
"""

import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

from .field import GridFunction, to_json_dict

logger = logging.getLogger(__name__)


@dataclass
class Report:
    """Table of result rows plus a summary and the producing configuration."""

    kind: str
    table: pd.DataFrame
    summary: Dict[str, Any] = field(default_factory=dict)
    config: Dict[str, Any] = field(default_factory=dict)
    output: Optional[GridFunction] = None

    @property
    def rejected(self) -> pd.DataFrame:
        """Rows carrying a rejection reason."""
        if "reason" not in self.table:
            return self.table.iloc[0:0]
        return self.table[self.table["reason"].fillna("") != ""]


def _plain(value: Any) -> Any:
    """Builtins only, with NaN as None and infinities as the strings 'inf' / '-inf'."""
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


def _dumps(value: Any, **kwargs: Any) -> str:
    return json.dumps(_plain(value), sort_keys=True, allow_nan=False, **kwargs)


def render_csv(report: Report) -> str:
    """CSV text with the config header and the summary trailer."""
    body = report.table.to_csv(index=False, float_format="%.17g", na_rep="nan", lineterminator="\n")
    return f"# {_dumps(report.config)}\n{body}# summary {_dumps(report.summary)}\n"


def render_json(report: Report) -> str:
    """JSON document with config, columns, rows and summary."""
    document = {
        "kind": report.kind,
        "config": report.config,
        "columns": list(report.table.columns),
        "rows": report.table.to_dict(orient="records"),
        "summary": report.summary,
    }
    return _dumps(document, indent=2) + "\n"


def render(report: Report, fmt: str = "csv") -> str:
    if fmt == "csv":
        return render_csv(report)
    if fmt == "json":
        return render_json(report)
    raise ValueError(f"Unknown report format {fmt}")


def write_atomic(text: str, path: Union[str, Path]) -> Path:
    """Write text to a temporary file next to ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.info(f"Wrote {path}")
    return path


def write_report(report: Report, path: Optional[Union[str, Path]] = None, fmt: str = "csv") -> Optional[Path]:
    """
    Emit a report.

    Args:
        report: Report to write
        path: Destination file; stdout when None
        fmt: 'csv' or 'json'

    Returns:
        The written path, or None for stdout
    """
    if report.output is not None:
        text = _dumps(to_json_dict(report.output)) + "\n"
    else:
        text = render(report, fmt)
    if path is None:
        sys.stdout.write(text)
        return None
    return write_atomic(text, path)
