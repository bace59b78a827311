"""CSV / JSON serialization of sweep results."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import IO, Iterable

from .config import SimConfig
from .runner import RunResult

CSV_COLUMNS = ("run", "snr_db", "n_blocks", "mode", "pdp", "nmse", "phase_error", "ser", "elapsed_s")


def _record(r: RunResult, timing: bool) -> dict:
    rec = {c: getattr(r, c) for c in CSV_COLUMNS}
    if not timing:
        rec["elapsed_s"] = None
    return rec


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)  # shortest round-trip form
    return str(value)


def render(results: Iterable[RunResult], fmt: str, config: SimConfig | None = None, timing: bool = True) -> str:
    records = [_record(r, timing) for r in results]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow([_cell(rec[c]) for c in CSV_COLUMNS])
        return buf.getvalue()
    if fmt == "json":
        for rec in records:
            for k, v in rec.items():
                if isinstance(v, float) and not math.isfinite(v):
                    rec[k] = None
        doc = {"config": config.to_dict() if config is not None else None, "results": records}
        return json.dumps(doc, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit(results: Iterable[RunResult], fmt: str, destination: str | Path | IO[str] | None = None,
         config: SimConfig | None = None, timing: bool = True) -> None:
    """Write results as CSV or JSON to a path, an open text stream, or stdout.

    With ``timing=False`` the ``elapsed_s`` field is left blank so the output
    is a pure function of the configuration.
    """
    text = render(results, fmt, config, timing)
    if destination is None:
        sys.stdout.write(text)
    elif hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_text(text)
