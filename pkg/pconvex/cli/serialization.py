"""
Result emission: CSV tables, JSON documents and the run manifest written next
to every output file.

CSV files are UTF-8 with LF line endings and a header row; floats carry 17
significant digits. Data files hold no wall-clock values, so identical seeds
and flags give byte-identical files.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, TextIO, Union

from pconvex.exceptions import OutputError
from pconvex.models.files import write_json
from pconvex.models.reports import RunManifest
from pconvex.utils.helpers import format_float, get_current_timestamp

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
MANIFEST_SUFFIX = ".manifest.json"


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    return str(value)


def write_csv_rows(handle: TextIO, columns: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> None:
    writer = csv.writer(handle, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_cell(row.get(column)) for column in columns])


def write_csv(path: PathLike, columns: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> None:
    """Write rows (dicts keyed by column) as CSV."""
    path = Path(path)
    try:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            write_csv_rows(handle, columns, rows)
    except OSError as e:
        raise OutputError(str(path), original_error=e) from e


def manifest_path(path: PathLike) -> Path:
    path = Path(path)
    return path.with_name(path.name + MANIFEST_SUFFIX)


def build_manifest(command: str, parameters: Dict[str, Any], seed: Optional[int], run_id: str,
                   outputs: List[str]) -> RunManifest:
    return RunManifest(
        command=command,
        parameters=parameters,
        seed=seed,
        run_id=run_id,
        timestamp=get_current_timestamp().isoformat(),
        outputs=outputs,
    )


def write_manifest(path: PathLike, manifest: RunManifest) -> Path:
    """Write the manifest that accompanies the output file at path."""
    target = manifest_path(path)
    write_json(target, manifest.model_dump())
    logger.debug(f"Manifest written to {target}")
    return target


def write_output(path: PathLike, fmt: str, columns: Sequence[str], rows: List[Dict[str, Any]],
                 manifest: RunManifest) -> None:
    """
    Write an experiment table as CSV or JSON together with its manifest.

    Args:
        path: Output file
        fmt: "csv" or "json"
        columns: Column order
        rows: Table rows
        manifest: Manifest for this run
    """
    if fmt == "csv":
        write_csv(path, columns, rows)
    else:
        write_json(path, {"columns": list(columns), "rows": [
            {column: row.get(column) for column in columns} for row in rows]})
    write_manifest(path, manifest)
    logger.info(f"Wrote {len(rows)} rows to {path}")


def emit_table(stream: TextIO, fmt: str, columns: Sequence[str], rows: List[Dict[str, Any]]) -> None:
    """Print an experiment table on stdout."""
    if fmt == "csv":
        write_csv_rows(stream, columns, rows)
    else:
        emit_json(stream, {"columns": list(columns), "rows": [
            {column: row.get(column) for column in columns} for row in rows]})


def emit_json(stream: TextIO, payload: Any) -> None:
    stream.write(json.dumps(payload, indent=2, allow_nan=False) + "\n")
