"""
CSV and JSON writers for grids, scans, wavefunctions and reports.

CSV files start with '#' metadata lines, then a header row naming each
column with its SI unit, ',' separated with '.' decimals.
"""
import json
import logging
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np
import pyarrow as pa
from pyarrow import csv

from spdc_herald.globals import format_version
from spdc_herald.joint_amplitude import IntensityMap, JointAmplitude
from spdc_herald.toy_model import Wavefunction1D

Grid = Union[JointAmplitude, IntensityMap]


def _column_name(tag: str, units: str) -> str:
    return f"{tag} [{units}]"


def grid_columns(grid: Grid) -> Dict[str, np.ndarray]:
    """Long format, one row per grid point, x major."""
    x, y = np.meshgrid(
        grid.axis_x.samples, grid.axis_y.samples, indexing="ij"
    )
    columns = {
        _column_name(grid.axis_x.tag, grid.axis_x.units): x.ravel(),
        _column_name(grid.axis_y.tag, grid.axis_y.units): y.ravel(),
    }
    if isinstance(grid, JointAmplitude):
        columns["re"] = grid.values.real.ravel()
        columns["im"] = grid.values.imag.ravel()
        columns["intensity"] = grid.intensity.ravel()
    else:
        columns["intensity"] = grid.values.ravel()
    return columns


def grid_document(grid: Grid) -> Dict[str, object]:
    doc = {
        "axis_x": _axis_document(grid.axis_x),
        "axis_y": _axis_document(grid.axis_y),
        "metadata": dict(grid.metadata),
    }
    if isinstance(grid, JointAmplitude):
        doc["re"] = grid.values.real.tolist()
        doc["im"] = grid.values.imag.tolist()
    else:
        doc["intensity"] = grid.values.tolist()
    return doc


def _axis_document(axis) -> Dict[str, object]:
    return {
        "tag": axis.tag,
        "units": axis.units,
        "samples": axis.samples.tolist(),
    }


def scan_columns(
    scan: Sequence[Tuple[float, float]], name: str, units: str
) -> Dict[str, np.ndarray]:
    return {
        _column_name(name, units): np.array([p[0] for p in scan]),
        "purity": np.array([p[1] for p in scan]),
    }


def wavefunction_columns(psi: Wavefunction1D) -> Dict[str, np.ndarray]:
    units = "m" if psi.domain == "position" else "rad/m"
    name = "x" if psi.domain == "position" else "k"
    return {
        _column_name(name, units): psi.grid,
        "re": psi.samples.real,
        "im": psi.samples.imag,
        "abs2": psi.intensity,
    }


def _comment_lines(metadata: Dict[str, object]) -> str:
    lines = [f"# format_version: {format_version}"]
    for key in sorted(metadata):
        lines.append(f"# {key}: {metadata[key]}")
    return "\n".join(lines) + "\n"


def write_csv(
    path: Union[str, Path],
    columns: Dict[str, np.ndarray],
    metadata: Optional[Dict[str, object]] = None,
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table = pa.table(
        {name: pa.array(np.asarray(v)) for name, v in columns.items()}
    )
    with open(path, "wb") as f:
        f.write(_comment_lines(metadata or {}).encode("utf-8"))
        csv.write_csv(table, f)
    logging.info("wrote {} rows to {}".format(table.num_rows, path))
    return path


def json_text(doc: Dict[str, object], stamp: bool = True) -> str:
    if stamp:
        doc = dict(doc, format_version=format_version)
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def write_json(
    path: Union[str, Path], doc: Dict[str, object], stamp: bool = True
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(json_text(doc, stamp))
    logging.info("wrote {}".format(path))
    return path
