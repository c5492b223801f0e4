# symchain/utils/io.py
import json
import logging
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
import pandas as pd

from symchain import __version__
from symchain.exceptions import GridMismatch
from symchain.models.chain import DensityTrace
from symchain.models.run import CompareReport, Manifest, RunSpec

logger = logging.getLogger("symchain.io")


def _plain(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


class ArtifactWriter:
    """Writes CSV and JSON files under one output directory and remembers their names."""

    def __init__(self, output_dir: str):
        self.root = Path(output_dir)
        self.root.mkdir(parents=True, exist_ok=True)
        self.outputs: List[str] = []

    def csv(self, name: str, frame: pd.DataFrame) -> Path:
        path = self.root / name
        frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
        self.outputs.append(name)
        logger.info("Wrote %s (%d rows)", path, len(frame))
        return path

    def json(self, name: str, payload: Dict[str, Any]) -> Path:
        path = self.root / name
        path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_plain) + "\n")
        self.outputs.append(name)
        logger.info("Wrote %s", path)
        return path

    def manifest(self, spec: RunSpec) -> Path:
        return write_manifest(self.root, spec, self.outputs)


def traces_frame(*traces: DensityTrace) -> pd.DataFrame:
    """Columns t and one per trace label; all traces must share a grid."""
    grid = traces[0].grid
    frame = pd.DataFrame({"t": grid.points})
    for trace in traces:
        if trace.grid != grid:
            raise GridMismatch()
        frame[trace.label] = trace.values
    return frame


def write_manifest(root: Path, spec: RunSpec, outputs: List[str]) -> Path:
    inputs = spec.model_dump(by_alias=True, exclude={"command", "tol", "quad_tol", "series_tol", "seed"}, exclude_none=True)
    manifest = Manifest(
        command=spec.command,
        version=__version__,
        inputs=inputs,
        tolerances=spec.tolerances(),
        overrides=spec.overrides(),
        seed=spec.seed if spec.command == "simulate" else None,
        outputs=sorted(outputs),
    )
    path = Path(root) / "manifest.json"
    path.write_text(json.dumps(manifest.model_dump(), indent=2, sort_keys=True) + "\n")
    return path


def compare_report(trace_a: DensityTrace, trace_b: DensityTrace, tol: float) -> CompareReport:
    """Largest absolute difference between two traces on one grid, and where it occurs."""
    if trace_a.grid != trace_b.grid:
        raise GridMismatch()
    diff = np.abs(trace_a.values - trace_b.values)
    worst = int(np.argmax(diff))
    return CompareReport(
        max_abs_diff=float(diff[worst]),
        argmax_t=float(trace_a.grid.points[worst]),
        passed=bool(diff[worst] <= tol),
    )
