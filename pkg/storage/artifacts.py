"""
Artifact Repository - CSV/JSON outputs of a run.

Every float goes through settings.FLOAT_FORMAT (17 significant digits), so two
runs of the same configuration produce byte-identical files.

Files per run directory:
    moments.csv            time, mean_*, var_*
    mesh_t<t>.csv          id, a_i, b_i, probability, depth_i
    refinement.csv         one row per (check time, element)
    summary.json           RunSummary
    effective_config.toml  the fully resolved configuration
    solution.csv           x, u, element (Burgers only)
    comparison.csv         compare subcommand
"""

import json
import logging
from pathlib import Path

import pandas as pd

from config import settings
from evaluation.metrics.moments import MomentSeries
from tools.structured_outputs import ComparisonRow, RefinementReport, RunSummary

logger = logging.getLogger(__name__)


def _csv(frame: pd.DataFrame, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=settings.FLOAT_FORMAT, lineterminator="\n")
    logger.debug("wrote %s (%d rows)", path, len(frame))
    return path


def mesh_filename(t: float) -> str:
    return f"mesh_t{t:g}.csv"


def write_moments(output_dir: Path, series: MomentSeries) -> Path:
    return _csv(series.to_frame(), Path(output_dir) / "moments.csv")


def read_moments(path: str | Path) -> MomentSeries:
    return MomentSeries.from_frame(pd.read_csv(path))


def write_mesh_snapshots(output_dir: Path, snapshots: dict[float, pd.DataFrame]) -> list[Path]:
    return [_csv(frame, Path(output_dir) / mesh_filename(t)) for t, frame in sorted(snapshots.items())]


def reports_frame(reports: list[RefinementReport], dimension: int) -> pd.DataFrame:
    """Flatten reports to one row per (check time, element)."""
    rows = []
    for report in reports:
        for entry in report.elements:
            row = {
                "time": report.time,
                "element_id": entry.element_id,
                "q": entry.q,
                "q_hat": entry.q_hat,
            }
            for i in range(dimension):
                row[f"s{i}"] = entry.s[i] if i < len(entry.s) else 0.0
            row["criterion"] = report.criterion.value
            row["split"] = int(entry.split)
            row["split_dims"] = ";".join(str(dim) for dim in entry.split_dims)
            row["child_ids"] = ";".join(str(child) for child in entry.child_ids)
            row["skipped"] = entry.skipped_reason or ""
            rows.append(row)
    columns = ["time", "element_id", "q", "q_hat", *[f"s{i}" for i in range(dimension)],
               "criterion", "split", "split_dims", "child_ids", "skipped"]
    return pd.DataFrame(rows, columns=columns)


def write_reports(output_dir: Path, reports: list[RefinementReport], dimension: int) -> Path:
    return _csv(reports_frame(reports, dimension), Path(output_dir) / "refinement.csv")


def write_summary(output_dir: Path, summary: RunSummary) -> Path:
    path = Path(output_dir) / "summary.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = json.loads(summary.model_dump_json())
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_summary(path: str | Path) -> RunSummary:
    return RunSummary.model_validate_json(Path(path).read_text(encoding="utf-8"))


def write_solution(output_dir: Path, solution: pd.DataFrame) -> Path:
    return _csv(solution, Path(output_dir) / "solution.csv")


def write_comparison(output_dir: Path, rows: list[ComparisonRow]) -> Path:
    frame = pd.DataFrame(
        [{**row.model_dump(), "method": row.method.value} for row in rows],
        columns=["label", "method", "n_elements", "n_points", "error"],
    )
    return _csv(frame, Path(output_dir) / "comparison.csv")
