"""
Storage Package - run artifacts on disk.
"""

from storage.artifacts import (
    mesh_filename,
    read_moments,
    read_summary,
    reports_frame,
    write_comparison,
    write_mesh_snapshots,
    write_moments,
    write_reports,
    write_solution,
    write_summary,
)

__all__ = [
    "mesh_filename",
    "read_moments",
    "read_summary",
    "reports_frame",
    "write_comparison",
    "write_mesh_snapshots",
    "write_moments",
    "write_reports",
    "write_solution",
    "write_summary",
]
