"""Whole-workbook analysis: vectors -> regions -> ranked fixes, timed.

Each sheet is processed independently; coordinates in results are sheet
coordinates (column, row), not positions within the used range.
"""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Optional

from .entropy import Region, decompose_grid
from .fixes import ProposedFix, build_fixes
from .grid import FingerprintGrid
from .model import Rect, Workbook, Worksheet
from .report import audit_sheet_payload, audit_workbook_payload
from .vectors import SheetVectors, analyze_sheet_vectors

PHASES = ("parse", "vectors", "decomposition", "fixes")


@dataclass(frozen=True)
class AnalysisConfig:
    threshold: float = 0.05
    preprocess: bool = True
    jobs: int = field(default_factory=lambda: os.cpu_count() or 1)
    fmt: str = "json"

    def __post_init__(self):
        if not 0 < self.threshold <= 1:
            raise ValueError(f"threshold {self.threshold} must be in (0, 1]")
        if self.jobs < 1:
            raise ValueError(f"jobs {self.jobs} must be at least 1")
        if self.fmt not in ("json", "text"):
            raise ValueError(f"format {self.fmt!r} must be json or text")


@dataclass
class SheetAnalysis:
    name: str
    table: SheetVectors
    regions: list[Region]
    fixes: list[ProposedFix]
    cells: int
    timings: dict[str, float]


@dataclass
class WorkbookAnalysis:
    name: str
    sheets: list[SheetAnalysis]
    timings: dict[str, float]

    def total_regions(self) -> int:
        return sum(len(s.regions) for s in self.sheets)

    def total_fixes(self) -> int:
        return sum(len(s.fixes) for s in self.sheets)


def grid_from_table(table: SheetVectors) -> FingerprintGrid:
    """Used range re-based to (1, 1) for decomposition."""
    rect = table.rect
    cells = {
        (x, y): table.fingerprint(rect.left + x - 1, rect.top + y - 1)
        for y in range(1, rect.height + 1)
        for x in range(1, rect.width + 1)
    }
    return FingerprintGrid(rect.width, rect.height, cells)


def _to_sheet_coords(region: Region, rect: Rect) -> Region:
    r = region.rect
    return Region(
        Rect(
            r.left + rect.left - 1,
            r.top + rect.top - 1,
            r.right + rect.left - 1,
            r.bottom + rect.top - 1,
        ),
        region.fingerprint,
    )


def analyze_sheet(workbook: Workbook, sheet: Worksheet, config: Optional[AnalysisConfig] = None) -> SheetAnalysis:
    config = config or AnalysisConfig()
    timings = {}
    if not sheet.cells:
        # Nothing on the sheet: empty table over a placeholder 1x1 range.
        table = SheetVectors(sheet.name, workbook.name, Rect(1, 1, 1, 1), {}, {}, {}, {}, {})
        timings.update({"vectors": 0.0, "decomposition": 0.0, "fixes": 0.0})
        return SheetAnalysis(sheet.name, table, [], [], 0, timings)
    t0 = time.perf_counter()
    table = analyze_sheet_vectors(workbook, sheet)
    timings["vectors"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    grid = grid_from_table(table)
    local = decompose_grid(grid, preprocess=config.preprocess, jobs=config.jobs)
    regions = [_to_sheet_coords(r, table.rect) for r in local]
    timings["decomposition"] = time.perf_counter() - t0
    t0 = time.perf_counter()
    fixes = build_fixes(table, regions, table.rect.area, config.threshold)
    timings["fixes"] = time.perf_counter() - t0
    return SheetAnalysis(sheet.name, table, regions, fixes, table.rect.area, timings)


def analyze_workbook(workbook: Workbook, config: Optional[AnalysisConfig] = None,
                     parse_seconds: float = 0.0) -> WorkbookAnalysis:
    config = config or AnalysisConfig()
    sheets = [analyze_sheet(workbook, sheet, config) for sheet in workbook.sheets]
    timings = {"parse": parse_seconds}
    for phase in ("vectors", "decomposition", "fixes"):
        timings[phase] = sum(s.timings.get(phase, 0.0) for s in sheets)
    return WorkbookAnalysis(workbook.name, sheets, timings)


def audit_payload(analysis: WorkbookAnalysis, threshold: float) -> dict:
    per_sheet = [
        audit_sheet_payload(s.name, s.fixes, threshold, s.cells) for s in analysis.sheets
    ]
    return audit_workbook_payload(analysis.name, threshold, per_sheet)
