"""Scoring flagged cells against hand-labelled ground truth.

Some inconsistencies come as a pair of mutually conflicting formula
groups where no label can say which side is wrong; credit for those is
capped at the smaller side's size no matter how many cells get flagged.
A random-guessing baseline (drawing the same number of cells without
replacement) anchors an adjusted precision.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .model import CellKind, FormatError, GridlintError, Rect, parse_a1
from .vectors import SheetVectors

Cell = tuple[int, int]


class DomainError(GridlintError):
    """A baseline parameter is outside its valid range."""


@dataclass(frozen=True)
class BugDual:
    """Two internally consistent but mutually conflicting cell groups."""

    c1: frozenset
    c2: frozenset

    def __post_init__(self):
        if not self.c1 or not self.c2:
            raise FormatError("dual sides must be nonempty")
        if self.c1 & self.c2:
            raise FormatError("dual sides must be disjoint")

    @property
    def cells(self) -> frozenset:
        return self.c1 | self.c2

    @property
    def cap(self) -> int:
        return min(len(self.c1), len(self.c2))


@dataclass(frozen=True)
class SheetTruth:
    errors: frozenset
    duals: tuple[BugDual, ...]
    not_bugs: frozenset

    def __post_init__(self):
        for dual in self.duals:
            if not dual.cells <= self.errors:
                raise FormatError("every dual cell must also be listed as an error")

    @property
    def capped_error_count(self) -> int:
        """Total credit available: plain errors plus each dual's cap."""
        dual_cells = frozenset().union(*(d.cells for d in self.duals)) if self.duals else frozenset()
        return len(self.errors - dual_cells) + sum(d.cap for d in self.duals)


@dataclass(frozen=True)
class GroundTruth:
    workbook: str
    sheets: Mapping[str, SheetTruth]


@dataclass(frozen=True)
class EvalResult:
    tp: int
    fp: int
    fn: int
    flagged: int
    precision: float
    recall: float
    expected_random_tp: float
    adjusted_precision: float


def count_true_positives(flagged: Iterable[Cell], truth: SheetTruth) -> int:
    flagged_set = set(flagged)
    dual_cells = set()
    for d in truth.duals:
        dual_cells |= d.cells
    tp = sum(1 for c in flagged_set if c in truth.errors and c not in dual_cells)
    for d in truth.duals:
        tp += min(len(flagged_set & d.cells), d.cap)
    return tp


def precision_recall(tp: int, fp: int, fn: int, flagged: int, truth_error_count: int) -> tuple[float, float]:
    if flagged == 0:
        precision = 1.0
    elif truth_error_count == 0:
        precision = 0.0
    else:
        precision = tp / (tp + fp)
    recall = 1.0 if tp + fn == 0 else tp / (tp + fn)
    return precision, recall


def expected_random_tp(m: int, r: int, n: int) -> float:
    """Mean true positives when n of m cells are flagged blindly.

    Drawing without replacement is hypergeometric; its mean is n*r/m.
    """
    if m < 1:
        raise DomainError(f"total cells {m} must be at least 1")
    if n < 0 or r < 0 or n > m or r > m:
        raise DomainError(f"need 0 <= flagged {n} <= {m} and 0 <= errors {r} <= {m}")
    return n * r / m


def adjusted_precision(tp: int, fp: int, flagged: int, expected: float) -> float:
    if flagged == 0:
        return 1.0
    adjusted_tp = tp - expected
    return min(1.0, max(0.0, adjusted_tp / flagged))


def evaluate_sheet(flagged: Iterable[Cell], truth: SheetTruth, total_cells: int) -> EvalResult:
    flagged_set = set(flagged)
    tp = count_true_positives(flagged_set, truth)
    capped = truth.capped_error_count
    fp = len(flagged_set) - tp
    fn = capped - tp
    precision, recall = precision_recall(tp, fp, fn, len(flagged_set), capped)
    expected = expected_random_tp(total_cells, min(capped, total_cells), min(len(flagged_set), total_cells))
    adjusted = adjusted_precision(tp, fp, len(flagged_set), expected)
    return EvalResult(tp, fp, fn, len(flagged_set), precision, recall, expected, adjusted)


# --- layout statistics ---


def _connected_clusters(table: SheetVectors) -> list[tuple[frozenset, tuple]]:
    """Maximal edge-connected same-fingerprint cell sets, skipping blanks.

    Returns (cells, fingerprint) pairs; deterministic order."""
    rect = table.rect
    seen: set[Cell] = set()
    clusters: list[tuple[frozenset, tuple]] = []
    for y in range(rect.top, rect.bottom + 1):
        for x in range(rect.left, rect.right + 1):
            if (x, y) in seen or table.kind(x, y) is CellKind.EMPTY:
                continue
            fp = table.fingerprint(x, y)
            stack = [(x, y)]
            members = set()
            while stack:
                cx, cy = stack.pop()
                if (cx, cy) in members:
                    continue
                members.add((cx, cy))
                for nx, ny in ((cx + 1, cy), (cx - 1, cy), (cx, cy + 1), (cx, cy - 1)):
                    if (
                        rect.contains(nx, ny)
                        and (nx, ny) not in members
                        and table.kind(nx, ny) is not CellKind.EMPTY
                        and table.fingerprint(nx, ny) == fp
                    ):
                        stack.append((nx, ny))
            seen |= members
            clusters.append((frozenset(members), fp))
    return clusters


def _is_rectangular(cells: frozenset) -> bool:
    left = min(c[0] for c in cells)
    right = max(c[0] for c in cells)
    top = min(c[1] for c in cells)
    bottom = max(c[1] for c in cells)
    return Rect(left, top, right, bottom).area == len(cells)


def rectangularity_stats(tables: Sequence[SheetVectors]) -> tuple[Optional[float], Optional[float]]:
    """(rectangular fraction of all content clusters, of formula-only
    clusters); None when a denominator is empty."""
    all_total = all_rect = 0
    formula_total = formula_rect = 0
    for table in tables:
        for cells, _fp in _connected_clusters(table):
            rectangular = _is_rectangular(cells)
            all_total += 1
            all_rect += rectangular
            if all(table.kind(x, y) is CellKind.FORMULA for x, y in cells):
                formula_total += 1
                formula_rect += rectangular
    frac_all = all_rect / all_total if all_total else None
    frac_formula = formula_rect / formula_total if formula_total else None
    return frac_all, frac_formula


def collision_rate(tables: Sequence[SheetVectors]) -> float:
    """Fraction of same-fingerprint formula pairs whose reference-vector
    sets differ (the fingerprint sum hides a real shape difference)."""
    groups: dict[tuple, list[frozenset]] = {}
    for table in tables:
        for key, kind in sorted(table.kinds.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            if kind is not CellKind.FORMULA:
                continue
            vec_set = frozenset(table.vectors.get(key, ()))
            groups.setdefault(table.fingerprint(*key), []).append(vec_set)
    pairs = 0
    collisions = 0
    for members in groups.values():
        k = len(members)
        if k < 2:
            continue
        for i in range(k):
            for j in range(i + 1, k):
                pairs += 1
                if members[i] != members[j]:
                    collisions += 1
    return collisions / pairs if pairs else 0.0


# --- annotation file handling ---


def _parse_cell_list(values, where: str) -> frozenset:
    if not isinstance(values, list):
        raise FormatError(f"{where} must be a list of cell names")
    out = set()
    for v in values:
        if not isinstance(v, str):
            raise FormatError(f"{where} entries must be strings")
        out.add(parse_a1(v))
    return frozenset(out)


def parse_annotations(data: dict) -> GroundTruth:
    if not isinstance(data, dict) or "workbook" not in data or "sheets" not in data:
        raise FormatError("annotations must be an object with workbook and sheets")
    if not isinstance(data["workbook"], str):
        raise FormatError("workbook must be a string")
    sheets_raw = data["sheets"]
    if not isinstance(sheets_raw, dict):
        raise FormatError("sheets must be an object keyed by sheet name")
    sheets: dict[str, SheetTruth] = {}
    for name, body in sheets_raw.items():
        if not isinstance(body, dict):
            raise FormatError(f"sheet {name!r} annotations must be an object")
        errors = _parse_cell_list(body.get("errors", []), f"{name}.errors")
        not_bugs = _parse_cell_list(body.get("not_bugs", []), f"{name}.not_bugs")
        duals = []
        for i, dual_raw in enumerate(body.get("duals", [])):
            if not isinstance(dual_raw, dict):
                raise FormatError(f"{name}.duals[{i}] must be an object")
            duals.append(
                BugDual(
                    _parse_cell_list(dual_raw.get("c1", []), f"{name}.duals[{i}].c1"),
                    _parse_cell_list(dual_raw.get("c2", []), f"{name}.duals[{i}].c2"),
                )
            )
        sheets[name] = SheetTruth(errors, tuple(duals), not_bugs)
    return GroundTruth(data["workbook"], sheets)


def load_annotations(path) -> GroundTruth:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid annotation JSON: {exc}") from exc
    return parse_annotations(data)


def evaluate_report(report: dict, truth: GroundTruth) -> dict:
    """Score an audit report against annotations; JSON-ready result.

    The report's workbook name must match the annotations'.
    """
    if not isinstance(report, dict) or "workbook" not in report or "sheets" not in report:
        raise FormatError("report must be an audit payload with workbook and sheets")
    if report["workbook"] != truth.workbook:
        raise FormatError(
            f"workbook mismatch: report {report['workbook']!r} vs annotations {truth.workbook!r}"
        )
    sheet_results = []
    totals = {"tp": 0, "fp": 0, "fn": 0, "flagged": 0}
    expected_total = 0.0
    for sheet in report["sheets"]:
        name = sheet["sheet"]
        sheet_truth = truth.sheets.get(name, SheetTruth(frozenset(), (), frozenset()))
        flagged = set()
        for fix in sheet.get("fixes", []):
            for cell_name in fix.get("source", []):
                flagged.add(parse_a1(cell_name))
        total_cells = max(1, int(sheet.get("cells", 0)))
        result = evaluate_sheet(flagged, sheet_truth, total_cells)
        totals["tp"] += result.tp
        totals["fp"] += result.fp
        totals["fn"] += result.fn
        totals["flagged"] += result.flagged
        expected_total += result.expected_random_tp
        sheet_results.append(
            {
                "sheet": name,
                "tp": result.tp,
                "fp": result.fp,
                "fn": result.fn,
                "flagged": result.flagged,
                "precision": result.precision,
                "recall": result.recall,
                "expected_random_tp": result.expected_random_tp,
                "adjusted_precision": result.adjusted_precision,
            }
        )
    truth_total = sum(t.capped_error_count for t in truth.sheets.values())
    precision, recall = precision_recall(
        totals["tp"], totals["fp"], totals["fn"], totals["flagged"], truth_total
    )
    overall = {
        "tp": totals["tp"],
        "fp": totals["fp"],
        "fn": totals["fn"],
        "flagged": totals["flagged"],
        "precision": precision,
        "recall": recall,
        "expected_random_tp": expected_total,
        "adjusted_precision": adjusted_precision(
            totals["tp"], totals["fp"], totals["flagged"], expected_total
        ),
    }
    return {"workbook": truth.workbook, "sheets": sheet_results, "overall": overall}
