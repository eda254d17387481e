"""Turns each cell into a small numeric summary of its reference shape.

Every formula reference becomes an offset vector (dx, dy, dz, dc):

* on-sheet relative references store the offset from the formula's own cell,
* on-sheet absolute anchors store the offset from the sheet origin (A1),
* off-sheet references set dz = 1 and use the origin rule for dx, dy,
* dc marks constants and is 0 for references themselves.

A cell's fingerprint is the componentwise sum of its vectors, with the
constant slot replaced by a presence flag.  Data cells collapse to fixed
null vectors so that layout structure survives in the grid:

    number -> (0, 0, 0, 1)    text -> (0, 0, 0, -1)    empty -> (0, 0, 0, 0)

The location fingerprint sums the absolute coordinates of the referents
instead, and is used to measure how far a proposed rewrite moves them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .formula import (
    FormulaParseError,
    RangeTooLargeError,
    RawReference,
    numeric_constant_count,
    parse_formula,
    references,
)
from .model import CellAddress, CellKind, Rect, Workbook, Worksheet, to_a1


class RefVector(NamedTuple):
    dx: int
    dy: int
    dz: int
    dc: int


class Fingerprint(NamedTuple):
    x: int
    y: int
    z: int
    c: int


class LocFingerprint(NamedTuple):
    x: int
    y: int
    z: int


NUMBER_FINGERPRINT = Fingerprint(0, 0, 0, 1)
TEXT_FINGERPRINT = Fingerprint(0, 0, 0, -1)
EMPTY_FINGERPRINT = Fingerprint(0, 0, 0, 0)


def is_off_sheet(ref: RawReference, sheet: str, workbook: str) -> bool:
    if ref.workbook is not None and ref.workbook != workbook:
        return True
    return ref.sheet is not None and ref.sheet != sheet


def reference_vector(ref: RawReference, column: int, row: int, sheet: str, workbook: str) -> RefVector:
    """Offset vector for one reference written in the cell at (column, row)."""
    if is_off_sheet(ref, sheet, workbook):
        return RefVector(ref.column - 1, ref.row - 1, 1, 0)
    dx = ref.column - 1 if ref.column_absolute else ref.column - column
    dy = ref.row - 1 if ref.row_absolute else ref.row - row
    return RefVector(dx, dy, 0, 0)


def reference_vectors(refs: Iterable[RawReference], column: int, row: int,
                      sheet: str, workbook: str) -> tuple[RefVector, ...]:
    return tuple(reference_vector(r, column, row, sheet, workbook) for r in refs)


def formula_fingerprint(vectors: Iterable[RefVector], has_numeric_constant: bool) -> Fingerprint:
    x = y = z = c = 0
    for v in vectors:
        x += v.dx
        y += v.dy
        z += v.dz
        c += v.dc
    if has_numeric_constant:
        c = 1
    return Fingerprint(x, y, z, c)


def null_fingerprint(kind: CellKind) -> Fingerprint:
    if kind is CellKind.NUMBER:
        return NUMBER_FINGERPRINT
    if kind is CellKind.TEXT:
        return TEXT_FINGERPRINT
    if kind is CellKind.EMPTY:
        return EMPTY_FINGERPRINT
    raise ValueError("formula cells have no null fingerprint")


def location_fingerprint(refs: Iterable[RawReference], sheet: str, workbook: str) -> LocFingerprint:
    """Sum of the absolute (column, row, off-sheet flag) of every referent."""
    x = y = z = 0
    for ref in refs:
        x += ref.column
        y += ref.row
        z += 1 if is_off_sheet(ref, sheet, workbook) else 0
    return LocFingerprint(x, y, z)


def translated_location_fingerprint(refs: Iterable[RawReference], sheet: str, workbook: str,
                                    from_cell: tuple[int, int], to_cell: tuple[int, int]) -> LocFingerprint:
    """Location fingerprint the reference pattern would have after moving the
    formula from from_cell to to_cell.  Relative axes shift with the formula;
    absolute anchors and off-sheet references stay put."""
    dc = to_cell[0] - from_cell[0]
    dr = to_cell[1] - from_cell[1]
    x = y = z = 0
    for ref in refs:
        off = is_off_sheet(ref, sheet, workbook)
        x += ref.column if (off or ref.column_absolute) else ref.column + dc
        y += ref.row if (off or ref.row_absolute) else ref.row + dr
        z += 1 if off else 0
    return LocFingerprint(x, y, z)


def resolve_reference(ref: RawReference, cell: CellAddress) -> CellAddress:
    """Absolute address a reference points at, inheriting the cell's sheet
    and workbook when the reference leaves them implicit."""
    return CellAddress(
        column=ref.column,
        row=ref.row,
        sheet=ref.sheet if ref.sheet is not None else cell.sheet,
        workbook=ref.workbook if ref.workbook is not None else cell.workbook,
    )


@dataclass
class SheetVectors:
    """Per-cell analysis table for one sheet's used range.

    Formula cells that fail to parse are downgraded to text here (with a
    diagnostic) so every later stage sees one consistent view.
    """

    sheet_name: str
    workbook_name: str
    rect: Rect
    kinds: dict[tuple[int, int], CellKind]
    fingerprints: dict[tuple[int, int], Fingerprint]
    vectors: dict[tuple[int, int], tuple[RefVector, ...]]
    refs: dict[tuple[int, int], tuple[RawReference, ...]]
    locs: dict[tuple[int, int], LocFingerprint]
    diagnostics: list[str] = field(default_factory=list)

    def kind(self, column: int, row: int) -> CellKind:
        return self.kinds.get((column, row), CellKind.EMPTY)

    def fingerprint(self, column: int, row: int) -> Fingerprint:
        return self.fingerprints.get((column, row), EMPTY_FINGERPRINT)

    def loc(self, column: int, row: int) -> LocFingerprint:
        return self.locs.get((column, row), LocFingerprint(0, 0, 0))


def analyze_sheet_vectors(workbook: Workbook, sheet: Worksheet) -> SheetVectors:
    """Parse every formula on the sheet and compute all per-cell summaries."""
    rect = sheet.used_range()
    table = SheetVectors(sheet.name, workbook.name, rect, {}, {}, {}, {}, {})
    for (column, row), content in sorted(sheet.cells.items(), key=lambda item: (item[0][1], item[0][0])):
        kind = content.kind
        if kind is CellKind.FORMULA:
            try:
                ast = parse_formula(content.value)
                refs = tuple(references(ast))
            except (FormulaParseError, RangeTooLargeError) as exc:
                table.diagnostics.append(
                    f"{sheet.name}!{to_a1(column, row)}: unparseable formula treated as text ({exc})"
                )
                table.kinds[(column, row)] = CellKind.TEXT
                table.fingerprints[(column, row)] = TEXT_FINGERPRINT
                continue
            vectors = reference_vectors(refs, column, row, sheet.name, workbook.name)
            table.kinds[(column, row)] = CellKind.FORMULA
            table.vectors[(column, row)] = vectors
            table.refs[(column, row)] = refs
            table.fingerprints[(column, row)] = formula_fingerprint(
                vectors, numeric_constant_count(ast) > 0
            )
            table.locs[(column, row)] = location_fingerprint(refs, sheet.name, workbook.name)
        else:
            table.kinds[(column, row)] = kind
            table.fingerprints[(column, row)] = null_fingerprint(kind)
    return table


@dataclass
class DependenceGraph:
    """Cell-level reference graph across the whole workbook.

    Vertices cover every used-range cell; referents outside any used range
    (including other workbooks) appear in `boundary` and have no out-edges.
    Reference cycles are recorded, not fatal; cells in a cycle keep their
    syntactic vectors.
    """

    vertices: frozenset[CellAddress]
    edges: dict[CellAddress, tuple[CellAddress, ...]]
    boundary: frozenset[CellAddress]
    cycles: tuple[frozenset[CellAddress], ...]


def build_dependence_graph(workbook: Workbook, tables: dict[str, SheetVectors] | None = None) -> DependenceGraph:
    if tables is None:
        tables = {
            ws.name: analyze_sheet_vectors(workbook, ws)
            for ws in workbook.sheets
            if ws.cells
        }
    vertices: set[CellAddress] = set()
    for name, table in tables.items():
        for column, row in table.rect.cells():
            vertices.add(CellAddress(column, row, name, workbook.name))
    edges: dict[CellAddress, tuple[CellAddress, ...]] = {}
    boundary: set[CellAddress] = set()
    for name, table in tables.items():
        for (column, row), refs in table.refs.items():
            source = CellAddress(column, row, name, workbook.name)
            targets = sorted({resolve_reference(r, source) for r in refs})
            for t in targets:
                if t not in vertices:
                    boundary.add(t)
            edges[source] = tuple(targets)
    cycles = _reference_cycles(edges)
    return DependenceGraph(frozenset(vertices), edges, frozenset(boundary), cycles)


def _reference_cycles(edges: dict[CellAddress, tuple[CellAddress, ...]]) -> tuple[frozenset[CellAddress], ...]:
    """Strongly connected components with more than one cell, plus self-loops.
    Iterative so that long reference chains cannot overflow the stack."""
    index: dict[CellAddress, int] = {}
    lowlink: dict[CellAddress, int] = {}
    on_stack: set[CellAddress] = set()
    stack: list[CellAddress] = []
    counter = 0
    cycles: list[frozenset[CellAddress]] = []

    for root in sorted(edges):
        if root in index:
            continue
        work: list[tuple[CellAddress, int]] = [(root, 0)]
        while work:
            node, child_i = work[-1]
            if child_i == 0:
                index[node] = lowlink[node] = counter
                counter += 1
                stack.append(node)
                on_stack.add(node)
            children = edges.get(node, ())
            advanced = False
            while child_i < len(children):
                child = children[child_i]
                child_i += 1
                if child not in edges:
                    continue
                if child not in index:
                    work[-1] = (node, child_i)
                    work.append((child, 0))
                    advanced = True
                    break
                if child in on_stack:
                    lowlink[node] = min(lowlink[node], index[child])
            if advanced:
                continue
            work.pop()
            if lowlink[node] == index[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                if len(component) > 1 or node in edges.get(node, ()):
                    cycles.append(frozenset(component))
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
    return tuple(cycles)
