"""Candidate-fix generation, screening, scoring, and ranking.

A fix proposes rewriting a set of source cells to follow the reference
pattern of an adjacent target region.  Candidates are screened by three
conditions (merged layout must stay rectangular; an aggregate is never
rewritten to match its own inputs; both sides must be formulas), scored
by how much the rewrite simplifies the sheet layout versus how far the
formulas must move, and reported within a flagged-cell budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, NamedTuple, Optional, Sequence

from .entropy import Region, _coalesce_targeted, normalized_entropy
from .model import CellKind, GridlintError, Rect
from .vectors import SheetVectors, resolve_reference, translated_location_fingerprint
from .model import CellAddress

# Rejection codes for inadmissible candidates.
REASON_NOT_RECTANGULAR = "C1"
REASON_NOT_FORMULAS = "C2"
REASON_OWN_INPUTS = "C3"


class NonNegativeDeltaError(GridlintError):
    """Scoring requires an entropy-reducing fix."""


class CandidateFix(NamedTuple):
    """An unscored rewrite proposal, in sheet coordinates."""

    source_cells: tuple[tuple[int, int], ...]  # sorted by (row, col)
    source_region: Region  # region the source cells belong to
    target: Region


@dataclass(frozen=True)
class ProposedFix:
    sheet: str
    source_cells: tuple[tuple[int, int], ...]
    source_fingerprint: Hashable
    target: Rect
    target_fingerprint: Hashable
    target_size: int
    delta_entropy: float
    distance: float
    score: float


def adjacent(a: Rect, b: Rect) -> bool:
    """True when the rectangles share an edge of at least one cell."""
    if a.right + 1 == b.left or b.right + 1 == a.left:
        return min(a.bottom, b.bottom) >= max(a.top, b.top)
    if a.bottom + 1 == b.top or b.bottom + 1 == a.top:
        return min(a.right, b.right) >= max(a.left, b.left)
    return False


def boundary_cells_facing(a: Rect, b: Rect) -> list[tuple[int, int]]:
    """Cells of `a` whose edge-neighbour lies inside `b`."""
    cells: list[tuple[int, int]] = []
    if a.right + 1 == b.left:
        for y in range(max(a.top, b.top), min(a.bottom, b.bottom) + 1):
            cells.append((a.right, y))
    elif b.right + 1 == a.left:
        for y in range(max(a.top, b.top), min(a.bottom, b.bottom) + 1):
            cells.append((a.left, y))
    elif a.bottom + 1 == b.top:
        for x in range(max(a.left, b.left), min(a.right, b.right) + 1):
            cells.append((x, a.bottom))
    elif b.bottom + 1 == a.top:
        for x in range(max(a.left, b.left), min(a.right, b.right) + 1):
            cells.append((x, a.top))
    return sorted(cells, key=lambda c: (c[1], c[0]))


def _cell_sort_key(cell: tuple[int, int]) -> tuple[int, int]:
    return (cell[1], cell[0])


def candidate_fixes(regions: Sequence[Region]) -> list[CandidateFix]:
    """All (source, target) proposals over ordered adjacent region pairs.

    For each pair this emits the whole source region, plus each single
    boundary cell facing the target (skipped for one-cell regions, where
    the whole-region candidate is the same thing).
    """
    ordered = sorted(regions, key=lambda r: (r.rect.top, r.rect.left, r.rect.bottom, r.rect.right))
    out: list[CandidateFix] = []
    for a in ordered:
        for b in ordered:
            if a is b or a.fingerprint == b.fingerprint:
                continue
            if not adjacent(a.rect, b.rect):
                continue
            whole = tuple(sorted(a.rect.cells(), key=_cell_sort_key))
            out.append(CandidateFix(whole, a, b))
            if a.rect.area > 1:
                for cell in boundary_cells_facing(a.rect, b.rect):
                    out.append(CandidateFix((cell,), a, b))
    return out


def _merged_rect(fix: CandidateFix) -> Rect:
    t = fix.target.rect
    left = min(min(c[0] for c in fix.source_cells), t.left)
    right = max(max(c[0] for c in fix.source_cells), t.right)
    top = min(min(c[1] for c in fix.source_cells), t.top)
    bottom = max(max(c[1] for c in fix.source_cells), t.bottom)
    return Rect(left, top, right, bottom)


def admissible(fix: CandidateFix, table: SheetVectors, regions: Sequence[Region]) -> Optional[str]:
    """None when the fix passes all three screens, else its rejection code.

    C1: the source cells plus the target must tile an exact rectangle.
    C3: an aggregate whose referents all sit inside the target is
        reporting on that data, not mistakenly diverging from it; skip,
        unless no source formula references anything at all.
    C2: both sides must consist entirely of formulas.
    """
    merged = _merged_rect(fix)
    if merged.area != len(fix.source_cells) + fix.target.rect.area:
        return REASON_NOT_RECTANGULAR

    referents: list[CellAddress] = []
    for x, y in fix.source_cells:
        refs = table.refs.get((x, y))
        if refs:
            here = CellAddress(x, y, table.sheet_name, table.workbook_name)
            referents.extend(resolve_reference(r, here) for r in refs)
    if referents:
        t = fix.target.rect
        if all(
            ref.sheet == table.sheet_name
            and ref.workbook == table.workbook_name
            and t.contains(ref.column, ref.row)
            for ref in referents
        ):
            return REASON_OWN_INPUTS

    for x, y in fix.source_cells:
        if table.kind(x, y) is not CellKind.FORMULA:
            return REASON_NOT_FORMULAS
    for x, y in fix.target.rect.cells():
        if table.kind(x, y) is not CellKind.FORMULA:
            return REASON_NOT_FORMULAS
    return None


def rect_minus_cell(rect: Rect, cell: tuple[int, int]) -> list[Rect]:
    """Partition rect minus one interior-or-edge cell into up to 4 rects:
    full-width bands above and below, then the left/right remainders of
    the cell's own row."""
    cx, cy = cell
    out: list[Rect] = []
    if cy > rect.top:
        out.append(Rect(rect.left, rect.top, rect.right, cy - 1))
    if cx > rect.left:
        out.append(Rect(rect.left, cy, cx - 1, cy))
    if cx < rect.right:
        out.append(Rect(cx + 1, cy, rect.right, cy))
    if cy < rect.bottom:
        out.append(Rect(rect.left, cy + 1, rect.right, rect.bottom))
    return out


def hypothetical_regions(fix: CandidateFix, regions: Sequence[Region]) -> list[Region]:
    """The region set after rewriting the source cells to the target's
    fingerprint, re-coalesced around the touched regions only."""
    stable = [r for r in regions if r != fix.source_region and r != fix.target]
    dirty: list[Region] = [Region(_merged_rect(fix), fix.target.fingerprint)]
    if len(fix.source_cells) < fix.source_region.rect.area:
        for frag in rect_minus_cell(fix.source_region.rect, fix.source_cells[0]):
            dirty.append(Region(frag, fix.source_region.fingerprint))
    return _coalesce_targeted(stable, dirty)


def layout_entropy(regions: Sequence[Region], total_cells: int) -> float:
    """Normalized entropy of the region-size histogram of a layout."""
    return normalized_entropy([r.rect.area for r in regions], total_cells)


def entropy_delta(fix: CandidateFix, regions: Sequence[Region], total_cells: int) -> float:
    before = layout_entropy(regions, total_cells)
    after = layout_entropy(hypothetical_regions(fix, regions), total_cells)
    return after - before


def _target_representative(fix: CandidateFix, table: SheetVectors) -> tuple[int, int]:
    t = fix.target.rect
    for y in range(t.top, t.bottom + 1):
        for x in range(t.left, t.right + 1):
            if table.kind(x, y) is CellKind.FORMULA:
                return (x, y)
    return (t.left, t.top)


def fix_distance(fix: CandidateFix, table: SheetVectors) -> float:
    """Total movement of the source cells' referenced-location sums.

    Each source cell contributes the Euclidean distance between its
    current location fingerprint and the one it would have after taking
    on the target's reference pattern, re-anchored at its own position.
    Unchanged cells contribute nothing.
    """
    rep = _target_representative(fix, table)
    rep_refs = table.refs.get(rep, ())
    total = 0.0
    for x, y in fix.source_cells:
        as_is = table.loc(x, y)
        would_be = translated_location_fingerprint(
            rep_refs, table.sheet_name, table.workbook_name, rep, (x, y)
        )
        total += math.sqrt(
            (as_is.x - would_be.x) ** 2
            + (as_is.y - would_be.y) ** 2
            + (as_is.z - would_be.z) ** 2
        )
    return total


def impact_score(target_size: int, delta_entropy: float, distance: float) -> float:
    """target size / (entropy drop x movement), movement clamped to >= 1.

    Big targets are strong evidence; tiny entropy drops mean the rewrite
    barely perturbs the layout (a surgical fix); both push the score up.
    """
    if delta_entropy >= 0:
        raise NonNegativeDeltaError(f"delta_entropy {delta_entropy} is not a reduction")
    return target_size / (-delta_entropy * max(distance, 1.0))


def score_candidates(
    candidates: Sequence[CandidateFix],
    table: SheetVectors,
    regions: Sequence[Region],
    total_cells: int,
) -> list[ProposedFix]:
    """Screen, score, and wrap candidates; inadmissible or
    non-entropy-reducing ones are dropped."""
    out: list[ProposedFix] = []
    for fix in candidates:
        if admissible(fix, table, regions) is not None:
            continue
        delta = entropy_delta(fix, regions, total_cells)
        if delta >= 0:
            continue
        distance = fix_distance(fix, table)
        score = impact_score(fix.target.rect.area, delta, distance)
        out.append(
            ProposedFix(
                sheet=table.sheet_name,
                source_cells=fix.source_cells,
                source_fingerprint=fix.source_region.fingerprint,
                target=fix.target.rect,
                target_fingerprint=fix.target.fingerprint,
                target_size=fix.target.rect.area,
                delta_entropy=delta,
                distance=distance,
                score=score,
            )
        )
    return out


def _rank_key(fix: ProposedFix) -> tuple:
    first = fix.source_cells[0]
    t = fix.target
    return (
        -fix.score,
        len(fix.source_cells),
        (first[1], first[0]),
        (t.top, t.left, t.bottom, t.right),
    )


def rank_and_cut(fixes: Sequence[ProposedFix], threshold: float, total_cells: int) -> list[ProposedFix]:
    """Order fixes and keep the best within the flagged-cell budget.

    Budget = ceil(threshold x total cells), computed in exact rational
    arithmetic: 0.05 x 100 must give 5, not the 6 that float rounding of
    ceil(5.000000000000001) would.  Only one fix per distinct source cell
    set survives; emission stops at the first fix that would overflow the
    budget.
    """
    budget = math.ceil(Fraction(str(threshold)) * total_cells)
    ranked = sorted(fixes, key=_rank_key)
    seen: set[frozenset] = set()
    out: list[ProposedFix] = []
    flagged = 0
    for fix in ranked:
        key = frozenset(fix.source_cells)
        if key in seen:
            continue
        seen.add(key)
        if flagged + len(fix.source_cells) > budget:
            break
        flagged += len(fix.source_cells)
        out.append(fix)
    return out


def build_fixes(
    table: SheetVectors,
    regions: Sequence[Region],
    total_cells: int,
    threshold: float = 0.05,
) -> list[ProposedFix]:
    """End-to-end: candidates -> screens -> scores -> ranked audit list."""
    scored = score_candidates(candidate_fixes(regions), table, regions, total_cells)
    return rank_and_cut(scored, threshold, total_cells)
