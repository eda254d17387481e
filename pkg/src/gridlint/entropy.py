"""Minimum-entropy rectangular decomposition of a fingerprint grid.

A sheet is recursively cut by the straight vertical or horizontal line
whose two halves have the lowest summed normalized entropy, stopping at
single-fingerprint rectangles.  The resulting leaves are then coalesced:
any two rectangles carrying the same fingerprint whose union is again a
rectangle are merged, to a fixed point, in a pinned deterministic order.

An optional preprocessing pass first cuts the grid along uniform
full-height columns or full-width rows (delimiter lines such as blank
separators or border strips), so that large sheets decompose piecewise.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Hashable, Iterable, NamedTuple, Optional, Sequence, Union

from .grid import FingerprintGrid
from .model import GridlintError, Rect


class NegativeCountError(GridlintError):
    """A histogram count was negative."""


class InvalidSplitError(GridlintError):
    """A requested cut line does not fall strictly inside the rectangle."""


class Region(NamedTuple):
    """A rectangle of cells that all carry the same fingerprint."""

    rect: Rect
    fingerprint: Hashable


def normalized_entropy(counts: Iterable[int], n: int) -> float:
    """Shannon entropy of a count histogram divided by log(n).

    The log-base cancels in the ratio.  Empty histograms have no defined
    distribution and come back as +inf so that any real split beats them;
    a single bucket, or n <= 1, is perfectly ordered and scores 0.
    """
    positive = []
    for c in counts:
        if c < 0:
            raise NegativeCountError(f"negative count {c}")
        if c > 0:
            positive.append(c)
    if not positive:
        return math.inf
    if n <= 1 or len(positive) == 1:
        return 0.0
    scale = 1.0 / math.log2(n)
    total = 0.0
    for c in positive:
        p = c / n
        total -= p * math.log2(p)
    return total * scale


def split_halves(region: Rect, index: int, vertical: bool) -> tuple[Rect, Rect]:
    """The two sub-rectangles obtained by cutting after column/row `index`."""
    if vertical:
        if not region.left <= index < region.right:
            raise InvalidSplitError(f"cut after column {index} not inside {region}")
        return (
            Rect(region.left, region.top, index, region.bottom),
            Rect(index + 1, region.top, region.right, region.bottom),
        )
    if not region.top <= index < region.bottom:
        raise InvalidSplitError(f"cut after row {index} not inside {region}")
    return (
        Rect(region.left, region.top, region.right, index),
        Rect(region.left, index + 1, region.right, region.bottom),
    )


def split_entropy(grid: FingerprintGrid, region: Rect, index: int, vertical: bool) -> float:
    """Summed normalized entropy of the two halves of a candidate cut."""
    first, second = split_halves(region, index, vertical)
    e1 = normalized_entropy(grid.counts_in(first).values(), first.area)
    e2 = normalized_entropy(grid.counts_in(second).values(), second.area)
    return e1 + e2


@dataclass(frozen=True)
class EntropyLeaf:
    region: Rect


@dataclass(frozen=True)
class EntropyNode:
    region: Rect
    low: "EntropyTree"
    high: "EntropyTree"
    vertical: bool
    index: int
    entropy: float


EntropyTree = Union[EntropyLeaf, EntropyNode]


def best_split(grid: FingerprintGrid, region: Rect) -> tuple[bool, int, float]:
    """(vertical, index, entropy) of the winning cut for a mixed rectangle.

    Vertical candidates are scanned first and win ties against horizontal
    ones; within an axis the smallest index attaining the minimum wins.
    """
    best_v: Optional[tuple[float, int]] = None
    for i in range(region.left, region.right):
        e = split_entropy(grid, region, i, True)
        if best_v is None or e < best_v[0]:
            best_v = (e, i)
    best_h: Optional[tuple[float, int]] = None
    for i in range(region.top, region.bottom):
        e = split_entropy(grid, region, i, False)
        if best_h is None or e < best_h[0]:
            best_h = (e, i)
    if best_v is None and best_h is None:
        raise InvalidSplitError(f"{region} has no interior cut line")
    if best_h is None or (best_v is not None and best_v[0] <= best_h[0]):
        assert best_v is not None
        return True, best_v[1], best_v[0]
    return False, best_h[1], best_h[0]


def entropy_tree(grid: FingerprintGrid, region: Optional[Rect] = None) -> EntropyTree:
    """Full guillotine decomposition tree of `region` (default: whole grid).

    Built with an explicit stack; deep, skewed cut sequences on long thin
    sheets would overflow Python's recursion limit otherwise.
    """
    if region is None:
        region = grid.full_rect()
    # Pass 1: decide every node's cut top-down, stack order = preorder.
    plan: dict[tuple[int, int, int, int], Optional[tuple[bool, int, float, Rect, Rect]]] = {}
    order: list[Rect] = []
    pending = [region]
    while pending:
        r = pending.pop()
        order.append(r)
        key = (r.left, r.top, r.right, r.bottom)
        if r.area == 1 or len(grid.counts_in(r)) == 1:
            plan[key] = None
            continue
        vertical, index, entropy = best_split(grid, r)
        low, high = split_halves(r, index, vertical)
        plan[key] = (vertical, index, entropy, low, high)
        pending.append(high)
        pending.append(low)
    # Pass 2: assemble bottom-up; children precede parents in reversed preorder.
    built: dict[tuple[int, int, int, int], EntropyTree] = {}
    for r in reversed(order):
        key = (r.left, r.top, r.right, r.bottom)
        decision = plan[key]
        if decision is None:
            built[key] = EntropyLeaf(r)
        else:
            vertical, index, entropy, low, high = decision
            built[key] = EntropyNode(
                r,
                built[(low.left, low.top, low.right, low.bottom)],
                built[(high.left, high.top, high.right, high.bottom)],
                vertical,
                index,
                entropy,
            )
    return built[(region.left, region.top, region.right, region.bottom)]


def tree_leaves(tree: EntropyTree) -> list[EntropyLeaf]:
    """Leaves in left-to-right (low-before-high) order, iteratively."""
    out: list[EntropyLeaf] = []
    stack: list[EntropyTree] = [tree]
    while stack:
        node = stack.pop()
        if isinstance(node, EntropyLeaf):
            out.append(node)
        else:
            stack.append(node.high)
            stack.append(node.low)
    return out


def _region_key(region: Region) -> tuple:
    r = region.rect
    return (r.top, r.left, r.bottom, r.right, repr(region.fingerprint))


def mergeable(a: Rect, b: Rect) -> bool:
    """True when the union of the two rectangles is itself a rectangle."""
    if a.left == b.left and a.right == b.right:
        return a.bottom + 1 == b.top or b.bottom + 1 == a.top
    if a.top == b.top and a.bottom == b.bottom:
        return a.right + 1 == b.left or b.right + 1 == a.left
    return False


def _union_rect(a: Rect, b: Rect) -> Rect:
    return Rect(min(a.left, b.left), min(a.top, b.top), max(a.right, b.right), max(a.bottom, b.bottom))


def coalesce(regions: Sequence[Region]) -> list[Region]:
    """Merge same-fingerprint rectangle pairs whose union is a rectangle.

    Runs to a fixed point.  The scan order is pinned: regions are kept
    sorted by (top, left, bottom, right) and the first mergeable pair in
    that order merges first, so the result is fully deterministic.
    """
    items = sorted(regions, key=_region_key)
    merged = True
    while merged:
        merged = False
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                a, b = items[i], items[j]
                if a.fingerprint == b.fingerprint and mergeable(a.rect, b.rect):
                    union = Region(_union_rect(a.rect, b.rect), a.fingerprint)
                    del items[j]
                    del items[i]
                    items.append(union)
                    items.sort(key=_region_key)
                    merged = True
                    break
            if merged:
                break
    return items


def _coalesce_targeted(stable: Sequence[Region], dirty: Sequence[Region]) -> list[Region]:
    """Coalesce when `stable` is already a fixed point and only `dirty`
    regions are new or reshaped; only pairs involving a dirty region can
    merge, which keeps incremental re-coalescing cheap."""
    items = sorted(list(stable) + list(dirty), key=_region_key)
    queue = sorted(dirty, key=_region_key)
    while queue:
        current = queue.pop(0)
        if current not in items:
            continue
        partner = None
        for other in items:
            if other is current or other == current:
                continue
            if other.fingerprint == current.fingerprint and mergeable(other.rect, current.rect):
                partner = other
                break
        if partner is None:
            continue
        items.remove(current)
        items.remove(partner)
        union = Region(_union_rect(current.rect, partner.rect), current.fingerprint)
        items.append(union)
        items.sort(key=_region_key)
        queue = [q for q in queue if q != partner]
        queue.append(union)
        queue.sort(key=_region_key)
    return items


def _axis_runs(grid: FingerprintGrid, vertical: bool) -> list[Optional[int]]:
    """Run ids for delimiter lines along one axis.

    A column (row) is a delimiter line when every cell on it carries the
    same fingerprint.  Consecutive delimiter lines with the same
    fingerprint share a run id; other lines get None.  Index 0 unused.
    """
    length = grid.width if vertical else grid.height
    depth = grid.height if vertical else grid.width
    ids: list[Optional[int]] = [None] * (length + 1)
    run_id = 0
    prev_fp: Optional[Hashable] = None
    prev_uniform = False
    for i in range(1, length + 1):
        if vertical:
            fps = {grid.fingerprint_at(i, y) for y in range(1, depth + 1)}
        else:
            fps = {grid.fingerprint_at(x, i) for x in range(1, depth + 1)}
        if len(fps) == 1:
            fp = next(iter(fps))
            if not (prev_uniform and fp == prev_fp):
                run_id += 1
            ids[i] = run_id
            prev_uniform = True
            prev_fp = fp
        else:
            prev_uniform = False
            prev_fp = None
    return ids


def _run_cuts(ids: list[Optional[int]], length: int) -> list[int]:
    """Cut lines at run boundaries: after the line preceding a run start,
    and after a run end, when those fall strictly inside the grid."""
    cuts = set()
    for i in range(1, length + 1):
        if ids[i] is None:
            continue
        starts = i == 1 or ids[i - 1] != ids[i]
        ends = i == length or (i + 1 <= length and ids[i + 1] != ids[i])
        if starts and i > 1:
            cuts.add(i - 1)
        if ends and i < length:
            cuts.add(i)
    return sorted(cuts)


def delimiter_splits(grid: FingerprintGrid) -> list[Rect]:
    """Cut the grid along delimiter-run boundaries into work pieces.

    Candidate cut lines sit only at edges of uniform single-fingerprint
    full-height (full-width) runs, and are chosen recursively by the same
    rule as the decomposition itself: lowest summed half entropy, vertical
    before horizontal on ties, smallest index on ties.  A piece lying
    entirely inside one run needs no further cutting and is kept whole.
    """
    col_ids = _axis_runs(grid, True)
    row_ids = _axis_runs(grid, False)
    v_cuts = _run_cuts(col_ids, grid.width)
    h_cuts = _run_cuts(row_ids, grid.height)
    pieces: list[Rect] = []
    stack = [grid.full_rect()]
    while stack:
        r = stack.pop()
        inside_col_run = col_ids[r.left] is not None and col_ids[r.left] == col_ids[r.right]
        inside_row_run = row_ids[r.top] is not None and row_ids[r.top] == row_ids[r.bottom]
        if inside_col_run or inside_row_run:
            pieces.append(r)
            continue
        cand_v = [i for i in v_cuts if r.left <= i < r.right]
        cand_h = [i for i in h_cuts if r.top <= i < r.bottom]
        if not cand_v and not cand_h:
            pieces.append(r)
            continue
        best_v: Optional[tuple[float, int]] = None
        for i in cand_v:
            e = split_entropy(grid, r, i, True)
            if best_v is None or e < best_v[0]:
                best_v = (e, i)
        best_h: Optional[tuple[float, int]] = None
        for i in cand_h:
            e = split_entropy(grid, r, i, False)
            if best_h is None or e < best_h[0]:
                best_h = (e, i)
        if best_h is None or (best_v is not None and best_v[0] <= best_h[0]):
            assert best_v is not None
            low, high = split_halves(r, best_v[1], True)
        else:
            low, high = split_halves(r, best_h[1], False)
        stack.append(high)
        stack.append(low)
    pieces.sort(key=lambda p: (p.top, p.left))
    return pieces


def _piece_regions(grid: FingerprintGrid, piece: Rect) -> list[Region]:
    leaves = tree_leaves(entropy_tree(grid, piece))
    out = []
    for leaf in leaves:
        counts = grid.counts_in(leaf.region)
        (fp,) = counts.keys()
        out.append(Region(leaf.region, fp))
    return out


def decompose_grid(grid: FingerprintGrid, preprocess: bool = True, jobs: int = 1) -> list[Region]:
    """Single-fingerprint rectangles covering the grid, coalesced.

    With preprocess=True the grid is first split along delimiter runs and
    each piece decomposed independently (optionally in `jobs` threads);
    results are identical across thread counts because the piece list and
    the final coalesce order are both pinned.
    """
    pieces = delimiter_splits(grid) if preprocess else [grid.full_rect()]
    if jobs > 1 and len(pieces) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_piece = list(pool.map(lambda p: _piece_regions(grid, p), pieces))
    else:
        per_piece = [_piece_regions(grid, p) for p in pieces]
    leaves = [region for chunk in per_piece for region in chunk]
    return coalesce(leaves)
