#!/usr/bin/env python3
"""Survey fingerprint aliasing and cluster shapes across workbooks.

For each .gridbook file this reports the fingerprint collision rate
(fraction of same-fingerprint formula pairs whose underlying reference
vector sets actually differ) and the share of fingerprint clusters that
form solid rectangles, overall and for formula-only clusters.  Low
collision and high rectangularity are what make fingerprints a usable
proxy for formula-shape equality on real sheets.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from gridlint.evaluate import collision_rate, rectangularity_stats
from gridlint.model import load_workbook
from gridlint.pipeline import analyze_sheet


def survey(path: Path) -> tuple[float, str, str, int]:
    workbook = load_workbook(path)
    tables = [
        analyze_sheet(workbook, sheet).table
        for sheet in workbook.sheets
        if sheet.cells
    ]
    rate = collision_rate(tables)
    frac_all, frac_formula = rectangularity_stats(tables)
    fmt = lambda v: "n/a" if v is None else f"{100 * v:.1f}%"
    cells = sum(t.rect.area for t in tables)
    return rate, fmt(frac_all), fmt(frac_formula), cells


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "paths", nargs="*", type=Path,
        default=sorted(Path(__file__).resolve().parent.parent.glob("fixtures/*.gridbook")),
        help="workbook files (default: the bundled fixtures)",
    )
    args = parser.parse_args()

    print(f"{'workbook':<24} {'cells':>6} {'collisions':>10} {'rect(all)':>10} {'rect(formula)':>14}")
    for path in args.paths:
        rate, frac_all, frac_formula, cells = survey(path)
        print(f"{path.stem:<24} {cells:>6} {100 * rate:>9.2f}% {frac_all:>10} {frac_formula:>14}")


if __name__ == "__main__":
    main()
