"""Command-line interface: analyze, render, eval.

Exit codes: 0 success, 1 internal failure, 2 bad input or usage.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .evaluate import evaluate_report, load_annotations
from .model import FormatError, GridlintError, load_workbook
from .pipeline import AnalysisConfig, analyze_workbook, audit_payload
from .report import (
    assign_colors,
    audit_json,
    audit_text,
    build_adjacency,
    render_empty_view,
    render_global_view,
)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2


def _default_jobs(flag_value: Optional[int]) -> int:
    """--jobs beats GRIDLINT_JOBS beats core count."""
    if flag_value is not None:
        return flag_value
    env = os.environ.get("GRIDLINT_JOBS")
    if env is not None:
        try:
            value = int(env)
        except ValueError:
            raise FormatError(f"GRIDLINT_JOBS must be an integer, got {env!r}")
        if value < 1:
            raise FormatError(f"GRIDLINT_JOBS must be at least 1, got {value}")
        return value
    return os.cpu_count() or 1


def _write_or_print(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def cmd_analyze(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    workbook = load_workbook(args.workbook)
    parse_seconds = time.perf_counter() - t0
    config = AnalysisConfig(
        threshold=args.threshold,
        preprocess=not args.no_preprocess,
        jobs=_default_jobs(args.jobs),
        fmt=args.format,
    )
    analysis = analyze_workbook(workbook, config, parse_seconds=parse_seconds)
    payload = audit_payload(analysis, config.threshold)
    text = audit_json(payload) if config.fmt == "json" else audit_text(payload)
    _write_or_print(text, args.out)
    print(
        f"analyzed {len(analysis.sheets)} sheet(s): "
        f"{analysis.total_regions()} regions, {analysis.total_fixes()} proposed fixes",
        file=sys.stderr,
    )
    for phase in ("parse", "vectors", "decomposition", "fixes"):
        print(f"  {phase}: {analysis.timings.get(phase, 0.0) * 1000:.1f} ms", file=sys.stderr)
    return EXIT_OK


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", name) or "sheet"


def cmd_render(args: argparse.Namespace) -> int:
    workbook = load_workbook(args.workbook)
    if not workbook.sheets:
        print("error: workbook has no sheets to render", file=sys.stderr)
        return EXIT_USAGE
    out_dir = Path(args.out) if args.out else Path.cwd()
    out_dir.mkdir(parents=True, exist_ok=True)
    analysis = analyze_workbook(workbook, AnalysisConfig(jobs=1))
    for sheet in analysis.sheets:
        if sheet.cells == 0:
            html = render_empty_view(sheet.name)
        else:
            graph = build_adjacency(sheet.table)
            html = render_global_view(sheet.table, graph, assign_colors(graph))
        path = out_dir / f"{_safe_name(workbook.name)}_{_safe_name(sheet.name)}.html"
        path.write_text(html, encoding="utf-8")
        print(f"wrote {path}", file=sys.stderr)
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    with open(args.report, "r", encoding="utf-8") as fh:
        try:
            report = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FormatError(f"invalid report JSON: {exc}") from exc
    truth = load_annotations(args.annotations)
    result = evaluate_report(report, truth)
    _write_or_print(json.dumps(result, indent=2) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridlint",
        description="find spreadsheet formula inconsistencies by layout analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="rank likely formula errors in a workbook")
    p_analyze.add_argument("workbook", help="path to a .gridbook JSON workbook")
    p_analyze.add_argument("--threshold", type=float, default=0.05,
                           help="fraction of cells a reader will inspect (default 0.05)")
    p_analyze.add_argument("--no-preprocess", action="store_true",
                           help="skip the delimiter-split preprocessing pass")
    p_analyze.add_argument("--jobs", type=int, default=None,
                           help="worker threads for decomposition (default: GRIDLINT_JOBS or cores)")
    p_analyze.add_argument("--format", choices=("json", "text"), default="json")
    p_analyze.add_argument("--out", default=None, help="write the report here instead of stdout")
    p_analyze.set_defaults(func=cmd_analyze)

    p_render = sub.add_parser("render", help="write a colored HTML view per sheet")
    p_render.add_argument("workbook")
    p_render.add_argument("--out", default=None, help="output directory (default: cwd)")
    p_render.set_defaults(func=cmd_render)

    p_eval = sub.add_parser("eval", help="score an audit report against annotations")
    p_eval.add_argument("report", help="audit JSON produced by analyze")
    p_eval.add_argument("annotations", help="ground-truth annotation JSON")
    p_eval.add_argument("--out", default=None)
    p_eval.set_defaults(func=cmd_eval)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GridlintError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
