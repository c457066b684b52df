"""Command-line interface: validate, render, canonicalize, stats, serve.

Exit codes: 0 success, 1 validation or data errors, 2 usage errors. Data
goes to stdout, diagnostics to stderr. Rendering goes through exactly the
same pipeline as the HTTP service, so file output and service output are
byte-identical for identical inputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import (
    EmptyTrackListError,
    EmptyViewportError,
    ParseError,
    UnknownTrackError,
    parse_config,
    resolve_config,
    serialize_config,
)
from .layout import WidthError, assign_lanes, layout_timeline
from .model import (
    AnnotationPackage,
    PackageError,
    effective_end_ms,
    format_timecode,
    package_from_json,
    parse_package,
    validate_package,
)
from .service import DEFAULT_MAX_PACKAGE_BYTES, DEFAULT_PORT, DEFAULT_WIDTH_PX
from .svg import render_svg


def _fail(message: str) -> int:
    print(message, file=sys.stderr)
    return 1


def _load_package(path: str) -> AnnotationPackage:
    return parse_package(Path(path).read_bytes())


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        data = Path(args.package).read_bytes()
    except OSError as e:
        return _fail(f"{args.package}: {e.strerror}")
    try:
        doc = json.loads(data.decode("utf-8"))
        pkg = package_from_json(doc)
    except (ValueError, PackageError) as e:
        return _fail(f"{args.package}: {e}")
    report = validate_package(pkg)
    for issue in report.warnings:
        print(f"warning: {issue.path}: {issue.message} [{issue.code}]", file=sys.stderr)
    if report.errors:
        for issue in report.errors:
            print(f"error: {issue.path}: {issue.message} [{issue.code}]", file=sys.stderr)
        print(f"{len(report.errors)} errors, {len(report.warnings)} warnings", file=sys.stderr)
        return 1
    print(f"0 errors, {len(report.warnings)} warnings")
    return 0


def cmd_render(args: argparse.Namespace) -> int:
    try:
        pkg = _load_package(args.package)
    except OSError as e:
        return _fail(f"{args.package}: {e.strerror}")
    except PackageError as e:
        return _fail(f"{args.package}: {e}")
    try:
        rc = resolve_config(parse_config(args.config), pkg)
        svg = render_svg(layout_timeline(pkg, rc, args.width))
    except (ParseError, UnknownTrackError, EmptyViewportError, EmptyTrackListError, WidthError) as e:
        return _fail(f"--config: {e}" if isinstance(e, ParseError) else str(e))
    if args.output is None:
        sys.stdout.buffer.write(svg)
    else:
        Path(args.output).write_bytes(svg)
    return 0


def cmd_canonicalize(args: argparse.Namespace) -> int:
    try:
        canonical = serialize_config(parse_config(args.config))
    except ParseError as e:
        return _fail(f"--config: {e}")
    if canonical:
        print(canonical)
    return 0


def track_stats(pkg: AnnotationPackage, type_id: str) -> tuple[int, float, int]:
    """Per-track (count, coverage fraction of media duration, max lanes)."""
    anns = pkg.annotations_of(type_id)
    lanes = assign_lanes(anns)
    max_lanes = max(lanes) + 1 if lanes else 0
    covered = 0
    cursor = 0
    for a in anns:  # sorted by begin; merge overlapping spans
        begin = max(a.begin_ms, cursor)
        end = max(begin, min(effective_end_ms(a), pkg.media.duration_ms))
        covered += end - begin
        cursor = max(cursor, end)
    return len(anns), covered / pkg.media.duration_ms, max_lanes


def cmd_stats(args: argparse.Namespace) -> int:
    try:
        pkg = _load_package(args.package)
    except OSError as e:
        return _fail(f"{args.package}: {e.strerror}")
    except PackageError as e:
        return _fail(f"{args.package}: {e}")
    print(f"media: {pkg.media.id}  duration: {format_timecode(pkg.media.duration_ms)}")
    header = f"{'type':<20} {'kind':<10} {'count':>7} {'coverage':>9} {'max lanes':>10}"
    print(header)
    print("-" * len(header))
    for t in pkg.types:
        count, coverage, max_lanes = track_stats(pkg, t.id)
        print(f"{t.id:<20} {t.value_kind.value:<10} {count:>7} {coverage:>8.1%} {max_lanes:>10}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .service import run_server

    run_server(
        port=args.port,
        data_dir=Path(args.data_dir) if args.data_dir else None,
        max_package_bytes=args.max_package_bytes,
        host=args.host,
        ui_dir=Path(args.ui_dir) if args.ui_dir else None,
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="annotimeline",
        description="Timeline layouts and SVG renderings for video annotation packages.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a package file against all invariants")
    p.add_argument("package", help="package JSON file")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("render", help="render a package to SVG")
    p.add_argument("package", help="package JSON file")
    p.add_argument("--config", default="", help="timeline configuration string")
    p.add_argument("--width", type=int, default=DEFAULT_WIDTH_PX, help="viewport width in pixels")
    p.add_argument("-o", "--output", default=None, help="output SVG path (default: stdout)")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("canonicalize", help="print the canonical form of a configuration")
    p.add_argument("--config", default="", help="timeline configuration string")
    p.set_defaults(func=cmd_canonicalize)

    p = sub.add_parser("stats", help="per-type counts, coverage and overlap maxima")
    p.add_argument("package", help="package JSON file")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=DEFAULT_PORT)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data-dir", default=None, help="directory for persisted packages")
    p.add_argument("--max-package-bytes", type=int, default=DEFAULT_MAX_PACKAGE_BYTES)
    p.add_argument("--ui-dir", default=None, help="static web UI directory to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
