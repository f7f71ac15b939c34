"""Command-line interface: build, view, generate, stats, serve.

Exit codes: 0 success, 2 input or validation error, 3 internal invariant
violation. File outputs are written atomically (temp file + rename), so a
crash never leaves a half-written artifact behind.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

from .errors import (
    DataFormatError,
    FilterError,
    GenerationError,
    InvariantError,
    ModelError,
)
from .hypergraph import Tdm, build_model, tdm_from_json, tdm_to_json
from .levels import (
    FilterSpec,
    compose_view,
    fraction_from_param,
    partition_levels,
    view_report_json,
)
from .render import LayoutConfig, emit_dot, emit_level_strip, render_view_svg
from .synth import GeneratorProfile, generate_dataset


def atomic_write_text(path: Path, text: str) -> None:
    """Write via a sibling temp file and rename; readers never see partials."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        atomic_write_text(Path(out), text)


def _load_model(path: str) -> Tdm:
    return tdm_from_json(Path(path).read_bytes())


def _spec_from_args(args: argparse.Namespace) -> FilterSpec:
    topics = None
    if args.topics is not None:
        topics = frozenset(t for t in args.topics.split(",") if t)
    return FilterSpec(
        topics=topics,
        topic_mode=args.topic_mode,
        achv_min=_fraction_arg(args.achv_min),
        achv_max=_fraction_arg(args.achv_max),
        achv_extremum=args.achv_extremum,
        cov_min=args.cov_min,
        cov_max=args.cov_max,
        cov_extremum=args.cov_extremum,
        mode=args.mode,
        level=args.level,
    )


def _fraction_arg(text: str | None) -> Fraction | None:
    return None if text is None else fraction_from_param(text)


def cmd_build(args: argparse.Namespace) -> int:
    tdm = build_model(Path(args.sqa).read_bytes(), Path(args.qt).read_bytes())
    _emit(tdm_to_json(tdm), args.out)
    print(
        f"{len(tdm.vertices)} vertices, {len(tdm.hyperedges)} hyperedges, "
        f"{len(tdm.zero_coverage_sets)} zero-coverage sets",
        file=sys.stderr,
    )
    return 0


def cmd_view(args: argparse.Namespace) -> int:
    tdm = _load_model(args.model)
    spec = _spec_from_args(args)
    partition = partition_levels(tdm)
    config = LayoutConfig()

    if args.format == "svg":
        if args.strip:
            text = emit_level_strip(
                tdm,
                partition,
                spec,
                config,
                include_empty=args.include_empty,
                hide_greyed=args.hide_greyed,
            )
        else:
            view = compose_view(partition, spec)
            text = render_view_svg(tdm, view, config, hide_greyed=args.hide_greyed)
    elif args.format == "json":
        text = view_report_json(partition, spec, strip=args.strip)
    else:
        view = compose_view(partition, spec)
        text = emit_dot(tdm, view, config)
    _emit(text, args.out)

    if args.report is not None:
        atomic_write_text(
            Path(args.report), view_report_json(partition, spec, strip=args.strip)
        )
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    profile = GeneratorProfile(min_arity=args.min_arity, max_arity=args.max_arity)
    dataset = generate_dataset(
        args.seed, args.students, args.questions, args.topics, profile
    )
    atomic_write_text(Path(args.sqa_out), dataset.sqa_text)
    atomic_write_text(Path(args.qt_out), dataset.qt_text)
    r = dataset.report
    print(
        f"wrote {args.sqa_out} ({r['responses']} responses) and {args.qt_out} "
        f"({r['questions']} questions)",
        file=sys.stderr,
    )
    print(
        f"arity {r['arity_range'][0]}..{r['arity_range'][1]}, "
        f"attempts {r['attempts_range'][0]}..{r['attempts_range'][1]}, "
        f"question averages {r['question_avg_range'][0]:.2f}.."
        f"{r['question_avg_range'][1]:.2f}, "
        f"student averages {r['student_avg_range'][0]:.2f}.."
        f"{r['student_avg_range'][1]:.2f}",
        file=sys.stderr,
    )
    return 0


def model_stats(tdm: Tdm) -> dict:
    """Per-level counts, weight totals, and an achievement histogram."""
    partition = partition_levels(tdm)
    histogram = [0] * 10
    for edge in tdm.hyperedges:
        bucket = min(int(edge.achievement * 10), 9)
        histogram[bucket] += 1
    return {
        "vertices": len(tdm.vertices),
        "hyperedges": len(tdm.hyperedges),
        "zero_coverage_sets": len(tdm.zero_coverage_sets),
        "level_counts": [len(partition.level(i)) for i in range(1, tdm.depth + 1)],
        "coverage_total": sum(e.coverage for e in tdm.hyperedges),
        "achievement_histogram": histogram,
    }


def cmd_stats(args: argparse.Namespace) -> int:
    stats = model_stats(_load_model(args.model))
    if args.format == "json":
        _emit(json.dumps(stats, indent=2) + "\n", args.out)
        return 0
    lines = [
        f"vertices: {stats['vertices']}",
        f"hyperedges: {stats['hyperedges']}",
        f"zero-coverage sets: {stats['zero_coverage_sets']}",
        "level counts: " + "/".join(str(c) for c in stats["level_counts"]),
        f"coverage total: {stats['coverage_total']}",
        "achievement histogram (10 bins): "
        + " ".join(str(c) for c in stats["achievement_histogram"]),
    ]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    addr = args.addr or os.environ.get("TDM_ADDR", "127.0.0.1:8000")
    host, _, port = addr.rpartition(":")
    if not host or not port.isdigit():
        raise FilterError(f"bad address {addr!r}, expected HOST:PORT")
    data_dir = args.data_dir or os.environ.get("TDM_DATA_DIR")
    app = create_app(data_dir=data_dir)
    uvicorn.run(app, host=host, port=int(port), log_level="info")
    return 0


def _add_view_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--topics", help="comma-separated topic labels to select")
    parser.add_argument("--topic-mode", choices=("any", "all"), default="any")
    parser.add_argument("--achv-min", help="inclusive lower achievement bound in [0,1]")
    parser.add_argument("--achv-max", help="inclusive upper achievement bound in [0,1]")
    parser.add_argument("--achv-extremum", choices=("level-min", "level-max"))
    parser.add_argument("--cov-min", type=int, help="inclusive lower coverage bound")
    parser.add_argument("--cov-max", type=int, help="inclusive upper coverage bound")
    parser.add_argument("--cov-extremum", choices=("level-min", "level-max"))
    parser.add_argument("--mode", choices=("cumulative", "accumulative"), default="cumulative")
    parser.add_argument("--level", type=int, help="level of interest (default: deepest)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topicmesh",
        description="Build, filter, and render two-weighted topic hypergraphs "
        "from assessment CSV data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build a model from SQA and QT CSV files")
    p.add_argument("sqa", help="student-question-answer CSV path")
    p.add_argument("qt", help="question-topic CSV path")
    p.add_argument("--out", help="model JSON output path (default: stdout)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("view", help="render a filtered view of a built model")
    p.add_argument("model", help="model JSON path")
    _add_view_flags(p)
    p.add_argument("--format", choices=("svg", "json", "dot"), default="svg")
    p.add_argument("--strip", action="store_true", help="one panel per level")
    p.add_argument(
        "--include-empty", action="store_true", help="keep empty levels in the strip"
    )
    p.add_argument(
        "--hide-greyed", action="store_true", help="drop filtered-out edges entirely"
    )
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--report", help="also write the JSON selection report here")
    p.set_defaults(func=cmd_view)

    p = sub.add_parser("generate", help="emit a seeded synthetic dataset")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--students", type=int, default=6)
    p.add_argument("--questions", type=int, default=15)
    p.add_argument("--topics", type=int, default=6)
    p.add_argument("--min-arity", type=int, default=1)
    p.add_argument("--max-arity", type=int, default=4)
    p.add_argument("--sqa-out", default="sqa.csv")
    p.add_argument("--qt-out", default="qt.csv")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("stats", help="summarize a built model")
    p.add_argument("model", help="model JSON path")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--out", help="output path (default: stdout)")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="run the HTTP view service")
    p.add_argument("--addr", help="HOST:PORT (default: $TDM_ADDR or 127.0.0.1:8000)")
    p.add_argument("--data-dir", help="dataset persistence dir (default: $TDM_DATA_DIR)")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataFormatError, FilterError, ModelError, GenerationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
