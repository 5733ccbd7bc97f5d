"""Command-line entry point: ``metamono expand`` and ``metamono analyze``."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .frontend import ExpansionError, expand_program


def _threshold(text: str) -> float:
    v = float(text)
    if not 0 < v <= 1:
        raise argparse.ArgumentTypeError("threshold must be in (0, 1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="metamono", description="Specialization expander and workaround analyzer for Rust sources.")
    p.add_argument("-v", "--verbose", action="store_true", help="log warnings and progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("expand", help="expand #[when] impls and spec! markers in one file")
    e.add_argument("input", help="Rust source file")
    e.add_argument("-o", "--output", help="write the expanded unit here instead of stdout")
    e.add_argument("--max-disjuncts", type=int, default=256, help="cap on disjuncts per canonical predicate")
    e.add_argument("--max-atoms", type=int, default=64, help="cap on atoms per disjunct")
    e.add_argument("--emit-registry", metavar="FILE", help="dump the specialization registry as JSON")

    a = sub.add_parser("analyze", help="report manual-specialization workarounds in Rust corpora")
    a.add_argument("paths", nargs="+", help="project directories (or single .rs files), one report entry each")
    a.add_argument("--threshold", type=_threshold, action="append", help="similarity threshold (repeatable, default 0.9)")
    a.add_argument("--format", choices=("json", "csv"), default="json", help="report format")
    a.add_argument("-o", "--output", required=True, help="report destination")
    a.add_argument("--max-nodes", type=int, default=20_000, help="skip pairs whose syntax trees exceed this many nodes")
    a.add_argument("--name-sim", type=float, default=0.6, help="minimum name similarity for two functions to be compared")
    a.add_argument("--jobs", type=int, default=1, help="worker processes for pair scoring")
    return p


def _expand(args) -> int:
    try:
        with open(args.input, encoding="utf-8") as fh:
            src = fh.read()
    except OSError as err:
        print(f"error: cannot read {args.input}: {err}", file=sys.stderr)
        return 1
    try:
        result = expand_program(src, args.max_disjuncts, args.max_atoms)
    except ExpansionError as err:
        for d in err.diagnostics:
            print(d.render(args.input, src), file=sys.stderr)
        return 1
    try:
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(result.output)
        else:
            sys.stdout.write(result.output)
        if args.emit_registry:
            with open(args.emit_registry, "w", encoding="utf-8") as fh:
                json.dump(result.registry.to_json(), fh, indent=2)
                fh.write("\n")
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    return 0


def _analyze(args) -> int:
    from .analyzer.records import rust_files
    from .analyzer.report import analyze, emit_report

    report = analyze(args.paths, args.threshold or [0.9], args.name_sim, args.max_nodes, max(1, args.jobs))
    files = sum(p["files"] for p in report["projects"])
    parsed = sum(p["parsed_files"] for p in report["projects"])
    try:
        emit_report(report, args.format, args.output)
    except OSError as err:
        print(f"error: cannot write {args.output}: {err}", file=sys.stderr)
        return 1
    if files and not parsed:
        print("error: no parseable input", file=sys.stderr)
        return 2
    missing = [p for p in args.paths if not rust_files(p)]
    for p in missing:
        logging.getLogger(__name__).warning("no .rs files under %s", p)
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(levelname)s: %(message)s")
    return _expand(args) if args.command == "expand" else _analyze(args)


if __name__ == "__main__":
    sys.exit(main())
