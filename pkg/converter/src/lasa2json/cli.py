"""Command line: lasa2json IN.mat OUT.json [--allow-any-count]."""

from __future__ import annotations

import argparse
import json
import sys

from .converter import SchemaError, convert

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lasa2json",
        description="Convert a LASA handwriting MAT-file into a demonstration JSON file.",
    )
    parser.add_argument("mat_path", help="input MAT-file")
    parser.add_argument("json_path", help="output JSON file")
    parser.add_argument(
        "--allow-any-count",
        action="store_true",
        help="accept MAT sources with a demonstration count other than 7",
    )
    return parser


def _emit_error(kind: str, message: str) -> None:
    json.dump({"error": kind, "message": message}, sys.stderr)
    sys.stderr.write("\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        convert(args.mat_path, args.json_path, allow_any_count=args.allow_any_count)
    except SchemaError as exc:
        _emit_error("schema", str(exc))
        return EXIT_INVALID
    except OSError as exc:
        _emit_error("io", str(exc))
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
