"""Command line: extract a workflow object from a module and write the document.

    graphgate-extract <framework> <module:attr> -o out.json
"""

from __future__ import annotations

import argparse
import importlib
import sys
from pathlib import Path
from typing import Optional, Sequence

from .adk import extract_adk
from .autogen import extract_autogen
from .crewai import extract_crewai
from .interchange import ExtractionError
from .langgraph import extract_langgraph

EXTRACTORS = {
    "langgraph": extract_langgraph,
    "crewai": extract_crewai,
    "autogen": extract_autogen,
    "adk": extract_adk,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="graphgate-extract")
    parser.add_argument("framework", choices=sorted(EXTRACTORS))
    parser.add_argument("target", metavar="module:attr", help="import path of the workflow object")
    parser.add_argument("-o", "--output", required=True, help="output document path")
    try:
        args = parser.parse_args(argv)
    except SystemExit:
        return 64

    module_name, sep, attr = args.target.partition(":")
    if not sep or not attr:
        print("target must look like module:attr", file=sys.stderr)
        return 64
    try:
        module = importlib.import_module(module_name)
        workflow = getattr(module, attr)
    except (ImportError, AttributeError) as exc:
        print(f"cannot load {args.target!r}: {exc}", file=sys.stderr)
        return 1
    try:
        result = EXTRACTORS[args.framework](workflow)
    except ExtractionError as exc:
        print(f"extraction failed: {exc}", file=sys.stderr)
        return 1
    Path(args.output).write_bytes(result.document)
    for note in result.diagnostics:
        print(f"note: {note}", file=sys.stderr)
    return 0


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
