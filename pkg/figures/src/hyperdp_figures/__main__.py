"""Entry point: python -m hyperdp_figures FIGSPEC.json"""

import json
import sys

from .render import render
from .spec import FigureSpec, SchemaError


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: hyperdp-figures FIGSPEC.json", file=sys.stderr)
        return 2
    try:
        spec = FigureSpec.from_json_file(argv[0])
        png, svg = render(spec)
    except (SchemaError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(json.dumps({"png": png, "svg": svg}))
    return 0


if __name__ == "__main__":
    sys.exit(main())
