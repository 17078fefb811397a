#!/usr/bin/env python3
"""Regenerate the illustrative graphs as graphviz files.

Render with e.g.:  dot -Tpng -O out/figs/linear_7.dot
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "src"))

from prefixauth import schemes  # noqa: E402

FIGS = [
    ("linear", 7),        # the linear linking scheme around certify(3, 7)
    ("skiplist", 8),      # the skip list around certificatepool(5)
    ("antimonotone-simple", 15),
    ("antimonotone-optimal", 13),
    ("tat", 8),           # threaded authentication tree around pool(6)
    ("hypercore", 8),
    ("ct", 8),
]


def main() -> int:
    outdir = pathlib.Path("out/figs")
    outdir.mkdir(parents=True, exist_ok=True)
    for name, n in FIGS:
        dot = schemes.export_dot(schemes.get_scheme(name), n)
        path = outdir / f"{name}_{n}.dot"
        path.write_text(dot)
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
