#!/usr/bin/env python3
"""Render level-L approximations of the shipped carpets (or given system
files) as binary PPM images."""

import argparse
from pathlib import Path

from selfaffine.files import load_fixture, parse_spec, render


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("specs", nargs="*", help="system files (default: shipped d1, d2, d3)")
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--size", default="243x512", help="WxH in pixels")
    p.add_argument("--out", default="renders", help="output directory")
    args = p.parse_args()

    w, h = (int(v) for v in args.size.lower().split("x"))
    specs = [(Path(s).stem, parse_spec(s)) for s in args.specs] or \
        [(k, load_fixture(k)) for k in ("d1", "d2", "d3")]
    for name, spec in specs:
        path = Path(args.out) / f"{name}_L{args.depth}.ppm"
        img = render(spec.to_system(), args.depth, w, h, path)
        print(f"{path}: {int(img.sum())} of {w * h} pixels filled")


if __name__ == "__main__":
    main()
