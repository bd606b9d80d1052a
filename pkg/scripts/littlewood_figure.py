"""Root-set images Z_n (+-1) and W_n (quaternary) with hole radii at the unit points.

Writes roots, PGM rasters and reports under the output directory, then
prints how the hole at +1 shrinks with n.
Usage: python scripts/littlewood_figure.py [out_dir] [resolution]
"""

import os
import sys

from raf.cli import main
from raf.littlewood import enumerate_roots, hole_radius


def hole_trend(ns=range(5, 14, 2)):
    for n in ns:
        at = enumerate_roots(n, "pm1", quotient=True)
        print(f"Z_{n:<2d}  roots {len(at.roots):7d}  hole(+1) {hole_radius(at, 1.0):.5f}  hole(i) {hole_radius(at, 1j):.5f}")


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/littlewood"
    res = sys.argv[2] if len(sys.argv) > 2 else "2047"
    for n, alph in (("13", "pm1"), ("8", "quaternary")):
        rc = main(["littlewood", "--n", n, "--alphabet", alph, "--raster", res, "--quotient", "--out", out])
        if rc:
            sys.exit(rc)
    hole_trend()
    print("wrote", sorted(os.listdir(out)))
