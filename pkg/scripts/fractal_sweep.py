"""Box-dimension estimates of C_n(z), B_n(z) against the proven bound over a sweep of |z|.

Usage: python scripts/fractal_sweep.py [angle]
"""

import math
import sys

import numpy as np

from raf.fractal import box_dimension, conjectured_dimension, dimension_bound, iterate_value_set

RADII = (0.3, 0.45, 0.6, 0.707)
DEPTH = {"pm1": 20, "quaternary": 10}


def main(angle=0.7):
    print(f"{'alphabet':10s} {'|z|':>6s} {'estimate':>9s} {'r2':>6s} {'bound':>6s} {'conj.':>6s}")
    for alph, depth in DEPTH.items():
        for r in RADII:
            z = r * np.exp(1j * angle)
            vs = iterate_value_set(z, alph, depth)
            bd = box_dimension(vs.points, tail=vs.tail_radius)
            print(f"{alph:10s} {r:6.3f} {bd.estimate:9.4f} {bd.r2:6.3f} "
                  f"{dimension_bound(z, alph):6.3f} {conjectured_dimension(z, alph):6.3f}")
    vs = iterate_value_set(1 / 3, "pm1", 16)
    bd = box_dimension(vs.points, tail=vs.tail_radius)
    print(f"Cantor case C_16(1/3): {bd.estimate:.4f} (log2/log3 = {math.log(2) / math.log(3):.4f})")


if __name__ == "__main__":
    main(*(float(a) for a in sys.argv[1:2]))
