"""Value sets C_n(z), B_n(z) of sign/quaternary power sums and their dimension.

C_n(z) = {sum_{k<=n} x_k z^k : x_k = +-1} obeys C_n = {+-1 + z w : w in C_{n-1}};
B_n(z) is the same over {1+i, 1-i, -1+i, -1-i}.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .littlewood import Alphabet, BudgetExceeded

DEFAULT_BUDGET = 10**7


class DegenerateFit(ValueError):
    def __init__(self, msg, result=None):
        super().__init__(msg)
        self.result = result


@dataclass
class ValueSet:
    z: complex
    alphabet: Alphabet
    n: int
    points: np.ndarray
    tail_radius: float

    def __len__(self):
        return len(self.points)


def tail_radius(z: complex, alphabet: Alphabet, n: int) -> float:
    """max|a| sum_{k>n} |z|^k: every limit point is this close to C_n."""
    r = abs(z)
    if r >= 1:
        return math.inf
    amax = float(np.max(np.abs(Alphabet(alphabet).letters)))
    return amax * r ** (n + 1) / (1 - r)


def iterate_value_set(z: complex, alphabet: Alphabet | str, n: int, budget: int = DEFAULT_BUDGET) -> ValueSet:
    """All |A|^{n+1} partial sums, built by the recurrence from C_0 = A."""
    alphabet = Alphabet(alphabet)
    if n < 0:
        raise ValueError("depth must be >= 0")
    A = alphabet.letters
    size = alphabet.size ** (n + 1)
    if size > budget:
        raise BudgetExceeded(f"{size} points exceed the budget of {budget}")
    z = complex(z)
    pts = A.copy()
    for _ in range(n):
        pts = (A[:, None] + z * pts[None, :]).ravel()
    return ValueSet(z, alphabet, n, pts, tail_radius(z, alphabet, n))


# ---------------------------------------------------------------------------
# box counting


@dataclass
class BoxDimension:
    estimate: float
    r2: float
    scales: list = field(default_factory=list)
    counts: list = field(default_factory=list)
    degenerate: bool = False

    def to_dict(self):
        return asdict(self)


def box_counts(points, scales) -> list[int]:
    """Occupied half-open boxes [o + i d, o + (i+1) d) anchored at the lower-left corner."""
    p = np.asarray(points, dtype=complex).ravel()
    xy = np.column_stack([p.real, p.imag])
    origin = xy.min(axis=0)
    out = []
    for d in scales:
        idx = np.floor((xy - origin) / d).astype(np.int64)
        key = idx[:, 0] * (int(idx[:, 1].max()) + 1) + idx[:, 1]
        out.append(int(len(np.unique(key))))
    return out


def set_diameter(points) -> float:
    p = np.asarray(points, dtype=complex)
    return float(math.hypot(np.ptp(p.real), np.ptp(p.imag)))


def box_dimension(points, scale_range=None, num_scales=None, tail: float | None = None, strict: bool = False) -> BoxDimension:
    """Slope of log N(delta) against log(1/delta) on scales spaced by factors of 2.

    Default range: 4 * tail (when given) up to diameter / 4.  With
    ``num_scales`` the range is split geometrically into that many scales
    instead.  The result is flagged degenerate (or DegenerateFit raised,
    when ``strict``) for fewer than 3 scales or r^2 < 0.9.
    """
    pts = np.asarray(points, dtype=complex).ravel()
    if scale_range is None:
        diam = set_diameter(pts)
        lo = 4 * tail if tail else diam / 2**10
        scale_range = (lo, diam / 4)
    dmin, dmax = map(float, scale_range)
    if num_scales is None:
        k = int(math.floor(math.log2(dmax / dmin) + 1e-9)) + 1 if dmax >= dmin else 0
        scales = [dmax / 2**i for i in range(max(k, 0))]
    else:
        scales = list(np.geomspace(dmax, dmin, num_scales))
    if len(scales) < 3:
        res = BoxDimension(math.nan, math.nan, scales, [], True)
        if strict:
            raise DegenerateFit("fewer than 3 scales", res)
        return res
    counts = box_counts(pts, scales)
    x = np.log(1.0 / np.asarray(scales))
    y = np.log(np.asarray(counts, dtype=float))
    slope, icpt = np.polyfit(x, y, 1)
    resid = y - (slope * x + icpt)
    ss = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid**2).sum()) / ss if ss > 0 else 0.0
    res = BoxDimension(float(slope), r2, [float(s) for s in scales], counts, r2 < 0.9)
    if strict and res.degenerate:
        raise DegenerateFit(f"poor fit (r^2 = {r2:.3f})", res)
    return res


def dimension_bound(z: complex, alphabet: Alphabet | str) -> float:
    """Proven upper bound k log 2 / log(1/|z|) (k = 1 for +-1, 2 for quaternary), capped at 2."""
    r = abs(z)
    if not 0 < r < 1:
        raise ValueError("need 0 < |z| < 1")
    k = 1 if Alphabet(alphabet) is Alphabet.PM1 else 2
    return min(2.0, k * math.log(2) / math.log(1 / r))


def conjectured_dimension(z: complex, alphabet: Alphabet | str) -> float:
    """Reported next to estimates only; never asserted."""
    z = complex(z)
    r = abs(z)
    if Alphabet(alphabet) is Alphabet.PM1:
        cap = 1.0 if z.imag == 0 else 2.0
        return min(cap, math.log(2) / math.log(1 / r))
    return min(2.0, 2 * math.log(2) / math.log(1 / r))


def bound_check(z: complex, alphabet, estimate: float, slack: float = 0.1) -> bool:
    return estimate <= dimension_bound(z, alphabet) + slack


# ---------------------------------------------------------------------------
# comparison with a rectangle


def hausdorff_distance_to_rect(points, rect, spacing: float) -> float:
    """Symmetric Hausdorff distance between a point set and a filled rectangle.

    The rectangle side is sampled on a grid of step <= ``spacing`` that
    includes its edges and corners; the set side is exact (distance of each
    point to the rectangle).
    """
    xmin, xmax, ymin, ymax = map(float, rect)
    p = np.asarray(points, dtype=complex).ravel()
    dx = np.maximum(np.maximum(xmin - p.real, p.real - xmax), 0.0)
    dy = np.maximum(np.maximum(ymin - p.imag, p.imag - ymax), 0.0)
    set_to_rect = float(np.hypot(dx, dy).max())

    nx = int(math.ceil((xmax - xmin) / spacing)) + 1
    ny = int(math.ceil((ymax - ymin) / spacing)) + 1
    gx = np.linspace(xmin, xmax, nx)
    gy = np.linspace(ymin, ymax, ny)
    tree = cKDTree(np.column_stack([p.real, p.imag]))
    rect_to_set = 0.0
    rows = max(1, (1 << 20) // nx)
    for i in range(0, ny, rows):
        yy = gy[i : i + rows]
        grid = np.column_stack([np.tile(gx, len(yy)), np.repeat(yy, nx)])
        d, _ = tree.query(grid)
        rect_to_set = max(rect_to_set, float(d.max()))
    return max(set_to_rect, rect_to_set)


def dimension_report(vs: ValueSet, bd: BoxDimension) -> dict:
    z = complex(vs.z)
    return {
        "z": [z.real, z.imag],
        "alphabet": vs.alphabet.value,
        "depth": vs.n,
        "points": len(vs),
        "tail_radius": vs.tail_radius,
        "scales": bd.scales,
        "counts": bd.counts,
        "estimate": bd.estimate,
        "r2": bd.r2,
        "degenerate": bd.degenerate,
        "bound": dimension_bound(z, vs.alphabet),
        "within_bound": bool(bound_check(z, vs.alphabet, bd.estimate)) if not math.isnan(bd.estimate) else None,
        "conjectured": conjectured_dimension(z, vs.alphabet),
    }
