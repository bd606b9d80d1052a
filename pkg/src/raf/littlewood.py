"""Exhaustive root sets of polynomials with coefficients from a fixed alphabet.

Z_n collects the roots of all sum_{k<=n} X_k z^k with X_k = +-1, W_n the
same for X_k in {1+i, 1-i, -1+i, -1-i}.  Coefficient sequences are
enumerated as base-|A| integers, little-endian in the coefficient index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.spatial import cKDTree

from . import parallel
from .raster import RasterGrid, raster_accumulate
from .zerofinder import aberth_batch


class Alphabet(str, Enum):
    PM1 = "pm1"
    QUATERNARY = "quaternary"

    @property
    def letters(self) -> np.ndarray:
        if self is Alphabet.PM1:
            return np.array([1.0 + 0j, -1.0 + 0j])
        return np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j])

    @property
    def size(self) -> int:
        return len(self.letters)


class BudgetExceeded(ValueError):
    pass


DEFAULT_BUDGET = 10**7
CHUNK = 1 << 14


def coefficient_block(n: int, alphabet: Alphabet, lo: int, hi: int) -> np.ndarray:
    """Rows lo..hi-1 of the enumeration: row m has X_k = A[digit_k(m)]."""
    A = alphabet.letters
    b = alphabet.size
    m = np.arange(lo, hi, dtype=np.int64)
    digits = (m[:, None] // (b ** np.arange(n + 1, dtype=np.int64))[None, :]) % b
    return A[digits]


def _roots_range(lo: int, hi: int, n: int, alphabet: Alphabet) -> np.ndarray:
    out = []
    for a in range(lo, hi, CHUNK):
        C = coefficient_block(n, alphabet, a, min(hi, a + CHUNK))
        out.append(aberth_batch(C).ravel())
    return np.concatenate(out) if out else np.zeros(0, complex)


def sort_points(z: np.ndarray) -> np.ndarray:
    return z[np.lexsort((z.imag, z.real))]


@dataclass
class RootAtlas:
    n: int
    alphabet: Alphabet
    roots: np.ndarray
    raster: RasterGrid | None = None
    symmetries: dict = field(default_factory=dict)

    @property
    def expected_count(self) -> int:
        return self.n * self.alphabet.size ** (self.n + 1)

    def meta(self) -> dict:
        return {
            "n": self.n,
            "alphabet": self.alphabet.value,
            "count": int(len(self.roots)),
            "symmetries": self.symmetries,
        }


def enumerate_roots(
    n: int,
    alphabet: Alphabet | str = Alphabet.PM1,
    budget: int = DEFAULT_BUDGET,
    workers: int | None = 1,
    quotient: bool = False,
) -> RootAtlas:
    """Roots (with multiplicity) of every degree-n polynomial over the alphabet.

    ``quotient=True`` solves one polynomial per orbit of global unit
    factors and coefficient conjugation, and rebuilds the rest from it.
    The result is globally sorted by (Re, Im).
    """
    alphabet = Alphabet(alphabet)
    if n < 1:
        raise ValueError("degree must be >= 1")
    total = n * alphabet.size ** (n + 1)
    if total > budget:
        raise BudgetExceeded(f"{total} roots exceed the budget of {budget}")
    if quotient:
        roots = _quotient_roots(n, alphabet, workers)
    else:
        count = alphabet.size ** (n + 1)
        parts = parallel.map_ranges(_roots_range, count, workers, (n, alphabet), per_worker=2)
        roots = np.concatenate(parts)
    return RootAtlas(n, alphabet, sort_points(roots))


def _conj_partner(idx: np.ndarray, n: int, alphabet: Alphabet) -> np.ndarray:
    """Index of i * conj(X) for quaternary X with X_0 = 1+i (stays in that slice)."""
    A = alphabet.letters
    b = alphabet.size
    digits = (idx[:, None] // (b ** np.arange(n + 1))[None, :]) % b
    Y = 1j * np.conj(A[digits])
    lookup = {complex(a): k for k, a in enumerate(A)}
    yd = np.vectorize(lambda v: lookup[complex(v)])(Y)
    return (yd * (b ** np.arange(n + 1))[None, :]).sum(axis=1)


def _quotient_roots(n: int, alphabet: Alphabet, workers) -> np.ndarray:
    b = alphabet.size
    # sequences with X_0 = A[0] are the indices divisible by b
    reps = np.arange(b ** (n + 1) // b, dtype=np.int64) * b
    units = b  # +-1 for pm1, {1, i, -1, -i} for quaternary: same roots
    if alphabet is Alphabet.PM1:
        C = coefficient_block(n, alphabet, 0, b ** (n + 1))[reps]
        r = aberth_batch(C).ravel()
        return np.tile(r, units)
    partner = _conj_partner(reps, n, alphabet)
    keep = reps <= partner
    own = reps[keep]
    C = coefficient_block(n, alphabet, 0, b ** (n + 1))[own]
    r = aberth_batch(C)
    paired = partner[keep] != own
    full = np.concatenate([r.ravel(), np.conj(r[paired]).ravel()])
    return np.tile(full, units)


# ---------------------------------------------------------------------------
# metrics and symmetry checks


def hole_radius(roots, center: complex, exclusion_tol: float = 1e-6) -> float:
    """Distance from ``center`` to the nearest root farther than ``exclusion_tol``."""
    r = getattr(roots, "roots", roots)
    d = np.abs(np.asarray(r, dtype=complex) - center)
    d = d[d > exclusion_tol]
    return float(d.min()) if len(d) else math.inf


def _ball_counts_equal(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    pa = np.column_stack([a.real, a.imag])
    pb = np.column_stack([b.real, b.imag])
    ta, tb = cKDTree(pa), cKDTree(pb)
    for pts in (pa, pb):
        na = ta.query_ball_point(pts, tol, return_length=True)
        nb = tb.query_ball_point(pts, tol, return_length=True)
        if np.any(na != nb):
            return False
    return True


def multiset_close(a, b, tol: float = 1e-9) -> bool:
    """True when a and b agree as multisets up to ``tol``.

    Both sides are snapped to a ``tol`` grid and sorted; positions that
    disagree after sorting (snapping can split near-ties) are re-checked
    by counting neighbours within ``tol`` on each side.
    """
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if len(a) != len(b):
        return False
    if len(a) == 0:
        return True
    ka = np.rint(np.column_stack([a.real, a.imag]) / tol)
    kb = np.rint(np.column_stack([b.real, b.imag]) / tol)
    ia = np.lexsort((ka[:, 1], ka[:, 0]))
    ib = np.lexsort((kb[:, 1], kb[:, 0]))
    sa, sb = a[ia], b[ib]
    bad = np.abs(sa - sb) > tol
    if not bad.any():
        return True
    # widen the mismatch window so near-ties land in the same subset
    idx = np.nonzero(bad)[0]
    window = np.unique(np.clip(np.concatenate([idx + d for d in range(-4, 5)]), 0, len(a) - 1))
    return _ball_counts_equal(sa[window], sb[window], tol)


def check_symmetries(atlas: RootAtlas, tol: float = 1e-9) -> dict:
    z = atlas.roots
    out = {
        "conjugation": multiset_close(z, np.conj(z), tol),
        "negation": multiset_close(z, -z, tol),
        "inversion": multiset_close(z, 1.0 / z, tol),
    }
    if atlas.alphabet is Alphabet.QUATERNARY:
        out["rotation_i"] = multiset_close(z, 1j * z, tol)
    atlas.symmetries = out
    return out


def atlas_raster(atlas: RootAtlas, resolution: int, window=(-2.0, 2.0, -2.0, 2.0)) -> RasterGrid:
    atlas.raster = raster_accumulate(atlas.roots, window, resolution)
    return atlas.raster


def prefix_roots(signs, n: int, radius: float) -> np.ndarray:
    """Roots of p_n(X_0..X_n; z) inside |z| <= radius, for a fixed sign sequence."""
    from .zerofinder import aberth_roots

    r = aberth_roots(np.asarray(signs[: n + 1], dtype=complex)).flat()
    return sort_points(r[np.abs(r) <= radius])


def hausdorff(a, b) -> float:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if len(a) == 0 and len(b) == 0:
        return 0.0
    if len(a) == 0 or len(b) == 0:
        return math.inf
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))
