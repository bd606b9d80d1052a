"""Zero counting and localization for analytic functions on disks.

Counting is by the argument principle: the winding number of f along the
contour, accumulated from sampled argument increments with adaptive
refinement.  Localization subdivides squares by winding counts and
finishes with Newton on the coefficient vector.  ``aberth_roots`` finds
all roots of an explicit polynomial simultaneously.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _jit

TWO_PI = 2.0 * math.pi
# switch on the Taylor-shift variation bound when the local one asks for more samples than this
LIPSCHITZ_TIGHTEN = 1 << 12
EPS = np.finfo(float).eps
NOISE_ULPS = 64
# deterministic relative radius perturbations tried on BoundaryZero
JITTER = (1e-3, -1e-3, 3e-3, -3e-3, 1e-2, -1e-2, 3e-2, -3e-2)


class BoundaryZero(ArithmeticError):
    """|f| (nearly) vanishes on the contour; perturb the contour and retry."""


class NonConvergence(ArithmeticError):
    """Root iteration or subdivision did not resolve every zero.

    ``zeroset`` carries what was found, including unresolved cluster disks.
    """

    def __init__(self, msg, zeroset=None):
        super().__init__(msg)
        self.zeroset = zeroset


def polyval(coeffs, z):
    """sum_n coeffs[n] z^n for scalar or array z (ascending coefficients)."""
    c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    za = np.asarray(z, dtype=np.complex128)
    out = _jit.horner_many(c, np.ascontiguousarray(za.ravel())).reshape(za.shape)
    return out[()] if out.ndim == 0 else out


class Analytic:
    """An evaluatable function with an analytic derivative.

    Built from an ascending coefficient vector (anything with ``.coeffs``
    works too) or from a pair of vectorized callables ``f``, ``df``.
    """

    def __init__(self, f=None, df=None, coeffs=None):
        if coeffs is not None:
            self.coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
            if len(self.coeffs) == 0:
                self.coeffs = np.zeros(1, dtype=np.complex128)
        else:
            self.coeffs = None
            self._f, self._df = f, df

    @classmethod
    def wrap(cls, obj) -> "Analytic":
        if isinstance(obj, Analytic):
            return obj
        if hasattr(obj, "coeffs"):
            return cls(coeffs=obj.coeffs)
        if callable(obj):
            return cls(f=obj, df=getattr(obj, "derivative", None))
        return cls(coeffs=obj)

    def __call__(self, z):
        if self.coeffs is not None:
            return polyval(self.coeffs, z)
        return np.asarray(self._f(np.asarray(z, dtype=complex)), dtype=complex)

    def derivative(self, z):
        if self.coeffs is not None:
            return polyval(self.coeffs[1:] * np.arange(1, len(self.coeffs)), z)
        if self._df is None:
            raise TypeError("no derivative supplied")
        return np.asarray(self._df(np.asarray(z, dtype=complex)), dtype=complex)

    def scale(self, z) -> np.ndarray:
        """Rounding scale sum |c_k||z|^k (1 for generic callables)."""
        if self.coeffs is None:
            return np.ones(np.shape(z))
        return polyval(np.abs(self.coeffs).astype(complex), np.abs(z)).real

    def noise_floor(self, center: complex, rho: float) -> float:
        """Rounding level of f on |z - center| <= rho (0 for callables)."""
        if self.coeffs is None:
            return 0.0
        return NOISE_ULPS * EPS * float(self.scale(abs(center) + rho))

    def variation(self, center: complex, rho: float, speed: float, arc_radius: float = 0.0):
        """Bounds on how far f can move along a contour segment (None for callables).

        The contour lies in |z - center| <= rho and moves at ``speed`` per
        unit of its parameter; ``arc_radius`` > 0 marks circular arcs.
        """
        if self.coeffs is None:
            return None
        return _Variation(self.coeffs, complex(center), rho, speed, arc_radius)

    def newton(self, z0: complex, mult: int = 1, maxit: int = 80):
        if self.coeffs is not None:
            return _jit.newton(self.coeffs, complex(z0), float(mult), maxit)
        if self._df is None:
            raise TypeError("Newton refinement needs an analytic derivative")
        z, last = complex(z0), math.inf
        for _ in range(maxit):
            d = complex(self._df(np.asarray(z)))
            if d == 0:
                return z, False, last
            step = mult * complex(self._f(np.asarray(z))) / d
            z -= step
            if abs(step) <= 4e-16 * max(abs(z), 1e-300):
                return z, True, abs(step)
            last = abs(step)
        return z, last < 1e-12 * max(1.0, abs(z)), last


class _Variation:
    """sup |f(path(s)) - f(path(t_k))| over a segment [t_k, t_k + dt], bounded two ways.

    ``local``: dt * speed * sum k |c_k| R^{k-1} with R the largest modulus
    on the segment (cheap; tight away from clusters).  ``tight``: one
    constant for the whole contour from the Taylor expansion at its
    center (costs a Taylor shift; needed on tiny circles around
    multiple zeros, where the local bound is far too pessimistic).
    """

    def __init__(self, c, center, rho, speed, arc_radius):
        self.c, self.center, self.rho, self.speed, self.arc = c, center, rho, speed, arc_radius
        n = len(c)
        # k |c_k| as a real series in R^{k-1}
        self.dabs = np.abs(c[1:]) * np.arange(1, n) if n > 1 else np.zeros(1)

    def local(self, z, z_next, dt):
        R = np.maximum(np.abs(z), np.abs(z_next))
        if self.arc:
            R = R + self.arc * (1 - np.cos(0.5 * dt))  # sagitta of the arc
        return self.speed * dt * _jit.real_horner_many(self.dabs, np.ascontiguousarray(R))

    def tight(self) -> float:
        b = _jit.taylor_shift(self.c, self.center)
        return self.speed * _jit.derivative_bound(b, self.rho)


# ---------------------------------------------------------------------------
# winding numbers


def _contour_winding(
    f: Analytic,
    path: Callable[[np.ndarray], np.ndarray],
    period: float,
    min_samples: int = 64,
    max_samples: int = 1 << 20,
    max_step: float = math.pi / 2,
    rel_floor: float = 1e-11,
    variation: _Variation | None = None,
    noise: float = 0.0,
) -> int:
    """Winding number of f along the closed curve t -> path(t), t in [0, period).

    Segments whose argument increment reaches ``max_step`` are bisected
    until every increment is below it.  With a ``variation`` bound,
    segments along which f may move by |f(t_k)| or more are bisected
    too; afterwards f maps each segment into a disk around f(t_k) that
    misses 0, so no full turn can hide between two samples.  Values at
    or below ``noise`` (the rounding level of f) count as zeros.
    """
    t = np.linspace(0.0, period, min_samples, endpoint=False)
    z = path(t)
    v = f(z)
    dt = np.diff(np.append(t, period))
    var = variation.local(z, np.roll(z, -1), dt) if variation is not None else None
    L = None
    while True:
        absv = np.abs(v)
        scale = absv.max()
        if not np.isfinite(scale) or scale == 0 or absv.min() <= max(rel_floor * scale, noise):
            raise BoundaryZero("f vanishes (relative to its size) on the contour")
        inc = np.angle(np.roll(v, -1) / v)
        bad_seg = np.abs(inc) >= max_step
        if var is not None:
            if L is None and np.sum(var / absv) > LIPSCHITZ_TIGHTEN:
                L = variation.tight()
                var = np.minimum(var, L * dt)
            bad_seg |= var >= absv
        bad = np.nonzero(bad_seg)[0]
        if len(bad) == 0:
            total = inc.sum() / TWO_PI
            w = round(total)
            if abs(total - w) > 1e-6:
                raise BoundaryZero("non-integral winding; contour too close to a zero")
            return int(w)
        if len(t) + len(bad) > max_samples:
            raise BoundaryZero("sample cap reached while resolving the argument")
        mid = t[bad] + 0.5 * dt[bad]
        zm = path(mid)
        t = np.insert(t, bad + 1, mid)
        z = np.insert(z, bad + 1, zm)
        v = np.insert(v, bad + 1, f(zm))
        dt = np.diff(np.append(t, period))
        if var is not None:
            # only the two halves of each bisected segment need new bounds
            first = bad + np.arange(len(bad))
            halves = np.concatenate([first, first + 1])
            var = np.insert(var, bad + 1, 0.0)
            nxt = (halves + 1) % len(z)
            var[halves] = variation.local(z[halves], z[nxt], dt[halves])
            if L is not None:
                var[halves] = np.minimum(var[halves], L * dt[halves])


def _circle(center: complex, radius: float):
    return lambda t: center + radius * np.exp(1j * t)


def _rect(x0: float, x1: float, y0: float, y1: float):
    corners = np.array([complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)])

    def path(t):
        t = np.asarray(t)
        k = np.minimum(np.floor(t).astype(int), 3)
        s = t - k
        return corners[k] + s * (corners[(k + 1) % 4] - corners[k])

    return path


def winding_count(f, center: complex, radius: float, min_samples: int = 64, **kw) -> int:
    """Number of zeros of f in |z - center| < radius, with multiplicity.

    Raises BoundaryZero when f is (numerically) zero on the circle.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    fa = Analytic.wrap(f)
    center = complex(center)
    var = fa.variation(center, radius, radius, arc_radius=radius)
    noise = fa.noise_floor(center, radius)
    return _contour_winding(fa, _circle(center, radius), TWO_PI, min_samples, variation=var, noise=noise, **kw)


def robust_winding_count(f, center: complex, radius: float, **kw) -> tuple[int, float]:
    """winding_count with the deterministic radius jitter; returns (count, radius used)."""
    try:
        return winding_count(f, center, radius, **kw), radius
    except BoundaryZero:
        pass
    for j in JITTER:
        r = radius * (1 + j)
        try:
            return winding_count(f, center, r, **kw), r
        except BoundaryZero:
            continue
    raise BoundaryZero(f"every jittered circle around {center} hits a zero")


def rect_winding_count(f, x0: float, x1: float, y0: float, y1: float, min_samples: int = 64, **kw) -> int:
    """Zeros inside the open rectangle (x0, x1) x (y0, y1)."""
    fa = Analytic.wrap(f)
    center = complex(0.5 * (x0 + x1), 0.5 * (y0 + y1))
    rho = 0.5 * math.hypot(x1 - x0, y1 - y0)
    var = fa.variation(center, rho, max(x1 - x0, y1 - y0))
    noise = fa.noise_floor(center, rho)
    # corners must be sample points so that every segment is straight
    min_samples = 4 * -(-min_samples // 4)
    return _contour_winding(fa, _rect(x0, x1, y0, y1), 4.0, min_samples, variation=var, noise=noise, **kw)


def square_winding_count(f, center: complex, half: float, **kw) -> int:
    c = complex(center)
    return rect_winding_count(f, c.real - half, c.real + half, c.imag - half, c.imag + half, **kw)


# ---------------------------------------------------------------------------
# zero sets


@dataclass
class ZeroSet:
    zeros: list = field(default_factory=list)  # (location, multiplicity)
    center: complex = 0j
    radius: float = math.inf
    residual_tol: float = 1e-9
    certify_count: int = 0
    clusters: list = field(default_factory=list)  # (center, radius, count) unresolved

    @property
    def locations(self) -> np.ndarray:
        return np.array([z for z, _ in self.zeros], dtype=complex)

    @property
    def multiplicities(self) -> np.ndarray:
        return np.array([m for _, m in self.zeros], dtype=int)

    @property
    def total(self) -> int:
        return int(sum(m for _, m in self.zeros))

    def flat(self) -> np.ndarray:
        """Locations repeated by multiplicity."""
        return np.repeat(self.locations, self.multiplicities) if self.zeros else np.zeros(0, complex)

    def __len__(self):
        return len(self.zeros)

    def sort(self):
        self.zeros.sort(key=lambda zm: (zm[0].real, zm[0].imag))


# relative offsets of the split lines tried in turn when a child edge meets a zero
SPLIT_SHIFTS = (0.0, 0.013, -0.029, 0.047, -0.071, 0.11)


def _certify(f: Analytic, z: complex, cell, m: int, tol: float) -> tuple[int, float, complex] | None:
    """Winding count on a small circle about z that stays inside the cell.

    Simple zeros use a circle tied to the cell size.  For clusters (m > 1)
    z is first moved onto the nearby zero of f^(m-1), and the radius is
    ``tol`` (relative) or, if larger, 4x the radius at which the m-th
    Taylor term drops to the rounding noise of f.  Returns
    (count, radius, center) or None.
    """
    x0, x1, y0, y1 = cell
    scale = max(1.0, abs(z))
    side = max(x1 - x0, y1 - y0)
    if m == 1:
        rc = None
    else:
        rc = tol * scale
        if f.coeffs is not None:
            d = _jit.derivative_coeffs(f.coeffs, m - 1)
            w, ok, _ = _jit.newton(d, complex(z), 1.0, 60)
            if ok and abs(w - z) < 0.25 * side:
                z = complex(w)
            bm = abs(_jit.taylor_shift(f.coeffs, z)[m])
            if bm > 0:
                rc = max(rc, 4.0 * (f.noise_floor(z, 0.0) / bm) ** (1.0 / m))
    margin = min(z.real - x0, x1 - z.real, z.imag - y0, y1 - z.imag)
    if not margin > 0:
        return None
    if rc is None:
        rc = min(0.5 * margin, 0.25 * side, max(1e-6 * side, 1e-9 * scale))
    elif rc >= margin:
        return None
    try:
        return winding_count(f, z, rc), rc, z
    except BoundaryZero:
        return None


def _split(f: Analytic, cell):
    """Four children with their counts; split lines move off zeros if needed."""
    x0, x1, y0, y1 = cell
    for s in SPLIT_SHIFTS:
        xm = 0.5 * (x0 + x1) + s * (x1 - x0)
        ym = 0.5 * (y0 + y1) - 0.7 * s * (y1 - y0)
        kids = [(x0, xm, y0, ym), (xm, x1, y0, ym), (x0, xm, ym, y1), (xm, x1, ym, y1)]
        try:
            return [(k, rect_winding_count(f, *k)) for k in kids]
        except BoundaryZero:
            continue
    return None


def localize_zeros(
    f,
    center: complex,
    radius: float,
    tol: float = 1e-7,
    max_depth: int = 48,
    residual_tol: float = 1e-9,
) -> ZeroSet:
    """Every zero of f in the disk |z - center| < radius.

    The disk count comes from a (jittered) circle winding count.  The
    bounding square is then subdivided 4-way; a cell with count m first
    tries (modified) Newton from near its center, and a converged zero is
    accepted when a small circle around it, inside the cell, winds m
    times.  A cluster of m > 1 zeros is reported as one zero of
    multiplicity m when a circle of relative radius ``tol`` around the
    Newton limit winds m times.
    """
    fa = Analytic.wrap(f)
    center = complex(center)
    count, R = robust_winding_count(fa, center, radius)
    zs = ZeroSet([], center, R, residual_tol, count)
    if count == 0:
        return zs

    root = None
    for grow in (1.0, 1.001, 1.003, 1.01, 1.03):
        h = R * grow
        cell = (center.real - h, center.real + h, center.imag - h, center.imag + h)
        try:
            root = (cell, rect_winding_count(fa, *cell))
            break
        except BoundaryZero:
            continue
    if root is None:
        raise NonConvergence("bounding square meets a zero", zs)

    found: list[tuple[complex, int]] = []
    stack = [(root[0], root[1], 0)]
    while stack:
        cell, m, depth = stack.pop()
        if m == 0:
            continue
        x0, x1, y0, y1 = cell
        # start slightly off-center: symmetric inputs put critical points at centers
        z0 = complex(0.5 * (x0 + x1) + 0.031 * (x1 - x0), 0.5 * (y0 + y1) + 0.017 * (y1 - y0))
        z, ok, _ = fa.newton(z0, mult=m)
        if ok and np.isfinite(z):
            cert = _certify(fa, complex(z), cell, m, tol)
            if cert is not None and cert[0] == m:
                found.append((cert[2], m))
                continue
        kids = _split(fa, cell) if depth < max_depth else None
        if kids is None:
            zs.clusters.append((complex(0.5 * (x0 + x1), 0.5 * (y0 + y1)),
                                0.5 * math.hypot(x1 - x0, y1 - y0), m))
            continue
        if sum(n for _, n in kids) != m:
            raise NonConvergence("subdivision lost zeros (count not conserved)", zs)
        for k, n in reversed(kids):
            stack.append((k, n, depth + 1))

    zs.zeros = [(z, m) for z, m in found if abs(z - center) < R]
    zs.sort()
    if zs.clusters:
        raise NonConvergence(f"{len(zs.clusters)} unresolved cluster(s)", zs)
    if zs.total != count:
        raise NonConvergence(
            f"found multiplicity {zs.total} but the disk winds {count} times", zs
        )
    return zs


def residuals(f, zs: ZeroSet) -> np.ndarray:
    """|f(z)| / (sum |c_k| |z|^k) at each zero."""
    fa = Analytic.wrap(f)
    loc = zs.locations
    return np.abs(fa(loc)) / fa.scale(loc)


# ---------------------------------------------------------------------------
# simultaneous iteration

ABERTH_MAXIT = 500
ABERTH_OFFSET = 0.4


def cauchy_radius(coeffs) -> float:
    c = np.asarray(coeffs, dtype=complex)
    return 1.0 + float(np.max(np.abs(c[:-1] / c[-1]))) if len(c) > 1 else 1.0


def aberth_roots(poly) -> ZeroSet:
    """All roots of sum_k poly[k] z^k (ascending order), by Aberth-Ehrlich.

    Falls back to ``localize_zeros`` on the Cauchy disk if the iteration
    stalls (typically at multiple roots).
    """
    c = np.trim_zeros(np.asarray(poly, dtype=complex), "b")
    if len(c) == 0:
        raise ValueError("zero polynomial")
    n = len(c) - 1
    R = cauchy_radius(c)
    zs = ZeroSet([], 0j, R, 1e-8, n)
    if n == 0:
        return zs
    roots, ok = _jit.aberth_one(np.ascontiguousarray(c), ABERTH_MAXIT, ABERTH_OFFSET)
    if not ok:
        try:
            loc = localize_zeros(c, 0j, R * 1.01)
            loc.residual_tol = 1e-8
            loc.certify_count = n
            return loc
        except NonConvergence:
            pass  # keep the Aberth estimates; residuals are still reported
    zs.zeros = [(complex(z), 1) for z in roots]
    zs.sort()
    return zs


def aberth_batch(C: np.ndarray) -> np.ndarray:
    """Roots of many polynomials of equal degree, one row of C each.

    Rows that do not converge are redone through ``aberth_roots`` (with its
    fallback); roots are expanded by multiplicity so every row has exactly
    ``degree`` entries.
    """
    C = np.ascontiguousarray(C, dtype=np.complex128)
    roots, ok = _jit.aberth_batch(C, ABERTH_MAXIT, ABERTH_OFFSET)
    for i in np.nonzero(~ok)[0]:
        roots[i] = aberth_roots(C[i]).flat()
    return roots
