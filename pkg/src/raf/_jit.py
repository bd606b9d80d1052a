"""Compiled inner loops: Horner evaluation, Newton, batched Aberth iteration.

Coefficient vectors are in ascending order (c[0] + c[1] z + ...).
"""

import numpy as np
from numba import njit

EPS = np.finfo(float).eps
CLUSTER_RADIUS = 1e-3
CLUSTER_CHECK = 1e-9


@njit(cache=True)
def horner_many(c, z):
    out = np.empty(z.shape[0], dtype=np.complex128)
    n = c.shape[0]
    for i in range(z.shape[0]):
        zi = z[i]
        acc = c[n - 1]
        for k in range(n - 2, -1, -1):
            acc = acc * zi + c[k]
        out[i] = acc
    return out


@njit(cache=True)
def horner_deriv(c, z):
    """p(z), p'(z) and the rounding scale sum |c_k| |z|^k."""
    n = c.shape[0]
    p = c[n - 1]
    dp = 0j
    s = abs(c[n - 1])
    az = abs(z)
    for k in range(n - 2, -1, -1):
        dp = dp * z + p
        p = p * z + c[k]
        s = s * az + abs(c[k])
    return p, dp, s


@njit(cache=True)
def horner_deriv_many(c, z):
    m = z.shape[0]
    p = np.empty(m, dtype=np.complex128)
    dp = np.empty(m, dtype=np.complex128)
    s = np.empty(m)
    for i in range(m):
        p[i], dp[i], s[i] = horner_deriv(c, z[i])
    return p, dp, s


@njit(cache=True)
def newton(c, z0, mult, maxit):
    """(Modified) Newton z <- z - m p/p'.

    Returns (z, converged, last_step).  Converged once the residual is
    at the rounding floor or the step stops shrinking at machine level.
    """
    z = z0
    last = np.inf
    for _ in range(maxit):
        p, dp, s = horner_deriv(c, z)
        if p == 0:
            return z, True, 0.0
        if dp == 0:
            return z, False, last
        step = mult * p / dp
        z = z - step
        a = abs(step)
        if a <= 4 * EPS * abs(z) or abs(p) <= 4 * EPS * s:
            # one more step at the floor is harmless and sharpens simple roots
            p2, dp2, s2 = horner_deriv(c, z)
            if dp2 != 0 and p2 != 0:
                z2 = z - mult * p2 / dp2
                q2, _, _ = horner_deriv(c, z2)
                if abs(q2) <= abs(p2):
                    z = z2
            return z, True, a
        if a > 1e3 * last and last < 1e-3:
            return z, False, a
        last = a
    return z, False, last


@njit(cache=True)
def aberth_one(c, maxit, offset):
    """All roots of one polynomial by Aberth-Ehrlich iteration.

    Start: circle of radius |c0/cn|^{1/n} with a fixed angular offset.  A
    root is frozen once its residual reaches the rounding floor, so the
    result depends only on ``c``.
    """
    n = c.shape[0] - 1
    z = np.empty(n, dtype=np.complex128)
    r = (abs(c[0]) / abs(c[n])) ** (1.0 / n) if abs(c[0]) > 0 else 0.5
    if r == 0:
        r = 0.5
    for k in range(n):
        ang = 2 * np.pi * k / n + offset
        z[k] = r * (np.cos(ang) + 1j * np.sin(ang))
    done = np.zeros(n, dtype=np.bool_)
    ndone = 0
    it = 0
    while it < maxit and ndone < n:
        it += 1
        for k in range(n):
            if done[k]:
                continue
            p, dp, s = horner_deriv(c, z[k])
            if abs(p) <= 8 * EPS * s:
                done[k] = True
                ndone += 1
                continue
            ratio = p / dp if dp != 0 else 1e-3 + 0j
            acc = 0j
            for j in range(n):
                if j != k:
                    d = z[k] - z[j]
                    if d != 0:
                        acc += 1.0 / d
            den = 1.0 - ratio * acc
            w = ratio / den if den != 0 else ratio
            z[k] = z[k] - w
            if abs(w) <= EPS * abs(z[k]):
                done[k] = True
                ndone += 1
    # Newton polish, kept only when it lowers the residual
    for k in range(n):
        p, dp, s = horner_deriv(c, z[k])
        if dp != 0 and p != 0:
            zn = z[k] - p / dp
            q, _, _ = horner_deriv(c, zn)
            if abs(q) < abs(p):
                z[k] = zn
    z = refine_clusters(c, z, CLUSTER_RADIUS, CLUSTER_CHECK)
    return z, ndone == n


@njit(cache=True)
def derivative_coeffs(c, order):
    d = c.copy()
    for _ in range(order):
        n = d.shape[0]
        if n <= 1:
            return np.zeros(1, dtype=np.complex128)
        nd = np.empty(n - 1, dtype=np.complex128)
        for k in range(1, n):
            nd[k - 1] = d[k] * k
        d = nd
    return d


@njit(cache=True)
def refine_clusters(c, z, rel_radius, check_tol):
    """Collapse clusters of computed roots onto a multiple root.

    A group of m roots within ``rel_radius`` (relative) of each other is
    replaced by the root of p^{(m-1)} reached by Newton from the group's
    centroid, provided p, ..., p^{(m-1)} all vanish there to
    ``check_tol`` relative to their rounding scales.  Otherwise the
    group is left unchanged.
    """
    n = z.shape[0]
    label = -np.ones(n, dtype=np.int64)
    for i in range(n):
        if label[i] >= 0:
            continue
        label[i] = i
        # grow the group transitively
        changed = True
        while changed:
            changed = False
            for j in range(n):
                if label[j] >= 0:
                    continue
                for k in range(n):
                    if label[k] == i:
                        scale = max(1.0, abs(z[k]))
                        if abs(z[j] - z[k]) < rel_radius * scale:
                            label[j] = i
                            changed = True
                            break
    for i in range(n):
        if label[i] != i:
            continue
        m = 0
        cen = 0j
        for j in range(n):
            if label[j] == i:
                m += 1
                cen += z[j]
        if m < 2:
            continue
        cen = cen / m
        d = derivative_coeffs(c, m - 1)
        w, ok, _ = newton(d, cen, 1.0, 60)
        if not ok or abs(w - cen) > rel_radius * max(1.0, abs(cen)):
            continue
        good = True
        for order in range(m - 1):
            dk = derivative_coeffs(c, order)
            p, _, s = horner_deriv(dk, w)
            if abs(p) > check_tol * s:
                good = False
                break
        if good:
            for j in range(n):
                if label[j] == i:
                    z[j] = w
    return z


@njit(cache=True)
def aberth_batch(C, maxit, offset):
    P = C.shape[0]
    n = C.shape[1] - 1
    roots = np.empty((P, n), dtype=np.complex128)
    ok = np.empty(P, dtype=np.bool_)
    for i in range(P):
        roots[i], ok[i] = aberth_one(C[i], maxit, offset)
    return roots, ok


@njit(cache=True)
def taylor_shift(c, z0):
    """Coefficients b of p(z0 + h) = sum_j b_j h^j (repeated synthetic division)."""
    b = c.copy()
    n = b.shape[0] - 1
    for i in range(n):
        for j in range(n - 1, i - 1, -1):
            b[j] += z0 * b[j + 1]
    return b


@njit(cache=True)
def derivative_bound(b, rho):
    """sum_{j>=1} j |b_j| rho^{j-1}: bounds |p'| on |h| <= rho for p(z0 + h) = sum b_j h^j."""
    n = b.shape[0] - 1
    s = 0.0
    for j in range(n, 0, -1):
        s = s * rho + j * abs(b[j])
    return s


@njit(cache=True)
def real_horner_many(a, x):
    """sum_j a_j x^j for real a and each real x."""
    out = np.empty(x.shape[0])
    n = a.shape[0]
    for i in range(x.shape[0]):
        acc = a[n - 1]
        xi = x[i]
        for k in range(n - 2, -1, -1):
            acc = acc * xi + a[k]
        out[i] = acc
    return out
