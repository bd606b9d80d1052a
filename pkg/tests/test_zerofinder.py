import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from raf.littlewood import multiset_close
from raf.sampler import Ensemble, sample_raf
from raf.zerofinder import (
    Analytic,
    BoundaryZero,
    NonConvergence,
    aberth_batch,
    aberth_roots,
    localize_zeros,
    rect_winding_count,
    residuals,
    robust_winding_count,
    winding_count,
)

signs = st.lists(st.sampled_from([-1.0, 1.0]), min_size=2, max_size=51)


def poly_from_roots(roots):
    # ascending coefficients of prod (z - r)
    return np.polynomial.polynomial.polyfromroots(roots)


def test_winding_examples():
    assert winding_count(lambda z: z, 0, 1.0) == 1
    f = lambda z: z**2 - 0.25
    assert winding_count(f, 0, 1.0) == 2
    assert winding_count(f, 0, 0.4) == 0
    assert winding_count(poly_from_roots([0.1, 0.2j, -0.3, 2.0]), 0, 1.0) == 3


def test_winding_boundary_zero():
    with pytest.raises(BoundaryZero):
        winding_count(lambda z: z - 1, 0, 1.0)
    n, r = robust_winding_count(lambda z: z - 1, 0, 1.0)
    assert r != 1.0 and n == (1 if r > 1 else 0)


def test_winding_high_degree():
    # z^200 - 0.5^200 has 200 zeros on |z| = 0.5; argument resolution needs refinement
    c = np.zeros(201, complex)
    c[0], c[-1] = -(0.5**200), 1
    assert winding_count(c, 0, 0.6) == 200
    assert winding_count(c, 0, 0.4) == 0


def test_littlewood_degree13_all_inside_radius_2():
    rng = np.random.default_rng(13)
    for _ in range(200):
        c = rng.choice([-1.0, 1.0], size=14)
        assert winding_count(c, 0, 2.0) == 13
        roots = aberth_roots(c).locations
        assert winding_count(c, 0, 1.5) == int(np.sum(np.abs(roots) < 1.5))


def test_localize_examples():
    f = Analytic(coeffs=poly_from_roots([0.3, -0.4j]))
    zs = localize_zeros(f, 0, 0.9)
    assert list(zs.multiplicities) == [1, 1]
    assert np.allclose(sorted(zs.locations, key=lambda z: z.real), [-0.4j, 0.3], atol=1e-12)
    one = localize_zeros(lambda z: np.ones_like(z), 0, 1.0)
    assert one.total == 0 and one.certify_count == 0 and len(one) == 0


def test_localize_multiple_root():
    # dyadic roots keep the coefficients exact, so the triple root is exact too
    zs = localize_zeros(poly_from_roots([0.25, 0.25, 0.25, -0.5j]), 0, 0.9)
    assert sorted(zs.multiplicities) == [1, 3]
    assert zs.total == 4 == zs.certify_count


def test_localize_rounded_cluster():
    # 0.3 is not dyadic: the rounded cubic has three roots ~1e-5 apart, below what
    # double precision can separate, so they come back as one triple zero
    zs = localize_zeros(poly_from_roots([0.3, 0.3, 0.3]), 0, 0.9)
    assert list(zs.multiplicities) == [3]
    assert abs(zs.locations[0] - 0.3) < 1e-4


def test_localize_reports_unresolved_cluster():
    # no subdivision allowed: two distinct zeros cannot be certified as one
    with pytest.raises(NonConvergence) as err:
        localize_zeros(poly_from_roots([0.3, 0.35]), 0, 0.9, max_depth=0)
    (_, _, count), = err.value.zeroset.clusters
    assert count == 2


def test_localize_callable_with_derivative():
    f = Analytic(f=lambda z: np.exp(z) - 2, df=np.exp)
    zs = localize_zeros(f, 0, 1.0)
    assert zs.total == 1 and abs(zs.locations[0] - math.log(2)) < 1e-13


def test_localize_raf():
    s = sample_raf(Ensemble.parse("gaussian"), -1.0, 500, 31, r_max=0.5)
    zs = localize_zeros(s, 0, 0.5)
    assert zs.total == winding_count(s, 0, zs.radius)
    scale = np.abs(s.coeffs).max()
    assert np.all(np.abs(s(zs.locations)) < 1e-9 * scale)


def test_aberth_examples():
    r = aberth_roots([1, 0, 1]).locations
    assert np.allclose(sorted(r, key=lambda z: z.imag), [-1j, 1j], atol=1e-14)
    r = aberth_roots(poly_from_roots([1, 2, 3])).locations
    assert np.allclose(np.sort(r.real), [1, 2, 3], atol=1e-10) and np.abs(r.imag).max() < 1e-10


def test_aberth_degree7_annulus():
    C = np.array([[1 - 2 * ((m >> k) & 1) for k in range(8)] for m in range(256)], dtype=complex)
    R = aberth_batch(C)
    assert R.shape == (256, 7)
    a = np.abs(R)
    assert a.min() > 0.5 and a.max() < 2


@given(signs)
def test_aberth_residuals(c):
    c = np.array(c, dtype=complex)
    zs = aberth_roots(c)
    assert zs.total == len(c) - 1
    assert np.all(np.abs(np.polynomial.polynomial.polyval(zs.locations, c)) < 1e-8 * np.abs(c).sum())


@given(signs, st.floats(0.3, 1.9))
def test_winding_matches_aberth(c, radius):
    roots = aberth_roots(np.array(c)).flat()
    gap = np.min(np.abs(np.abs(roots) - radius))
    try:
        n = winding_count(np.array(c), 0, radius)
    except BoundaryZero:
        assert gap < 1e-3  # refusing is allowed only next to a root
        return
    assert n == int(np.sum(np.abs(roots) < radius))


@given(signs, st.floats(0, 2 * math.pi))
def test_rotation_equivariance(c, theta):
    c = np.array(c, dtype=complex)
    rot = c * np.exp(1j * theta * np.arange(len(c)))
    a = aberth_roots(c).flat()
    b = aberth_roots(rot).flat()
    assert multiset_close(b, a * np.exp(-1j * theta), 1e-10)


@given(signs, st.floats(-1.0, 1.0), st.floats(-1.0, 1.0), st.floats(0.1, 1.0))
def test_subdivision_conserves_counts(c, x, y, h):
    c = np.array(c, dtype=complex)
    try:
        parent = rect_winding_count(c, x - h, x + h, y - h, y + h)
        kids = [
            rect_winding_count(c, x - h, x + 0.13 * h, y - h, y - 0.07 * h),
            rect_winding_count(c, x + 0.13 * h, x + h, y - h, y - 0.07 * h),
            rect_winding_count(c, x - h, x + 0.13 * h, y - 0.07 * h, y + h),
            rect_winding_count(c, x + 0.13 * h, x + h, y - 0.07 * h, y + h),
        ]
    except BoundaryZero:
        return
    assert parent == sum(kids)


def test_residuals_helper():
    c = poly_from_roots([0.5, -0.25])
    zs = localize_zeros(c, 0, 1)
    assert residuals(c, zs).max() < 1e-14
