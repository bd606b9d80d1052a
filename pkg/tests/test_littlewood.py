import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from raf.littlewood import (
    Alphabet,
    BudgetExceeded,
    atlas_raster,
    check_symmetries,
    coefficient_block,
    enumerate_roots,
    hausdorff,
    hole_radius,
    multiset_close,
    prefix_roots,
)
from raf.sampler import Ensemble, sample_coefficients


@pytest.fixture(scope="module")
def z13():
    return enumerate_roots(13, "pm1", workers=1)


@pytest.fixture(scope="module")
def w8():
    return enumerate_roots(8, "quaternary", workers=1, quotient=True)


def test_z1_by_hand():
    at = enumerate_roots(1, "pm1")
    assert np.allclose(np.sort_complex(at.roots), [-1, -1, 1, 1])
    assert hole_radius(at, 0.0) == 1.0


def test_enumeration_order():
    C = coefficient_block(2, Alphabet.PM1, 0, 8)
    # little-endian: index 1 flips X_0, index 2 flips X_1
    assert np.array_equal(C[0], [1, 1, 1])
    assert np.array_equal(C[1], [-1, 1, 1])
    assert np.array_equal(C[2], [1, -1, 1])
    assert np.array_equal(C[7], [-1, -1, -1])


@pytest.mark.parametrize("n,alph", [(1, "pm1"), (5, "pm1"), (9, "pm1"), (1, "quaternary"), (4, "quaternary")])
def test_exact_counts(n, alph):
    at = enumerate_roots(n, alph)
    assert len(at.roots) == at.expected_count == n * Alphabet(alph).size ** (n + 1)


def test_budget():
    with pytest.raises(BudgetExceeded):
        enumerate_roots(14, "pm1", budget=10**5)
    with pytest.raises(ValueError):
        enumerate_roots(0, "pm1")


def test_z13(z13):
    assert len(z13.roots) == 212992
    s = check_symmetries(z13)
    assert s == {"conjugation": True, "negation": True, "inversion": True}


def test_w8(w8):
    assert len(w8.roots) == 2097152
    m = np.abs(w8.roots)
    assert np.all((m > 0.5) & (m < 2))
    assert all(check_symmetries(w8).values())


def test_hole_closes_up(z13):
    z7 = enumerate_roots(7, "pm1")
    assert hole_radius(z13, 1.0) < hole_radius(z7, 1.0)


def test_w8_hole_rotation(w8):
    assert abs(hole_radius(w8, 1.0) - hole_radius(w8, 1j)) < 1e-9


def test_hole_excludes_center():
    # balanced sign patterns have +1 as an exact root
    at = enumerate_roots(3, "pm1")
    assert np.min(np.abs(at.roots - 1)) < 1e-12
    assert hole_radius(at, 1.0) > 1e-6
    assert hole_radius(np.array([1.0 + 0j]), 1.0) == math.inf


@pytest.mark.parametrize("n,alph", [(9, "pm1"), (5, "quaternary")])
def test_quotient_matches_full(n, alph):
    full = enumerate_roots(n, alph, workers=1)
    quo = enumerate_roots(n, alph, workers=1, quotient=True)
    assert len(quo.roots) == len(full.roots)
    assert multiset_close(full.roots, quo.roots, 1e-9)


def test_workers_do_not_change_output():
    a = enumerate_roots(10, "pm1", workers=1)
    b = enumerate_roots(10, "pm1", workers=3)
    assert a.roots.tobytes() == b.roots.tobytes()


def test_z13_raster_flip_symmetric(z13):
    # the real axis is a pixel-row centre only at odd resolution
    for res in (511, 2047):
        g = atlas_raster(z13, res)
        assert np.array_equal(g.counts, g.counts[::-1, :])
        assert g.counts.sum() == len(z13.roots)


def test_z13_annulus(z13):
    m = np.abs(z13.roots)
    assert np.mean((m > 0.4) & (m < 2.5)) > 0.99


def test_multiset_close_detects_differences():
    a = np.array([0.1 + 0.2j, 0.3, 0.3, -1j])
    assert multiset_close(a, a[::-1])
    assert not multiset_close(a, np.array([0.1 + 0.2j, 0.3, -1j, -1j]))
    assert not multiset_close(a, a[:3])
    assert not multiset_close(a, a + 1e-6)


@given(st.lists(st.complex_numbers(max_magnitude=3), min_size=1, max_size=40), st.integers(0, 10**6))
def test_multiset_close_permutation(pts, seed):
    a = np.array(pts, dtype=complex)
    perm = np.random.default_rng(seed).permutation(len(a))
    assert multiset_close(a, a[perm])


def _directed(a, b):
    return 0.0 if len(a) == 0 else (math.inf if len(b) == 0 else float(np.abs(a[:, None] - b[None, :]).min(axis=1).max()))


def _prefix_gap(signs, n1, n2, radius, margin):
    """Hausdorff distance of the prefix root sets inside |z| <= radius, letting
    each side match into |z| <= radius + margin so boundary crossings do not count."""
    a, b = prefix_roots(signs, n1, radius), prefix_roots(signs, n2, radius)
    a2, b2 = prefix_roots(signs, n1, radius + margin), prefix_roots(signs, n2, radius + margin)
    return max(_directed(a, b2), _directed(b, a2))


def test_prefix_roots_converge():
    """Roots of p_n inside the disk settle as n grows (p_n -> f locally uniformly)."""
    gaps6, gaps8, coarse8 = [], [], []
    for seed in range(12):
        signs = sample_coefficients(Ensemble.parse("rademacher", normalize=False), 61, seed).real
        gaps6.append(_prefix_gap(signs, 40, 60, 0.6, 0.05))
        gaps8.append(_prefix_gap(signs, 40, 60, 0.8, 0.05))
        coarse8.append(_prefix_gap(signs, 20, 60, 0.8, 0.05))
    assert max(gaps6) < 1e-6
    # at 0.8 the omitted tail is about 0.8^41 / 0.2 ~ 5e-4: convergence, not 1e-6
    assert max(gaps8) < 5e-2
    assert np.median(gaps8) < np.median(coarse8)


def test_hausdorff_helper():
    assert hausdorff([0j], [1j]) == 1.0
    assert hausdorff([], []) == 0.0
    assert hausdorff([0j], []) == math.inf
