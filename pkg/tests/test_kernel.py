import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from raf import kernel as K
from conftest import random_disk

kappas = st.sampled_from([0.0, -0.25, -1.0, -4.0])


def disk_points(kappa, frac=0.95):
    rho = K.radius_of_convergence(kappa)
    R = frac * rho if rho != math.inf else 3.0
    return st.builds(
        lambda r, t: R * math.sqrt(r) * complex(math.cos(t), math.sin(t)),
        st.floats(0, 1), st.floats(0, 2 * math.pi),
    )


def test_radius_of_convergence():
    assert K.radius_of_convergence(-1) == 1.0
    assert K.radius_of_convergence(0) == math.inf
    assert K.radius_of_convergence(-4) == 0.5


def test_positive_curvature_rejected():
    with pytest.raises(K.DomainError):
        K.Curvature(0.1)
    with pytest.raises(K.DomainError):
        K.radius_of_convergence(2.0)
    with pytest.raises(K.DomainError):
        K.DiskPoint(1.0, -1.0)


def test_coefficient_examples():
    for k in (0.0, -0.3, -1.0):
        assert K.coefficient(0, k) == 1.0
    assert K.coefficient(7, -1.0) == pytest.approx(1.0, abs=1e-15)
    assert K.coefficient(3, 0.0) == pytest.approx(1 / math.sqrt(6), rel=1e-14)


def test_coefficient_matches_naive_product():
    for k in (0.0, -0.25, -2.0):
        for n in range(0, 30):
            naive = 1.0
            for j in range(1, n + 1):
                naive *= math.sqrt((1 - (j - 1) * k) / j)
            assert K.coefficient(n, k) == pytest.approx(naive, rel=1e-12)


@pytest.mark.parametrize("kappa", [0.0, -0.25, -1.0, -3.0])
def test_coefficient_recurrence(kappa):
    tab = K.CoefficientTable.build(10_000, kappa)
    assert tab.a[0] == 1.0
    assert tab.recurrence_residual().max() < 1e-13
    # the table and the log-sum agree where both are accurate
    ref = K.log_coefficients(200, kappa)
    assert np.abs(tab.log_a[:201] - ref).max() < 1e-12 * max(1.0, np.abs(ref).max())


def test_covariance_examples():
    assert K.covariance(1, 1j, 0.0) == pytest.approx(complex(math.cos(1), -math.sin(1)), abs=1e-15)
    assert K.covariance(0.5, 0.5, -1.0) == pytest.approx(4 / 3, rel=1e-15)
    z = random_disk(np.random.default_rng(0), 500, 2.0)
    w = random_disk(np.random.default_rng(1), 500, 2.0)
    exact = np.exp(z * np.conj(w))
    # relative gap is |kappa| |z w|^2 / 2 <= 8e-8 here; the absolute gap can reach 4e-6 at |z w| = 4
    assert (np.abs(K.covariance(z, w, -1e-8) - exact) / np.abs(exact)).max() < 1e-6
    small = np.abs(z * w) <= 2.0
    assert np.abs(K.covariance(z[small], w[small], -1e-8) - exact[small]).max() < 1e-6


def test_covariance_rejects_outside():
    with pytest.raises(K.DomainError):
        K.covariance(1.0, 0.0, -1.0)


@given(kappas, st.data())
def test_covariance_hermitian_and_diagonal(kappa, data):
    z = data.draw(disk_points(kappa))
    w = data.draw(disk_points(kappa))
    assert K.covariance(z, w, kappa) == pytest.approx(np.conj(K.covariance(w, z, kappa)), rel=1e-12)
    q = K.covariance(z, z, kappa)
    assert abs(q.imag) <= 1e-12 * abs(q) and q.real >= 1.0


def test_diagonal_increasing_in_modulus():
    for k in (0.0, -1.0):
        r = np.linspace(0, 0.99 * min(K.radius_of_convergence(k), 3), 200)
        q = K.covariance(r, r, k).real
        assert np.all(np.diff(q) > 0)


def test_mobius_examples(rng):
    u = 0.3 - 0.4j
    assert K.mobius(u, u, -1.0) == 0
    z = random_disk(rng, 1000, 0.999)
    assert np.array_equal(K.mobius(z, 0, -1.0), z)
    u = random_disk(rng, 1000, 0.999)
    back = K.mobius(K.mobius(z, u, -1.0), -u, -1.0)
    assert np.abs(back - z).max() < 1e-12


@given(kappas, st.data())
def test_mobius_self_map(kappa, data):
    if kappa == 0.0:
        return
    z = data.draw(disk_points(kappa, 0.999))
    u = data.draw(disk_points(kappa, 0.999))
    assert abs(K.mobius(z, u, kappa)) < K.radius_of_convergence(kappa)


def test_mobius_pushes_to_boundary():
    z = 0.2 + 0.1j
    m = [abs(K.mobius(z, u, -1.0)) for u in (0.9, 0.99, 0.999)]
    assert m[0] < m[1] < m[2] < 1


def test_delta_examples(rng):
    z = random_disk(rng, 100, 0.9)
    for k in (0.0, -1.0):
        assert np.abs(K.delta(z, 0, k) - 1).max() < 1e-15
    u = 0.6 + 0.2j
    assert K.delta(0, u, 0.0) == pytest.approx(math.exp(abs(u) ** 2 / 2), rel=1e-14)
    assert K.delta(u, u, -1.0) == pytest.approx(math.sqrt(1 - abs(u) ** 2), rel=1e-13)


def test_identity_residual_examples(rng):
    z = random_disk(rng, 200, 0.9)
    w = random_disk(rng, 200, 0.9)
    assert np.all(K.covariance_identity_residual(z, w, 0, -1.0) == 0)
    u = 0.7 - 0.2j
    assert K.covariance_identity_residual(u, u, u, -1.0) < 1e-12


@given(kappas, st.data())
def test_covariance_identity(kappa, data):
    z, w, u = (data.draw(disk_points(kappa)) for _ in range(3))
    assert K.relative_identity_residual(z, w, u, kappa) < 1e-10


def test_alpha_one_point_frame():
    a = K.alpha_coefficients(0, [1.0], [0.0], 10, -1.0)
    assert a[0] == 1 and np.all(a[1:] == 0)
    for u in (0.0, 0.5, 0.9 + 0.2j):
        N = K.truncation_degree(-1.0, abs(u) + 1e-3, 1e-8)
        a = K.alpha_coefficients(u, [1.0], [0.0], N, -1.0)
        assert np.sum(np.abs(a) ** 2) == pytest.approx(1.0, abs=1e-12)


@given(st.integers(1, 5), st.sampled_from([0.0, 0.5, 0.9]), st.integers(0, 2**32 - 1))
def test_variance_identity(m, au, seed):
    rng = np.random.default_rng(seed)
    lam = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    zs = random_disk(rng, m, 0.8)
    rmax = float(np.abs(K.mobius(zs, au, -1.0)).max())
    N = K.truncation_degree(-1.0, max(rmax, 1e-3), 1e-6)
    alpha = K.alpha_coefficients(au, lam, zs, N, -1.0)
    target = K.kernel_quadratic_form(lam, zs, -1.0)
    tol = K.variance_tail_bound(au, lam, zs, N, -1.0) + K.quadratic_form_rounding(lam, zs, -1.0)
    assert abs(np.sum(np.abs(alpha) ** 2) - target) <= tol


def test_truncation_degree_examples():
    assert K.truncation_degree(-1.0, 0.9, 1e-6) == 139
    # closed form for kappa = -1: smallest N with r^{2(N+1)} < eps^2 (1 - r^2)
    r, eps = 0.9, 1e-6
    N = math.ceil(math.log(eps**2 * (1 - r**2)) / (2 * math.log(r)) - 1)
    assert K.truncation_degree(-1.0, r, eps) == N
    for r in (0.1, 0.3, 0.5):
        assert K.truncation_degree(-1.0, r, 10.0) == 0
    with pytest.raises(K.DomainError):
        K.truncation_degree(-1.0, 1.0, 1e-6)


def test_truncation_degree_factorial_tail():
    N = K.truncation_degree(0.0, 2.0, 1e-6)

    def tail(n):  # direct summation, terms 4^j / j!
        return math.fsum(math.exp(j * math.log(4.0) - math.lgamma(j + 1)) for j in range(n + 1, n + 200))

    assert tail(N) < 1e-12 <= tail(N - 1)


@given(st.sampled_from([0.0, -0.5, -1.0]), st.floats(0.05, 0.95), st.floats(1e-10, 1e-2))
def test_truncation_degree_is_minimal(kappa, frac, eps):
    rho = K.radius_of_convergence(kappa)
    r = frac * (rho if rho != math.inf else 3.0)
    N = K.truncation_degree(kappa, r, eps)
    assert K.series_tail(kappa, r, N) < eps**2
    if N > 0:
        assert K.series_tail(kappa, r, N - 1) >= eps**2 * (1 - 1e-9)


def test_series_tail_geometric_oracle():
    r = 0.7
    for n in (0, 5, 40):
        exact = r ** (2 * (n + 1)) / (1 - r**2)
        assert K.series_tail(-1.0, r, n) == pytest.approx(exact, rel=1e-10)


@pytest.mark.parametrize("kappa", [0.0, -0.25, -1.0])
def test_series_kernel_consistency(kappa, rng):
    rho = K.radius_of_convergence(kappa)
    r = 0.9 * rho if rho != math.inf else 2.5
    N = K.truncation_degree(kappa, r, 1e-4)  # tail of a_n^2 r^{2n} below 1e-8
    a2 = K.CoefficientTable.build(N, kappa).a ** 2
    z = random_disk(rng, 50, r)
    w = random_disk(rng, 50, r)
    zw = z * np.conj(w)
    partial = np.polynomial.polynomial.polyval(zw, a2)
    assert np.abs(partial - K.covariance(z, w, kappa)).max() < 1e-8
