"""Constant-curvature geometry of the RAF family.

Coefficients a_{n,kappa}, the covariance kernel Q_kappa, the disk
automorphisms Phi_kappa^u and the covariance factor Delta_kappa^u, plus
residual checks for the identities that tie them together.

Everything here is a pure function; arrays broadcast the usual numpy way.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

INF = math.inf


class DomainError(ValueError):
    """A point or parameter lies outside the model's domain."""


@dataclass(frozen=True)
class Curvature:
    """Curvature parameter kappa <= 0 (the metric has Gauss curvature 4*kappa)."""

    kappa: float

    def __post_init__(self):
        k = float(self.kappa)
        if not math.isfinite(k) or k > 0:
            raise DomainError(f"kappa must be finite and <= 0, got {self.kappa!r}")
        object.__setattr__(self, "kappa", k)

    @property
    def radius(self) -> float:
        return radius_of_convergence(self.kappa)

    def __float__(self):
        return self.kappa


def _kappa(kappa) -> float:
    if isinstance(kappa, Curvature):
        return kappa.kappa
    return Curvature(kappa).kappa


def radius_of_convergence(kappa) -> float:
    """rho_kappa = |kappa|^{-1/2}; ``math.inf`` for kappa = 0."""
    k = _kappa(kappa)
    if k == 0.0:
        return INF
    return abs(k) ** -0.5


def in_domain(z, kappa) -> np.ndarray | bool:
    rho = radius_of_convergence(kappa)
    if rho == INF:
        return np.isfinite(np.abs(z))
    return np.abs(z) < rho


def _check_domain(kappa, *points):
    for p in points:
        if not np.all(in_domain(p, kappa)):
            raise DomainError(
                f"point(s) outside the disk of radius {radius_of_convergence(kappa)}"
            )


@dataclass(frozen=True)
class DiskPoint:
    z: complex
    kappa: Curvature = field(default_factory=lambda: Curvature(-1.0))

    def __post_init__(self):
        kap = self.kappa if isinstance(self.kappa, Curvature) else Curvature(self.kappa)
        object.__setattr__(self, "kappa", kap)
        object.__setattr__(self, "z", complex(self.z))
        if not in_domain(self.z, kap):
            raise DomainError(f"|{self.z}| >= rho_kappa = {kap.radius}")


# ---------------------------------------------------------------------------
# coefficients


def log_coefficients(n_max: int, kappa) -> np.ndarray:
    """log a_{n,kappa} for n = 0..n_max, as a cumulative log-sum."""
    k = _kappa(kappa)
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    j = np.arange(1, n_max + 1, dtype=float)
    terms = 0.5 * (np.log1p(-(j - 1) * k) - np.log(j))
    out = np.empty(n_max + 1)
    out[0] = 0.0
    np.cumsum(terms, out=out[1:])
    return out


def coefficient(n: int, kappa) -> float:
    """a_{n,kappa} = prod_{j=1}^n [(1 - (j-1) kappa) / j]^{1/2}."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return float(np.exp(log_coefficients(n, kappa)[n]))


@dataclass(frozen=True)
class CoefficientTable:
    """a_{n,kappa}^2 for n = 0..n_max, held as mantissa * 2**exponent.

    Built by the squared recurrence a_n^2 = a_{n-1}^2 (1 - (n-1) kappa) / n
    with the exponent split off at every step, so neither underflow
    (kappa = 0, large n) nor overflow (kappa << 0) loses digits.
    """

    kappa: Curvature
    mantissa: np.ndarray
    exponent: np.ndarray

    @classmethod
    def build(cls, n_max: int, kappa) -> "CoefficientTable":
        kap = kappa if isinstance(kappa, Curvature) else Curvature(kappa)
        if n_max < 0:
            raise ValueError("n_max must be >= 0")
        m = np.empty(n_max + 1)
        e = np.zeros(n_max + 1, dtype=np.int64)
        m[0] = 1.0
        k = kap.kappa
        for n in range(1, n_max + 1):
            fm, fe = math.frexp(m[n - 1] * ((1 - (n - 1) * k) / n))
            m[n] = fm
            e[n] = e[n - 1] + fe
        return cls(kap, m, e)

    @property
    def a(self) -> np.ndarray:
        """a_{n,kappa} as floats (may under/overflow for extreme n)."""
        with np.errstate(over="ignore", under="ignore"):
            return np.sqrt(np.ldexp(self.mantissa, self.exponent))

    @property
    def log_a(self) -> np.ndarray:
        return 0.5 * (np.log(self.mantissa) + self.exponent * math.log(2.0))

    def recurrence_residual(self) -> np.ndarray:
        """Relative error of a[n]^2 n = a[n-1]^2 (1 - (n-1) kappa), n >= 1."""
        n = np.arange(1, len(self.mantissa))
        lhs = np.ldexp(self.mantissa[1:] * n, self.exponent[1:] - self.exponent[:-1])
        rhs = self.mantissa[:-1] * (1 - (n - 1) * self.kappa.kappa)
        return np.abs(lhs - rhs) / rhs


# ---------------------------------------------------------------------------
# kernel and automorphisms


def covariance(z, w, kappa, check: bool = True):
    """Q_kappa(z, w) = (1 + kappa z conj(w))^{1/kappa}, or exp(z conj(w)) at kappa = 0.

    Principal branch; for in-domain points |kappa z w| < 1, so the base has
    positive real part and the branch is continuous.
    """
    k = _kappa(kappa)
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if check:
        _check_domain(k, z, w)
    zw = z * np.conj(w)
    if k == 0.0:
        out = np.exp(zw)
    else:
        out = np.exp(np.log1p(k * zw) / k)
    return out[()] if out.ndim == 0 else out


def mobius(z, u, kappa):
    """Phi_kappa^u(z) = (z - u) / (1 + kappa conj(u) z); sends u to 0."""
    k = _kappa(kappa)
    z = np.asarray(z, dtype=complex)
    out = (z - u) / (1 + k * np.conj(u) * z)
    return out[()] if out.ndim == 0 else out


def mobius_inverse(w, u, kappa):
    """Phi_kappa^{-u}(w), the inverse of ``mobius(., u)``."""
    return mobius(w, -np.asarray(u, dtype=complex), kappa)


def delta(z, u, kappa):
    """Covariance factor Delta_kappa^u(z).

    (1 + kappa|u|^2)^{1/(2 kappa)} (1 + kappa conj(u) z)^{-1/kappa} for
    kappa != 0 and exp(|u|^2/2 - conj(u) z) for kappa = 0.
    """
    k = _kappa(kappa)
    z = np.asarray(z, dtype=complex)
    u = np.asarray(u, dtype=complex)
    uu = np.abs(u) ** 2
    if k == 0.0:
        out = np.exp(0.5 * uu - np.conj(u) * z)
    else:
        out = np.exp(np.log1p(k * uu) / (2 * k) - np.log1p(k * np.conj(u) * z) / k)
    return out[()] if out.ndim == 0 else out


def covariance_identity_residual(z, w, u, kappa):
    """|Q(Phi z, Phi w) - Delta(z) conj(Delta(w)) Q(z, w)|, elementwise."""
    k = _kappa(kappa)
    _check_domain(k, z, w, u)
    lhs = covariance(mobius(z, u, k), mobius(w, u, k), k, check=False)
    rhs = delta(z, u, k) * np.conj(delta(w, u, k)) * covariance(z, w, k, check=False)
    return np.abs(lhs - rhs)


# ---------------------------------------------------------------------------
# variance identity


def alpha_coefficients(u, lambdas, zs, trunc: int, kappa) -> np.ndarray:
    """alpha_n(u) = a_n sum_k lambda_k Phi^u(z_k)^n / Delta^u(z_k), n = 0..trunc."""
    k = _kappa(kappa)
    lambdas = np.atleast_1d(np.asarray(lambdas, dtype=complex))
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    _check_domain(k, zs, u)
    phi = mobius(zs, u, k)
    weights = lambdas / delta(zs, u, k)
    a = np.exp(log_coefficients(trunc, k))
    # powers phi^n built by cumulative product; |phi| < rho keeps them bounded
    powers = np.ones((trunc + 1, len(zs)), dtype=complex)
    if trunc > 0:
        powers[1:] = np.cumprod(np.broadcast_to(phi, (trunc, len(zs))), axis=0)
    return a * (powers @ weights)


def kernel_quadratic_form(lambdas, zs, kappa) -> float:
    """sum_{j,k} lambda_j Q(z_j, z_k) conj(lambda_k); real and >= 0."""
    lambdas = np.atleast_1d(np.asarray(lambdas, dtype=complex))
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    Q = covariance(zs[:, None], zs[None, :], kappa)
    return float(np.real(lambdas @ Q @ np.conj(lambdas)))


def series_tail(kappa, r: float, n: int) -> float:
    """sum_{j>n} a_j^2 r^{2j}, summed numerically and closed with a geometric majorant."""
    k = _kappa(kappa)
    rho = radius_of_convergence(k)
    if not 0 <= r < rho:
        raise DomainError(f"r = {r} not in [0, {rho})")
    if r == 0.0:
        return 0.0
    logt, majorant_log = _log_terms_with_majorant(k, r, n + 1)
    return float(np.exp(np.logaddexp.reduce(np.append(logt[n + 1 :], majorant_log))))


def _log_terms_with_majorant(
    k: float, r: float, n_min: int, rel: float = 1e-18, log_floor: float | None = None
):
    """log(a_j^2 r^{2j}) for j = 0..M and log of a bound on sum_{j>M}.

    M >= n_min is grown until the majorant is negligible against the
    terms j >= n_min (relative ``rel``), or below ``log_floor`` when given.
    """
    lr2 = 2.0 * math.log(r)
    limit = abs(k) * r * r  # asymptotic term ratio
    M = max(n_min, 16)
    while True:
        logt = 2.0 * log_coefficients(M + 1, k) + lr2 * np.arange(M + 2)
        # ratio t_{j+1}/t_j = (1 - j kappa) r^2 / (j + 1), monotone in j
        ratio_next = (1 - (M + 1) * k) * r * r / (M + 2)
        q = max(ratio_next, limit) if k != 0.0 else ratio_next
        if q < 1.0:
            maj = logt[M + 1] - math.log1p(-q)
            head = np.logaddexp.reduce(logt[n_min:M + 1]) if M + 1 > n_min else -np.inf
            if log_floor is not None:
                done = maj < log_floor
            else:
                done = maj < -800 or maj - head < math.log(rel)
            if done:
                return logt[: M + 1], maj
        M *= 2
        if M > 1 << 26:
            raise RuntimeError("series tail did not converge")


def truncation_degree(kappa, r_max: float, eps: float) -> int:
    """Smallest N with sum_{n>N} a_n^2 r_max^{2n} < eps^2."""
    k = _kappa(kappa)
    rho = radius_of_convergence(k)
    if not 0 < r_max < rho:
        raise DomainError(f"r_max = {r_max} not in (0, {rho})")
    if eps <= 0:
        raise ValueError("eps must be positive")
    target = 2.0 * math.log(eps)
    logt, maj = _log_terms_with_majorant(k, r_max, 0, log_floor=target - 40.0)
    # suffix log-sums: tails[N] = log sum_{j>N} t_j
    ext = np.append(logt, maj)
    suffix = np.logaddexp.accumulate(ext[::-1])[::-1]
    tails = suffix[1:]
    ok = np.nonzero(tails < target)[0]
    return int(ok[0])


def tail_bound(kappa, r_max: float, n: int) -> float:
    """Standard deviation of the discarded tail sum_{j>n} a_j X_j z^j on |z| <= r_max."""
    return math.sqrt(series_tail(kappa, r_max, n))


def variance_tail_bound(u, lambdas, zs, trunc: int, kappa) -> float:
    """Upper bound on sum_{n>trunc} |alpha_n(u)|^2 (Minkowski over the frame points)."""
    k = _kappa(kappa)
    lambdas = np.atleast_1d(np.asarray(lambdas, dtype=complex))
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    phi = np.abs(mobius(zs, u, k))
    d = np.abs(delta(zs, u, k))
    s = sum(
        abs(lam) / dd * tail_bound(k, float(p), trunc)
        for lam, p, dd in zip(lambdas, phi, d)
    )
    return s * s


def quadratic_form_rounding(lambdas, zs, kappa, factor: float = 256.0) -> float:
    """Floating-point allowance for comparing two evaluations of the quadratic form.

    factor * eps * sum |lambda_j lambda_k Q(z_j, z_k)|; the observed worst
    case over a few thousand random configurations was about 74 eps times
    that sum.
    """
    lambdas = np.atleast_1d(np.asarray(lambdas, dtype=complex))
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    Q = covariance(zs[:, None], zs[None, :], kappa)
    S = float(np.sum(np.abs(lambdas[:, None] * np.conj(lambdas[None, :]) * Q)))
    return factor * np.finfo(float).eps * S


def relative_identity_residual(z, w, u, kappa):
    """covariance_identity_residual scaled by |Q(Phi z, Phi w)| (floored at 1)."""
    k = _kappa(kappa)
    res = covariance_identity_residual(z, w, u, k)
    lhs = covariance(mobius(z, u, k), mobius(w, u, k), k, check=False)
    return res / np.maximum(np.abs(lhs), 1.0)
