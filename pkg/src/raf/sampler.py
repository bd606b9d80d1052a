"""Seeded coefficient ensembles and truncated random analytic functions."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .kernel import (
    Curvature,
    DomainError,
    log_coefficients,
    mobius_inverse,
    radius_of_convergence,
    tail_bound,
    truncation_degree,
)


class Variant(str, Enum):
    COMPLEX_GAUSSIAN = "gaussian"
    REAL_GAUSSIAN = "real-gaussian"
    RADEMACHER = "rademacher"
    QUATERNARY = "quaternary"
    CUSTOM = "custom"


QUATERNARY_ATOMS = np.array([1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j])

_ALIASES = {
    "gaussian": Variant.COMPLEX_GAUSSIAN,
    "gaf": Variant.COMPLEX_GAUSSIAN,
    "complex-gaussian": Variant.COMPLEX_GAUSSIAN,
    "real-gaussian": Variant.REAL_GAUSSIAN,
    "rademacher": Variant.RADEMACHER,
    "pm1": Variant.RADEMACHER,
    "quaternary": Variant.QUATERNARY,
    "custom": Variant.CUSTOM,
}


class EnsembleError(ValueError):
    pass


@dataclass(frozen=True)
class Ensemble:
    """Law of the i.i.d. coefficients X_n.

    ``atoms``/``probs`` are only used by the custom variant.  With
    ``normalize=True`` the draws have mean 0 and E|X|^2 = 1; the complex
    Gaussian always has N(0, 1/2) real and imaginary parts.
    """

    variant: Variant
    normalize: bool = True
    atoms: tuple = field(default=())
    probs: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.variant is Variant.CUSTOM:
            self._validate_custom()

    @classmethod
    def parse(cls, name: str, normalize: bool = True) -> "Ensemble":
        try:
            return cls(_ALIASES[name.lower()], normalize)
        except KeyError:
            raise EnsembleError(f"unknown ensemble {name!r}") from None

    @property
    def is_real(self) -> bool:
        if self.variant is Variant.CUSTOM:
            return bool(np.all(np.imag(self.atoms) == 0))
        return self.variant in (Variant.REAL_GAUSSIAN, Variant.RADEMACHER)

    @property
    def name(self) -> str:
        return self.variant.value

    def _validate_custom(self):
        atoms = np.asarray(self.atoms, dtype=complex)
        probs = np.asarray(self.probs, dtype=float)
        if atoms.ndim != 1 or len(atoms) == 0 or atoms.shape != probs.shape:
            raise EnsembleError("custom ensemble needs matching non-empty atoms/probs")
        if not np.all(np.isfinite(atoms)):
            raise EnsembleError("custom atoms must be bounded")
        if np.any(probs < 0) or abs(probs.sum() - 1) > 1e-12:
            raise EnsembleError("custom probabilities must be a distribution")
        if self.normalize:
            mean = probs @ atoms
            re2 = probs @ atoms.real**2
            im2 = probs @ atoms.imag**2
            reim = probs @ (atoms.real * atoms.imag)
            if abs(mean) > 1e-12:
                raise EnsembleError("custom atoms must have mean zero")
            if re2 + im2 == 0:
                raise EnsembleError("custom atoms are degenerate")
            real = np.all(atoms.imag == 0)
            if not real and (abs(re2 - im2) > 1e-12 or abs(reim) > 1e-12):
                raise EnsembleError(
                    "complex custom atoms must have isotropic, uncorrelated parts"
                )

    def scale(self) -> float:
        if not self.normalize:
            return 1.0
        if self.variant is Variant.QUATERNARY:
            return 2**-0.5
        if self.variant is Variant.CUSTOM:
            atoms = np.asarray(self.atoms, dtype=complex)
            return float(np.asarray(self.probs) @ np.abs(atoms) ** 2) ** -0.5
        return 1.0

    def to_dict(self) -> dict:
        d = {"variant": self.variant.value, "normalize": self.normalize}
        if self.variant is Variant.CUSTOM:
            d["atoms"] = [[complex(a).real, complex(a).imag] for a in self.atoms]
            d["probs"] = list(self.probs)
        return d


def task_rng(master_seed: int, index: int = 0) -> np.random.Generator:
    """Independent generator for task ``index`` derived from ``master_seed``.

    The (seed, index) -> stream map is injective, so a task's draws do not
    depend on which worker runs it.
    """
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.PCG64(ss))


def draw(ensemble: Ensemble, count: int, rng: np.random.Generator) -> np.ndarray:
    v = ensemble.variant
    if v is Variant.COMPLEX_GAUSSIAN:
        x = rng.standard_normal((count, 2)) * math.sqrt(0.5)
        return x[:, 0] + 1j * x[:, 1]
    if v is Variant.REAL_GAUSSIAN:
        return rng.standard_normal(count).astype(complex)
    if v is Variant.RADEMACHER:
        return (2.0 * rng.integers(0, 2, size=count) - 1.0).astype(complex)
    if v is Variant.QUATERNARY:
        return QUATERNARY_ATOMS[rng.integers(0, 4, size=count)] * ensemble.scale()
    atoms = np.asarray(ensemble.atoms, dtype=complex)
    idx = rng.choice(len(atoms), size=count, p=np.asarray(ensemble.probs, dtype=float))
    return atoms[idx] * ensemble.scale()


def sample_coefficients(ensemble: Ensemble, count: int, seed: int) -> np.ndarray:
    """``count`` i.i.d. draws of X, reproducible from ``seed``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    return draw(ensemble, count, task_rng(seed))


@dataclass
class TruncatedSeries:
    """sum_{n<=N} c_n z^n with c_n = a_{n,kappa} X_n."""

    kappa: Curvature
    coeffs: np.ndarray
    r_max: float
    tail_bound: float
    seed: int | None = None
    ensemble: Ensemble | None = None

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        return evaluate(self, z)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = max(len(self.coeffs), len(other.coeffs))
        c = np.zeros(n, dtype=complex)
        c[: len(self.coeffs)] += self.coeffs
        c[: len(other.coeffs)] += other.coeffs
        return TruncatedSeries(
            self.kappa, c, min(self.r_max, other.r_max),
            self.tail_bound + other.tail_bound,
        )


def sample_raf(
    ensemble: Ensemble,
    kappa,
    N: int,
    seed: int,
    r_max: float | None = None,
    index: int = 0,
) -> TruncatedSeries:
    """Draw X_0..X_N from ``ensemble`` and scale by a_{n,kappa}.

    ``r_max`` is the evaluation radius the truncation was chosen for; it
    only feeds the recorded tail bound.
    """
    kap = kappa if isinstance(kappa, Curvature) else Curvature(kappa)
    X = draw(ensemble, N + 1, task_rng(seed, index))
    coeffs = np.exp(log_coefficients(N, kap)) * X
    if r_max is None:
        tb = math.nan
    else:
        tb = tail_bound(kap, r_max, N)
    return TruncatedSeries(kap, coeffs, r_max if r_max is not None else math.nan, tb, seed, ensemble)


def series_from_coeffs(coeffs, kappa=-1.0, r_max: float = math.nan) -> TruncatedSeries:
    kap = kappa if isinstance(kappa, Curvature) else Curvature(kappa)
    return TruncatedSeries(kap, np.asarray(coeffs, dtype=complex), r_max, math.nan)


def horner(coeffs: np.ndarray, z):
    """Evaluate sum_n coeffs[n] z^n (ascending order) at scalar or array z."""
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    for c in coeffs[::-1]:
        acc = acc * z + c
    return acc[()] if acc.ndim == 0 else acc


def evaluate(series: TruncatedSeries, z):
    from .zerofinder import polyval

    if np.any(np.abs(z) > series.r_max * (1 + 1e-12)):
        warnings.warn("evaluation outside r_max: tail bound does not apply", stacklevel=2)
    return polyval(series.coeffs, z)


def preimage_disk(u, r_phi: float, kappa, pad: float = 0.02) -> tuple[complex, float]:
    """Smallest disk containing Phi^{-u}({|w| <= r_phi}), radius padded by ``pad``.

    Mobius maps send circles to circles; the image circle is located from
    the two points on the diameter through u, which are extremal in modulus.
    """
    k = Curvature(kappa).kappa if not isinstance(kappa, Curvature) else kappa.kappa
    u = complex(u)
    rho = radius_of_convergence(k)
    if abs(u) >= rho or r_phi >= rho:
        raise DomainError("frame center or support radius outside the domain")
    d = complex(np.exp(1j * np.angle(u)))  # exact unit direction, also for subnormal u
    p1 = mobius_inverse(r_phi * d, u, k)
    p2 = mobius_inverse(-r_phi * d, u, k)
    center = 0.5 * (p1 + p2)
    radius = 0.5 * abs(p1 - p2)
    return complex(center), radius * (1 + pad)


def preimage_rmax(u, r_phi: float, kappa, pad: float = 0.02) -> float:
    c, r = preimage_disk(u, r_phi, kappa, pad)
    rmax = abs(c) + r
    rho = radius_of_convergence(kappa)
    if rmax >= rho:
        raise DomainError("padded pre-image disk leaves the domain")
    return rmax


def boundary_max_modulus(u, r_phi: float, kappa, samples: int = 4096) -> float:
    """max |Phi^{-u}(w)| over |w| = r_phi by direct sampling (cross-check)."""
    t = np.linspace(0, 2 * np.pi, samples, endpoint=False)
    return float(np.max(np.abs(mobius_inverse(r_phi * np.exp(1j * t), u, kappa))))
