"""Linear statistics of RAF zero sets seen from a frame point u.

For a sample f, the statistic is sum over zeros xi of phi(Phi^u(xi)); only
zeros in the pre-image of supp(phi) contribute, so each sample is
truncated for, and searched on, that pre-image disk alone.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import parallel
from .kernel import Curvature, mobius, mobius_inverse
from .raster import RasterGrid
from .kernel import truncation_degree
from .sampler import Ensemble, preimage_disk, preimage_rmax, sample_raf
from .zerofinder import Analytic, BoundaryZero, NonConvergence, ZeroSet, localize_zeros, polyval

log = logging.getLogger(__name__)

MAX_REJECTION_RATE = 1e-3


class CoverageError(ValueError):
    """The zero search disk does not contain the region the test function sees."""


@dataclass(frozen=True)
class TestFunction:
    """Compactly supported phi on |z| < support_radius.

    ``bump``: amplitude * exp(1 - 1/(1 - |z/r|^2)).
    ``indicator-smoothed``: amplitude on |z| <= r/2, falling to 0 at r
    along a C^infinity ramp.
    """

    __test__ = False  # not a pytest class

    kind: str = "bump"
    support_radius: float = 0.5
    amplitude: float = 1.0

    def __post_init__(self):
        if self.kind not in ("bump", "indicator-smoothed"):
            raise ValueError(f"unknown test function {self.kind!r}")
        if not self.support_radius > 0:
            raise ValueError("support radius must be positive")

    def __call__(self, z) -> np.ndarray:
        s = np.abs(np.asarray(z, dtype=complex)) / self.support_radius
        out = np.zeros(s.shape)
        if self.kind == "bump":
            inside = s < 1
            out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
        else:
            out[s <= 0.5] = 1.0
            ramp = (s > 0.5) & (s < 1)
            t = (s[ramp] - 0.5) * 2.0  # 0 -> 1 across the ramp
            a = np.exp(-1.0 / (1.0 - t))
            b = np.exp(-1.0 / t)
            out[ramp] = a / (a + b)
        return self.amplitude * out

    def to_dict(self):
        return asdict(self)


@dataclass
class EmpiricalSample:
    values: np.ndarray
    metadata: dict = field(default_factory=dict)
    zeros: list | None = None  # per-sample mapped zeros, if retained

    def __len__(self):
        return len(self.values)

    def to_csv(self) -> str:
        buf = io.StringIO()
        for k in sorted(self.metadata):
            buf.write(f"# {k}: {json.dumps(self.metadata[k], sort_keys=True)}\n")
        w = csv.writer(buf, lineterminator="\n")
        for v in self.values:
            w.writerow([repr(float(v))])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {"metadata": self.metadata, "values": [float(v) for v in self.values]},
            indent=2,
            sort_keys=True,
        ) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "EmpiricalSample":
        meta, vals = {}, []
        for line in text.splitlines():
            if line.startswith("#"):
                k, _, v = line[1:].strip().partition(": ")
                meta[k] = json.loads(v)
            elif line.strip():
                vals.append(float(line))
        return cls(np.array(vals), meta)

    @classmethod
    def from_json(cls, text: str) -> "EmpiricalSample":
        d = json.loads(text)
        return cls(np.array(d["values"], dtype=float), d["metadata"])


def linear_statistic(zs: ZeroSet, u, phi: TestFunction, kappa) -> float:
    """sum over zeros xi (with multiplicity) of phi(Phi^u(xi))."""
    _check_coverage(zs, u, phi, kappa)
    if not zs.zeros:
        return 0.0
    w = mobius(zs.locations, u, kappa)
    return float(np.sum(phi(w) * zs.multiplicities))


def _check_coverage(zs: ZeroSet, u, phi: TestFunction, kappa):
    if zs.radius == math.inf:
        return
    c, r = preimage_disk(u, phi.support_radius, kappa, pad=0.0)
    if abs(c - zs.center) + r > zs.radius * (1 + 1e-12):
        raise CoverageError(
            f"search disk ({zs.center}, {zs.radius}) misses part of the pre-image ({c}, {r})"
        )


def mapped_function(coeffs, u, kappa) -> Analytic:
    """g(w) = f(Phi^{-u}(w)) with its derivative, for f given by coefficients."""
    k = Curvature(kappa).kappa if not isinstance(kappa, Curvature) else kappa.kappa
    u = complex(u)
    c = np.asarray(coeffs, dtype=complex)
    dc = c[1:] * np.arange(1, len(c))

    def g(w):
        return polyval(c, mobius_inverse(w, u, k))

    def dg(w):
        w = np.asarray(w, dtype=complex)
        jac = (1 + k * abs(u) ** 2) / (1 - k * np.conj(u) * w) ** 2
        return polyval(dc, mobius_inverse(w, u, k)) * jac

    return Analytic(f=g, df=dg)


# ---------------------------------------------------------------------------
# experiments


@dataclass(frozen=True)
class ExperimentPlan:
    ensemble: Ensemble
    kappa: float
    u: complex
    phi: TestFunction
    eps: float
    center: complex
    radius: float
    r_max: float
    degree: int

    @classmethod
    def build(cls, ensemble, kappa, u, phi, eps=1e-6) -> "ExperimentPlan":
        k = Curvature(kappa).kappa
        c, R = preimage_disk(u, phi.support_radius, k)
        r_max = preimage_rmax(u, phi.support_radius, k)
        N = truncation_degree(k, r_max, eps)
        return cls(ensemble, k, complex(u), phi, eps, c, R, r_max, N)


def _one_sample(plan: ExperimentPlan, master_seed: int, i: int):
    s = sample_raf(plan.ensemble, plan.kappa, plan.degree, master_seed, r_max=plan.r_max, index=i)
    zs = localize_zeros(s, plan.center, plan.radius)
    val = linear_statistic(zs, plan.u, plan.phi, plan.kappa)
    return val, zs


def _run_range(lo: int, hi: int, plan: ExperimentPlan, master_seed: int, keep: bool):
    out = []
    for i in range(lo, hi):
        try:
            val, zs = _one_sample(plan, master_seed, i)
        except (NonConvergence, BoundaryZero) as exc:
            out.append((i, None, None, str(exc)))
            continue
        mapped = mobius(zs.flat(), plan.u, plan.kappa) if keep else None
        out.append((i, val, mapped, None))
    return out


def run_experiment(
    ensemble: Ensemble,
    kappa,
    u,
    phi: TestFunction,
    n_samples: int,
    master_seed: int,
    eps: float = 1e-6,
    workers: int | None = 1,
    keep_zeros: bool = False,
) -> EmpiricalSample:
    """Monte Carlo sample of the linear statistic at frame point u.

    Sample i uses the generator derived from (master_seed, i).  Samples
    whose zeros fail certification are dropped and counted in
    ``metadata["rejected"]``.
    """
    k = Curvature(kappa).kappa
    u = complex(u)
    plan = ExperimentPlan.build(ensemble, k, u, phi, eps)
    meta = {
        "ensemble": ensemble.to_dict(),
        "kappa": k,
        "u": [u.real, u.imag],
        "phi": phi.to_dict(),
        "degree": plan.degree,
        "eps": eps,
        "search_disk": [plan.center.real, plan.center.imag, plan.radius],
        "master_seed": int(master_seed),
        "n_requested": int(n_samples),
    }
    rows = []
    if n_samples > 0:
        for chunk in parallel.map_ranges(_run_range, n_samples, workers, (plan, master_seed, keep_zeros)):
            rows.extend(chunk)
    rows.sort(key=lambda r: r[0])
    rejected = [r for r in rows if r[1] is None]
    for i, _, _, msg in rejected:
        log.warning("sample %d rejected: %s", i, msg)
    good = [r for r in rows if r[1] is not None]
    meta["rejected"] = len(rejected)
    meta["n_samples"] = len(good)
    values = np.array([r[1] for r in good], dtype=float)
    zeros = [r[2] for r in good] if keep_zeros else None
    return EmpiricalSample(values, meta, zeros)


def rejection_rate(sample: EmpiricalSample) -> float:
    n = sample.metadata.get("n_requested", len(sample))
    return sample.metadata.get("rejected", 0) / n if n else 0.0


# ---------------------------------------------------------------------------
# comparisons


def ks_distance(a, b) -> float:
    """sup_x |F_a(x) - F_b(x)| for the two empirical CDFs."""
    a = np.sort(np.asarray(getattr(a, "values", a), dtype=float))
    b = np.sort(np.asarray(getattr(b, "values", b), dtype=float))
    if len(a) == 0 or len(b) == 0:
        raise ValueError("ks_distance needs two non-empty samples")
    # the sup is attained at a jump point; evaluate both CDFs right after every jump
    x = np.concatenate([a, b])
    fa = np.searchsorted(a, x, side="right") / len(a)
    fb = np.searchsorted(b, x, side="right") / len(b)
    return float(np.max(np.abs(fa - fb)))


def ks_threshold(n: int, m: int, alpha: float = 0.05) -> float:
    """Asymptotic two-sample KS critical value c(alpha) sqrt((n+m)/(n m))."""
    c = math.sqrt(-0.5 * math.log(alpha / 2))
    return c * math.sqrt((n + m) / (n * m))


def intensity_raster(sample: EmpiricalSample, window, resolution) -> RasterGrid:
    """Per-cell mean zero count across samples, in mapped coordinates."""
    grid = RasterGrid.empty(window, resolution)
    if sample.zeros is None:
        if len(sample) == 0:
            return grid
        raise ValueError("experiment was run without keep_zeros")
    for z in sample.zeros:
        grid.add(z, samples=1)
    return grid


def sector_chi2(points, r_edges, n_sectors: int = 8) -> list[tuple[float, int]]:
    """Chi-square statistic of angular uniformity per radial bin: (chi2, dof)."""
    p = np.asarray(points, dtype=complex)
    r = np.abs(p)
    ang = np.mod(np.angle(p), 2 * np.pi)
    out = []
    for lo, hi in zip(r_edges[:-1], r_edges[1:]):
        sel = (r >= lo) & (r < hi)
        counts = np.bincount((ang[sel] / (2 * np.pi) * n_sectors).astype(int) % n_sectors, minlength=n_sectors)
        exp = counts.sum() / n_sectors
        chi2 = float(((counts - exp) ** 2).sum() / exp) if exp > 0 else 0.0
        out.append((chi2, n_sectors - 1))
    return out
