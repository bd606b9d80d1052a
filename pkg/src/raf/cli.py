"""``raf`` command line: one subcommand per experiment.

Parameters come from built-in defaults, then an optional JSON ``--config``
file, then flags.  Every run writes ``manifest.json`` with the resolved
parameters; feeding it back through ``--config`` repeats the run.

Exit status: 0 success, 1 invalid input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .io import atomic_write_text, read_points, write_json, write_points
from .kernel import DomainError
from .littlewood import BudgetExceeded

log = logging.getLogger("raf")

SUBCOMMANDS = ("kernel-check", "sample-zeros", "converge-test", "littlewood", "fractal", "boxdim")


class ValidationError(Exception):
    pass


class NumericalFailure(Exception):
    pass


# ---------------------------------------------------------------------------
# parameter parsing


def parse_complex(text) -> complex:
    if isinstance(text, (int, float, complex)):
        return complex(text)
    if isinstance(text, (list, tuple)) and len(text) == 2:
        return complex(float(text[0]), float(text[1]))
    s = str(text).strip().replace(" ", "")
    if "," in s:
        re_, im_ = s.split(",")
        return complex(float(re_), float(im_))
    return complex(s.replace("i", "j"))


def parse_floats(text) -> list[float]:
    if isinstance(text, (list, tuple)):
        return [float(x) for x in text]
    return [float(x) for x in str(text).split(",") if x]


def _window(text):
    w = parse_floats(text)
    if len(w) != 4 or not (w[0] < w[1] and w[2] < w[3]):
        raise ValidationError(f"window must be xmin,xmax,ymin,ymax; got {text!r}")
    return w


# name -> (converter, default, help); converters run on both flag strings and JSON values
COMMON = {"seed": (int, 42, "master seed")}
# deterministic subcommands take --seed too, so every run can be scripted alike
INERT_SEED = {"seed": (int, 42, "ignored: this computation draws no random numbers")}

PARAMS = {
    "kernel-check": {
        "kappa": (parse_floats, [0.0, -0.25, -1.0], "comma-separated curvatures"),
        "trials": (int, 10000, "random triples per curvature"),
        "configs": (int, 100, "random (lambda, z) configurations for the variance identity"),
        **COMMON,
    },
    "sample-zeros": {
        "kappa": (float, -1.0, "curvature"),
        "ensemble": (str, "gaussian", "gaussian | real-gaussian | rademacher | quaternary"),
        "u": (parse_complex, 0j, "frame point, e.g. 0.9 or 0.5,0.2"),
        "phi": (str, "bump", "bump | indicator-smoothed"),
        "phi_radius": (float, 0.5, "support radius of the test function"),
        "samples": (int, 1000, "Monte Carlo repetitions"),
        "eps": (float, 1e-6, "truncation tail tolerance"),
        "raster": (int, 0, "intensity raster resolution (0: none)"),
        "window": (_window, [-0.5, 0.5, -0.5, 0.5], "raster window xmin,xmax,ymin,ymax"),
        **COMMON,
    },
    "converge-test": {
        "kappa": (float, -1.0, "curvature"),
        "ensemble": (str, "quaternary", "non-Gaussian ensemble under test"),
        "reference": (str, "auto", "reference ensemble at u = 0 (auto: gaussian or real-gaussian)"),
        "abs_u": (parse_floats, [0.3, 0.7, 0.95], "comma-separated |u| values (u on the positive axis)"),
        "phi": (str, "bump", "bump | indicator-smoothed"),
        "phi_radius": (float, 0.5, "support radius of the test function"),
        "samples": (int, 2000, "Monte Carlo repetitions per |u|"),
        "eps": (float, 1e-6, "truncation tail tolerance"),
        **COMMON,
    },
    "littlewood": {
        "n": (int, 13, "degree"),
        "alphabet": (str, "pm1", "pm1 | quaternary"),
        "raster": (int, 0, "raster resolution (0: none)"),
        "window": (_window, [-2.0, 2.0, -2.0, 2.0], "raster window"),
        "quotient": (bool, False, "enumerate one polynomial per symmetry orbit"),
        "hole_centers": (lambda t: [parse_complex(x) for x in (t if isinstance(t, list) else str(t).split(";"))],
                         [1, -1, 1j, -1j], "';'-separated centers for hole radii"),
        "exclusion_tol": (float, 1e-6, "hole metric exclusion radius"),
        "budget": (int, 10**7, "maximum number of roots"),
        **INERT_SEED,
    },
    "fractal": {
        "z": (parse_complex, 1 / 3, "point z with |z| < 1"),
        "alphabet": (str, "pm1", "pm1 | quaternary"),
        "depth": (int, 16, "iteration depth n"),
        "boxdim": (bool, False, "estimate the box-counting dimension"),
        "raster": (int, 0, "raster resolution (0: none)"),
        "budget": (int, 10**7, "maximum number of points"),
        **INERT_SEED,
    },
    "boxdim": {
        "points": (str, None, "binary point cloud (f64le pairs)"),
        "tail": (float, 0.0, "tail radius of the cloud (sets the smallest scale)"),
        "dmin": (float, 0.0, "smallest scale (0: automatic)"),
        "dmax": (float, 0.0, "largest scale (0: automatic)"),
        "num_scales": (int, 0, "number of scales (0: factors of 2)"),
        **INERT_SEED,
    },
}

SHORT_HELP = {
    "kernel-check": "verify the covariance and variance identities",
    "sample-zeros": "Monte Carlo linear statistics (and intensity raster) at one frame point",
    "converge-test": "KS distance to the Gaussian reference as |u| grows",
    "littlewood": "enumerate all roots of +-1 / quaternary polynomials",
    "fractal": "value sets C_n(z), B_n(z) and their box dimension",
    "boxdim": "box-counting dimension of a stored point cloud",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValidationError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="raf", description="Random analytic functions: zeros, universality, Littlewood sets.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="subcommand")
    for name, spec in PARAMS.items():
        sp = sub.add_parser(name, help=SHORT_HELP[name], description=SHORT_HELP[name])
        _add_run_flags(sp)
        for key, (conv, default, help_) in spec.items():
            flag = "--" + key.replace("_", "-")
            if conv is bool:
                sp.add_argument(flag, dest=key, action="store_const", const=True,
                                default=argparse.SUPPRESS, help=help_)
            else:
                sp.add_argument(flag, dest=key, default=argparse.SUPPRESS, help=f"{help_} (default: {default})")
    return p


def _add_run_flags(sp):
    sp.add_argument("--config", default=None, help="JSON run config (flags override it)")
    sp.add_argument("--out", default="out", help="output directory")
    sp.add_argument("--workers", type=int, default=None, help="worker processes (default: $RAF_WORKERS or CPU count)")


@dataclass
class RunConfig:
    subcommand: str
    params: dict = field(default_factory=dict)

    def manifest(self) -> dict:
        return {"subcommand": self.subcommand, "params": _jsonable(self.params), "version": __version__}


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, np.generic):
        return v.item()
    return v


def resolve(argv: list[str]) -> tuple[RunConfig, argparse.Namespace]:
    argv = list(argv)
    # a manifest/config may supply the subcommand
    if argv and argv[0] not in SUBCOMMANDS and "--config" in argv:
        cfg_path = argv[argv.index("--config") + 1]
        sub = _load_config(cfg_path).get("subcommand")
        if sub not in SUBCOMMANDS:
            raise ValidationError(f"config {cfg_path} names no valid subcommand")
        argv.insert(0, sub)
    ns = build_parser().parse_args(argv)
    if ns.subcommand is None:
        raise ValidationError("missing subcommand; choose from " + ", ".join(SUBCOMMANDS))
    spec = PARAMS[ns.subcommand]
    raw = {k: d for k, (_, d, _) in spec.items()}
    if ns.config:
        cfg = _load_config(ns.config)
        if cfg.get("subcommand", ns.subcommand) != ns.subcommand:
            raise ValidationError("config file is for a different subcommand")
        file_params = cfg.get("params", {k: v for k, v in cfg.items() if k != "subcommand"})
        unknown = set(file_params) - set(spec)
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
        raw.update(file_params)
    for k in spec:
        if hasattr(ns, k):
            raw[k] = getattr(ns, k)
    params = {}
    for k, (conv, default, _) in spec.items():
        v = raw[k]
        try:
            params[k] = v if v is None else (bool(v) if conv is bool else conv(v))
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"bad value for {k}: {v!r} ({exc})") from None
    cfg = RunConfig(ns.subcommand, params)
    validate(cfg)
    return cfg, ns


def _load_config(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from None


def validate(cfg: RunConfig) -> None:
    from .kernel import Curvature, radius_of_convergence
    from .littlewood import Alphabet
    from .sampler import Ensemble, EnsembleError

    p = cfg.params
    try:
        for k in np.atleast_1d(p.get("kappa", [])):
            Curvature(float(k))
        if "ensemble" in p:
            Ensemble.parse(p["ensemble"])
        if p.get("reference", "auto") != "auto":
            Ensemble.parse(p["reference"])
        if "alphabet" in p:
            Alphabet(p["alphabet"])
    except (DomainError, EnsembleError, ValueError) as exc:
        raise ValidationError(str(exc)) from None
    if cfg.subcommand in ("sample-zeros", "converge-test"):
        rho = radius_of_convergence(p["kappa"])
        us = [abs(p["u"])] if "u" in p else p["abs_u"]
        if any(u >= rho for u in us):
            raise ValidationError(f"|u| must be below rho_kappa = {rho}")
        if not 0 < p["phi_radius"] < rho:
            raise ValidationError("phi radius must lie in (0, rho_kappa)")
        if p["samples"] < 0:
            raise ValidationError("samples must be >= 0")
        if p["eps"] <= 0:
            raise ValidationError("eps must be positive")
    if cfg.subcommand == "fractal" and not abs(p["z"]) < 1:
        raise ValidationError("fractal needs |z| < 1")
    if cfg.subcommand == "littlewood" and p["n"] < 1:
        raise ValidationError("n must be >= 1")
    if cfg.subcommand == "fractal" and p["depth"] < 0:
        raise ValidationError("depth must be >= 0")
    if cfg.subcommand == "boxdim" and not p["points"]:
        raise ValidationError("boxdim needs --points")
    for key in ("raster",):
        if key in p and not 0 <= p[key] <= 1 << 14:
            raise ValidationError("raster resolution must be in [0, 16384]")


# ---------------------------------------------------------------------------
# subcommands


def derived_seed(seed: int, k: int) -> int:
    """Seed for the k-th independent sub-run of a run seeded with ``seed``."""
    return int(np.random.SeedSequence([int(seed), int(k)]).generate_state(1, np.uint64)[0])


def _tag(x: float) -> str:
    return f"{x:g}".replace("-", "m")


def run_kernel_check(p, out, workers):
    from . import kernel as K

    rng = np.random.default_rng(p["seed"])
    # residuals are relative to |Q(Phi z, Phi w)|; Q itself reaches e^36 at kappa = 0
    report = {"covariance_identity": {}, "variance_identity": {}}
    ok = True
    for kap in p["kappa"]:
        rho = K.radius_of_convergence(kap)
        R = 0.95 * rho if rho != math.inf else 3.0
        pts = _random_disk(rng, (3, p["trials"]), R)
        res = float(K.relative_identity_residual(pts[0], pts[1], pts[2], kap).max())
        report["covariance_identity"][str(kap)] = res
        ok &= res < 1e-10
    worst = 0.0
    spread_ok = True
    for _ in range(p["configs"]):
        m = int(rng.integers(1, 6))
        lam = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        zs = _random_disk(rng, m, 0.8)
        vals, bounds = [], []
        fp = K.quadratic_form_rounding(lam, zs, -1.0)
        for au in (0.0, 0.5, 0.9):
            rmax = float(np.abs(K.mobius(zs, au, -1.0)).max())
            N = K.truncation_degree(-1.0, max(rmax, 1e-3), 1e-6)
            alpha = K.alpha_coefficients(au, lam, zs, N, -1.0)
            vals.append(float(np.sum(np.abs(alpha) ** 2)))
            bounds.append(K.variance_tail_bound(au, lam, zs, N, -1.0) + fp)
        target = K.kernel_quadratic_form(lam, zs, -1.0)
        for v, b in zip(vals, bounds):
            worst = max(worst, abs(v - target) / b)
        spread_ok &= max(vals) - min(vals) <= 2 * max(bounds)
    report["variance_identity"] = {"worst_error_over_bound": worst, "u_independent": bool(spread_ok)}
    ok &= worst <= 1.0 and spread_ok
    report["pass"] = bool(ok)
    write_json(os.path.join(out, "report_kernel.json"), report)
    if not ok:
        raise NumericalFailure("kernel identities violated")


def _random_disk(rng, shape, R):
    r = R * np.sqrt(rng.random(shape))
    return r * np.exp(2j * np.pi * rng.random(shape))


def _phi(p):
    from .pointprocess import TestFunction

    return TestFunction(p["phi"], p["phi_radius"])


def _check_rejections(sample):
    from .pointprocess import MAX_REJECTION_RATE, rejection_rate

    if rejection_rate(sample) >= MAX_REJECTION_RATE:
        raise NumericalFailure(f"rejection rate {rejection_rate(sample):.4%} exceeds the limit")


def _write_sample(out, stem, sample):
    atomic_write_text(os.path.join(out, f"samples_{stem}.csv"), sample.to_csv())
    atomic_write_text(os.path.join(out, f"samples_{stem}.json"), sample.to_json())


def run_sample_zeros(p, out, workers):
    from .pointprocess import intensity_raster, run_experiment
    from .sampler import Ensemble

    ens = Ensemble.parse(p["ensemble"])
    s = run_experiment(ens, p["kappa"], p["u"], _phi(p), p["samples"], p["seed"], p["eps"],
                       workers=workers, keep_zeros=bool(p["raster"]))
    _write_sample(out, "u", s)
    if p["raster"]:
        grid = intensity_raster(s, p["window"], p["raster"])
        grid.write(os.path.join(out, "raster_intensity.pgm"))
    _check_rejections(s)


def run_converge_test(p, out, workers):
    from .pointprocess import ks_distance, ks_threshold, run_experiment
    from .sampler import Ensemble

    ens = Ensemble.parse(p["ensemble"])
    ref_name = p["reference"]
    if ref_name == "auto":
        ref_name = "real-gaussian" if ens.is_real else "gaussian"
    ref = run_experiment(Ensemble.parse(ref_name), p["kappa"], 0.0, _phi(p), p["samples"], p["seed"],
                         p["eps"], workers=workers)
    _write_sample(out, "reference", ref)
    _check_rejections(ref)
    rows = []
    for i, au in enumerate(p["abs_u"]):
        # distinct seed stream per |u|, derived from the master seed
        s = run_experiment(ens, p["kappa"], au, _phi(p), p["samples"], derived_seed(p["seed"], i + 1),
                           p["eps"], workers=workers)
        _write_sample(out, f"u{_tag(au)}", s)
        _check_rejections(s)
        rows.append((au, ks_distance(s, ref), ks_threshold(len(s), len(ref))))
    lines = ["abs_u,ks,threshold_5pct"] + [f"{a!r},{k!r},{t!r}" for a, k, t in rows]
    atomic_write_text(os.path.join(out, "report_ks.csv"), "\n".join(lines) + "\n")
    ks = [k for _, k, _ in rows]
    write_json(os.path.join(out, "report_converge.json"), {
        "reference": ref_name,
        "ensemble": ens.name,
        "abs_u": p["abs_u"],
        "ks": ks,
        "decreasing": bool(all(a > b for a, b in zip(ks, ks[1:]))),
        "threshold_5pct": rows[0][2] if rows else None,
    })


def run_littlewood(p, out, workers):
    from .littlewood import atlas_raster, check_symmetries, enumerate_roots, hole_radius

    atlas = enumerate_roots(p["n"], p["alphabet"], p["budget"], workers=workers, quotient=p["quotient"])
    if len(atlas.roots) != atlas.expected_count:
        raise NumericalFailure("root count differs from n |A|^(n+1)")
    check_symmetries(atlas)
    stem = f"{p['alphabet']}_{p['n']}"
    write_points(os.path.join(out, f"roots_{stem}.bin"), atlas.roots, atlas.meta())
    if p["raster"]:
        atlas_raster(atlas, p["raster"], tuple(p["window"])).write(os.path.join(out, f"raster_{stem}.pgm"))
    holes = {}
    for c in p["hole_centers"]:
        holes[f"{c.real + 0.0:g},{c.imag + 0.0:g}"] = hole_radius(atlas, c, p["exclusion_tol"])
    write_json(os.path.join(out, f"report_{stem}.json"), {**atlas.meta(), "hole_radius": holes,
                                                          "exclusion_tol": p["exclusion_tol"]})
    if not all(atlas.symmetries.values()):
        raise NumericalFailure(f"symmetry check failed: {atlas.symmetries}")


def run_fractal(p, out, workers):
    from .fractal import box_dimension, dimension_report, iterate_value_set
    from .raster import raster_accumulate

    vs = iterate_value_set(p["z"], p["alphabet"], p["depth"], p["budget"])
    stem = f"{p['alphabet']}_{p['depth']}"
    z = complex(p["z"])
    write_points(os.path.join(out, f"points_{stem}.bin"), vs.points, {
        "z": [z.real, z.imag], "alphabet": p["alphabet"], "depth": p["depth"], "tail_radius": vs.tail_radius})
    report = {"z": [z.real, z.imag], "alphabet": p["alphabet"], "depth": p["depth"], "points": len(vs),
              "tail_radius": vs.tail_radius}
    if p["boxdim"]:
        report = dimension_report(vs, box_dimension(vs.points, tail=vs.tail_radius))
    if p["raster"]:
        pts = vs.points
        pad = 0.02 * max(np.ptp(pts.real), np.ptp(pts.imag), 1e-12)
        win = (pts.real.min() - pad, pts.real.max() + pad, pts.imag.min() - pad, pts.imag.max() + pad)
        if win[2] == win[3] or np.ptp(pts.imag) == 0:
            win = (win[0], win[1], -pad - 1e-12, pad + 1e-12)
        raster_accumulate(pts, win, p["raster"]).write(os.path.join(out, f"raster_{stem}.pgm"))
    write_json(os.path.join(out, f"report_{stem}.json"), report)


def run_boxdim(p, out, workers):
    from .fractal import box_dimension

    pts = read_points(p["points"])
    rng = None
    if p["dmin"] > 0 and p["dmax"] > 0:
        rng = (p["dmin"], p["dmax"])
    bd = box_dimension(pts, rng, p["num_scales"] or None, tail=p["tail"] or None)
    write_json(os.path.join(out, "report_boxdim.json"), {"source": os.path.basename(p["points"]),
                                                          "points": len(pts), **bd.to_dict()})


RUNNERS = {
    "kernel-check": run_kernel_check,
    "sample-zeros": run_sample_zeros,
    "converge-test": run_converge_test,
    "littlewood": run_littlewood,
    "fractal": run_fractal,
    "boxdim": run_boxdim,
}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg, ns = resolve(argv)
        os.makedirs(ns.out, exist_ok=True)
        if not os.access(ns.out, os.W_OK):
            raise ValidationError(f"output directory {ns.out} is not writable")
    except ValidationError as exc:
        print(f"raf: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"raf: error: {exc}", file=sys.stderr)
        return 1
    write_json(os.path.join(ns.out, "manifest.json"), cfg.manifest())
    from .parallel import default_workers

    workers = ns.workers if ns.workers is not None else default_workers()
    try:
        RUNNERS[cfg.subcommand](cfg.params, ns.out, workers)
    except NumericalFailure as exc:
        print(f"raf: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (BudgetExceeded, DomainError, OSError) as exc:
        print(f"raf: error: {exc}", file=sys.stderr)
        return 1
    except ArithmeticError as exc:  # BoundaryZero / NonConvergence escaping a runner
        print(f"raf: numerical failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
