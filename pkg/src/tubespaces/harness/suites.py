"""Named verification suites wiring the library into deterministic checks.

Each suite builds a list of jobs (case id, claim, top-level function, params);
the runner executes them in order, optionally across processes, and assembles
a SuiteReport.  Every case record carries its target provenance: values
derived from an independent oracle (change-of-variables slopes, closed forms,
certificates) versus values as stated in the source material.  Cases pass or
fail against the oracle; stated values are reported alongside so the
documented exponent discrepancies stay visible.
"""

from __future__ import annotations

import math
import os
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from .. import cone as cone_mod
from .. import lattice as lattice_mod
from .. import ops as ops_mod
from .. import quad as quad_mod
from .. import spaces as spaces_mod
from .. import tube as tube_mod
from ..errors import ConfigError, HypothesisFailedError
from ..quad import IntegralSpec
from ..spaces import MEASURE, DISPLAY, MixedNormParams
from .report import CaseRecord, SuiteReport

WORKERS_ENV = "TUBEVERIFY_WORKERS"

GLOBAL_KEYS = {"seed", "record_runtime"}


def _merge_config(defaults: dict, overrides: dict, suite: str) -> dict:
    merged = dict(defaults)
    merged.setdefault("seed", 0)
    merged.setdefault("record_runtime", False)
    allowed = set(defaults) | GLOBAL_KEYS
    for key, value in overrides.items():
        if key not in allowed:
            raise ConfigError(
                f"unknown config key {key!r} for {suite} "
                f"(allowed: {', '.join(sorted(allowed))})")
        if isinstance(defaults.get(key), dict) and isinstance(value, dict):
            sub = dict(defaults[key])
            for k2, v2 in value.items():
                if k2 not in sub:
                    raise ConfigError(f"unknown config key {key}.{k2!r} for {suite}")
                sub[k2] = v2
            merged[key] = sub
        else:
            merged[key] = value
    return merged


def _case_seed(master: int, case_id: str) -> int:
    return (int(master) * 2654435761 + zlib.crc32(case_id.encode())) % (2 ** 31)


def _cone_of(name: str):
    return cone_mod.from_name(name)


def _slope_case(fit: quad_mod.ExponentFit, oracle: float, stated: float,
                tol: float, r2_min: float):
    ok = (abs(fit.slope - oracle) <= tol * max(abs(oracle), 1e-12)
          and fit.r_squared >= r2_min)
    detail = (f"slope={fit.slope:.6g} stderr={fit.stderr:.2g} "
              f"r2={fit.r_squared:.6f}")
    return fit.slope, ok, detail


# ---------------------------------------------------------------------------
# fr-suite: integral estimates and exponent adjudication
# ---------------------------------------------------------------------------

FR_DEFAULTS = {
    "cones": ["half_line"],
    "slope_grid": [1.0, 2.0, 4.0, 8.0, 16.0],
    "slope_tol": {"half_line": 0.02, "lorentz3": 0.05},
    "r2_min": 0.999,
    "i_alpha_beta_params": {"half_line": [[-3.0, 0.0], [-2.6, 0.3]],
                            "lorentz3": [[-4.0, 0.5]]},
    "i_alpha_params": {"half_line": [3.0, 2.2], "lorentz3": [3.0]},
    "fr_params": {"half_line": [[2.0, 1.0], [1.5, 0.4]], "lorentz3": [[2.0, 1.0]]},
    "est5_params": {"half_line": [[0.0, 3.0]], "lorentz3": [[0.0, 4.0]]},
    "divergence_checks": True,
    "fr_divergence_cones": ["half_line"],
    "mc_samples": 200_000,
}


def case_iab_slope(config, seed, cone_name, alpha, beta):
    cone = _cone_of(cone_name)
    e = cone_mod.identity(cone)
    fit = quad_mod.detect_exponent(
        lambda lam: abs(quad_mod.I_alpha_beta(cone, alpha, beta, lam * e).value),
        config["slope_grid"])
    oracle = cone.r * (alpha + beta) + cone.n
    stated = oracle   # printed closed form scales consistently here
    tol = config["slope_tol"][cone_name]
    slope, ok, detail = _slope_case(fit, oracle, stated, tol, config["r2_min"])
    return dict(computed=slope, oracle=oracle, stated=stated, passed=ok,
                detail=detail)


def case_ialpha_slope(config, seed, cone_name, alpha):
    cone = _cone_of(cone_name)
    e = cone_mod.identity(cone)
    fit = quad_mod.detect_exponent(
        lambda lam: quad_mod.I_alpha(cone, alpha, lam * e).real,
        config["slope_grid"])
    oracle = cone.n - cone.r * alpha          # substitution-forced sign
    stated = cone.n + cone.r * alpha          # printed exponent alpha + n/r
    tol = config["slope_tol"][cone_name]
    slope, ok, detail = _slope_case(fit, oracle, stated, tol, config["r2_min"])
    detail += f" printed-exponent-disagrees={abs(stated - fit.slope) > 0.5}"
    return dict(computed=slope, oracle=oracle, stated=stated, passed=ok,
                detail=detail)


def case_fr_slope(config, seed, cone_name, p, beta):
    cone = _cone_of(cone_name)
    e = cone_mod.identity(cone)
    nr2 = 2.0 * cone.n / cone.r
    grid = config["slope_grid"]

    def value(lam):
        spec = IntegralSpec(cone=cone, mc_samples=config["mc_samples"],
                            seed=_case_seed(seed, f"fr{lam}"))
        return abs(quad_mod.fr_kernel_integral(cone, p, beta, lam * 1j * e,
                                               spec=spec).value)

    fit = quad_mod.detect_exponent(value, grid)
    oracle = cone.r * (beta - nr2 * (p - 1.0))
    stated = cone.r * (beta - 2.0 * nr2 * (p - 1.0))   # printed factor 2
    tol = config["slope_tol"][cone_name]
    slope, ok, detail = _slope_case(fit, oracle, stated, tol, config["r2_min"])
    detail += f" printed-exponent-disagrees={abs(stated - fit.slope) > 0.5}"
    return dict(computed=slope, oracle=oracle, stated=stated, passed=ok,
                detail=detail)


def case_est5_slope(config, seed, cone_name, tau, tau1):
    cone = _cone_of(cone_name)
    e = cone_mod.identity(cone)

    def value(lam):
        spec = IntegralSpec(cone=cone, mc_samples=config["mc_samples"],
                            seed=_case_seed(seed, f"e5{lam}"))
        return abs(quad_mod.fr_estimate_5(cone, tau, tau1, lam * 1j * e,
                                          spec=spec).value)

    fit = quad_mod.detect_exponent(value, config["slope_grid"])
    oracle = cone.r * (tau - tau1) + 2.0 * cone.n
    stated = oracle   # estimate (5) prints the consistent exponent
    tol = config["slope_tol"][cone_name]
    slope, ok, detail = _slope_case(fit, oracle, stated, tol, config["r2_min"])
    return dict(computed=slope, oracle=oracle, stated=stated, passed=ok,
                detail=detail)


def case_divergence(config, seed, kind, cone_name, params, expected):
    cone = _cone_of(cone_name)
    e = cone_mod.identity(cone)
    if kind == "i_alpha":
        res = quad_mod.I_alpha(cone, params["alpha"], e, classify=True)
    elif kind == "fr":
        res = quad_mod.fr_kernel_integral(cone, params["p"], params["beta"],
                                          1j * e, classify=True)
    elif kind == "est5":
        res = quad_mod.fr_estimate_5(cone, params["tau"], params["tau1"],
                                     1j * e, classify=True)
    else:
        raise ConfigError(f"unknown divergence check {kind!r}")
    verdict = "divergent" if res.verdict == "divergent" else "convergent"
    return dict(computed=verdict, oracle=expected, stated=None,
                passed=verdict == expected,
                detail=f"ladder verdict {res.verdict}")


def case_est5_constant_ratio(config, seed, cone_name, tau, tau1):
    cone = _cone_of(cone_name)
    e = cone_mod.identity(cone)
    expo = tau - tau1 + 2.0 * cone.n / cone.r
    ratios = []
    for lam in (1.0, 2.0, 4.0, 8.0):
        spec = IntegralSpec(cone=cone, mc_samples=config["mc_samples"],
                            seed=_case_seed(seed, f"ratio{lam}"))
        v = abs(quad_mod.fr_estimate_5(cone, tau, tau1, lam * 1j * e,
                                       spec=spec).value)
        ratios.append(v / float(lam ** cone.r) ** expo)
    spread = max(ratios) / min(ratios) - 1.0
    return dict(computed=spread, oracle=0.0, stated=None, passed=spread <= 0.03,
                detail=f"ratio spread over the dilation ray: {spread:.4f}")


def build_fr_suite(config):
    jobs = []
    for cn in config["cones"]:
        for a, b in config["i_alpha_beta_params"].get(cn, []):
            jobs.append((f"{cn}/two-power-cone-integral-slope a={a} b={b}",
                         "cone integral of two determinant powers: scaling exponent",
                         case_iab_slope, dict(cone_name=cn, alpha=a, beta=b)))
        for a in config["i_alpha_params"].get(cn, []):
            jobs.append((f"{cn}/kernel-modulus-base-integral-slope a={a}",
                         "base integral of a kernel-power modulus: exponent sign",
                         case_ialpha_slope, dict(cone_name=cn, alpha=a)))
        for p, b in config["fr_params"].get(cn, []):
            jobs.append((f"{cn}/kernel-lp-tube-mass-slope p={p} b={b}",
                         "weighted kernel L^p mass over the tube: exponent factor",
                         case_fr_slope, dict(cone_name=cn, p=p, beta=b)))
        for tau, tau1 in config["est5_params"].get(cn, []):
            jobs.append((f"{cn}/weighted-kernel-estimate-slope t={tau} t1={tau1}",
                         "weighted kernel estimate over the tube: exponent",
                         case_est5_slope, dict(cone_name=cn, tau=tau, tau1=tau1)))
            jobs.append((f"{cn}/weighted-kernel-estimate-ratio t={tau} t1={tau1}",
                         "weighted kernel estimate: constant comparability",
                         case_est5_constant_ratio,
                         dict(cone_name=cn, tau=tau, tau1=tau1)))
    if config["divergence_checks"]:
        for cn in config["cones"]:
            cone = _cone_of(cn)
            boundary = 2.0 * cone.n / cone.r - 1.0
            jobs.append((f"{cn}/base-integral-divergence at-boundary",
                         "divergence boundary of the kernel-modulus base integral",
                         case_divergence,
                         dict(kind="i_alpha", cone_name=cn,
                              params={"alpha": boundary}, expected="divergent")))
            jobs.append((f"{cn}/base-integral-convergence above-boundary",
                         "divergence boundary of the kernel-modulus base integral",
                         case_divergence,
                         dict(kind="i_alpha", cone_name=cn,
                              params={"alpha": boundary + 0.5},
                              expected="convergent")))
        for cn in config["fr_divergence_cones"]:
            cone = _cone_of(cn)
            nr2 = 2.0 * cone.n / cone.r
            for p in (1.5, 2.0):
                jobs.append((f"{cn}/kernel-lp-mass-divergence p={p}",
                             "divergence boundary of the kernel L^p mass",
                             case_divergence,
                             dict(kind="fr", cone_name=cn,
                                  params={"p": p, "beta": nr2 * (p - 1.0)},
                                  expected="divergent")))
            jobs.append((f"{cn}/kernel-lp-mass-divergence beta=-1",
                         "divergence boundary of the kernel L^p mass",
                         case_divergence,
                         dict(kind="fr", cone_name=cn,
                              params={"p": 2.0, "beta": -1.0},
                              expected="divergent")))
            jobs.append((f"{cn}/weighted-kernel-estimate-divergence tau=-1",
                         "divergence boundary of the weighted kernel estimate",
                         case_divergence,
                         dict(kind="est5", cone_name=cn,
                              params={"tau": -1.0, "tau1": 3.0},
                              expected="divergent")))
    return jobs


# ---------------------------------------------------------------------------
# reproduce-suite: kernel constant calibration and the reproducing identity
# ---------------------------------------------------------------------------

REPRODUCE_DEFAULTS = {
    "nu": 2.0,
    "gamma": 4.0,
    "points": 10,
    "residual_tol": 1e-3,
    "constant_rel_tol": 5e-3,
    "idempotence_tol": 5e-3,
    "node_budget": 4_000_000,
}


def case_calibration(config, seed):
    hl = cone_mod.half_line()
    nu = config["nu"]
    const = tube_mod.calibrate_constant(hl, nu, node_budget=config["node_budget"])
    closed = 2.0 ** (nu - 1.0) * nu / math.pi   # half-plane constant, derived
    rel = abs(const.value - closed) / closed
    return dict(computed=const.value, oracle=closed, stated=None,
                passed=rel <= config["constant_rel_tol"],
                detail=f"relative error {rel:.2e}, "
                       f"calibration residual {const.calibration_error:.2e}")


def case_reproduction(config, seed):
    hl = cone_mod.half_line()
    nu, gamma = config["nu"], config["gamma"]
    const = tube_mod.calibrate_constant(hl, nu, node_budget=config["node_budget"])
    f = spaces_mod.kernel_probe(hl, gamma, np.array([1j]))
    rng = np.random.default_rng(seed)
    worst = 0.0
    spec = IntegralSpec(cone=hl, node_budget=config["node_budget"],
                        rel_tol=3e-4, levels=3)
    for _ in range(config["points"]):
        z = tube_mod.random_tube_point(hl, rng)
        pf = ops_mod.bergman_project(f, hl, nu, z, constant=const, spec=spec)
        fv = complex(f(z[None, :])[0])
        worst = max(worst, abs(pf - fv) / abs(fv))
    return dict(computed=worst, oracle=0.0, stated=None,
                passed=worst <= config["residual_tol"],
                detail=f"max relative residual over {config['points']} points")


def case_idempotence(config, seed):
    hl = cone_mod.half_line()
    nu = config["nu"]
    const = tube_mod.calibrate_constant(hl, nu, node_budget=config["node_budget"])
    f = spaces_mod.kernel_probe(hl, config["gamma"], np.array([1j]))
    field = ops_mod.operator_field(ops_mod.OperatorParams.projection(nu), f, hl,
                                   constant=const, level=1)
    worst = 0.0
    spec = IntegralSpec(cone=hl, node_budget=config["node_budget"],
                        rel_tol=1e-3, levels=3, cone_tail_exponent=4.0)
    for zc in (0.2 + 0.9j, -0.4 + 1.6j, 0.1 + 0.6j):
        z = np.array([zc])
        once = field(z[None, :])[0]
        twice = ops_mod.bergman_project(field, hl, nu, z, constant=const, spec=spec)
        worst = max(worst, abs(twice - once) / abs(once))
    return dict(computed=worst, oracle=0.0, stated=None,
                passed=worst <= config["idempotence_tol"],
                detail="two-pass projection composition residual")


def case_translation_covariance(config, seed):
    hl = cone_mod.half_line()
    nu = config["nu"]
    const = tube_mod.calibrate_constant(hl, nu, node_budget=config["node_budget"])
    f = spaces_mod.kernel_probe(hl, config["gamma"], np.array([1j]))
    a = np.array([0.7])
    shifted = spaces_mod.kernel_probe(hl, config["gamma"], np.array([1j]) - a)
    z = np.array([0.2 + 1.3j])
    spec = IntegralSpec(cone=hl, node_budget=config["node_budget"])
    lhs = ops_mod.bergman_project(shifted, hl, nu, z, constant=const, spec=spec)
    rhs = ops_mod.bergman_project(f, hl, nu, z + a, constant=const, spec=spec)
    rel = abs(lhs - rhs) / abs(rhs)
    return dict(computed=rel, oracle=0.0, stated=None, passed=rel <= 1e-6,
                detail="projection commutes with real translation")


def build_reproduce_suite(config):
    return [
        ("half_line/kernel-constant-calibration",
         "reproducing identity fixes the kernel constant",
         case_calibration, {}),
        ("half_line/reproducing-identity-points",
         "projection reproduces kernel-power probes",
         case_reproduction, {}),
        ("half_line/projection-idempotence",
         "projection is idempotent on its range",
         case_idempotence, {}),
        ("half_line/projection-translation-covariance",
         "projection commutes with real translations",
         case_translation_covariance, {}),
    ]


# ---------------------------------------------------------------------------
# lattice-suite: covering, volumes, comparability, submean
# ---------------------------------------------------------------------------

LATTICE_DEFAULTS = {
    "r": 0.5,
    "x_extent": 4.0,
    "delta_min": 0.25,
    "delta_max": 4.0,
    "fresh_samples": 10_000,
    "nu": 2.0,
    "slope_grid": [1.0, 2.0, 4.0, 8.0, 16.0],
    "ball_slope_tol": 0.02,
    "comparability_band": 0.2,
    "kernel_comparability_cap": 4.0,
    "level_ratio_band": [1.25, 2.4],
    "submean_cap": 40.0,
}


def _suite_region(config):
    return lattice_mod.TubeRegion(cone_mod.half_line(), config["x_extent"],
                                  config["delta_min"], config["delta_max"])


def case_lattice_covering(config, seed):
    lat = lattice_mod.build_lattice(_suite_region(config), config["r"], seed=seed)
    rep = lattice_mod.check_lattice(lat, n_samples=config["fresh_samples"],
                                    nu=config["nu"], seed=seed + 1)
    return dict(computed=rep.covering_rate, oracle=1.0, stated=None,
                passed=rep.covering_rate == 1.0,
                detail=f"{len(lat)} points, max multiplicity {rep.max_multiplicity}")


def case_multiplicity_stability(config, seed):
    lat1 = lattice_mod.build_lattice(_suite_region(config), config["r"], seed=seed)
    lat2 = lattice_mod.build_lattice(_suite_region(config).doubled(), config["r"],
                                     seed=seed)
    m1, m2 = lat1.multiplicity, lat2.multiplicity
    ok = m2 <= 1.5 * m1 + 1 and m1 <= 1.5 * m2 + 1
    return dict(computed=m2, oracle=m1, stated=None, passed=ok,
                detail=f"multiplicity {m1} -> {m2} under region doubling")


def case_ball_volume_slope(config, seed):
    hl = cone_mod.half_line()
    z0 = tube_mod.TubePoint(hl, np.array([0.3]), np.array([1.0]))

    def vol(lam):
        center = tube_mod.TubePoint(hl, lam * z0.x, lam * z0.y)
        return lattice_mod.ball_volume(
            lattice_mod.BallSpec(center=center, radius=config["r"])).real

    fit = quad_mod.detect_exponent(vol, config["slope_grid"])
    oracle = 2.0 * hl.n
    stated_exponent = 2.0 * hl.r / hl.n   # printed power of delta (inverted form)
    ok = abs(fit.slope - oracle) <= config["ball_slope_tol"] * oracle
    return dict(computed=fit.slope, oracle=oracle, stated=stated_exponent, passed=ok,
                detail=f"slope fit r2={fit.r_squared:.6f}; stated value is the "
                       f"printed delta-power, derived is the dilation slope")


def case_delta_comparability(config, seed):
    lat = lattice_mod.build_lattice(_suite_region(config), config["r"], seed=seed)
    rep1 = lattice_mod.check_lattice(lat, n_samples=1000, nu=config["nu"],
                                     seed=seed + 1)
    rep2 = lattice_mod.check_lattice(lat, n_samples=4000, nu=config["nu"],
                                     seed=seed + 2)
    c1 = max(rep1.delta_ratio_high, 1.0 / rep1.delta_ratio_low)
    c2 = max(rep2.delta_ratio_high, 1.0 / rep2.delta_ratio_low)
    band = config["comparability_band"]
    ok = (np.isfinite(c1) and np.isfinite(c2)
          and abs(c2 - c1) <= band * c1)
    return dict(computed=c2, oracle=c1, stated=None, passed=bool(ok),
                detail=f"two-sided constants {c1:.4f} vs {c2:.4f} under "
                       f"sampling refinement; theory bound e^r = {math.exp(config['r']):.4f}")


def case_kernel_comparability(config, seed):
    lat = lattice_mod.build_lattice(_suite_region(config), config["r"], seed=seed)
    rep = lattice_mod.check_lattice(lat, n_samples=1000, nu=config["nu"],
                                    seed=seed + 1)
    c = max(rep.kernel_ratio_high, 1.0 / rep.kernel_ratio_low)
    cap = config["kernel_comparability_cap"]
    return dict(computed=c, oracle=cap, stated=None, passed=c <= cap,
                detail=f"kernel ratio range [{rep.kernel_ratio_low:.4f}, "
                       f"{rep.kernel_ratio_high:.4f}]")


def case_level_geometry(config, seed):
    # thin region: the x-condition never splits levels, exposing the vertical
    # geodesic spacing of the greedy lattice
    region = lattice_mod.TubeRegion(cone_mod.half_line(), 0.02, 0.05, 50.0)
    lat = lattice_mod.build_lattice(region, config["r"], seed=seed)
    logy = np.sort(np.log([float(p.y[0]) for p in lat.points]))
    ratios = np.exp(np.diff(logy))
    med = float(np.median(ratios))
    lo, hi = config["level_ratio_band"]
    ok = lo <= med <= hi
    return dict(computed=med, oracle=math.exp(config["r"]), stated=None, passed=ok,
                detail=f"median consecutive-level ratio from {len(lat)} levels, "
                       f"band [{lo}, {hi}]")


def case_submean(config, seed):
    hl = cone_mod.half_line()
    z0 = tube_mod.TubePoint(hl, np.array([0.1]), np.array([1.2]))
    f = spaces_mod.kernel_probe(hl, 2.5, np.array([0.4 + 0.9j]))
    rep = lattice_mod.verify_submean(f, z0, config["r"], p=2.0,
                                     cap=config["submean_cap"], seed=seed)
    # constructed violation: a bump at a ball-edge point, vanishing at z0
    edge = tube_mod.TubePoint(hl, np.array([0.1 + 0.3]), np.array([1.2]))
    bump = lambda z: np.exp(-np.abs(z[..., 0] - (edge.x[0] + 1j * edge.y[0])) ** 2
                            / 1e-4)
    rep_bad = lattice_mod.verify_submean(
        None, z0, config["r"], chi=bump, cap=config["submean_cap"],
        extra_test_points=(edge.x + 1j * edge.y)[None, :], seed=seed)
    ok = rep.holds and not rep_bad.holds
    return dict(computed=rep.c_fit, oracle=config["submean_cap"], stated=None,
                passed=ok,
                detail=f"analytic probe constant {rep.c_fit:.3f}; "
                       f"bump counterexample constant {rep_bad.c_fit:.3g} rejected")


def case_lattice_roundtrip(config, seed):
    import tempfile

    lat = lattice_mod.build_lattice(_suite_region(config), config["r"], seed=seed)
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "lattice.txt")
        lattice_mod.save_lattice(lat, path)
        first = open(path).read()
        lat2 = lattice_mod.load_lattice(path)
        path2 = os.path.join(tmp, "lattice2.txt")
        lattice_mod.save_lattice(lat2, path2)
        second = open(path2).read()
    ok = first == second and len(lat2) == len(lat)
    return dict(computed="bit-exact" if ok else "mismatch", oracle="bit-exact",
                stated=None, passed=ok, detail=f"{len(lat)} points round-tripped")


def build_lattice_suite(config):
    return [
        ("half_line/lattice-covering",
         "greedy lattice covers the truncated tube", case_lattice_covering, {}),
        ("half_line/lattice-multiplicity-stability",
         "overlap multiplicity is stable under region doubling",
         case_multiplicity_stability, {}),
        ("half_line/ball-volume-slope",
         "invariant ball volume growth exponent (printed power inverted)",
         case_ball_volume_slope, {}),
        ("half_line/delta-comparability",
         "two-sided boundary-distance comparability on balls",
         case_delta_comparability, {}),
        ("half_line/kernel-comparability",
         "kernel modulus comparability on lattice balls",
         case_kernel_comparability, {}),
        ("half_line/lattice-level-geometry",
         "vertical lattice levels follow the invariant metric",
         case_level_geometry, {}),
        ("half_line/submean-value",
         "plurisubharmonic submean value inequality on balls",
         case_submean, {}),
        ("half_line/lattice-export-roundtrip",
         "lattice text export round-trips bit-exactly",
         case_lattice_roundtrip, {}),
    ]


# ---------------------------------------------------------------------------
# atomic-suite: sampling norms and atomic decomposition
# ---------------------------------------------------------------------------

ATOMIC_DEFAULTS = {
    "nu": 2.0,
    "corpus_size": 12,
    "corpus_gammas": [2.5, 4.0],
    "sampling_r": 0.5,
    "roundtrip_r": 0.25,
    "roundtrip_probes": 3,
    "roundtrip_tol": 0.05,
    "region": {"x_extent": 10.0, "delta_min": 0.0625, "delta_max": 16.0},
    "roundtrip_region": {"x_extent": 5.0, "delta_min": 0.1667, "delta_max": 6.0},
    "ratio_bounds": [0.1, 10.0],
    "bound_stability": 3.0,
}


def _atomic_region(cfg):
    return lattice_mod.TubeRegion(cone_mod.half_line(), cfg["x_extent"],
                                  cfg["delta_min"], cfg["delta_max"])


def case_sampling_ratio(config, seed):
    hl = cone_mod.half_line()
    nu = config["nu"]
    lat = lattice_mod.build_lattice(_atomic_region(config["region"]),
                                    config["sampling_r"], seed=seed)
    corpus = spaces_mod.probe_corpus(hl, config["corpus_size"], seed,
                                     tuple(config["corpus_gammas"]))
    params = MixedNormParams(2.0, 2.0, nu, MEASURE)
    ratios = []
    for f in corpus:
        sn = lattice_mod.sampling_norm(f, lat, 2.0, nu)
        tn = spaces_mod.mixed_norm(f, hl, params)
        ratios.append(sn / tn ** 2)
    lo, hi = config["ratio_bounds"]
    ok = min(ratios) >= lo and max(ratios) <= hi
    return dict(computed=max(ratios), oracle=hi, stated=None, passed=ok,
                detail=f"ratios in [{min(ratios):.3f}, {max(ratios):.3f}] "
                       f"over {len(ratios)} probes")


def case_sampling_refinement(config, seed):
    hl = cone_mod.half_line()
    nu = config["nu"]
    region = _atomic_region(config["region"])
    f = spaces_mod.probe_corpus(hl, 1, seed + 7, tuple(config["corpus_gammas"]))[0]
    params = MixedNormParams(2.0, 2.0, nu, MEASURE)
    tn = spaces_mod.mixed_norm(f, hl, params) ** 2
    r = config["sampling_r"]
    lat1 = lattice_mod.build_lattice(region, r, seed=seed)
    lat2 = lattice_mod.build_lattice(region, r / 2.0, seed=seed)
    q1 = lattice_mod.sampling_norm(f, lat1, 2.0, nu) / tn
    q2 = lattice_mod.sampling_norm(f, lat2, 2.0, nu) / tn
    # the raw sum is a Riemann-type sum: its constant carries r^(-2n), so the
    # r-normalized ratios are the ones that stay stable under refinement
    n1 = q1 * r ** (2 * hl.n)
    n2 = q2 * (r / 2.0) ** (2 * hl.n)
    change = max(n1 / n2, n2 / n1)
    return dict(computed=change, oracle=2.0, stated=None, passed=change < 2.0,
                detail=f"raw ratios {q1:.3f} -> {q2:.3f}; r-normalized "
                       f"{n1:.3f} -> {n2:.3f} when halving r")


def case_atomic_roundtrip(config, seed):
    hl = cone_mod.half_line()
    nu = config["nu"]
    const = tube_mod.calibrate_constant(hl, nu)
    region = _atomic_region(config["roundtrip_region"])
    lat = lattice_mod.build_lattice(region, config["roundtrip_r"], seed=seed)
    corpus = spaces_mod.probe_corpus(hl, config["roundtrip_probes"], seed + 1,
                                     (3.0, 4.0), scale=1.0)
    worst = 0.0
    for f in corpus:
        co = lattice_mod.atomic_analyze(f, lat, nu, p=2.0, constant=const.value,
                                        seed=seed + 2)
        synth = lambda z, co=co: lattice_mod.atomic_synthesize(co, z)
        err = lattice_mod.region_norm_error(f, synth, region, nu, seed=seed + 3)
        worst = max(worst, err)
    return dict(computed=worst, oracle=config["roundtrip_tol"], stated=None,
                passed=worst <= config["roundtrip_tol"],
                detail=f"worst relative weighted-L2 error over "
                       f"{len(corpus)} probes, {len(lat)} atoms")


def case_coefficient_bound(config, seed):
    hl = cone_mod.half_line()
    nu = config["nu"]
    const = tube_mod.calibrate_constant(hl, nu)
    region = _atomic_region(config["roundtrip_region"])
    lat = lattice_mod.build_lattice(region, config["roundtrip_r"], seed=seed)
    corpus = spaces_mod.probe_corpus(hl, config["roundtrip_probes"], seed + 4,
                                     (3.0, 4.0), scale=1.0)
    params = MixedNormParams(2.0, 2.0, nu, MEASURE)
    constants = []
    for f in corpus:
        co = lattice_mod.atomic_analyze(f, lat, nu, p=2.0, constant=const.value,
                                        seed=seed + 5)
        norm_p = spaces_mod.mixed_norm(f, hl, params) ** 2
        constants.append(co.weight_sum() / norm_p)
    spread = max(constants) / min(constants)
    ok = np.isfinite(spread) and spread <= config["bound_stability"]
    return dict(computed=spread, oracle=config["bound_stability"], stated=None,
                passed=bool(ok),
                detail=f"coefficient-bound constants in "
                       f"[{min(constants):.3f}, {max(constants):.3f}]")


def build_atomic_suite(config):
    return [
        ("half_line/sampling-norm-equivalence",
         "lattice sampling sums are norm-equivalent", case_sampling_ratio, {}),
        ("half_line/sampling-refinement-stability",
         "sampling equivalence is stable under lattice refinement",
         case_sampling_refinement, {}),
        ("half_line/atomic-roundtrip",
         "analyze/synthesize round trip reproduces probes",
         case_atomic_roundtrip, {}),
        ("half_line/atomic-coefficient-bound",
         "coefficient sums are controlled by the norm",
         case_coefficient_bound, {}),
    ]


# ---------------------------------------------------------------------------
# operator-suite
# ---------------------------------------------------------------------------

OPERATOR_DEFAULTS = {
    "nu": 2.0,
    "tplus": {"alpha": 1.0, "beta": 1.0},
    "pqnu_grid": [[2.0, 2.0, 0.5], [2.0, 3.0, 1.0]],
    "blowup_params": {"alpha": 0.0, "beta": -1.0},
    "shift": {"nu": 2.0, "m0": 1.0, "p": 2.0, "q": 2.0},
    "corpus_size": 2,
    "product_betas": [3.0, 3.2],
    "cr_tol": 1e-4,
    "factor_tol": 1e-6,
    "averaging": {"xs": [0.5, 0.3], "ys": [1.5, 1.8], "ss": [0.2, 0.4]},
    "stability_band": 0.2,
}


def case_projection_fixed_point(config, seed):
    hl = cone_mod.half_line()
    nu = config["nu"]
    const = tube_mod.calibrate_constant(hl, nu)
    corpus = spaces_mod.probe_corpus(hl, config["corpus_size"], seed, (3.5, 4.5))
    params = MixedNormParams(2.0, 2.0, nu, MEASURE)
    rep = ops_mod.estimate_operator_norm(
        ops_mod.OperatorParams.projection(nu), hl, params, params, corpus,
        constant=const)
    ok = rep.lower_bound >= 1.0 - 5e-3 and not rep.blowup_flag
    return dict(computed=rep.lower_bound, oracle=1.0, stated=None, passed=ok,
                detail=f"reproducing probes are fixed points; "
                       f"ratios {[round(o / i, 4) for i, o in rep.ratio_samples]}")


def case_tplus_grid(config, seed):
    hl = cone_mod.half_line()
    alpha, beta = config["tplus"]["alpha"], config["tplus"]["beta"]
    gamma = alpha + beta + 1.0   # the admissible-surface constraint
    corpus = spaces_mod.probe_corpus(hl, config["corpus_size"], seed, (3.0, 4.0))
    worst = 0.0
    blowup = False
    for p, q, nu in config["pqnu_grid"]:
        rep = ops_mod.estimate_operator_norm(
            ops_mod.OperatorParams.t(alpha, beta, gamma, absolute=True), hl,
            MixedNormParams(p, q, nu, DISPLAY), MixedNormParams(p, q, nu, DISPLAY),
            corpus)
        blowup = blowup or rep.blowup_flag
        worst = max(worst, rep.lower_bound)
    ok = not blowup and np.isfinite(worst)
    return dict(computed=worst, oracle=None, stated=None, passed=bool(ok),
                detail=f"max norm ratio {worst:.4f} over the (p,q,nu) grid, "
                       f"no blow-up flag inside the admissible surface")


def case_tplus_blowup(config, seed):
    hl = cone_mod.half_line()
    alpha = config["blowup_params"]["alpha"]
    beta = config["blowup_params"]["beta"]
    gamma = alpha + beta + 1.0
    corpus = spaces_mod.probe_corpus(hl, 2, seed, (3.0, 4.0))
    rep = ops_mod.estimate_operator_norm(
        ops_mod.OperatorParams.t(alpha, beta, gamma, absolute=True), hl,
        MixedNormParams(2.0, 2.0, 1.0, DISPLAY),
        MixedNormParams(2.0, 2.0, 1.0, DISPLAY), corpus)
    return dict(computed=rep.blowup_flag, oracle=True, stated=None,
                passed=bool(rep.blowup_flag),
                detail="defining integral ladder-classified divergent at the "
                       "violated constraint")


def case_shifted_operator(config, seed):
    hl = cone_mod.half_line()
    nu = config["shift"]["nu"]
    m0 = config["shift"]["m0"]
    p, q = config["shift"]["p"], config["shift"]["q"]
    corpus = spaces_mod.probe_corpus(hl, config["corpus_size"], seed, (3.5, 4.5))
    rep = ops_mod.estimate_operator_norm(
        ops_mod.OperatorParams.t(0.0, nu - 1.0, nu + m0, absolute=True), hl,
        MixedNormParams(p, q, nu, DISPLAY),
        MixedNormParams(p, q, nu + m0 * q, DISPLAY), corpus)
    ok = not rep.blowup_flag and np.isfinite(rep.lower_bound)
    return dict(computed=rep.lower_bound, oracle=None, stated=None, passed=bool(ok),
                detail=f"index-shifted operator lands in the shifted space; "
                       f"max ratio {rep.lower_bound:.4f}")


def case_product_factorization(config, seed):
    hl = cone_mod.half_line()
    betas = config["product_betas"]
    g1 = spaces_mod.kernel_probe(hl, 3.0, np.array([1j]))
    g2 = spaces_mod.kernel_probe(hl, 3.5, np.array([0.4 + 0.9j]))
    z1, z2 = np.array([0.3 + 1.2j]), np.array([-0.2 + 0.8j])
    common = IntegralSpec(cone=hl, rel_tol=1e-14, levels=2,
                          node_budget=100_000_000, anchor_y=np.ones(1))
    v12 = ops_mod.product_T(lambda ws: g1(ws[0][..., None]) * g2(ws[1][..., None]),
                            hl, betas, [z1, z2], spec=common)
    va = ops_mod.product_T(lambda ws: g1(ws[0][..., None]), hl, [betas[0]], [z1],
                           spec=common)
    vb = ops_mod.product_T(lambda ws: g2(ws[0][..., None]), hl, [betas[1]], [z2],
                           spec=common)
    rel = abs(v12 - va * vb) / abs(va * vb)
    return dict(computed=rel, oracle=0.0, stated=None,
                passed=rel <= config["factor_tol"],
                detail="separable inputs factor across the product grid")


def case_product_analyticity(config, seed):
    hl = cone_mod.half_line()
    betas = config["product_betas"]
    g1 = spaces_mod.kernel_probe(hl, 3.0, np.array([1j]))
    g2 = spaces_mod.kernel_probe(hl, 3.5, np.array([0.4 + 0.9j]))
    spec = IntegralSpec(cone=hl, rel_tol=1e-8, levels=3, anchor_y=np.ones(1))

    def field(zt):
        return ops_mod.product_T(
            lambda ws: g1(ws[0][..., None]) * g2(ws[1][..., None]), hl, betas,
            [np.array([zt[0]]), np.array([zt[1]])], spec=spec)

    worst = 0.0
    for z0 in ([0.3 + 1.2j, -0.2 + 0.8j], [0.0 + 0.6j, 0.5 + 1.5j]):
        worst = max(worst, ops_mod.cauchy_riemann_residual(field, z0, h=1e-3))
    return dict(computed=worst, oracle=config["cr_tol"], stated=None,
                passed=worst <= config["cr_tol"],
                detail="finite-difference d/d(conj z) residual on interior points")


def case_averaging_inequality(config, seed):
    hl = cone_mod.half_line()
    av = config["averaging"]
    xs, ys, ss = tuple(av["xs"]), tuple(av["ys"]), tuple(av["ss"])

    def corpus_member(scale, g2_base):
        return ops_mod.SeparableFunction((
            spaces_mod.AbsProbe(spaces_mod.kernel_probe(hl, 3.0,
                                                        np.array([scale * 1j]))),
            spaces_mod.AbsProbe(spaces_mod.kernel_probe(hl, 3.5, g2_base))))

    members = [corpus_member(1.0, np.array([0.2 + 1.4j])),
               corpus_member(2.0, np.array([0.4 + 2.8j])),
               corpus_member(1.0, np.array([-0.3 + 1.1j]))]
    consts = [ops_mod.averaging_inequality_check(g, hl, xs, ys, ss)
              for g in members]
    spread = max(consts) / min(consts) - 1.0
    ok = all(np.isfinite(c) for c in consts) and spread <= config["stability_band"]
    return dict(computed=spread, oracle=config["stability_band"], stated=None,
                passed=bool(ok),
                detail=f"fitted constants {[round(c, 4) for c in consts]}")


def build_operator_suite(config):
    return [
        ("half_line/projection-fixed-point",
         "projection norm ratios on reproducing probes",
         case_projection_fixed_point, {}),
        ("half_line/positive-kernel-operator-grid",
         "positive kernel operator bounded inside the admissible surface",
         case_tplus_grid, {}),
        ("half_line/positive-kernel-operator-blowup",
         "blow-up flag outside the admissible surface", case_tplus_blowup, {}),
        ("half_line/index-shifted-operator",
         "index-shifted operator maps into the shifted space",
         case_shifted_operator, {}),
        ("half_line/product-operator-factorization",
         "product-domain operator factors on separable inputs",
         case_product_factorization, {}),
        ("half_line/product-operator-analyticity",
         "product-domain operator output is analytic",
         case_product_analyticity, {}),
        ("half_line/averaging-inequality",
         "multilinear averaging inequality with stable constant",
         case_averaging_inequality, {}),
    ]


# ---------------------------------------------------------------------------
# decompose-suite
# ---------------------------------------------------------------------------

DECOMPOSE_DEFAULTS = {
    "beta": 1.0,
    "m1_gamma": 3.0,
    "m1_alpha": 1.0,
    "m2_alphas": [0.2, 0.2],
    "dilations": [1.0, 2.0, 4.0, 8.0],
    "residual_tol": 1e-3,
    "ratio_band": 0.03,
    "mismatch_alphas": [0.2, 1.5],
}


def case_decompose_m1(config, seed):
    hl = cone_mod.half_line()
    f = spaces_mod.kernel_probe(hl, config["m1_gamma"], np.array([1j]))
    rep = ops_mod.decomposition_check([f], hl, config["m1_alpha"],
                                      [config["m1_alpha"]], config["beta"],
                                      hypothesis_tol=config["residual_tol"],
                                      seed=seed)
    ok = abs(rep.ratio - 1.0) <= 1e-3 and max(rep.residuals) <= config["residual_tol"]
    return dict(computed=rep.ratio, oracle=1.0, stated=None, passed=ok,
                detail=f"single factor reduces to the reproducing identity; "
                       f"residual {max(rep.residuals):.2e}")


def case_decompose_m2(config, seed):
    hl = cone_mod.half_line()
    beta = config["beta"]
    gamma_j = (beta + 2.0) / 2.0
    f = spaces_mod.kernel_probe(hl, gamma_j, np.array([1j]))
    alphas = config["m2_alphas"]
    alpha = sum(alphas) + 1.0   # matched dilation slopes: (m-1) n/r offset
    rep = ops_mod.decomposition_check([f, f], hl, alpha, alphas, beta,
                                      hypothesis_tol=config["residual_tol"],
                                      dilations=tuple(config["dilations"]),
                                      seed=seed)
    spread = max(rep.dilation_ratios) / min(rep.dilation_ratios) - 1.0
    ok = (max(rep.residuals) <= config["residual_tol"]
          and spread <= config["ratio_band"])
    return dict(computed=spread, oracle=config["ratio_band"], stated=None,
                passed=ok,
                detail=f"hypothesis residual {max(rep.residuals):.2e}; "
                       f"norm ratio invariant under dilations "
                       f"(ratio {rep.ratio:.5g})")


def case_decompose_mismatch(config, seed):
    hl = cone_mod.half_line()
    beta = config["beta"]
    gamma_j = (beta + 2.0) / 2.0
    f = spaces_mod.kernel_probe(hl, gamma_j, np.array([1j]))
    alphas = config["mismatch_alphas"]
    rep = ops_mod.decomposition_check([f, f], hl, sum(alphas) + 1.0, alphas, beta,
                                      seed=seed)
    return dict(computed=rep.verdict, oracle="divergent", stated=None,
                passed=rep.verdict == "divergent",
                detail="norm-finiteness predicate rejects the mismatched indices")


def build_decompose_suite(config):
    return [
        ("half_line/decomposition-single-factor",
         "single-factor decomposition reduces to the reproducing identity",
         case_decompose_m1, {}),
        ("half_line/decomposition-two-factor",
         "two-factor sharp decomposition: representation and ratio invariance",
         case_decompose_m2, {}),
        ("half_line/decomposition-mismatched-indices",
         "mismatched index bookkeeping is rejected as divergent",
         case_decompose_mismatch, {}),
    ]


# ---------------------------------------------------------------------------
# wave-suite
# ---------------------------------------------------------------------------

WAVE_DEFAULTS = {
    "cones": ["lorentz3", "spd2"],
    "draws": 5,
    "tol": 1e-6,
    "step": 1e-2,
}


def case_wave_identity(config, seed, cone_name):
    cone = _cone_of(cone_name)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(config["draws"]):
        zeta = rng.normal(size=cone.n)
        x0 = rng.normal(size=cone.n)

        def f(pts):
            return np.exp(1j * (pts @ zeta))

        got = tube_mod.wave_apply(cone, f, x0, step=config["step"])
        want = cone_mod.determinant(cone, zeta) * np.exp(1j * np.dot(x0, zeta))
        worst = max(worst, abs(got - want) / abs(want))
    return dict(computed=worst, oracle=config["tol"], stated=None,
                passed=worst <= config["tol"],
                detail=f"max relative error over {config['draws']} draws "
                       f"after extrapolation")


def case_wave_structure(config, seed, cone_name):
    cone = _cone_of(cone_name)
    rng = np.random.default_rng(seed)
    x0 = rng.normal(size=cone.n)
    const_val = abs(tube_mod.wave_apply(cone, lambda p: np.ones(len(p)), x0))
    z1, z2 = rng.normal(size=cone.n), rng.normal(size=cone.n)
    a, b = 2.0 - 1.0j, 0.5 + 0.25j

    def f1(p):
        return np.exp(1j * (p @ z1))

    def f2(p):
        return np.exp(1j * (p @ z2))

    combo = tube_mod.wave_apply(cone, lambda p: a * f1(p) + b * f2(p), x0)
    parts = (a * tube_mod.wave_apply(cone, f1, x0)
             + b * tube_mod.wave_apply(cone, f2, x0))
    lin_err = abs(combo - parts) / abs(parts)
    ok = const_val <= 1e-9 and lin_err <= 1e-9
    return dict(computed=max(const_val, lin_err), oracle=0.0, stated=None,
                passed=ok,
                detail=f"constants annihilated ({const_val:.1e}), "
                       f"linearity residual {lin_err:.1e}")


def build_wave_suite(config):
    jobs = []
    for cn in config["cones"]:
        jobs.append((f"{cn}/wave-diagonalization",
                     "wave operator diagonalizes exponentials",
                     case_wave_identity, dict(cone_name=cn)))
        jobs.append((f"{cn}/wave-structure",
                     "wave operator kills constants and is linear",
                     case_wave_structure, dict(cone_name=cn)))
    return jobs


# ---------------------------------------------------------------------------
# range-suite
# ---------------------------------------------------------------------------

RANGE_DEFAULTS = {
    "cone": "lorentz4",
    "nus": [0.5, 1.0, 2.0],
    "ps": [1.0, 1.5, 2.0, 4.0],
}


def case_range_values(config, seed):
    cone = _cone_of(config["cone"])
    nr = cone.n / cone.r
    worst = 0.0
    count = 0
    for nu in config["nus"]:
        for p in config["ps"]:
            rep = spaces_mod.projection_range(p, nu, cone)
            q_nu = 1.0 + nu / (nr - 1.0)
            p_conj = math.inf if p == 1.0 else p / (p - 1.0)
            q_hi = min(p, p_conj) * q_nu
            worst = max(worst, abs(rep.q_nu - q_nu), abs(rep.q_hi - q_hi))
            count += 1
    return dict(computed=worst, oracle=0.0, stated="formula as printed",
                target_provenance="stated", passed=worst <= 1e-12,
                detail=f"{count} grid points evaluated against the printed formula")


def case_range_consistency(config, seed):
    cone = _cone_of(config["cone"])
    ok = True
    details = []
    for nu in config["nus"]:
        for p in config["ps"]:
            rep = spaces_mod.projection_range(p, nu, cone)
            if math.isfinite(rep.q_hi) and rep.q_hi > 1.0:
                conj = 1.0 / rep.q_lo + 1.0 / rep.q_hi
                ok = ok and abs(conj - 1.0) <= 1e-12
                if rep.q_hi > 2.0:   # the window is nonempty only then
                    ok = ok and rep.q_lo < rep.q_hi
            if p == 1.0:
                ok = ok and abs(rep.q_hi - rep.q_nu) <= 1e-12
    degenerate = spaces_mod.projection_range(2.0, 1.0, cone_mod.half_line())
    ok = ok and degenerate.degenerate and degenerate.q_lo == 1.0 \
        and degenerate.q_hi == math.inf
    details.append("window endpoints conjugate; unit-ratio geometry degenerates")
    return dict(computed="consistent" if ok else "inconsistent", oracle="consistent",
                stated=None, passed=bool(ok), detail="; ".join(details))


def build_range_suite(config):
    return [
        (f"{config['cone']}/projection-window-values",
         "projection boundedness window formula values", case_range_values, {}),
        (f"{config['cone']}/projection-window-consistency",
         "window endpoints are conjugate and ordered; rank-one degenerates",
         case_range_consistency, {}),
    ]


# ---------------------------------------------------------------------------
# Registry and runner
# ---------------------------------------------------------------------------

SUITES = {
    "fr-suite": (build_fr_suite, FR_DEFAULTS,
                 "integral estimates: scaling exponents, divergence boundaries, "
                 "printed-exponent adjudication"),
    "reproduce-suite": (build_reproduce_suite, REPRODUCE_DEFAULTS,
                        "kernel constant calibration and the reproducing identity"),
    "lattice-suite": (build_lattice_suite, LATTICE_DEFAULTS,
                      "covering lattices, ball volumes, comparability constants, "
                      "submean value"),
    "atomic-suite": (build_atomic_suite, ATOMIC_DEFAULTS,
                     "sampling-norm equivalence and atomic decomposition"),
    "operator-suite": (build_operator_suite, OPERATOR_DEFAULTS,
                       "kernel operators: boundedness ratios, blow-up flags, "
                       "product factorization, averaging inequality"),
    "decompose-suite": (build_decompose_suite, DECOMPOSE_DEFAULTS,
                        "sharp decomposition of weighted-L1 products"),
    "wave-suite": (build_wave_suite, WAVE_DEFAULTS,
                   "generalized wave operator identities"),
    "range-suite": (build_range_suite, RANGE_DEFAULTS,
                    "projection boundedness window formulas"),
}


def list_suites() -> list:
    """Catalog of suites: (name, what it verifies, default-config summary)."""
    out = []
    for name, (_, defaults, summary) in SUITES.items():
        out.append({"name": name, "verifies": summary,
                    "defaults": {k: v for k, v in defaults.items()}})
    return out


def _execute_job(job_tuple):
    case_id, claim, fn, params, config, master_seed, record_runtime = job_tuple
    seed = _case_seed(master_seed, case_id)
    start = time.perf_counter()
    try:
        outcome = fn(config, seed, **params)
    except HypothesisFailedError as exc:
        outcome = dict(computed="hypothesis-failed", oracle=None, stated=None,
                       passed=False, detail=str(exc))
    except Exception as exc:   # a failed case, not a crashed suite
        outcome = dict(computed=None, oracle=None, stated=None, passed=False,
                       detail=f"{type(exc).__name__}: {exc}")
    elapsed = time.perf_counter() - start
    record = CaseRecord(
        case_id=case_id, claim=claim, inputs=params,
        computed=outcome.get("computed"), oracle=outcome.get("oracle"),
        stated=outcome.get("stated"), passed=bool(outcome.get("passed")),
        target_provenance=outcome.get("target_provenance", "oracle"),
        detail=outcome.get("detail", ""),
        runtime_s=round(elapsed, 3) if record_runtime else None)
    return record


def run_suite(name: str, overrides: dict | None = None) -> SuiteReport:
    """Run one suite deterministically; identical config and seed give
    byte-identical reports (runtimes are opt-in for that reason)."""
    if name not in SUITES:
        raise ConfigError(f"unknown suite {name!r}; run list for the catalog")
    builder, defaults, _ = SUITES[name]
    config = _merge_config(defaults, overrides or {}, name)
    jobs = builder(config)
    seed = int(config["seed"])
    tagged = [(cid, claim, fn, params, config, seed, config["record_runtime"])
              for cid, claim, fn, params in jobs]
    workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            cases = list(pool.map(_execute_job, tagged))
    else:
        cases = [_execute_job(t) for t in tagged]
    public_config = {k: v for k, v in config.items()}
    return SuiteReport(suite=name, seed=seed, config=public_config, cases=cases)
