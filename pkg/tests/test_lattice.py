"""Invariant distance, balls, lattices, sampling norms, atomic decomposition."""

import math
import os

import numpy as np
import pytest

from tubespaces import cone, lattice, spaces, tube
from tubespaces.errors import DomainError, IllConditionedError
from tubespaces.spaces import MEASURE, MixedNormParams

HL = cone.half_line()
LO = cone.lorentz(3)
SP = cone.spd(2)


# -- cone distance ------------------------------------------------------------

def test_distance_halfline_closed_form():
    assert lattice.cone_distance(HL, [1.0], [math.e ** 2]) == pytest.approx(2.0)
    assert lattice.cone_distance(HL, [3.0], [3.0]) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("c", [HL, LO, SP], ids=lambda c: c.describe())
def test_distance_metric_properties(c):
    rng = np.random.default_rng(0)
    for _ in range(15):
        a = cone.random_cone_point(c, rng)
        b = cone.random_cone_point(c, rng)
        d = cone.random_cone_point(c, rng)
        dab = lattice.cone_distance(c, a, b)
        assert dab == pytest.approx(lattice.cone_distance(c, b, a), abs=1e-11)
        assert lattice.cone_distance(c, a, a) <= 1e-12
        tri = lattice.cone_distance(c, a, d) + lattice.cone_distance(c, d, b)
        assert dab <= tri + 1e-12


def test_distance_scale_invariance():
    rng = np.random.default_rng(1)
    a = cone.random_cone_point(LO, rng)
    b = cone.random_cone_point(LO, rng)
    d0 = lattice.cone_distance(LO, a, b)
    for lam in (0.5, 2.0, 10.0):
        assert lattice.cone_distance(LO, lam * a, lam * b) == pytest.approx(
            d0, abs=1e-10)


def test_distance_domain_error():
    with pytest.raises(DomainError):
        lattice.cone_distance(HL, [-1.0], [1.0])


# -- balls --------------------------------------------------------------------

def test_ball_contains_center_and_excludes_far():
    z0 = tube.TubePoint(LO, np.zeros(3), cone.identity(LO))
    ball = lattice.BallSpec(center=z0, radius=0.5)
    assert lattice.ball_contains(ball, z0.x + 1j * z0.y)
    far = np.zeros(3) + 1j * (20.0 * cone.identity(LO))
    assert not lattice.ball_contains(ball, far)


def test_ball_translation_equivariance():
    rng = np.random.default_rng(2)
    z0 = tube.TubePoint(HL, np.array([0.2]), np.array([1.3]))
    ball = lattice.BallSpec(center=z0, radius=0.6)
    a = np.array([0.9])
    shifted = lattice.BallSpec(
        center=tube.TubePoint(HL, z0.x + a, z0.y), radius=0.6)
    for _ in range(20):
        z = lattice.sample_ball(ball, rng, 1)[0]
        assert lattice.ball_contains(ball, z) == lattice.ball_contains(
            shifted, z + a)


def test_sample_ball_members():
    for c in (HL, LO):
        z0 = tube.TubePoint(c, np.zeros(c.n), cone.identity(c))
        ball = lattice.BallSpec(center=z0, radius=0.7)
        rng = np.random.default_rng(3)
        zs = lattice.sample_ball(ball, rng, 200)
        for z in zs:
            assert lattice.ball_contains(ball, z)


def test_ball_volume_halfline_slope():
    from tubespaces import quad
    z0 = tube.TubePoint(HL, np.array([0.3]), np.array([1.0]))

    def vol(lam):
        center = tube.TubePoint(HL, lam * z0.x, lam * z0.y)
        return lattice.ball_volume(lattice.BallSpec(center, 0.5)).real

    fit = quad.detect_exponent(vol, [1, 2, 4, 8, 16])
    assert fit.slope == pytest.approx(2.0, rel=0.02)


def test_ball_volume_halfline_value():
    # exact: 2 rho y0 (x-interval) times int_{y0 e^-rho}^{y0 e^rho} dy
    y0, rho = 1.5, 0.5
    z0 = tube.TubePoint(HL, np.zeros(1), np.array([y0]))
    got = lattice.ball_volume(lattice.BallSpec(z0, rho)).real
    want = 2.0 * rho * y0 * (y0 * (math.e ** rho - math.e ** -rho))
    assert got == pytest.approx(want, rel=1e-6)


def test_ball_volume_lorentz_slope_and_translation():
    z0 = tube.TubePoint(LO, np.array([0.2, -0.1, 0.4]), cone.identity(LO))
    ball = lattice.BallSpec(z0, 0.5)
    v1 = lattice.ball_volume(ball).real
    shifted = lattice.BallSpec(
        tube.TubePoint(LO, z0.x + np.array([1.0, 2.0, -0.5]), z0.y), 0.5)
    v2 = lattice.ball_volume(shifted).real
    assert v2 == pytest.approx(v1, rel=1e-12)
    lam = 3.0
    v3 = lattice.ball_volume(lattice.BallSpec(
        tube.TubePoint(LO, lam * z0.x, lam * z0.y), 0.5)).real
    assert v3 == pytest.approx(lam ** 6 * v1, rel=1e-6)   # slope 2n, n=3


def test_weighted_ball_comparability():
    # nu_alpha(B) within a small factor of delta^alpha(center) nu(B)
    alpha = 1.2
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(8):
        y0 = cone.random_cone_point(HL, rng)
        z0 = tube.TubePoint(HL, rng.normal(size=1), y0)
        ball = lattice.BallSpec(z0, 0.75)   # overlap radius for r = 0.5
        va = lattice.ball_volume(ball, alpha).real
        v0 = lattice.ball_volume(ball, 0.0).real
        ratio = va / (float(cone.determinant(HL, y0)) ** alpha * v0)
        worst = max(worst, ratio, 1.0 / ratio)
    assert worst <= 3.0


# -- lattices -----------------------------------------------------------------

@pytest.fixture(scope="module")
def hl_lattice():
    region = lattice.TubeRegion(HL, 4.0, 0.25, 4.0)
    return lattice.build_lattice(region, 0.5)


def test_lattice_deterministic(hl_lattice):
    region = lattice.TubeRegion(HL, 4.0, 0.25, 4.0)
    lat2 = lattice.build_lattice(region, 0.5)
    assert len(lat2) == len(hl_lattice)
    for a, b in zip(hl_lattice.points, lat2.points):
        assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)


def test_lattice_covering_certificate(hl_lattice):
    rep = lattice.check_lattice(hl_lattice, n_samples=10_000, nu=2.0)
    assert rep.covering_rate == 1.0
    assert rep.max_multiplicity <= hl_lattice.multiplicity + 2


def test_lattice_multiplicity_stable_under_doubling(hl_lattice):
    region = lattice.TubeRegion(HL, 4.0, 0.25, 4.0).doubled()
    lat2 = lattice.build_lattice(region, 0.5)
    assert lat2.multiplicity <= 1.5 * hl_lattice.multiplicity + 1


def test_delta_comparability_on_balls(hl_lattice):
    rep = lattice.check_lattice(hl_lattice, n_samples=1000, nu=2.0)
    # half-line cone balls give exactly e^{+-r} boundary-distance range
    assert rep.delta_ratio_low >= math.exp(-0.5) - 1e-9
    assert rep.delta_ratio_high <= math.exp(0.5) + 1e-9


def test_kernel_comparability_constant(hl_lattice):
    rep = lattice.check_lattice(hl_lattice, n_samples=500, nu=2.0)
    c = max(rep.kernel_ratio_high, 1.0 / rep.kernel_ratio_low)
    assert c <= 4.0


def test_lorentz_lattice_small_region():
    region = lattice.TubeRegion(LO, 1.0, 0.5, 2.0, u_cap=0.6)
    lat = lattice.build_lattice(region, 0.6, sample_budget=25_000)
    rep = lattice.check_lattice(lat, n_samples=2000, nu=2.0)
    assert rep.covering_rate == 1.0
    assert rep.max_multiplicity < 150


# -- sampling norm and atoms ---------------------------------------------------

def test_sampling_norm_zero(hl_lattice):
    zero = lambda z: np.zeros(z.shape[:-1], dtype=complex)
    assert lattice.sampling_norm(zero, hl_lattice, 2.0, 2.0) == 0.0


def test_sampling_norm_equivalence():
    nu = 2.0
    region = lattice.TubeRegion(HL, 10.0, 1.0 / 16.0, 16.0)
    lat = lattice.build_lattice(region, 0.5)
    corpus = spaces.probe_corpus(HL, 6, seed=11)
    params = MixedNormParams(2.0, 2.0, nu, MEASURE)
    for f in corpus:
        ratio = lattice.sampling_norm(f, lat, 2.0, nu) / \
            spaces.mixed_norm(f, HL, params) ** 2
        assert 0.1 <= ratio <= 10.0


def test_atom_recovery_unit_vector():
    nu = 2.0
    const = tube.calibrate_constant(HL, nu)
    region = lattice.TubeRegion(HL, 2.0, 0.5, 2.0)
    lat = lattice.build_lattice(region, 1.0)
    zj = lat.as_complex()
    j0 = len(lat) // 2
    coeff = float(cone.determinant(HL, zj[j0][None, :].imag)[0] ** (nu + 1.0)) \
        * const.value
    atom = spaces.kernel_probe(HL, nu + 1.0, zj[j0], coefficient=coeff)
    co = lattice.atomic_analyze(atom, lat, nu, constant=const.value, ridge=1e-14)
    want = np.zeros(len(zj), dtype=complex)
    want[j0] = 1.0
    assert np.abs(co.lambdas - want).max() <= 1e-6


def test_atomic_roundtrip_and_bound():
    nu = 2.0
    const = tube.calibrate_constant(HL, nu)
    region = lattice.TubeRegion(HL, 5.0, 1.0 / 6.0, 6.0)
    lat = lattice.build_lattice(region, 0.25)
    f = spaces.kernel_probe(HL, 3.5, np.array([0.2 + 1.1j]))
    co = lattice.atomic_analyze(f, lat, nu, constant=const.value)
    synth = lambda z: lattice.atomic_synthesize(co, z)
    err = lattice.region_norm_error(f, synth, region, nu)
    assert err <= 0.05
    norm_sq = spaces.mixed_norm(f, HL, MixedNormParams(2.0, 2.0, nu, MEASURE)) ** 2
    assert co.weight_sum() <= 10.0 * norm_sq
    assert co.weight_sum() >= 0.01 * norm_sq


def test_atomic_synthesize_single_atom(hl_lattice):
    co = lattice.AtomicCoefficients(hl_lattice, 2.0, 2.0,
                                    np.zeros(len(hl_lattice), dtype=complex))
    co.lambdas[3] = 2.0 - 1.0j
    z = np.array([[0.1 + 0.9j]])
    got = lattice.atomic_synthesize(co, z)[0]
    zj = hl_lattice.as_complex()[3]
    w = float(cone.determinant(HL, zj[None, :].imag)[0]) ** 3.0
    want = co.lambdas[3] * w * tube.kernel(HL, 2.0, z[0], zj)
    assert got == pytest.approx(complex(want), rel=1e-12)


def test_atomic_synthesize_linearity(hl_lattice):
    rng = np.random.default_rng(5)
    lam1 = rng.normal(size=len(hl_lattice)) + 1j * rng.normal(size=len(hl_lattice))
    lam2 = rng.normal(size=len(hl_lattice)) + 1j * rng.normal(size=len(hl_lattice))
    z = np.array([[0.3 + 1.4j], [-0.2 + 0.7j]])
    mk = lambda lam: lattice.AtomicCoefficients(hl_lattice, 2.0, 2.0, lam)
    combo = lattice.atomic_synthesize(mk(lam1 + 2.0 * lam2), z)
    parts = lattice.atomic_synthesize(mk(lam1), z) + \
        2.0 * lattice.atomic_synthesize(mk(lam2), z)
    assert np.allclose(combo, parts, rtol=1e-12)


def test_atomic_analyze_rejects_unfittable():
    # conj-analytic target cannot be represented by analytic kernels
    nu = 2.0
    region = lattice.TubeRegion(HL, 2.0, 0.5, 2.0)
    lat = lattice.build_lattice(region, 0.8)
    probe = spaces.kernel_probe(HL, 3.0, np.array([1j]))
    target = lambda z: np.conj(probe(z))
    with pytest.raises(IllConditionedError):
        lattice.atomic_analyze(target, lat, nu, residual_tol=0.05)


# -- submean ------------------------------------------------------------------

def test_submean_constant_function():
    z0 = tube.TubePoint(HL, np.zeros(1), np.ones(1))
    one = lambda z: np.ones(z.shape[:-1])
    rep = lattice.verify_submean(None, z0, 0.5, chi=one)
    assert rep.c_fit == pytest.approx(1.0, rel=1e-9)
    assert rep.holds


def test_submean_analytic_probe():
    z0 = tube.TubePoint(HL, np.array([0.1]), np.array([1.2]))
    f = spaces.kernel_probe(HL, 2.5, np.array([0.4 + 0.9j]))
    rep = lattice.verify_submean(f, z0, 0.5, p=2.0, cap=40.0)
    assert rep.holds
    rep2 = lattice.verify_submean(f, z0, 0.5, p=2.0, cap=40.0, seed=99)
    assert rep2.c_fit == pytest.approx(rep.c_fit, rel=0.5)


def test_submean_detects_violation():
    z0 = tube.TubePoint(HL, np.array([0.1]), np.array([1.2]))
    peak = 0.4 + 1.2j
    bump = lambda z: np.exp(-np.abs(z[..., 0] - peak) ** 2 / 1e-4)
    rep = lattice.verify_submean(None, z0, 0.5, chi=bump, cap=40.0,
                                 extra_test_points=np.array([[peak]]))
    assert not rep.holds


# -- export / import -----------------------------------------------------------

def test_lattice_roundtrip_bit_exact(tmp_path, hl_lattice):
    path = os.path.join(tmp_path, "lat.txt")
    lattice.save_lattice(hl_lattice, path)
    lat2 = lattice.load_lattice(path)
    assert len(lat2) == len(hl_lattice)
    assert lat2.radius == hl_lattice.radius
    assert lat2.overlap_radius == hl_lattice.overlap_radius
    assert lat2.multiplicity == hl_lattice.multiplicity
    for a, b in zip(hl_lattice.points, lat2.points):
        assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)
    path2 = os.path.join(tmp_path, "lat2.txt")
    lattice.save_lattice(lat2, path2)
    assert open(path).read() == open(path2).read()
