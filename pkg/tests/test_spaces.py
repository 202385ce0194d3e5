"""Probe functions, mixed/product/Herz norms, pairing, range formulas."""

import math

import numpy as np
import pytest

from tubespaces import cone, lattice, spaces, tube
from tubespaces.errors import DivergentIntegralError, DomainError, UnboundedNormError
from tubespaces.spaces import DISPLAY, MEASURE, MixedNormParams, ProductParams

HL = cone.half_line()
LO = cone.lorentz(3)


def test_probe_eval_single_term():
    for c in (HL, LO):
        f = spaces.kernel_probe(c, 2.0, 1j * cone.identity(c))
        val = f((1j * cone.identity(c))[None, :])[0]
        assert val == pytest.approx(2.0 ** (-2 * c.r))


def test_probe_linearity_in_coefficients():
    f = spaces.kernel_probe(HL, 2.0, np.array([1j]), coefficient=1.5)
    g = spaces.kernel_probe(HL, 3.0, np.array([0.3 + 0.7j]), coefficient=-2j)
    z = np.array([[0.2 + 1.1j], [-0.4 + 0.6j]])
    combo = (f + g)(z)
    assert np.allclose(combo, f(z) + g(z))
    assert np.allclose((2.5 * f)(z), 2.5 * f(z))


def test_probe_product_same_base_adds_powers():
    w0 = np.array([0.2 + 1.0j])
    f = spaces.kernel_probe(HL, 1.5, w0)
    g = spaces.kernel_probe(HL, 2.25, w0)
    h = spaces.kernel_probe(HL, 3.75, w0)
    z = np.array([[0.1 + 0.8j], [1.0 + 2.0j]])
    assert np.allclose(f(z) * g(z), h(z), rtol=1e-12)


def test_probe_base_must_be_interior():
    with pytest.raises(DomainError):
        spaces.kernel_probe(LO, 2.0, 1j * np.array([1.0, 2.0, 0.0]))


def test_sup_norm_constant():
    one = lambda z: np.ones(z.shape[:-1], dtype=complex)
    assert spaces.sup_norm(one, HL, 0.0) == pytest.approx(1.0)


def test_sup_norm_probe_attains_one():
    # sup |Det^-g((z + ie)/i)| Det^g(y) approached along z = i t e
    f = spaces.kernel_probe(HL, 1.5, np.array([1j]))
    assert spaces.sup_norm(f, HL, 1.5) == pytest.approx(1.0, abs=1e-3)


def test_sup_norm_unbounded():
    one = lambda z: np.ones(z.shape[:-1], dtype=complex)
    with pytest.raises(UnboundedNormError):
        spaces.sup_norm(one, HL, 1.0)


def test_mixed_norm_halfline_closed_form():
    # ||((z+i)/i)^-2||_{p=q=2, nu=0, display} = sqrt(pi)/2
    f = spaces.kernel_probe(HL, 2.0, np.array([1j]))
    v = spaces.mixed_norm(f, HL, MixedNormParams(2.0, 2.0, 0.0, DISPLAY))
    assert v == pytest.approx(math.sqrt(math.pi) / 2.0, rel=1e-6)


def test_mixed_norm_scipy_oracle():
    scipy = pytest.importorskip("scipy")
    from scipy.integrate import dblquad

    f = spaces.kernel_probe(HL, 2.5, np.array([0.3 + 1.2j]))
    p, q, nu = 2.0, 3.0, 1.5

    def inner(y):
        val, _ = scipy.integrate.quad(
            lambda x: abs(complex(f(np.array([[x + 1j * y]]))[0])) ** p,
            -80, 80, epsabs=1e-12, epsrel=1e-10)
        return val

    ys = None
    outer, _ = scipy.integrate.quad(lambda y: inner(y) ** (q / p) * y ** nu,
                                    1e-6, 80, epsabs=1e-12, epsrel=1e-9)
    want = outer ** (1.0 / q)
    got = spaces.mixed_norm(f, HL, MixedNormParams(p, q, nu, DISPLAY))
    assert got == pytest.approx(want, rel=1e-4)


def test_mixed_norm_zero_function():
    zero = lambda z: np.zeros(z.shape[:-1], dtype=complex)
    assert spaces.mixed_norm(zero, HL, MixedNormParams(2.0, 2.0, 1.0)) == 0.0


def test_mixed_norm_absolute_homogeneity():
    rng = np.random.default_rng(0)
    f = spaces.kernel_probe(HL, 3.0, np.array([0.1 + 0.9j]))
    params = MixedNormParams(2.0, 3.0, 1.0, DISPLAY)
    base = spaces.mixed_norm(f, HL, params)
    for _ in range(3):
        a = complex(rng.normal(), rng.normal())
        assert spaces.mixed_norm(a * f, HL, params) == pytest.approx(
            abs(a) * base, rel=1e-9)


def test_mixed_norm_triangle_inequality():
    f = spaces.kernel_probe(HL, 3.0, np.array([1j]))
    g = spaces.kernel_probe(HL, 2.5, np.array([0.4 + 1.5j]), coefficient=0.7j)
    params = MixedNormParams(2.0, 2.0, 1.0, MEASURE)
    nf = spaces.mixed_norm(f, HL, params)
    ng = spaces.mixed_norm(g, HL, params)
    nfg = spaces.mixed_norm(f + g, HL, params)
    assert nfg <= nf + ng + 1e-8


def test_mixed_norm_pq_collapse():
    f = spaces.kernel_probe(HL, 2.0, np.array([1j]))
    nested = spaces.mixed_norm(f, HL, MixedNormParams(2.0, 2.0, 2.0, MEASURE))
    # independent route: Monte Carlo tube quadrature of |f|^2 against the weight
    from tubespaces import quad
    spec = quad.IntegralSpec(cone=HL, method="mc", mc_samples=400_000, seed=4,
                             anchor_y=np.ones(1))
    res = quad.integrate_tube(
        HL, lambda z: np.abs(f(z)) ** 2 * quad.delta_power_real(HL, z.imag, 1.0),
        spec)
    assert nested ** 2 == pytest.approx(res.value.real, rel=4e-3)


def test_mixed_norm_dilation_slope():
    # probe family with dilated base point: the norm follows the
    # change-of-variables exponent -r gamma + r nu_w + n (q = p here)
    from tubespaces import quad
    gamma, p, nu = 3.0, 2.0, 1.0
    params = MixedNormParams(p, p, nu, MEASURE)

    def value(lam):
        f = spaces.kernel_probe(HL, gamma, np.array([lam * 1j]))
        return spaces.mixed_norm(f, HL, params) ** p

    fit = quad.detect_exponent(value, [1, 2, 4, 8])
    want = -p * gamma + (nu - 1.0) + 2.0   # halfline: r=1, n=1, measure weight
    assert fit.slope == pytest.approx(want, rel=0.02)


def test_mixed_norm_infinite_q():
    f = spaces.kernel_probe(HL, 2.0, np.array([1j]))
    v = spaces.mixed_norm(f, HL, MixedNormParams(2.0, math.inf, 0.0, DISPLAY))
    assert np.isfinite(v) and v > 0


def test_mixed_norm_divergence_check():
    # gamma too small for the weight: norm diverges; ladder must classify it
    f = spaces.kernel_probe(HL, 1.0, np.array([1j]))
    with pytest.raises(DivergentIntegralError):
        spaces.mixed_norm(f, HL, MixedNormParams(1.0, 1.0, 1.5, DISPLAY),
                          check=True)


def test_lorentz_mixed_norm_matches_mc():
    from tubespaces import quad
    f = spaces.kernel_probe(LO, 4.0, 1j * cone.identity(LO))
    nu = 2.0
    nested = spaces.mixed_norm(f, LO, MixedNormParams(2.0, 2.0, nu, MEASURE))
    spec = quad.IntegralSpec(cone=LO, method="mc", mc_samples=400_000, seed=6,
                             anchor_y=cone.identity(LO))
    res = quad.integrate_tube(
        LO, lambda z: np.abs(f(z)) ** 2 * quad.delta_power_real(LO, z.imag, nu - 1.5),
        spec)
    assert nested ** 2 == pytest.approx(res.value.real, rel=0.05)


def test_product_norm_m1_reduction():
    f = spaces.kernel_probe(HL, 2.0, np.array([1j]))
    v1 = spaces.product_norm(lambda zs: f(zs[0][..., None]), HL,
                             ProductParams(1, (2.0,), (2.0,)))
    v2 = spaces.mixed_norm(f, HL, MixedNormParams(2.0, 2.0, 2.0, MEASURE))
    assert v1 == pytest.approx(v2, rel=1e-7)


def test_product_norm_separable_factorizes():
    g1 = spaces.kernel_probe(HL, 2.0, np.array([1j]))
    g2 = spaces.kernel_probe(HL, 2.5, np.array([0.5 + 1.5j]))
    params = ProductParams(2, (2.0, 3.0), (2.0, 2.5))
    v12 = spaces.product_norm(
        lambda zs: g1(zs[0][..., None]) * g2(zs[1][..., None]), HL, params)
    n1 = spaces.mixed_norm(g1, HL, MixedNormParams(2.0, 2.0, 2.0, MEASURE))
    n2 = spaces.mixed_norm(g2, HL, MixedNormParams(3.0, 3.0, 2.5, MEASURE))
    assert v12 == pytest.approx(n1 * n2, rel=1e-5)


def test_product_params_validation():
    with pytest.raises(ValueError):
        ProductParams(2, (2.0,), (2.0, 3.0))


def test_herz_monotone_in_radius_and_homogeneous():
    f = spaces.kernel_probe(HL, 2.0, np.array([1j]))
    h1 = spaces.herz_norm(f, HL, 2.0, 2.0, 0.5, 0.4)
    h2 = spaces.herz_norm(f, HL, 2.0, 2.0, 0.5, 0.8)
    assert h2 > h1 > 0
    assert spaces.herz_norm(3.0 * f, HL, 2.0, 2.0, 0.5, 0.4) == pytest.approx(
        3.0 * h1, rel=1e-9)


def test_herz_continuous_vs_lattice_comparable():
    f = spaces.kernel_probe(HL, 2.5, np.array([1j]))
    cont = spaces.herz_norm(f, HL, 2.0, 2.0, 0.5, 0.5)
    region = lattice.TubeRegion(HL, 6.0, 0.125, 8.0)
    lat = lattice.build_lattice(region, 0.5)
    disc = spaces.herz_norm(f, HL, 2.0, 2.0, 0.5, 0.5, lattice=lat)
    ratio = cont / disc
    assert 0.1 <= ratio <= 10.0


def test_pairing_diagonal_equals_norm_squared():
    f = spaces.kernel_probe(HL, 2.0, np.array([1j]))
    nu = 2.0
    pr = spaces.pairing(f, f, HL, nu)
    n2 = spaces.mixed_norm(f, HL, MixedNormParams(2.0, 2.0, nu, MEASURE)) ** 2
    assert pr.real == pytest.approx(n2, rel=1e-6)
    assert abs(pr.imag) <= 1e-10 * abs(pr.real)


def test_pairing_conjugate_symmetry():
    f = spaces.kernel_probe(HL, 2.0, np.array([1j]))
    g = spaces.kernel_probe(HL, 2.5, np.array([0.4 + 1.2j]), coefficient=1 - 2j)
    a = spaces.pairing(f, g, HL, 2.0)
    b = spaces.pairing(g, f, HL, 2.0)
    assert a == pytest.approx(np.conj(b), rel=1e-8)


def test_pairing_reproduces_through_kernel():
    # <f, B_nu(., w)> = f(w)/c_nu for the unnormalized kernel probe
    nu = 2.0
    const = tube.calibrate_constant(HL, nu)
    f = spaces.kernel_probe(HL, 4.0, np.array([1j]))
    w0 = np.array([0.3 + 0.8j])
    kp = spaces.kernel_probe(HL, nu + 1.0, w0)
    got = spaces.pairing(f, kp, HL, nu)
    want = complex(f(w0[None, :])[0]) / const.value
    assert got == pytest.approx(want, rel=1e-6)


def test_pairing_hoelder():
    f = spaces.kernel_probe(HL, 3.0, np.array([1j]))
    g = spaces.kernel_probe(HL, 2.5, np.array([0.2 + 1.4j]))
    nu = 2.0
    p = 2.0
    lhs = abs(spaces.pairing(f, g, HL, nu))
    nf = spaces.mixed_norm(f, HL, MixedNormParams(p, p, nu, MEASURE))
    ng = spaces.mixed_norm(g, HL, MixedNormParams(p, p, nu, MEASURE))
    assert lhs <= nf * ng + 1e-8


def test_projection_range_values():
    c = cone.lorentz(4)   # n/r = 2
    rep = spaces.projection_range(2.0, 1.0, c)
    assert rep.q_nu == pytest.approx(2.0)
    assert rep.q_hi == pytest.approx(4.0)
    assert rep.q_lo == pytest.approx(4.0 / 3.0)
    rep1 = spaces.projection_range(1.0, 1.0, c)
    assert rep1.q_hi == pytest.approx(rep1.q_nu)


def test_projection_range_rank_one_degenerate():
    rep = spaces.projection_range(2.0, 1.0, HL)
    assert rep.degenerate
    assert rep.q_lo == 1.0 and rep.q_hi == math.inf and rep.q_nu is None
