"""Jordan algebra primitives: determinants, minors, spectra, powers."""

import numpy as np
import pytest

from tubespaces import cone
from tubespaces.errors import DomainError

ALL_CONES = [
    cone.half_line(),
    cone.lorentz(3),
    cone.spd(2),
    cone.product(cone.half_line(), cone.lorentz(3)),
]


def test_descriptor_invariants():
    assert cone.half_line().n == 1 and cone.half_line().r == 1
    lo = cone.lorentz(5)
    assert lo.n == 5 and lo.r == 2
    sp = cone.spd(3)
    assert sp.n == 6 and sp.r == 3
    pr = cone.product(cone.lorentz(3), cone.spd(2))
    assert pr.n == 6 and pr.r == 4
    with pytest.raises(ValueError):
        cone.lorentz(2)


def test_peirce_multiplicity():
    assert cone.half_line().peirce_d == 0.0
    assert cone.lorentz(4).peirce_d == pytest.approx(2.0)  # 2(n/r-1)/(r-1), n=4, r=2
    assert cone.spd(3).peirce_d == pytest.approx(1.0)


@pytest.mark.parametrize("c", ALL_CONES, ids=lambda c: c.describe())
def test_identity(c):
    e = cone.identity(c)
    assert cone.determinant(c, e) == pytest.approx(1.0)
    assert bool(cone.contains(c, e))


def test_determinant_values():
    assert cone.determinant(cone.lorentz(3), np.array([2.0, 1.0, 0.0])) == pytest.approx(3.0)
    v = cone.spd_matrix_to_coords(np.diag([2.0, 3.0]))
    assert cone.determinant(cone.spd(2), v) == pytest.approx(6.0)


def test_contains_examples():
    assert not bool(cone.contains(cone.lorentz(3), np.array([1.0, 2.0, 0.0])))
    v = cone.spd_matrix_to_coords(np.diag([1.0, -1.0]))
    assert not bool(cone.contains(cone.spd(2), v))


def test_spd_coordinates_isometry():
    rng = np.random.default_rng(0)
    for _ in range(20):
        a = rng.normal(size=(3, 3))
        b = rng.normal(size=(3, 3))
        A, B = a + a.T, b + b.T
        ca = cone.spd_matrix_to_coords(A)
        cb = cone.spd_matrix_to_coords(B)
        assert np.dot(ca, cb) == pytest.approx(np.trace(A @ B), rel=1e-12)
        assert np.allclose(cone.spd_coords_to_matrix(3, ca), A)


def test_lorentz_frame_idempotent():
    c = cone.lorentz(4)
    frame = cone.fixed_frame(c)
    e = cone.identity(c)
    for ci in frame:
        assert np.allclose(cone.jordan_product(c, ci, ci), ci, atol=1e-14)
    assert np.allclose(frame.sum(axis=0), e)
    assert np.dot(frame[0], frame[1]) == pytest.approx(0.0, abs=1e-14)


def test_lorentz_minor_against_peirce_projection_oracle():
    # Build the rank-1 Peirce projection for the frozen frame by linear algebra
    # and compare with the implemented first minor.
    c = cone.lorentz(3)
    frame = cone.fixed_frame(c)
    c1 = frame[0]
    # orthogonal projection onto the 1-eigenspace of multiplication by c1
    L = np.stack([cone.jordan_product(c, c1, np.eye(3)[j]) for j in range(3)], axis=1)
    eigval, eigvec = np.linalg.eigh(L)
    one_space = eigvec[:, np.abs(eigval - 1.0) < 1e-12]
    assert one_space.shape[1] == 1
    P1 = one_space @ one_space.T
    rng = np.random.default_rng(1)
    for _ in range(20):
        v = rng.normal(size=3)
        proj = P1 @ v
        # coefficient of c1 in the projection is the rank-1 determinant
        coeff = np.dot(proj, c1) / np.dot(c1, c1)
        assert cone.principal_minor(c, v, 1) == pytest.approx(coeff, rel=1e-12, abs=1e-12)
    assert cone.principal_minor(c, cone.identity(c), 1) == pytest.approx(1.0)


def test_minor_top_equals_determinant():
    rng = np.random.default_rng(2)
    for c in ALL_CONES:
        v = cone.random_cone_point(c, rng)
        assert cone.principal_minor(c, v, c.r) == pytest.approx(
            float(cone.determinant(c, v)), rel=1e-12)
    with pytest.raises(IndexError):
        cone.principal_minor(cone.spd(2), cone.identity(cone.spd(2)), 3)


def test_spd_minors_are_leading_minors():
    rng = np.random.default_rng(3)
    c = cone.spd(3)
    for _ in range(10):
        v = cone.random_cone_point(c, rng)
        m = cone.spd_coords_to_matrix(3, v)
        for k in (1, 2, 3):
            assert cone.principal_minor(c, v, k) == pytest.approx(
                np.linalg.det(m[:k, :k]), rel=1e-12)


@pytest.mark.parametrize("c", ALL_CONES, ids=lambda c: c.describe())
def test_homogeneity(c):
    rng = np.random.default_rng(4)
    for _ in range(25):
        v = cone.random_cone_point(c, rng)
        lam = float(rng.uniform(0.2, 5.0))
        assert cone.determinant(c, lam * v) == pytest.approx(
            lam ** c.r * cone.determinant(c, v), rel=1e-10)
        for k in range(1, c.r + 1):
            assert cone.principal_minor(c, lam * v, k) == pytest.approx(
                lam ** k * cone.principal_minor(c, v, k), rel=1e-10)
        assert bool(cone.contains(c, lam * v))


@pytest.mark.parametrize("c", ALL_CONES, ids=lambda c: c.describe())
def test_determinant_superadditive_on_cone(c):
    rng = np.random.default_rng(5)
    for _ in range(25):
        y = cone.random_cone_point(c, rng)
        yp = cone.random_cone_point(c, rng)
        assert cone.determinant(c, y + yp) >= cone.determinant(c, y) - 1e-12


@pytest.mark.parametrize("c", ALL_CONES, ids=lambda c: c.describe())
def test_generalized_power(c):
    rng = np.random.default_rng(6)
    for _ in range(10):
        v = cone.random_cone_point(c, rng)
        t = float(rng.uniform(-1.5, 1.5))
        flat = cone.generalized_power(c, v, np.full(c.r, t))
        assert flat == pytest.approx(float(cone.determinant(c, v)) ** t, rel=1e-12)
    assert cone.generalized_power(c, cone.random_cone_point(c, rng),
                                  np.zeros(c.r)) == pytest.approx(1.0)


def test_generalized_power_on_frame_combination():
    c = cone.lorentz(3)
    frame = cone.fixed_frame(c)
    a = np.array([3.0, 0.5])
    v = a[0] * frame[0] + a[1] * frame[1]
    s = np.array([1.7, -0.4])
    assert cone.generalized_power(c, v, s) == pytest.approx(
        a[0] ** s[0] * a[1] ** s[1], rel=1e-12)


def test_generalized_power_domain_error():
    c = cone.lorentz(3)
    with pytest.raises(DomainError):
        cone.generalized_power(c, np.array([1.0, 2.0, 0.0]), np.array([1.0, 0.0]))


@pytest.mark.parametrize("c", ALL_CONES, ids=lambda c: c.describe())
def test_spectral_reconstruction(c):
    rng = np.random.default_rng(7)
    for _ in range(20):
        v = rng.normal(size=c.n)  # arbitrary, not necessarily in the cone
        lam, frame = cone.spectral_decompose(c, v)
        recon = np.einsum("r,rn->n", lam, frame)
        assert np.abs(recon - v).max() <= 1e-10
        assert np.all(np.diff(lam) <= 1e-12)  # descending
        for ci in frame:
            assert np.allclose(cone.jordan_product(c, ci, ci), ci, atol=1e-9)


def test_spectral_identity_all_ones():
    for c in ALL_CONES:
        lam, _ = cone.spectral_decompose(c, cone.identity(c))
        assert np.allclose(lam, 1.0)


def test_lorentz_spectrum_closed_form():
    c = cone.lorentz(3)
    v = np.array([2.0, 1.0, 0.0])
    lam, _ = cone.spectral_decompose(c, v)
    assert np.allclose(lam, [3.0, 1.0])


def test_spd_spectrum_matches_eigh():
    c = cone.spd(2)
    m = np.array([[2.0, 1.0], [1.0, 3.0]])
    lam, _ = cone.spectral_decompose(c, cone.spd_matrix_to_coords(m))
    assert np.allclose(sorted(lam), sorted(np.linalg.eigvalsh(m)))


def test_product_determinant_factors():
    pr = cone.product(cone.half_line(), cone.lorentz(3))
    rng = np.random.default_rng(8)
    for _ in range(10):
        v = cone.random_cone_point(pr, rng)
        d1 = cone.determinant(cone.half_line(), v[:1])
        d2 = cone.determinant(cone.lorentz(3), v[1:])
        assert cone.determinant(pr, v) == pytest.approx(float(d1 * d2), rel=1e-12)


def test_quadratic_representation_identities():
    rng = np.random.default_rng(9)
    for c in ALL_CONES:
        a = cone.random_cone_point(c, rng)
        x = rng.normal(size=c.n)
        # P(e) = id and det(P(a)x) = det(a)^2 det(x)
        assert np.allclose(cone.quadratic_representation(c, cone.identity(c), x), x)
        lhs = cone.determinant(c, cone.quadratic_representation(c, a, x))
        rhs = cone.determinant(c, a) ** 2 * cone.determinant(c, x)
        assert lhs == pytest.approx(float(rhs), rel=1e-9)
