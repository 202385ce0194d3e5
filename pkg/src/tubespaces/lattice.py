"""Invariant geometry on the tube: balls, r-lattices, atomic decomposition.

The invariant cone distance is d(y1, y2) = ||log spectrum||_2 of the relative
position of y1 with respect to y2 (the generalized-eigenvalue spectrum of the
pair, computed through the quadratic representation).  It is symmetric,
scale-invariant, and reduces to |log(y1/y2)| on the half-line.

Balls are realized as products: a cone-metric ball of radius rho around the
imaginary part times a Euclidean ball of radius rho * Det^(1/r)(Im center)
around the real part.  This realization is equivariant under dilations and
real translations and reproduces the hyperbolic ball on the half-plane, which
is the property the covering lemmas actually use.

Lattices are built greedily: a sample joins the lattice when no existing ball
of radius (1 - margin) r covers it, so the certified covering radius r keeps
a safety margin for fresh points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import cone as cone_mod
from . import quad as quad_mod
from . import tube as tube_mod
from .cone import ConeDescriptor
from .errors import BudgetExceededError, DomainError, IllConditionedError
from .quad import IntegralSpec
from .tube import TubePoint


# ---------------------------------------------------------------------------
# Invariant cone distance
# ---------------------------------------------------------------------------

def relative_spectrum(cone: ConeDescriptor, y1, y2) -> np.ndarray:
    """Spectrum of P(y2^(-1/2)) y1, the generalized eigenvalues of (y1, y2)."""
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    inv_sqrt = cone_mod.power_element(cone, y2, -0.5)
    rel = cone_mod.quadratic_representation(cone, inv_sqrt, y1)
    lam, _ = cone_mod.spectral_decompose(cone, rel)
    return lam


def cone_distance(cone: ConeDescriptor, y1, y2) -> float:
    """Invariant Riemannian distance on the cone (scale-invariant metric)."""
    if not (np.all(cone_mod.contains(cone, np.asarray(y1, dtype=float)))
            and np.all(cone_mod.contains(cone, np.asarray(y2, dtype=float)))):
        raise DomainError("cone distance requires interior points")
    lam = relative_spectrum(cone, y1, y2)
    if np.any(lam <= 0):
        raise DomainError("relative spectrum left the cone (degenerate input)")
    return float(np.linalg.norm(np.log(lam)))


# ---------------------------------------------------------------------------
# Balls
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BallSpec:
    """Product ball: cone-metric ball around Im(center) x scaled x-ball."""

    center: TubePoint
    radius: float

    @property
    def x_radius(self) -> float:
        c = self.center
        return self.radius * float(
            cone_mod.determinant(c.cone, c.y)) ** (1.0 / c.cone.r)


def ball_contains(ball: BallSpec, z) -> bool:
    c = ball.center
    zv = tube_mod._as_zvec(z)
    if not bool(cone_mod.contains(c.cone, zv.imag)):
        return False
    if np.linalg.norm(zv.real - c.x) >= ball.x_radius:
        return False
    return cone_distance(c.cone, zv.imag, c.y) < ball.radius


def _ball_pseudodistance(center: TubePoint, z) -> float:
    """max of the two ball conditions, normalized so membership at radius rho
    is pseudodistance < rho.  Anisotropic in the center, good for covering."""
    zv = tube_mod._as_zvec(z)
    dx = np.linalg.norm(zv.real - center.x) / float(
        cone_mod.determinant(center.cone, center.y)) ** (1.0 / center.cone.r)
    return max(cone_distance(center.cone, zv.imag, center.y), float(dx))


class _CenterIndex:
    """Cached arrays over lattice centers for vectorized pseudodistance queries."""

    def __init__(self, cone: ConeDescriptor):
        self.cone = cone
        self.xs: list = []
        self.inv_sqrt: list = []
        self.det_pow: list = []

    def append(self, x: np.ndarray, y: np.ndarray):
        self.xs.append(x)
        self.inv_sqrt.append(cone_mod.power_element(self.cone, y, -0.5))
        self.det_pow.append(float(cone_mod.determinant(self.cone, y))
                            ** (1.0 / self.cone.r))

    def __len__(self):
        return len(self.xs)

    @classmethod
    def from_lattice(cls, lat: "Lattice") -> "_CenterIndex":
        idx = cls(lat.cone)
        for p in lat.points:
            idx.append(p.x, p.y)
        return idx

    def pseudodistances(self, z) -> np.ndarray:
        """(k,) pseudodistances of one tube point to every center."""
        return self.pseudodistances_batch(tube_mod._as_zvec(z)[None, :])[0]

    def pseudodistances_batch(self, zs: np.ndarray) -> np.ndarray:
        """(m, k) pseudodistances of m tube points to every center."""
        xs = np.asarray(self.xs)
        inv = np.asarray(self.inv_sqrt)
        dp = np.asarray(self.det_pow)
        rel = cone_mod.quadratic_representation(self.cone, inv, zs.imag[:, None, :])
        lam, _ = cone_mod.spectral_decompose(self.cone, rel)
        with np.errstate(all="ignore"):
            dcone = np.linalg.norm(np.log(np.maximum(lam, 1e-300)), axis=-1)
        dcone = np.where(np.min(lam, axis=-1) > 0.0, dcone, np.inf)
        dx = np.linalg.norm(zs.real[:, None, :] - xs, axis=-1) / dp
        return np.maximum(dcone, dx)


def sample_ball(ball: BallSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    """Exact ball samples via the equivariant construction (no rejection)."""
    c = ball.center
    cone = c.cone
    sqrt_y = cone_mod.power_element(cone, c.y, 0.5)
    xi = rng.normal(size=(size, cone.r))
    xi *= (ball.radius * rng.uniform(size=size) ** (1.0 / cone.r)
           / np.linalg.norm(xi, axis=-1))[:, None]
    direction = cone_mod.random_cone_point(cone, rng, size=size)
    _, frame = cone_mod.spectral_decompose(cone, direction)
    u = np.einsum("kr,krn->kn", np.exp(xi), frame)
    y = cone_mod.quadratic_representation(cone, sqrt_y, u)
    xdir = rng.normal(size=(size, cone.n))
    xdir *= (rng.uniform(size=size) ** (1.0 / cone.n)
             / np.linalg.norm(xdir, axis=-1))[:, None]
    return (c.x + ball.x_radius * xdir) + 1j * y


def _euclidean_ball_volume(n: int, radius: float) -> float:
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0) * radius ** n


def _cone_ball_weighted(ball: BallSpec, alpha: float, level: int) -> float:
    """int over the cone-metric ball of Det^alpha(y) dy by adapted quadrature."""
    c = ball.center
    cone = c.cone
    rho = ball.radius
    if cone.kind == cone_mod.HALF_LINE:
        n = max(8, 8 * (level + 1))
        tau, w = quad_mod._gauss_on(math.log(c.y[0]) - rho, math.log(c.y[0]) + rho, n)
        y = np.exp(tau)
        return float(np.dot(y ** (alpha + 1.0), w))
    # box + indicator, box built equivariantly from the center spectrum
    lam, _ = cone_mod.spectral_decompose(cone, c.y)
    h = 2.2 * float(lam[0]) * math.exp(rho)
    n1 = 14 + 8 * level
    axes = [quad_mod._gauss_on(c.y[k] - h, c.y[k] + h, n1) for k in range(cone.n)]
    grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
    wgts = np.meshgrid(*[a[1] for a in axes], indexing="ij")
    pts = np.stack(grids, axis=-1).reshape(-1, cone.n)
    wt = np.ones_like(wgts[0])
    for arr in wgts:
        wt = wt * arr
    wt = wt.reshape(-1)
    inside = np.asarray(cone_mod.contains(cone, pts))
    dvals = np.zeros(len(pts))
    idx = np.where(inside)[0]
    for i in idx:
        lamr = relative_spectrum(cone, pts[i], c.y)
        if np.all(lamr > 0) and np.linalg.norm(np.log(lamr)) < rho:
            dvals[i] = float(cone_mod.determinant(cone, pts[i])) ** alpha
    return float(np.dot(dvals, wt))


def ball_volume(ball: BallSpec, alpha: float = 0.0,
                spec: IntegralSpec | None = None) -> quad_mod.IntegrationResult:
    """Weighted volume int_B Det^alpha(Im z) dnu(z).

    The x-factor separates exactly (Euclidean ball volume); the cone factor is
    integrated by adapted quadrature.  Scales like Det^(alpha + 2n/r) of the
    center under dilations; the printed exponent 2r/n is the inverted form.
    """
    spec = spec or IntegralSpec(cone=ball.center.cone)
    cone = ball.center.cone
    vx = _euclidean_ball_volume(cone.n, ball.x_radius)
    prev = None
    value, err = 0.0, math.inf
    evals = 0
    for level in range(3 if cone.kind != cone_mod.HALF_LINE else 4):
        value = vx * _cone_ball_weighted(ball, alpha, level)
        evals += 1
        if prev is not None:
            err = abs(value - prev)
            if err <= max(spec.tol(2 * cone.n), 5e-3) * max(abs(value), 1e-300):
                return quad_mod.IntegrationResult(value, err, True, evals)
        prev = value
    return quad_mod.IntegrationResult(value, err, False, evals, "budget_exceeded")


def ball_local_mass(f, ball: BallSpec, p: float, alpha: float,
                    spec: IntegralSpec | None = None) -> float:
    """int_B |f|^p Det^alpha(Im z) dnu(z) over the product ball (half-line)."""
    c = ball.center
    cone = c.cone
    if cone.kind != cone_mod.HALF_LINE:
        raise NotImplementedError("local ball masses support the half-line")
    n = 12
    tau, wt = quad_mod._gauss_on(math.log(c.y[0]) - ball.radius,
                                 math.log(c.y[0]) + ball.radius, n)
    y = np.exp(tau)
    xs, wx = quad_mod._gauss_on(c.x[0] - ball.x_radius, c.x[0] + ball.x_radius, n)
    z = (xs[None, :] + 1j * y[:, None])[..., None]
    vals = np.abs(np.asarray(f(z.reshape(-1, 1)))).reshape(n, n)
    w2 = (y ** (alpha + 1.0) * wt)[:, None] * wx[None, :]
    return float(np.sum(vals ** p * w2))


# ---------------------------------------------------------------------------
# Regions and lattices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TubeRegion:
    """Truncated tube: |Re z|_inf <= x_extent, delta(Im z) in [delta_min, delta_max],
    anisotropy of the imaginary part capped at u_cap (rank >= 2 kinds)."""

    cone: ConeDescriptor
    x_extent: float
    delta_min: float
    delta_max: float
    u_cap: float = 1.0

    def doubled(self) -> "TubeRegion":
        return replace(self, x_extent=2.0 * self.x_extent)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        cone = self.cone
        x = rng.uniform(-self.x_extent, self.x_extent, size=(size, cone.n))
        if cone.kind == cone_mod.HALF_LINE:
            y = np.exp(rng.uniform(math.log(self.delta_min),
                                   math.log(self.delta_max), size=size))[:, None]
        elif cone.kind == cone_mod.LORENTZ:
            det = np.exp(rng.uniform(math.log(self.delta_min),
                                     math.log(self.delta_max), size=size))
            t = np.sqrt(det)
            u = rng.uniform(0.0, self.u_cap, size=size)
            phi = rng.uniform(0.0, 2.0 * np.pi, size=size)
            y = np.stack([t * np.cosh(u), t * np.sinh(u) * np.cos(phi),
                          t * np.sinh(u) * np.sin(phi)], axis=-1)
        else:
            raise NotImplementedError(f"region sampling for {cone.describe()}")
        return x + 1j * y

    def contains(self, z) -> bool:
        zv = tube_mod._as_zvec(z)
        if np.max(np.abs(zv.real)) > self.x_extent:
            return False
        if not bool(cone_mod.contains(self.cone, zv.imag)):
            return False
        d = float(cone_mod.determinant(self.cone, zv.imag))
        return self.delta_min <= d <= self.delta_max


@dataclass
class Lattice:
    cone: ConeDescriptor
    points: list            # list of TubePoint
    radius: float
    overlap_radius: float   # R = (1 + r)/2
    multiplicity: int
    region: TubeRegion | None = None

    def __len__(self):
        return len(self.points)

    def imag_parts(self) -> np.ndarray:
        return np.stack([p.y for p in self.points])

    def as_complex(self) -> np.ndarray:
        return np.stack([p.x + 1j * p.y for p in self.points])


def build_lattice(region: TubeRegion, r: float, sample_budget: int = 40_000,
                  margin: float = 0.15, seed: int = 0) -> Lattice:
    """Greedy covering lattice on a truncated tube.

    Deterministic for fixed inputs: the sample stream is seeded and processed
    in order; a sample becomes a lattice point when no existing ball of radius
    (1 - margin) r covers it.  Covering at radius r is then certified with a
    margin that absorbs fresh off-sample points.
    """
    rng = np.random.default_rng(seed)
    samples = region.sample(rng, sample_budget)
    centers: list[TubePoint] = []
    index = _CenterIndex(region.cone)
    threshold = (1.0 - margin) * r
    chunk = 1500
    for lo in range(0, len(samples), chunk):
        block = samples[lo:lo + chunk]
        if len(centers):
            dmin = index.pseudodistances_batch(block).min(axis=1)
            block = block[dmin >= threshold]
        fresh = _CenterIndex(region.cone)
        for s in block:
            if len(fresh) and bool(np.min(fresh.pseudodistances(s)) < threshold):
                continue
            centers.append(TubePoint(region.cone, s.real.copy(), s.imag.copy()))
            index.append(s.real.copy(), s.imag.copy())
            fresh.append(s.real.copy(), s.imag.copy())
    R = 0.5 * (1.0 + r)
    lat = Lattice(region.cone, centers, r, R, 0, region)
    lat.multiplicity = _max_multiplicity(lat, rng, 2_000)
    return lat


def _max_multiplicity(lat: Lattice, rng, n_samples: int) -> int:
    probes = lat.region.sample(rng, n_samples)
    index = _CenterIndex.from_lattice(lat)
    counts = (index.pseudodistances_batch(probes) < lat.overlap_radius).sum(axis=1)
    return int(counts.max())


@dataclass
class LatticeReport:
    covering_rate: float
    max_multiplicity: int
    delta_ratio_low: float
    delta_ratio_high: float
    kernel_ratio_low: float
    kernel_ratio_high: float
    n_points: int


def check_lattice(lat: Lattice, n_samples: int = 10_000, nu: float | None = None,
                  seed: int = 1) -> LatticeReport:
    """Certify covering/multiplicity and measure comparability constants.

    delta ratios: extremes of delta(z)/delta(a_k) over ball samples (two-sided
    comparability); kernel ratios: extremes of |B_nu(z, a_k)| / |B_nu(a_k, a_k)|.
    """
    cone = lat.cone
    rng = np.random.default_rng(seed)
    fresh = lat.region.sample(rng, n_samples)
    index = _CenterIndex.from_lattice(lat)
    covered = 0
    for lo in range(0, n_samples, 2000):
        block = fresh[lo:lo + 2000]
        covered += int(np.sum(
            index.pseudodistances_batch(block).min(axis=1) < lat.radius))
    nu = nu if nu is not None else cone.n / cone.r + 1.0

    d_lo, d_hi = math.inf, 0.0
    k_lo, k_hi = math.inf, 0.0
    for a in lat.points:
        ball = BallSpec(center=a, radius=lat.radius)
        zs = sample_ball(ball, rng, 40)
        da = float(cone_mod.determinant(cone, a.y))
        ka = abs(tube_mod.kernel(cone, nu, a.x + 1j * a.y, a.x + 1j * a.y))
        dz = cone_mod.determinant(cone, zs.imag) / da
        kz = np.abs(tube_mod.kernel(cone, nu, zs, a.x + 1j * a.y)) / ka
        d_lo, d_hi = min(d_lo, float(dz.min())), max(d_hi, float(dz.max()))
        k_lo, k_hi = min(k_lo, float(kz.min())), max(k_hi, float(kz.max()))
    mult = _max_multiplicity(lat, rng, n_samples // 2)
    return LatticeReport(covered / len(fresh), mult, d_lo, d_hi, k_lo, k_hi,
                         len(lat.points))


# ---------------------------------------------------------------------------
# Sampling norm and atomic decomposition
# ---------------------------------------------------------------------------

def sampling_norm(f, lat: Lattice, p: float, nu: float) -> float:
    """Lattice sum sum_j |f(z_j)|^p Det^(nu + n/r)(y_j), comparable to norm^p."""
    cone = lat.cone
    z = lat.as_complex()
    weights = cone_mod.determinant(cone, z.imag) ** (nu + cone.n / cone.r)
    vals = np.abs(np.asarray(f(z))) ** p
    return float(np.dot(vals, weights))


@dataclass
class AtomicCoefficients:
    lattice: Lattice
    nu: float
    p: float
    lambdas: np.ndarray
    constant: float = 1.0
    fit_residual: float = 0.0

    def weight_sum(self) -> float:
        cone = self.lattice.cone
        y = self.lattice.imag_parts()
        w = cone_mod.determinant(cone, y) ** (self.nu + cone.n / cone.r)
        return float(np.dot(np.abs(self.lambdas) ** self.p, w))


def atomic_synthesize(coeffs: AtomicCoefficients, z) -> np.ndarray:
    """f(z) = sum_j lambda_j B_nu(z, z_j) Det^(nu + n/r)(y_j)."""
    lat = coeffs.lattice
    cone = lat.cone
    zv = tube_mod._as_zvec(z)
    zj = lat.as_complex()
    w = cone_mod.determinant(cone, zj.imag) ** (coeffs.nu + cone.n / cone.r)
    out = np.zeros(zv.shape[:-1], dtype=complex)
    for j in range(len(zj)):
        out = out + coeffs.lambdas[j] * w[j] * tube_mod.kernel(
            cone, coeffs.nu, zv, zj[j], constant=coeffs.constant)
    return out


def atomic_analyze(f, lat: Lattice, nu: float, p: float = 2.0,
                   constant: float = 1.0, oversample: int = 4, ridge: float = 1e-8,
                   residual_tol: float = 0.2, seed: int = 3) -> AtomicCoefficients:
    """Fit atomic coefficients by regularized weighted least squares.

    The existence statement gives no algorithm; the synthesis system is fit on
    a dense sample of the lattice region with the A^2-type weight, with a small
    ridge for stability.  Raises IllConditionedError when the weighted fit
    residual exceeds ``residual_tol``.
    """
    cone = lat.cone
    rng = np.random.default_rng(seed)
    n_samples = oversample * len(lat.points) + 200
    zs = lat.region.sample(rng, n_samples)
    wexp = nu - cone.n / cone.r
    wts = np.sqrt(np.maximum(cone_mod.determinant(cone, zs.imag), 0.0) ** wexp)
    zj = lat.as_complex()
    wj = cone_mod.determinant(cone, zj.imag) ** (nu + cone.n / cone.r)
    A = np.empty((n_samples, len(zj)), dtype=complex)
    for j in range(len(zj)):
        A[:, j] = tube_mod.kernel(cone, nu, zs, zj[j], constant=constant) * wj[j]
    A *= wts[:, None]
    b = np.asarray(f(zs)) * wts
    scale = np.linalg.norm(A) / math.sqrt(A.shape[1])
    A_reg = np.vstack([A, math.sqrt(ridge) * scale * np.eye(len(zj))])
    b_reg = np.concatenate([b, np.zeros(len(zj))])
    lambdas, *_ = np.linalg.lstsq(A_reg, b_reg, rcond=None)
    resid = float(np.linalg.norm(A @ lambdas - b) / max(np.linalg.norm(b), 1e-300))
    if resid > residual_tol:
        raise IllConditionedError(f"atomic fit residual {resid:.3e}")
    return AtomicCoefficients(lat, nu, p, lambdas, constant, resid)


def region_norm_error(f, g, region: TubeRegion, nu: float, n_samples: int = 4000,
                      seed: int = 5) -> float:
    """Relative A^2_nu distance of f and g over the region (Monte Carlo)."""
    cone = region.cone
    rng = np.random.default_rng(seed)
    zs = region.sample(rng, n_samples)
    w = cone_mod.determinant(cone, zs.imag) ** (nu - cone.n / cone.r)
    fv = np.asarray(f(zs))
    gv = np.asarray(g(zs))
    num = float(np.sum(np.abs(fv - gv) ** 2 * w))
    den = float(np.sum(np.abs(fv) ** 2 * w))
    return math.sqrt(num / max(den, 1e-300))


# ---------------------------------------------------------------------------
# Submean value check
# ---------------------------------------------------------------------------

@dataclass
class SubmeanReport:
    c_fit: float
    ball_volume: float
    integral: float
    worst_point_value: float
    holds: bool


def verify_submean(f, z0: TubePoint, rho: float, p: float = 2.0,
                   cap: float = 100.0, chi=None, n_test: int = 60,
                   extra_test_points=None, seed: int = 7) -> SubmeanReport:
    """Check chi(z) <= C / vol(B(z0, rho)) * int_{B(z0, R)} chi dnu on ball points.

    chi defaults to |f|^p (plurisubharmonic for analytic f).  R = (1 + rho)/2.
    The fitted constant is the worst ratio over tested points (random ball
    samples, the center, and any ``extra_test_points``); ``holds`` is False
    when it exceeds ``cap``, which catches non-subharmonic bumps.
    """
    cone = z0.cone
    if chi is None:
        chi = lambda z: np.abs(np.asarray(f(z))) ** p
    R = 0.5 * (1.0 + rho)
    inner = BallSpec(center=z0, radius=rho)
    outer = BallSpec(center=z0, radius=R)
    vol = ball_volume(outer, 0.0).real

    # integral of chi over the outer ball by midpoint Monte Carlo (exact sampler)
    rng = np.random.default_rng(seed)
    zs = sample_ball(outer, rng, 6000)
    integral = vol * float(np.mean(chi(zs)))

    pieces = [sample_ball(inner, rng, n_test - 1), (z0.x + 1j * z0.y)[None, :]]
    if extra_test_points is not None:
        pieces.append(np.asarray(extra_test_points, dtype=complex))
    test = np.concatenate(pieces)
    worst = float(np.max(chi(test)))
    c_fit = worst * vol / max(integral, 1e-300)
    return SubmeanReport(c_fit, vol, integral, worst, bool(c_fit <= cap))


# ---------------------------------------------------------------------------
# Lattice export / import (line-oriented text, bit-exact round trip)
# ---------------------------------------------------------------------------

def save_lattice(lat: Lattice, path: str):
    lines = ["# tube-lattice v1",
             f"cone {lat.cone.describe()}",
             f"r {lat.radius!r}",
             f"R {lat.overlap_radius!r}",
             f"m {lat.multiplicity}"]
    for pt in lat.points:
        coords = [repr(float(v)) for v in pt.x] + [repr(float(v)) for v in pt.y]
        lines.append("point " + " ".join(coords))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_lattice(path: str) -> Lattice:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    header = dict(ln.split(None, 1) for ln in lines if not ln.startswith("point"))
    cone = cone_mod.from_name(header["cone"].replace("(", "").replace(")", ""))
    pts = []
    for ln in lines:
        if not ln.startswith("point"):
            continue
        vals = [float(tok) for tok in ln.split()[1:]]
        x = np.array(vals[:cone.n])
        y = np.array(vals[cone.n:])
        pts.append(TubePoint(cone, x, y))
    return Lattice(cone, pts, float(header["r"]), float(header["R"]),
                   int(header["m"]), None)
