"""Function-space machinery: probes, mixed norms, pairings, range formulas.

Weight conventions.  The literature mixes two weights for the same index nu:
the plain power Det^nu(y) dy ("display") and the measure normalization
Det^(nu - n/r)(y) dy ("measure").  Every norm here takes an explicit
``convention`` so no hidden choice leaks into cross-checks; reports carry the
convention used.

Probe functions are finite sums c * Det^(-gamma)((z - conj(w0))/i) with base
points w0 inside the tube.  They are closed under sums, represent kernels
exactly, and have closed-form dilation behavior, which makes them the test
vehicle for every norm and operator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import cone as cone_mod
from . import quad as quad_mod
from . import tube as tube_mod
from .cone import ConeDescriptor
from .errors import DivergentIntegralError, DomainError, UnboundedNormError
from .quad import IntegralSpec
from .tube import TubePoint


# ---------------------------------------------------------------------------
# Probe functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProbeTerm:
    coefficient: complex
    power: float          # gamma > 0
    base: tuple           # w0 as a tuple of complex coordinates

    @property
    def base_array(self) -> np.ndarray:
        return np.asarray(self.base, dtype=complex)


@dataclass(frozen=True)
class ProbeFunction:
    """f(z) = sum_k c_k Det^(-gamma_k)((z - conj(w0_k))/i)."""

    cone: ConeDescriptor
    terms: tuple

    def __call__(self, z) -> np.ndarray:
        zv = tube_mod._as_zvec(z)
        out = None
        for t in self.terms:
            zeta = (zv - np.conj(t.base_array)) / 1j
            val = t.coefficient * tube_mod.delta_power(self.cone, zeta, -t.power,
                                                       on_branch="zero")
            out = val if out is None else out + val
        return out

    def __add__(self, other: "ProbeFunction") -> "ProbeFunction":
        assert self.cone == other.cone
        return ProbeFunction(self.cone, self.terms + other.terms)

    def __mul__(self, scalar) -> "ProbeFunction":
        scaled = tuple(ProbeTerm(t.coefficient * scalar, t.power, t.base)
                       for t in self.terms)
        return ProbeFunction(self.cone, scaled)

    __rmul__ = __mul__

    def dilated(self, lam: float) -> "ProbeFunction":
        """Base points scaled by lam (the dilation family w0 -> lam w0)."""
        return ProbeFunction(self.cone, tuple(
            ProbeTerm(t.coefficient, t.power, tuple(lam * t.base_array))
            for t in self.terms))

    def base_center(self) -> np.ndarray:
        return np.mean([t.base_array.real for t in self.terms], axis=0)

    def anchor_imag(self) -> np.ndarray:
        return np.mean([t.base_array.imag for t in self.terms], axis=0)

    def min_power(self) -> float:
        return min(t.power for t in self.terms)


def probe_eval(f: ProbeFunction, z) -> np.ndarray:
    """Evaluate a probe; principal-branch powers, branch-safe for tube points."""
    return f(z)


def kernel_probe(cone: ConeDescriptor, gamma: float, w0, coefficient=1.0
                 ) -> ProbeFunction:
    if gamma <= 0:
        raise DomainError("probe power must be positive")
    w0 = tube_mod._as_zvec(w0)
    if not bool(cone_mod.contains(cone, w0.imag)):
        raise DomainError("probe base point must lie in the tube")
    return ProbeFunction(cone, (ProbeTerm(complex(coefficient), float(gamma),
                                          tuple(w0)),))


class AbsProbe:
    """|f| for a probe f, keeping the adaptation metadata of the probe."""

    def __init__(self, probe: ProbeFunction):
        self.probe = probe

    def __call__(self, z):
        return np.abs(self.probe(z))

    def base_center(self):
        return self.probe.base_center()

    def anchor_imag(self):
        return self.probe.anchor_imag()

    def min_power(self):
        return self.probe.min_power()


def probe_corpus(cone: ConeDescriptor, size: int, seed: int,
                 gamma_range=(2.5, 4.0), scale: float = 1.0) -> list:
    """Deterministic corpus of single-term probes with interior base points."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(size):
        x0 = 0.4 * scale * rng.normal(size=cone.n)
        y0 = cone_mod.random_cone_point(cone, rng, scale)
        gamma = float(rng.uniform(*gamma_range))
        coeff = complex(rng.normal(), rng.normal())
        out.append(kernel_probe(cone, gamma, x0 + 1j * y0, coefficient=coeff))
    return out


# ---------------------------------------------------------------------------
# Norm parameters
# ---------------------------------------------------------------------------

DISPLAY = "display"   # weight Det^nu(y) dy
MEASURE = "measure"   # weight Det^(nu - n/r)(y) dy


@dataclass(frozen=True)
class MixedNormParams:
    p: float
    q: float
    nu: float
    convention: str = DISPLAY

    def weight_exponent(self, cone: ConeDescriptor) -> float:
        if self.convention == DISPLAY:
            return self.nu
        if self.convention == MEASURE:
            return self.nu - cone.n / cone.r
        raise ValueError(f"unknown convention {self.convention!r}")


@dataclass(frozen=True)
class ProductParams:
    m: int
    ps: tuple
    nus: tuple

    def __post_init__(self):
        if len(self.ps) != self.m or len(self.nus) != self.m:
            raise ValueError("parameter lengths must match the factor count")


@dataclass(frozen=True)
class RangeReport:
    q_nu: float | None
    q_lo: float
    q_hi: float
    degenerate: bool = False


# ---------------------------------------------------------------------------
# Mixed norm
# ---------------------------------------------------------------------------

def _probe_hints(f, cone: ConeDescriptor):
    if isinstance(f, ProbeFunction):
        return f.base_center(), f.anchor_imag()
    return np.zeros(cone.n), cone_mod.identity(cone)


def mixed_norm(f, cone: ConeDescriptor, params: MixedNormParams,
               spec: IntegralSpec | None = None, check: bool = False) -> float:
    """Mixed norm: L^p over the base slice, then weighted L^q across the cone.

    ``check=True`` runs a truncation ladder first and raises
    DivergentIntegralError when the norm is classified divergent.
    p or q may be math.inf (essential-supremum estimates over the same grids).
    """
    spec = spec or IntegralSpec(cone=cone)
    if check:
        verdict = _mixed_norm_ladder(f, cone, params, spec)
        if verdict == "diverged":
            raise DivergentIntegralError("mixed norm classified divergent")
    if cone.kind == cone_mod.HALF_LINE:
        res = _mixed_norm_halfline(f, cone, params, spec)
    elif cone.kind == cone_mod.LORENTZ and cone.n == 3:
        res = _mixed_norm_lorentz(f, cone, params, spec)
    else:
        raise NotImplementedError(f"mixed norm unsupported for {cone.describe()}")
    return res


def _mixed_norm_halfline(f, cone, params, spec, _return_levels: bool = False):
    wexp = params.weight_exponent(cone)
    center, anchor = _probe_hints(f, cone)
    p, q = params.p, params.q
    tol = spec.tol(2)
    prev = None
    value = 0.0
    for level in range(max(spec.levels, 2)):
        nt, nx = (max(4, int(round(b * 1.5 ** level))) for b in (10, 48))
        y, wy = quad_mod._log_nodes(spec.scale, wexp + 1.0, nt,
                                    spec.radial_floor, spec.radial_cutoff)
        th, wth = quad_mod._gauss_on(-0.5 * np.pi, 0.5 * np.pi, nx)
        sx = (y + float(anchor[0]))[:, None]
        x = center[0] + sx * np.tan(th)[None, :]
        wx = sx * wth[None, :] / np.cos(th)[None, :] ** 2
        z = (x + 1j * y[:, None])[..., None]
        vals = np.abs(np.asarray(f(z.reshape(-1, 1)))).reshape(x.shape)
        with np.errstate(all="ignore"):
            if math.isinf(p):
                inner = vals.max(axis=1)
            else:
                inner = np.einsum("ij,ij->i", vals ** p, wx) ** (1.0 / p)
            weight = y ** wexp
            if math.isinf(q):
                value = float(np.max(inner * weight))
            else:
                value = float(np.dot(inner ** q * weight, wy) ** (1.0 / q))
        if prev is not None and abs(value - prev) <= tol * max(abs(value), 1e-300):
            return value
        prev = value
    return value


def _mixed_norm_lorentz(f, cone, params, spec):
    if math.isinf(params.p) or math.isinf(params.q):
        raise NotImplementedError("essential-sup variants are half-line only")
    wexp = params.weight_exponent(cone)
    center, anchor = _probe_hints(f, cone)
    p, q = params.p, params.q
    gamma = f.min_power() if isinstance(f, ProbeFunction) else 2.0
    tol = max(spec.tol(6), 3e-3)
    prev = None
    value = 0.0
    for level in range(min(spec.levels, 3)):
        nt, nu, nphi = (max(4, int(round(b * 1.3 ** level))) for b in (6, 6, 8))
        t, wt = quad_mod._log_nodes(spec.scale, 2.0 * wexp + cone.n, nt,
                                    spec.radial_floor, spec.radial_cutoff,
                                    span_high=min(34.0, 8.0 / max(
                                        2.0 * (gamma - wexp) - cone.n, 0.4) + 6.0))
        u, wu = quad_mod._panel_gauss(0.0, 12.0, nu, panel_width=4.0)
        phi, wphi = quad_mod._phi_nodes(nphi)
        T, U, P = np.meshgrid(t, u, phi, indexing="ij")
        WT, WU, WP = np.meshgrid(wt, wu, wphi, indexing="ij")
        v = np.stack([T * np.cosh(U), T * np.sinh(U) * np.cos(P),
                      T * np.sinh(U) * np.sin(P)], axis=-1).reshape(-1, 3)
        wv = (WT * WU * WP * T ** 2 * np.sinh(U)).reshape(-1)
        a = v + anchor
        sqrt_a, good, logdet = quad_mod._safe_sqrt_element(cone, a)
        mats = quad_mod._quadratic_rep_matrix(cone, sqrt_a)
        jac = np.where(good, np.exp(1.5 * logdet), 0.0)
        charts = quad_mod.lorentz_base_charts(
            0, scale=1.0, radial_cutoff=50.0, w_cap=8.0,
            counts=tuple(max(4, int(round(b * 1.3 ** level))) for b in (6, 6, 8)))
        xp = np.concatenate([c[0] for c in charts])
        wxp = np.concatenate([c[1] for c in charts])
        inner_p = np.zeros(len(v))
        chunk = max(1, int(3_000_000 // len(xp)))
        for lo in range(0, len(v), chunk):
            sl = slice(lo, min(lo + chunk, len(v)))
            x = center + np.einsum("vij,pj->vpi", mats[sl], xp)
            z = x + 1j * v[sl][:, None, :]
            vals = np.abs(np.asarray(f(z.reshape(-1, 3)))).reshape(x.shape[:2])
            inner_p[sl] = (vals ** p) @ wxp * jac[sl]
        with np.errstate(all="ignore"):
            weight = quad_mod.delta_power_real(cone, v, wexp)
            value = float(np.dot(np.maximum(inner_p, 0.0) ** (q / p) * weight, wv)
                          ** (1.0 / q))
        if prev is not None and abs(value - prev) <= tol * max(abs(value), 1e-300):
            return value
        prev = value
    return value


def _mixed_norm_ladder(f, cone, params, spec) -> str:
    values = []
    for k, R in enumerate(quad_mod.DEFAULT_RADII):
        rung = replace(spec, radial_floor=spec.scale / float(2 ** (3 + k)),
                       radial_cutoff=spec.scale * R, rel_tol=3e-3, levels=2)
        if cone.kind == cone_mod.HALF_LINE:
            v = _mixed_norm_halfline(f, cone, params, rung)
        else:
            v = _mixed_norm_lorentz(f, cone, params, rung)
        pw = 1.0 if math.isinf(params.q) else params.q
        values.append(v ** pw)   # ladder on the q-th power, the actual integral
    return quad_mod.divergence_probe(values, quad_mod.DEFAULT_RADII).verdict


def plain_ap_norm(f, cone: ConeDescriptor, p: float, nu: float,
                  convention: str = MEASURE, spec: IntegralSpec | None = None) -> float:
    """Unnested A^p norm: direct tube quadrature of |f|^p against the weight."""
    spec = spec or IntegralSpec(cone=cone)
    wexp = MixedNormParams(p, p, nu, convention).weight_exponent(cone)
    center, anchor = _probe_hints(f, cone)
    spec = replace(spec, weight_exponent=wexp, base_center=center, anchor_y=anchor)

    def integrand(zv):
        return np.abs(f(zv)) ** p * quad_mod.delta_power_real(cone, zv.imag, wexp)

    res = quad_mod.integrate_tube(cone, integrand, spec)
    return float(np.real(res.value)) ** (1.0 / p)


# ---------------------------------------------------------------------------
# Product norm (iterated over factors, first factor innermost)
# ---------------------------------------------------------------------------

def product_norm(f, cone: ConeDescriptor, params: ProductParams,
                 spec: IntegralSpec | None = None) -> float:
    """Iterated norm on the m-fold product tube (measure-convention weights).

    ``f`` maps a list of m broadcastable complex arrays to values on the
    tensor grid.  Half-line factors only (2m real dimensions).
    """
    spec = spec or IntegralSpec(cone=cone)
    if cone.kind != cone_mod.HALF_LINE:
        raise NotImplementedError("product norms support half-line factors")
    m = params.m
    tol = spec.tol(2 * m)
    prev = None
    value = 0.0
    for level in range(spec.levels):
        grids = []
        for j in range(m):
            wexp = params.nus[j] - 1.0
            nt, nx = (max(4, int(round(b * 1.4 ** level))) for b in (8, 26))
            y, wy = quad_mod._log_nodes(spec.scale, wexp + 1.0, nt,
                                        spec.radial_floor, spec.radial_cutoff)
            th, wth = quad_mod._gauss_on(-0.5 * np.pi, 0.5 * np.pi, nx)
            sx = (y + spec.scale)[:, None]
            x = sx * np.tan(th)[None, :]
            wx = sx * wth[None, :] / np.cos(th)[None, :] ** 2
            z = (x + 1j * y[:, None]).reshape(-1)
            w = (wx * (y ** wexp * wy)[:, None]).reshape(-1)
            grids.append((z, w))
        args = []
        for j in range(m):
            shape = [1] * m
            shape[j] = len(grids[j][0])
            args.append(grids[j][0].reshape(shape))
        vals = np.abs(np.asarray(f(args)))
        with np.errstate(all="ignore"):
            acc = vals
            for j in range(m):
                pj = params.ps[j]
                acc = np.tensordot(acc ** pj, grids[j][1], axes=([0], [0]))
                acc = np.maximum(acc, 0.0) ** (1.0 / pj)
            value = float(acc)
        if prev is not None and abs(value - prev) <= tol * max(abs(value), 1e-300):
            return value
        prev = value
    return value


# ---------------------------------------------------------------------------
# Herz quasinorm
# ---------------------------------------------------------------------------

def herz_norm(f, cone: ConeDescriptor, p: float, q: float, alpha: float,
              rho: float, spec: IntegralSpec | None = None, lattice=None) -> float:
    """Herz-type quasinorm: local weighted L^p masses over invariant balls.

    Continuous form: outer Lebesgue integral over centers w of
    (int_{B(w,rho)} |f|^p delta^alpha dnu)^(q/p); the outer display carries no
    root, so the returned value is the display raised to 1/q, making the
    result 1-homogeneous in f.  With ``lattice`` given, the outer integral is
    replaced by the sum over lattice points.
    """
    from .lattice import BallSpec, ball_local_mass   # deferred import

    spec = spec or IntegralSpec(cone=cone)
    if lattice is not None:
        total = 0.0
        for pt in lattice.points:
            ball = BallSpec(center=pt, radius=rho)
            total += ball_local_mass(f, ball, p, alpha, spec) ** (q / p)
        return total ** (1.0 / q)
    if cone.kind != cone_mod.HALF_LINE:
        raise NotImplementedError("continuous Herz quasinorm supports the half-line")
    center, anchor = _probe_hints(f, cone)
    prev = None
    value = 0.0
    for level in range(spec.levels):
        nt, nx = (max(4, int(round(b * 1.4 ** level))) for b in (7, 13))
        yw, wyw = quad_mod._log_nodes(spec.scale, 1.0, nt,
                                      spec.radial_floor, spec.radial_cutoff,
                                      span_low=14.0, span_high=14.0)
        th, wth = quad_mod._gauss_on(-0.5 * np.pi, 0.5 * np.pi, nx)
        outer = np.zeros(len(yw))
        for i, y0 in enumerate(yw):
            sx = y0 + float(anchor[0])
            xs = center[0] + sx * np.tan(th)
            row = np.array([ball_local_mass(
                f, BallSpec(center=TubePoint(cone, np.array([x0]), np.array([y0])),
                            radius=rho), p, alpha, spec) for x0 in xs])
            outer[i] = float(np.dot(row ** (q / p), sx * wth / np.cos(th) ** 2))
        value = float(np.dot(outer, wyw) ** (1.0 / q))
        if prev is not None and abs(value - prev) <= 5e-3 * max(abs(value), 1e-300):
            return value
        prev = value
    return value


# ---------------------------------------------------------------------------
# Duality pairing
# ---------------------------------------------------------------------------

def pairing(f, g, cone: ConeDescriptor, nu: float,
            spec: IntegralSpec | None = None) -> complex:
    """Sesquilinear pairing int f conj(g) Det^(nu - n/r)(Im z) dnu(z)."""
    spec = spec or IntegralSpec(cone=cone)
    wexp = nu - cone.n / cone.r
    center, anchor = _probe_hints(f, cone)
    spec = replace(spec, weight_exponent=wexp, base_center=center, anchor_y=anchor)

    def integrand(zv):
        return (np.asarray(f(zv)) * np.conj(np.asarray(g(zv)))
                * quad_mod.delta_power_real(cone, zv.imag, wexp))

    return complex(quad_mod.integrate_tube(cone, integrand, spec).value)


# ---------------------------------------------------------------------------
# Projection range formula
# ---------------------------------------------------------------------------

def projection_range(p: float, nu: float, cone: ConeDescriptor) -> RangeReport:
    """q_nu = 1 + nu/(n/r - 1) and the projection window (q'_{nu,p}, q_{nu,p}).

    Rank-one geometry (n/r = 1) degenerates the formula; the report then marks
    the window as all of (1, inf) rather than doing +-inf arithmetic.
    """
    if p < 1:
        raise DomainError("p must be at least 1")
    nr = cone.n / cone.r
    if abs(nr - 1.0) < 1e-12:
        return RangeReport(q_nu=None, q_lo=1.0, q_hi=math.inf, degenerate=True)
    q_nu = 1.0 + nu / (nr - 1.0)
    p_conj = math.inf if p == 1.0 else p / (p - 1.0)
    q_hi = min(p, p_conj) * q_nu
    q_lo = q_hi / (q_hi - 1.0) if q_hi > 1.0 else math.inf
    return RangeReport(q_nu=q_nu, q_lo=q_lo, q_hi=q_hi)


# ---------------------------------------------------------------------------
# Weighted supremum norm
# ---------------------------------------------------------------------------

def sup_norm(f, cone: ConeDescriptor, tau: float, refine_rounds: int = 3,
             rungs=None) -> float:
    """Estimate sup |f(z)| Det^tau(Im z) by ladder search plus local refinement.

    Returns a certified lower bound for the supremum.  Raises
    UnboundedNormError when the maxima keep growing along the scale ladder.
    """
    if tau < 0:
        raise DomainError("tau must be nonnegative")
    center, anchor = _probe_hints(f, cone)
    rungs = rungs if rungs is not None else np.geomspace(1e-3, 1e6, 19)

    def grid_max(t_lo, t_hi, nt=24):
        ts = np.geomspace(t_lo, t_hi, nt)
        best = 0.0
        for t in ts:
            ys = [t * cone_mod.identity(cone)]
            if cone.kind == cone_mod.LORENTZ:
                for u in (0.4, 0.9):
                    ys.append(t * np.array([math.cosh(u), math.sinh(u), 0.0]))
            for y in ys:
                sx = float(cone_mod.determinant(cone, y)) ** (1.0 / cone.r) + \
                    float(cone_mod.determinant(cone, anchor)) ** (1.0 / cone.r)
                for fx in (-2.0, -0.5, 0.0, 0.5, 2.0):
                    x = center + fx * sx * np.ones(cone.n) / math.sqrt(cone.n)
                    val = abs(complex(f((x + 1j * y)[None, :])[0]))
                    val *= float(cone_mod.determinant(cone, y)) ** tau
                    best = max(best, val)
        return best

    rung_max = [grid_max(r, r * 3.1) for r in rungs]
    top = np.argmax(rung_max)
    # growth detection at the ladder top
    if top >= len(rungs) - 2:
        tail = rung_max[-3:]
        if tail[-1] > 1.02 * tail[-2] >= 1.02 ** 2 * tail[-3] and tail[-1] > 0:
            raise UnboundedNormError("weighted supremum grows along the scale ladder")
    best = max(rung_max)
    lo = rungs[max(top - 1, 0)]
    hi = rungs[min(top + 1, len(rungs) - 1)]
    for _ in range(refine_rounds):
        best = max(best, grid_max(lo, hi, nt=40))
        mid = math.sqrt(lo * hi)
        lo, hi = mid / (hi / lo) ** 0.25, mid * (hi / lo) ** 0.25
    return best
