"""Tube-domain points and the complexified determinant machinery.

A tube point is z = x + iy with y strictly inside the cone.  The module
provides the boundary-distance function delta(z) = Det(Im z), the complex
determinant, principal-branch determinant powers, the weighted Bergman
kernel with a calibrated normalization constant, and the generalized wave
operator Det((1/i) d/dx).

Kernel sign convention: the kernel decays, i.e. it uses the exponent
-(nu + n/r) on Det((z - conj(w))/i).  Every kernel/measure index nu is
required to satisfy nu > n/r - 1.

Branch policy: powers use the principal logarithm of the scalar complex
determinant, per irreducible factor for product cones.  For irreducible
factors of rank <= 2 the determinant of a tube argument never meets the
closed negative real axis; rank >= 3 SPD factors are outside the verified
envelope and the branch precondition is checked at runtime.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product as iter_product

import numpy as np

from . import cone as cone_mod
from .cone import ConeDescriptor
from .errors import BranchCutError, CalibrationError, DomainError


@dataclass(frozen=True)
class TubePoint:
    """z = x + iy with Im part strictly inside the cone."""

    cone: ConeDescriptor
    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.shape != (self.cone.n,) or y.shape != (self.cone.n,):
            raise ValueError(f"coordinates must have shape ({self.cone.n},)")
        if not bool(cone_mod.contains(self.cone, y)):
            raise DomainError("imaginary part must lie inside the open cone")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def z(self) -> np.ndarray:
        return self.x + 1j * self.y

    @classmethod
    def at_imaginary(cls, cone: ConeDescriptor, y) -> "TubePoint":
        return cls(cone, np.zeros(cone.n), np.asarray(y, dtype=float))


def _as_zvec(z) -> np.ndarray:
    if isinstance(z, TubePoint):
        return z.z
    return np.asarray(z, dtype=complex)


def delta_of(z: TubePoint) -> float:
    """delta(z) = Det(Im z), the determinant distance to the boundary."""
    zv = _as_zvec(z)
    cone = z.cone if isinstance(z, TubePoint) else None
    if cone is None:
        raise TypeError("delta_of expects a TubePoint; use imag_delta for raw arrays")
    return float(cone_mod.determinant(cone, zv.imag))


def imag_delta(cone: ConeDescriptor, z) -> np.ndarray:
    return cone_mod.determinant(cone, _as_zvec(z).imag)


def complex_determinant(cone: ConeDescriptor, zeta) -> np.ndarray:
    """Determinant polynomial extended to complex arguments (..., n) -> (...)."""
    zeta = np.asarray(zeta, dtype=complex)
    if cone.kind == cone_mod.HALF_LINE:
        return zeta[..., 0]
    if cone.kind == cone_mod.LORENTZ:
        return zeta[..., 0] ** 2 - np.sum(zeta[..., 1:] ** 2, axis=-1)
    if cone.kind == cone_mod.SPD:
        return np.linalg.det(cone_mod.spd_coords_to_matrix(cone.spd_size, zeta))
    out = None
    for comp, sl in cone.component_slices():
        d = complex_determinant(comp, zeta[..., sl])
        out = d if out is None else out * d
    return out


def delta_power(cone: ConeDescriptor, zeta, s, on_branch: str = "raise") -> np.ndarray:
    """Principal-branch power Det(zeta)^s; product cones multiply factor powers.

    Raises BranchCutError when any factor determinant lies on (-inf, 0].
    ``on_branch="zero"`` instead zeroes such entries; quadrature integrands use
    it because cancellation-degenerate nodes carry no mass.
    """
    zeta = np.asarray(zeta, dtype=complex)
    if cone.kind == cone_mod.PRODUCT:
        out = None
        for comp, sl in cone.component_slices():
            p = delta_power(comp, zeta[..., sl], s, on_branch)
            out = p if out is None else out * p
        return out
    d = complex_determinant(cone, zeta)
    bad = ((d.imag == 0.0) & (d.real <= 0.0)) | ~np.isfinite(d)
    if np.any(bad):
        if on_branch == "raise":
            raise BranchCutError("determinant on the closed negative real axis")
        d = np.where(bad, 1.0, d)
        out = np.exp(np.asarray(s, dtype=complex) * np.log(d))
        return np.where(bad, 0.0, out)
    return np.exp(np.asarray(s, dtype=complex) * np.log(d))


@dataclass(frozen=True)
class CalibratedConstant:
    """Kernel normalization c_nu fixed by the reproducing identity."""

    nu: float
    value: float
    calibration_error: float

    def __float__(self):
        return float(self.value)


def _constant_value(constant) -> float:
    if isinstance(constant, CalibratedConstant):
        return constant.value
    return float(constant)


def kernel(cone: ConeDescriptor, nu: float, z, w, constant=1.0) -> np.ndarray:
    """Weighted Bergman kernel c_nu * Det((z - conj(w))/i)^(-nu - n/r).

    Hermitian, invariant under common real translations, and homogeneous of
    degree -r(nu + n/r) under simultaneous dilation of both arguments.
    """
    if nu <= cone.n / cone.r - 1.0:
        raise DomainError(f"kernel index must exceed n/r - 1 = {cone.n / cone.r - 1.0}")
    zv = _as_zvec(z)
    wv = _as_zvec(w)
    zeta = (zv - np.conj(wv)) / 1j
    return _constant_value(constant) * delta_power(cone, zeta, -(nu + cone.n / cone.r))


def random_tube_point(cone: ConeDescriptor, rng: np.random.Generator, scale: float = 1.0,
                      size=None):
    """Random tube points with Im parts of spectral size ~ scale (arrays, not TubePoint)."""
    shape = () if size is None else (int(size),)
    x = scale * rng.normal(0.0, 1.0, size=shape + (cone.n,))
    y = cone_mod.random_cone_point(cone, rng, scale, size=size)
    return x + 1j * y


# ---------------------------------------------------------------------------
# Kernel-constant calibration
# ---------------------------------------------------------------------------

def calibrate_constant(cone: ConeDescriptor, nu: float, rel_tol: float = 1e-4,
                       node_budget: int = 4_000_000, gamma: float | None = None,
                       check_points: int = 5, check_tol: float = 1e-3) -> CalibratedConstant:
    """Fix c_nu by forcing the reproducing identity on a kernel-power probe.

    Solves f(z0) = c_nu * I(z0) with I the unnormalized projection integral of
    f(z) = Det((z + ie)/i)^(-gamma) at z0 = ie, then verifies the identity at
    fresh interior points.  Raises CalibrationError when the residual at the
    check points exceeds ``check_tol`` at full quadrature effort.
    """
    from . import quad  # deferred: quad builds on this module

    nr = cone.n / cone.r
    if nu <= nr - 1.0:
        raise DomainError("calibration requires nu > n/r - 1")
    if gamma is None:
        gamma = nu + 2.0 * nr
    e = cone_mod.identity(cone)
    base = 1j * e

    def probe(zv):
        return delta_power(cone, (zv - np.conj(base)) / 1j, -gamma)

    def raw_projection(z0):
        expo = -(nu + nr)

        def integrand(wv):
            zeta = (z0 - np.conj(wv)) / 1j
            weight = cone_mod.generalized_power(
                cone, wv.imag, np.full(cone.r, nu - nr))
            return delta_power(cone, zeta, expo) * probe(wv) * weight

        spec = quad.IntegralSpec(cone=cone, rel_tol=rel_tol, node_budget=node_budget,
                                 weight_exponent=nu - nr, anchor_y=e,
                                 base_center=np.zeros(cone.n))
        return quad.integrate_tube(cone, integrand, spec)

    z0 = 1j * e
    result = raw_projection(z0)
    raw = result.value
    if abs(raw) == 0.0:
        raise CalibrationError("projection integral vanished at the calibration point")
    c = float((probe(z0) / raw).real)

    # fresh interior points, deterministic
    rng = np.random.default_rng(20240521)
    worst = 0.0
    for _ in range(check_points):
        zt = random_tube_point(cone, rng, scale=1.0)
        val = raw_projection(zt).value * c
        ref = probe(zt)
        worst = max(worst, float(abs(val - ref) / abs(ref)))
    if worst > check_tol:
        raise CalibrationError(
            f"reproducing residual {worst:.3e} exceeds {check_tol:.1e} after calibration")
    return CalibratedConstant(nu=nu, value=c, calibration_error=worst)


# ---------------------------------------------------------------------------
# Generalized wave operator
# ---------------------------------------------------------------------------

_STENCILS = {
    0: ((0, 1.0),),
    1: ((-1, -0.5), (1, 0.5)),
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    3: ((-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)),
    4: ((-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)),
}


def _apply_symbol(cone: ConeDescriptor, f, x: np.ndarray, h: float) -> complex:
    """One finite-difference evaluation of Det((1/i) d/dx) f at x with step h."""
    total = 0.0 + 0.0j
    for coeff, exps in cone_mod.determinant_polynomial(cone):
        order = sum(exps)
        axes = [a for a, k in enumerate(exps) if k > 0]
        stencils = [_STENCILS[exps[a]] for a in axes]
        points, weights = [], []
        for combo in iter_product(*stencils):
            shift = np.zeros(cone.n)
            wgt = 1.0
            for a, (off, wa) in zip(axes, combo):
                shift[a] = off * h
                wgt *= wa
            points.append(x + shift)
            weights.append(wgt)
        vals = np.asarray(f(np.asarray(points)), dtype=complex)
        deriv = np.dot(np.asarray(weights), vals) / h ** order
        total += coeff * (1.0 / 1j) ** order * deriv
    return total


def wave_apply(cone: ConeDescriptor, f, x, step: float = 1e-2) -> complex:
    """Generalized wave operator by central differences with Richardson extrapolation.

    ``f`` must accept a batch of real points (k, n) and return (k,) values.
    Diagonalizes exponentials: on f = exp(i (x|zeta)) the result is
    Det(zeta) * f(x).
    """
    x = np.asarray(x, dtype=float)
    coarse = _apply_symbol(cone, f, x, step)
    fine = _apply_symbol(cone, f, x, step / 2.0)
    return (4.0 * fine - coarse) / 3.0
