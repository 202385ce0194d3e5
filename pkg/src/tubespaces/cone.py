"""Euclidean Jordan algebra primitives for symmetric cones.

Supported kinds: the positive half-line, Lorentz (light) cones in dimension
n >= 3, real symmetric positive definite r x r matrices, and finite products
of these.  Elements are flat coordinate arrays of length ``n``; functions
accept any batch shape ``(..., n)`` and return matching batch shapes.

SPD elements use an orthonormal coordinate system for the Hilbert-Schmidt
inner product: diagonal entries first by row-major upper triangle, with
off-diagonal entries scaled by sqrt(2).  Under this map the Euclidean dot
product of coordinate vectors equals tr(AB) for the symmetric matrices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations

import numpy as np

from .errors import DomainError

HALF_LINE = "half_line"
LORENTZ = "lorentz"
SPD = "spd"
PRODUCT = "product"

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ConeDescriptor:
    """A symmetric cone kind together with its ambient dimension and rank."""

    kind: str
    n: int
    r: int
    spd_size: int = 0
    components: tuple["ConeDescriptor", ...] = field(default=())

    def __post_init__(self):
        if self.kind == HALF_LINE:
            assert self.n == 1 and self.r == 1
        elif self.kind == LORENTZ:
            if self.n < 3:
                raise ValueError("Lorentz cone requires n >= 3")
            assert self.r == 2
        elif self.kind == SPD:
            if self.spd_size < 1:
                raise ValueError("SPD cone requires matrix size >= 1")
            assert self.n == self.spd_size * (self.spd_size + 1) // 2
            assert self.r == self.spd_size
        elif self.kind == PRODUCT:
            if len(self.components) < 2:
                raise ValueError("product cone needs at least two components")
            assert self.n == sum(c.n for c in self.components)
            assert self.r == sum(c.r for c in self.components)
        else:
            raise ValueError(f"unknown cone kind {self.kind!r}")
        if self.n < self.r:
            raise ValueError("dimension must be at least the rank")

    @property
    def peirce_d(self) -> float:
        """Common dimension of the off-diagonal Peirce spaces (0 for rank 1)."""
        if self.r < 2:
            return 0.0
        return 2.0 * (self.n / self.r - 1.0) / (self.r - 1.0)

    def component_slices(self):
        out, off = [], 0
        for c in self.components:
            out.append((c, slice(off, off + c.n)))
            off += c.n
        return out

    def describe(self) -> str:
        if self.kind == PRODUCT:
            inner = " x ".join(c.describe() for c in self.components)
            return f"product({inner})"
        if self.kind == LORENTZ:
            return f"lorentz({self.n})"
        if self.kind == SPD:
            return f"spd({self.spd_size})"
        return "half_line"


def half_line() -> ConeDescriptor:
    return ConeDescriptor(HALF_LINE, 1, 1)


def lorentz(n: int) -> ConeDescriptor:
    return ConeDescriptor(LORENTZ, n, 2)


def spd(size: int) -> ConeDescriptor:
    return ConeDescriptor(SPD, size * (size + 1) // 2, size, spd_size=size)


def product(*components: ConeDescriptor) -> ConeDescriptor:
    return ConeDescriptor(
        PRODUCT,
        sum(c.n for c in components),
        sum(c.r for c in components),
        components=tuple(components),
    )


def from_name(name: str) -> ConeDescriptor:
    """Parse cone names used by configs: half_line, lorentz3, lorentz(4), spd2."""
    name = name.strip().lower().replace("(", "").replace(")", "")
    if name in ("half_line", "halfline", "half-line"):
        return half_line()
    if name.startswith("lorentz"):
        return lorentz(int(name[len("lorentz"):]))
    if name.startswith("spd"):
        return spd(int(name[len("spd"):]))
    raise ValueError(f"unknown cone name {name!r}")


# ---------------------------------------------------------------------------
# SPD coordinate map
# ---------------------------------------------------------------------------

def _spd_index_pairs(size: int):
    return [(i, j) for i in range(size) for j in range(i, size)]


def spd_coords_to_matrix(size: int, v: np.ndarray) -> np.ndarray:
    """Coordinates (..., n) -> symmetric matrices (..., size, size)."""
    v = np.asarray(v)
    mat = np.zeros(v.shape[:-1] + (size, size), dtype=v.dtype)
    for idx, (i, j) in enumerate(_spd_index_pairs(size)):
        if i == j:
            mat[..., i, i] = v[..., idx]
        else:
            mat[..., i, j] = v[..., idx] / _SQRT2
            mat[..., j, i] = v[..., idx] / _SQRT2
    return mat


def spd_matrix_to_coords(mat: np.ndarray) -> np.ndarray:
    mat = np.asarray(mat)
    size = mat.shape[-1]
    out = np.zeros(mat.shape[:-2] + (size * (size + 1) // 2,), dtype=mat.dtype)
    for idx, (i, j) in enumerate(_spd_index_pairs(size)):
        out[..., idx] = mat[..., i, i] if i == j else _SQRT2 * mat[..., i, j]
    return out


# ---------------------------------------------------------------------------
# Algebra operations
# ---------------------------------------------------------------------------

def identity(cone: ConeDescriptor) -> np.ndarray:
    """Unit element e of the algebra: determinant(e) = 1, contains(e) = True."""
    if cone.kind == HALF_LINE:
        return np.array([1.0])
    if cone.kind == LORENTZ:
        e = np.zeros(cone.n)
        e[0] = 1.0
        return e
    if cone.kind == SPD:
        return spd_matrix_to_coords(np.eye(cone.spd_size))
    return np.concatenate([identity(c) for c in cone.components])


def jordan_product(cone: ConeDescriptor, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if cone.kind == HALF_LINE:
        return a * b
    if cone.kind == LORENTZ:
        # spin factor: (s,u) o (t,w) = (st + <u,w>, sw + tu)
        s, u = a[..., :1], a[..., 1:]
        t, w = b[..., :1], b[..., 1:]
        head = s * t + np.sum(u * w, axis=-1, keepdims=True)
        tail = s * w + t * u
        return np.concatenate([head, tail], axis=-1)
    if cone.kind == SPD:
        A = spd_coords_to_matrix(cone.spd_size, a)
        B = spd_coords_to_matrix(cone.spd_size, b)
        return spd_matrix_to_coords(0.5 * (A @ B + B @ A))
    parts = []
    for comp, sl in cone.component_slices():
        parts.append(jordan_product(comp, a[..., sl], b[..., sl]))
    return np.concatenate(parts, axis=-1)


def quadratic_representation(cone: ConeDescriptor, a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """P(a)x = 2 a o (a o x) - (a o a) o x.  Internal helper for the cone metric."""
    ax = jordan_product(cone, a, x)
    return 2.0 * jordan_product(cone, a, ax) - jordan_product(cone, jordan_product(cone, a, a), x)


def determinant(cone: ConeDescriptor, v: np.ndarray) -> np.ndarray:
    """Jordan determinant; homogeneous of degree rank(cone)."""
    v = np.asarray(v, dtype=float)
    if cone.kind == HALF_LINE:
        return v[..., 0]
    if cone.kind == LORENTZ:
        return v[..., 0] ** 2 - np.sum(v[..., 1:] ** 2, axis=-1)
    if cone.kind == SPD:
        return np.linalg.det(spd_coords_to_matrix(cone.spd_size, v))
    out = None
    for comp, sl in cone.component_slices():
        d = determinant(comp, v[..., sl])
        out = d if out is None else out * d
    return out


def principal_minor(cone: ConeDescriptor, v: np.ndarray, k: int) -> np.ndarray:
    """Determinant of the projection onto the subalgebra of the first k frame elements."""
    if not 1 <= k <= cone.r:
        raise IndexError(f"minor index {k} outside 1..{cone.r}")
    v = np.asarray(v, dtype=float)
    if cone.kind == HALF_LINE:
        return v[..., 0]
    if cone.kind == LORENTZ:
        # fixed frame c1 = (1,1,0,...)/2, c2 = (1,-1,0,...)/2
        if k == 1:
            return v[..., 0] + v[..., 1]
        return determinant(cone, v)
    if cone.kind == SPD:
        mat = spd_coords_to_matrix(cone.spd_size, v)
        return np.linalg.det(mat[..., :k, :k])
    out = None
    remaining = k
    for comp, sl in cone.component_slices():
        if remaining <= 0:
            break
        took = min(remaining, comp.r)
        d = principal_minor(comp, v[..., sl], took)
        out = d if out is None else out * d
        remaining -= took
    return out


def contains(cone: ConeDescriptor, v: np.ndarray) -> np.ndarray:
    """Membership in the open cone: all principal minors strictly positive."""
    v = np.asarray(v, dtype=float)
    out = None
    for k in range(1, cone.r + 1):
        ok = principal_minor(cone, v, k) > 0.0
        out = ok if out is None else out & ok
    return out


def generalized_power(cone: ConeDescriptor, v: np.ndarray, s) -> np.ndarray:
    """Vector-exponent power prod_j minor_j^(s_j - s_{j+1}) with s_{r+1} = 0.

    Requires v inside the open cone so every minor is positive.
    """
    s = np.asarray(s, dtype=float)
    if s.shape != (cone.r,):
        raise ValueError(f"exponent vector must have length {cone.r}")
    v = np.asarray(v, dtype=float)
    if not np.all(contains(cone, v)):
        raise DomainError("generalized power requires a point inside the open cone")
    out = np.ones(v.shape[:-1])
    for j in range(1, cone.r + 1):
        expo = s[j - 1] - (s[j] if j < cone.r else 0.0)
        if expo != 0.0:
            out = out * principal_minor(cone, v, j) ** expo
    return out


def fixed_frame(cone: ConeDescriptor) -> np.ndarray:
    """The frozen Jordan frame (r, n) used by the principal minors."""
    if cone.kind == HALF_LINE:
        return np.array([[1.0]])
    if cone.kind == LORENTZ:
        c1 = np.zeros(cone.n)
        c2 = np.zeros(cone.n)
        c1[0] = c1[1] = 0.5
        c2[0], c2[1] = 0.5, -0.5
        return np.stack([c1, c2])
    if cone.kind == SPD:
        rows = []
        for i in range(cone.spd_size):
            m = np.zeros((cone.spd_size, cone.spd_size))
            m[i, i] = 1.0
            rows.append(spd_matrix_to_coords(m))
        return np.stack(rows)
    frame = np.zeros((cone.r, cone.n))
    row = 0
    for comp, sl in cone.component_slices():
        sub = fixed_frame(comp)
        frame[row:row + comp.r, sl] = sub
        row += comp.r
    return frame


def spectral_decompose(cone: ConeDescriptor, v: np.ndarray):
    """Spectral decomposition v = sum_i lambda_i c_i.

    Returns (eigenvalues, frame) with eigenvalues (..., r) sorted descending and
    frame (..., r, n) of primitive idempotents.  For repeated eigenvalues any
    valid frame is returned (deterministically for a given input).
    """
    v = np.asarray(v, dtype=float)
    if cone.kind == HALF_LINE:
        return v.copy(), np.ones(v.shape[:-1] + (1, 1))
    if cone.kind == LORENTZ:
        s = v[..., 0]
        u = v[..., 1:]
        rho = np.linalg.norm(u, axis=-1)
        omega = np.zeros_like(u)
        safe = rho > 0
        omega[safe] = u[safe] / rho[safe][..., None]
        # direction is arbitrary at rho = 0; pin the first spatial axis
        omega[~safe, 0] = 1.0
        lam = np.stack([s + rho, s - rho], axis=-1)
        head = np.full(v.shape[:-1] + (1,), 0.5)
        c1 = np.concatenate([head, 0.5 * omega], axis=-1)
        c2 = np.concatenate([head, -0.5 * omega], axis=-1)
        return lam, np.stack([c1, c2], axis=-2)
    if cone.kind == SPD:
        mat = spd_coords_to_matrix(cone.spd_size, v)
        lam, q = np.linalg.eigh(mat)
        lam = lam[..., ::-1]
        q = q[..., ::-1]
        frames = np.einsum("...ik,...jk->...kij", q, q)
        coords = np.stack(
            [spd_matrix_to_coords(frames[..., k, :, :]) for k in range(cone.spd_size)],
            axis=-2,
        )
        return lam, coords
    lams, frames = [], []
    for comp, sl in cone.component_slices():
        lam_c, frame_c = spectral_decompose(comp, v[..., sl])
        emb = np.zeros(v.shape[:-1] + (comp.r, cone.n))
        emb[..., :, sl] = frame_c
        lams.append(lam_c)
        frames.append(emb)
    lam = np.concatenate(lams, axis=-1)
    frame = np.concatenate(frames, axis=-2)
    order = np.argsort(-lam, axis=-1, kind="stable")
    lam = np.take_along_axis(lam, order, axis=-1)
    frame = np.take_along_axis(frame, order[..., None], axis=-2)
    return lam, frame


def power_element(cone: ConeDescriptor, v: np.ndarray, t: float) -> np.ndarray:
    """Element power sum_i lambda_i^t c_i; needs a cone point for fractional t."""
    lam, frame = spectral_decompose(cone, v)
    if np.any(lam <= 0.0) and t != round(t):
        raise DomainError("fractional element power requires positive spectrum")
    return np.einsum("...r,...rn->...n", lam ** t, frame)


def inverse_element(cone: ConeDescriptor, v: np.ndarray) -> np.ndarray:
    lam, frame = spectral_decompose(cone, v)
    if np.any(lam == 0.0):
        raise DomainError("element is not invertible")
    return np.einsum("...r,...rn->...n", 1.0 / lam, frame)


def random_cone_point(cone: ConeDescriptor, rng: np.random.Generator, scale: float = 1.0,
                      size=None) -> np.ndarray:
    """Draw interior cone points with spectral values roughly of order ``scale``."""
    shape = () if size is None else (int(size),)
    if cone.kind == HALF_LINE:
        return scale * rng.lognormal(0.0, 0.6, size=shape + (1,))
    if cone.kind == LORENTZ:
        t = scale * rng.lognormal(0.0, 0.6, size=shape)
        u = rng.uniform(0.0, 1.2, size=shape)
        direction = rng.normal(size=shape + (cone.n - 1,))
        direction /= np.linalg.norm(direction, axis=-1, keepdims=True)
        head = (t * np.cosh(u))[..., None]
        tail = (t * np.sinh(u))[..., None] * direction
        return np.concatenate([head, tail], axis=-1)
    if cone.kind == SPD:
        k = cone.spd_size
        a = rng.normal(size=shape + (k, k))
        mat = a @ np.swapaxes(a, -1, -2) / k + 0.15 * np.eye(k)
        return scale * spd_matrix_to_coords(mat)
    parts = [random_cone_point(c, rng, scale, size) for c in cone.components]
    return np.concatenate(parts, axis=-1)


# ---------------------------------------------------------------------------
# Determinant as an explicit polynomial (drives the wave operator)
# ---------------------------------------------------------------------------

def determinant_polynomial(cone: ConeDescriptor):
    """Expand the determinant as [(coefficient, per-coordinate exponents)] monomials."""
    if cone.kind == HALF_LINE:
        return [(1.0, (1,))]
    if cone.kind == LORENTZ:
        terms = []
        for j in range(cone.n):
            e = [0] * cone.n
            e[j] = 2
            terms.append((1.0 if j == 0 else -1.0, tuple(e)))
        return terms
    if cone.kind == SPD:
        size = cone.spd_size
        pair_index = {p: i for i, p in enumerate(_spd_index_pairs(size))}
        acc: dict[tuple, float] = {}
        for perm in permutations(range(size)):
            sign = _permutation_sign(perm)
            coeff = float(sign)
            exps = [0] * cone.n
            for i in range(size):
                j = perm[i]
                a, b = min(i, j), max(i, j)
                exps[pair_index[(a, b)]] += 1
                if i != j:
                    coeff /= _SQRT2
            key = tuple(exps)
            acc[key] = acc.get(key, 0.0) + coeff
        return [(c, e) for e, c in acc.items() if abs(c) > 1e-15]
    terms = [(1.0, ())]
    for comp, _ in cone.component_slices():
        sub = determinant_polynomial(comp)
        terms = [(c1 * c2, e1 + e2) for c1, e1 in terms for c2, e2 in sub]
    return terms


def _permutation_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for i in range(len(perm)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign
