"""Fractional kernel evaluation and element-pair quadrature.

The kernel is k(x, y) = c_{d,s} |x-y|^{-d-2s}.  This module provides the
normalization constant, pointwise kernel evaluation, tail integrals over box
complements, smooth cross integrals between separated elements, and the
energy pair integrals

    I = int_A int_B (phi_a(x) - phi_a(y)) (phi_b(x) - phi_b(y)) |x-y|^{-d-2s} dy dx

for identical or touching elements with P1 shapes.  P1 difference factors are
exactly linear and the kernel is homogeneous, so the radial direction of each
singular integral has a closed form; what remains are smooth low-dimensional
integrals evaluated by fixed Gauss rules (relative-coordinate substitution in
1D; cone parameterizations per adjacency class in 2D).  Orders are fixed here
and validated against brute-force oracles in the test suite, not adapted at
runtime.

All functions are pure and reentrant.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import beta as beta_fn, betainc, gamma, roots_jacobi

from .errors import ContractError


def normalization_constant(d: int, s: float) -> float:
    """Constant making the singular integral match the Fourier symbol |xi|^{2s}."""
    return 4.0 ** s * s * gamma(d / 2.0 + s) / (np.pi ** (d / 2.0) * gamma(1.0 - s))


@dataclass(frozen=True)
class FracOrder:
    """Fractional order s in (0,1) together with the spatial dimension."""

    s: float
    d: int

    def __post_init__(self):
        if not 0.0 < self.s < 1.0:
            raise ContractError(f"fractional order s must lie in (0,1), got {self.s}")
        if self.d not in (1, 2):
            raise ContractError(f"dimension must be 1 or 2, got {self.d}")

    @property
    def c_ds(self) -> float:
        return normalization_constant(self.d, self.s)


def kernel_eval(fo: FracOrder, x, y) -> float:
    """Evaluate c_{d,s} |x-y|^{-d-2s}; x == y is outside the domain."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    r2 = float(np.sum((x - y) ** 2))
    if r2 == 0.0:
        raise ContractError("kernel_eval is singular at x == y")
    return fo.c_ds * r2 ** (-(fo.d + 2.0 * fo.s) / 2.0)


# ---------------------------------------------------------------------------
# Quadrature rules
# ---------------------------------------------------------------------------

@lru_cache(maxsize=64)
def gauss_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on [0, 1]."""
    x, w = leggauss(n)
    return 0.5 * (x + 1.0), 0.5 * w


@lru_cache(maxsize=64)
def triangle_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Tensor rule on the reference triangle {u, v >= 0, u + v <= 1}.

    Collapsed-square map (u, v) = (a, b(1-a)); weights absorb the Jacobian,
    sum(w) = 1/2.
    """
    a, wa = gauss_rule(n)
    A, B = np.meshgrid(a, a, indexing="ij")
    W = np.outer(wa, wa) * (1.0 - A)
    return np.column_stack([A.ravel(), (B * (1.0 - A)).ravel()]), W.ravel()


@lru_cache(maxsize=64)
def jacobi_rule01(n: int, beta_exp: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for int_0^1 t^beta_exp f(t) dt with smooth f."""
    x, w = roots_jacobi(n, 0.0, beta_exp)
    return 0.5 * (x + 1.0), w * 2.0 ** (-beta_exp - 1.0)


# ---------------------------------------------------------------------------
# Tail integrals over box complements
# ---------------------------------------------------------------------------

def _halfplane_coef(s: float) -> float:
    # int_{u > delta} int_R (u^2+v^2)^{-1-s} dv du = coef * delta^{-2s}
    return np.sqrt(np.pi) * gamma(s + 0.5) / (gamma(s + 1.0) * 2.0 * s)


def _cos_pow_tail(s: float, theta0: np.ndarray) -> np.ndarray:
    # int_{theta0}^{pi/2} cos^{2s} t dt, via the regularized incomplete beta
    st2 = np.sin(theta0) ** 2
    return 0.5 * beta_fn(0.5, s + 0.5) * (1.0 - betainc(0.5, s + 0.5, st2))


def _quadrant_integral(s: float, d1: np.ndarray, d2: np.ndarray, n: int = 48) -> np.ndarray:
    """int_{u > d1} int_{v > d2} (u^2 + v^2)^{-1-s} du dv, vectorized."""
    lo = np.minimum(d1, d2)
    hi = np.maximum(d1, d2)
    t, w = jacobi_rule01(n, 2.0 * s - 1.0)
    theta0 = np.arctan(lo[..., None] * t / hi[..., None])
    return hi ** (-2.0 * s) * (_cos_pow_tail(s, theta0) * w).sum(axis=-1)


def tail_box_complement(fo: FracOrder, points, box) -> np.ndarray:
    """int_{R^d \\ box} |x-y|^{-d-2s} dy at points strictly inside the box.

    `box` is (lo, hi) in 1D and ((lo1, hi1), (lo2, hi2)) in 2D.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if fo.d == 1:
        a, b = (box if np.ndim(box[0]) == 0 else box[0])
        x = pts[:, 0]
        if np.any(x <= a) or np.any(x >= b):
            raise ContractError("tail integral needs points strictly inside the box")
        return ((x - a) ** (-2 * fo.s) + (b - x) ** (-2 * fo.s)) / (2 * fo.s)
    (a1, b1), (a2, b2) = box
    dl, dr = pts[:, 0] - a1, b1 - pts[:, 0]
    db, dt = pts[:, 1] - a2, b2 - pts[:, 1]
    if min(dl.min(), dr.min(), db.min(), dt.min()) <= 0.0:
        raise ContractError("tail integral needs points strictly inside the box")
    s = fo.s
    total = _halfplane_coef(s) * (dl ** (-2 * s) + dr ** (-2 * s)
                                  + db ** (-2 * s) + dt ** (-2 * s))
    for du in (dl, dr):
        for dv in (db, dt):
            total -= _quadrant_integral(s, du, dv)
    return total


def tail_weight(fo: FracOrder, x, R: float):
    """int_{R^d \\ Omega_R} |x-y|^{-d-2s} dy for x strictly inside Omega_R."""
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0 or (arr.ndim == 1 and arr.shape[0] == fo.d)
    pts = arr.reshape(-1, fo.d) if arr.ndim else arr.reshape(1, 1)
    box = (-R, R) if fo.d == 1 else ((-R, R), (-R, R))
    out = tail_box_complement(fo, pts, box)
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Elements, shapes, adjacency
# ---------------------------------------------------------------------------

def _as_element(elem, d: int) -> np.ndarray:
    arr = np.asarray(elem, dtype=float)
    if d == 1:
        arr = arr.reshape(2)
        if arr[0] >= arr[1]:
            raise ContractError("1D element must be (left, right) with left < right")
        return arr
    return arr.reshape(3, 2)


def shared_vertices(elem_a, elem_b, d: int, tol: float) -> list[tuple[int, int]]:
    """Pairs (i, j) of coinciding vertex indices of the two elements."""
    A = _as_element(elem_a, d).reshape(d + 1, -1)
    B = _as_element(elem_b, d).reshape(d + 1, -1)
    out = []
    for i in range(d + 1):
        for j in range(d + 1):
            if np.linalg.norm(A[i] - B[j]) <= tol:
                out.append((i, j))
    return out


def element_distance(elem_a, elem_b, d: int) -> float:
    """Distance between element closures (0 when they touch or overlap)."""
    if d == 1:
        a = _as_element(elem_a, 1)
        b = _as_element(elem_b, 1)
        return max(a[0] - b[1], b[0] - a[1], 0.0)
    A = _as_element(elem_a, 2)
    B = _as_element(elem_b, 2)

    def contains(tri, p):
        v0, v1, v2 = tri
        den = (v1[1] - v2[1]) * (v0[0] - v2[0]) + (v2[0] - v1[0]) * (v0[1] - v2[1])
        l1 = ((v1[1] - v2[1]) * (p[0] - v2[0]) + (v2[0] - v1[0]) * (p[1] - v2[1])) / den
        l2 = ((v2[1] - v0[1]) * (p[0] - v2[0]) + (v0[0] - v2[0]) * (p[1] - v2[1])) / den
        return min(l1, l2, 1.0 - l1 - l2) >= -1e-14

    if any(contains(A, p) for p in B) or any(contains(B, p) for p in A):
        return 0.0

    def seg_dist(p1, p2, q1, q2):
        def pt_seg(p, a, b):
            ab = b - a
            t = np.clip(np.dot(p - a, ab) / max(np.dot(ab, ab), 1e-300), 0.0, 1.0)
            return float(np.linalg.norm(p - (a + t * ab)))

        def orient(a, b, c):
            return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

        if ((orient(p1, p2, q1) > 0) != (orient(p1, p2, q2) > 0)) and \
           ((orient(q1, q2, p1) > 0) != (orient(q1, q2, p2) > 0)):
            return 0.0
        return min(pt_seg(q1, p1, p2), pt_seg(q2, p1, p2),
                   pt_seg(p1, q1, q2), pt_seg(p2, q1, q2))

    return min(seg_dist(A[i], A[(i + 1) % 3], B[j], B[(j + 1) % 3])
               for i in range(3) for j in range(3))


def _combined_shape(shape, shared: list[tuple[int, int]], own_is_a: bool,
                    d: int) -> tuple[np.ndarray, np.ndarray]:
    """Normalize a shape argument to nodal values on (elem_a, elem_b).

    Accepted forms: a local vertex index (the global P1 hat at that vertex of
    the shape's own element), a (d+1,) value array on the own element, or a
    (2, d+1) array giving (values on the own element, values on the other
    element) explicitly.  Values specified on one element only are propagated
    to coinciding vertices of the other element and set to zero elsewhere,
    which restricts the corresponding continuous piecewise-linear function.
    """
    nv = d + 1
    if np.isscalar(shape):
        own = np.zeros(nv)
        idx = int(shape)
        if not 0 <= idx < nv:
            raise ContractError(f"local basis index {idx} out of range")
        own[idx] = 1.0
    else:
        arr = np.asarray(shape, dtype=float)
        if arr.shape == (2, nv):
            return (arr[0].copy(), arr[1].copy()) if own_is_a else (arr[1].copy(), arr[0].copy())
        if arr.shape != (nv,):
            raise ContractError(f"shape must be an index, {nv} values, or a (2,{nv}) pair")
        own = arr.copy()
    other = np.zeros(nv)
    for i, j in shared:  # i indexes elem_a vertices, j indexes elem_b vertices
        if own_is_a:
            other[j] = own[i]
        else:
            other[i] = own[j]
    return (own, other) if own_is_a else (other, own)


def _check_shape_continuity(vals_a, vals_b, shared, scale) -> None:
    for i, j in shared:
        if abs(vals_a[i] - vals_b[j]) > 1e-10 * max(1.0, scale):
            raise ContractError(
                "shape values must agree at shared vertices (the pair integral "
                "diverges for discontinuous shapes)")


# ---------------------------------------------------------------------------
# Smooth pair integrals (separated supports)
# ---------------------------------------------------------------------------

def cross_integral(fo: FracOrder, elem_a, shape_a, elem_b, shape_b,
                   order: int = 16) -> float:
    """int_A int_B phi_a(x) phi_b(y) |x-y|^{-d-2s} dx dy, disjoint closures."""
    d = fo.d
    if element_distance(elem_a, elem_b, d) <= 0.0:
        raise ContractError("cross_integral requires disjoint closures; "
                            "touching elements belong to singular_pair")
    if d == 1:
        A = _as_element(elem_a, 1)
        B = _as_element(elem_b, 1)
        va = _local_values(shape_a, 2)
        vb = _local_values(shape_b, 2)
        t, w = gauss_rule(order)
        xa = A[0] + (A[1] - A[0]) * t
        xb = B[0] + (B[1] - B[0]) * t
        fa = va[0] + (va[1] - va[0]) * t
        fb = vb[0] + (vb[1] - vb[0]) * t
        ker = np.abs(xa[:, None] - xb[None, :]) ** (-1.0 - 2.0 * fo.s)
        return float((w * fa) @ ker @ (w * fb) * (A[1] - A[0]) * (B[1] - B[0]))
    A = _as_element(elem_a, 2)
    B = _as_element(elem_b, 2)
    va = _local_values(shape_a, 3)
    vb = _local_values(shape_b, 3)
    uv, w = triangle_rule(min(order, 12))
    pa = A[0] + uv[:, :1] * (A[1] - A[0]) + uv[:, 1:] * (A[2] - A[0])
    pb = B[0] + uv[:, :1] * (B[1] - B[0]) + uv[:, 1:] * (B[2] - B[0])
    fa = va[0] * (1 - uv.sum(axis=1)) + va[1] * uv[:, 0] + va[2] * uv[:, 1]
    fb = vb[0] * (1 - uv.sum(axis=1)) + vb[1] * uv[:, 0] + vb[2] * uv[:, 1]
    two_a = abs(float(np.cross(A[1] - A[0], A[2] - A[0])))
    two_b = abs(float(np.cross(B[1] - B[0], B[2] - B[0])))
    diff = pa[:, None, :] - pb[None, :, :]
    ker = np.sum(diff * diff, axis=-1) ** (-(2.0 + 2.0 * fo.s) / 2.0)
    return float((w * fa) @ ker @ (w * fb) * two_a * two_b)


def _local_values(shape, nv: int) -> np.ndarray:
    if np.isscalar(shape):
        vals = np.zeros(nv)
        idx = int(shape)
        if not 0 <= idx < nv:
            raise ContractError(f"local basis index {idx} out of range")
        vals[idx] = 1.0
        return vals
    vals = np.asarray(shape, dtype=float)
    if vals.shape != (nv,):
        raise ContractError(f"shape must have {nv} nodal values")
    return vals


def pair_energy_smooth(fo: FracOrder, elem_a, vals_a, elem_b, vals_b,
                       order: int = 12) -> float:
    """Energy pair integral for elements with disjoint interiors, by Gauss.

    vals_* are (values_on_elem_a, values_on_elem_b) pairs.  Used internally
    for the non-touching pairs of near-field sums; singular pairs must go
    through `singular_pair`.
    """
    d = fo.d
    (vaA, vaB), (vbA, vbB) = vals_a, vals_b
    if d == 1:
        A = _as_element(elem_a, 1)
        B = _as_element(elem_b, 1)
        t, w = gauss_rule(order)
        xa = A[0] + (A[1] - A[0]) * t
        xb = B[0] + (B[1] - B[0]) * t
        faA = vaA[0] + (vaA[1] - vaA[0]) * t
        fbA = vbA[0] + (vbA[1] - vbA[0]) * t
        faB = vaB[0] + (vaB[1] - vaB[0]) * t
        fbB = vbB[0] + (vbB[1] - vbB[0]) * t
        ker = np.abs(xa[:, None] - xb[None, :]) ** (-1.0 - 2.0 * fo.s)
        jac = (A[1] - A[0]) * (B[1] - B[0])
    else:
        A = _as_element(elem_a, 2)
        B = _as_element(elem_b, 2)
        uv, w = triangle_rule(order)
        pa = A[0] + uv[:, :1] * (A[1] - A[0]) + uv[:, 1:] * (A[2] - A[0])
        pb = B[0] + uv[:, :1] * (B[1] - B[0]) + uv[:, 1:] * (B[2] - B[0])
        lam = np.column_stack([1 - uv.sum(axis=1), uv[:, 0], uv[:, 1]])
        faA, fbA = lam @ vaA, lam @ vbA
        faB, fbB = lam @ vaB, lam @ vbB
        diff = pa[:, None, :] - pb[None, :, :]
        ker = np.sum(diff * diff, axis=-1) ** (-(2.0 + 2.0 * fo.s) / 2.0)
        jac = (abs(float(np.cross(A[1] - A[0], A[2] - A[0])))
               * abs(float(np.cross(B[1] - B[0], B[2] - B[0]))))
    # (fa(x)-fa(y))(fb(x)-fb(y)) expanded into four tensor terms
    kw = ker * w[None, :]
    row = kw.sum(axis=1)          # int over y
    col = (ker * w[:, None]).sum(axis=0)  # int over x
    t1 = np.sum(w * faA * fbA * row)
    t2 = np.sum(w * faB * fbB * col)
    t3 = (w * faA) @ kw @ fbB
    t4 = (w * fbA) @ kw @ faB
    return float(jac * (t1 + t2 - t3 - t4))


# ---------------------------------------------------------------------------
# Singular pair integrals
# ---------------------------------------------------------------------------

@lru_cache(maxsize=256)
def _c1_moments(s: float) -> tuple[float, float, float]:
    """C1(p) = int_0^1 t^p (1+t)^{-1-2s} dt for p = 0, 1, 2."""
    t, w = gauss_rule(24)
    base = (1.0 + t) ** (-1.0 - 2.0 * s)
    return tuple(float(np.sum(w * t ** p * base)) for p in (0, 1, 2))


def _identical_segment(s: float, h: float, sa: float, sb: float) -> float:
    # difference factors are slope*(x-y); the double integral of |x-y|^{1-2s}
    # over the square has the closed form below
    return sa * sb * h ** (3.0 - 2.0 * s) / ((1.0 - s) * (3.0 - 2.0 * s))


def _adjacent_segments(s: float, h: float, slopes_a, slopes_b) -> float:
    saL, saR = slopes_a
    sbL, sbR = slopes_b
    c1 = _c1_moments(s)
    scale = h ** (3.0 - 2.0 * s) / (3.0 - 2.0 * s)

    def J(p, q):
        return scale * (c1[p] + c1[q])

    return saL * sbL * J(2, 0) + (saL * sbR + saR * sbL) * J(1, 1) + saR * sbR * J(0, 2)


def _singular_pair_1d(fo, elem_a, shape_a, elem_b, shape_b) -> float:
    A = _as_element(elem_a, 1)
    B = _as_element(elem_b, 1)
    h = A[1] - A[0]
    tol = 1e-9 * h
    if abs((B[1] - B[0]) - h) > tol:
        raise ContractError("singular_pair supports equal-length elements only")
    shared = shared_vertices(A, B, 1, tol)
    if not shared:
        raise ContractError("elements share no point; use cross_integral")
    vals_a = _combined_shape(shape_a, shared, True, 1)
    vals_b = _combined_shape(shape_b, shared, False, 1)
    scale = max(np.abs(np.concatenate([*vals_a, *vals_b])).max(), 1.0)
    _check_shape_continuity(vals_a[0], vals_a[1], shared, scale)
    _check_shape_continuity(vals_b[0], vals_b[1], shared, scale)
    if len(shared) == 2:  # identical elements
        sa = (vals_a[0][1] - vals_a[0][0]) / h
        sb = (vals_b[0][1] - vals_b[0][0]) / h
        return _identical_segment(fo.s, h, sa, sb)
    if abs(A[1] - B[0]) <= tol:
        left_a, right_a = vals_a[0], vals_a[1]
        left_b, right_b = vals_b[0], vals_b[1]
    else:
        left_a, right_a = vals_a[1], vals_a[0]
        left_b, right_b = vals_b[1], vals_b[0]
    slopes_a = ((left_a[1] - left_a[0]) / h, (right_a[1] - right_a[0]) / h)
    slopes_b = ((left_b[1] - left_b[0]) / h, (right_b[1] - right_b[0]) / h)
    return _adjacent_segments(fo.s, h, slopes_a, slopes_b)


def _identical_triangle(s: float, tri: np.ndarray, da, db) -> float:
    """Identical-pair energy integral via the angular covariogram formula.

    da, db are the barycentric difference coefficients (v1-v0, v2-v0) of the
    two shapes on the triangle.
    """
    e1 = tri[1] - tri[0]
    e2 = tri[2] - tri[0]
    two_area = abs(float(np.cross(e1, e2)))
    denom = (2.0 - 2.0 * s) * (3.0 - 2.0 * s) * (4.0 - 2.0 * s)
    t, w = gauss_rule(20)

    def angular(theta1, theta2, m, weights):
        z = np.outer(theta1, e1) + np.outer(theta2, e2)
        r2 = np.sum(z * z, axis=1)
        fa = da[0] * theta1 + da[1] * theta2
        fb = db[0] * theta1 + db[1] * theta2
        return np.sum(weights * fa * fb * r2 ** (-(2.0 + 2.0 * s) / 2.0)
                      * m ** (2.0 * s - 2.0))

    # branch (t, 1-t) has M = 1; branch (t, -(1-t)) has M = max(t, 1-t) with a
    # kink at 1/2; each counts twice because its antipode gives the same value
    total = 2.0 * angular(t, 1.0 - t, np.ones_like(t), w)
    for lo, hi in ((0.0, 0.5), (0.5, 1.0)):
        tt = lo + (hi - lo) * t
        total += 2.0 * angular(tt, -(1.0 - tt), np.maximum(tt, 1.0 - tt),
                               w * (hi - lo))
    return two_area ** 2 / denom * total


def _edge_pair_triangles(s: float, A, B, P, Q, coef_a, coef_b) -> float:
    """Energy integral for triangles (A,B,P) and (A,B,Q) sharing edge AB.

    coef_* = (cB, cP, cQ): difference coefficients of each shape, i.e. the
    shape value differences (val_B - val_A, val_P - val_A, val_Q - val_A).
    The difference factor is then w*cB + u2*cP - v2*cQ in cone coordinates.
    """
    e = B - A
    p = P - A
    q = Q - A
    four_areas = abs(float(np.cross(e, p))) * abs(float(np.cross(e, q)))
    denom = (3.0 - 2.0 * s) * (4.0 - 2.0 * s)
    t, w = gauss_rule(16)
    X, Y = np.meshgrid(t, t, indexing="ij")
    WW = np.outer(w, w)

    total = 0.0
    for sign in (1.0, -1.0):
        for piece in (0, 1):
            if sign > 0:  # kink of Lambda at v2 = 1/2
                v2 = 0.5 * (X if piece == 0 else 1.0 + X)
                u2 = Y * (1.0 - v2)
                jac = 0.5 * (1.0 - v2)
                lam = np.maximum(v2, 1.0 - v2)
            else:         # kink at u2 = 1/2
                u2 = 0.5 * (X if piece == 0 else 1.0 + X)
                v2 = Y * (1.0 - u2)
                jac = 0.5 * (1.0 - u2)
                lam = np.maximum(u2, 1.0 - u2)
            wdir = sign * (1.0 - u2 - v2)
            z1 = wdir * e[0] + u2 * p[0] - v2 * q[0]
            z2 = wdir * e[1] + u2 * p[1] - v2 * q[1]
            r2 = z1 * z1 + z2 * z2
            fa = wdir * coef_a[0] + u2 * coef_a[1] - v2 * coef_a[2]
            fb = wdir * coef_b[0] + u2 * coef_b[1] - v2 * coef_b[2]
            total += np.sum(WW * jac * fa * fb
                            * r2 ** (-(2.0 + 2.0 * s) / 2.0)
                            * lam ** (2.0 * s - 3.0))
    return four_areas / denom * total


def _vertex_pair_triangles(s: float, A, B, P, C, Q, coef_a, coef_b) -> float:
    """Energy integral for triangles (A,B,P) and (A,C,Q) sharing only A.

    coef_* = (cB, cP, cC, cQ): shape value differences relative to the value
    at A.  The difference factor is u1*cB + u2*cP - v1*cC - v2*cQ.
    """
    b = B - A
    p = P - A
    c = C - A
    q = Q - A
    four_areas = abs(float(np.cross(b, p))) * abs(float(np.cross(c, q)))
    t, w = gauss_rule(12)
    S, T, U = np.meshgrid(t, t, t, indexing="ij")
    WWW = w[:, None, None] * w[None, :, None] * w[None, None, :]

    total = 0.0
    for piece in (0, 1):
        sigma = 0.5 * (S if piece == 0 else 1.0 + S)
        lam = np.maximum(sigma, 1.0 - sigma)
        u1 = sigma * T
        u2 = sigma * (1.0 - T)
        v1 = (1.0 - sigma) * U
        v2 = (1.0 - sigma) * (1.0 - U)
        z1 = u1 * b[0] + u2 * p[0] - v1 * c[0] - v2 * q[0]
        z2 = u1 * b[1] + u2 * p[1] - v1 * c[1] - v2 * q[1]
        r2 = z1 * z1 + z2 * z2
        fa = u1 * coef_a[0] + u2 * coef_a[1] - v1 * coef_a[2] - v2 * coef_a[3]
        fb = u1 * coef_b[0] + u2 * coef_b[1] - v1 * coef_b[2] - v2 * coef_b[3]
        total += 0.5 * np.sum(WWW * fa * fb * r2 ** (-(2.0 + 2.0 * s) / 2.0)
                              * lam ** (2.0 * s - 4.0) * sigma * (1.0 - sigma))
    return four_areas / (4.0 - 2.0 * s) * total


def _singular_pair_2d(fo, elem_a, shape_a, elem_b, shape_b) -> float:
    A = _as_element(elem_a, 2)
    B = _as_element(elem_b, 2)
    tol = 1e-9 * max(np.abs(A - A[0]).max(), 1e-300)
    shared = shared_vertices(A, B, 2, tol)
    if not shared:
        raise ContractError("elements share no point; use cross_integral")
    va_pair = _combined_shape(shape_a, shared, True, 2)
    vb_pair = _combined_shape(shape_b, shared, False, 2)
    scale = max(max(np.abs(v).max() for v in (*va_pair, *vb_pair)), 1.0)
    _check_shape_continuity(va_pair[0], va_pair[1], shared, scale)
    _check_shape_continuity(vb_pair[0], vb_pair[1], shared, scale)

    if len(shared) == 3:  # identical triangles (possibly permuted vertex order)
        da = (va_pair[0][1] - va_pair[0][0], va_pair[0][2] - va_pair[0][0])
        db = (vb_pair[0][1] - vb_pair[0][0], vb_pair[0][2] - vb_pair[0][0])
        return _identical_triangle(fo.s, A, da, db)

    if len(shared) == 2:  # common edge
        (ia1, ib1), (ia2, ib2) = shared
        loc_p = 3 - ia1 - ia2
        loc_q = 3 - ib1 - ib2
        pA, pB = A[ia1], A[ia2]
        P, Q = A[loc_p], B[loc_q]
        coef = []
        for (vA, vB) in (va_pair, vb_pair):
            val_shared0 = vA[ia1]
            coef.append((vA[ia2] - val_shared0, vA[loc_p] - val_shared0,
                         vB[loc_q] - val_shared0))
        return _edge_pair_triangles(fo.s, pA, pB, P, Q, coef[0], coef[1])

    (ia, ib) = shared[0]  # common vertex
    locs_a = [i for i in range(3) if i != ia]
    locs_b = [j for j in range(3) if j != ib]
    Av = A[ia]
    Bv, Pv = A[locs_a[0]], A[locs_a[1]]
    Cv, Qv = B[locs_b[0]], B[locs_b[1]]
    coef = []
    for (vA, vB) in (va_pair, vb_pair):
        v0 = vA[ia]
        coef.append((vA[locs_a[0]] - v0, vA[locs_a[1]] - v0,
                     vB[locs_b[0]] - v0, vB[locs_b[1]] - v0))
    return _vertex_pair_triangles(fo.s, Av, Bv, Pv, Cv, Qv, coef[0], coef[1])


def singular_pair(fo: FracOrder, elem_a, shape_a, elem_b, shape_b) -> float:
    """Energy pair integral for identical or touching elements.

    Shapes follow `_combined_shape`: a local vertex index means the global P1
    hat at that vertex of the shape's own element; a (d+1,) array gives nodal
    values on the own element (extended continuously by matching vertices);
    a (2, d+1) array pins the values on both elements explicitly.
    """
    if fo.d == 1:
        return _singular_pair_1d(fo, elem_a, shape_a, elem_b, shape_b)
    return _singular_pair_2d(fo, elem_a, shape_a, elem_b, shape_b)
