"""Independent brute-force quadrature oracles used by the test suite.

These deliberately avoid the decompositions used in the package: 1D pair
integrals use exact monomial antiderivatives in the inner variable plus
adaptive outer quadrature; 2D pair integrals integrate the inner triangle in
polar coordinates around the outer point with exact radial antiderivatives
and Gauss quadrature along edges, plus a graded subdivision of the outer
triangle.
"""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad


# ---------------------------------------------------------------------------
# 1D
# ---------------------------------------------------------------------------

def _affine_coeffs(vals, elem):
    c1 = (vals[1] - vals[0]) / (elem[1] - elem[0])
    return vals[0] - c1 * elem[0], c1


def pair_energy_1d(s, elem_a, elem_b, vals_a, vals_b):
    """Oracle for int_A int_B (pa(x)-pa(y))(pb(x)-pb(y))|x-y|^{-1-2s} dy dx.

    vals_* = (values on elem_a, values on elem_b) of each global P1 function.
    """
    elem_a = np.asarray(elem_a, float)
    elem_b = np.asarray(elem_b, float)
    paA = _affine_coeffs(vals_a[0], elem_a)
    paB = _affine_coeffs(vals_a[1], elem_b)
    pbA = _affine_coeffs(vals_b[0], elem_a)
    pbB = _affine_coeffs(vals_b[1], elem_b)

    def outer(x):
        pax = paA[0] + paA[1] * x
        pbx = pbA[0] + pbA[1] * x
        d0a = pax - paB[0] - paB[1] * x
        d0b = pbx - pbB[0] - pbB[1] * x
        c0 = d0a * d0b
        c1 = -(d0a * pbB[1] + d0b * paB[1])
        c2 = paB[1] * pbB[1]

        def antider(u):
            t = abs(u)
            sg = np.sign(u)
            a0 = -sg * t ** (-2 * s) / (2 * s)
            a1 = np.log(t) if abs(1 - 2 * s) < 1e-12 else t ** (1 - 2 * s) / (1 - 2 * s)
            a2 = sg * t ** (2 - 2 * s) / (2 - 2 * s)
            return c0 * a0 + c1 * a1 + c2 * a2

        ua, ub = elem_b[0] - x, elem_b[1] - x
        if ua < 0 < ub:  # x inside elem_b: both finite-part halves (c0, c1 -> 0 there)
            return (antider(ub) - antider(1e-300)) + (antider(-1e-300) - antider(ua))
        return antider(ub) - antider(ua)

    val, _ = quad(outer, elem_a[0], elem_a[1], limit=500,
                  epsabs=1e-14, epsrel=1e-12)
    return val


# ---------------------------------------------------------------------------
# 2D: polar-ray inner integral, graded outer subdivision
# ---------------------------------------------------------------------------

def _tri_affine(vals, tri):
    """Coefficients (c, g) with p(y) = c + g . y on the triangle."""
    A = np.column_stack([np.ones(3), tri])
    sol = np.linalg.solve(A, np.asarray(vals, float))
    return sol[0], sol[1:]


def pair_energy_2d(s, tri_a, tri_b, vals_a, vals_b, outer_level=4, n_outer=6,
                   n_edge=48):
    """Oracle for the 2D energy pair integral (identical or touching pairs).

    vals_* = (values on tri_a, values on tri_b); the global function is the
    piecewise-linear function with those nodal values (continuous across any
    shared vertices/edges).
    """
    tri_a = np.asarray(tri_a, float)
    tri_b = np.asarray(tri_b, float)
    ca_a, ga_a = _tri_affine(vals_a[0], tri_a)
    ca_b, ga_b = _tri_affine(vals_a[1], tri_b)
    cb_a, gb_a = _tri_affine(vals_b[0], tri_a)
    cb_b, gb_b = _tri_affine(vals_b[1], tri_b)

    te, we = leggauss(n_edge)
    te = 0.5 * (te + 1.0)
    we = 0.5 * we

    def antider(r, c0, c1, c2):
        a0 = -r ** (-2 * s) / (2 * s)
        a1 = np.log(r) if abs(1 - 2 * s) < 1e-12 else r ** (1 - 2 * s) / (1 - 2 * s)
        a2 = r ** (2 - 2 * s) / (2 - 2 * s)
        return c0 * a0 + c1 * a1 + c2 * a2

    def inner(x):
        pax = ca_a + ga_a @ x    # value of pa at x (x lives in tri_a)
        pbx = cb_a + gb_a @ x
        total = 0.0
        for k in range(3):
            P = tri_b[k]
            Q = tri_b[(k + 1) % 3]
            E = P[None, :] + te[:, None] * (Q - P)[None, :]
            rel = E - x[None, :]
            r = np.hypot(rel[:, 0], rel[:, 1])
            th = rel / r[:, None]
            dtheta = (rel[:, 0] * (Q - P)[1] - rel[:, 1] * (Q - P)[0]) / (r * r)
            # pa(x) - pa(x + rho*th) = D0a - rho * (ga_b . th)
            D0a = pax - (ca_b + ga_b @ x)
            D0b = pbx - (cb_b + gb_b @ x)
            sa = th @ ga_b
            sb = th @ gb_b
            c0 = D0a * D0b
            c1 = -(D0a * sb + D0b * sa)
            c2 = sa * sb
            total += np.sum(we * dtheta * antider(r, c0, c1, c2))
        return total

    def inner_same(x):
        # x inside tri_b == tri_a: D0 = 0 exactly, radial integral from 0
        total = 0.0
        for k in range(3):
            P = tri_b[k]
            Q = tri_b[(k + 1) % 3]
            E = P[None, :] + te[:, None] * (Q - P)[None, :]
            rel = E - x[None, :]
            r = np.hypot(rel[:, 0], rel[:, 1])
            th = rel / r[:, None]
            dtheta = (rel[:, 0] * (Q - P)[1] - rel[:, 1] * (Q - P)[0]) / (r * r)
            sa = th @ ga_b
            sb = th @ gb_b
            total += np.sum(we * dtheta * sa * sb * r ** (2 - 2 * s) / (2 - 2 * s))
        return total

    same = np.allclose(sorted(map(tuple, tri_a)), sorted(map(tuple, tri_b)))
    g = inner_same if same else inner

    # graded outer subdivision toward the contact set, tensor rule per cell
    tq, wq = leggauss(n_outer)
    tq = 0.5 * (tq + 1.0)
    wq = 0.5 * wq
    U, V = np.meshgrid(tq, tq, indexing="ij")
    WQ = (np.outer(wq, wq) * (1.0 - U)).ravel()
    UV = np.column_stack([U.ravel(), (V * (1.0 - U)).ravel()])

    def tri_quad(tri):
        pts = tri[0] + UV[:, :1] * (tri[1] - tri[0]) + UV[:, 1:] * (tri[2] - tri[0])
        area2 = abs(np.cross(tri[1] - tri[0], tri[2] - tri[0]))
        return area2 * sum(w * g(p) for p, w in zip(pts, WQ))

    def subdivide(tri):
        m01 = 0.5 * (tri[0] + tri[1])
        m12 = 0.5 * (tri[1] + tri[2])
        m02 = 0.5 * (tri[0] + tri[2])
        return [np.array([tri[0], m01, m02]), np.array([m01, tri[1], m12]),
                np.array([m02, m12, tri[2]]), np.array([m01, m12, m02])]

    def near_contact(tri):
        if same:
            return True
        # distance of tri to tri_b zero-ish -> refine
        from fraccal.kernel import element_distance
        return element_distance(tri, tri_b, 2) < 1e-12

    total = 0.0
    stack = [(tri_a, 0)]
    while stack:
        tri, lvl = stack.pop()
        if lvl < outer_level and near_contact(tri):
            stack.extend((child, lvl + 1) for child in subdivide(tri))
        else:
            total += tri_quad(tri)
    return total
