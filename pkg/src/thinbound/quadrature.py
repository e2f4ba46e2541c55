"""Deterministic numerical integration over triangles, segments and subdomains.

Triangle rules are collapsed tensor-product Gauss rules on the reference
triangle (0,0)-(1,0)-(0,1); a rule of requested polynomial exactness d uses
ceil((d+2)/2) Gauss nodes per direction, which integrates every bivariate
monomial of total degree <= d exactly.  Segment rules are Gauss-Legendre.

Square-root line singularities at x1 = 0 are never integrated directly: the
substitution x1 = -t**2 turns them into smooth integrands.  Area integrands
with an r**(1/2)-type gradient singularity at the origin are handled by
geometric grading of the elements touching the origin.

All domain-level sums run over a fixed canonical element order and are
reduced pairwise, so results are bit-identical across runs and worker counts.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, InvalidParameterError
from .geometry import red_refine, triangle_area, triangulate

WORKERS_ENV = "THINBOUND_WORKERS"

GRADING_MAX_DEPTH = 40
GRADING_REL_TOL = 1e-12


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights on a reference element."""

    points: np.ndarray
    weights: np.ndarray
    polynomial_exactness: int


def segment_rule(n_nodes=16):
    """Gauss-Legendre rule on [-1, 1]; exact for degree 2*n - 1."""
    if n_nodes < 1:
        raise InvalidParameterError("segment rule needs at least one node")
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    return QuadratureRule(points=x, weights=w, polynomial_exactness=2 * n_nodes - 1)


def triangle_rule(degree=12):
    """Collapsed tensor Gauss rule on the unit reference triangle."""
    if degree < 0:
        raise InvalidParameterError("rule degree must be nonnegative")
    n = max(1, math.ceil((degree + 2) / 2))
    x, w = np.polynomial.legendre.leggauss(n)
    # map Gauss nodes to [0, 1]
    t = 0.5 * (x + 1.0)
    wt = 0.5 * w
    pts = []
    wts = []
    for i in range(n):
        for j in range(n):
            xi = t[i]
            eta = t[j] * (1.0 - xi)
            pts.append((xi, eta))
            wts.append(wt[i] * wt[j] * (1.0 - xi))
    return QuadratureRule(
        points=np.array(pts), weights=np.array(wts), polynomial_exactness=2 * n - 2
    )


def pairwise_sum(values):
    """Reduce a sequence by a fixed balanced tree, independent of chunking."""
    vals = list(values)
    if not vals:
        return 0.0
    while len(vals) > 1:
        nxt = []
        for i in range(0, len(vals) - 1, 2):
            nxt.append(vals[i] + vals[i + 1])
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return vals[0]


def integrate_triangle(f, tri, rule):
    """Integrate ``f(x1, x2)`` over one triangle with the mapped rule."""
    tri = np.asarray(tri, dtype=float)
    v0 = tri[0]
    e1 = tri[1] - tri[0]
    e2 = tri[2] - tri[0]
    jac = abs(e1[0] * e2[1] - e1[1] * e2[0])
    total = 0.0
    for (xi, eta), w in zip(rule.points, rule.weights):
        x = v0[0] + xi * e1[0] + eta * e2[0]
        y = v0[1] + xi * e1[1] + eta * e2[1]
        val = f(x, y)
        if not np.isfinite(val):
            raise EvaluationError(
                f"non-finite integrand value {val!r} at ({x}, {y})", point=(x, y)
            )
        total += w * val
    return jac * total


def integrate_segment(f, segment, rule, weight="none"):
    """Integrate ``f(x1)`` over a 1D interval of the interface line.

    With ``weight="sqrt_negative_x1"`` the substitution x1 = -t**2 is applied
    (the segment must lie in x1 <= 0), which makes integrands containing a
    sqrt(-x1) factor smooth.  The weight stays folded into ``f`` itself.
    """
    lo, hi = float(segment[0]), float(segment[1])
    if hi < lo:
        raise InvalidParameterError(f"empty segment ({lo}, {hi})")
    if weight == "none":
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        vals = []
        for t, w in zip(rule.points, rule.weights):
            x = mid + half * t
            val = f(x)
            if not np.isfinite(val):
                raise EvaluationError(f"non-finite integrand at x1={x}", point=(x, 0.0))
            vals.append(w * val)
        return half * pairwise_sum(vals)
    if weight == "sqrt_negative_x1":
        if hi > 1e-15:
            raise InvalidParameterError(
                "sqrt_negative_x1 weight requires a segment in x1 <= 0"
            )
        hi = min(hi, 0.0)
        t_lo, t_hi = math.sqrt(-hi), math.sqrt(-lo)
        mid, half = 0.5 * (t_lo + t_hi), 0.5 * (t_hi - t_lo)
        vals = []
        for t, w in zip(rule.points, rule.weights):
            s = mid + half * t
            x = -s * s
            val = 2.0 * s * f(x)
            if not np.isfinite(val):
                raise EvaluationError(f"non-finite integrand at x1={x}", point=(x, 0.0))
            vals.append(w * val)
        return half * pairwise_sum(vals)
    raise InvalidParameterError(f"unknown segment weight {weight!r}")


def _split_triangle_x1(tri, c, tol=1e-14):
    """Cut a triangle along the vertical line x1 = c into sub-triangles."""
    tri = np.asarray(tri, dtype=float)
    d = tri[:, 0] - c
    scale = max(1.0, np.max(np.abs(tri)))
    left = d < -tol * scale
    right = d > tol * scale
    if not left.any() or not right.any():
        return [tri]

    def clip(keep_mask):
        poly = []
        for i in range(3):
            j = (i + 1) % 3
            if keep_mask[i]:
                poly.append(tri[i])
            si, sj = d[i], d[j]
            if (si < 0) != (sj < 0) and abs(si - sj) > 0:
                t = si / (si - sj)
                poly.append(tri[i] + t * (tri[j] - tri[i]))
        # de-duplicate consecutive identical points
        out = []
        for p in poly:
            if not out or np.linalg.norm(p - out[-1]) > tol * scale:
                out.append(p)
        if len(out) > 2 and np.linalg.norm(out[0] - out[-1]) <= tol * scale:
            out.pop()
        tris = []
        for k in range(1, len(out) - 1):
            piece = np.array([out[0], out[k], out[k + 1]])
            if triangle_area(piece) > (tol * scale) ** 2:
                tris.append(piece)
        return tris

    return clip(~right) + clip(~left)


def split_triangle_at_breakpoints(tri, x1_breakpoints):
    """Split a triangle along every vertical breakpoint line crossing it."""
    pieces = [np.asarray(tri, dtype=float)]
    for c in sorted(set(float(b) for b in x1_breakpoints)):
        nxt = []
        for piece in pieces:
            nxt.extend(_split_triangle_x1(piece, c))
        pieces = nxt
    return pieces


def _touches_origin(tri, tol=1e-13):
    tri = np.asarray(tri, dtype=float)
    scale = max(1.0, np.max(np.abs(tri)))
    # barycentric test for (0, 0) in the closed triangle
    v0, v1, v2 = tri
    det = (v1[0] - v0[0]) * (v2[1] - v0[1]) - (v2[0] - v0[0]) * (v1[1] - v0[1])
    if det == 0.0:
        return False
    l1 = ((0.0 - v0[0]) * (v2[1] - v0[1]) - (v2[0] - v0[0]) * (0.0 - v0[1])) / det
    l2 = ((v1[0] - v0[0]) * (0.0 - v0[1]) - (0.0 - v0[0]) * (v1[1] - v0[1])) / det
    eps = tol * scale
    return l1 >= -eps and l2 >= -eps and l1 + l2 <= 1.0 + eps


def _integrate_graded(f, tri, rule, running_scale):
    """Integrate with geometric refinement toward the origin."""
    total = 0.0
    work = [(np.asarray(tri, dtype=float), 0)]
    while work:
        t, depth = work.pop()
        direct = integrate_triangle(f, t, rule)
        if depth >= GRADING_MAX_DEPTH or abs(direct) <= GRADING_REL_TOL * max(
            running_scale, abs(total), 1e-300
        ):
            total += direct
            continue
        recursed = False
        for child in red_refine(t):
            if _touches_origin(child):
                work.append((child, depth + 1))
                recursed = True
            else:
                total += integrate_triangle(f, child, rule)
        if not recursed:
            total += direct
    return total


def _element_contribution(f, tri, side, rule, breakpoints, graded):
    def fs(x, y):
        return f(x, y, side)

    pieces = (
        split_triangle_at_breakpoints(tri, breakpoints) if breakpoints else [tri]
    )
    sub = []
    for piece in pieces:
        if graded and _touches_origin(piece):
            direct = integrate_triangle(fs, piece, rule)
            sub.append(_integrate_graded(fs, piece, rule, abs(direct)))
        else:
            sub.append(integrate_triangle(fs, piece, rule))
    return pairwise_sum(sub)


def worker_count():
    try:
        n = int(os.environ.get(WORKERS_ENV, "1"))
    except ValueError:
        n = 1
    return max(1, n)


def integrate_mesh(f, mesh, rule, side=None, x1_breakpoints=(), graded_at_origin=False):
    """Integrate ``f(x1, x2, side)`` over all (or one side's) mesh elements.

    The per-element contributions are computed in canonical element order and
    combined with a pairwise tree reduction; worker parallelism only changes
    scheduling, never the reduction order.
    """
    elements = [
        (tri, s) for tri, s in mesh.elements if side is None or s == side
    ]
    breakpoints = tuple(float(b) for b in x1_breakpoints)
    n_workers = worker_count()
    if n_workers == 1 or len(elements) < 4:
        contribs = [
            _element_contribution(f, tri, s, rule, breakpoints, graded_at_origin)
            for tri, s in elements
        ]
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            contribs = list(
                pool.map(
                    lambda el: _element_contribution(
                        f, el[0], el[1], rule, breakpoints, graded_at_origin
                    ),
                    elements,
                )
            )
    return pairwise_sum(contribs)


def integrate_domain(
    f,
    domain,
    level,
    rule=None,
    graded_at_origin=False,
    side=None,
    x1_breakpoints=(),
):
    """Integrate ``f(x1, x2, side)`` over the whole domain (or one subdomain)."""
    if level < 0:
        raise InvalidParameterError("refinement level must be >= 0")
    rule = rule or triangle_rule()
    mesh = triangulate(domain, level)
    return integrate_mesh(
        f,
        mesh,
        rule,
        side=side,
        x1_breakpoints=x1_breakpoints,
        graded_at_origin=graded_at_origin,
    )
