"""Geometry of the two-triangle region and its refinement."""

import math

import numpy as np
import pytest

from thinbound import MINUS, PLUS, build_domain, triangulate
from thinbound.errors import InvalidParameterError
from thinbound.geometry import red_refine, triangle_area


def test_build_domain_rejects_nonpositive_halfwidth():
    for bad in (0.0, -1.0):
        with pytest.raises(InvalidParameterError):
            build_domain(bad)


def test_subdomains_and_manifold():
    dom = build_domain(2.0)
    assert dom.subdomain_plus == ((-2.0, 0.0), (2.0, 0.0), (0.0, 2.0))
    assert dom.subdomain_minus == ((-2.0, 0.0), (2.0, 0.0), (0.0, -2.0))
    assert dom.manifold == ((-2.0, 0.0), (2.0, 0.0))
    assert dom.manifold_length == 4.0


def test_boundary_pieces_contain_their_endpoints():
    dom = build_domain(1.5)
    assert len(dom.boundary_pieces) == 4
    for piece in dom.boundary_pieces:
        c1, c2, c0 = piece.line
        for (x, y) in (piece.start, piece.end):
            assert abs(c1 * x + c2 * y + c0) < 1e-12
        nx, ny = piece.outward_normal
        assert math.isclose(math.hypot(nx, ny), 1.0)


def test_triangulation_counts_and_area():
    dom = build_domain(1.0)
    for level in range(4):
        mesh = triangulate(dom, level)
        assert len(mesh.elements) == 2 * 4**level
        total = sum(triangle_area(tri) for tri, _ in mesh.elements)
        assert total == pytest.approx(2.0, rel=1e-14)
        plus_area = sum(
            triangle_area(tri) for tri, s in mesh.elements if s == PLUS
        )
        assert plus_area == pytest.approx(1.0, rel=1e-14)


def test_refined_elements_stay_on_their_side():
    dom = build_domain(1.0)
    mesh = triangulate(dom, 3)
    for tri, side in mesh.elements:
        ys = [p[1] for p in tri]
        if side == PLUS:
            assert min(ys) >= -1e-15
        else:
            assert side == MINUS
            assert max(ys) <= 1e-15


def test_red_refine_preserves_area():
    tri = np.array([(0.0, 0.0), (1.0, 0.0), (0.3, 0.8)])
    kids = red_refine(tri)
    assert len(kids) == 4
    assert sum(triangle_area(k) for k in kids) == pytest.approx(
        triangle_area(tri), rel=1e-14
    )


def test_manifold_edges_partition_interface():
    dom = build_domain(1.0)
    mesh = triangulate(dom, 2)
    edges = []
    for tri, side in mesh.elements:
        if side != PLUS:
            continue
        pts = [p for p in tri if abs(p[1]) < 1e-15]
        if len(pts) == 2:
            xs = sorted(p[0] for p in pts)
            edges.append(tuple(xs))
    edges.sort()
    assert edges[0][0] == pytest.approx(-1.0)
    assert edges[-1][1] == pytest.approx(1.0)
    for (a0, a1), (b0, b1) in zip(edges[:-1], edges[1:]):
        assert a1 == pytest.approx(b0)
    covered = sum(hi - lo for lo, hi in edges)
    assert covered == pytest.approx(2.0)
