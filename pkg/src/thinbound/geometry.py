"""Square-with-interface geometry and its uniform triangulations.

The computational domain is the square with vertices (+-a, 0), (0, +-a),
split by the flat interface segment M = {x2 = 0, -a <= x1 <= a} into an
upper triangle (plus side) and a lower triangle (minus side).  Meshes are
uniform red refinements of the two base triangles, so no element ever
straddles M.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError

PLUS = +1
MINUS = -1


@dataclass(frozen=True)
class BoundaryPiece:
    """One straight boundary edge, stored as its line equation and endpoints."""

    name: str
    # coefficients (c1, c2, c0) of the edge line c1*x1 + c2*x2 + c0 = 0
    line: tuple
    start: tuple
    end: tuple
    outward_normal: tuple


@dataclass(frozen=True)
class Domain2D:
    """The two-triangle domain with half-width ``a`` and interface on x2=0."""

    a: float
    subdomain_plus: tuple = field(init=False, default=None)
    subdomain_minus: tuple = field(init=False, default=None)
    boundary_pieces: tuple = field(init=False, default=None)

    def __post_init__(self):
        a = self.a
        object.__setattr__(self, "subdomain_plus", ((-a, 0.0), (a, 0.0), (0.0, a)))
        object.__setattr__(self, "subdomain_minus", ((-a, 0.0), (a, 0.0), (0.0, -a)))
        s = 1.0 / np.sqrt(2.0)
        pieces = (
            BoundaryPiece("i", (1.0, 1.0, -a), (a, 0.0), (0.0, a), (s, s)),
            BoundaryPiece("ii", (-1.0, 1.0, -a), (0.0, a), (-a, 0.0), (-s, s)),
            BoundaryPiece("iii", (-1.0, -1.0, -a), (-a, 0.0), (0.0, -a), (-s, -s)),
            BoundaryPiece("iv", (1.0, -1.0, -a), (0.0, -a), (a, 0.0), (s, -s)),
        )
        object.__setattr__(self, "boundary_pieces", pieces)

    @property
    def manifold(self):
        """Endpoints of M, oriented from (-a, 0) to (a, 0)."""
        return ((-self.a, 0.0), (self.a, 0.0))

    @property
    def manifold_length(self):
        return 2.0 * self.a

    def contains(self, x1, x2, tol=1e-12):
        return abs(x1) + abs(x2) <= self.a + tol


@dataclass(frozen=True)
class Mesh:
    """Uniform triangulation; each element is tagged with its subdomain side."""

    domain: Domain2D
    refinement_level: int
    # list of (vertices ndarray shape (3, 2), side tag)
    elements: tuple
    # ordered partition of [-a, a] into (lo, hi) intervals on x2 = 0
    manifold_edges: tuple

    def element_count(self):
        return len(self.elements)


def build_domain(a):
    """Create the two-triangle domain of half-width ``a``."""
    if not np.isfinite(a) or a <= 0.0:
        raise InvalidParameterError(f"domain half-width must be positive, got {a!r}")
    return Domain2D(float(a))


def red_refine(tri):
    """Split a triangle into 4 congruent children through edge midpoints."""
    v0, v1, v2 = tri
    m01 = 0.5 * (v0 + v1)
    m12 = 0.5 * (v1 + v2)
    m02 = 0.5 * (v0 + v2)
    return [
        np.array([v0, m01, m02]),
        np.array([m01, v1, m12]),
        np.array([m02, m12, v2]),
        np.array([m01, m12, m02]),
    ]


def triangle_area(tri):
    (x0, y0), (x1, y1), (x2, y2) = tri
    return 0.5 * abs((x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0))


def triangulate(domain, level):
    """Uniformly refine the base one-triangle-per-side mesh ``level`` times."""
    if level < 0:
        raise InvalidParameterError(f"refinement level must be >= 0, got {level}")
    a = domain.a
    base = [
        (np.array([[-a, 0.0], [a, 0.0], [0.0, a]]), PLUS),
        (np.array([[-a, 0.0], [a, 0.0], [0.0, -a]]), MINUS),
    ]
    elements = base
    for _ in range(level):
        refined = []
        for tri, side in elements:
            refined.extend((child, side) for child in red_refine(tri))
        elements = refined

    n_edges = 2**level
    cuts = np.linspace(-a, a, n_edges + 1)
    manifold_edges = tuple((cuts[i], cuts[i + 1]) for i in range(n_edges))
    return Mesh(
        domain=domain,
        refinement_level=level,
        elements=tuple((tri, side) for tri, side in elements),
        manifold_edges=manifold_edges,
    )
