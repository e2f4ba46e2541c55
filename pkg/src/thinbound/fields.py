"""Scalar approximations, fluxes and interface multipliers.

Fields are immutable bundles of pure evaluation callables.  Scalar fields
carry a value, a side-resolved gradient and (optionally) a side-resolved
Laplacian; fluxes carry a vector value, a per-subdomain divergence and the
normal-jump trace on the interface.  Where a field has a sqrt(-x1)-type
interface trace, it is flagged so that manifold quadrature can switch to the
regularizing substitution.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedFieldError
from .geometry import PLUS, MINUS
from .poly2d import Poly2


class ScalarField:
    """An evaluable scalar function on the domain, with two-sided gradients."""

    def __init__(
        self,
        value,
        gradient,
        laplacian=None,
        smoothness="polynomial",
        x1_breakpoints=(),
        normal_jump=None,
        jump_singular=False,
        name=None,
    ):
        self.value = value
        self.gradient = gradient
        self.laplacian = laplacian
        self.smoothness_tag = smoothness
        self.x1_breakpoints = tuple(x1_breakpoints)
        self.normal_jump = normal_jump
        self.jump_singular = bool(jump_singular)
        self.name = name

    def __call__(self, x1, x2):
        return self.value(x1, x2)

    def trace(self, x1):
        return self.value(x1, 0.0)


class FluxField:
    """A vector field with per-subdomain divergence and a normal jump on M."""

    def __init__(
        self,
        eval_fn,
        divergence,
        normal_jump,
        jump_singular=False,
        x1_breakpoints=(),
        name=None,
    ):
        self.eval = eval_fn
        self.divergence = divergence
        self.normal_jump = normal_jump
        self.jump_singular = bool(jump_singular)
        self.x1_breakpoints = tuple(x1_breakpoints)
        self.name = name

    def __call__(self, x1, x2, side):
        return self.eval(x1, x2, side)


class MultiplierField:
    """A nonnegative function on the interface (a member of the set Lambda)."""

    def __init__(self, eval_fn, sqrt_singular=False, x1_breakpoints=(), name=None):
        self.eval = eval_fn
        self.sqrt_singular = bool(sqrt_singular)
        self.x1_breakpoints = tuple(x1_breakpoints)
        self.name = name

    def __call__(self, x1):
        return self.eval(x1)


@dataclass(frozen=True)
class AdmissibilityReport:
    min_gap_on_manifold: float
    max_boundary_mismatch: float
    admissible: bool
    tol: float


def zero_scalar_field(name="zero"):
    return ScalarField(
        value=lambda x1, x2: 0.0,
        gradient=lambda x1, x2, side: np.zeros(2),
        laplacian=lambda x1, x2, side: 0.0,
        smoothness="polynomial",
        normal_jump=lambda x1: 0.0,
        name=name,
    )


def polynomial_field(plus: Poly2, minus: Poly2 = None, name=None):
    """Scalar field given by one bivariate polynomial per subdomain.

    The two polynomials must share the same trace on x2 = 0 (H1 continuity);
    this is the caller's contract and is spot-checked by admissibility tests.
    """
    minus = plus if minus is None else minus
    gp = (plus.dx1(), plus.dx2())
    gm = (minus.dx1(), minus.dx2())
    lap_p = plus.laplacian()
    lap_m = minus.laplacian()
    jump_poly = gm[1] - gp[1]  # dv/dn+ + dv/dn- with n+ = (0, -1)

    def value(x1, x2):
        return plus(x1, x2) if x2 >= 0.0 else minus(x1, x2)

    def gradient(x1, x2, side=None):
        if x2 > 0.0 or (x2 == 0.0 and (side is None or side == PLUS)):
            g = gp
        elif x2 < 0.0 or side == MINUS:
            g = gm
        else:
            g = gp
        return np.array([g[0](x1, x2), g[1](x1, x2)])

    def laplacian(x1, x2, side=None):
        if x2 > 0.0 or (x2 == 0.0 and (side is None or side == PLUS)):
            return lap_p(x1, x2)
        return lap_m(x1, x2)

    return ScalarField(
        value=value,
        gradient=gradient,
        laplacian=laplacian,
        smoothness="polynomial",
        normal_jump=lambda x1: jump_poly(x1, 0.0),
        name=name,
    )


def piecewise_x1_field(pieces, name=None):
    """Scalar field from ``[(x1_lo, x1_hi, Poly2), ...]`` slabs (same both sides).

    Used for the obstacle-hugging family whose definition switches along
    vertical lines; outside the listed slabs the field is zero.
    """
    slabs = [(float(lo), float(hi), p) for lo, hi, p in pieces]
    grads = [(p.dx1(), p.dx2()) for _, _, p in slabs]
    laps = [p.laplacian() for _, _, p in slabs]
    cuts = sorted({lo for lo, _, _ in slabs} | {hi for _, hi, _ in slabs})

    def find(x1):
        for k, (lo, hi, _) in enumerate(slabs):
            if lo <= x1 <= hi:
                return k
        return None

    def value(x1, x2):
        k = find(x1)
        return 0.0 if k is None else slabs[k][2](x1, x2)

    def gradient(x1, x2, side=None):
        k = find(x1)
        if k is None:
            return np.zeros(2)
        g = grads[k]
        return np.array([g[0](x1, x2), g[1](x1, x2)])

    def laplacian(x1, x2, side=None):
        k = find(x1)
        return 0.0 if k is None else laps[k](x1, x2)

    return ScalarField(
        value=value,
        gradient=gradient,
        laplacian=laplacian,
        smoothness="piecewise",
        x1_breakpoints=tuple(cuts),
        normal_jump=lambda x1: 0.0,
        name=name,
    )


def add_fields(f, g, name=None):
    """Pointwise sum of two scalar fields, merging their metadata."""
    lap = None
    if f.laplacian is not None and g.laplacian is not None:
        lap = lambda x1, x2, side=None: f.laplacian(x1, x2, side) + g.laplacian(
            x1, x2, side
        )
    jump = None
    if f.normal_jump is not None and g.normal_jump is not None:
        jump = lambda x1: f.normal_jump(x1) + g.normal_jump(x1)
    tags = {f.smoothness_tag, g.smoothness_tag}
    if "analytic_singular" in tags:
        tag = "analytic_singular"
    elif "piecewise" in tags:
        tag = "piecewise"
    else:
        tag = "polynomial"
    return ScalarField(
        value=lambda x1, x2: f.value(x1, x2) + g.value(x1, x2),
        gradient=lambda x1, x2, side=None: f.gradient(x1, x2, side)
        + g.gradient(x1, x2, side),
        laplacian=lap,
        smoothness=tag,
        x1_breakpoints=tuple(sorted(set(f.x1_breakpoints) | set(g.x1_breakpoints))),
        normal_jump=jump,
        jump_singular=f.jump_singular or g.jump_singular,
        name=name,
    )


def scale_field(f, c, name=None):
    return ScalarField(
        value=lambda x1, x2: c * f.value(x1, x2),
        gradient=lambda x1, x2, side=None: c * f.gradient(x1, x2, side),
        laplacian=None
        if f.laplacian is None
        else (lambda x1, x2, side=None: c * f.laplacian(x1, x2, side)),
        smoothness=f.smoothness_tag,
        x1_breakpoints=f.x1_breakpoints,
        normal_jump=None
        if f.normal_jump is None
        else (lambda x1: c * f.normal_jump(x1)),
        jump_singular=f.jump_singular and c != 0.0,
        name=name,
    )


def flux_from_gradient(v, name=None):
    """The flux q = grad(v), with divergence = Laplacian(v) per subdomain."""
    if v.laplacian is None:
        raise UnsupportedFieldError(
            "field has no Laplacian data; cannot form its gradient flux"
        )
    jump = v.normal_jump
    if jump is None:
        jump = lambda x1: (
            v.gradient(x1, 0.0, MINUS)[1] - v.gradient(x1, 0.0, PLUS)[1]
        )
    return FluxField(
        eval_fn=lambda x1, x2, side: v.gradient(x1, x2, side),
        divergence=lambda x1, x2, side: v.laplacian(x1, x2, side),
        normal_jump=jump,
        jump_singular=v.jump_singular,
        x1_breakpoints=v.x1_breakpoints,
        name=name or (f"grad_{v.name}" if v.name else None),
    )


def multiplier_from_jump(q, name=None):
    """Clip the flux's normal jump to the nonnegative multiplier cone."""
    return MultiplierField(
        eval_fn=lambda x1: max(q.normal_jump(x1), 0.0),
        sqrt_singular=q.jump_singular,
        x1_breakpoints=tuple(sorted(set(q.x1_breakpoints) | {0.0})),
        name=name or (f"clip_jump_{q.name}" if q.name else None),
    )


def constant_flux(c1, c2, name=None):
    vec = np.array([float(c1), float(c2)])
    return FluxField(
        eval_fn=lambda x1, x2, side: vec,
        divergence=lambda x1, x2, side: 0.0,
        normal_jump=lambda x1: 0.0,
        name=name,
    )


def shift_flux(q, c1, c2, name=None):
    """Add a constant vector to a flux (divergence and jump are unchanged)."""
    vec = np.array([float(c1), float(c2)])
    return FluxField(
        eval_fn=lambda x1, x2, side: q.eval(x1, x2, side) + vec,
        divergence=q.divergence,
        normal_jump=q.normal_jump,
        jump_singular=q.jump_singular,
        x1_breakpoints=q.x1_breakpoints,
        name=name,
    )


def check_admissible(v, domain, psi, phi, tol=1e-10, n_manifold=2048, n_boundary=512):
    """Sample the obstacle and boundary conditions densely and report."""
    a = domain.a
    xs = np.linspace(-a, a, n_manifold + 1)
    min_gap = min(v.trace(x) - psi.trace(x) for x in xs)

    max_mismatch = 0.0
    for piece in domain.boundary_pieces:
        p0 = np.array(piece.start)
        p1 = np.array(piece.end)
        for t in np.linspace(0.0, 1.0, n_boundary):
            x1, x2 = p0 + t * (p1 - p0)
            max_mismatch = max(max_mismatch, abs(v.value(x1, x2) - phi.value(x1, x2)))

    admissible = min_gap >= -tol and max_mismatch <= tol
    return AdmissibilityReport(
        min_gap_on_manifold=float(min_gap),
        max_boundary_mismatch=float(max_mismatch),
        admissible=bool(admissible),
        tol=float(tol),
    )
