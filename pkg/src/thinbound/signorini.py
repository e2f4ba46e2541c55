"""Majorants for the boundary-obstacle (scalar Signorini) problem.

Here the obstacle acts on part of the outer boundary: the region is a
rectangle, the contact part M is its bottom edge, and the Dirichlet data
holds on the remaining three edges.  The interface jump of the interior
problem is replaced by the one-sided outward normal flux q . n on M.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import ConstantSet, PAYNE_WEINBERGER
from .errors import ConditionViolationError, InvalidParameterError, NotAdmissibleError
from .geometry import PLUS
from .majorants import RESIDUAL_SKIP_TOL, ZERO_MEAN_TOL, MajorantReport
from .quadrature import integrate_segment, pairwise_sum, segment_rule

OBSTACLE_TOL = 1e-10


@dataclass(frozen=True)
class SignoriniDomain:
    """Axis-aligned rectangle with the contact boundary on its bottom edge."""

    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float

    def __post_init__(self):
        if not (self.x_hi > self.x_lo and self.y_hi > self.y_lo):
            raise InvalidParameterError("rectangle must have positive extents")

    @property
    def contact_boundary(self):
        """The edge M carrying the obstacle, with outward normal (0, -1)."""
        return ((self.x_lo, self.y_lo), (self.x_hi, self.y_lo))

    @property
    def dirichlet_boundary(self):
        """The three remaining edges (left, top, right)."""
        return (
            ((self.x_lo, self.y_lo), (self.x_lo, self.y_hi)),
            ((self.x_lo, self.y_hi), (self.x_hi, self.y_hi)),
            ((self.x_hi, self.y_hi), (self.x_hi, self.y_lo)),
        )

    @property
    def contact_normal(self):
        return (0.0, -1.0)

    @property
    def diameter(self):
        return math.hypot(self.x_hi - self.x_lo, self.y_hi - self.y_lo)


def unit_square_contact_domain():
    """The desk-scale test region: (-1/2, 1/2) x (0, 1), contact at the bottom."""
    return SignoriniDomain(-0.5, 0.5, 0.0, 1.0)


SIGNORINI_CONSTANT_NAMES = ("friedrichs_omega", "poincare_omega", "poincare_manifold")


def assemble_signorini_constants(sdomain, overrides=None):
    """Closed-form Poincare bound plus mandatory user-certified constants.

    The Friedrichs constant for functions vanishing on the Dirichlet part
    only, the trace constant of M, and the zero-mean trace constant have no
    generic closed form here; they must arrive as certified overrides.
    """
    values = {"poincare_omega": sdomain.diameter / math.pi}
    provenance = {"poincare_omega": PAYNE_WEINBERGER}
    cs = ConstantSet(values, provenance)
    if overrides:
        vals = dict(cs.values)
        prov = dict(cs.provenance)
        for name, entry in overrides.items():
            if name not in SIGNORINI_CONSTANT_NAMES + ("trace_manifold",):
                raise InvalidParameterError(
                    f"unknown Signorini constant name {name!r}"
                )
            if isinstance(entry, dict):
                value, source = entry.get("value"), entry.get("source")
            else:
                value, source = entry
            if source is None or not str(source).strip():
                raise InvalidParameterError(
                    f"constant override {name!r} needs a 'source' string"
                )
            value = float(value)
            if not value > 0.0:
                raise InvalidParameterError(
                    f"constant {name!r} must be positive, got {value}"
                )
            vals[name] = value
            prov[name] = f"user_supplied: {source}"
        cs = ConstantSet(vals, prov)
    return cs


# ---------------------------------------------------------------------------
# quadrature on the rectangle and its contact edge


def _rect_integral(f, sdomain, cells=32, nodes=5):
    """Tensor Gauss integration of ``f(x, y)`` on a uniform cell grid."""
    gx, gw = np.polynomial.legendre.leggauss(nodes)
    xs = np.linspace(sdomain.x_lo, sdomain.x_hi, cells + 1)
    ys = np.linspace(sdomain.y_lo, sdomain.y_hi, cells + 1)
    contribs = []
    for i in range(cells):
        hx = 0.5 * (xs[i + 1] - xs[i])
        cx = 0.5 * (xs[i + 1] + xs[i])
        for j in range(cells):
            hy = 0.5 * (ys[j + 1] - ys[j])
            cy = 0.5 * (ys[j + 1] + ys[j])
            acc = 0.0
            for p, wp in zip(gx, gw):
                for q, wq in zip(gx, gw):
                    acc += wp * wq * f(cx + hx * p, cy + hy * q)
            contribs.append(hx * hy * acc)
    return pairwise_sum(contribs)


def _contact_integral(g, sdomain, sqrt_neg=False, breakpoints=(), nodes=16):
    """Integrate g(x) over the contact edge, regularizing sqrt(-x) factors."""
    cuts = {sdomain.x_lo, sdomain.x_hi}
    cuts.update(b for b in breakpoints if sdomain.x_lo < b < sdomain.x_hi)
    if sqrt_neg and sdomain.x_lo < 0.0 < sdomain.x_hi:
        cuts.add(0.0)
    cuts = sorted(cuts)
    rule = segment_rule(nodes)
    vals = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        w = "sqrt_negative_x1" if (sqrt_neg and hi <= 0.0) else "none"
        vals.append(integrate_segment(g, (lo, hi), rule, weight=w))
    return pairwise_sum(vals)


def normal_trace(q, sdomain):
    """Outward normal component of the flux on M (normal is (0, -1))."""
    trace = getattr(q, "contact_normal_trace", None)
    if trace is not None:
        return trace
    return lambda x: -q.eval(x, sdomain.y_lo, PLUS)[1]


def _check_contact_admissible(v, psi, sdomain, n=1025):
    xs = np.linspace(sdomain.x_lo, sdomain.x_hi, n)
    gap = min(
        v.value(x, sdomain.y_lo) - psi.value(x, sdomain.y_lo) for x in xs
    )
    if gap < -OBSTACLE_TOL:
        raise NotAdmissibleError(
            f"approximation dips {-gap:.3e} below the obstacle on the contact edge"
        )


def _check_multiplier(lam, sdomain, n=1025):
    xs = np.linspace(sdomain.x_lo, sdomain.x_hi, n)
    low = min(lam.eval(x) for x in xs)
    if low < -1e-12:
        raise NotAdmissibleError(f"multiplier is negative ({low:.3e}) on M")


def _signorini_terms(v, q, lam, psi, sdomain, cells, nodes):
    def misfit(x, y):
        d = v.gradient(x, y, PLUS) - q.eval(x, y, PLUS)
        return d[0] * d[0] + d[1] * d[1]

    def divsq(x, y):
        d = q.divergence(x, y, PLUS)
        return d * d

    qn = normal_trace(q, sdomain)
    y0 = sdomain.y_lo
    singular = lam.sqrt_singular or getattr(q, "jump_singular", False)
    breaks = tuple(
        sorted(
            set(lam.x1_breakpoints)
            | set(getattr(q, "x1_breakpoints", ()))
            | set(getattr(v, "x1_breakpoints", ()))
        )
    )
    pairing = _contact_integral(
        lambda x: lam.eval(x) * (v.value(x, y0) - psi.value(x, y0)),
        sdomain,
        sqrt_neg=lam.sqrt_singular,
        breakpoints=breaks,
    )
    jr_sq = _contact_integral(
        lambda x: (lam.eval(x) - qn(x)) ** 2,
        sdomain,
        sqrt_neg=singular,
        breakpoints=breaks,
    )
    return {
        "flux_misfit": math.sqrt(max(_rect_integral(misfit, sdomain, cells, nodes), 0.0)),
        "manifold_pairing": max(pairing, 0.0),
        "divergence_residual": math.sqrt(
            max(_rect_integral(divsq, sdomain, cells, nodes), 0.0)
        ),
        "jump_residual": math.sqrt(max(jr_sq, 0.0)),
    }


def majorant_signorini(v, q, lam, psi, sdomain, constants, cells=32, nodes=5):
    """Friedrichs/trace form of the boundary-obstacle error bound."""
    _check_contact_admissible(v, psi, sdomain)
    _check_multiplier(lam, sdomain)
    t = _signorini_terms(v, q, lam, psi, sdomain, cells, nodes)
    value = t["flux_misfit"] + math.sqrt(2.0 * t["manifold_pairing"])
    if t["divergence_residual"] > RESIDUAL_SKIP_TOL:
        value += constants.get("friedrichs_omega") * t["divergence_residual"]
    if t["jump_residual"] > RESIDUAL_SKIP_TOL:
        value += constants.get("trace_manifold") * t["jump_residual"]
    return MajorantReport(kind="S", value=value, terms=t, constants_used=constants)


def majorant_signorini_poincare(v, q, lam, psi, sdomain, constants, cells=32, nodes=5):
    """Poincare form; requires both zero-mean conditions to hold."""
    _check_contact_admissible(v, psi, sdomain)
    _check_multiplier(lam, sdomain)
    qn = normal_trace(q, sdomain)
    singular = lam.sqrt_singular or getattr(q, "jump_singular", False)
    breaks = tuple(
        sorted(set(lam.x1_breakpoints) | set(getattr(q, "x1_breakpoints", ())))
    )
    measured = {
        "div_mean": _rect_integral(
            lambda x, y: q.divergence(x, y, PLUS), sdomain, cells, nodes
        ),
        "contact_mean": _contact_integral(
            lambda x: lam.eval(x) - qn(x), sdomain, sqrt_neg=singular, breakpoints=breaks
        ),
    }
    bad = {k: m for k, m in measured.items() if abs(m) > ZERO_MEAN_TOL}
    if bad:
        raise ConditionViolationError("zero-mean condition violated", measured)
    t = _signorini_terms(v, q, lam, psi, sdomain, cells, nodes)
    value = t["flux_misfit"] + math.sqrt(2.0 * t["manifold_pairing"])
    if t["divergence_residual"] > RESIDUAL_SKIP_TOL:
        value += constants.get("poincare_omega") * t["divergence_residual"]
    if t["jump_residual"] > RESIDUAL_SKIP_TOL:
        value += constants.get("poincare_manifold") * t["jump_residual"]
    return MajorantReport(
        kind="S_poincare", value=value, terms=t, constants_used=constants
    )


def signorini_energy_error(v, u, sdomain, cells=48, nodes=5):
    """Energy-norm distance of two fields over the rectangle."""

    def integrand(x, y):
        d = v.gradient(x, y, PLUS) - u.gradient(x, y, PLUS)
        return d[0] * d[0] + d[1] * d[1]

    return math.sqrt(max(_rect_integral(integrand, sdomain, cells, nodes), 0.0))
