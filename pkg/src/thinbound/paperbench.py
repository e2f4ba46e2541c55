"""Exact-solution oracle and the built-in approximation families.

The reference problem on the two-triangle domain with a zero obstacle has
the closed-form minimizer u = Re((x1 + i|x2|)^{3/2}), harmonic on each
subdomain, vanishing on the interface for x1 <= 0 and touching the obstacle
exactly there, with interface flux jump 3 sqrt(-x1) on the contact set.

Three approximation families are bundled: v1 (same coincidence set as u),
v2 (empty coincidence set), and v3eps (an eps-parametrized family whose
efficiency index tends to 1 as eps shrinks).  Closed-form energy errors are
attached where they exist; otherwise graded quadrature is authoritative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import assemble_constants
from .errors import InvalidParameterError
from .fields import (
    FluxField,
    MultiplierField,
    ScalarField,
    add_fields,
    flux_from_gradient,
    multiplier_from_jump,
    piecewise_x1_field,
    polynomial_field,
    zero_scalar_field,
)
from .geometry import PLUS, build_domain
from .majorants import (
    DEFAULT_QUAD,
    RESIDUAL_SKIP_TOL,
    energy_error,
    majorant_M,
    majorant_M5,
)
from .poly2d import Poly2

EXAMPLE_NAMES = ("v1", "v2", "v3eps")


# ---------------------------------------------------------------------------
# exact solution


def exact_solution(x1, x2):
    """u = Re((x1 + i|x2|)^{3/2}) in polar form r^{3/2} cos(3 theta / 2)."""
    y = abs(x2)
    if y == 0.0:
        return x1**1.5 if x1 > 0.0 else 0.0
    r = math.hypot(x1, y)
    theta = math.atan2(y, x1)
    return r**1.5 * math.cos(1.5 * theta)


def exact_jump(x1):
    """Interface flux jump of the exact solution: 3 sqrt(-x1) on x1 < 0."""
    return 3.0 * math.sqrt(-x1) if x1 < 0.0 else 0.0


def exact_gradient(x1, x2, side=None):
    """Two-sided gradient of u; exact on the interface by special-casing."""
    if x2 == 0.0:
        if x1 > 0.0:
            return np.array([1.5 * math.sqrt(x1), 0.0])
        if x1 == 0.0:
            return np.zeros(2)
        gy = 1.5 * math.sqrt(-x1)
        s = PLUS if side is None else side
        return np.array([0.0, -gy if s == PLUS else gy])
    y = abs(x2)
    r = math.hypot(x1, y)
    theta = math.atan2(y, x1)
    c = 1.5 * math.sqrt(r)
    gx = c * math.cos(0.5 * theta)
    gy = -c * math.sin(0.5 * theta)
    if x2 < 0.0:
        gy = -gy
    return np.array([gx, gy])


def exact_field():
    """The exact solution as a scalar field (harmonic per subdomain)."""
    return ScalarField(
        value=exact_solution,
        gradient=exact_gradient,
        laplacian=lambda x1, x2, side=None: 0.0,
        smoothness="analytic_singular",
        x1_breakpoints=(0.0,),
        normal_jump=exact_jump,
        jump_singular=True,
        name="exact_u",
    )


def exact_flux():
    """q = grad(u): divergence free per subdomain, jump 3 sqrt(-x1)."""
    return FluxField(
        eval_fn=exact_gradient,
        divergence=lambda x1, x2, side: 0.0,
        normal_jump=exact_jump,
        jump_singular=True,
        x1_breakpoints=(0.0,),
        name="grad_exact_u",
    )


def exact_multiplier():
    """The exact contact force density lambda* = interface jump of u."""
    return MultiplierField(
        eval_fn=exact_jump,
        sqrt_singular=True,
        x1_breakpoints=(0.0,),
        name="lambda_star",
    )


# ---------------------------------------------------------------------------
# the approximation families


def _w1(a):
    X, Y = Poly2.x1(), Poly2.x2()
    upper = Y * Y * ((Y - a) * (Y - a) - X * X)
    lower = Y * Y * ((Y + a) * (Y + a) - X * X)
    return polynomial_field(upper, lower, name="w1")


def _w2(a):
    X, Y = Poly2.x1(), Poly2.x2()
    w = ((Y - a) * (Y - a) - X * X) * ((Y + a) * (Y + a) - X * X)
    return polynomial_field(w, w, name="w2")


def _w3(a, eps):
    X = Poly2.x1()
    Y = Poly2.x2()
    beta = (Poly2.const(a) - X) * (X + eps) * (X + eps)
    left = (eps * eps) * beta * ((X + a) * (X + a) - Y * Y)
    right = (eps * eps) * beta * ((Poly2.const(a) - X) * (Poly2.const(a) - X) - Y * Y)
    return piecewise_x1_field(
        [(-eps, 0.0, left), (0.0, a, right)], name=f"w3_eps{eps:g}"
    )


@dataclass
class ExampleCase:
    """One built-in approximation with its oracle and closed-form error."""

    name: str
    a: float
    eps: float
    field: ScalarField
    oracle: ScalarField
    exact_error_closed_form: float


def closed_form_error(name, a):
    """Known energy-error values; None where only quadrature applies."""
    if name == "v1":
        return (4.0 / 3.0) * math.sqrt(2.0 / 35.0) * a**4
    if name == "v2":
        return 16.0 / (3.0 * math.sqrt(5.0)) * a**4
    return None


def build_example(name, a=1.0, eps=None):
    """Construct one of the v1 / v2 / v3eps approximation cases."""
    if name not in EXAMPLE_NAMES:
        raise InvalidParameterError(
            f"unknown example {name!r}; choose from {EXAMPLE_NAMES}"
        )
    if not a > 0.0:
        raise InvalidParameterError(f"half-width must be positive, got {a}")
    if name == "v3eps":
        if eps is None or not 0.0 < eps < a:
            raise InvalidParameterError(
                f"v3eps needs eps in (0, a); got eps={eps!r}, a={a}"
            )
    elif eps is not None:
        raise InvalidParameterError(f"example {name!r} takes no eps")
    u = exact_field()
    if name == "v1":
        w = _w1(a)
    elif name == "v2":
        w = _w2(a)
    else:
        w = _w3(a, eps)
    field = add_fields(u, w, name=name)
    return ExampleCase(
        name=name,
        a=float(a),
        eps=None if eps is None else float(eps),
        field=field,
        oracle=u,
        exact_error_closed_form=closed_form_error(name, a),
    )


FIELD_REGISTRY = {
    "exact_u": lambda a=1.0, eps=None: exact_field(),
    "v1": lambda a=1.0, eps=None: build_example("v1", a).field,
    "v2": lambda a=1.0, eps=None: build_example("v2", a).field,
    "v3eps": lambda a=1.0, eps=0.1: build_example("v3eps", a, eps).field,
    "psi_zero": lambda a=1.0, eps=None: zero_scalar_field(),
}

FLUX_CHOICES = ("gradient_of_v", "gradient_of_u")


def reproduce(name, a=1.0, eps=None, qc=DEFAULT_QUAD, flux_choice="gradient_of_v"):
    """Run one built-in case end to end.

    Returns a dict with the case, the quadrature energy error, and a report
    per evaluated bound kind ("M" always; "M5_partial" whenever the jump
    residual vanishes so the partially-equilibrated form applies).
    """
    if flux_choice not in FLUX_CHOICES:
        raise InvalidParameterError(
            f"unknown flux choice {flux_choice!r}; choose from {FLUX_CHOICES}"
        )
    case = build_example(name, a, eps)
    domain = build_domain(a)
    constants = assemble_constants(domain)
    psi = zero_scalar_field()
    if flux_choice == "gradient_of_v":
        q = flux_from_gradient(case.field)
        lam = multiplier_from_jump(q)
    else:
        q = exact_flux()
        lam = exact_multiplier()
    err = energy_error(case.field, case.oracle, domain, qc)
    reports = {}
    rep = majorant_M(case.field, q, lam, psi, domain, constants, qc)
    rep.attach_exact_error(err)
    reports["M"] = rep
    if rep.terms["jump_residual"] <= RESIDUAL_SKIP_TOL:
        rep5 = majorant_M5(
            case.field, q, lam, psi, 0.0, domain, constants, mode="partial", qc=qc
        )
        rep5.attach_exact_error(err)
        reports["M5_partial"] = rep5
    return {"case": case, "exact_error": err, "reports": reports}
