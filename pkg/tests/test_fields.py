"""Scalar fields, fluxes, multipliers and the admissibility checker."""

import math

import numpy as np
import pytest

from thinbound import (
    MINUS,
    PLUS,
    Poly2,
    add_fields,
    build_domain,
    constant_flux,
    flux_from_gradient,
    multiplier_from_jump,
    piecewise_x1_field,
    polynomial_field,
    scale_field,
    shift_flux,
    zero_scalar_field,
)
from thinbound.errors import UnsupportedFieldError
from thinbound.fields import ScalarField, check_admissible


def _fd_gradient(v, x, y, h=1e-6):
    return np.array(
        [
            (v.value(x + h, y) - v.value(x - h, y)) / (2 * h),
            (v.value(x, y + h) - v.value(x, y - h)) / (2 * h),
        ]
    )


def test_poly2_evaluation_and_arithmetic():
    p = Poly2({(2, 0): 1.0, (0, 1): -3.0, (0, 0): 2.0})  # x^2 - 3y + 2
    assert p(2.0, 1.0) == pytest.approx(3.0)
    q = p * Poly2({(1, 0): 1.0})
    assert q(2.0, 1.0) == pytest.approx(6.0)
    assert (p + p)(1.0, 0.0) == pytest.approx(6.0)
    assert (p - p)(0.3, 0.7) == 0.0


def test_polynomial_field_derivatives():
    p = Poly2({(3, 0): 1.0, (1, 2): 2.0, (0, 1): -1.0})  # x^3 + 2xy^2 - y
    v = polynomial_field(p)
    rng = np.random.default_rng(3)
    for _ in range(10):
        x, y = rng.uniform(-0.8, 0.8, size=2)
        g = v.gradient(x, y, PLUS)
        assert np.allclose(g, _fd_gradient(v, x, y), atol=1e-7)
        # laplacian: 6x + 4x = 10x... d2/dx2 (x^3 + 2xy^2) = 6x,
        # d2/dy2 (2xy^2 - y) = 4x
        assert v.laplacian(x, y, PLUS) == pytest.approx(10.0 * x, abs=1e-12)
    assert v.normal_jump(0.5) == pytest.approx(0.0)


def test_two_sided_polynomial_field_jump():
    # v = y^2 above, v = 3y^2 below: [dv/dn] = dv-/dy - dv+/dy at y=0 is 0,
    # but with a linear term the jump is visible
    up = Poly2({(0, 1): 1.0})  # y
    dn = Poly2({(0, 1): -2.0})  # -2y
    v = polynomial_field(up, dn)
    # jump convention: (d/dy of lower) - (d/dy of upper) = -2 - 1 = -3
    assert v.normal_jump(0.2) == pytest.approx(-3.0)
    assert v.gradient(0.1, 0.5, PLUS)[1] == pytest.approx(1.0)
    assert v.gradient(0.1, -0.5, MINUS)[1] == pytest.approx(-2.0)


def test_piecewise_field_continuity_and_breakpoints():
    # (1 + x) on x <= 0, (1 - x) on x >= 0, both times y^2
    left = Poly2({(0, 2): 1.0, (1, 2): 1.0})
    right = Poly2({(0, 2): 1.0, (1, 2): -1.0})
    v = piecewise_x1_field([(-1.0, 0.0, left), (0.0, 1.0, right)])
    assert 0.0 in v.x1_breakpoints
    assert v.value(-1e-12, 0.5) == pytest.approx(v.value(1e-12, 0.5), abs=1e-10)
    assert v.value(-0.5, 2.0) == pytest.approx(2.0)
    assert v.gradient(0.25, 0.5, PLUS)[0] == pytest.approx(-0.25)


def test_add_and_scale_fields():
    v = polynomial_field(Poly2({(2, 0): 1.0}))
    w = polynomial_field(Poly2({(0, 2): 1.0}))
    s = add_fields(v, scale_field(w, 3.0))
    assert s.value(2.0, 1.0) == pytest.approx(7.0)
    assert s.laplacian(0.0, 0.0, PLUS) == pytest.approx(2.0 + 6.0)
    assert np.allclose(s.gradient(1.0, 1.0, PLUS), [2.0, 6.0])


def test_flux_from_gradient_requires_laplacian():
    v = ScalarField(
        value=lambda x, y: x,
        gradient=lambda x, y, side: np.array([1.0, 0.0]),
        laplacian=None,
        smoothness="polynomial",
    )
    with pytest.raises(UnsupportedFieldError):
        flux_from_gradient(v)


def test_flux_shift_keeps_divergence_and_jump():
    v = polynomial_field(Poly2({(2, 0): 1.0, (0, 2): 1.0}))
    q = flux_from_gradient(v)
    q2 = shift_flux(q, 0.5, -0.25)
    x, y = 0.3, 0.4
    assert np.allclose(
        q2.eval(x, y, PLUS), q.eval(x, y, PLUS) + np.array([0.5, -0.25])
    )
    assert q2.divergence(x, y, PLUS) == q.divergence(x, y, PLUS)
    assert q2.normal_jump(0.1) == q.normal_jump(0.1)


def test_multiplier_clip_is_nonnegative():
    q = constant_flux(0.0, 1.0)
    # give the flux an artificial sign-changing jump
    q.normal_jump = lambda x: x
    lam = multiplier_from_jump(q)
    assert lam.eval(-0.5) == 0.0
    assert lam.eval(0.5) == 0.5
    assert 0.0 in lam.x1_breakpoints


@pytest.mark.parametrize("name", ["v1", "v2", "v3eps"])
def test_builtin_families_are_admissible(name):
    from thinbound import build_example, exact_field

    case = build_example(name, 1.0, eps=0.1 if name == "v3eps" else None)
    dom = build_domain(1.0)
    rep = check_admissible(
        case.field, dom, zero_scalar_field(), exact_field(), tol=1e-10
    )
    assert rep.admissible, rep
    assert rep.min_gap_on_manifold >= -1e-10
    assert rep.max_boundary_mismatch <= 1e-10


def test_admissibility_flags_obstacle_dip():
    from thinbound import exact_field

    dom = build_domain(1.0)
    bad = add_fields(exact_field(), polynomial_field(Poly2({(0, 0): -0.01})))
    rep = check_admissible(bad, dom, zero_scalar_field(), bad, tol=1e-10)
    assert not rep.admissible
    assert rep.min_gap_on_manifold == pytest.approx(-0.01, abs=1e-12)
