"""Boundary-obstacle majorants checked against a finite-element reference.

The test solution is u(x, y) = Re (x + i y)^{3/2} restricted to the
rectangle (-1/2, 1/2) x (0, 1): it is harmonic, vanishes and has
nonnegative normal flux on the contact edge y = 0, and the complementarity
product is zero, so it solves the boundary-obstacle problem with its own
trace data on the other three edges.  The multiplier is 1.5 sqrt(-x) on
the contact part x < 0.

The Friedrichs constant for the mixed boundary conditions comes from the
lowest eigenvalue 5 pi^2 / 4 of the Laplacian on the unit square with one
Neumann side, giving C_F = 2 / (sqrt(5) pi), and the trace bound
C_Tr <= sqrt(2 C_F) by the Cauchy-Schwarz chain on the rectangle.
"""

import math

import numpy as np
import pytest

from thinbound import (
    ConditionViolationError,
    MultiplierField,
    NotAdmissibleError,
    Poly2,
    add_fields,
    exact_field,
    flux_from_gradient,
    polynomial_field,
    scale_field,
)
from thinbound.fields import FluxField
from thinbound.signorini import (
    SignoriniDomain,
    assemble_signorini_constants,
    majorant_signorini,
    majorant_signorini_poincare,
    normal_trace,
    signorini_energy_error,
    unit_square_contact_domain,
)
from thinbound import zero_scalar_field

from signorini_oracle import reference_energy_error, solve_reference


C_F_MIXED = 2.0 / (math.sqrt(5.0) * math.pi)

OVERRIDES = {
    "friedrichs_omega": {
        "value": C_F_MIXED,
        "source": "lowest mixed Dirichlet/Neumann eigenvalue 5 pi^2/4 "
        "of the unit square",
    },
    "trace_manifold": {
        "value": math.sqrt(2.0 * C_F_MIXED),
        "source": "Cauchy-Schwarz trace chain with the mixed Friedrichs bound",
    },
    "poincare_manifold": {
        "value": math.sqrt(2.0 * C_F_MIXED),
        "source": "coarse bound: the plain trace constant also bounds "
        "zero-mean traces",
    },
}


@pytest.fixture(scope="module")
def sdomain():
    return unit_square_contact_domain()


@pytest.fixture(scope="module")
def sconstants(sdomain):
    return assemble_signorini_constants(sdomain, overrides=OVERRIDES)


@pytest.fixture(scope="module")
def exact_data():
    u = exact_field()
    q = flux_from_gradient(u)
    lam = MultiplierField(
        lambda x: 1.5 * math.sqrt(-x) if x < 0.0 else 0.0,
        sqrt_singular=True,
        x1_breakpoints=(0.0,),
        name="contact_multiplier",
    )
    return u, q, lam


def _perturbed(delta=0.3):
    """u + delta * (1/4 - x^2)(1 - y): admissible, zero on the three sides."""
    bump = polynomial_field(
        Poly2({(0, 0): 0.25, (2, 0): -1.0})
        * Poly2({(0, 0): 1.0, (0, 1): -1.0})
    )
    return add_fields(exact_field(), scale_field(bump, delta))


def test_domain_geometry(sdomain):
    assert sdomain.contact_boundary == ((-0.5, 0.0), (0.5, 0.0))
    assert sdomain.contact_normal == (0.0, -1.0)
    assert math.isclose(sdomain.diameter, math.sqrt(2.0))
    with pytest.raises(Exception):
        SignoriniDomain(0.0, 0.0, 0.0, 1.0)


def test_constants_assembly(sdomain, sconstants):
    assert math.isclose(
        sconstants.get("poincare_omega"), math.sqrt(2.0) / math.pi
    )
    assert sconstants.get("friedrichs_omega") == C_F_MIXED
    assert sconstants.provenance["friedrichs_omega"].startswith("user_supplied")
    from thinbound import IncompleteConstantsError

    bare = assemble_signorini_constants(sdomain)
    with pytest.raises(IncompleteConstantsError, match="friedrichs_omega"):
        bare.get("friedrichs_omega")


def test_normal_trace_direction(sdomain):
    # q = (0, -1) points into the region through the bottom edge: q.n = +1.
    from thinbound import constant_flux

    qn = normal_trace(constant_flux(0.0, -1.0), sdomain)
    assert qn(0.3) == pytest.approx(1.0)


def test_vanishes_at_exact_solution(sdomain, sconstants, exact_data):
    u, q, lam = exact_data
    psi = zero_scalar_field()
    rep = majorant_signorini(u, q, lam, psi, sdomain, sconstants)
    assert rep.kind == "S"
    assert rep.value == 0.0
    rep_p = majorant_signorini_poincare(u, q, lam, psi, sdomain, sconstants)
    assert rep_p.value == 0.0


def test_reference_solver_matches_exact_solution(sdomain):
    u = exact_field()
    err, _ = reference_energy_error(
        u.value, sdomain, lambda X, Y: np.vectorize(u.value)(X, Y), n=49, sweeps=1500
    )
    # the discrete solution should deviate from the interpolated exact
    # solution only by the discretization error
    assert err < 0.05


def test_majorant_dominates_reference_error(sdomain, sconstants):
    delta = 0.3
    v = _perturbed(delta)
    q = flux_from_gradient(v)
    qn = normal_trace(q, sdomain)
    lam = MultiplierField(
        lambda x: max(qn(x), 0.0), sqrt_singular=True, x1_breakpoints=(0.0,)
    )
    psi = zero_scalar_field()
    rep = majorant_signorini(v, q, lam, psi, sdomain, sconstants)
    assert rep.value > 0.0

    u = exact_field()
    ref_err, _ = reference_energy_error(
        v.value, sdomain, lambda X, Y: np.vectorize(u.value)(X, Y), n=65, sweeps=2500
    )
    slack = 0.02  # reference discretization + interpolation error budget
    assert rep.value >= ref_err - slack
    # the bound is not wildly loose either for this smooth perturbation
    assert rep.value < 10.0 * ref_err

    # cross-check with the continuous energy error, which is computable
    # directly because v - u is the polynomial bump
    direct = signorini_energy_error(v, u, sdomain)
    assert abs(direct - ref_err) < slack
    assert rep.value >= direct


def test_obstacle_violation_detected(sdomain, sconstants, exact_data):
    u, q, lam = exact_data
    dipped = add_fields(u, polynomial_field(Poly2({(0, 0): -0.01})))
    with pytest.raises(NotAdmissibleError):
        majorant_signorini(dipped, q, lam, zero_scalar_field(), sdomain, sconstants)


def test_poincare_zero_mean_guard(sdomain, sconstants, exact_data):
    u, _, lam = exact_data

    def bad_div(x, y, side):
        return 1.0

    q_bad = FluxField(
        eval_fn=lambda x, y, side: np.array([x, 0.0]),
        divergence=bad_div,
        normal_jump=lambda x: 0.0,
    )
    with pytest.raises(ConditionViolationError) as exc:
        majorant_signorini_poincare(
            u, q_bad, lam, zero_scalar_field(), sdomain, sconstants
        )
    assert abs(exc.value.measured["div_mean"] - 1.0) < 1e-10


def test_poincare_congruence_with_equal_constants(sdomain):
    # q = (0, y^2/2 - y/2): div = y - 1/2 has zero mean, q.n = 0 on M.
    u = exact_field()
    lam0 = MultiplierField(lambda x: 0.0)
    q = FluxField(
        eval_fn=lambda x, y, side: np.array([0.0, 0.5 * y * y - 0.5 * y]),
        divergence=lambda x, y, side: y - 0.5,
        normal_jump=lambda x: 0.0,
    )
    psi = zero_scalar_field()
    same = {
        "friedrichs_omega": {"value": 0.37, "source": "congruence probe"},
        "poincare_omega": {"value": 0.37, "source": "congruence probe"},
    }
    cs = assemble_signorini_constants(sdomain, overrides=same)
    rep_f = majorant_signorini(u, q, lam0, psi, sdomain, cs)
    rep_p = majorant_signorini_poincare(u, q, lam0, psi, sdomain, cs)
    assert rep_f.value == pytest.approx(rep_p.value, rel=1e-12)
    assert rep_f.value > 0.0
