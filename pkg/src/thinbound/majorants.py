"""Guaranteed upper bounds on the energy-norm distance to the minimizer.

Implements the plain equilibrated-flux bound, the advanced bound for fluxes
with per-subdomain divergence, its squared two-parameter form, the form with
the multiplier eliminated in closed form, the Poincare-type bound with the
alpha-split interface bracket (full and partially-equilibrated modes), the
closed-form optimal multiplier and alpha, golden-section tuning of the two
Young parameters, and the coordinate-descent majorant minimization loop.

Report kinds: Basic, M, M12, M4, M5, M5_partial (M12 = squared two-parameter
form; M4 = multiplier-free form; M5_partial = the variant where only the
interface mean condition holds and Friedrichs constants replace the volume
Poincare constants).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .constants import ConstantSet
from .errors import (
    ConditionViolationError,
    InternalDefectError,
    InvalidParameterError,
    NotAdmissibleError,
    NotEquilibratedError,
)
from .fields import FluxField, MultiplierField
from .geometry import MINUS, PLUS, triangulate
from .poly2d import Poly2
from .quadrature import (
    integrate_domain,
    integrate_segment,
    pairwise_sum,
    segment_rule,
    triangle_rule,
)

EQUILIBRATION_TOL = 1e-10
ZERO_MEAN_TOL = 1e-10
RESIDUAL_SKIP_TOL = 1e-13
OBSTACLE_TOL = 1e-10


@dataclass(frozen=True)
class QuadConfig:
    """Quadrature controls shared by all majorant evaluations."""

    level: int = 3
    triangle_degree: int = 12
    segment_nodes: int = 16
    graded: bool = True

    def tri_rule(self):
        return triangle_rule(self.triangle_degree)

    def seg_rule(self):
        return segment_rule(self.segment_nodes)


DEFAULT_QUAD = QuadConfig()


@dataclass
class MajorantReport:
    """One evaluated bound: its value, term breakdown and provenance."""

    kind: str
    value: float
    terms: dict
    parameters: dict = dc_field(default_factory=dict)
    constants_used: ConstantSet = None
    exact_error: float = None
    efficiency_index: float = None
    iteration_values: tuple = ()
    notes: str = ""

    def attach_exact_error(self, err):
        self.exact_error = float(err)
        if err > 0.0:
            self.efficiency_index = self.value / err
        return self


# ---------------------------------------------------------------------------
# quadrature helpers


def _breaks(*objs):
    out = set()
    for o in objs:
        out.update(getattr(o, "x1_breakpoints", ()))
    return tuple(sorted(out))


def _domain_l2sq(integrand, domain, qc, side=None, breakpoints=()):
    val = integrate_domain(
        integrand,
        domain,
        qc.level,
        rule=qc.tri_rule(),
        graded_at_origin=qc.graded,
        side=side,
        x1_breakpoints=breakpoints,
    )
    return max(val, 0.0)


def manifold_integral(g, domain, qc, breakpoints=(), sqrt_neg=False):
    """Integrate g over the whole interface, regularizing sqrt pieces."""
    a = domain.a
    cuts = {-a, a}
    cuts.update(b for b in breakpoints if -a < b < a)
    if sqrt_neg:
        cuts.add(0.0)
    cuts = sorted(cuts)
    rule = qc.seg_rule()
    vals = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        w = "sqrt_negative_x1" if (sqrt_neg and hi <= 0.0) else "none"
        vals.append(integrate_segment(g, (lo, hi), rule, weight=w))
    return pairwise_sum(vals)


def manifold_nodes(domain, qc, breakpoints=(), sqrt_neg=False):
    """Quadrature nodes/weights on M with any substitution jacobian folded in."""
    a = domain.a
    cuts = {-a, a}
    cuts.update(b for b in breakpoints if -a < b < a)
    if sqrt_neg:
        cuts.add(0.0)
    cuts = sorted(cuts)
    rule = qc.seg_rule()
    xs, ws = [], []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        if sqrt_neg and hi <= 0.0:
            t_lo, t_hi = math.sqrt(-hi), math.sqrt(-lo)
            mid, half = 0.5 * (t_lo + t_hi), 0.5 * (t_hi - t_lo)
            for t, w in zip(rule.points, rule.weights):
                s = mid + half * t
                xs.append(-s * s)
                ws.append(half * w * 2.0 * s)
        else:
            mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
            for t, w in zip(rule.points, rule.weights):
                xs.append(mid + half * t)
                ws.append(half * w)
    return np.array(xs), np.array(ws)


# ---------------------------------------------------------------------------
# term computations


def flux_misfit(v, q, domain, qc=DEFAULT_QUAD):
    """The L2 norm of grad(v) - q over the whole domain."""

    def integrand(x1, x2, side):
        d = v.gradient(x1, x2, side) - q.eval(x1, x2, side)
        return d[0] * d[0] + d[1] * d[1]

    return math.sqrt(_domain_l2sq(integrand, domain, qc, breakpoints=_breaks(v, q)))


def divergence_residual(q, domain, side, qc=DEFAULT_QUAD):
    def integrand(x1, x2, s):
        d = q.divergence(x1, x2, s)
        return d * d

    return math.sqrt(
        _domain_l2sq(integrand, domain, qc, side=side, breakpoints=_breaks(q))
    )


def jump_residual(lam, q, domain, qc=DEFAULT_QUAD):
    def g(x1):
        d = lam.eval(x1) - q.normal_jump(x1)
        return d * d

    val = manifold_integral(
        g,
        domain,
        qc,
        breakpoints=_breaks(lam, q),
        sqrt_neg=lam.sqrt_singular or q.jump_singular,
    )
    return math.sqrt(max(val, 0.0))


def manifold_pairing(v, lam, psi, domain, qc=DEFAULT_QUAD):
    """The interface duality term: integral of lambda * (v - psi) over M."""

    def g(x1):
        return lam.eval(x1) * (v.trace(x1) - psi.trace(x1))

    val = manifold_integral(
        g, domain, qc, breakpoints=_breaks(v, lam, psi), sqrt_neg=lam.sqrt_singular
    )
    if val < -1e-12:
        raise NotAdmissibleError(
            f"interface pairing is negative ({val}); lambda or v-psi leaves its cone"
        )
    return max(val, 0.0)


def energy_error(v, u, domain, qc=DEFAULT_QUAD):
    """Energy-norm distance between two fields, by (graded) quadrature."""

    def integrand(x1, x2, side):
        d = v.gradient(x1, x2, side) - u.gradient(x1, x2, side)
        return d[0] * d[0] + d[1] * d[1]

    return math.sqrt(_domain_l2sq(integrand, domain, qc, breakpoints=_breaks(v, u)))


def _check_obstacle(v, psi, domain, n=1025):
    xs = np.linspace(-domain.a, domain.a, n)
    gap = min(v.trace(x) - psi.trace(x) for x in xs)
    if gap < -OBSTACLE_TOL:
        raise NotAdmissibleError(
            f"approximation dips {-gap:.3e} below the obstacle on the interface"
        )


def _check_multiplier(lam, domain, n=1025):
    xs = np.linspace(-domain.a, domain.a, n)
    low = min(lam.eval(x) for x in xs)
    if low < -1e-12:
        raise NotAdmissibleError(f"multiplier is negative ({low:.3e}) on the interface")


def c_beta(beta1, beta2):
    if not (beta1 > 0.0 and beta2 > 0.0):
        raise InvalidParameterError("Young parameters must be strictly positive")
    return beta1 * beta2 / ((1.0 + beta1) * (1.0 + beta2))


# ---------------------------------------------------------------------------
# majorants


def majorant_basic(v, y, lam, psi, domain, constants=None, qc=DEFAULT_QUAD):
    """Bound for an equilibrated flux: value^2 = misfit^2 + 2 * pairing.

    The flux must be divergence free per subdomain with normal jump equal to
    the multiplier, up to the documented residual tolerance.
    """
    _check_obstacle(v, psi, domain)
    _check_multiplier(lam, domain)
    div_p = divergence_residual(y, domain, PLUS, qc)
    div_m = divergence_residual(y, domain, MINUS, qc)
    jr = jump_residual(lam, y, domain, qc)
    worst = max(div_p, div_m, jr)
    if worst > EQUILIBRATION_TOL:
        raise NotEquilibratedError(
            f"flux is not equilibrated (residuals div+={div_p:.3e}, "
            f"div-={div_m:.3e}, jump={jr:.3e}); use the advanced majorant"
        )
    fm = flux_misfit(v, y, domain, qc)
    pairing = manifold_pairing(v, lam, psi, domain, qc)
    value = math.sqrt(fm * fm + 2.0 * pairing)
    return MajorantReport(
        kind="Basic",
        value=value,
        terms={"flux_misfit": fm, "manifold_pairing": pairing},
        constants_used=constants,
    )


def _advanced_terms(v, q, lam, psi, domain, qc):
    return {
        "flux_misfit": flux_misfit(v, q, domain, qc),
        "manifold_pairing": manifold_pairing(v, lam, psi, domain, qc),
        "divergence_residual_plus": divergence_residual(q, domain, PLUS, qc),
        "divergence_residual_minus": divergence_residual(q, domain, MINUS, qc),
        "jump_residual": jump_residual(lam, q, domain, qc),
    }


def majorant_M(v, q, lam, psi, domain, constants, qc=DEFAULT_QUAD):
    """First advanced bound: sum of misfit, pairing and weighted residuals."""
    _check_obstacle(v, psi, domain)
    _check_multiplier(lam, domain)
    t = _advanced_terms(v, q, lam, psi, domain, qc)
    value = (
        t["flux_misfit"]
        + math.sqrt(2.0 * t["manifold_pairing"])
        + constants.get("friedrichs_plus") * t["divergence_residual_plus"]
        + constants.get("friedrichs_minus") * t["divergence_residual_minus"]
    )
    if t["jump_residual"] > RESIDUAL_SKIP_TOL:
        value += constants.get("trace_manifold") * t["jump_residual"]
    return MajorantReport(kind="M", value=value, terms=t, constants_used=constants)


def majorant_M12(
    v, q, lam, psi, beta1, beta2, domain, constants, qc=DEFAULT_QUAD
):
    """Squared two-parameter bound: value^2 = quadratic part + interface part."""
    _check_obstacle(v, psi, domain)
    _check_multiplier(lam, domain)
    t = _advanced_terms(v, q, lam, psi, domain, qc)
    cb1 = 1.0 / c_beta(beta1, beta2)  # validates the betas
    div_combo = (
        constants.get("friedrichs_plus") * t["divergence_residual_plus"]
        + constants.get("friedrichs_minus") * t["divergence_residual_minus"]
    )
    m1 = (1.0 + beta1) * t["flux_misfit"] ** 2
    m1 += (1.0 + 1.0 / beta1) * (1.0 + beta2) * div_combo**2
    m2 = 2.0 * t["manifold_pairing"]
    if t["jump_residual"] > RESIDUAL_SKIP_TOL:
        m2 += cb1 * constants.get("trace_manifold") ** 2 * t["jump_residual"] ** 2
    t["quadratic_part"] = m1
    t["interface_part"] = m2
    return MajorantReport(
        kind="M12",
        value=math.sqrt(m1 + m2),
        terms=t,
        parameters={"beta1": beta1, "beta2": beta2},
        constants_used=constants,
    )


def optimal_lambda(v, q, psi, beta1, beta2, constants):
    """Closed-form minimizer of the interface part over the multiplier cone."""
    kappa = c_beta(beta1, beta2) / constants.get("trace_manifold") ** 2

    def lam(x1):
        return max(q.normal_jump(x1) - kappa * (v.trace(x1) - psi.trace(x1)), 0.0)

    return MultiplierField(
        eval_fn=lam,
        sqrt_singular=q.jump_singular,
        x1_breakpoints=_breaks(v, q, psi) + (0.0,),
        name="optimal_lambda",
    )


def _rho(jump, gap, kappa, trace_sq_over_c):
    if jump >= kappa * gap:
        return gap * (2.0 * jump - kappa * gap)
    return trace_sq_over_c * jump * jump


def majorant_M4(v, q, psi, beta1, beta2, domain, constants, qc=DEFAULT_QUAD):
    """Multiplier-free bound: the interface part is integrated in closed form."""
    _check_obstacle(v, psi, domain)
    cb = c_beta(beta1, beta2)
    c_tr_sq = constants.get("trace_manifold") ** 2
    kappa = cb / c_tr_sq
    fm = flux_misfit(v, q, domain, qc)
    div_p = divergence_residual(q, domain, PLUS, qc)
    div_m = divergence_residual(q, domain, MINUS, qc)
    div_combo = (
        constants.get("friedrichs_plus") * div_p
        + constants.get("friedrichs_minus") * div_m
    )
    m1 = (1.0 + beta1) * fm * fm
    m1 += (1.0 + 1.0 / beta1) * (1.0 + beta2) * div_combo**2

    def g(x1):
        return _rho(
            q.normal_jump(x1), v.trace(x1) - psi.trace(x1), kappa, c_tr_sq / cb
        )

    m3 = manifold_integral(
        g, domain, qc, breakpoints=_breaks(v, q, psi), sqrt_neg=q.jump_singular
    )
    m3 = max(m3, 0.0)
    terms = {
        "flux_misfit": fm,
        "divergence_residual_plus": div_p,
        "divergence_residual_minus": div_m,
        "quadratic_part": m1,
        "rho_integral": m3,
    }
    return MajorantReport(
        kind="M4",
        value=math.sqrt(m1 + m3),
        terms=terms,
        parameters={"beta1": beta1, "beta2": beta2},
        constants_used=constants,
    )


def majorant_M5(
    v, q, lam, psi, alpha, domain, constants, mode="full", qc=DEFAULT_QUAD
):
    """Poincare-type bound with the alpha-weighted interface bracket.

    Full mode requires both zero-mean conditions; partial mode requires only
    the interface one and swaps the volume Poincare constants for Friedrichs
    constants.
    """
    if not 0.0 <= alpha <= 1.0:
        raise InvalidParameterError(f"alpha must lie in [0, 1], got {alpha}")
    if mode not in ("full", "partial"):
        raise InvalidParameterError(f"unknown majorant mode {mode!r}")
    _check_obstacle(v, psi, domain)
    _check_multiplier(lam, domain)

    def gap(x1):
        return lam.eval(x1) - q.normal_jump(x1)

    mean_gap = manifold_integral(
        gap,
        domain,
        qc,
        breakpoints=_breaks(lam, q),
        sqrt_neg=lam.sqrt_singular or q.jump_singular,
    )
    measured = {"interface_mean": mean_gap}
    if mode == "full":
        for side, key in ((PLUS, "div_mean_plus"), (MINUS, "div_mean_minus")):
            measured[key] = integrate_domain(
                q.divergence,
                domain,
                qc.level,
                rule=qc.tri_rule(),
                graded_at_origin=qc.graded,
                side=side,
                x1_breakpoints=_breaks(q),
            )
    bad = {k: m for k, m in measured.items() if abs(m) > ZERO_MEAN_TOL}
    if bad:
        raise ConditionViolationError("zero-mean condition violated", measured)

    t = _advanced_terms(v, q, lam, psi, domain, qc)
    if mode == "full":
        dp = constants.get("poincare_plus") * t["divergence_residual_plus"]
        dm = constants.get("poincare_minus") * t["divergence_residual_minus"]
    else:
        dp = constants.get("friedrichs_plus") * t["divergence_residual_plus"]
        dm = constants.get("friedrichs_minus") * t["divergence_residual_minus"]
    if t["jump_residual"] > RESIDUAL_SKIP_TOL:
        mp = constants.get("poincare_manifold_plus") * t["jump_residual"]
        mm = constants.get("poincare_manifold_minus") * t["jump_residual"]
    else:
        mp = mm = 0.0
    bracket = math.sqrt((dm + alpha * mm) ** 2 + (dp + (1.0 - alpha) * mp) ** 2)
    t["D_plus"] = dp
    t["D_minus"] = dm
    t["m_plus"] = mp
    t["m_minus"] = mm
    t["bracket"] = bracket
    value = t["flux_misfit"] + math.sqrt(2.0 * t["manifold_pairing"]) + bracket
    return MajorantReport(
        kind="M5" if mode == "full" else "M5_partial",
        value=value,
        terms=t,
        parameters={"alpha": alpha},
        constants_used=constants,
    )


def optimal_alpha(d_plus, d_minus, m_plus, m_minus):
    """Minimizer of the interface bracket over alpha in [0, 1]."""
    denom = m_plus * m_plus + m_minus * m_minus
    if denom == 0.0:
        return 0.0
    a_bar = (m_plus * m_plus + d_plus * m_plus - d_minus * m_minus) / denom
    return min(1.0, max(0.0, a_bar))


# ---------------------------------------------------------------------------
# parameter optimization

_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
_BETA_LOG_RANGE = (-4.0, 4.0)
_BETA_SWEEPS = 3
_BETA_LINE_EVALS = 60


def _golden_section(fun, lo, hi, evals):
    x1 = hi - _INV_GOLDEN * (hi - lo)
    x2 = lo + _INV_GOLDEN * (hi - lo)
    f1, f2 = fun(x1), fun(x2)
    for _ in range(evals - 2):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_GOLDEN * (hi - lo)
            f1 = fun(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_GOLDEN * (hi - lo)
            f2 = fun(x2)
    return (x1, f1) if f1 <= f2 else (x2, f2)


def _beta_objective(v, q, psi, domain, constants, kind, lam, qc):
    """Precompute all beta-independent integrals; return a cheap objective."""
    fm = flux_misfit(v, q, domain, qc)
    div_combo = (
        constants.get("friedrichs_plus") * divergence_residual(q, domain, PLUS, qc)
        + constants.get("friedrichs_minus")
        * divergence_residual(q, domain, MINUS, qc)
    )
    c_tr_sq = constants.get("trace_manifold") ** 2
    if kind == "M4":
        xs, ws = manifold_nodes(
            domain, qc, breakpoints=_breaks(v, q, psi), sqrt_neg=q.jump_singular
        )
        jumps = np.array([q.normal_jump(x) for x in xs])
        gaps = np.array([v.trace(x) - psi.trace(x) for x in xs])

        def interface_part(b1, b2):
            cb = c_beta(b1, b2)
            kappa = cb / c_tr_sq
            rho = np.where(
                jumps >= kappa * gaps,
                gaps * (2.0 * jumps - kappa * gaps),
                (c_tr_sq / cb) * jumps * jumps,
            )
            return max(float(ws @ rho), 0.0)

    elif kind == "M12_with_lambda":
        jr = jump_residual(lam, q, domain, qc)
        pairing = manifold_pairing(v, lam, psi, domain, qc)

        def interface_part(b1, b2):
            part = 2.0 * pairing
            if jr > RESIDUAL_SKIP_TOL:
                part += c_tr_sq * jr * jr / c_beta(b1, b2)
            return part

    else:
        raise InvalidParameterError(f"unknown beta-optimization kind {kind!r}")

    def objective(b1, b2):
        m1 = (1.0 + b1) * fm * fm
        m1 += (1.0 + 1.0 / b1) * (1.0 + b2) * div_combo**2
        return math.sqrt(m1 + interface_part(b1, b2))

    return objective


def optimize_betas(
    v, q, psi, domain, constants, kind="M4", lam=None, qc=DEFAULT_QUAD
):
    """Alternating golden-section search for the two Young parameters.

    Searches log10(beta) on [-4, 4], three sweeps of 60 evaluations per line;
    the result never exceeds the beta1 = beta2 = 1 value.
    """
    if kind == "M12_with_lambda" and lam is None:
        raise InvalidParameterError("M12_with_lambda optimization needs a multiplier")
    objective = _beta_objective(v, q, psi, domain, constants, kind, lam, qc)
    lo, hi = _BETA_LOG_RANGE
    best = (1.0, 1.0)
    best_val = objective(1.0, 1.0)
    b1, b2 = best
    for _ in range(_BETA_SWEEPS):
        lb1, _v1 = _golden_section(
            lambda t: objective(10.0**t, b2), lo, hi, _BETA_LINE_EVALS
        )
        b1 = 10.0**lb1
        lb2, v2 = _golden_section(
            lambda t: objective(b1, 10.0**t), lo, hi, _BETA_LINE_EVALS
        )
        b2 = 10.0**lb2
        if v2 < best_val:
            best, best_val = (b1, b2), v2
    b1, b2 = best
    if kind == "M4":
        report = majorant_M4(v, q, psi, b1, b2, domain, constants, qc)
    else:
        report = majorant_M12(v, q, lam, psi, b1, b2, domain, constants, qc)
    return b1, b2, report


# ---------------------------------------------------------------------------
# flux optimization


class PolyFluxField(FluxField):
    """Per-subdomain polynomial vector field used by the minimization loop."""

    def __init__(self, components, name=None):
        # components: {(side, comp): Poly2}
        self.components = components
        divs = {
            side: components[(side, 0)].dx1() + components[(side, 1)].dx2()
            for side in (PLUS, MINUS)
        }
        jump_poly = components[(MINUS, 1)] - components[(PLUS, 1)]

        def eval_fn(x1, x2, side):
            s = side if x2 == 0.0 else (PLUS if x2 > 0.0 else MINUS)
            return np.array(
                [self.components[(s, 0)](x1, x2), self.components[(s, 1)](x1, x2)]
            )

        def divergence(x1, x2, side):
            s = side if x2 == 0.0 else (PLUS if x2 > 0.0 else MINUS)
            return divs[s](x1, x2)

        super().__init__(
            eval_fn=eval_fn,
            divergence=divergence,
            normal_jump=lambda x1: jump_poly(x1, 0.0),
            jump_singular=False,
            name=name,
        )


def _flux_basis(degree):
    monomials = [
        (i, j) for total in range(degree + 1) for i in range(total + 1)
        for j in [total - i]
    ]
    return [
        (side, comp, ij)
        for side in (PLUS, MINUS)
        for comp in (0, 1)
        for ij in monomials
    ]


def _flux_lsq_step(v, lam, beta1, beta2, domain, constants, qc, degree):
    """One least-squares update of the polynomial flux.

    Minimizes the quadratic surrogate of the squared majorant: the misfit
    and jump terms verbatim, and the divergence bracket through the standard
    (x + y)^2 <= 2 x^2 + 2 y^2 split that makes it separable per subdomain.
    """
    basis = _flux_basis(degree)
    nb = len(basis)
    A = np.zeros((nb, nb))
    rhs = np.zeros(nb)
    w_mis = 1.0 + beta1
    w_div = 2.0 * (1.0 + 1.0 / beta1) * (1.0 + beta2)
    w_jmp = (1.0 + 1.0 / beta1) * (1.0 + 1.0 / beta2) * constants.get(
        "trace_manifold"
    ) ** 2
    cf = {PLUS: constants.get("friedrichs_plus"), MINUS: constants.get(
        "friedrichs_minus"
    )}

    mesh = triangulate(domain, qc.level)
    rule = qc.tri_rule()
    for side in (PLUS, MINUS):
        pts = []
        wts = []
        for tri, s in mesh.elements:
            if s != side:
                continue
            v0, e1, e2 = tri[0], tri[1] - tri[0], tri[2] - tri[0]
            jac = abs(e1[0] * e2[1] - e1[1] * e2[0])
            for (xi, eta), w in zip(rule.points, rule.weights):
                pts.append(v0 + xi * e1 + eta * e2)
                wts.append(jac * w)
        pts = np.array(pts)
        wts = np.array(wts)
        x, y = pts[:, 0], pts[:, 1]
        idx = [k for k, (s, _, _) in enumerate(basis) if s == side]
        phi = np.zeros((len(pts), len(idx), 2))
        dphi = np.zeros((len(pts), len(idx)))
        for col, k in enumerate(idx):
            _, comp, (i, j) = basis[k]
            mono = x**i * y**j
            phi[:, col, comp] = mono
            if comp == 0 and i > 0:
                dphi[:, col] = i * x ** (i - 1) * y**j
            elif comp == 1 and j > 0:
                dphi[:, col] = j * x**i * y ** (j - 1)
        grad_v = np.array([v.gradient(px, py, side) for px, py in pts])
        for c in (0, 1):
            A[np.ix_(idx, idx)] += w_mis * (
                phi[:, :, c].T @ (wts[:, None] * phi[:, :, c])
            )
            rhs[idx] += w_mis * (phi[:, :, c].T @ (wts * grad_v[:, c]))
        A[np.ix_(idx, idx)] += w_div * cf[side] ** 2 * (
            dphi.T @ (wts[:, None] * dphi)
        )

    xs, ws = manifold_nodes(
        domain, qc, breakpoints=_breaks(v, lam), sqrt_neg=lam.sqrt_singular
    )
    jphi = np.zeros((len(xs), nb))
    for k, (side, comp, (i, j)) in enumerate(basis):
        if comp != 1 or j != 0:
            continue
        # jump trace: minus-side x2-component enters with +, plus-side with -
        jphi[:, k] = (1.0 if side == MINUS else -1.0) * xs**i
    lam_vals = np.array([lam.eval(x) for x in xs])
    A += w_jmp * (jphi.T @ (ws[:, None] * jphi))
    rhs += w_jmp * (jphi.T @ (ws * lam_vals))

    A += 1e-12 * np.trace(A) / nb * np.eye(nb)
    coef = np.linalg.solve(A, rhs)
    components = {}
    for side in (PLUS, MINUS):
        for comp in (0, 1):
            poly = Poly2()
            for k, (s, c, ij) in enumerate(basis):
                if s == side and c == comp:
                    poly = poly + Poly2({ij: coef[k]})
            components[(side, comp)] = poly
    return PolyFluxField(components, name=f"poly_flux_deg{degree}")


def minimize_majorant(
    v,
    q0,
    psi,
    domain,
    constants,
    iterations,
    qc=DEFAULT_QUAD,
    flux_degree=2,
):
    """Coordinate descent on the multiplier-free bound.

    Each iteration refreshes the closed-form multiplier, retunes the Young
    parameters, then proposes a polynomial flux from the least-squares step,
    accepted only if the fully evaluated bound does not increase.  The value
    sequence is guaranteed non-increasing.
    """
    if iterations < 1:
        raise InvalidParameterError("need at least one iteration")
    beta1 = beta2 = 1.0
    q = q0
    report = majorant_M4(v, q, psi, beta1, beta2, domain, constants, qc)
    value = report.value
    history = [value]
    for _ in range(iterations):
        # flux step at the current (moderate) betas, then retune the betas;
        # each proposal is accepted only if the fully evaluated bound agrees
        lam = optimal_lambda(v, q, psi, beta1, beta2, constants)
        q_new = _flux_lsq_step(
            v, lam, beta1, beta2, domain, constants, qc, flux_degree
        )
        cand = majorant_M4(v, q_new, psi, beta1, beta2, domain, constants, qc)
        if cand.value <= value:
            q = q_new
            report = cand
            value = cand.value
        b1_new, b2_new, cand_b = optimize_betas(
            v, q, psi, domain, constants, kind="M4", qc=qc
        )
        if cand_b.value <= value:
            beta1, beta2 = b1_new, b2_new
            report = cand_b
            value = cand_b.value
        if value > history[-1] + 1e-12 * max(1.0, history[-1]):
            raise InternalDefectError(
                f"majorant increased during descent: {history[-1]} -> {value}"
            )
        history.append(value)
    lam = optimal_lambda(v, q, psi, beta1, beta2, constants)
    report.iteration_values = tuple(history)
    report.parameters = {"beta1": beta1, "beta2": beta2}
    return q, lam, report
