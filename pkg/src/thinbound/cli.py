"""Command-line front end: reproduce built-in cases, certify, minimize.

Exit codes: 0 success, 2 invalid arguments or configuration, 3 evaluation
failure (including violated side conditions), 4 missing certified constant.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .constants import assemble_constants
from .errors import IncompleteConstantsError, InvalidParameterError, ThinboundError
from .fields import (
    flux_from_gradient,
    multiplier_from_jump,
    polynomial_field,
    zero_scalar_field,
)
from .fields import MultiplierField
from .geometry import MINUS, PLUS, build_domain
from .majorants import (
    QuadConfig,
    energy_error,
    majorant_M,
    majorant_M4,
    majorant_M5,
    majorant_M12,
    majorant_basic,
    minimize_majorant,
    optimal_alpha,
    optimize_betas,
    PolyFluxField,
)
from .paperbench import (
    EXAMPLE_NAMES,
    FIELD_REGISTRY,
    FLUX_CHOICES,
    exact_field,
    exact_flux,
    exact_multiplier,
    reproduce,
)
from .poly2d import Poly2
from .report import (
    build_report_file,
    render_iteration_figure,
    render_terms_figure,
    write_report,
    write_terms_csv,
)
from .signorini import (
    SignoriniDomain,
    assemble_signorini_constants,
    majorant_signorini,
    majorant_signorini_poincare,
    normal_trace,
    signorini_energy_error,
)

EXIT_OK = 0
EXIT_BAD_CONFIG = 2
EXIT_EVALUATION = 3
EXIT_MISSING_CONSTANT = 4


class ConfigError(Exception):
    """Configuration file problem; message names the offending key."""


# ---------------------------------------------------------------------------
# config interpretation


def _quad_from_dict(d):
    d = d or {}
    return QuadConfig(
        level=int(d.get("level", 3)),
        triangle_degree=int(d.get("triangle_degree", 12)),
        segment_nodes=int(d.get("segment_nodes", 16)),
        graded=bool(d.get("grading", True)),
    )


def _poly_from_rows(rows, key):
    try:
        return Poly2({(int(i), int(j)): float(c) for i, j, c in rows})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad polynomial table under {key!r}: {exc}") from exc


def _scalar_from_config(entry, a, eps, key):
    if isinstance(entry, str):
        if entry not in FIELD_REGISTRY:
            raise ConfigError(
                f"{key!r} names unknown field {entry!r}; known: "
                + ", ".join(sorted(FIELD_REGISTRY))
            )
        return FIELD_REGISTRY[entry](a, eps) if entry == "v3eps" else FIELD_REGISTRY[
            entry
        ](a)
    if isinstance(entry, dict):
        plus = _poly_from_rows(entry.get("plus", []), f"{key}.plus")
        minus = (
            _poly_from_rows(entry["minus"], f"{key}.minus")
            if "minus" in entry
            else None
        )
        return polynomial_field(plus, minus, name=key)
    raise ConfigError(f"{key!r} must be a registry name or a coefficient table")


def _flux_from_config(entry, v, key):
    if entry == "gradient_of_v":
        return flux_from_gradient(v)
    if entry == "gradient_of_u":
        return exact_flux()
    if isinstance(entry, dict):
        comps = {}
        for side, tag in ((PLUS, "plus"), (MINUS, "minus")):
            for comp, ax in ((0, "x1"), (1, "x2")):
                rows = entry.get(f"{tag}_{ax}", [])
                comps[(side, comp)] = _poly_from_rows(rows, f"{key}.{tag}_{ax}")
        return PolyFluxField(comps, name="config_flux")
    raise ConfigError(
        f"{key!r} must be gradient_of_v, gradient_of_u, or a coefficient table"
    )


def _lambda_from_config(entry, q, key):
    if entry in (None, "clip_jump"):
        return multiplier_from_jump(q)
    if entry == "exact_jump":
        return exact_multiplier()
    if isinstance(entry, dict) and "poly" in entry:
        coeffs = [float(c) for c in entry["poly"]]

        def ev(x1):
            return sum(c * x1**k for k, c in enumerate(coeffs))

        return MultiplierField(eval_fn=ev, name="config_lambda")
    raise ConfigError(f"{key!r} must be clip_jump, exact_jump, or {{'poly': [...]}}")


def _load_config(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid structured text: {exc}")


# ---------------------------------------------------------------------------
# output


def _write_outputs(out_dir, report_file, reports, iteration_values=None, floor=None):
    os.makedirs(out_dir, exist_ok=True)
    write_report(os.path.join(out_dir, "report.json"), report_file)
    write_terms_csv(os.path.join(out_dir, "terms.csv"), reports)
    if reports:
        render_terms_figure(os.path.join(out_dir, "terms.png"), reports)
    if iteration_values:
        render_iteration_figure(
            os.path.join(out_dir, "iterations.png"), iteration_values, floor
        )


# ---------------------------------------------------------------------------
# subcommands


def run_reproduce(args):
    qc = QuadConfig(
        level=args.level,
        triangle_degree=args.triangle_degree,
        segment_nodes=args.segment_nodes,
        graded=not args.no_grading,
    )
    out = reproduce(args.example, args.a, args.eps, qc=qc, flux_choice=args.flux)
    reports = out["reports"]
    diagnostics = {
        "refinement_level": qc.level,
        "element_count": 2 * 4**qc.level,
        "grading": qc.graded,
        "grading_max_depth": 40,
    }
    if args.example == "v3eps":
        eff = reports["M"].efficiency_index
        diagnostics["eps"] = args.eps
        diagnostics["efficiency_minus_one"] = eff - 1.0
    config_echo = {
        "command": "reproduce",
        "example": args.example,
        "a": args.a,
        "eps": args.eps,
        "flux": args.flux,
        "quadrature": {
            "level": qc.level,
            "triangle_degree": qc.triangle_degree,
            "segment_nodes": qc.segment_nodes,
            "grading": qc.graded,
        },
    }
    report_file = build_report_file(config_echo, reports, diagnostics)
    report_file["exact_error"] = out["exact_error"]
    _write_outputs(args.out, report_file, reports)
    return EXIT_OK


def _build_thin_obstacle_case(cfg, require_oracle=False):
    geo = cfg.get("geometry", {})
    a = float(geo.get("a", 1.0))
    eps = cfg.get("eps")
    eps = None if eps is None else float(eps)
    domain = build_domain(a)
    fields_cfg = cfg.get("fields", {})
    if "v" not in fields_cfg:
        raise ConfigError("config key 'fields.v' is required")
    v = _scalar_from_config(fields_cfg["v"], a, eps, "fields.v")
    psi = _scalar_from_config(fields_cfg.get("psi", "psi_zero"), a, eps, "fields.psi")
    oracle = None
    if "oracle" in fields_cfg:
        oracle = _scalar_from_config(fields_cfg["oracle"], a, eps, "fields.oracle")
    elif require_oracle:
        raise ConfigError("config key 'fields.oracle' is required")
    q = _flux_from_config(cfg.get("flux", "gradient_of_v"), v, "flux")
    lam = _lambda_from_config(cfg.get("lambda"), q, "lambda")
    constants = assemble_constants(domain, cfg.get("constants"))
    qc = _quad_from_dict(cfg.get("quadrature"))
    return domain, v, psi, oracle, q, lam, constants, qc


def _certify_thin_obstacle(cfg):
    domain, v, psi, oracle, q, lam, constants, qc = _build_thin_obstacle_case(cfg)
    params = cfg.get("parameters", {})
    beta1 = params.get("beta1", 1.0)
    beta2 = params.get("beta2", 1.0)
    alpha = params.get("alpha", 0.0)
    optimize = params == "optimize" or params.get("betas") == "optimize"
    kinds = cfg.get("majorant_kinds", ["M"])
    reports = {}
    for kind in kinds:
        if kind == "Basic":
            rep = majorant_basic(v, q, lam, psi, domain, constants, qc)
        elif kind == "M":
            rep = majorant_M(v, q, lam, psi, domain, constants, qc)
        elif kind == "M12":
            if optimize:
                _, _, rep = optimize_betas(
                    v, q, psi, domain, constants, "M12_with_lambda", lam, qc
                )
            else:
                rep = majorant_M12(
                    v, q, lam, psi, float(beta1), float(beta2), domain, constants, qc
                )
        elif kind == "M4":
            if optimize:
                _, _, rep = optimize_betas(v, q, psi, domain, constants, "M4", qc=qc)
            else:
                rep = majorant_M4(
                    v, q, psi, float(beta1), float(beta2), domain, constants, qc
                )
        elif kind in ("M5", "M5_partial"):
            mode = "full" if kind == "M5" else "partial"
            if alpha == "optimize":
                probe = majorant_M5(
                    v, q, lam, psi, 0.0, domain, constants, mode=mode, qc=qc
                )
                astar = optimal_alpha(
                    probe.terms["D_plus"],
                    probe.terms["D_minus"],
                    probe.terms["m_plus"],
                    probe.terms["m_minus"],
                )
                rep = majorant_M5(
                    v, q, lam, psi, astar, domain, constants, mode=mode, qc=qc
                )
            else:
                rep = majorant_M5(
                    v, q, lam, psi, float(alpha), domain, constants, mode=mode, qc=qc
                )
        else:
            raise ConfigError(f"unknown majorant kind {kind!r} in 'majorant_kinds'")
        if oracle is not None:
            rep.attach_exact_error(energy_error(v, oracle, domain, qc))
        reports[kind] = rep
    return reports, qc


def _certify_signorini(cfg):
    geo = cfg.get("geometry", {})
    rect = geo.get("rect", [-0.5, 0.5, 0.0, 1.0])
    try:
        sdomain = SignoriniDomain(*[float(t) for t in rect])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad 'geometry.rect': {exc}") from exc
    fields_cfg = cfg.get("fields", {})
    v_entry = fields_cfg.get("v", "exact_u")
    if v_entry == "exact_u":
        v = exact_field()
    else:
        v = _scalar_from_config(v_entry, 1.0, None, "fields.v")
    psi = zero_scalar_field()
    flux_entry = cfg.get("flux", "gradient_of_v")
    if flux_entry == "gradient_of_u":
        q = exact_flux()
    elif flux_entry == "gradient_of_v":
        q = flux_from_gradient(v)
    else:
        raise ConfigError("signorini 'flux' must be gradient_of_v or gradient_of_u")
    lam_entry = cfg.get("lambda", "clip_normal_trace")
    if lam_entry == "clip_normal_trace":
        qn = normal_trace(q, sdomain)
        lam = MultiplierField(
            eval_fn=lambda x: max(qn(x), 0.0),
            sqrt_singular=getattr(q, "jump_singular", False),
            x1_breakpoints=(0.0,),
            name="clip_normal_trace",
        )
    else:
        lam = _lambda_from_config(lam_entry, q, "lambda")
    constants = assemble_signorini_constants(sdomain, cfg.get("constants"))
    kinds = cfg.get("majorant_kinds", ["S"])
    reports = {}
    for kind in kinds:
        if kind == "S":
            rep = majorant_signorini(v, q, lam, psi, sdomain, constants)
        elif kind == "S_poincare":
            rep = majorant_signorini_poincare(v, q, lam, psi, sdomain, constants)
        else:
            raise ConfigError(f"unknown signorini majorant kind {kind!r}")
        oracle_entry = fields_cfg.get("oracle")
        if oracle_entry == "exact_u":
            rep.attach_exact_error(
                signorini_energy_error(v, exact_field(), sdomain)
            )
        reports[kind] = rep
    return reports


def run_certify(args):
    cfg = _load_config(args.config)
    problem = cfg.get("problem_type", "thin_obstacle")
    if problem == "thin_obstacle":
        reports, qc = _certify_thin_obstacle(cfg)
        diagnostics = {
            "refinement_level": qc.level,
            "element_count": 2 * 4**qc.level,
        }
    elif problem == "signorini":
        reports = _certify_signorini(cfg)
        diagnostics = {}
    else:
        raise ConfigError(f"unknown problem_type {cfg.get('problem_type')!r}")
    report_file = build_report_file(
        {"command": "certify", **cfg}, reports, diagnostics
    )
    _write_outputs(args.out, report_file, reports)
    return EXIT_OK


def run_minimize(args):
    cfg = _load_config(args.config)
    if cfg.get("problem_type", "thin_obstacle") != "thin_obstacle":
        raise ConfigError("minimize supports problem_type 'thin_obstacle' only")
    domain, v, psi, oracle, q0, _, constants, qc = _build_thin_obstacle_case(cfg)
    if args.iterations < 1:
        raise ConfigError("--iterations must be >= 1")
    degree = int(cfg.get("flux_degree", 2))
    q, lam, rep = minimize_majorant(
        v, q0, psi, domain, constants, args.iterations, qc=qc, flux_degree=degree
    )
    err = None
    if oracle is not None:
        err = energy_error(v, oracle, domain, qc)
        rep.attach_exact_error(err)
    reports = {"M4": rep}
    report_file = build_report_file(
        {"command": "minimize", "iterations": args.iterations, **cfg},
        reports,
        {"iteration_values": list(rep.iteration_values)},
    )
    _write_outputs(
        args.out, report_file, reports, iteration_values=rep.iteration_values, floor=err
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    parser = argparse.ArgumentParser(
        prog="thinbound",
        description="Guaranteed energy-norm error bounds for thin obstacle problems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    rep = sub.add_parser("reproduce", help="run one built-in benchmark case")
    rep.add_argument("--example", required=True, choices=EXAMPLE_NAMES)
    rep.add_argument("--a", type=float, default=1.0)
    rep.add_argument("--eps", type=float, default=None)
    rep.add_argument("--flux", choices=FLUX_CHOICES, default="gradient_of_v")
    rep.add_argument("--out", default=".")
    for p in (rep,):
        p.add_argument("--level", type=int, default=3)
        p.add_argument("--triangle-degree", type=int, default=12)
        p.add_argument("--segment-nodes", type=int, default=16)
        p.add_argument("--no-grading", action="store_true")
    rep.set_defaults(func=run_reproduce)

    cert = sub.add_parser("certify", help="evaluate majorants for a config file")
    cert.add_argument("--config", required=True)
    cert.add_argument("--out", default=".")
    cert.set_defaults(func=run_certify)

    mini = sub.add_parser("minimize", help="run the majorant minimization loop")
    mini.add_argument("--config", required=True)
    mini.add_argument("--iterations", type=int, required=True)
    mini.add_argument("--out", default=".")
    mini.set_defaults(func=run_minimize)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InvalidParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except IncompleteConstantsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISSING_CONSTANT
    except ThinboundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EVALUATION


if __name__ == "__main__":
    sys.exit(main())
