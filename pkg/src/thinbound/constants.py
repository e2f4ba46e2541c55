"""Inequality constants entering the majorants, with provenance tracking.

Closed forms exist for the two-triangle geometry: the Friedrichs constant of
either subdomain (with the Dirichlet condition on its two outer legs) is
a/pi, and the zero-mean Poincare constants are bounded by diam/pi on convex
subdomains (Payne-Weinberger).  Trace and zero-mean-trace constants have no
closed form here and must be supplied by the user as certified bounds; a
constant is never fabricated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import IncompleteConstantsError, InvalidParameterError

CLOSED_FORM = "closed_form"
PAYNE_WEINBERGER = "payne_weinberger"
USER_SUPPLIED = "user_supplied"

KNOWN_NAMES = (
    "friedrichs_plus",
    "friedrichs_minus",
    "trace_plus",
    "trace_minus",
    "trace_manifold",
    "poincare_plus",
    "poincare_minus",
    "poincare_manifold_plus",
    "poincare_manifold_minus",
)


@dataclass(frozen=True)
class ConstantSet:
    """Named positive constants plus per-constant provenance strings."""

    values: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)

    def has(self, name):
        return name in self.values

    def get(self, name):
        if name not in self.values:
            raise IncompleteConstantsError([name])
        return self.values[name]

    def with_overrides(self, overrides):
        vals = dict(self.values)
        prov = dict(self.provenance)
        for name, entry in overrides.items():
            value, source = _parse_override(name, entry)
            vals[name] = value
            prov[name] = f"{USER_SUPPLIED}: {source}"
        return _apply_trace_min(ConstantSet(vals, prov))

    def as_dict(self):
        return {
            name: {"value": self.values[name], "provenance": self.provenance[name]}
            for name in sorted(self.values)
        }


def _parse_override(name, entry):
    if name not in KNOWN_NAMES:
        raise InvalidParameterError(f"unknown constant name {name!r}")
    if isinstance(entry, dict):
        value = entry.get("value")
        source = entry.get("source")
    else:
        value, source = entry
    if source is None or not str(source).strip():
        raise InvalidParameterError(
            f"constant override {name!r} needs a 'source' string"
        )
    value = float(value)
    if not value > 0.0:
        raise InvalidParameterError(f"constant {name!r} must be positive, got {value}")
    return value, str(source)


def _apply_trace_min(cs):
    cands = [cs.values[n] for n in ("trace_plus", "trace_minus") if n in cs.values]
    if not cands:
        return cs
    vals = dict(cs.values)
    prov = dict(cs.provenance)
    explicit = cs.values.get("trace_manifold", math.inf)
    best = min(min(cands), explicit)
    vals["trace_manifold"] = best
    if best == explicit and "trace_manifold" in cs.provenance:
        pass
    else:
        prov["trace_manifold"] = "min of one-sided trace candidates"
    return ConstantSet(vals, prov)


def friedrichs_example_triangle(a):
    """Friedrichs constant a/pi for either base triangle (Dirichlet legs)."""
    if not a > 0.0:
        raise InvalidParameterError(f"half-width must be positive, got {a}")
    return a / math.pi


def payne_weinberger(diameter):
    """Upper bound diam/pi for the zero-mean Poincare constant (convex set)."""
    if not diameter > 0.0:
        raise InvalidParameterError(f"diameter must be positive, got {diameter}")
    return diameter / math.pi


def assemble_constants(domain, overrides=None):
    """Fill closed-form constants for the two-triangle domain, apply overrides.

    Trace and zero-mean-trace constants stay absent unless overridden; any
    majorant that actually needs one fails loudly instead of inventing it.
    """
    a = domain.a
    cf = friedrichs_example_triangle(a)
    cp = payne_weinberger(2.0 * a)  # diam of either right triangle is 2a
    values = {
        "friedrichs_plus": cf,
        "friedrichs_minus": cf,
        "poincare_plus": cp,
        "poincare_minus": cp,
    }
    provenance = {
        "friedrichs_plus": CLOSED_FORM,
        "friedrichs_minus": CLOSED_FORM,
        "poincare_plus": PAYNE_WEINBERGER,
        "poincare_minus": PAYNE_WEINBERGER,
    }
    cs = ConstantSet(values, provenance)
    if overrides:
        cs = cs.with_overrides(overrides)
    return cs
