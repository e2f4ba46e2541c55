"""Shared fixtures for the test suite.

The trace-constant override used throughout is a certified (non-sharp) bound.
For a function w that vanishes on the outer boundary of either subdomain,

    ||w||_M^2 = -2 * int_{Omega+} w * d2(w)  <=  2 ||w|| ||grad w||
             <=  2 * (a/pi) * ||grad w||^2,

using the subdomain Friedrichs inequality, so  C_Tr <= sqrt(2 a / pi).
"""

import math

import numpy as np
import pytest

from thinbound import (
    assemble_constants,
    build_domain,
    build_example,
    exact_field,
    exact_flux,
    exact_multiplier,
    zero_scalar_field,
)


def certified_trace_value(a):
    return math.sqrt(2.0 * a / math.pi)


def certified_overrides(a):
    return {
        "trace_manifold": {
            "value": certified_trace_value(a),
            "source": "bound sqrt(2*a/pi) from Cauchy-Schwarz and the "
            "subdomain Friedrichs inequality",
        }
    }


@pytest.fixture(scope="session")
def domain():
    return build_domain(1.0)


@pytest.fixture(scope="session")
def constants(domain):
    return assemble_constants(domain, overrides=certified_overrides(1.0))


@pytest.fixture(scope="session")
def psi():
    return zero_scalar_field()


@pytest.fixture(scope="session")
def exact_triple():
    return exact_field(), exact_flux(), exact_multiplier()


@pytest.fixture(scope="session")
def case_v1():
    return build_example("v1")


@pytest.fixture(scope="session")
def case_v2():
    return build_example("v2")


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260826)
