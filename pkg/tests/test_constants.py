"""Constant bookkeeping: closed forms, overrides, provenance, hard failures."""

import math

import pytest

from thinbound import ConstantSet, assemble_constants, build_domain
from thinbound.errors import IncompleteConstantsError, InvalidParameterError
from thinbound.constants import friedrichs_example_triangle, payne_weinberger


def test_closed_form_values():
    for a in (0.5, 1.0, 2.0):
        cs = assemble_constants(build_domain(a))
        assert cs.get("friedrichs_plus") == pytest.approx(a / math.pi)
        assert cs.get("friedrichs_minus") == pytest.approx(a / math.pi)
        # diameter of either right triangle is 2a
        assert cs.get("poincare_plus") == pytest.approx(2.0 * a / math.pi)
        assert cs.get("poincare_minus") == pytest.approx(2.0 * a / math.pi)


def test_trace_constants_are_never_invented():
    cs = assemble_constants(build_domain(1.0))
    for name in ("trace_manifold", "trace_plus", "trace_minus"):
        assert not cs.has(name)
    with pytest.raises(IncompleteConstantsError) as exc:
        cs.get("trace_manifold")
    assert "trace_manifold" in str(exc.value)


def test_override_requires_source():
    dom = build_domain(1.0)
    with pytest.raises(InvalidParameterError, match="source"):
        assemble_constants(dom, overrides={"trace_manifold": {"value": 0.8}})
    with pytest.raises(InvalidParameterError, match="positive"):
        assemble_constants(
            dom, overrides={"trace_manifold": {"value": -1.0, "source": "x"}}
        )
    with pytest.raises(InvalidParameterError, match="unknown"):
        assemble_constants(
            dom, overrides={"not_a_constant": {"value": 1.0, "source": "x"}}
        )


def test_override_provenance_recorded():
    cs = assemble_constants(
        build_domain(1.0),
        overrides={"trace_manifold": {"value": 0.799, "source": "desk estimate"}},
    )
    assert cs.get("trace_manifold") == 0.799
    assert cs.provenance["trace_manifold"] == "user_supplied: desk estimate"
    assert "closed_form" in cs.provenance["friedrichs_plus"]


def test_one_sided_trace_minimum_rule():
    cs = assemble_constants(
        build_domain(1.0),
        overrides={
            "trace_plus": {"value": 0.9, "source": "upper side estimate"},
            "trace_minus": {"value": 0.7, "source": "lower side estimate"},
        },
    )
    assert cs.get("trace_manifold") == pytest.approx(0.7)
    # an explicit sharper interface value wins over the one-sided minimum
    cs2 = assemble_constants(
        build_domain(1.0),
        overrides={
            "trace_plus": {"value": 0.9, "source": "upper side estimate"},
            "trace_manifold": {"value": 0.5, "source": "direct estimate"},
        },
    )
    assert cs2.get("trace_manifold") == pytest.approx(0.5)


def test_helper_validation():
    with pytest.raises(InvalidParameterError):
        friedrichs_example_triangle(0.0)
    with pytest.raises(InvalidParameterError):
        payne_weinberger(-2.0)


def test_as_dict_is_sorted_and_complete():
    cs = assemble_constants(build_domain(1.0))
    d = cs.as_dict()
    assert list(d) == sorted(d)
    for entry in d.values():
        assert set(entry) == {"value", "provenance"}


def test_missing_constant_error_lists_all_names():
    err = IncompleteConstantsError(["trace_manifold", "poincare_manifold"])
    msg = str(err)
    assert "trace_manifold" in msg and "poincare_manifold" in msg
