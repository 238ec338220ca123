from fractions import Fraction

import pytest

from afrkit.flex import FlexResource, ResourceSet, individual_polytope
from afrkit.fme import (
    GuardExceeded,
    aggregate_projection_oracle,
    classify,
    eliminate,
    prune_redundant,
    to_le,
)
from afrkit.linear import LinearSystem, ge, le, system_equivalent

from conftest import sink_resource, two_step_pair, unit_resource


def le_sys(variables, *rows):
    return to_le(LinearSystem(variables, rows))


def test_classify():
    s = le_sys(("x", "y"), ge({"y": 1, "x": -1}, 0), le({"y": 1}, 1))
    part = classify(s, "y")
    assert len(part.negative) == 1 and len(part.positive) == 1 and not part.zero


def test_classify_absent_var():
    s = le_sys(("x", "y"), le({"x": 1}, 1), ge({"x": 1}, 0))
    assert len(classify(s, "y").zero) == 2


def test_classify_requires_le():
    with pytest.raises(ValueError):
        classify(LinearSystem(("x",), (ge({"x": 1}, 0),)), "x")


def test_classify_individual_last_interval():
    r = FlexResource("a", [0, 0], [1, 1], [0, 0], [1, 2])
    part = classify(to_le(individual_polytope(r)), "e[a](2)")
    assert (len(part.negative), len(part.positive)) == (2, 2)


def test_eliminate_simple():
    out = eliminate(le_sys(("x", "y"), ge({"y": 1, "x": -1}, 0), le({"y": 1}, 1)), "y")
    assert out.variables == ("x",)
    assert system_equivalent(out, LinearSystem(("x",), (le({"x": 1}, 1),)))


def test_eliminate_pairwise_count():
    s = le_sys(("x", "y"), ge({"y": 1, "x": -1}, 0), le({"y": 1, "x": 1}, 2), le({"y": 1}, Fraction(3, 2)))
    out = eliminate(s, "y")
    assert len(out.rows) == 2
    assert system_equivalent(out, LinearSystem(("x",), (le({"x": 1}, 1), le({"x": 1}, Fraction(3, 2)))))


def test_prune_parallel():
    s = le_sys(("x",), le({"x": 1}, 1), le({"x": 1}, Fraction(3, 2)))
    assert [str(r) for r in prune_redundant(s).rows] == ["1*x <= 1"]


def test_prune_keeps_irredundant_square():
    s = le_sys(("x", "y"), le({"x": 1}, 1), ge({"x": 1}, 0), le({"y": 1}, 1), ge({"y": 1}, 0))
    assert len(prune_redundant(s).rows) == 4


def test_oracle_single():
    out = aggregate_projection_oracle(ResourceSet((unit_resource(),)))
    assert system_equivalent(out, LinearSystem(("E(1)",), (ge({"E(1)": 1}, 0), le({"E(1)": 1}, 1))))


def test_oracle_minkowski_intervals():
    out = aggregate_projection_oracle(ResourceSet((unit_resource(), sink_resource())))
    assert system_equivalent(out, LinearSystem(("E(1)",), (ge({"E(1)": 1}, -1), le({"E(1)": 1}, 1))))


def test_oracle_two_step_pair_frozen():
    # derived by running the oracle once; pinned here as a regression value
    want = LinearSystem(("E(1)", "E(2)"), (
        le({"E(1)": 1, "E(2)": -1}, 1),
        le({"E(1)": -1, "E(2)": 1}, 2),
        le({"E(1)": -1}, 1),
        le({"E(1)": 1}, 2),
        le({"E(2)": 1}, 3),
        le({"E(2)": -1}, 1),
    ))
    out = aggregate_projection_oracle(two_step_pair())
    assert len(out.rows) == 6
    assert system_equivalent(out, want)


def test_oracle_order_independent(pair):
    assert system_equivalent(aggregate_projection_oracle(pair),
                             aggregate_projection_oracle(pair, reverse_resources=True))


def test_guard():
    rs = ResourceSet(tuple(FlexResource(f"r{i}", [0] * 5, [1] * 5, [0] * 5, list(range(1, 6))) for i in range(3)))
    with pytest.raises(GuardExceeded):
        aggregate_projection_oracle(rs)
    with pytest.raises(GuardExceeded):
        aggregate_projection_oracle(rs, max_nt=14)


def test_pruned_row_count_bounded(rng):
    from afrkit.instances import random_resource_set
    for _ in range(5):
        rs = random_resource_set(rng, 2, 3)
        assert len(aggregate_projection_oracle(rs).rows) <= 14
