import json
from fractions import Fraction

import pytest
from hypothesis import given, settings

from afrkit.flex import (
    EmptyResourceError,
    FlexResource,
    HypothesisError,
    ParseError,
    ResourceSet,
    from_generator,
    individual_polytope,
    parse_resources,
    read_resources,
    serialize_resources,
    tighten_bounds,
    validate_hypotheses,
)
from afrkit.linear import OPTIMAL, feasible, optimize

from conftest import valid_resources


def doc(resources, dt=None):
    d = {"resources": resources}
    if dt is not None:
        d["dt"] = dt
    return json.dumps(d)


def res(rid="a", pmin=("0",), pmax=("1",), emin=("0",), emax=("1",), **extra):
    return {"id": rid, "p_min": list(pmin), "p_max": list(pmax), "e_min": list(emin), "e_max": list(emax), **extra}


class TestParse:
    def test_identity(self):
        rs = parse_resources(doc([res()]))
        assert rs.N == 1 and rs.T == 1
        r = rs.resources[0]
        assert (r.p_lo, r.p_hi, r.e_lo, r.e_hi) == ((0,), (1,), (0,), (1,))

    def test_dt_scales_power(self):
        r = parse_resources(doc([res(emax=("1/4",))], dt="0.25")).resources[0]
        assert r.p_lo == (0,) and r.p_hi == (Fraction(1, 4),)

    def test_decimal_strings_exact(self):
        r = parse_resources(doc([res(pmax=("0.1",), emax=("0.1",))])).resources[0]
        assert r.p_hi == (Fraction(1, 10),)

    def test_hypothesis_one_named(self):
        with pytest.raises(HypothesisError) as exc:
            parse_resources(doc([res(pmin=("2",), pmax=("1",))]))
        assert any(v.hypothesis == 1 and v.t == 1 for v in exc.value.violations)

    @pytest.mark.parametrize("text", [
        "{not json",
        json.dumps({"resources": [{"id": "a", "p_min": [0], "p_max": ["1"], "e_min": ["0"], "e_max": ["1"]}]}),
        json.dumps({"resources": [res(pmin=("0", "0"))]}),
        json.dumps({"resources": [res(), res()]}),
        json.dumps({"resources": [res(pmin=("x",))]}),
        json.dumps({"no": []}),
        json.dumps({"resources": [res()], "dt": "-1"}),
    ])
    def test_malformed(self, text):
        with pytest.raises(ParseError):
            parse_resources(text)

    def test_mixed_horizons(self):
        with pytest.raises(ParseError):
            parse_resources(doc([res("a"), res("b", ("0", "0"), ("1", "1"), ("0", "0"), ("1", "2"))]))

    def test_csv(self):
        text = "id,t,p_min,p_max,e_min,e_max,dt\nb,2,0,1,0,2,1\nb,1,0,1,0,1,1\n"
        r = parse_resources(text, "csv").resources[0]
        assert r.e_hi == (1, 2)

    def test_csv_gap(self):
        with pytest.raises(ParseError):
            parse_resources("id,t,p_min,p_max,e_min,e_max\nb,2,0,1,0,2\n", "csv")

    def test_tighten_on_ingest(self):
        rs = parse_resources(doc([res(pmax=("1", "1"), pmin=("0", "0"), emin=("0", "0"), emax=("1", "3"))]),
                             tighten=True)
        assert rs.resources[0].e_hi == (1, 2)

    def test_raw_reader_keeps_invalid(self):
        raw = read_resources(doc([res(pmin=("2",), pmax=("1",))]))
        assert not validate_hypotheses(raw[0]).ok

    @settings(max_examples=30, deadline=None)
    @given(valid_resources())
    def test_roundtrip(self, r):
        for fmt in ("json", "csv"):
            back = parse_resources(serialize_resources([r], fmt), fmt).resources[0]
            assert back == r


class TestHypotheses:
    def test_valid_empty_report(self):
        assert validate_hypotheses(FlexResource("a", [0], [1], [0], [1])).violations == ()

    def test_envelope_rate_violation(self):
        r = FlexResource("a", [0, 0], [1, 1], [0, 0], [1, 3])
        vs = validate_hypotheses(r).violations
        assert [(v.hypothesis, v.t) for v in vs] == [(2, 2)]
        assert vs[0].lhs == 2 and vs[0].rhs == 1

    def test_reachability_violation(self):
        vs = validate_hypotheses(FlexResource("a", [0], [2], [0], [1])).violations
        assert (3, 1) in [(v.hypothesis, v.t) for v in vs]


class TestTighten:
    def test_forward_pass(self):
        assert tighten_bounds(FlexResource("a", [0, 0], [1, 1], [0, 0], [1, 3])).e_hi == (1, 2)

    @settings(max_examples=40, deadline=None)
    @given(valid_resources())
    def test_idempotent_on_valid(self, r):
        assert tighten_bounds(r) == r

    def test_empty(self):
        with pytest.raises(EmptyResourceError) as exc:
            tighten_bounds(FlexResource("a", [1], [2], [0], [0]))
        assert exc.value.t == 1

    @pytest.mark.parametrize("r", [
        FlexResource("a", [0, 0], [1, 1], [0, 0], [1, 3]),
        FlexResource("b", [-2, 0], [3, 1], [0, -1], [1, 1]),
        FlexResource("c", [0, -5], [9, 5], [1, 0], [2, 1], Fraction(1, 2)),
    ])
    def test_preserves_trajectories(self, r):
        # tightening drops only unreachable values: every coordinate range is unchanged
        fixed = tighten_bounds(r)
        assert validate_hypotheses(fixed).ok
        a, b = individual_polytope(r), individual_polytope(fixed)
        for v in a.variables:
            for sense in ("max", "min"):
                assert optimize(a, {v: 1}, sense).value == optimize(b, {v: 1}, sense).value


class TestGenerator:
    def test_cumulative(self):
        r = from_generator([0, 0], [1, 1])
        assert r.e_lo == (0, 0) and r.e_hi == (1, 2)

    def test_symmetric(self):
        r = from_generator([-1], [1])
        assert r.e_lo == (-1,) and r.e_hi == (1,)

    def test_always_valid(self):
        assert validate_hypotheses(from_generator([-1, 2, 0], [0, 3, 1])).ok


class TestPolytope:
    def test_rows_t1(self):
        p = individual_polytope(FlexResource("a", [0], [1], [0], [1]))
        assert len(p.rows) == 4

    def test_rows_t2(self):
        p = individual_polytope(FlexResource("a", [0, 0], [1, 1], [0, 0], [1, 2]))
        assert len(p.rows) == 8
        assert "-1*e[a](1) + 1*e[a](2) <= 1" in p.dump().splitlines()

    @settings(max_examples=30, deadline=None)
    @given(valid_resources())
    def test_feasible(self, r):
        assert feasible(individual_polytope(r)).status == OPTIMAL


def test_resource_set_checks():
    with pytest.raises(ValueError):
        ResourceSet((FlexResource("a", [0], [1], [0], [1]), FlexResource("a", [0], [1], [0], [1])))
    with pytest.raises(HypothesisError):
        ResourceSet((FlexResource("a", [0], [2], [0], [1]),))
    assert ResourceSet((), 3).T == 3


def test_scaled():
    r = FlexResource("a", [0], [1], [0], [1], Fraction(1, 2)).scaled(2)
    assert r.p_hi == (2,) and r.e0 == 1
