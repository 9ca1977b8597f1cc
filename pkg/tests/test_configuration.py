import json
from functools import lru_cache

import numpy as np
import pytest
from conftest import EXPERIMENTS, experiment
from hypothesis import given, settings
from hypothesis import strategies as st

from desiredstate.compiler import compile_dsd, decode, iter_configurations
from desiredstate.configuration import (
    CddFormatError,
    ConfigurationDescription,
    Connection,
    Instance,
    NoConfiguration,
    PickerPolicy,
    UnknownReference,
    Weights,
    apply_delta,
    delta,
    objective_value,
    parse_cdd,
    pick,
    rank_by_objective,
    serialize_cdd,
    validate,
)
from desiredstate.csp import SolveLimits
from desiredstate.lang import parse_source

C1 = Instance("h1", "Client", 1)
S2 = Instance("h2", "Server", 1)
S3 = Instance("h3", "Server", 1)


def cdd(instances, connections=(), ref="exp7"):
    return ConfigurationDescription(ref, instances, connections)


@pytest.fixture(scope="module")
def exp7():
    return experiment("exp7")


@pytest.fixture(scope="module")
def exp7_all(exp7):
    return list(iter_configurations(compile_dsd(exp7)))


instances = st.builds(Instance, st.sampled_from(["h1", "h2", "h3"]), st.sampled_from(["Client", "Server"]), st.integers(1, 2))


@st.composite
def configurations(draw):
    insts = draw(st.frozensets(instances, max_size=6))
    if not insts:
        return cdd(insts)
    pool = sorted(insts)
    conns = draw(st.frozensets(st.builds(Connection, st.sampled_from(pool), st.just("server"), st.sampled_from(pool)), max_size=4))
    return cdd(insts, conns)


# -- serialization ---------------------------------------------------------


def test_empty_document():
    text = serialize_cdd(cdd([]))
    assert text.strip() == '<cdd dsd="exp7" />'
    assert parse_cdd(text) == cdd([])


def test_canonical_child_order():
    text = serialize_cdd(cdd([S2, C1], [Connection(C1, "server", S2)]))
    lines = text.strip().splitlines()
    assert len(lines) == 5
    assert lines[1].startswith('  <instance host="h1"') and lines[2].startswith('  <instance host="h2"')
    assert lines[3].startswith("  <connection client-host=\"h1\"")


def test_round_trip_all_exp7(exp7_all):
    for c in exp7_all:
        assert parse_cdd(serialize_cdd(c)) == c


@settings(max_examples=150)
@given(configurations(), configurations())
def test_serialization_is_injective(a, b):
    assert parse_cdd(serialize_cdd(a)) == a
    assert (serialize_cdd(a) == serialize_cdd(b)) == (a == b)


@pytest.mark.parametrize("text,message", [
    ("<cdd>", "malformed XML"),
    ('<cdd dsd="x"><foo/></cdd>', "unknown element"),
    ('<cdd dsd="x"><instance host="h1" type="T"/></cdd>', "missing attribute"),
    ('<cdd dsd="x"><instance host="h1" type="T" index="0"/></cdd>', "index"),
    ('<cdd dsd="x"><instance host="h1" type="T" index="1"/>'
     '<connection client-host="h1" client-type="T" client-index="1" port="p" '
     'server-host="h9" server-type="T" server-index="1"/></cdd>', "dangling"),
])
def test_format_errors(text, message):
    with pytest.raises(CddFormatError) as err:
        parse_cdd(text)
    assert message in str(err.value)


def test_instance_text_form():
    assert str(C1) == "h1/Client/1" and Instance.parse("h1/Client/1") == C1
    with pytest.raises(ValueError):
        Instance.parse("h1/Client")


# -- validation ------------------------------------------------------------


def test_all_exp7_solutions_comply(exp7, exp7_all):
    assert len(exp7_all) == 104
    assert all(validate(c, exp7).compliant for c in exp7_all)


def test_deleted_connection_names_client_and_port(exp7):
    report = validate(cdd([C1, S2]), exp7)
    assert not report.compliant
    rec = report.record("binding-completeness")
    assert rec.status == "fail" and rec.witnesses == ("(h1/Client/1, server) has 0 connections",)


def test_two_maths_fail_the_cardinality(maths_dsd):
    add, mul = Instance("h6", "AdditionService", 1), Instance("h7", "MultiplicationService", 1)
    maths = [Instance("h1", "MathsService", 1), Instance("h2", "MathsService", 1)]
    conns = [Connection(m, p, s) for m in maths for p, s in (("addition", add), ("multiplication", mul))]
    report = validate(ConfigurationDescription("maths", maths + [add, mul], conns), maths_dsd)
    assert [r.name for r in report.failures] == ["mathsServiceCons[3]"]
    rec = report.failures[0]
    assert "card(instancesOf(MathsService in deployment)) >= 3" in rec.detail
    assert rec.witnesses == ("card(instancesOf(MathsService in deployment)) = 2, required >= 3",)


def test_quantified_witness_names_the_instance(maths_dsd):
    slow = Instance("h6", "MathsService", 1)
    report = validate(ConfigurationDescription("maths", [slow]), maths_dsd)
    assert "mathsComponent=h6/MathsService/1" in report.record("mathsServiceCons[0]").witnesses


def test_structural_problems(exp7):
    c2 = Instance("h1", "Client", 2)
    report = validate(cdd([c2, S2], [Connection(c2, "server", S2)]), exp7)
    assert any("non-contiguous" in w for w in report.record("well-formed").witnesses)
    report = validate(cdd([C1], [Connection(C1, "server", S2)]), exp7)
    assert any("dangling" in w for w in report.record("well-formed").witnesses)


def test_unknown_reference(exp7):
    with pytest.raises(UnknownReference):
        validate(cdd([Instance("h9", "Client", 1)]), exp7)
    with pytest.raises(UnknownReference):
        validate(cdd([Instance("h1", "Nope", 1)]), exp7)


def test_report_formats(exp7):
    report = validate(cdd([C1, S2], [Connection(C1, "server", S2)]), exp7)
    assert report.to_text().splitlines()[0] == "compliant=true dsd=exp7"
    data = json.loads(report.to_json())
    assert data["compliant"] is True


def test_dynamic_conjuncts_are_skipped_unless_sampled(maths_dsd):
    text = (EXPERIMENTS / "maths.deladas").read_text()
    text = text.rstrip().removesuffix(")") + "\n  and\n  forall MathsService m in deployment (m.queriesPerSecond <= 100)\n)"
    dsd = parse_source(text, name="maths")
    m = Instance("h1", "MathsService", 1)
    c = ConfigurationDescription("maths", [m])
    assert validate(c, dsd).record("mathsServiceCons[4]").status == "skipped"
    assert validate(c, dsd, {(m, "queriesPerSecond"): 50}).record("mathsServiceCons[4]").status == "pass"
    assert validate(c, dsd, {(m, "queriesPerSecond"): 500}).record("mathsServiceCons[4]").status == "fail"


@lru_cache(maxsize=None)
def _exp7_rows():
    csp = compile_dsd(experiment("exp7"))
    return csp, [r.copy() for r in csp.model.solutions()]


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 103), st.integers(16, 79))
def test_connection_flips_are_caught_by_the_validator(exp7_index, bit):
    # adding or dropping one potential connection always breaks compliance
    csp, rows = _exp7_rows()
    row = rows[exp7_index].copy()
    row[bit] ^= 1
    assert not csp.model.evaluate(row)
    c = decode(csp, np.asarray(row), strict=False)
    assert not validate(c, csp.dsd).compliant


# -- delta -----------------------------------------------------------------


def test_delta_from_empty_deploys_everything(exp7_all):
    target = exp7_all[-1]
    d = delta(cdd([]), target)
    assert set(d.deploy) == target.instances and d.cost == len(target.instances)
    assert set(d.binds) == target.connections and not d.rebind


def test_identity_delta():
    x = cdd([C1, S2], [Connection(C1, "server", S2)])
    d = delta(x, x)
    assert d.is_empty and d.cost == 0


def test_three_action_case():
    cur = cdd([C1, S2], [Connection(C1, "server", S2)])
    tgt = cdd([C1, S3], [Connection(C1, "server", S3)])
    d = delta(cur, tgt)
    assert d.undeploy == (S2,) and d.deploy == (S3,) and d.rebind == (Connection(C1, "server", S3),)
    assert d.cost == 3
    assert [k for k, _ in d.actions()] == ["undeploy", "deploy", "rebind"]


def test_weights():
    cur = cdd([C1, S2], [Connection(C1, "server", S2)])
    tgt = cdd([C1, S3], [Connection(C1, "server", S3)])
    assert delta(cur, tgt, Weights.parse("2,3,5")).cost == 10
    with pytest.raises(ValueError):
        Weights.parse("1,2")


def test_mismatched_references():
    with pytest.raises(ValueError):
        delta(cdd([], ref="a"), cdd([], ref="b"))


@settings(max_examples=200)
@given(configurations(), configurations())
def test_apply_delta_reaches_the_target(a, b):
    d = delta(a, b)
    assert apply_delta(a, d) == b
    assert d.cost >= len(a.instances ^ b.instances)
    assert d.is_empty == (a == b)


# -- pick ------------------------------------------------------------------


def test_min_delta_prefers_current():
    x = cdd([C1, S2], [Connection(C1, "server", S2)])
    res = pick([cdd([S3]), x], x, PickerPolicy("min-delta"))
    assert res.chosen == x and res.cost == 0 and res.index == 1


def test_first_is_lexicographically_least(exp7_all):
    csp = compile_dsd(experiment("exp7"))
    res = pick(iter_configurations(csp), None, PickerPolicy("first"))
    assert res.chosen == exp7_all[0] and res.seen == 1


def test_cap_one_degenerates_to_first(exp7_all):
    current = exp7_all[50]
    first = pick(exp7_all, current, PickerPolicy("first"))
    capped = pick(exp7_all, current, PickerPolicy("min-delta", cap=1))
    assert capped.chosen == first.chosen and capped.stopped_early


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 103), st.sampled_from(["1,1,1", "1,5,1", "3,1,2"]))
def test_min_delta_is_exhaustive_minimum(exp7_all, index, weights):
    w = Weights.parse(weights)
    current = exp7_all[index]
    # drop the current configuration so the early exit cannot fire
    pool = [c for c in exp7_all if c != current]
    res = pick(pool, current, PickerPolicy("min-delta", weights=w))
    costs = [delta(current, c, w).cost for c in pool]
    assert res.cost == min(costs)
    assert res.index == costs.index(min(costs))  # ties go to the earlier candidate


def test_empty_stream():
    with pytest.raises(NoConfiguration):
        pick([], None, PickerPolicy("min-delta"))


def test_bad_policy():
    with pytest.raises(ValueError):
        PickerPolicy("random")


def test_objective_ranking():
    text = (EXPERIMENTS / "exp7.deladas").read_text()
    dsd = parse_source(text + "\noptimise maximize card(instancesOf(Server in deployment))\n", name="exp7")
    cands = list(iter_configurations(compile_dsd(dsd), SolveLimits(max_solutions=20)))
    ranked = rank_by_objective(cands, dsd)
    values = [objective_value(dsd, c) for c in ranked]
    assert values == sorted(values, reverse=True)
    res = pick(cands, None, PickerPolicy("first"), dsd)
    assert objective_value(dsd, res.chosen) == max(values)
