import numpy as np
import oracles
import pytest
from conftest import EXPERIMENTS, experiment
from hypothesis import given, settings
from hypothesis import strategies as st

from desiredstate.compiler import (
    CompileError,
    compile_dsd,
    count_configurations,
    decode,
    explain,
    iter_configurations,
)
from desiredstate.configuration import Connection, Instance, validate
from desiredstate.csp import Capture, SolveLimits
from desiredstate.lang import parse_source

BASE = '''
interface IServer (
  type = "java"
  specification = "com.example.IServer"
  implementation = "http://example.org/server.jar"
)
component type Client (
  requires IServer server
  implementation "http://example.org/client.jar"
  instantiate clientImpl with com.example.Client()
  bind server with clientImpl.setServer()
  properties ( weight = 2 )
)
component type Server (
  provides interface IServer
  implementation "http://example.org/server.jar"
  instantiate serverImpl with com.example.Server()
  satisfy IServer using serverImpl
  properties ( weight = 5 )
)
host h1 (speed = 3000)
host h2 (speed = 1000)
'''

# h3 has no speed property: comparisons on it are false
HOST3 = 'host h3 (address = "node3")\n'

CONSTRAINTS = [
    "forall Client c in deployment (getHost(c).speed >= 2000)",
    "forall Server s in deployment (card(connections(s.IServer)) <= 1)",
    "forall Server s in deployment (card(connections(s.IServer)) >= 1)",
    "forall host h in deployment (card(getComponents(h)) <= 1)",
    "card(instancesOf(Client in deployment)) >= 2",
    "card(instancesOf(Server in deployment)) = 1",
    "card(getComponents(h2)) < 1",
    "not card(instancesOf(Server in deployment)) > 1",
    "forall Client c in deployment (card(connections(c.server)) = 1)",
    "forall Client c in deployment (c.weight < 3)",
    "forall Server s in deployment (s.weight > 3 and getHost(s).speed <= 1000)",
    "forall host h in deployment (h.speed >= 500)",
    "forall Client c in deployment (card(getComponents(getHost(c))) <= 1)",
    "forall host h in deployment (forall Server s in deployment "
    "(card(getComponents(h)) >= card(connections(s.IServer))))",
    "forall Server s in deployment (not (getHost(s).speed > 2000))",
    "card(instancesOf(Server in deployment)) > card(instancesOf(Client in deployment))",
    "h1.speed >= 5 or card(instancesOf(Server in deployment)) = 0",
]


def small_dsd(constraints, max_count=1, third_host=True):
    src = BASE + (HOST3 if third_host else "") + f"deployment (maxInstancesPerHost = {max_count})\n"
    if constraints:
        src += "constraintSet k (\n  " + "\n  and\n  ".join(f"({c})" for c in constraints) + "\n)\n"
    return parse_source(src, name="small")


def solver_set(dsd):
    return set(iter_configurations(compile_dsd(dsd)))


# -- variable counts -------------------------------------------------------


@pytest.mark.parametrize("name,placement,connection", [
    ("exp6", 16, 64), ("exp7", 16, 64), ("exp8", 32, 256), ("exp9", 256, 16_384), ("exp11", 30, 200),
])
def test_variable_formula(name, placement, connection):
    csp = compile_dsd(experiment(name))
    assert len(csp.placement) == placement
    assert len(csp.conn_vars) == connection
    assert csp.num_variables == placement + connection


def test_pruning_skips_incompatible_pairs():
    csp = compile_dsd(experiment("exp11"))
    dsd = csp.dsd
    for pc in csp.connections:
        port = dsd.component_type(pc.client.ctype).port(pc.port)
        assert port.interface in dsd.component_type(pc.server.ctype).provides


def test_missing_provider_warns_and_forbids_clients():
    src = BASE.replace("provides interface IServer", "").replace("satisfy IServer using serverImpl", "")
    dsd = parse_source(src + "deployment (maxInstancesPerHost = 1)\n")
    csp = compile_dsd(dsd)
    assert csp.warnings
    assert all(not any(i.ctype == "Client" for i in cdd.instances) for cdd in iter_configurations(csp))
    assert csp.model.count_exact() == 4  # servers only, on either host


# -- counts ----------------------------------------------------------------


@pytest.mark.parametrize("name,count", [("exp1", 2), ("exp2", 4), ("exp3", 16), ("exp4", 256), ("exp5", 65_536), ("exp7", 104)])
def test_counts(name, count):
    res = count_configurations(experiment(name))
    assert res.exhausted and res.solution_count == count


def test_closed_form_oracles_agree_with_solver_on_small_cases():
    for hosts in (1, 2):
        src = BASE + "".join(f"host x{i}\n" for i in range(hosts)) + "deployment (maxInstancesPerHost = 2)\n"
        src = src.replace("host h1 (speed = 3000)\nhost h2 (speed = 1000)\n", "")
        assert compile_dsd(parse_source(src)).model.count_exact() == oracles.client_server_count(hosts, 2)
    for hosts in (2, 3):
        src = BASE.replace("host h1 (speed = 3000)\nhost h2 (speed = 1000)\n", "")
        src += "".join(f"host x{i}\n" for i in range(hosts))
        src += "constraintSet one ( forall host h in deployment (card(getComponents(h)) <= 1) )\n"
        assert compile_dsd(parse_source(src)).model.count_exact() == oracles.client_server_one_per_host(hosts)


def test_maths_oracle_on_a_smaller_realm(maths_dsd):
    from dataclasses import replace

    dsd = replace(maths_dsd, hosts=tuple(h for h in maths_dsd.hosts if h.name not in ("h1", "h9", "h10")))
    assert compile_dsd(dsd).model.count_exact() == oracles.maths_count(4, 3)


def test_exp11_model_size(maths_dsd):
    csp = compile_dsd(maths_dsd)
    assert (csp.num_variables, csp.model.num_constraints) == (230, 246)


# -- lowering: solver route against the validator route --------------------


@pytest.mark.parametrize("constraint", CONSTRAINTS)
def test_each_constraint_agrees_with_the_validator(constraint):
    dsd = small_dsd([constraint])
    assert solver_set(dsd) == oracles.compliant_cdds(dsd)


@pytest.mark.parametrize("constraint", CONSTRAINTS[:9])
def test_agreement_with_two_instances_per_host(constraint):
    dsd = small_dsd([constraint], max_count=2, third_host=False)
    assert solver_set(dsd) == oracles.compliant_cdds(dsd)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(CONSTRAINTS), min_size=2, max_size=3, unique=True))
def test_conjunctions_agree_with_the_validator(constraints):
    dsd = small_dsd(constraints)
    assert solver_set(dsd) == oracles.compliant_cdds(dsd)


@pytest.mark.parametrize("constraint", [
    "not (forall Client c in deployment (getHost(c).speed >= 2000))",
    "card(instancesOf(Server in deployment)) = 0 or card(instancesOf(Client in deployment)) = 0",
    "not (card(instancesOf(Server in deployment)) = 1)",
])
def test_unsupported_fragment_names_the_construct(constraint):
    with pytest.raises(CompileError) as err:
        compile_dsd(small_dsd([constraint]))
    assert "k[0]" in str(err.value) and "supported fragment" in str(err.value)


def test_dynamic_conjunct_is_diverted():
    text = (EXPERIMENTS / "maths.deladas").read_text()
    extra = "\n  and\n  forall MathsService m in deployment (m.queriesPerSecond <= 100)\n)"
    plain = compile_dsd(parse_source(text))
    diverted = compile_dsd(parse_source(text.rstrip().removesuffix(")") + extra))
    assert plain.runtime == []
    assert [c.label for c in diverted.runtime] == ["mathsServiceCons[4]"]
    assert diverted.model.num_constraints == plain.model.num_constraints
    assert diverted.families["mathsServiceCons[4]"] == {"runtime-assertion": 1}


def test_compilation_is_deterministic():
    a = compile_dsd(experiment("exp11")).model.dump()
    b = compile_dsd(experiment("exp11")).model.dump()
    assert a == b


def test_explain_lists_families(maths_dsd):
    text = explain(compile_dsd(maths_dsd))
    assert text.startswith("variables=230 placement=30 connection=200 constraints=246")
    assert text.count("[model]") == 4


# -- decode ----------------------------------------------------------------


def test_decode_single_instance():
    csp = compile_dsd(experiment("exp1"))
    cdd = decode(csp, np.array([1], dtype=np.int8))
    assert [str(i) for i in cdd.sorted_instances] == ["h1/Service/1"] and not cdd.connections


def test_decode_all_zero_is_empty():
    csp = compile_dsd(experiment("exp7"))
    cdd = decode(csp, np.zeros(csp.num_variables, dtype=np.int8))
    assert len(cdd) == 0 and not cdd.connections


def test_exp7_hand_built_solution():
    csp = compile_dsd(experiment("exp7"))
    client, server = Instance("h1", "Client", 1), Instance("h2", "Server", 1)
    row = np.zeros(csp.num_variables, dtype=np.int8)
    row[csp.placement[("h1", "Client", 1)]] = 1
    row[csp.placement[("h2", "Server", 1)]] = 1
    y = next(v for v, pc in zip(csp.conn_vars, csp.connections) if (pc.client, pc.server) == (client, server))
    row[y] = 1
    assert csp.model.evaluate(row)
    cdd = decode(csp, row)
    assert cdd.instances == {client, server}
    assert cdd.connections == {Connection(client, "server", server)}
    assert cdd in set(iter_configurations(csp))


def test_decoded_solutions_are_distinct_and_closed():
    csp = compile_dsd(experiment("exp7"))
    cdds = list(iter_configurations(csp))
    assert len(set(cdds)) == len(cdds) == 104
    for cdd in cdds:
        assert not cdd.dangling()


def test_decode_rejects_an_incoherent_row():
    csp = compile_dsd(experiment("exp7"))
    row = np.zeros(csp.num_variables, dtype=np.int8)
    row[csp.conn_vars[0]] = 1  # a connection between instances that do not exist
    with pytest.raises(ValueError):
        decode(csp, row)


def test_first_k_capture_through_count_configurations():
    res = count_configurations(experiment("exp7"), SolveLimits(capture=Capture.FIRST_K, capture_k=3))
    assert res.solution_count == 104 and len(res.captured) == 3
    assert len(res.captured[0]) == 0  # the empty deployment comes first


def test_objective_ranks_captured_configurations():
    dsd = small_dsd([])
    text = BASE + HOST3 + "deployment (maxInstancesPerHost = 1)\noptimise maximize card(instancesOf(Server in deployment))\n"
    ranked = count_configurations(parse_source(text), SolveLimits(capture=Capture.ALL)).captured
    servers = [sum(i.ctype == "Server" for i in c.instances) for c in ranked]
    assert servers == sorted(servers, reverse=True) and servers[0] == 3
    assert len(ranked) == compile_dsd(dsd).model.count_exact()
    assert all(validate(c, dsd).compliant for c in ranked[:20])
