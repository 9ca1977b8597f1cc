import itertools

import numpy as np
import oracles
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from desiredstate.csp import Capture, Model, SolveLimits


def binaries(n):
    m = Model()
    for _ in range(n):
        m.add_variable()
    return m


@st.composite
def models(draw, max_vars=16, max_cons=12):
    n = draw(st.integers(0, max_vars))
    m = binaries(n)
    if n == 0:
        return m
    for _ in range(draw(st.integers(0, max_cons))):
        vs = draw(st.lists(st.integers(0, n - 1), min_size=1, max_size=n, unique=True))
        terms = [(draw(st.integers(-4, 4).filter(bool)), v) for v in vs]
        lo = sum(a for a, _ in terms if a < 0)
        hi = sum(a for a, _ in terms if a > 0)
        m.add_linear(terms, draw(st.sampled_from(["<=", ">=", "="])), draw(st.integers(lo - 1, hi + 1)))
    return m


# -- construction ----------------------------------------------------------


def test_dense_ids():
    m = Model()
    assert m.add_variable() == 0
    assert [m.add_variable() for _ in range(15)] == list(range(1, 16))


def test_empty_domain_rejected():
    with pytest.raises(ValueError):
        Model().add_variable(())


def test_bad_constraints_rejected():
    m = binaries(2)
    with pytest.raises(KeyError):
        m.add_linear([(1, 5)], "<=", 1)
    with pytest.raises(ValueError):
        m.add_linear([(1, 0)], "!=", 1)


def test_fixed_domains():
    m = Model()
    m.add_variable((1,))
    m.add_variable((0,))
    m.add_variable()
    assert [tuple(s) for s in m.solutions()] == [(1, 0, 0), (1, 0, 1)]


# -- counting --------------------------------------------------------------


@pytest.mark.parametrize("n,terms,rel,bound,expected", [
    (2, [(1, 0), (1, 1)], "<=", 1, 3),
    (1, [(1, 0)], "=", 1, 1),
    (3, [(1, 0), (1, 1), (1, 2)], ">=", 4, 0),
])
def test_small_counts(n, terms, rel, bound, expected):
    m = binaries(n)
    m.add_linear(terms, rel, bound)
    assert m.count_exact() == expected


@pytest.mark.parametrize("n,count", [(0, 1), (1, 2), (4, 16), (8, 256), (16, 65_536)])
def test_unconstrained_counts(n, count):
    res = binaries(n).enumerate()
    assert res.solution_count == count and res.exhausted


def test_contradiction_has_no_solutions():
    m = binaries(3)
    m.add_contradiction("unsatisfiable literal")
    assert m.count_exact() == 0
    assert "false unsatisfiable literal" in m.dump()


# -- propagation -----------------------------------------------------------


def test_propagation_forces_partner():
    m = binaries(2)
    m.add_linear([(1, 0), (1, 1)], "=", 2)
    assert m.propagate({0: 1}).values == (1, 1)


def test_root_propagation_fixes_zeros():
    m = binaries(2)
    m.add_linear([(1, 0), (1, 1)], "<=", 0)
    p = m.propagate()
    assert p.ok and p.values == (0, 0)


def test_immediate_conflict():
    m = binaries(2)
    m.add_linear([(1, 0), (1, 1)], ">=", 3)
    assert m.propagate().conflict == 0


def test_partial_clash():
    m = binaries(2)
    m.add_linear([(1, 0)], "=", 1)
    assert not m.propagate({0: 0}).ok


@settings(max_examples=80, deadline=None)
@given(models(max_vars=10, max_cons=6), st.data())
def test_propagation_never_removes_solutions(m, data):
    n = m.num_variables
    fixed = data.draw(st.dictionaries(st.integers(0, max(n - 1, 0)), st.integers(0, 1), max_size=n)) if n else {}
    p = m.propagate(fixed)
    consistent = [s for s in oracles.brute_force_solutions(m) if all(s[v] == b for v, b in fixed.items())]
    if not p.ok:
        assert consistent == []
    for s in consistent:
        assert all(val is None or s[i] == val for i, val in enumerate(p.values))


# -- enumeration -----------------------------------------------------------


@settings(max_examples=250, deadline=None)
@given(models())
def test_count_matches_brute_force(m):
    assert m.count_exact() == oracles.brute_force_count(m)


@settings(max_examples=80, deadline=None)
@given(models(max_vars=10))
def test_solutions_are_the_lexicographic_listing(m):
    got = [tuple(int(x) for x in s) for s in m.solutions()]
    assert got == oracles.brute_force_solutions(m)


@settings(max_examples=60, deadline=None)
@given(models(max_vars=10), st.lists(st.integers(-3, 3), min_size=10, max_size=10), st.integers(-5, 5))
def test_adding_a_constraint_never_adds_solutions(m, coeffs, bound):
    before = m.count_exact()
    terms = [(c, i) for i, c in enumerate(coeffs[: m.num_variables]) if c]
    if terms:
        m.add_linear(terms, "<=", bound)
    assert m.count_exact() <= before


def test_deterministic_order_and_count():
    m = binaries(6)
    m.add_linear([(1, 0), (2, 3), (-1, 5)], "<=", 1)
    a = [s.tobytes() for s in m.solutions()]
    b = [s.tobytes() for s in m.solutions()]
    assert a == b


def test_max_solutions_and_capture():
    m = binaries(5)
    res = m.enumerate(SolveLimits(max_solutions=7, capture=Capture.FIRST_K, capture_k=3))
    assert res.solution_count == 7 and not res.exhausted
    assert [list(r) for r in res.captured] == [[0, 0, 0, 0, 0], [0, 0, 0, 0, 1], [0, 0, 0, 1, 0]]


def test_capture_all_and_visitor():
    m = binaries(3)
    seen = []
    res = m.enumerate(SolveLimits(capture=Capture.ALL), visitor=lambda r: seen.append(tuple(r)))
    assert len(res.captured) == 8 and seen == list(itertools.product((0, 1), repeat=3))


def test_sampling_does_not_change_the_count():
    m = binaries(6)
    res = m.enumerate(SolveLimits(capture=Capture.ALL, sample_every=10))
    assert res.solution_count == 64
    assert len(res.captured) == 6
    assert list(res.captured[0]) == [0, 0, 1, 0, 0, 1]  # the 10th solution


def test_time_budget_stops_early():
    m = binaries(40)
    res = m.enumerate(SolveLimits(time_budget=0.05))
    assert not res.exhausted and res.solution_count > 0
    assert res.elapsed < 2


def test_zero_limits():
    assert binaries(3).enumerate(SolveLimits(max_solutions=0)).solution_count == 0


def test_invalid_limits():
    with pytest.raises(ValueError):
        SolveLimits(max_solutions=-1)
    with pytest.raises(ValueError):
        SolveLimits(sample_every=0)


def test_search_is_resumable():
    m = binaries(4)
    search = m.search()
    it = iter(search)
    first = [tuple(next(it)) for _ in range(5)]
    rest = [tuple(s) for s in it]
    assert first + rest == list(itertools.product((0, 1), repeat=4))
    assert search.result().exhausted and search.count == 16


def test_first_solution_latency_recorded():
    res = binaries(3).enumerate(SolveLimits(max_solutions=1))
    assert res.first_solution_latency is not None and res.first_solution_latency >= 0


def test_evaluate_and_dump():
    m = binaries(2)
    m.add_linear([(1, 0), (-2, 1)], ">=", 0)
    assert m.evaluate(np.array([1, 0])) and not m.evaluate([0, 1])
    assert m.dump().splitlines()[-1] == "c0 +1*x0 -2*x1 >= 0"
