"""Independent oracles: closed-form counts and brute-force enumerators.

None of this touches the solver or the compiler's encoding.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb, factorial

import numpy as np

from desiredstate.configuration import ConfigurationDescription, Connection, Instance, validate


def _count_vectors(length: int, cap: int) -> dict:
    """number of vectors in {0..cap}^length with each possible sum."""
    out: dict = {}
    for vec in itertools.product(range(cap + 1), repeat=length):
        out[sum(vec)] = out.get(sum(vec), 0) + 1
    return out


def _pow(base: int, exp: int) -> int:
    if exp == 0:
        return 1
    return base**exp  # 0**k = 0 for k > 0: a client with no server


def client_server_count(hosts: int, cap: int) -> int:
    """Client/server pair, up to ``cap`` of each type per host, no constraints.

    Clients and servers are placed by per-host counts; each client instance
    independently picks one server instance.
    """
    n = _count_vectors(hosts, cap)
    return sum(nc * ns * _pow(s, c) for c, nc in n.items() for s, ns in n.items())


def client_server_one_per_host(hosts: int) -> int:
    """Client/server pair with at most one component on any host."""
    total = 0
    for labels in itertools.product((0, 1, 2), repeat=hosts):  # empty, client, server
        k, m = labels.count(1), labels.count(2)
        total += _pow(m, k)
    return total


@lru_cache(maxsize=None)
def capped_assignments(clients: int, servers: int, cap: int) -> int:
    """Functions from ``clients`` items to ``servers`` bins with every bin holding at most ``cap``."""
    if clients == 0:
        return 1
    if servers == 0:
        return 0
    # choose how many items land in the last bin
    return sum(comb(clients, j) * capped_assignments(clients - j, servers - 1, cap) for j in range(min(cap, clients) + 1))


def maths_count(fast: int, slow: int, min_maths: int = 3, fan_in: int = 2) -> int:
    """The maths example: Maths only on fast hosts, at most one component per host,
    at least ``min_maths`` Maths, each Addition serving at most ``fan_in`` clients."""
    hosts = fast + slow
    total = 0
    for m in range(min_maths, fast + 1):
        rest = hosts - m
        for a in range(rest + 1):
            for u in range(rest - a + 1):
                labelings = comb(fast, m) * factorial(rest) // (factorial(a) * factorial(u) * factorial(rest - a - u))
                total += labelings * capped_assignments(m, a, fan_in) * _pow(u, m)
    return total


def brute_force_count(model) -> int:
    """Count satisfying 0/1 assignments by direct evaluation of every constraint."""
    n = model.num_variables
    if model.contradiction:
        return 0
    if n == 0:
        return 1
    grid = ((np.arange(2**n)[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.int64)
    ok = np.ones(len(grid), dtype=bool)
    for c in model.constraints:
        s = np.zeros(len(grid), dtype=np.int64)
        for a, v in c.terms:
            s += a * grid[:, v]
        if c.relation == "<=":
            ok &= s <= c.bound
        elif c.relation == ">=":
            ok &= s >= c.bound
        else:
            ok &= s == c.bound
    return int(ok.sum())


def brute_force_solutions(model) -> list[tuple]:
    """All satisfying assignments, in lexicographic order."""
    n = model.num_variables
    out = []
    for bits in itertools.product((0, 1), repeat=n):
        if model.evaluate(bits):
            out.append(bits)
    return out


def all_closed_cdds(dsd):
    """Every well-formed configuration with complete bindings, regardless of constraints.

    Placement: each (host, type) gets a count 0..max; connections: every
    required port of every instance picks one compatible provider instance.
    """
    cmax = dsd.max_instances_per_host
    slots = [(h, t) for h in dsd.host_names for t in dsd.type_names]
    for counts in itertools.product(range(cmax + 1), repeat=len(slots)):
        instances = [Instance(h, t, i) for (h, t), c in zip(slots, counts) for i in range(1, c + 1)]
        choices = []
        for inst in instances:
            for port in dsd.component_type(inst.ctype).requires:
                providers = [s for s in instances if port.interface in dsd.component_type(s.ctype).provides]
                choices.append([Connection(inst, port.name, s) for s in providers])
        for picked in itertools.product(*choices):
            yield ConfigurationDescription(dsd.name, instances, picked)


def compliant_cdds(dsd) -> set:
    return {c for c in all_closed_cdds(dsd) if validate(c, dsd).compliant}
