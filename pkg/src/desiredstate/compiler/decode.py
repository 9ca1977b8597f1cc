"""Reading solver assignments back as configurations, and compile/solve drivers."""

from __future__ import annotations

from typing import Iterator

import numpy as np

from ..configuration.cdd import ConfigurationDescription, Connection, Instance
from ..csp import Capture, EnumerationResult, SolveLimits
from ..lang import DesiredStateDescription
from .generate import SpecializedCsp, generate_model
from .lower import lower_constraints


def compile_dsd(dsd: DesiredStateDescription) -> SpecializedCsp:
    return lower_constraints(dsd, generate_model(dsd))


def decode(csp: SpecializedCsp, assignment, strict: bool = True) -> ConfigurationDescription:
    """Map an assignment to a CDD.

    Placement indicators give per-(host, type) counts (the largest set count
    wins when an arbitrary assignment sets several); instances 1..count
    exist.  With ``strict`` the result must be closed: every connection
    endpoint is an instance and every instance port has one connection.
    """
    x = np.asarray(assignment)
    counts: dict = {}
    for (h, t, c), var in csp.placement.items():
        if x[var] == 1 and c > counts.get((h, t), 0):
            counts[(h, t)] = c
    instances = frozenset(Instance(h, t, i) for (h, t), c in counts.items() for i in range(1, c + 1))
    conn_vars = np.asarray(csp.conn_vars, dtype=np.int64)
    chosen = np.flatnonzero(x[conn_vars] == 1) if len(conn_vars) else []
    connections = frozenset(
        Connection(csp.connections[k].client, csp.connections[k].port, csp.connections[k].server) for k in chosen
    )
    cdd = ConfigurationDescription(csp.dsd.name, instances, connections)
    if strict:
        _check_closed(csp, cdd)
    return cdd


def _check_closed(csp: SpecializedCsp, cdd: ConfigurationDescription):
    dangling = cdd.dangling()
    if dangling:
        raise ValueError(f"decoded configuration has a dangling connection {dangling[0]}")
    out = cdd.outgoing()
    for inst in cdd.instances:
        for port in csp.dsd.component_type(inst.ctype).requires:
            if len(out.get((inst, port.name), [])) != 1:
                raise ValueError(f"decoded configuration leaves {inst}.{port.name} unbound")


def iter_configurations(csp: SpecializedCsp, limits: SolveLimits | None = None) -> Iterator[ConfigurationDescription]:
    """Stream decoded candidate configurations in enumeration order."""
    for row in csp.model.solutions(limits):
        yield decode(csp, row)


def count_configurations(dsd: DesiredStateDescription, limits: SolveLimits | None = None) -> EnumerationResult:
    """Compile, enumerate, and decode captured solutions into CDDs.

    When the description carries an optimisation directive, captured
    configurations are ranked by it (stable, so ties keep enumeration order).
    """
    csp = compile_dsd(dsd)
    result = csp.model.enumerate(limits)
    result.captured = [decode(csp, row) for row in result.captured]
    if dsd.optimisation is not None and result.captured:
        from ..configuration.evaluate import rank_by_objective

        result.captured = rank_by_objective(result.captured, dsd)
    return result


def explain(csp: SpecializedCsp) -> str:
    """Text report mapping each conjunct to the constraint families it produced."""
    dsd = csp.dsd
    n_place = len(csp.placement)
    lines = [
        f"variables={csp.num_variables} placement={n_place} connection={len(csp.conn_vars)} "
        f"constraints={csp.model.num_constraints}",
        f"hosts={len(dsd.hosts)} types={len(dsd.component_types)} maxInstancesPerHost={dsd.max_instances_per_host}",
    ]
    for conj in dsd.conjuncts():
        fams = csp.families.get(conj.label, {})
        where = "runtime" if conj in csp.runtime else "model"
        fam_text = ", ".join(f"{k}={v}" for k, v in sorted(fams.items())) or "none"
        lines.append(f"{conj.label} [{where}] {conj.text}")
        lines.append(f"  -> {fam_text}")
    for w in csp.warnings:
        lines.append(f"warning: {w}")
    return "\n".join(lines) + "\n"
