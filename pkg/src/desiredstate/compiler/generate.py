"""Placement and topology variables plus the default linking constraints."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

from ..configuration.cdd import Instance
from ..csp import Model
from ..lang import DesiredStateDescription

log = logging.getLogger(__name__)

PotentialInstance = Instance


@dataclass(frozen=True)
class PotentialConnection:
    client: Instance
    port: str
    server: Instance
    provided: str


@dataclass
class SpecializedCsp:
    """A generated model together with the maps needed to read it back."""

    dsd: DesiredStateDescription
    model: Model = field(default_factory=Model)
    # (host, type, count) -> var
    placement: dict = field(default_factory=dict)
    connections: list = field(default_factory=list)  # PotentialConnection, index-aligned with conn_vars
    conn_vars: list = field(default_factory=list)
    incoming: dict = field(default_factory=dict)  # (server, interface) -> [var]
    outgoing: dict = field(default_factory=dict)  # (client, port) -> [var]
    compile_time: list = field(default_factory=list)  # Conjunct
    runtime: list = field(default_factory=list)  # Conjunct
    warnings: list = field(default_factory=list)
    families: dict = field(default_factory=dict)  # conjunct label -> {family: count}
    _var_info: dict = field(default_factory=dict)

    @property
    def num_variables(self) -> int:
        return self.model.num_variables

    @property
    def max_count(self) -> int:
        return self.dsd.max_instances_per_host

    def potential_instances(self, type_names=None) -> list[Instance]:
        types = self.dsd.type_names if type_names is None else type_names
        return [
            Instance(h, t, i)
            for h in self.dsd.host_names
            for t in types
            for i in range(1, self.max_count + 1)
        ]

    def existence(self, inst: Instance) -> list[tuple[int, int]]:
        """Linear terms equal to 1 iff ``inst`` exists: sum of count vars >= index."""
        return [
            (1, self.placement[(inst.host, inst.ctype, c)])
            for c in range(inst.index, self.max_count + 1)
        ]

    def instance_count(self, host: str, type_names) -> list[tuple[int, int]]:
        """Linear terms counting instances of ``type_names`` on ``host``."""
        return [
            (c, self.placement[(host, t, c)])
            for t in type_names
            for c in range(1, self.max_count + 1)
        ]

    def var_label(self, var: int):
        return self.model.variables[var].label

    def connection_of(self, var: int) -> Optional[PotentialConnection]:
        return self._var_info.get(var)


def generate_model(dsd: DesiredStateDescription) -> SpecializedCsp:
    """Create placement and connection variables with the default constraints.

    Placement uses one indicator per (host, type, count) meaning "exactly
    count instances"; at most one may be set per (host, type).  Connection
    variables exist only between interface-compatible endpoints.  For each
    (client instance, port) the connection variables sum to the client's
    existence, and every connection implies its server exists.
    """
    csp = SpecializedCsp(dsd)
    model = csp.model
    cmax = dsd.max_instances_per_host

    for h in dsd.host_names:
        for t in dsd.type_names:
            for c in range(1, cmax + 1):
                csp.placement[(h, t, c)] = model.add_variable((0, 1), ("place", h, t, c))

    providers: dict[str, list[Instance]] = {}
    for t in dsd.component_types:
        for iface in t.provides:
            providers.setdefault(iface, [])
    instances = csp.potential_instances()
    for inst in instances:
        for iface in dsd.component_type(inst.ctype).provides:
            providers[iface].append(inst)

    for client in instances:
        ctype = dsd.component_type(client.ctype)
        for port in ctype.requires:
            vars_ = []
            for server in providers.get(port.interface, []):
                pc = PotentialConnection(client, port.name, server, port.interface)
                var = model.add_variable((0, 1), ("conn", str(client), port.name, str(server)))
                csp.connections.append(pc)
                csp.conn_vars.append(var)
                csp._var_info[var] = pc
                csp.incoming.setdefault((server, port.interface), []).append(var)
                vars_.append(var)
            csp.outgoing[(client, port.name)] = vars_

    for h in dsd.host_names:
        for t in dsd.type_names:
            if cmax > 1:
                model.add_linear(
                    [(1, csp.placement[(h, t, c)]) for c in range(1, cmax + 1)], "<=", 1, tag="default:at-most-one-count"
                )

    for pc, var in zip(csp.connections, csp.conn_vars):
        model.add_linear([(1, var)] + [(-a, v) for a, v in csp.existence(pc.server)], "<=", 0,
                         tag="default:connection-needs-server")

    warned = set()
    for client in instances:
        for port in dsd.component_type(client.ctype).requires:
            vars_ = csp.outgoing[(client, port.name)]
            terms = [(1, v) for v in vars_] + [(-a, v) for a, v in csp.existence(client)]
            model.add_linear(terms, "=", 0, tag="default:exactly-one-binding")
            if not vars_ and (client.ctype, port.name) not in warned:
                warned.add((client.ctype, port.name))
                csp.warnings.append(
                    f"no component type provides {port.interface} required by "
                    f"{client.ctype}.{port.name}; {client.ctype} cannot be deployed"
                )
    for w in csp.warnings:
        log.warning(w)
    return csp
