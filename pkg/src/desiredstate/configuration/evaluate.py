"""Direct evaluation of constraint expressions on a concrete configuration.

This is deliberately independent of the compiler: no linearisation, no
solver, just the meaning of each construct applied to a CDD.  It backs the
compliance validator, runtime assertion probes and objective ranking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..lang import DesiredStateDescription
from ..lang import expr as ex
from .cdd import ConfigurationDescription, Instance


class Undefined(Exception):
    """A term has no value (missing host property or unsampled dynamic property)."""


@dataclass
class Context:
    dsd: DesiredStateDescription
    cdd: ConfigurationDescription
    # (instance, property) -> int; consulted for dynamic properties
    dynamic: dict = field(default_factory=dict)
    witnesses: list = field(default_factory=list)
    max_witnesses: int = 20

    def types_of(self, name: str) -> set:
        return set(self.dsd.concrete_types(name))


def _host(node, env) -> str:
    if isinstance(node, ex.HostRef):
        return node.name
    if isinstance(node, ex.HostVar):
        return env[node.name]
    if isinstance(node, ex.HostOf):
        return env[node.var.name].host
    raise TypeError(f"not a host reference: {node!r}")


def value(node, ctx: Context, env: dict) -> int:
    if isinstance(node, ex.IntLit):
        return node.value
    if isinstance(node, ex.PropertyOf):
        if isinstance(node.target, ex.VarRef):
            inst: Instance = env[node.target.name]
            prop = ctx.dsd.component_type(inst.ctype).property(node.prop)
            if prop is None:
                raise Undefined(f"{inst} has no property {node.prop}")
            if prop.is_dynamic:
                if (inst, node.prop) not in ctx.dynamic:
                    raise Undefined(f"{inst}.{node.prop} not sampled")
                return ctx.dynamic[(inst, node.prop)]
            return prop.value
        name = _host(node.target, env)
        if not ctx.dsd.has_host(name) or not ctx.dsd.host(name).has(node.prop):
            raise Undefined(f"host {name} has no property {node.prop}")
        host = ctx.dsd.host(name)
        return host.get(node.prop)
    if isinstance(node, ex.Card):
        return len(members(node.of, ctx, env))
    raise TypeError(f"not an integer term: {node!r}")


def members(node, ctx: Context, env: dict) -> list:
    cdd = ctx.cdd
    if isinstance(node, ex.InstancesOf):
        types = ctx.types_of(node.type_name)
        return [i for i in cdd.instances if i.ctype in types]
    if isinstance(node, ex.ComponentsOn):
        host = _host(node.host, env)
        return [i for i in cdd.instances if i.host == host]
    if isinstance(node, ex.Connections):
        inst: Instance = env[node.var.name]
        ctype = ctx.dsd.component_type(inst.ctype)
        if node.interface in ctype.provides:
            # incoming: connections whose server is inst through a port of that interface
            out = []
            for c in cdd.connections:
                if c.server != inst:
                    continue
                port = ctx.dsd.component_type(c.client.ctype).port(c.port)
                if port is not None and port.interface == node.interface:
                    out.append(c)
            return out
        ports = {p.name for p in ctype.requires if node.interface in (p.name, p.interface)}
        return [c for c in cdd.connections if c.client == inst and c.port in ports]
    raise TypeError(f"not a set term: {node!r}")


def holds(f, ctx: Context, env: Optional[dict] = None) -> bool:
    """Truth of formula ``f``; failures of quantified bodies are recorded as witnesses."""
    env = env or {}
    if isinstance(f, ex.Compare):
        try:
            left, right = value(f.left, ctx, env), value(f.right, ctx, env)
        except Undefined:
            return False
        return _compare(f.op, left, right)
    if isinstance(f, ex.And):
        return all([holds(i, ctx, env) for i in f.items])
    if isinstance(f, ex.Or):
        return any(holds(i, ctx, dict(env)) for i in f.items)
    if isinstance(f, ex.Not):
        return not holds(f.item, Context(ctx.dsd, ctx.cdd, ctx.dynamic), env)
    if isinstance(f, ex.ForallHosts):
        ok = True
        for h in ctx.dsd.host_names:
            if not holds(f.body, ctx, {**env, f.var: h}):
                ok = False
                _witness(ctx, f"{f.var}={h}")
        return ok
    if isinstance(f, ex.ForallComponents):
        types = ctx.types_of(f.type_name)
        ok = True
        for inst in sorted(i for i in ctx.cdd.instances if i.ctype in types):
            if not holds(f.body, ctx, {**env, f.var: inst}):
                ok = False
                _witness(ctx, f"{f.var}={inst}")
        return ok
    raise TypeError(f"not a formula: {f!r}")


def _witness(ctx: Context, text: str):
    if len(ctx.witnesses) < ctx.max_witnesses:
        ctx.witnesses.append(text)


def _compare(op: str, a: int, b: int) -> bool:
    if op == "<=":
        return a <= b
    if op == ">=":
        return a >= b
    if op == "<":
        return a < b
    if op == ">":
        return a > b
    return a == b


def evaluate_conjunct(expr, dsd, cdd, dynamic=None) -> tuple[bool, list]:
    """(holds, witnesses) for one conjunct.  A failing unquantified comparison
    gets its evaluated sides as the witness."""
    ctx = Context(dsd, cdd, dict(dynamic or {}))
    ok = holds(expr, ctx)
    if not ok and not ctx.witnesses:
        ctx.witnesses.append(_describe(expr, ctx))
    return ok, ctx.witnesses


def _describe(f, ctx: Context) -> str:
    if isinstance(f, ex.Compare):
        parts = []
        for side in (f.left, f.right):
            try:
                parts.append(str(value(side, ctx, {})))
            except Undefined as exc:
                parts.append(f"undefined ({exc})")
        return f"{ex.format_term(f.left)} = {parts[0]}, required {f.op} {parts[1]}"
    return " ".join(ex.format_expr(f).split())


def objective_value(dsd: DesiredStateDescription, cdd: ConfigurationDescription, dynamic=None) -> int:
    return value(dsd.optimisation.term, Context(dsd, cdd, dict(dynamic or {})), {})


def rank_by_objective(cdds: list, dsd: DesiredStateDescription) -> list:
    """Stable sort by the optimisation directive, best first."""
    if dsd.optimisation is None:
        return list(cdds)
    sign = 1 if dsd.optimisation.direction == "minimize" else -1
    return sorted(cdds, key=lambda c: sign * objective_value(dsd, c))
