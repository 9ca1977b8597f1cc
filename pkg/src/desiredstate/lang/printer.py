"""Canonical pretty-printer for resolved descriptions.

The output reparses and resolves to a structurally equal description, and
doubles as the byte-stable serialization used for digests.
"""

from __future__ import annotations

from . import expr as ex
from .model import DesiredStateDescription, Property


def quote(value) -> str:
    if isinstance(value, int):
        return str(value)
    escaped = value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{escaped}"'


def _property(p: Property) -> str:
    head = f"{p.kind} {p.value_type} {p.name}"
    if p.provider is not None:
        return f"{head} providedBy {p.provider.ref}.{p.provider.method}()"
    if p.value is not None:
        return f"{head} = {quote(p.value)}"
    return head


def _assignments(pairs) -> str:
    return ", ".join(f"{k} = {quote(v)}" for k, v in pairs)


def format_component_type(c) -> list[str]:
    """Source lines for one component type declaration."""
    out: list[str] = []
    emit = out.append
    head = f"component type {c.name}"
    if c.extends:
        head += f" extends {c.extends}"
    emit(head + " (")
    if c.provides:
        emit("  provides " + ", ".join(f"interface {p}" for p in c.provides))
    if c.requires:
        emit("  requires " + ", ".join(f"{p.interface} {p.name}" for p in c.requires))
    emit(f"  implementation {quote(c.implementation)}")
    inst = c.instantiate
    args = ", ".join(quote(a) for a in inst.args)
    emit(f"  instantiate {inst.ref} with {inst.class_name}({args})")
    for s in c.satisfy:
        emit(f"  satisfy {s.interface} using {s.ref}")
    for b in c.bind:
        emit(f"  bind {b.port} with {b.ref}.{b.method}()")
    for m in c.initialise:
        emit(f"  initialise {m.ref}.{m.method}()")
    for m in c.destroy:
        emit(f"  destroy {m.ref}.{m.method}()")
    if c.properties:
        emit("  properties (")
        for p in c.properties:
            emit(f"    {_property(p)}")
        emit("  )")
    emit(")")
    return out


def pretty_print(dsd: DesiredStateDescription) -> str:
    out: list[str] = []
    emit = out.append

    for i in dsd.interfaces:
        emit(f"interface {i.name} (")
        emit(f"  type = {quote(i.impl_type)}")
        emit(f"  specification = {quote(i.specification)}")
        emit(f"  implementation = {quote(i.implementation)}")
        emit(")")
        emit("")

    for t in dsd.templates:
        emit(f"template {t.name} (")
        if t.provides:
            emit("  provides " + ", ".join(f"interface {p}" for p in t.provides))
        if t.requires:
            emit("  requires " + ", ".join(f"{p.interface} {p.name}" for p in t.requires))
        if t.properties:
            emit("  properties (")
            for p in t.properties:
                emit(f"    {_property(p)}")
            emit("  )")
        emit(")")
        emit("")

    for c in dsd.component_types:
        out.extend(format_component_type(c))
        emit("")

    for ht in dsd.host_templates:
        emit(f"host template {ht.name} ({_assignments(ht.properties)})")
    for h in dsd.hosts:
        head = f"host {h.name}"
        if h.extends:
            head += f" extends {h.extends}"
        emit(f"{head} ({_assignments(h.properties)})")
    if dsd.host_templates or dsd.hosts:
        emit("")

    emit(f"deployment (maxInstancesPerHost = {dsd.max_instances_per_host})")
    emit("")

    for cs in dsd.constraint_sets:
        emit(f"constraintSet {cs.name} (")
        if cs.expr is not None:
            emit(ex.format_expr(cs.expr, 1))
        emit(")")
        emit("")

    if dsd.optimisation is not None:
        emit(f"optimise {dsd.optimisation.direction} {ex.format_term(dsd.optimisation.term)}")
        emit("")

    return "\n".join(out).rstrip("\n") + "\n"
