"""Compliance checking of a concrete configuration against a description."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from ..lang import DesiredStateDescription
from ..lang import expr as ex
from .cdd import ConfigurationDescription
from .evaluate import evaluate_conjunct


class UnknownReference(ValueError):
    """The configuration names a host or component type the description lacks."""


@dataclass(frozen=True)
class Record:
    name: str
    status: str  # pass | fail | skipped
    detail: str = ""
    witnesses: tuple = ()

    @property
    def passed(self) -> bool:
        return self.status != "fail"

    def as_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "detail": self.detail, "witnesses": list(self.witnesses)}


@dataclass
class ComplianceReport:
    dsd_ref: str
    records: list = field(default_factory=list)

    @property
    def compliant(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def failures(self) -> list[Record]:
        return [r for r in self.records if not r.passed]

    def record(self, name: str) -> Optional[Record]:
        return next((r for r in self.records if r.name == name), None)

    def to_text(self) -> str:
        lines = [f"compliant={str(self.compliant).lower()} dsd={self.dsd_ref}"]
        for r in self.records:
            line = f"{r.status:7} {r.name}"
            if r.detail:
                line += f"  {r.detail}"
            lines.append(line)
            for w in r.witnesses:
                lines.append(f"        witness: {w}")
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps({"compliant": self.compliant, "dsd": self.dsd_ref,
                           "records": [r.as_dict() for r in self.records]}, indent=2)


def _check_references(cdd: ConfigurationDescription, dsd: DesiredStateDescription):
    for inst in cdd.instances:
        if not dsd.has_host(inst.host):
            raise UnknownReference(f"unknown host {inst.host!r} in instance {inst}")
        if not dsd.has_type(inst.ctype):
            raise UnknownReference(f"unknown component type {inst.ctype!r} in instance {inst}")


def well_formedness(cdd: ConfigurationDescription, dsd: DesiredStateDescription) -> Record:
    """Endpoints exist, indices are contiguous and within the per-host bound."""
    problems = []
    for c in cdd.dangling():
        problems.append(f"dangling connection {c}")
    by_slot: dict = {}
    for inst in cdd.instances:
        by_slot.setdefault((inst.host, inst.ctype), []).append(inst.index)
    for (h, t), idx in sorted(by_slot.items()):
        if sorted(idx) != list(range(1, len(idx) + 1)):
            problems.append(f"non-contiguous indices for {t} on {h}: {sorted(idx)}")
        if len(idx) > dsd.max_instances_per_host:
            problems.append(f"{len(idx)} instances of {t} on {h} exceed maxInstancesPerHost={dsd.max_instances_per_host}")
    if problems:
        return Record("well-formed", "fail", f"{len(problems)} problem(s)", tuple(problems))
    return Record("well-formed", "pass")


def binding_completeness(cdd: ConfigurationDescription, dsd: DesiredStateDescription) -> Record:
    """Each required port of each instance is connected exactly once to a compatible provider."""
    out = cdd.outgoing()
    problems = []
    for inst in cdd.sorted_instances:
        ctype = dsd.component_type(inst.ctype)
        for port in ctype.requires:
            conns = out.get((inst, port.name), [])
            if len(conns) != 1:
                problems.append(f"({inst}, {port.name}) has {len(conns)} connections")
                continue
            server = conns[0].server
            if dsd.has_type(server.ctype) and port.interface not in dsd.component_type(server.ctype).provides:
                problems.append(f"({inst}, {port.name}) bound to {server}, which does not provide {port.interface}")
    for (client, port), conns in sorted(out.items()):
        if dsd.has_type(client.ctype) and dsd.component_type(client.ctype).port(port) is None:
            problems.append(f"({client}, {port}) is not a required port of {client.ctype}")
    if problems:
        return Record("binding-completeness", "fail", f"{len(problems)} problem(s)", tuple(problems))
    return Record("binding-completeness", "pass")


def validate(cdd: ConfigurationDescription, dsd: DesiredStateDescription, dynamic_values=None) -> ComplianceReport:
    """Evaluate structure and every conjunct directly on ``cdd``.

    Conjuncts that read dynamic properties are reported ``skipped`` unless
    ``dynamic_values`` ({(instance, property): int}) is given.
    """
    from ..compiler.lower import mentions_dynamic

    _check_references(cdd, dsd)
    report = ComplianceReport(cdd.dsd_ref)
    report.records.append(well_formedness(cdd, dsd))
    report.records.append(binding_completeness(cdd, dsd))
    for conj in dsd.conjuncts():
        text = " ".join(ex.format_expr(conj.expr).split())
        if mentions_dynamic(conj.expr, dsd) and dynamic_values is None:
            report.records.append(Record(conj.label, "skipped", f"runtime assertion: {text}"))
            continue
        ok, witnesses = evaluate_conjunct(conj.expr, dsd, cdd, dynamic_values)
        report.records.append(Record(conj.label, "pass" if ok else "fail", text, tuple(witnesses)))
    return report
