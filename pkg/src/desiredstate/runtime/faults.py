"""Fault records and the fault-script file format.

One record per line::

    at <t> host-crash <host>
    at <t> component-crash <host>/<type>/<index>
    at <t> set <host>/<type>/<index> <property> <value>

Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..configuration.cdd import Instance

KINDS = ("host-crash", "component-crash", "property-set")


class FaultScriptError(ValueError):
    pass


@dataclass(frozen=True)
class Fault:
    time: int
    kind: str
    target: str  # host name or instance text
    prop: Optional[str] = None
    value: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown fault kind {self.kind!r}")
        if self.time < 0:
            raise ValueError("fault time must be non-negative")

    @property
    def instance(self) -> Instance:
        return Instance.parse(self.target)

    def __str__(self) -> str:
        if self.kind == "property-set":
            return f"at {self.time} set {self.target} {self.prop} {self.value}"
        return f"at {self.time} {self.kind} {self.target}"


def host_crash(host: str, time: int = 0) -> Fault:
    return Fault(time, "host-crash", host)


def component_crash(instance, time: int = 0) -> Fault:
    return Fault(time, "component-crash", str(instance))


def property_set(instance, prop: str, value: int, time: int = 0) -> Fault:
    return Fault(time, "property-set", str(instance), prop, int(value))


def parse_fault_script(text: str) -> list[Fault]:
    faults = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        try:
            if parts[0] != "at" or len(parts) < 4:
                raise ValueError("expected 'at <t> <fault> ...'")
            t = int(parts[1])
            verb = parts[2]
            if verb == "host-crash" and len(parts) == 4:
                faults.append(host_crash(parts[3], t))
            elif verb == "component-crash" and len(parts) == 4:
                Instance.parse(parts[3])
                faults.append(component_crash(parts[3], t))
            elif verb == "set" and len(parts) == 6:
                Instance.parse(parts[3])
                faults.append(property_set(parts[3], parts[4], int(parts[5]), t))
            else:
                raise ValueError(f"cannot read fault {' '.join(parts[2:])!r}")
        except ValueError as exc:
            raise FaultScriptError(f"line {lineno}: {exc}") from None
    return sorted(faults, key=lambda f: f.time)  # stable: equal times keep file order


def format_fault_script(faults) -> str:
    return "".join(f"{f}\n" for f in faults)
