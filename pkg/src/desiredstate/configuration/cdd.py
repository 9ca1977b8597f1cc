"""Configuration description documents (CDDs) and their XML form."""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field


@dataclass(frozen=True, order=True)
class Instance:
    """A component instance, identified by (host, type, index)."""

    host: str
    ctype: str
    index: int

    def __str__(self) -> str:
        return f"{self.host}/{self.ctype}/{self.index}"

    @classmethod
    def parse(cls, text: str) -> "Instance":
        parts = text.split("/")
        if len(parts) != 3 or not parts[2].isdigit():
            raise ValueError(f"bad instance {text!r}; expected host/type/index")
        return cls(parts[0], parts[1], int(parts[2]))


@dataclass(frozen=True, order=True)
class Connection:
    """A binding of ``client``'s required ``port`` to ``server``."""

    client: Instance
    port: str
    server: Instance

    def __str__(self) -> str:
        return f"{self.client}.{self.port}->{self.server}"


@dataclass(frozen=True)
class ConfigurationDescription:
    dsd_ref: str
    instances: frozenset = frozenset()
    connections: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "instances", frozenset(self.instances))
        object.__setattr__(self, "connections", frozenset(self.connections))

    @property
    def sorted_instances(self) -> list[Instance]:
        return sorted(self.instances)

    @property
    def sorted_connections(self) -> list[Connection]:
        return sorted(self.connections)

    def connection_for(self, client: Instance, port: str):
        for c in self.connections:
            if c.client == client and c.port == port:
                return c
        return None

    def outgoing(self) -> dict:
        """Map (client, port) -> list of connections."""
        out: dict = {}
        for c in self.connections:
            out.setdefault((c.client, c.port), []).append(c)
        return out

    def dangling(self) -> list[Connection]:
        return sorted(
            c for c in self.connections if c.client not in self.instances or c.server not in self.instances
        )

    def on_host(self, host: str) -> list[Instance]:
        return sorted(i for i in self.instances if i.host == host)

    def __len__(self) -> int:
        return len(self.instances)


class CddFormatError(ValueError):
    pass


_INSTANCE_ATTRS = ("host", "type", "index")
_CONNECTION_ATTRS = (
    "client-host",
    "client-type",
    "client-index",
    "port",
    "server-host",
    "server-type",
    "server-index",
)


def serialize_cdd(cdd: ConfigurationDescription) -> str:
    """Canonical XML: instances then connections, each sorted."""
    root = ET.Element("cdd", {"dsd": cdd.dsd_ref})
    for inst in cdd.sorted_instances:
        ET.SubElement(root, "instance", {"host": inst.host, "type": inst.ctype, "index": str(inst.index)})
    for c in cdd.sorted_connections:
        ET.SubElement(
            root,
            "connection",
            {
                "client-host": c.client.host,
                "client-type": c.client.ctype,
                "client-index": str(c.client.index),
                "port": c.port,
                "server-host": c.server.host,
                "server-type": c.server.ctype,
                "server-index": str(c.server.index),
            },
        )
    ET.indent(root, space="  ")
    return ET.tostring(root, encoding="unicode") + "\n"


def _attrs(elem, names) -> dict:
    extra = set(elem.attrib) - set(names)
    if extra:
        raise CddFormatError(f"unknown attribute(s) {sorted(extra)} on <{elem.tag}>")
    missing = [n for n in names if n not in elem.attrib]
    if missing:
        raise CddFormatError(f"<{elem.tag}> is missing attribute(s) {missing}")
    return elem.attrib


def _index(text: str) -> int:
    if not text.isdigit() or int(text) < 1:
        raise CddFormatError(f"bad instance index {text!r}")
    return int(text)


def parse_cdd(text: str) -> ConfigurationDescription:
    try:
        root = ET.fromstring(text)
    except ET.ParseError as exc:
        raise CddFormatError(f"malformed XML: {exc}") from exc
    if root.tag != "cdd":
        raise CddFormatError(f"unknown root element <{root.tag}>")
    dsd_ref = _attrs(root, ("dsd",))["dsd"]
    instances = set()
    connections = set()
    for child in root:
        if child.tag == "instance":
            a = _attrs(child, _INSTANCE_ATTRS)
            instances.add(Instance(a["host"], a["type"], _index(a["index"])))
        elif child.tag == "connection":
            a = _attrs(child, _CONNECTION_ATTRS)
            connections.add(
                Connection(
                    Instance(a["client-host"], a["client-type"], _index(a["client-index"])),
                    a["port"],
                    Instance(a["server-host"], a["server-type"], _index(a["server-index"])),
                )
            )
        else:
            raise CddFormatError(f"unknown element <{child.tag}>")
    cdd = ConfigurationDescription(dsd_ref, frozenset(instances), frozenset(connections))
    dangling = cdd.dangling()
    if dangling:
        raise CddFormatError(f"dangling connection endpoint in {dangling[0]}")
    return cdd
