"""Deployment bundles: a component descriptor plus identity, digest and credential.

Signing is simulated: the digest is a SHA-256 over the canonical bundle
content and the credential is a bare principal name that hosts check
against an allow-list.
"""

from __future__ import annotations

import hashlib
import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace

from ..configuration.cdd import Instance
from ..lang.printer import format_component_type


@dataclass(frozen=True)
class Bundle:
    type_name: str
    descriptor: str
    identity: Instance
    ports: tuple  # (port, interface) pairs in declaration order
    credential: str
    digest: str = ""

    def content(self) -> str:
        ports = ";".join(f"{p}:{i}" for p, i in self.ports)
        return f"{self.type_name}\n{self.descriptor}\n{self.identity}\n{ports}\n{self.credential}\n"

    def compute_digest(self) -> str:
        return hashlib.sha256(self.content().encode()).hexdigest()

    @property
    def digest_ok(self) -> bool:
        return self.digest == self.compute_digest()

    def tampered(self) -> "Bundle":
        """A copy whose content no longer matches its digest (for fault tests)."""
        return replace(self, descriptor=self.descriptor + " ")


def descriptor_text(ctype) -> str:
    return "\n".join(format_component_type(ctype))


def package(ctype, identity: Instance, credential: str) -> Bundle:
    b = Bundle(ctype.name, descriptor_text(ctype), identity,
               tuple((p.name, p.interface) for p in ctype.requires), credential)
    return replace(b, digest=b.compute_digest())


def serialize_bundle(b: Bundle) -> str:
    root = ET.Element("bundle")
    desc = ET.SubElement(root, "descriptor", {"type": b.type_name})
    desc.text = b.descriptor
    ET.SubElement(root, "identity", {"host": b.identity.host, "type": b.identity.ctype,
                                     "index": str(b.identity.index)})
    for port, iface in b.ports:
        ET.SubElement(root, "requires", {"port": port, "interface": iface})
    ET.SubElement(root, "digest", {"algorithm": "sha256"}).text = b.digest
    ET.SubElement(root, "credential").text = b.credential
    ET.indent(root, space="  ")
    return ET.tostring(root, encoding="unicode") + "\n"


def parse_bundle(text: str) -> Bundle:
    root = ET.fromstring(text)
    if root.tag != "bundle":
        raise ValueError(f"unknown root element <{root.tag}>")
    desc = root.find("descriptor")
    ident = root.find("identity")
    if desc is None or ident is None or root.find("digest") is None or root.find("credential") is None:
        raise ValueError("bundle lacks descriptor, identity, digest or credential")
    return Bundle(
        desc.get("type"),
        desc.text or "",
        Instance(ident.get("host"), ident.get("type"), int(ident.get("index"))),
        tuple((r.get("port"), r.get("interface")) for r in root.findall("requires")),
        root.find("credential").text or "",
        root.find("digest").text or "",
    )
