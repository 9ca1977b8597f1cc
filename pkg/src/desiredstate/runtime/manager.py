"""Component managers, smart proxies, calls and thin-server hosts."""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from ..configuration.cdd import Instance
from .bundle import Bundle


class ManagerState(enum.Enum):
    DELIVERED = "Delivered"
    VERIFIED = "Verified"
    INSTANTIATED = "Instantiated"
    BOUND = "Bound"
    RUNNING = "Running"
    DESTROYING = "Destroying"
    TERMINATED = "Terminated"
    FAILED = "Failed"


S = ManagerState

_ALLOWED = {
    S.DELIVERED: {S.VERIFIED},
    S.VERIFIED: {S.INSTANTIATED, S.DESTROYING},
    S.INSTANTIATED: {S.BOUND, S.DESTROYING},
    S.BOUND: {S.RUNNING, S.DESTROYING},
    S.RUNNING: {S.DESTROYING},
    S.DESTROYING: {S.TERMINATED},
    S.TERMINATED: set(),
    S.FAILED: set(),
}
LIVE = {S.DELIVERED, S.VERIFIED, S.INSTANTIATED, S.BOUND, S.RUNNING, S.DESTROYING}


class IllegalTransition(RuntimeError):
    pass


class Call:
    """One request travelling through the simulator."""

    FINAL = ("responded", "rejected", "dropped", "failed")

    def __init__(self, cid: int, caller: str, port: str, request, done):
        self.id = cid
        self.caller = caller
        self.port = port
        self.request = request
        self.target: Optional[Instance] = None
        self.status = "pending"
        self.result = None
        self.reason = ""
        self.done = done  # simpy event, succeeded when the call reaches a final status
        self.issued_at = None
        self.finished_at = None

    @property
    def name(self) -> str:
        return f"call#{self.id}"

    @property
    def finished(self) -> bool:
        return self.status in self.FINAL

    def __repr__(self) -> str:
        return f"Call({self.id}, {self.caller}.{self.port}, {self.request!r}, {self.status})"


@dataclass(eq=False)
class SmartProxy:
    """Client-side stand-in for a required port; queues calls until bound."""

    port: str
    interface: str
    target: Optional[Instance] = None
    disabled: bool = False
    queue: deque = field(default_factory=deque)

    @property
    def binding(self) -> str:
        if self.disabled:
            return "disabled"
        return "unbound" if self.target is None else f"bound({self.target})"

    @property
    def bound(self) -> bool:
        return self.target is not None and not self.disabled


class ComponentManager:
    def __init__(self, instance: Instance, ctype, bundle: Bundle, log):
        self.instance = instance
        self.ctype = ctype
        self.bundle = bundle
        self.log = log
        self.state = S.DELIVERED
        self.history: list[tuple[int, ManagerState]] = [(log.env.now, S.DELIVERED)]
        self.proxies: dict[str, SmartProxy] = {}
        self.endpoints: dict[str, bool] = {}
        self.behavior = None
        self.in_flight: list[Call] = []

    def __repr__(self) -> str:
        return f"ComponentManager({self.instance}, {self.state.value})"

    @property
    def live(self) -> bool:
        return self.state in LIVE

    @property
    def running(self) -> bool:
        return self.state is S.RUNNING

    def transition(self, new: ManagerState, detail: str = ""):
        if new is S.FAILED:
            if not self.live:
                raise IllegalTransition(f"{self.instance}: {self.state.value} -> Failed")
        elif new not in _ALLOWED[self.state]:
            raise IllegalTransition(f"{self.instance}: {self.state.value} -> {new.value}")
        old = self.state
        self.state = new
        self.history.append((self.log.env.now, new))
        msg = f"{old.value}->{new.value}"
        self.log.emit("manager", self.instance, f"{msg} {detail}".rstrip())

    def all_bound(self) -> bool:
        return all(p.bound for p in self.proxies.values())


class SimHost:
    """A thin server: exposes only ``fire`` and checks the bundle before instantiating."""

    def __init__(self, name: str, properties: dict, principals, log):
        self.name = name
        self.properties = dict(properties)
        self.principals = frozenset(principals)
        self.status = "up"
        self.managers: dict[Instance, ComponentManager] = {}
        self.log = log

    def __repr__(self) -> str:
        return f"SimHost({self.name}, {self.status})"

    @property
    def up(self) -> bool:
        return self.status == "up"

    def fire(self, bundle: Bundle, ctype) -> Optional[ComponentManager]:
        inst = bundle.identity
        if not self.up:
            self.log.emit("deliver", inst, f"failed host {self.name} down")
            return None
        self.log.emit("deliver", inst, f"to {self.name} digest={bundle.digest[:12]}")
        if not bundle.digest_ok:
            self.log.emit("verify", inst, "rejected digest-mismatch")
            return None
        if bundle.credential not in self.principals:
            self.log.emit("verify", inst, f"rejected unknown-principal {bundle.credential}")
            return None
        if inst.host != self.name:
            self.log.emit("verify", inst, f"rejected identity-host-mismatch at {self.name}")
            return None
        existing = self.managers.get(inst)
        if existing is not None and existing.live:
            self.log.emit("verify", inst, "rejected identity-in-use")
            return None
        mgr = ComponentManager(inst, ctype, bundle, self.log)
        mgr.transition(S.VERIFIED, f"principal={bundle.credential}")
        self.managers[inst] = mgr
        return mgr
