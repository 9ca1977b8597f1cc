"""Scripted stand-ins for component implementations.

A behaviour's ``handle`` is a generator: it yields ``(port, request)`` to
call out through one of the component's smart proxies and receives the
response; its return value is the reply.  Dynamic property providers are
methods looked up by the name given in ``providedBy``.
"""

from __future__ import annotations

import random


class CallFailed(Exception):
    pass


class Behavior:
    def __init__(self, rng: random.Random):
        self.rng = rng

    def handle(self, interface: str, request):
        return ("echo", request)
        yield  # pragma: no cover - makes this a generator

    def provide(self, method: str) -> int:
        fn = getattr(self, method, None)
        if callable(fn):
            return int(fn())
        return self.rng.randint(0, 100)

    def call_method(self, method: str):
        """Life-cycle hook (instantiate/initialise/destroy/setter); scripted no-op."""
        return None


class AdditionBehavior(Behavior):
    def handle(self, interface, request):
        op, a, b = request
        if op != "add":
            raise CallFailed(f"addition cannot {op}")
        return a + b
        yield  # pragma: no cover


class MultiplicationBehavior(Behavior):
    def handle(self, interface, request):
        op, a, b = request
        if op != "mul":
            raise CallFailed(f"multiplication cannot {op}")
        return a * b
        yield  # pragma: no cover


class MathsBehavior(Behavior):
    """``("addmul", a, b, c)`` computes (a + b) * c through both required services."""

    def handle(self, interface, request):
        op = request[0]
        if op == "addmul":
            _, a, b, c = request
            total = yield ("addition", ("add", a, b))
            return (yield ("multiplication", ("mul", total, c)))
        if op == "add":
            return (yield ("addition", request))
        if op == "mul":
            return (yield ("multiplication", request))
        raise CallFailed(f"maths cannot {op}")

    def qps(self) -> int:
        return self.rng.randint(50, 150)


class EchoClientBehavior(Behavior):
    """Forwards every request to its single required port."""

    def __init__(self, rng, port: str = "server"):
        super().__init__(rng)
        self.port = port

    def handle(self, interface, request):
        return (yield (self.port, request))


class BehaviorRegistry:
    """Maps instantiate class names or implementation URLs to behaviour factories."""

    def __init__(self):
        self._factories: dict = {}

    def register(self, key: str, factory):
        self._factories[key] = factory

    def create(self, ctype, rng: random.Random) -> Behavior:
        for key in (ctype.instantiate.class_name, ctype.implementation, ctype.name):
            if key in self._factories:
                return self._factories[key](rng)
        if len(ctype.requires) == 1:
            return EchoClientBehavior(rng, ctype.requires[0].name)
        return Behavior(rng)

    def copy(self) -> "BehaviorRegistry":
        out = BehaviorRegistry()
        out._factories = dict(self._factories)
        return out


def default_registry() -> BehaviorRegistry:
    reg = BehaviorRegistry()
    reg.register("com.math.MathsService", MathsBehavior)
    reg.register("com.math.AdditionService", AdditionBehavior)
    reg.register("com.math.MultiplicationService", MultiplicationBehavior)
    return reg
