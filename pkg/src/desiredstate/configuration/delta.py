"""Differences between configurations and the picker that uses them."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .cdd import ConfigurationDescription, Connection, Instance


@dataclass(frozen=True)
class Weights:
    deploy: int = 1
    undeploy: int = 1
    rebind: int = 1

    def __post_init__(self):
        if min(self.deploy, self.undeploy, self.rebind) < 1:
            raise ValueError("delta weights must be positive integers")

    @classmethod
    def parse(cls, text: str) -> "Weights":
        parts = [int(p) for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError("weights take three comma-separated integers: deploy,undeploy,rebind")
        return cls(*parts)


UNIT = Weights()


@dataclass(frozen=True)
class DeploymentDelta:
    """Ordered actions turning one configuration into another.

    ``binds`` are the initial connections of newly deployed clients and are
    free; ``rebind`` re-targets ports of clients that stay in place;
    ``unbind`` drops a surviving connection with no replacement (only
    possible when the target is not binding-complete).
    """

    dsd_ref: str
    undeploy: tuple = ()
    deploy: tuple = ()
    binds: tuple = ()
    rebind: tuple = ()
    unbind: tuple = ()
    cost: int = 0

    @property
    def is_empty(self) -> bool:
        return not (self.undeploy or self.deploy or self.binds or self.rebind or self.unbind)

    def actions(self) -> list[tuple]:
        """Actions in enactment order: undeploys, deploys, rebinds."""
        out = [("undeploy", i) for i in self.undeploy]
        out += [("deploy", i) for i in self.deploy]
        out += [("unbind", c) for c in self.unbind]
        out += [("rebind", c) for c in self.rebind]
        return out

    def touches(self, inst: Instance) -> bool:
        return (
            inst in self.undeploy
            or inst in self.deploy
            or any(c.client == inst for c in self.rebind + self.unbind)
        )

    def summary(self) -> str:
        return (f"undeploy={len(self.undeploy)} deploy={len(self.deploy)} binds={len(self.binds)} "
                f"rebind={len(self.rebind)} unbind={len(self.unbind)} cost={self.cost}")


def delta(current: ConfigurationDescription, target: ConfigurationDescription,
          weights: Weights = UNIT) -> DeploymentDelta:
    if current.dsd_ref != target.dsd_ref:
        raise ValueError(f"configurations refer to different descriptions: {current.dsd_ref!r} vs {target.dsd_ref!r}")
    undeploy = current.instances - target.instances
    deploy = target.instances - current.instances
    surviving = {c for c in current.connections if c.client not in undeploy and c.server not in undeploy}
    binds = {c for c in target.connections if c.client in deploy}
    rebind = {c for c in target.connections if c.client not in deploy} - surviving
    unbind = surviving - target.connections
    rebound_ports = {(c.client, c.port) for c in rebind}
    pure_unbinds = [c for c in unbind if (c.client, c.port) not in rebound_ports]
    cost = (weights.deploy * len(deploy) + weights.undeploy * len(undeploy)
            + weights.rebind * (len(rebind) + len(pure_unbinds)))
    return DeploymentDelta(
        current.dsd_ref,
        tuple(sorted(undeploy)),
        tuple(sorted(deploy)),
        tuple(sorted(binds)),
        tuple(sorted(rebind)),
        tuple(sorted(unbind)),
        cost,
    )


def apply_delta(current: ConfigurationDescription, d: DeploymentDelta) -> ConfigurationDescription:
    undeploy = set(d.undeploy)
    instances = (current.instances - undeploy) | set(d.deploy)
    conns = {c for c in current.connections if c.client not in undeploy and c.server not in undeploy}
    conns -= set(d.unbind)
    conns |= set(d.rebind) | set(d.binds)
    return ConfigurationDescription(current.dsd_ref, instances, conns)


# -- picking ---------------------------------------------------------------------


class NoConfiguration(Exception):
    """The candidate stream was empty."""


@dataclass(frozen=True)
class PickerPolicy:
    kind: str = "first"  # first | min-delta
    weights: Weights = UNIT
    cap: Optional[int] = None
    time_budget: Optional[float] = None

    def __post_init__(self):
        if self.kind not in ("first", "min-delta"):
            raise ValueError(f"unknown picker policy {self.kind!r}")
        if self.cap is not None and self.cap < 1:
            raise ValueError("candidate cap must be at least 1")


@dataclass
class PickResult:
    chosen: ConfigurationDescription
    cost: int
    delta: DeploymentDelta
    index: int  # position among the (ranked) candidates seen
    seen: int
    stopped_early: bool = False  # cap or budget ended the scan before the stream did
    costs: list = field(default_factory=list, repr=False)


def pick(candidates: Iterable[ConfigurationDescription], current: Optional[ConfigurationDescription] = None,
         policy: PickerPolicy = PickerPolicy(), dsd=None) -> PickResult:
    """Choose one candidate.

    ``first`` takes the first candidate; ``min-delta`` takes the cheapest
    delta from ``current`` among those seen within the cap and time budget,
    ties going to the earlier candidate.  When ``dsd`` carries an
    optimisation directive, the candidates seen are ranked by it first.
    """
    ranked = dsd is not None and dsd.optimisation is not None
    scan_all = policy.kind == "min-delta" or ranked
    start = time.perf_counter()
    seen: list = []
    stopped = False
    it = iter(candidates)
    for cand in it:
        seen.append(cand)
        if not scan_all:
            break
        if policy.cap is not None and len(seen) >= policy.cap:
            stopped = _has_more(it)
            break
        if policy.time_budget is not None and time.perf_counter() - start >= policy.time_budget:
            stopped = _has_more(it)
            break
        if policy.kind == "min-delta" and not ranked and current is not None and cand == current:
            stopped = True  # cost 0 cannot be beaten
            break
    if not seen:
        raise NoConfiguration("no candidate configuration")
    if ranked:
        from .evaluate import rank_by_objective

        seen = rank_by_objective(seen, dsd)
    base = current if current is not None else ConfigurationDescription(seen[0].dsd_ref)
    if policy.kind == "first":
        d = delta(base, seen[0], policy.weights)
        return PickResult(seen[0], d.cost, d, 0, len(seen), stopped, [d.cost])
    best = None
    costs = []
    for i, cand in enumerate(seen):
        d = delta(base, cand, policy.weights)
        costs.append(d.cost)
        if best is None or d.cost < best[1].cost:
            best = (i, d)
    i, d = best
    return PickResult(seen[i], d.cost, d, i, len(seen), stopped, costs)


def _has_more(it) -> bool:
    for _ in it:
        return True
    return False
