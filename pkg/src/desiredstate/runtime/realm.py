"""The realm manager: enactment, life-cycle management and reconciliation.

Everything runs on a simpy environment used purely as a deterministic
event queue over an integer logical clock.  Delivering a bundle,
instantiating it, moving a call between components and each drain poll
all take one tick.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field, replace
from typing import Optional

import simpy

from ..compiler import compile_dsd, iter_configurations
from ..configuration import (
    ConfigurationDescription,
    Connection,
    DeploymentDelta,
    Instance,
    NoConfiguration,
    PickerPolicy,
    PickResult,
    delta,
    evaluate_conjunct,
    pick,
    validate,
)
from ..csp import SolveLimits
from ..lang import DesiredStateDescription
from .behaviors import BehaviorRegistry, CallFailed, default_registry
from .bundle import descriptor_text, package
from .faults import Fault
from .log import EventLog
from .manager import Call, ComponentManager, ManagerState, SimHost, SmartProxy

S = ManagerState
log = logging.getLogger(__name__)


class UnknownTarget(ValueError):
    """A fault or request names a host or instance the realm does not have."""


def evolve_dsd(dsd: DesiredStateDescription, down_hosts=(), replacement: Optional[DesiredStateDescription] = None):
    """Revise the description to match available resources.

    Hosts observed down are dropped; nothing else changes.  An administrator
    may hand in a whole replacement description through the same entry
    point, in which case the down hosts are dropped from it instead.  The
    description's name is kept so configurations stay comparable.
    """
    base = dsd if replacement is None else replacement
    down = set(down_hosts)
    hosts = tuple(h for h in base.hosts if h.name not in down)
    if replacement is None and len(hosts) == len(base.hosts):
        return dsd
    return replace(base, hosts=hosts, name=dsd.name)


@dataclass
class TickReport:
    time: int
    compliant: bool
    actions: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    picked: Optional[PickResult] = None
    unresolvable: bool = False


class Realm:
    def __init__(self, dsd: DesiredStateDescription, seed: int = 0, policy: Optional[PickerPolicy] = None,
                 candidate_cap: int = 10_000, tick_period: int = 10, drain_timeout: int = 20,
                 credential: str = "admin", behaviors: Optional[BehaviorRegistry] = None):
        self.env = simpy.Environment()
        self.log = EventLog(self.env)
        self.seed = seed
        self.dsd = dsd
        self.policy = policy or PickerPolicy("min-delta", cap=candidate_cap)
        self.candidate_cap = self.policy.cap or candidate_cap
        self.tick_period = tick_period
        self.drain_timeout = drain_timeout
        self.credential = credential
        self.behaviors = behaviors or default_registry()
        self.hosts: dict[str, SimHost] = {}
        for h in dsd.hosts:
            self._add_host(h)
        self.managers: dict[Instance, ComponentManager] = {}
        self.history: list[ComponentManager] = []
        self.current = ConfigurationDescription(dsd.name)
        self.overrides: dict = {}
        self.samples: dict = {}
        self.calls: list[Call] = []
        self.fault_errors: list[str] = []
        self.degraded = False
        self._degraded_key = None
        self._compile()

    # -- setup -----------------------------------------------------------------

    def _add_host(self, h):
        if h.name not in self.hosts:
            self.hosts[h.name] = SimHost(h.name, dict(h.properties), {self.credential}, self.log)

    def _compile(self):
        self.csp = compile_dsd(self.dsd)
        self.runtime_assertions = list(self.csp.runtime)

    @property
    def now(self) -> int:
        return int(self.env.now)

    def run(self, until: int):
        if until > self.env.now:
            self.env.run(until=until)

    def _wait(self, proc):
        self.env.run(until=proc)
        return proc.value

    # -- live model ------------------------------------------------------------

    def down_hosts(self) -> list[str]:
        return sorted(n for n, h in self.hosts.items() if not h.up)

    def live_cdd(self) -> ConfigurationDescription:
        """Running managers on up hosts, connected as their proxies are bound."""
        live = {i for i, m in self.managers.items() if m.running and self.hosts[i.host].up}
        conns = set()
        for inst in live:
            for port, proxy in self.managers[inst].proxies.items():
                if proxy.bound and proxy.target in live:
                    conns.add(Connection(inst, port, proxy.target))
        return ConfigurationDescription(self.dsd.name, live, conns)

    def stale_instances(self) -> list[Instance]:
        """Running instances whose deployed descriptor differs from the active description."""
        out = []
        for inst, mgr in sorted(self.managers.items()):
            if not mgr.live:
                continue
            if not self.dsd.has_type(inst.ctype) or not self.dsd.has_host(inst.host):
                out.append(inst)
            elif mgr.bundle.descriptor != descriptor_text(self.dsd.component_type(inst.ctype)):
                out.append(inst)
        return out

    def sample_dynamic(self, cdd: ConfigurationDescription) -> dict:
        """Query each instance's dynamic property providers (overrides win)."""
        samples = {}
        for inst in cdd.sorted_instances:
            mgr = self.managers[inst]
            for prop in mgr.ctype.properties:
                if not prop.is_dynamic:
                    continue
                key = (inst, prop.name)
                if key in self.overrides:
                    samples[key] = self.overrides[key]
                else:
                    samples[key] = mgr.behavior.provide(prop.provider.method)
        self.samples = samples
        return samples

    # -- enactment --------------------------------------------------------------

    def bootstrap(self) -> Optional[PickResult]:
        """Pick an initial configuration and enact it from an empty deployment."""
        self.log.emit("realm", "-", f"bootstrap dsd={self.dsd.name} hosts={len(self.dsd.hosts)} seed={self.seed}")
        try:
            res = self._pick(self.current)
        except NoConfiguration:
            self.log.emit("realm", "-", "unresolvable-violation no configuration satisfies the description")
            self.degraded = True
            return None
        self.log.emit("pick", "-", f"policy={self.policy.kind} index={res.index} seen={res.seen} cost={res.cost}")
        self.enact(res.delta, res.chosen)
        return res

    def _pick(self, current) -> PickResult:
        limits = SolveLimits(max_solutions=self.candidate_cap)
        return pick(iter_configurations(self.csp, limits), current, self.policy, self.dsd)

    def enact(self, d: DeploymentDelta, target: ConfigurationDescription, wait: bool = True):
        proc = self.env.process(self._enact(d, target))
        return self._wait(proc) if wait else proc

    def _enact(self, d: DeploymentDelta, target: ConfigurationDescription):
        self.log.emit("enact", "-", f"begin {d.summary()}")
        failures = []
        if d.is_empty:
            self.log.emit("enact", "-", "noop")
            self.current = target
            return failures
        undeploys = [self.env.process(self._undeploy(self.managers[i])) for i in d.undeploy if i in self.managers]
        if undeploys:
            yield self.env.all_of(undeploys)
        fresh = []
        for inst in d.deploy:
            mgr = yield from self._deploy_one(inst)
            if mgr is None:
                failures.append(inst)
                self.log.emit("enact", inst, "aborted deploy")
            else:
                fresh.append(mgr)
        yield self.env.timeout(1)
        for mgr in fresh:
            inst = mgr.instance
            if not mgr.live:
                failures.append(inst)
                self.log.emit("enact", inst, f"aborted manager {mgr.state.value}")
                continue
            for port in mgr.ctype.requires:
                conn = target.connection_for(inst, port.name)
                if conn is not None:
                    self.bind(inst, port.name, conn.server)
            if not mgr.all_bound():
                failures.append(inst)
                self.log.emit("enact", inst, "aborted unbound ports")
                continue
            self.start(inst)
        rebound = {(c.client, c.port) for c in d.rebind}
        for c in d.unbind:
            if (c.client, c.port) not in rebound and c.client in self.managers:
                self.unbind(c.client, c.port)
        for c in d.rebind:
            mgr = self.managers.get(c.client)
            if mgr is None or not mgr.live:
                failures.append(c.client)
                self.log.emit("enact", c.client, "aborted rebind client not live")
                continue
            self.bind(c.client, c.port, c.server, kind="rebind")
        self.current = target
        self.log.emit("enact", "-", f"end failures={len(failures)}")
        return failures

    def _deploy_one(self, inst: Instance):
        ctype = self.dsd.component_type(inst.ctype)
        bundle = package(ctype, inst, self.credential)
        self.log.emit("package", inst, f"bundle digest={bundle.digest[:12]}")
        yield self.env.timeout(1)
        return self._fire_and_instantiate(inst, bundle)

    def _fire_and_instantiate(self, inst: Instance, bundle) -> Optional[ComponentManager]:
        old = self.managers.get(inst)
        if old is not None and not old.live:
            self.hosts[inst.host].managers.pop(inst, None)
        host = self.hosts.get(inst.host)
        if host is None:
            self.log.emit("deliver", inst, f"failed unknown host {inst.host}")
            return None
        mgr = host.fire(bundle, self.dsd.component_type(inst.ctype))
        if mgr is None:
            return None
        self.managers[inst] = mgr
        self.history.append(mgr)
        ctype = mgr.ctype
        rng = random.Random(f"{self.seed}/{inst}")
        mgr.behavior = self.behaviors.create(ctype, rng)
        args = ", ".join(repr(a) for a in ctype.instantiate.args)
        self.log.emit("instantiate", inst, f"{ctype.instantiate.ref} = {ctype.instantiate.class_name}({args})")
        for port in ctype.requires:
            mgr.proxies[port.name] = SmartProxy(port.name, port.interface)
            self.log.emit("proxy", f"{inst}.{port.name}", f"created {port.interface} unbound")
        for sat in ctype.satisfy:
            mgr.endpoints[sat.interface] = True
            self.log.emit("endpoint", inst, f"enabled {sat.interface} via {sat.ref}")
        for iface in ctype.provides:
            mgr.endpoints.setdefault(iface, True)
        mgr.transition(S.INSTANTIATED)
        return mgr

    def deploy(self, inst: Instance) -> Optional[ComponentManager]:
        """Package, fire and instantiate one instance now, leaving its ports unbound."""
        bundle = package(self.dsd.component_type(inst.ctype), inst, self.credential)
        self.log.emit("package", inst, f"bundle digest={bundle.digest[:12]}")
        return self._fire_and_instantiate(inst, bundle)

    def bind(self, client: Instance, port: str, server: Instance, kind: str = "bind"):
        """Inject ``server`` into ``client``'s proxy through its setter; flush queued calls."""
        mgr = self.managers[client]
        proxy = mgr.proxies[port]
        setter = mgr.ctype.setter(port)
        via = f" via {setter.ref}.{setter.method}()" if setter else ""
        proxy.target = server
        self.log.emit(kind, f"{client}.{port}", f"-> {server}{via}")
        if mgr.state is S.INSTANTIATED and mgr.all_bound():
            mgr.transition(S.BOUND)
        while proxy.queue and proxy.bound:
            call = proxy.queue.popleft()
            self.log.emit("call", call.name, f"flushed from {client}.{port}")
            self._dispatch(call, server)

    def unbind(self, client: Instance, port: str):
        proxy = self.managers[client].proxies[port]
        proxy.target = None
        self.log.emit("unbind", f"{client}.{port}", "")

    def start(self, inst: Instance):
        """Run initialise methods (all ports must be bound) and mark Running."""
        mgr = self.managers[inst]
        if not mgr.all_bound():
            raise RuntimeError(f"{inst}: initialise before all ports are bound")
        if mgr.state is S.INSTANTIATED:
            mgr.transition(S.BOUND)
        for m in mgr.ctype.initialise:
            mgr.behavior.call_method(m.method)
            self.log.emit("initialise", inst, f"{m.ref}.{m.method}()")
        mgr.transition(S.RUNNING)

    # -- undeployment -----------------------------------------------------------

    def undeploy(self, inst: Instance, wait: bool = True):
        mgr = self.managers.get(inst)
        if mgr is None:
            mgr = next((m for m in reversed(self.history) if m.instance == inst), None)
        if mgr is None:
            raise UnknownTarget(f"unknown instance {inst}")
        proc = self.env.process(self._undeploy(mgr))
        return self._wait(proc) if wait else proc

    def _undeploy(self, mgr: ComponentManager):
        inst = mgr.instance
        yield self.env.timeout(0)
        if mgr.state is S.TERMINATED:
            self.log.emit("undeploy", inst, "noop already Terminated")
            return
        if mgr.state is S.FAILED:
            self.log.emit("undeploy", inst, "skip Failed")
            self._retire(mgr)
            return
        if mgr.state is S.DESTROYING:
            self.log.emit("undeploy", inst, "noop already Destroying")
            return
        self.log.emit("undeploy", inst, "begin")
        for iface in sorted(mgr.endpoints):
            mgr.endpoints[iface] = False
            self.log.emit("endpoint", inst, f"disabled {iface}")
        mgr.transition(S.DESTROYING)
        waited = 0
        while mgr.in_flight and waited < self.drain_timeout:
            yield self.env.timeout(1)
            waited += 1
        if mgr.in_flight:
            self.log.emit("undeploy", inst, f"drain-timeout in-flight={len(mgr.in_flight)}")
            for call in list(mgr.in_flight):
                self._finish(call, "dropped", reason="drain-timeout")
            mgr.in_flight.clear()
        else:
            self.log.emit("undeploy", inst, "drained")
        for port in sorted(mgr.proxies):
            proxy = mgr.proxies[port]
            proxy.disabled = True
            self.log.emit("proxy", f"{inst}.{port}", "disabled")
            while proxy.queue:
                self._finish(proxy.queue.popleft(), "rejected", reason="proxy-disabled")
        for m in mgr.ctype.destroy:
            try:
                mgr.behavior.call_method(m.method)
                self.log.emit("destroy", inst, f"{m.ref}.{m.method}()")
            except Exception as exc:  # destroy failures are logged, termination proceeds
                self.log.emit("destroy", inst, f"{m.ref}.{m.method}() failed {exc}")
        self.log.emit("host", inst.host, f"terminate {inst}")
        mgr.transition(S.TERMINATED)
        self._retire(mgr)

    def _retire(self, mgr: ComponentManager):
        inst = mgr.instance
        host = self.hosts.get(inst.host)
        if host is not None and host.managers.get(inst) is mgr:
            del host.managers[inst]
        if self.managers.get(inst) is mgr:
            del self.managers[inst]

    # -- calls ---------------------------------------------------------------------

    def _new_call(self, caller, port, request) -> Call:
        call = Call(len(self.calls) + 1, str(caller), port, request, self.env.event())
        call.issued_at = self.now
        self.calls.append(call)
        return call

    def invoke(self, client: Instance, port: str, request) -> Call:
        """Call out through ``client``'s smart proxy for ``port``."""
        mgr = self.managers.get(client)
        if mgr is None or not mgr.live or port not in mgr.proxies:
            raise UnknownTarget(f"{client} has no live proxy {port}")
        proxy = mgr.proxies[port]
        call = self._new_call(client, port, request)
        self.log.emit("call", call.name, f"invoke {client}.{port} {request!r}")
        if proxy.disabled:
            self._finish(call, "rejected", reason="proxy-disabled")
        elif proxy.target is None:
            call.status = "queued"
            proxy.queue.append(call)
            self.log.emit("call", call.name, f"queued at {client}.{port} unbound")
        else:
            self._dispatch(call, proxy.target)
        return call

    def request(self, server: Instance, interface: str, request) -> Call:
        """A request from outside the realm straight to a provided interface."""
        call = self._new_call("external", interface, request)
        self.log.emit("call", call.name, f"request {server}:{interface} {request!r}")
        self._dispatch(call, server, interface)
        return call

    def call(self, server: Instance, interface: str, request, timeout: int = 100) -> Call:
        """``request`` and advance the clock until the call settles."""
        call = self.request(server, interface, request)
        self.env.run(until=self.env.any_of([call.done, self.env.timeout(timeout)]))
        return call

    def _dispatch(self, call: Call, server: Instance, interface: Optional[str] = None):
        call.target = server
        call.status = "in-transit"
        self.env.process(self._deliver(call, server, interface))

    def _deliver(self, call: Call, server: Instance, interface: Optional[str]):
        yield self.env.timeout(1)
        if call.finished:
            return
        mgr = self.managers.get(server)
        if mgr is None or mgr.state is S.FAILED or not self.hosts[server.host].up:
            self._finish(call, "dropped", reason=f"target {server} down")
            return
        if interface is None:
            caller = self.managers.get(Instance.parse(call.caller)) if call.caller != "external" else None
            proxy = caller.proxies.get(call.port) if caller else None
            interface = proxy.interface if proxy else next(iter(mgr.endpoints), "")
        if not mgr.running or not mgr.endpoints.get(interface, False):
            self._finish(call, "rejected", reason=f"{server}:{interface} not accepting ({mgr.state.value})")
            return
        call.status = "in-flight"
        mgr.in_flight.append(call)
        self.log.emit("call", call.name, f"deliver {server}:{interface}")
        gen = mgr.behavior.handle(interface, call.request)
        reply = None
        try:
            while True:
                port, sub_request = gen.send(reply)
                if port not in mgr.proxies:
                    raise CallFailed(f"no port {port}")
                sub = self.invoke(server, port, sub_request)
                yield sub.done
                if call.finished:  # dropped by a crash meanwhile
                    return
                if sub.status != "responded":
                    raise CallFailed(f"nested {sub.name} {sub.status}")
                reply = sub.result
        except StopIteration as stop:
            value = stop.value
        except CallFailed as exc:
            self._release(mgr, call)
            self._finish(call, "failed", reason=str(exc))
            return
        yield self.env.timeout(1)
        if call.finished:
            return
        self._release(mgr, call)
        self._finish(call, "responded", value)

    @staticmethod
    def _release(mgr, call):
        if call in mgr.in_flight:
            mgr.in_flight.remove(call)

    def _finish(self, call: Call, status: str, value=None, reason: str = ""):
        if call.finished:
            return
        call.status = status
        call.result = value
        call.reason = reason
        call.finished_at = self.now
        if status == "responded":
            self.log.emit("call", call.name, f"responded {value!r}")
        else:
            self.log.emit("call", call.name, f"{status} {reason}".rstrip())
        call.done.succeed(call)

    # -- faults --------------------------------------------------------------------

    def inject_fault(self, fault: Fault, defer: bool = False):
        """Apply ``fault`` now if it is due (and not ``defer``), else schedule it.

        Unknown hosts are rejected immediately; an instance that is not live
        when the fault comes due raises if applied now, or is logged as a
        rejected fault when it fires later.
        """
        if fault.kind == "host-crash":
            if fault.target not in self.hosts:
                raise UnknownTarget(f"unknown host {fault.target}")
        else:
            inst = fault.instance
            if inst.host not in self.hosts:
                raise UnknownTarget(f"unknown host {inst.host}")
        if fault.time <= self.now and not defer:
            self._apply_fault(fault)
        else:
            self.env.process(self._later(fault))

    def _later(self, fault: Fault):
        yield self.env.timeout(max(0, fault.time - self.now))
        try:
            self._apply_fault(fault)
        except UnknownTarget as exc:
            self.fault_errors.append(str(exc))
            self.log.emit("fault", fault.target, f"rejected {exc}")

    def _apply_fault(self, fault: Fault):
        if fault.kind == "host-crash":
            host = self.hosts[fault.target]
            if not host.up:
                self.log.emit("fault", host.name, "host-crash already down")
                return
            host.status = "down"
            self.log.emit("fault", host.name, "host-crash")
            for inst in sorted(host.managers):
                self._fail(host.managers[inst], "host-crash")
            return
        inst = fault.instance
        mgr = self.managers.get(inst)
        if mgr is None or not mgr.live:
            raise UnknownTarget(f"unknown instance {inst}")
        if fault.kind == "component-crash":
            self.log.emit("fault", inst, "component-crash")
            self._fail(mgr, "component-crash")
        else:
            prop = mgr.ctype.property(fault.prop)
            if prop is None:
                raise UnknownTarget(f"{inst} has no property {fault.prop}")
            self.overrides[(inst, fault.prop)] = fault.value
            self.log.emit("fault", inst, f"set {fault.prop}={fault.value}")

    def _fail(self, mgr: ComponentManager, reason: str):
        if not mgr.live:
            return
        mgr.transition(S.FAILED, reason)
        for call in list(mgr.in_flight):
            self._finish(call, "dropped", reason=f"{mgr.instance} {reason}")
        mgr.in_flight.clear()
        for port in sorted(mgr.proxies):
            q = mgr.proxies[port].queue
            while q:
                self._finish(q.popleft(), "dropped", reason=f"{mgr.instance} {reason}")

    # -- reconciliation ------------------------------------------------------------

    def replace_dsd(self, new_dsd: DesiredStateDescription):
        """Administrator-initiated evolution; takes effect on the next tick."""
        self.dsd = evolve_dsd(self.dsd, self.down_hosts(), replacement=new_dsd)
        for h in self.dsd.hosts:
            self._add_host(h)
        self._compile()
        self._degraded_key = None
        self.log.emit("realm", "-", f"dsd-replaced digest={self.dsd.digest[:12]}")

    def tick(self) -> TickReport:
        """Advance to the next tick boundary, then probe and reconcile."""
        self.run((self.now // self.tick_period + 1) * self.tick_period)
        return self.reconcile()

    def reconcile(self) -> TickReport:
        now = self.now
        self.log.emit("tick", "-", "probe sweep")
        for h in sorted({i.host for i in self.current.instances}):
            if not self.hosts[h].up:
                self.log.emit("probe", h, "HostDown")
        for inst in self.current.sorted_instances:
            mgr = self.managers.get(inst)
            state = mgr.state.value if mgr else "absent"
            if mgr is None or not mgr.running or not self.hosts[inst.host].up:
                self.log.emit("probe", inst, f"ComponentDown state={state}")
        for mgr in [m for m in self.managers.values() if m.state is S.FAILED]:
            self._retire(mgr)

        live = self.live_cdd()
        stale = self.stale_instances()
        violations = []
        report = validate(live, self.dsd)
        violations += [r.name for r in report.failures]
        if live != self.current:
            violations.append("divergence")
        if stale:
            violations.append("stale-descriptor")

        dynamic_failures = []
        if self.runtime_assertions:
            samples = self.sample_dynamic(live)
            for (inst, prop), value in sorted(samples.items()):
                self.log.emit("probe", inst, f"{prop}={value}")
            for conj in self.runtime_assertions:
                ok, witnesses = evaluate_conjunct(conj.expr, self.dsd, live, samples)
                self.log.emit("assert", conj.label, "pass" if ok else "fail " + "; ".join(witnesses))
                if not ok:
                    dynamic_failures.append(conj.label)

        if not violations:
            if dynamic_failures:
                self.log.emit("realm", "-", f"report-only dynamic violation {','.join(dynamic_failures)}")
            else:
                self.log.emit("realm", "-", "compliant")
            return TickReport(now, not dynamic_failures, [], dynamic_failures)

        self.log.emit("realm", "-", f"violation {','.join(dict.fromkeys(violations))}")
        evolved = evolve_dsd(self.dsd, self.down_hosts())
        # keyed on the evolved description so an unchanged degraded state matches
        key = (tuple(self.down_hosts()), evolved.digest, live)
        if self.degraded and key == self._degraded_key:
            self.log.emit("realm", "-", "degraded unchanged; not re-solving")
            return TickReport(now, False, [], violations, unresolvable=True)

        if evolved is not self.dsd:
            dropped = sorted(set(self.dsd.host_names) - set(evolved.host_names))
            self.log.emit("evolve", "-", f"drop hosts {','.join(dropped)}")
            self.dsd = evolved
            self._compile()
            self.log.emit("compile", "-", f"variables={self.csp.num_variables} constraints={self.csp.model.num_constraints}")

        base = live
        if stale:
            for inst in stale:
                self.undeploy(inst)
            gone = set(stale)
            base = ConfigurationDescription(
                live.dsd_ref,
                live.instances - gone,
                {c for c in live.connections if c.client not in gone and c.server not in gone},
            )
        try:
            res = self._pick(base)
        except NoConfiguration:
            self.log.emit("realm", "-", "unresolvable-violation no configuration satisfies the evolved description")
            self.degraded = True
            self._degraded_key = key
            return TickReport(now, False, [], violations, unresolvable=True)
        self.degraded = False
        self.log.emit("pick", "-", f"policy={self.policy.kind} index={res.index} seen={res.seen} cost={res.cost}")
        self.current = base
        actions = [f"{k} {v}" for k, v in res.delta.actions()]
        self.enact(res.delta, res.chosen)
        return TickReport(now, False, actions, violations, picked=res)


def simulate(dsd: DesiredStateDescription, faults=(), seed: int = 0, ticks: Optional[int] = None,
             **realm_options) -> Realm:
    """Bootstrap a realm, schedule ``faults`` and run reconciliation ticks.

    Without ``ticks``, runs until two ticks after the last fault.
    """
    realm = Realm(dsd, seed=seed, **realm_options)
    for f in faults:
        realm.inject_fault(f, defer=True)
    realm.bootstrap()
    if ticks is None:
        last = max((f.time for f in faults), default=0)
        ticks = max(1, (last - realm.now) // realm.tick_period + 2)
    for _ in range(ticks):
        realm.tick()
    realm.log.emit("realm", "-", f"end current={len(realm.current)} instances degraded={str(realm.degraded).lower()}")
    return realm
