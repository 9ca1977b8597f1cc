"""Lowering constraint-set conjuncts onto a generated model.

Each conjunct becomes linear constraints over the placement and connection
variables.  Quantified component variables range over potential instances;
a predicate only has to hold when the instance exists, so its constraint is
guarded by the instance's existence sum.  Conjuncts that mention a dynamic
property cannot be decided before deployment and are registered as runtime
assertions instead.
"""

from __future__ import annotations

from collections import Counter

from ..configuration.cdd import Instance
from ..lang import DesiredStateDescription
from ..lang import expr as ex
from .generate import SpecializedCsp


class CompileError(Exception):
    pass


class _Missing(Exception):
    """A host lacks the property a comparison reads; the comparison is false."""


class Lin:
    """An affine expression ``sum(coef * var) + const``."""

    __slots__ = ("terms", "const")

    def __init__(self, terms=None, const: int = 0):
        self.terms: dict[int, int] = dict(terms or {})
        self.const = const

    @classmethod
    def of(cls, pairs) -> "Lin":
        out = cls()
        for a, v in pairs:
            out.terms[v] = out.terms.get(v, 0) + a
        return out

    def __sub__(self, other: "Lin") -> "Lin":
        out = Lin(self.terms, self.const - other.const)
        for v, a in other.terms.items():
            out.terms[v] = out.terms.get(v, 0) - a
        out.terms = {v: a for v, a in out.terms.items() if a}
        return out

    @property
    def is_constant(self) -> bool:
        return not self.terms

    def upper(self) -> int:
        return self.const + sum(a for a in self.terms.values() if a > 0)

    def lower(self) -> int:
        return self.const + sum(a for a in self.terms.values() if a < 0)


def mentions_dynamic(expr, dsd: DesiredStateDescription, scope=None) -> bool:
    """True if ``expr`` reads a dynamic component property anywhere."""
    scope = dict(scope or {})
    if isinstance(expr, ex.ForallComponents):
        scope[expr.var] = expr.type_name
        return mentions_dynamic(expr.body, dsd, scope)
    if isinstance(expr, ex.ForallHosts):
        return mentions_dynamic(expr.body, dsd, scope)
    if isinstance(expr, (ex.And, ex.Or)):
        return any(mentions_dynamic(i, dsd, scope) for i in expr.items)
    if isinstance(expr, ex.Not):
        return mentions_dynamic(expr.item, dsd, scope)
    if isinstance(expr, ex.Compare):
        return mentions_dynamic(expr.left, dsd, scope) or mentions_dynamic(expr.right, dsd, scope)
    if isinstance(expr, ex.PropertyOf) and isinstance(expr.target, ex.VarRef):
        type_name = scope.get(expr.target.name)
        return type_name is not None and dsd.is_dynamic_property(type_name, expr.prop)
    return False


_FLIP = {"<=": ">", ">=": "<", "<": ">=", ">": "<="}


def _negate(f):
    """Push a negation inward; ``None`` when that needs an existential.

    Negated comparisons stay wrapped: a comparison on a missing host
    property is false, so its negation is true, which flipping the
    operator would not preserve.
    """
    if isinstance(f, ex.Compare):
        return ex.Not(f)
    if isinstance(f, ex.Not):
        return f.item
    if isinstance(f, ex.And):
        items = [_negate(i) for i in f.items]
        return None if any(i is None for i in items) else ex.Or(tuple(items))
    if isinstance(f, ex.Or):
        items = [_negate(i) for i in f.items]
        return None if any(i is None for i in items) else ex.And(tuple(items))
    return None


class Lowerer:
    def __init__(self, csp: SpecializedCsp):
        self.csp = csp
        self.dsd = csp.dsd
        self.model = csp.model
        self.label = ""
        self.families: Counter = Counter()

    # -- terms ------------------------------------------------------------

    def _host_of(self, node, env) -> str:
        if isinstance(node, ex.HostRef):
            return node.name
        if isinstance(node, ex.HostVar):
            return env[node.name]
        if isinstance(node, ex.HostOf):
            return env[node.var.name].host
        raise CompileError(f"unsupported host reference {ex.format_term(node)}")

    def term(self, node, env) -> Lin:
        if isinstance(node, ex.IntLit):
            return Lin(const=node.value)
        if isinstance(node, ex.PropertyOf):
            if isinstance(node.target, ex.VarRef):
                inst: Instance = env[node.target.name]
                prop = self.dsd.component_type(inst.ctype).property(node.prop)
                if prop is None or prop.value is None:
                    raise _Missing()
                return Lin(const=prop.value)
            name = self._host_of(node.target, env)
            if not self.dsd.has_host(name) or not self.dsd.host(name).has(node.prop):
                raise _Missing()
            return Lin(const=self.dsd.host(name).get(node.prop))
        if isinstance(node, ex.Card):
            return self.card(node.of, env)
        raise CompileError(f"unsupported term {ex.format_term(node)}")

    def card(self, node, env) -> Lin:
        csp = self.csp
        if isinstance(node, ex.InstancesOf):
            types = self.dsd.concrete_types(node.type_name)
            pairs = []
            for h in self.dsd.host_names:
                pairs.extend(csp.instance_count(h, types))
            return Lin.of(pairs)
        if isinstance(node, ex.ComponentsOn):
            host = self._host_of(node.host, env)
            if not self.dsd.has_host(host):
                return Lin()  # a host dropped by evolution carries nothing
            return Lin.of(csp.instance_count(host, self.dsd.type_names))
        if isinstance(node, ex.Connections):
            inst: Instance = env[node.var.name]
            ctype = self.dsd.component_type(inst.ctype)
            if node.interface in ctype.provides:
                return Lin.of((1, v) for v in csp.incoming.get((inst, node.interface), []))
            ports = [p.name for p in ctype.requires if node.interface in (p.name, p.interface)]
            if not ports:
                raise CompileError(f"{inst.ctype} has no interface or port {node.interface}")
            return Lin.of((1, v) for p in ports for v in csp.outgoing[(inst, p)])
        raise CompileError(f"unsupported set term {ex.format_term(node)}")

    # -- formulas -----------------------------------------------------------

    def static(self, f, env):
        """Truth value of ``f`` if it does not depend on the solver, else None."""
        if isinstance(f, ex.Compare):
            try:
                diff = self.term(f.left, env) - self.term(f.right, env)
            except _Missing:
                return False
            if not diff.is_constant:
                return None
            return _holds(f.op, diff.const)
        if isinstance(f, ex.Not):
            inner = self.static(f.item, env)
            return None if inner is None else not inner
        if isinstance(f, ex.And):
            vals = [self.static(i, env) for i in f.items]
            if any(v is False for v in vals):
                return False
            return None if any(v is None for v in vals) else True
        if isinstance(f, ex.Or):
            vals = [self.static(i, env) for i in f.items]
            if any(v is True for v in vals):
                return True
            return None if any(v is None for v in vals) else False
        if isinstance(f, ex.ForallHosts):
            vals = [self.static(f.body, {**env, f.var: h}) for h in self.dsd.host_names]
            if any(v is False for v in vals):
                return False
            return None if any(v is None for v in vals) else True
        return None

    def lower(self, f, env: dict, guards: list):
        if isinstance(f, ex.And):
            for item in f.items:
                self.lower(item, env, guards)
            return
        if isinstance(f, ex.ForallHosts):
            for h in self.dsd.host_names:
                self.lower(f.body, {**env, f.var: h}, guards)
            return
        if isinstance(f, ex.ForallComponents):
            for inst in self.csp.potential_instances(self.dsd.concrete_types(f.type_name)):
                self.lower(f.body, {**env, f.var: inst}, guards + [inst])
            return
        if isinstance(f, ex.Compare):
            try:
                diff = self.term(f.left, env) - self.term(f.right, env)
            except _Missing:
                self.emit_false(guards)
                return
            self.emit(f.op, diff, guards)
            return
        if isinstance(f, ex.Not) and isinstance(f.item, ex.Compare):
            cmp = f.item
            try:
                diff = self.term(cmp.left, env) - self.term(cmp.right, env)
            except _Missing:
                return
            if cmp.op != "=":
                self.emit(_FLIP[cmp.op], diff, guards)
                return
        elif isinstance(f, ex.Not):
            pushed = _negate(f.item)
            if pushed is not None:
                self.lower(pushed, env, guards)
                return
        truth = self.static(f, env)
        if truth is True:
            return
        if truth is False:
            self.emit_false(guards)
            return
        raise CompileError(
            f"{self.label}: '{' '.join(ex.format_expr(f).split())}' is outside the supported fragment "
            "(disjunction or negated quantifier over solver-dependent terms)"
        )

    def _add(self, terms: dict, rel: str, bound: int, family: str):
        self.model.add_linear([(a, v) for v, a in terms.items()], rel, bound, tag=self.label)
        self.families[family] += 1

    def emit_false(self, guards):
        if not guards:
            self.model.add_contradiction(f"{self.label} is false")
            self.families["contradiction"] += 1
            return
        terms: dict = {}
        for inst in guards:
            for a, v in self.csp.existence(inst):
                terms[v] = terms.get(v, 0) + a
        self._add(terms, "<=", len(guards) - 1, "forbid-instance")

    def emit(self, op: str, diff: Lin, guards: list):
        if op == "<":
            op, diff = "<=", Lin(diff.terms, diff.const + 1)
        elif op == ">":
            op, diff = ">=", Lin(diff.terms, diff.const - 1)
        if diff.is_constant:
            if not _holds(op, diff.const):
                self.emit_false(guards)
            return
        if not guards or self._vanishes(op, diff, guards):
            self._add(diff.terms, op, -diff.const, "linear")
            return
        for rel in ("<=", ">=") if op == "=" else (op,):
            self.emit_guarded(rel, diff, guards)

    def _vanishes(self, op: str, diff: Lin, guards: list) -> bool:
        """True if ``diff`` reduces to a satisfied constant when the guard is off.

        Only connection variables incident to the single guarded instance
        are known to be zero when that instance is absent.
        """
        if len(guards) != 1 or not _holds(op, diff.const):
            return False
        inst = guards[0]
        for v in diff.terms:
            pc = self.csp.connection_of(v)
            if pc is None or inst not in (pc.client, pc.server):
                return False
        return True

    def emit_guarded(self, rel: str, diff: Lin, guards: list):
        # diff REL 0 must hold only when every guard instance exists
        g = len(guards)
        if rel == "<=":
            big = diff.upper()
            if big <= 0:
                return
        else:
            big = diff.lower()
            if big >= 0:
                return
        terms = dict(diff.terms)
        for inst in guards:
            for a, v in self.csp.existence(inst):
                terms[v] = terms.get(v, 0) + big * a
        terms = {v: a for v, a in terms.items() if a}
        self._add(terms, rel, big * g - diff.const, "guarded")


def _holds(op: str, value: int) -> bool:
    return {
        "<=": value <= 0,
        ">=": value >= 0,
        "=": value == 0,
        "<": value < 0,
        ">": value > 0,
    }[op]


def lower_constraints(dsd: DesiredStateDescription, csp: SpecializedCsp) -> SpecializedCsp:
    """Add every static conjunct to the model; divert dynamic ones to runtime."""
    lowerer = Lowerer(csp)
    for conj in dsd.conjuncts():
        if mentions_dynamic(conj.expr, dsd):
            csp.runtime.append(conj)
            csp.families[conj.label] = {"runtime-assertion": 1}
            continue
        lowerer.label = conj.label
        lowerer.families = Counter()
        lowerer.lower(conj.expr, {}, [])
        csp.compile_time.append(conj)
        csp.families[conj.label] = dict(lowerer.families)
    return csp
