"""Name resolution and semantic checks: AST -> DesiredStateDescription."""

from __future__ import annotations

from dataclasses import replace

from . import ast
from . import expr as ex
from .errors import NOWHERE, ResolveError, error
from .model import (
    ComponentType,
    ConstraintSet,
    DesiredStateDescription,
    Host,
    HostTemplate,
    Interface,
    Optimisation,
    Port,
    Property,
    Template,
)

DEFAULT_MAX_INSTANCES = 1


def _literal_type(value) -> str:
    return "int" if isinstance(value, int) else "string"


class Resolver:
    def __init__(self, module: ast.Module, name: str = "dsd"):
        self.module = module
        self.name = name
        self.diagnostics = []
        self.interfaces: dict[str, Interface] = {}
        self.templates: dict[str, Template] = {}
        self.types: dict[str, ComponentType] = {}
        self.host_templates: dict[str, HostTemplate] = {}
        self.hosts: dict[str, Host] = {}

    def err(self, position, message: str):
        self.diagnostics.append(error(position or NOWHERE, message))

    def _unique(self, decls, what: str, taken: dict | None = None):
        seen = {} if taken is None else taken
        out = []
        for d in decls:
            if d.name in seen:
                self.err(d.position, f"duplicate {what} '{d.name}'")
                continue
            seen[d.name] = d
            out.append(d)
        return out

    # -- declarations -----------------------------------------------------

    def resolve(self) -> DesiredStateDescription:
        m = self.module
        for d in self._unique(m.of_type(ast.InterfaceDecl), "interface"):
            for field_name in ("impl_type", "specification", "implementation"):
                if not getattr(d, field_name):
                    label = "type" if field_name == "impl_type" else field_name
                    self.err(d.position, f"interface '{d.name}' is missing '{label}'")
            self.interfaces[d.name] = Interface(d.name, d.impl_type, d.specification, d.implementation)

        type_names: dict = {}
        for d in self._unique(m.of_type(ast.TemplateDecl), "template or component type", type_names):
            self.templates[d.name] = self.template(d)
        for d in self._unique(m.of_type(ast.ComponentTypeDecl), "template or component type", type_names):
            ctype = self.component_type(d)
            if ctype is not None:
                self.types[d.name] = ctype

        host_names: dict = {}
        for d in self._unique(m.of_type(ast.HostTemplateDecl), "host template", host_names):
            self.host_templates[d.name] = HostTemplate(d.name, self.assignments(d.properties, d.name))
        hosts_seen: dict = {}
        for d in self._unique(m.of_type(ast.HostDecl), "host", hosts_seen):
            self.hosts[d.name] = self.host(d)

        max_instances = DEFAULT_MAX_INSTANCES
        deployments = m.of_type(ast.DeploymentDecl)
        for extra in deployments[1:]:
            self.err(extra.position, "duplicate deployment settings")
        if deployments:
            for key, value, pos in deployments[0].settings:
                if key != "maxInstancesPerHost":
                    self.err(pos, f"unknown deployment setting '{key}'")
                elif not isinstance(value, int) or value < 1:
                    self.err(pos, "maxInstancesPerHost must be a positive integer")
                else:
                    max_instances = value

        sets = []
        for d in self._unique(m.of_type(ast.ConstraintSetDecl), "constraint set"):
            body = None if d.expr is None else self.formula(d.expr, {})
            sets.append(ConstraintSet(d.name, body))

        optimisation = None
        opts = m.of_type(ast.OptimiseDecl)
        for extra in opts[1:]:
            self.err(extra.position, "duplicate optimise directive")
        if opts:
            optimisation = Optimisation(opts[0].direction, self.int_term(opts[0].term, {}))

        if self.diagnostics:
            raise ResolveError(self.diagnostics)
        return DesiredStateDescription(
            interfaces=tuple(self.interfaces.values()),
            templates=tuple(self.templates.values()),
            component_types=tuple(self.types.values()),
            host_templates=tuple(self.host_templates.values()),
            hosts=tuple(self.hosts.values()),
            constraint_sets=tuple(sets),
            optimisation=optimisation,
            max_instances_per_host=max_instances,
            name=self.name,
        )

    def check_interface(self, name: str, position) -> bool:
        if name not in self.interfaces:
            self.err(position, f"unresolved interface '{name}'")
            return False
        return True

    def ports(self, decls, owner: str) -> list[Port]:
        ports = []
        seen = set()
        for p in decls:
            self.check_interface(p.interface, p.position)
            if p.name in seen:
                self.err(p.position, f"duplicate port '{p.name}' in '{owner}'")
                continue
            seen.add(p.name)
            ports.append(Port(p.name, p.interface))
        return ports

    def template(self, d: ast.TemplateDecl) -> Template:
        for iface in d.provides:
            self.check_interface(iface, d.position)
        props = []
        seen = set()
        for p in d.properties:
            if p.name in seen:
                self.err(p.position, f"duplicate property '{p.name}' in template '{d.name}'")
                continue
            seen.add(p.name)
            if p.kind is None:
                self.err(p.position, f"template property '{p.name}' must be declared constant or dynamic")
                continue
            if p.value is not None or p.provider is not None:
                self.err(p.position, f"template property '{p.name}' cannot carry a binding")
                continue
            props.append(Property(p.name, p.kind, p.value_type or "int"))
        return Template(
            d.name, tuple(dict.fromkeys(d.provides)), tuple(self.ports(d.requires, d.name)), tuple(props)
        )

    def component_type(self, d: ast.ComponentTypeDecl) -> ComponentType | None:
        tmpl = None
        if d.extends is not None:
            tmpl = self.templates.get(d.extends)
            if tmpl is None:
                self.err(d.position, f"unresolved template '{d.extends}'")
        provides = list(tmpl.provides) if tmpl else []
        for iface in d.provides:
            self.check_interface(iface, d.position)
            if iface not in provides:
                provides.append(iface)
        requires = list(tmpl.requires) if tmpl else []
        inherited = {p.name: p for p in requires}
        for p in self.ports(d.requires, d.name):
            if p.name in inherited:
                if inherited[p.name] != p:
                    self.err(d.position, f"port '{p.name}' in '{d.name}' conflicts with the template")
                continue
            requires.append(p)

        if d.implementation is None:
            self.err(d.position, f"component type '{d.name}' is missing an implementation clause")
        if d.instantiate is None:
            self.err(d.position, f"component type '{d.name}' is missing an instantiate clause")
            return None
        ref = d.instantiate.ref

        def check_ref(obj_ref: str, position):
            if obj_ref != ref:
                self.err(position, f"unresolved object reference '{obj_ref}' (instantiated object is '{ref}')")

        satisfied = {}
        for s in d.satisfy:
            check_ref(s.ref, s.position)
            if s.interface not in provides:
                self.err(s.position, f"'{d.name}' satisfies '{s.interface}' which it does not provide")
            elif s.interface in satisfied:
                self.err(s.position, f"duplicate satisfy for '{s.interface}' in '{d.name}'")
            satisfied[s.interface] = s
        for iface in provides:
            if iface not in satisfied:
                self.err(d.position, f"component type '{d.name}': missing satisfy {iface}")

        port_names = {p.name for p in requires}
        bound = {}
        for b in d.bind:
            check_ref(b.ref, b.position)
            if b.port not in port_names:
                self.err(b.position, f"'{d.name}' binds unknown port '{b.port}'")
            elif b.port in bound:
                self.err(b.position, f"duplicate bind for port '{b.port}' in '{d.name}'")
            bound[b.port] = b
        for p in requires:
            if p.name not in bound:
                self.err(d.position, f"component type '{d.name}': missing bind {p.name}")
        for m in d.initialise + d.destroy:
            check_ref(m.ref, m.position)

        properties = self.component_properties(d, tmpl, check_ref)
        return ComponentType(
            name=d.name,
            extends=d.extends,
            provides=tuple(provides),
            requires=tuple(requires),
            implementation=d.implementation or "",
            instantiate=d.instantiate,
            satisfy=tuple(satisfied[i] for i in provides if i in satisfied),
            bind=tuple(bound[p.name] for p in requires if p.name in bound),
            initialise=d.initialise,
            destroy=d.destroy,
            properties=tuple(properties),
        )

    def component_properties(self, d, tmpl, check_ref) -> list[Property]:
        declared = {p.name: p for p in tmpl.properties} if tmpl else {}
        given = {}
        for p in d.properties:
            if p.name in given:
                self.err(p.position, f"duplicate property '{p.name}' in '{d.name}'")
                continue
            given[p.name] = p
        out = []
        for name, spec in declared.items():
            p = given.get(name)
            if p is None:
                self.err(d.position, f"component type '{d.name}': property '{name}' has no binding")
                continue
            out.append(self.bind_property(d, spec.kind, spec.value_type, p, check_ref))
        for name, p in given.items():
            if name in declared:
                continue
            if p.provider is not None:
                kind = p.kind or "dynamic"
            elif p.value is not None:
                kind = p.kind or "constant"
            else:
                self.err(p.position, f"property '{name}' in '{d.name}' has no binding")
                continue
            value_type = p.value_type or (_literal_type(p.value) if p.value is not None else "int")
            out.append(self.bind_property(d, kind, value_type, p, check_ref))
        return out

    def bind_property(self, d, kind, value_type, p: ast.PropertyDecl, check_ref) -> Property:
        if p.kind is not None and p.kind != kind:
            self.err(p.position, f"property '{p.name}' in '{d.name}' is declared {kind}")
        if p.value_type is not None and p.value_type != value_type:
            self.err(p.position, f"type mismatch: property '{p.name}' in '{d.name}' is declared {value_type}")
        if kind == "constant":
            if p.value is None:
                self.err(p.position, f"constant property '{p.name}' in '{d.name}' needs a literal value")
            elif _literal_type(p.value) != value_type:
                self.err(p.position, f"type mismatch: property '{p.name}' expects {value_type}")
            return Property(p.name, kind, value_type, p.value, None)
        if p.provider is None:
            self.err(p.position, f"dynamic property '{p.name}' in '{d.name}' needs a providedBy method")
        else:
            check_ref(p.provider.ref, p.provider.position)
        return Property(p.name, kind, value_type, None, p.provider)

    def assignments(self, pairs, owner: str) -> tuple:
        out = []
        seen = set()
        for key, value, pos in pairs:
            if key in seen:
                self.err(pos, f"duplicate property '{key}' in '{owner}'")
                continue
            seen.add(key)
            out.append((key, value))
        return tuple(out)

    def host(self, d: ast.HostDecl) -> Host:
        merged = {}
        if d.extends is not None:
            tmpl = self.host_templates.get(d.extends)
            if tmpl is None:
                self.err(d.position, f"unresolved host template '{d.extends}'")
            else:
                merged.update(tmpl.properties)
        merged.update(self.assignments(d.properties, d.name))
        return Host(d.name, d.extends, tuple(merged.items()))

    # -- constraint expressions ---------------------------------------------

    def is_type_name(self, name: str) -> bool:
        return name in self.types or name in self.templates

    def type_property(self, type_name: str, prop: str):
        if type_name in self.templates:
            p = self.templates[type_name].property(prop)
            if p is not None:
                return p
            # fall back to a property every concrete subtype carries
            subs = [t for t in self.types.values() if t.extends == type_name]
            found = [t.property(prop) for t in subs]
            if subs and all(found):
                return found[0]
            return None
        t = self.types.get(type_name)
        return t.property(prop) if t else None

    def formula(self, node, scope: dict):
        if isinstance(node, ex.And):
            return replace(node, items=tuple(self.formula(i, scope) for i in node.items))
        if isinstance(node, ex.Or):
            return replace(node, items=tuple(self.formula(i, scope) for i in node.items))
        if isinstance(node, ex.Not):
            return replace(node, item=self.formula(node.item, scope))
        if isinstance(node, ex.ForallHosts):
            if node.var in scope:
                self.err(node.position, f"variable '{node.var}' is already bound")
            inner = dict(scope)
            inner[node.var] = ("host", None)
            return replace(node, body=self.formula(node.body, inner))
        if isinstance(node, ex.ForallComponents):
            if not self.is_type_name(node.type_name):
                self.err(node.position, f"unresolved component type or template '{node.type_name}'")
            if node.var in scope:
                self.err(node.position, f"variable '{node.var}' is already bound")
            inner = dict(scope)
            inner[node.var] = ("component", node.type_name)
            return replace(node, body=self.formula(node.body, inner))
        if isinstance(node, ex.Compare):
            return replace(node, left=self.int_term(node.left, scope), right=self.int_term(node.right, scope))
        raise TypeError(node)

    def component_var(self, name_node, scope: dict):
        entry = scope.get(name_node.ident)
        if entry is None or entry[0] != "component":
            self.err(name_node.position, f"unresolved component variable '{name_node.ident}'")
            return ex.VarRef(name_node.ident, name_node.position), None
        return ex.VarRef(name_node.ident, name_node.position), entry[1]

    def host_target(self, node, scope: dict):
        if isinstance(node, ex.HostOf):
            var, _ = self.component_var(node.var, scope)
            return replace(node, var=var)
        entry = scope.get(node.ident)
        if entry is not None:
            if entry[0] == "host":
                return ex.HostVar(node.ident, node.position)
            self.err(node.position, f"'{node.ident}' is a component variable, not a host")
            return ex.HostVar(node.ident, node.position)
        if node.ident not in self.hosts:
            self.err(node.position, f"unresolved host '{node.ident}'")
        return ex.HostRef(node.ident, node.position)

    def int_term(self, node, scope: dict):
        if isinstance(node, ex.IntLit):
            return node
        if isinstance(node, ex.Card):
            return replace(node, of=self.set_term(node.of, scope))
        if isinstance(node, ex.PropertyOf):
            target = node.target
            if isinstance(target, ex.Name) and scope.get(target.ident, ("",))[0] == "component":
                var, type_name = self.component_var(target, scope)
                prop = self.type_property(type_name, node.prop)
                if prop is None:
                    self.err(node.position, f"unresolved property '{node.prop}' of '{type_name}'")
                elif prop.value_type != "int":
                    self.err(node.position, f"type mismatch: '{var.name}.{node.prop}' is not an integer")
                return replace(node, target=var)
            target = self.host_target(target, scope)
            if isinstance(target, ex.HostRef):
                hosts = [self.hosts[target.name]] if target.name in self.hosts else []
            else:
                hosts = list(self.hosts.values())
            values = [h.get(node.prop) for h in hosts if h.has(node.prop)]
            if hosts and not values:
                self.err(node.position, f"unresolved host property '{node.prop}'")
            elif any(not isinstance(v, int) for v in values):
                self.err(node.position, f"type mismatch: host property '{node.prop}' is not an integer")
            return replace(node, target=target)
        if isinstance(node, ex.Compare):
            self.err(node.position, "type mismatch: a comparison is not an integer term")
            return node
        raise TypeError(node)

    def set_term(self, node, scope: dict):
        if isinstance(node, ex.Connections):
            var, type_name = self.component_var(node.var, scope)
            if type_name is not None and not self._has_connection_point(type_name, node.interface):
                self.err(node.position, f"'{type_name}' has no interface or port '{node.interface}'")
            return replace(node, var=var)
        if isinstance(node, ex.ComponentsOn):
            return replace(node, host=self.host_target(node.host, scope))
        if isinstance(node, ex.InstancesOf):
            if not self.is_type_name(node.type_name):
                self.err(node.position, f"unresolved component type or template '{node.type_name}'")
            return node
        raise TypeError(node)

    def _has_connection_point(self, type_name: str, name: str) -> bool:
        owner = self.types.get(type_name) or self.templates.get(type_name)
        if owner is None:
            return False
        return name in owner.provides or any(p.name == name or p.interface == name for p in owner.requires)


def resolve(module: ast.Module, name: str = "dsd") -> DesiredStateDescription:
    """Resolve names, expand inheritance and check component completeness."""
    return Resolver(module, name).resolve()
