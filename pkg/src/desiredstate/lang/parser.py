"""Recursive-descent parser producing an unresolved :class:`~.ast.Module`.

Declarations are keyword-introduced and their bodies parenthesized; clauses
inside a body may be separated by commas or just whitespace.
"""

from __future__ import annotations

from . import ast
from . import expr as ex
from .errors import ParseError, error
from .lexer import Token, TokenKind, tokenize

_SET_FUNCTIONS = ("connections", "getComponents", "components", "instancesOf")


class Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    # -- token helpers ----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind is not TokenKind.EOF:
            self.i += 1
        return tok

    def fail(self, expected: str, tok: Token | None = None):
        tok = tok or self.tok
        raise ParseError(error(tok.position, f"expected {expected}, found {tok.describe()}"))

    def at(self, kind: TokenKind) -> bool:
        return self.tok.kind is kind

    def at_kw(self, word: str) -> bool:
        return self.tok.is_keyword(word)

    def accept(self, kind: TokenKind) -> Token | None:
        if self.tok.kind is kind:
            return self.advance()
        return None

    def accept_kw(self, word: str) -> Token | None:
        if self.tok.is_keyword(word):
            return self.advance()
        return None

    def expect(self, kind: TokenKind, what: str | None = None) -> Token:
        if self.tok.kind is not kind:
            self.fail(what or f"'{kind.value}'")
        return self.advance()

    def expect_kw(self, word: str) -> Token:
        if not self.tok.is_keyword(word):
            self.fail(f"'{word}'")
        return self.advance()

    def ident(self, what: str = "identifier") -> str:
        if self.tok.kind is not TokenKind.IDENT:
            self.fail(what)
        return self.advance().value

    def name(self, what: str = "name") -> str:
        """An identifier, also accepting reserved words (property names etc)."""
        if self.tok.kind not in (TokenKind.IDENT, TokenKind.KEYWORD):
            self.fail(what)
        return self.advance().value

    def string(self, what: str = "string") -> str:
        if self.tok.kind is not TokenKind.STRING:
            self.fail(what)
        return self.advance().value

    def literal(self):
        if self.tok.kind in (TokenKind.STRING, TokenKind.INT):
            return self.advance().value
        self.fail("string or integer literal")

    def qualified_name(self) -> str:
        parts = [self.ident("class name")]
        while self.at(TokenKind.DOT):
            self.advance()
            parts.append(self.name("class name"))
        return ".".join(parts)

    def method_ref(self) -> ast.MethodRef:
        pos = self.tok.position
        ref = self.ident("object reference")
        self.expect(TokenKind.DOT)
        method = self.name("method name")
        self.expect(TokenKind.LPAREN)
        self.expect(TokenKind.RPAREN)
        return ast.MethodRef(ref, method, pos)

    # -- top level -----------------------------------------------------------

    def parse_module(self) -> ast.Module:
        decls = []
        while not self.at(TokenKind.EOF):
            decls.append(self.declaration())
        return ast.Module(tuple(decls))

    def declaration(self):
        tok = self.tok
        if tok.is_keyword("interface"):
            return self.interface_decl()
        if tok.is_keyword("template"):
            return self.template_decl()
        if tok.is_keyword("component"):
            return self.component_decl()
        if tok.is_keyword("host"):
            if self.peek().is_keyword("template"):
                return self.host_template_decl()
            return self.host_decl()
        if tok.is_keyword("constraintSet"):
            return self.constraint_set_decl()
        if tok.is_keyword("deployment"):
            return self.deployment_decl()
        if tok.is_keyword("optimise"):
            return self.optimise_decl()
        self.fail("a declaration (interface, template, component type, host, constraintSet, deployment, optimise)")

    def interface_decl(self) -> ast.InterfaceDecl:
        pos = self.expect_kw("interface").position
        name = self.ident("interface name")
        self.expect(TokenKind.LPAREN)
        fields = {}
        while not self.at(TokenKind.RPAREN):
            key_tok = self.tok
            key = self.name("interface field")
            if key not in ("type", "specification", "implementation"):
                raise ParseError(error(key_tok.position, f"unknown interface field '{key}'"))
            if key in fields:
                raise ParseError(error(key_tok.position, f"duplicate interface field '{key}'"))
            self.expect(TokenKind.EQ)
            fields[key] = self.string()
            self.accept(TokenKind.COMMA)
        self.expect(TokenKind.RPAREN)
        return ast.InterfaceDecl(
            name,
            fields.get("type", ""),
            fields.get("specification", ""),
            fields.get("implementation", ""),
            pos,
        )

    def provides_clause(self) -> list[str]:
        self.expect_kw("provides")
        names = []
        while True:
            self.accept_kw("interface")
            names.append(self.ident("interface name"))
            if self.at(TokenKind.COMMA) and (
                self.peek().kind is TokenKind.IDENT or self.peek().is_keyword("interface")
            ):
                self.advance()
                continue
            return names

    def requires_clause(self) -> list[ast.PortDecl]:
        self.expect_kw("requires")
        ports = []
        while True:
            pos = self.tok.position
            iface = self.ident("interface name")
            port = self.ident("port name")
            ports.append(ast.PortDecl(iface, port, pos))
            if (
                self.at(TokenKind.COMMA)
                and self.peek().kind is TokenKind.IDENT
                and self.peek(2).kind is TokenKind.IDENT
            ):
                self.advance()
                continue
            return ports

    def properties_clause(self) -> list[ast.PropertyDecl]:
        self.expect_kw("properties")
        self.expect(TokenKind.LPAREN)
        props = []
        while not self.at(TokenKind.RPAREN):
            props.append(self.property_entry())
            self.accept(TokenKind.COMMA)
        self.expect(TokenKind.RPAREN)
        return props

    def property_entry(self) -> ast.PropertyDecl:
        pos = self.tok.position
        kind = None
        value_type = None
        if self.at_kw("constant") or self.at_kw("dynamic"):
            kind = self.advance().value
            if self.tok.kind is TokenKind.IDENT and self.tok.value in ("int", "string"):
                value_type = self.advance().value
            else:
                self.fail("property type 'int' or 'string'")
        name = self.name("property name")
        if self.accept(TokenKind.EQ):
            return ast.PropertyDecl(name, kind, value_type, self.literal(), None, pos)
        if self.accept_kw("providedBy"):
            return ast.PropertyDecl(name, kind, value_type, None, self.method_ref(), pos)
        if kind is None:
            self.fail("'=' or 'providedBy'")
        return ast.PropertyDecl(name, kind, value_type, None, None, pos)

    def template_decl(self) -> ast.TemplateDecl:
        pos = self.expect_kw("template").position
        name = self.ident("template name")
        self.expect(TokenKind.LPAREN)
        provides, requires, props = [], [], []
        while not self.at(TokenKind.RPAREN):
            if self.at_kw("provides"):
                provides.extend(self.provides_clause())
            elif self.at_kw("requires"):
                requires.extend(self.requires_clause())
            elif self.at_kw("properties"):
                props.extend(self.properties_clause())
            else:
                self.fail("'provides', 'requires' or 'properties'")
            self.accept(TokenKind.COMMA)
        self.expect(TokenKind.RPAREN)
        return ast.TemplateDecl(name, tuple(provides), tuple(requires), tuple(props), pos)

    def component_decl(self) -> ast.ComponentTypeDecl:
        pos = self.expect_kw("component").position
        self.expect_kw("type")
        name = self.ident("component type name")
        extends = None
        if self.accept_kw("extends"):
            extends = self.ident("template name")
        self.expect(TokenKind.LPAREN)
        c = dict(provides=[], requires=[], satisfy=[], bind=[], initialise=[], destroy=[], properties=[])
        implementation = None
        instantiate = None
        while not self.at(TokenKind.RPAREN):
            tok = self.tok
            if tok.is_keyword("provides"):
                c["provides"].extend(self.provides_clause())
            elif tok.is_keyword("requires"):
                c["requires"].extend(self.requires_clause())
            elif tok.is_keyword("properties"):
                c["properties"].extend(self.properties_clause())
            elif tok.is_keyword("implementation"):
                self.advance()
                if implementation is not None:
                    raise ParseError(error(tok.position, "duplicate implementation clause"))
                implementation = self.string("implementation URL")
            elif tok.is_keyword("instantiate"):
                self.advance()
                if instantiate is not None:
                    raise ParseError(error(tok.position, "duplicate instantiate clause"))
                ref = self.ident("object reference")
                self.expect_kw("with")
                cls = self.qualified_name()
                self.expect(TokenKind.LPAREN)
                args = []
                while not self.at(TokenKind.RPAREN):
                    args.append(self.literal())
                    if not self.accept(TokenKind.COMMA):
                        break
                self.expect(TokenKind.RPAREN)
                instantiate = ast.Instantiate(ref, cls, tuple(args), tok.position)
            elif tok.is_keyword("satisfy"):
                self.advance()
                iface = self.ident("interface name")
                self.expect_kw("using")
                c["satisfy"].append(ast.Satisfy(iface, self.ident("object reference"), tok.position))
            elif tok.is_keyword("bind"):
                self.advance()
                port = self.ident("port name")
                self.expect_kw("with")
                m = self.method_ref()
                c["bind"].append(ast.Bind(port, m.ref, m.method, tok.position))
            elif tok.is_keyword("initialise") or tok.is_keyword("destroy"):
                self.advance()
                refs = [self.method_ref()]
                while self.at(TokenKind.COMMA) and self.peek().kind is TokenKind.IDENT:
                    self.advance()
                    refs.append(self.method_ref())
                c[tok.value].extend(refs)
            else:
                self.fail("a component clause (provides, requires, implementation, instantiate, "
                          "satisfy, bind, initialise, destroy, properties)")
            self.accept(TokenKind.COMMA)
        self.expect(TokenKind.RPAREN)
        return ast.ComponentTypeDecl(
            name,
            extends,
            tuple(c["provides"]),
            tuple(c["requires"]),
            implementation,
            instantiate,
            tuple(c["satisfy"]),
            tuple(c["bind"]),
            tuple(c["initialise"]),
            tuple(c["destroy"]),
            tuple(c["properties"]),
            pos,
        )

    def assignments(self) -> tuple:
        self.expect(TokenKind.LPAREN)
        out = []
        while not self.at(TokenKind.RPAREN):
            pos = self.tok.position
            key = self.name("property name")
            self.expect(TokenKind.EQ)
            out.append((key, self.literal(), pos))
            self.accept(TokenKind.COMMA)
        self.expect(TokenKind.RPAREN)
        return tuple(out)

    def host_template_decl(self) -> ast.HostTemplateDecl:
        pos = self.expect_kw("host").position
        self.expect_kw("template")
        name = self.ident("host template name")
        props = self.assignments() if self.at(TokenKind.LPAREN) else ()
        return ast.HostTemplateDecl(name, props, pos)

    def host_decl(self) -> ast.HostDecl:
        pos = self.expect_kw("host").position
        name = self.ident("host name")
        extends = None
        if self.accept_kw("extends"):
            extends = self.ident("host template name")
        props = self.assignments() if self.at(TokenKind.LPAREN) else ()
        return ast.HostDecl(name, extends, props, pos)

    def deployment_decl(self) -> ast.DeploymentDecl:
        pos = self.expect_kw("deployment").position
        return ast.DeploymentDecl(self.assignments(), pos)

    def optimise_decl(self) -> ast.OptimiseDecl:
        pos = self.expect_kw("optimise").position
        tok = self.tok
        if tok.kind is TokenKind.IDENT and tok.value in ("minimize", "minimise", "maximize", "maximise"):
            self.advance()
            direction = "minimize" if tok.value.startswith("min") else "maximize"
        else:
            self.fail("'minimize' or 'maximize'")
        return ast.OptimiseDecl(direction, self.term(), pos)

    def constraint_set_decl(self) -> ast.ConstraintSetDecl:
        pos = self.expect_kw("constraintSet").position
        name = self.ident("constraint set name")
        self.expect(TokenKind.LPAREN)
        body = None
        if not self.at(TokenKind.RPAREN):
            body = self.expr()
        self.expect(TokenKind.RPAREN)
        return ast.ConstraintSetDecl(name, body, pos)

    # -- constraint expressions ---------------------------------------------

    def expr(self):
        pos = self.tok.position
        items = [self.and_expr()]
        while self.accept_kw("or"):
            items.append(self.and_expr())
        return items[0] if len(items) == 1 else ex.Or(tuple(items), pos)

    def and_expr(self):
        pos = self.tok.position
        items = [self.unary()]
        while self.accept_kw("and"):
            items.append(self.unary())
        return items[0] if len(items) == 1 else ex.And(tuple(items), pos)

    def unary(self):
        pos = self.tok.position
        if self.accept_kw("not"):
            return ex.Not(self.unary(), pos)
        if self.at_kw("forall"):
            return self.forall()
        if self.at(TokenKind.LPAREN):
            self.advance()
            inner = self.expr()
            self.expect(TokenKind.RPAREN)
            return inner
        return self.comparison()

    def forall(self):
        pos = self.expect_kw("forall").position
        if self.accept_kw("host"):
            var = self.ident("variable name")
            kind = None
        else:
            kind = self.ident("component type or template name")
            var = self.ident("variable name")
        self.expect_kw("in")
        self.expect_kw("deployment")
        self.expect(TokenKind.LPAREN)
        body = self.expr()
        self.expect(TokenKind.RPAREN)
        if kind is None:
            return ex.ForallHosts(var, body, pos)
        return ex.ForallComponents(kind, var, body, pos)

    def comparison(self):
        pos = self.tok.position
        left = self.term()
        op_tok = self.tok
        if op_tok.kind not in (TokenKind.LE, TokenKind.GE, TokenKind.EQ, TokenKind.LT, TokenKind.GT):
            self.fail("comparison operator (<=, >=, =, <, >)")
        self.advance()
        right = self.term()
        return ex.Compare(op_tok.kind.value, left, right, pos)

    def term(self):
        tok = self.tok
        pos = tok.position
        if tok.kind is TokenKind.INT:
            self.advance()
            return ex.IntLit(tok.value, pos)
        if tok.kind is TokenKind.IDENT:
            if tok.value == "card" and self.peek().kind is TokenKind.LPAREN:
                self.advance()
                self.advance()
                inner = self.set_term()
                self.expect(TokenKind.RPAREN)
                return ex.Card(inner, pos)
            if tok.value == "getHost" and self.peek().kind is TokenKind.LPAREN:
                target = self.host_of()
                self.expect(TokenKind.DOT)
                return ex.PropertyOf(target, self.name("property name"), pos)
            self.advance()
            target = ex.Name(tok.value, pos)
            self.expect(TokenKind.DOT, "'.' and a property name")
            return ex.PropertyOf(target, self.name("property name"), pos)
        self.fail("an integer term (literal, card(...), property access)")

    def host_of(self):
        pos = self.tok.position
        self.advance()  # getHost
        self.expect(TokenKind.LPAREN)
        var_tok = self.tok
        var = ex.Name(self.ident("component variable"), var_tok.position)
        self.expect(TokenKind.RPAREN)
        return ex.HostOf(var, pos)

    def host_ref(self):
        if self.tok.kind is TokenKind.IDENT and self.tok.value == "getHost" and self.peek().kind is TokenKind.LPAREN:
            return self.host_of()
        tok = self.tok
        return ex.Name(self.ident("host name or variable"), tok.position)

    def set_term(self):
        tok = self.tok
        pos = tok.position
        if tok.kind is not TokenKind.IDENT or tok.value not in _SET_FUNCTIONS:
            self.fail("a set term (connections, getComponents, components, instancesOf)")
        self.advance()
        self.expect(TokenKind.LPAREN)
        if tok.value == "connections":
            var_tok = self.tok
            var = ex.Name(self.ident("component variable"), var_tok.position)
            self.expect(TokenKind.DOT)
            iface = self.ident("interface or port name")
            node = ex.Connections(var, iface, pos)
        elif tok.value == "instancesOf":
            type_name = self.ident("component type or template name")
            self.expect_kw("in")
            self.expect_kw("deployment")
            node = ex.InstancesOf(type_name, pos)
        else:
            node = ex.ComponentsOn(self.host_ref(), pos)
        self.expect(TokenKind.RPAREN)
        return node


def parse_dsd(tokens) -> ast.Module:
    """Parse a token list (or raw source text) into an unresolved module."""
    if isinstance(tokens, str):
        tokens = tokenize(tokens)
    return Parser(list(tokens)).parse_module()
