"""Desired-state description language: tokenize, parse, resolve, print."""

from __future__ import annotations

from pathlib import Path

from .errors import Diagnostic, DsdError, LexError, ParseError, Position, ResolveError
from .lexer import Token, TokenKind, tokenize
from .model import (
    ComponentType,
    Conjunct,
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
from .parser import parse_dsd
from .printer import pretty_print
from .resolve import resolve

__all__ = [
    "ComponentType",
    "Conjunct",
    "ConstraintSet",
    "DesiredStateDescription",
    "Diagnostic",
    "DsdError",
    "Host",
    "HostTemplate",
    "Interface",
    "LexError",
    "Optimisation",
    "ParseError",
    "Port",
    "Position",
    "Property",
    "ResolveError",
    "Template",
    "Token",
    "TokenKind",
    "check_source",
    "load_dsd",
    "parse_dsd",
    "parse_source",
    "pretty_print",
    "resolve",
    "tokenize",
]


def parse_source(source: str, name: str = "dsd") -> DesiredStateDescription:
    """tokenize -> parse -> resolve in one call."""
    return resolve(parse_dsd(tokenize(source)), name=name)


def load_dsd(path, max_instances: int | None = None) -> DesiredStateDescription:
    path = Path(path)
    dsd = parse_source(path.read_text(encoding="utf-8"), name=path.stem)
    if max_instances is not None:
        from dataclasses import replace

        dsd = replace(dsd, max_instances_per_host=max_instances)
    return dsd


def check_source(source: str) -> list[Diagnostic]:
    """Return every diagnostic for ``source`` (empty when it is clean)."""
    try:
        parse_source(source)
    except DsdError as exc:
        return exc.diagnostics
    return []
