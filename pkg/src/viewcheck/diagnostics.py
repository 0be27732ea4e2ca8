"""Diagnostics shared by the parser, the checkers and the CLI."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .syntax import Span


@dataclass
class Diagnostic:
    severity: str
    rule: str
    message: str
    span: Optional[Span] = None
    file: str = "<input>"
    constraint: Optional[str] = None

    def render(self) -> str:
        line, col = (self.span.line, self.span.col) if self.span else (0, 0)
        text = f"{self.file}:{line}:{col}: {self.severity}: [{self.rule}] {self.message}"
        if self.constraint:
            text += f" (constraint: {self.constraint})"
        return text

    def to_json(self) -> dict:
        return {
            "severity": self.severity,
            "rule": self.rule,
            "message": self.message,
            "file": self.file,
            "line": self.span.line if self.span else None,
            "col": self.span.col if self.span else None,
            "end_line": self.span.end_line if self.span else None,
            "end_col": self.span.end_col if self.span else None,
            "constraint": self.constraint,
        }


class ViewcheckError(Exception):
    """Base class; carries one diagnostic."""

    def __init__(self, rule: str, message: str, span: Optional[Span] = None,
                 constraint: Optional[str] = None):
        super().__init__(message)
        self.rule = rule
        self.message = message
        self.span = span
        self.constraint = constraint

    def diagnostic(self, file: str = "<input>") -> Diagnostic:
        return Diagnostic("error", self.rule, self.message, self.span, file, self.constraint)

    def __str__(self) -> str:
        return self.diagnostic().render()


class ParseError(ViewcheckError):
    def __init__(self, message: str, span: Optional[Span], expected: frozenset = frozenset()):
        super().__init__("syntax", message, span)
        self.expected = expected


class SortError(ViewcheckError):
    pass


class CheckError(ViewcheckError):
    """A typing, view or constraint failure; ``rule`` names the failing rule."""


def dump_json(diags: list[Diagnostic]) -> str:
    return json.dumps([d.to_json() for d in diags], indent=2)
