"""Syntax trees for the diagram language.

Every node carries a source span that is ignored by equality, so trees
parsed from differently formatted text compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

GENERATORS = {
    # name: number of object arguments
    "id": 1, "swap": 2, "copy": 1, "del": 1, "unif": 1,
    "mult": 1, "unit": 1, "inv": 1, "act": 2,
}


@dataclass(frozen=True)
class Span:
    line: int
    col: int
    end_line: int
    end_col: int

    def __str__(self):
        return f"{self.line}:{self.col}"


NOSPAN = Span(0, 0, 0, 0)


@dataclass(frozen=True)
class ObjName:
    name: str
    span: Span = field(default=NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class ObjInt:
    """An anonymous n-element set; ``1`` is the tensor unit."""

    n: int
    span: Span = field(default=NOSPAN, compare=False, repr=False)


Obj = ObjName | ObjInt


@dataclass(frozen=True)
class Gen:
    kind: str
    args: tuple[Obj, ...]
    span: Span = field(default=NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Ref:
    name: str
    span: Span = field(default=NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Seq:
    """``a ; b ; ...`` in execution order."""

    items: tuple
    span: Span = field(default=NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Par:
    items: tuple
    span: Span = field(default=NOSPAN, compare=False, repr=False)


@dataclass(frozen=True)
class Program:
    decls: tuple[tuple[str, object], ...]
    body: object
    span: Span = field(default=NOSPAN, compare=False, repr=False)


Expr = Gen | Ref | Seq | Par


def gen(kind: str, *args) -> Gen:
    """Shorthand for tests: ``gen("swap", "G", 2)``."""
    return Gen(kind, tuple(ObjInt(a) if isinstance(a, int) else ObjName(a) for a in args))
