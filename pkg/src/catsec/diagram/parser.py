"""Lexer and recursive-descent parser for the diagram language.

    program := decl* expr
    decl    := "let" IDENT "=" par ";"
    expr    := par ( ";" par )*
    par     := atom ( "*" atom )*
    atom    := GEN "[" obj ("," obj)* "]" | IDENT | "(" expr ")"
    obj     := IDENT | INT

A declaration's right-hand side is a single ``par``, because ``;`` also ends
the declaration; wrap sequences in parentheses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .ast import GENERATORS, Gen, ObjInt, ObjName, Par, Program, Ref, Seq, Span

KEYWORDS = {"let"} | set(GENERATORS)

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<punct>[\[\],();*=])
""", re.VERBOSE)


class DiagramSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int, expected: frozenset[str] = frozenset()):
        self.line, self.col, self.expected = line, col, frozenset(expected)
        exp = f"; expected one of {', '.join(sorted(expected))}" if expected else ""
        super().__init__(f"{line}:{col}: {message}{exp}")


@dataclass(frozen=True)
class Token:
    kind: str  # "int", "ident", a keyword, a punctuation mark, or "eof"
    text: str
    line: int
    col: int

    @property
    def end(self):
        return self.line, self.col + len(self.text)


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        col = pos - line_start + 1
        if not m:
            raise DiagramSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "int":
            out.append(Token("int", s, line, col))
        elif kind == "ident":
            out.append(Token(s if s in KEYWORDS else "ident", s, line, col))
        elif kind == "punct":
            out.append(Token(s, s, line, col))
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


_ATOM_START = frozenset(set(GENERATORS) | {"IDENT", "("})


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def error(self, expected) -> DiagramSyntaxError:
        t = self.tok
        what = "end of input" if t.kind == "eof" else repr(t.text)
        return DiagramSyntaxError(f"unexpected {what}", t.line, t.col, frozenset(expected))

    def expect(self, kind: str, shown: str | None = None) -> Token:
        if self.tok.kind != kind:
            raise self.error({shown or kind})
        return self.advance()

    def span(self, start: Token) -> Span:
        prev = self.toks[self.i - 1]
        end_line, end_col = prev.end
        return Span(start.line, start.col, end_line, end_col)

    def program(self) -> Program:
        start = self.tok
        decls = []
        while self.tok.kind == "let":
            self.advance()
            name = self.expect("ident", "IDENT").text
            self.expect("=")
            rhs = self.par()
            if self.tok.kind != ";":
                raise self.error({";", "*"})
            self.advance()
            decls.append((name, rhs))
        body = self.expr()
        if self.tok.kind != "eof":
            raise self.error({";", "*", "end of input"})
        return Program(tuple(decls), body, self.span(start))

    def expr(self):
        start = self.tok
        items = [self.par()]
        while self.tok.kind == ";":
            self.advance()
            items.append(self.par())
        return items[0] if len(items) == 1 else Seq(tuple(items), self.span(start))

    def par(self):
        start = self.tok
        items = [self.atom()]
        while self.tok.kind == "*":
            self.advance()
            items.append(self.atom())
        return items[0] if len(items) == 1 else Par(tuple(items), self.span(start))

    def atom(self):
        t = self.tok
        if t.kind in GENERATORS:
            self.advance()
            self.expect("[")
            args = [self.obj()]
            while self.tok.kind == ",":
                self.advance()
                args.append(self.obj())
            if self.tok.kind != "]":
                raise self.error({"]", ","})
            self.advance()
            want = GENERATORS[t.kind]
            if len(args) != want:
                raise DiagramSyntaxError(f"{t.kind} takes {want} object argument(s), got {len(args)}",
                                         t.line, t.col)
            return Gen(t.kind, tuple(args), self.span(t))
        if t.kind == "ident":
            self.advance()
            return Ref(t.text, self.span(t))
        if t.kind == "(":
            self.advance()
            e = self.expr()
            if self.tok.kind != ")":
                raise self.error({")", ";", "*"})
            self.advance()
            return e
        raise self.error(_ATOM_START)

    def obj(self):
        t = self.tok
        if t.kind == "ident":
            self.advance()
            return ObjName(t.text, self.span(t))
        if t.kind == "int":
            self.advance()
            n = int(t.text)
            if n < 1:
                raise DiagramSyntaxError("object sizes must be positive", t.line, t.col)
            return ObjInt(n, self.span(t))
        raise self.error({"IDENT", "INT"})


def parse(text: str) -> Program:
    """Parse a diagram program; a bare expression is a program with no declarations."""
    return _Parser(text).program()


def parse_expr(text: str):
    """Parse text that must be a single expression (no declarations)."""
    prog = parse(text)
    if prog.decls:
        raise DiagramSyntaxError("declarations are not allowed here", 1, 1)
    return prog.body
