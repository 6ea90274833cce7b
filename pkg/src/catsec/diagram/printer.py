"""Pretty-printing diagram terms back to concrete syntax."""

from __future__ import annotations

from .ast import Gen, ObjName, Par, Program, Ref, Seq


def _obj(o) -> str:
    return o.name if isinstance(o, ObjName) else str(o.n)


def _expr(e, ctx: str) -> str:
    # ctx: "top" (no parens needed), "seq" (child of ;), "par" (child of *)
    if isinstance(e, Gen):
        return f"{e.kind}[{', '.join(_obj(a) for a in e.args)}]"
    if isinstance(e, Ref):
        return e.name
    if isinstance(e, Seq):
        s = " ; ".join(_expr(c, "seq") for c in e.items)
        return s if ctx == "top" else f"({s})"
    if isinstance(e, Par):
        s = " * ".join(_expr(c, "par") for c in e.items)
        return s if ctx in ("top", "seq") else f"({s})"
    raise TypeError(f"not a diagram expression: {e!r}")


def pretty(node) -> str:
    """Render a program or expression.

    Nested ``Seq`` inside ``Seq`` (and ``Par`` inside ``Par``) keep their
    parentheses, so the printed text parses back to the same tree.
    """
    if isinstance(node, Program):
        lines = [f"let {name} = {_expr(rhs, 'seq')};" for name, rhs in node.decls]
        lines.append(_expr(node.body, "top"))
        return "\n".join(lines)
    return _expr(node, "top")
