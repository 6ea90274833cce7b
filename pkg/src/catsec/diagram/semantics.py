"""Type checking and evaluation of diagram terms.

Objects denote wire lists: a named object is one wire, an integer ``n > 1``
is one anonymous wire of size ``n``, and ``1`` (or any one-element object) is
the empty list, i.e. the tensor unit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from ..finstoch import (UNIT, FinSet, Morphism, WireList, compose, copy, deterministic,
                        discard, identity, point, swap, tensor, uniform)
from ..grouphopf import FiniteGroup
from .ast import Gen, ObjInt, ObjName, Par, Program, Ref, Seq, Span
from .env import Environment

_GROUP_GENS = {"unif", "mult", "unit", "inv"}


class DiagramTypeError(ValueError):
    def __init__(self, message: str, span: Span | None = None):
        self.span = span
        where = f"{span}: " if span is not None and span.line else ""
        super().__init__(where + message)


class InterfaceMismatch(DiagramTypeError):
    def __init__(self, left: WireList, right: WireList, span: Span | None = None):
        self.left, self.right = left, right
        super().__init__(f"interface mismatch: {left!r} does not match {right!r}", span)


@dataclass(frozen=True, eq=False)
class TypedNode:
    node: object
    dom: WireList
    cod: WireList
    children: tuple["TypedNode", ...] = ()


@dataclass(frozen=True, eq=False)
class TypedDiagram:
    decls: tuple[tuple[str, TypedNode], ...]
    body: TypedNode

    @property
    def dom(self) -> WireList:
        return self.body.dom

    @property
    def cod(self) -> WireList:
        return self.body.cod


@dataclass(frozen=True)
class _Obj:
    wires: WireList
    group: FiniteGroup | None


def _resolve_obj(o, env: Environment) -> _Obj:
    if isinstance(o, ObjInt):
        return _Obj(UNIT if o.n == 1 else WireList((FinSet(o.n),)), None)
    if isinstance(o, ObjName):
        if o.name not in env.objects:
            kind = "a morphism" if o.name in env.morphisms else "unbound"
            raise DiagramTypeError(f"object {o.name!r} is {kind}", o.span)
        od = env.objects[o.name]
        return _Obj(UNIT if od.finset.size == 1 else WireList((od.finset,)), od.group)
    raise TypeError(o)


def _need_group(kind: str, o, obj: _Obj) -> FiniteGroup:
    if obj.group is None:
        shown = o.name if isinstance(o, ObjName) else str(o.n)
        raise DiagramTypeError(f"{kind}[{shown}] needs a group structure on {shown}", o.span)
    return obj.group


def _gen_type(g: Gen, env: Environment) -> tuple[WireList, WireList]:
    objs = [_resolve_obj(a, env) for a in g.args]
    X = objs[0].wires
    k = g.kind
    if k == "id":
        return X, X
    if k == "swap":
        return X + objs[1].wires, objs[1].wires + X
    if k == "copy":
        return X, X + X
    if k == "del":
        return X, UNIT
    if k in _GROUP_GENS:
        _need_group(k, g.args[0], objs[0])
        return {"unif": (UNIT, X), "mult": (X + X, X), "unit": (UNIT, X), "inv": (X, X)}[k]
    if k == "act":
        G = objs[1]
        _need_group(k, g.args[1], G)
        return X + G.wires, G.wires
    raise DiagramTypeError(f"unknown generator {k!r}", g.span)


def _check(e, env: Environment, local: Mapping[str, TypedNode]) -> TypedNode:
    if isinstance(e, Gen):
        dom, cod = _gen_type(e, env)
        return TypedNode(e, dom, cod)
    if isinstance(e, Ref):
        if e.name in local:
            t = local[e.name]
            return TypedNode(e, t.dom, t.cod)
        if e.name in env.morphisms:
            m = env.morphisms[e.name]
            return TypedNode(e, m.dom, m.cod)
        if e.name in env.objects:
            raise DiagramTypeError(f"{e.name!r} is an object, not a morphism", e.span)
        raise DiagramTypeError(f"unbound name {e.name!r}", e.span)
    if isinstance(e, Seq):
        if not e.items:
            raise DiagramTypeError("empty sequence", e.span)
        kids = tuple(_check(c, env, local) for c in e.items)
        for a, b in zip(kids, kids[1:]):
            if a.cod.sizes != b.dom.sizes:
                raise InterfaceMismatch(a.cod, b.dom, getattr(b.node, "span", e.span))
        return TypedNode(e, kids[0].dom, kids[-1].cod, kids)
    if isinstance(e, Par):
        if not e.items:
            raise DiagramTypeError("empty parallel composition", e.span)
        kids = tuple(_check(c, env, local) for c in e.items)
        dom, cod = UNIT, UNIT
        for k in kids:
            dom, cod = dom + k.dom, cod + k.cod
        return TypedNode(e, dom, cod, kids)
    raise TypeError(f"not a diagram expression: {e!r}")


def typecheck(ast, env: Environment) -> TypedDiagram:
    """Annotate every node with its domain and codomain."""
    prog = ast if isinstance(ast, Program) else Program((), ast)
    local: dict[str, TypedNode] = {}
    decls = []
    for name, rhs in prog.decls:
        if name in local or name in env.objects or name in env.morphisms:
            raise DiagramTypeError(f"name {name!r} is already bound", getattr(rhs, "span", None))
        t = _check(rhs, env, local)
        local[name] = t
        decls.append((name, t))
    return TypedDiagram(tuple(decls), _check(prog.body, env, local))


# --------------------------------------------------------------------------
# evaluation


def _gen_value(g: Gen, env: Environment, exact: bool) -> Morphism:
    objs = [_resolve_obj(a, env) for a in g.args]
    X = objs[0].wires
    k = g.kind
    if k == "id":
        return identity(X, exact=exact)
    if k == "swap":
        return swap(X, objs[1].wires, exact=exact)
    if k == "copy":
        return copy(X, exact=exact) if len(X) else identity(UNIT, exact=exact)
    if k == "del":
        return discard(X, exact=exact)
    if k == "act":
        G = objs[1].group
        n = X.total_size
        table = {(a, h): G.power(h, a) for a in range(n) for h in range(G.order)}
        if len(X):
            return deterministic(X + objs[1].wires, objs[1].wires, lambda ah: table[ah], exact=exact)
        return identity(objs[1].wires, exact=exact) if G.order > 1 else identity(UNIT, exact=exact)
    G = objs[0].group
    if not len(X):
        return identity(UNIT, exact=exact)
    if k == "unif":
        return uniform(X, exact=exact)
    if k == "unit":
        return point(X, G.unit_index, exact=exact)
    if k == "inv":
        return deterministic(X, X, lambda x: G.inverse[x[0]], exact=exact)
    if k == "mult":
        return deterministic(X + X, X, lambda xy: G.cayley[xy[0]][xy[1]], exact=exact)
    raise DiagramTypeError(f"unknown generator {k!r}", g.span)


def _eval(t: TypedNode, env: Environment, local: Mapping[str, Morphism], exact: bool) -> Morphism:
    e = t.node
    if isinstance(e, Gen):
        return _gen_value(e, env, exact)
    if isinstance(e, Ref):
        return local[e.name] if e.name in local else env.morphisms[e.name]
    vals = [_eval(c, env, local, exact) for c in t.children]
    out = vals[0]
    if isinstance(e, Seq):
        for v in vals[1:]:
            out = compose(v, out)
    else:
        for v in vals[1:]:
            out = tensor(out, v)
    return out


def evaluate(term, env: Environment, exact: bool = False) -> Morphism:
    """Evaluate a typed diagram (or type-check and evaluate a raw tree)."""
    if not isinstance(term, TypedDiagram):
        term = typecheck(term, env)
    local: dict[str, Morphism] = {}
    for name, t in term.decls:
        local[name] = _eval(t, env, local, exact)
    return _eval(term.body, env, local, exact)
