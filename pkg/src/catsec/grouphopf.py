"""Finite groups as Hopf algebras with an integral in FinStoch.

A finite group gives six generators: multiplication, unit, inverse, copy,
delete and the uniform state.  :func:`check_hopf` evaluates both sides of
each Hopf-algebra law and reports the largest entrywise gap.
:func:`check_action` does the same for the exponentiation action of
``Z_n`` on a cyclic group used by Diffie-Hellman.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import permutations
from typing import Sequence

from .finstoch import (DEFAULT_EPS, FinSet, Morphism, compose, compose_all, copy, delete,
                       deterministic, identity, point, swap, tensor, uniform)
from .network import Box, contract


class GroupError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A group given by its Cayley table: ``cayley[x][y]`` is the index of ``x·y``."""

    carrier: FinSet
    cayley: tuple[tuple[int, ...], ...]
    unit_index: int
    inverse: tuple[int, ...]
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "cayley", tuple(tuple(int(v) for v in row) for row in self.cayley))
        object.__setattr__(self, "inverse", tuple(int(v) for v in self.inverse))

    @property
    def order(self) -> int:
        return self.carrier.size

    def mul(self, x: int, y: int) -> int:
        return self.cayley[x][y]

    def power(self, h: int, a: int) -> int:
        out = self.unit_index
        for _ in range(a):
            out = self.cayley[out][h]
        return out

    def generates(self, g: int) -> bool:
        seen, x = set(), self.unit_index
        while x not in seen:
            seen.add(x)
            x = self.cayley[x][g]
        return len(seen) == self.order

    def validate(self) -> None:
        n, t = self.order, self.cayley
        if len(t) != n or any(len(row) != n for row in t):
            raise GroupError(f"Cayley table must be {n}x{n}")
        full = set(range(n))
        for x in range(n):
            if set(t[x]) != full or {t[y][x] for y in range(n)} != full:
                raise GroupError("Cayley table is not a Latin square")
        e = self.unit_index
        if not 0 <= e < n or any(t[e][x] != x or t[x][e] != x for x in range(n)):
            raise GroupError(f"index {e} is not a two-sided unit")
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    if t[t[x][y]][z] != t[x][t[y][z]]:
                        raise GroupError(f"not associative at ({x},{y},{z})")
        if len(self.inverse) != n:
            raise GroupError("inverse table has the wrong length")
        for x in range(n):
            i = self.inverse[x]
            if t[x][i] != e or t[i][x] != e:
                raise GroupError(f"{i} is not the inverse of {x}")

    @classmethod
    def from_table(cls, table: Sequence[Sequence[int]], name: str = "") -> "FiniteGroup":
        """Build and validate a group; unit and inverses are read off the table."""
        n = len(table)
        if n < 1:
            raise GroupError("a group needs at least one element")
        units = [e for e in range(n)
                 if all(table[e][x] == x and table[x][e] == x for x in range(n))]
        if not units:
            raise GroupError("table has no two-sided unit")
        e = units[0]
        inv = []
        for x in range(n):
            cands = [y for y in range(n) if table[x][y] == e and table[y][x] == e]
            if not cands:
                raise GroupError(f"element {x} has no inverse")
            inv.append(cands[0])
        g = cls(FinSet(n), tuple(map(tuple, table)), e, tuple(inv), name)
        g.validate()
        return g

    @classmethod
    def unchecked(cls, table: Sequence[Sequence[int]], unit_index: int = 0,
                  inverse: Sequence[int] | None = None, name: str = "") -> "FiniteGroup":
        """A table that skips validation, for testing the equation checker on non-groups."""
        n = len(table)
        if inverse is None:
            inverse = [next((y for y in range(n) if table[x][y] == unit_index), 0) for x in range(n)]
        return cls(FinSet(n), tuple(map(tuple, table)), unit_index, tuple(inverse), name)


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise GroupError(f"cyclic group order must be positive, got {n}")
    return FiniteGroup.from_table([[(x + y) % n for y in range(n)] for x in range(n)], f"Z{n}")


def klein4() -> FiniteGroup:
    return FiniteGroup.from_table([[x ^ y for y in range(4)] for x in range(4)], "klein4")


def symmetric(k: int) -> FiniteGroup:
    perms = list(permutations(range(k)))
    index = {p: i for i, p in enumerate(perms)}
    # (p·q)(i) = p(q(i))
    table = [[index[tuple(p[q[i]] for i in range(k))] for q in perms] for p in perms]
    return FiniteGroup.from_table(table, f"S{k}")


def product_group(g: FiniteGroup, h: FiniteGroup) -> FiniteGroup:
    n, m = g.order, h.order
    table = [[g.cayley[a // m][b // m] * m + h.cayley[a % m][b % m] for b in range(n * m)]
             for a in range(n * m)]
    return FiniteGroup.from_table(table, f"{g.name}x{h.name}")


def multiplicative_mod(p: int) -> FiniteGroup:
    """The unit group ``Z_p*`` of a prime; element ``i`` stands for residue ``i + 1``."""
    if p < 2 or any(p % d == 0 for d in range(2, int(p ** 0.5) + 1)):
        raise GroupError(f"{p} is not a prime")
    n = p - 1
    return FiniteGroup.from_table([[((x + 1) * (y + 1)) % p - 1 for y in range(n)] for x in range(n)],
                                  f"Z{p}*")


def parse_group(spec: str) -> FiniteGroup:
    """Parse ``cyclic:n``, ``klein4``, ``sym:k`` or a path to a JSON Cayley table."""
    if spec.startswith("cyclic:"):
        try:
            n = int(spec.split(":", 1)[1])
        except ValueError as exc:
            raise GroupError(f"bad cyclic group spec {spec!r}") from exc
        return cyclic(n)
    if spec == "klein4":
        return klein4()
    if spec.startswith("sym:"):
        try:
            k = int(spec.split(":", 1)[1])
        except ValueError as exc:
            raise GroupError(f"bad symmetric group spec {spec!r}") from exc
        if k < 1 or k > 4:
            raise GroupError("symmetric groups are supported for 1 <= k <= 4")
        return symmetric(k)
    try:
        with open(spec, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise GroupError(f"unknown group spec {spec!r}") from exc
    table = data["cayley"] if isinstance(data, dict) else data
    return FiniteGroup.from_table(table, str(spec))


# --------------------------------------------------------------------------
# generators


@dataclass(frozen=True, eq=False)
class GroupGens:
    mult: Morphism
    unit: Morphism
    inv: Morphism
    copy: Morphism
    delete: Morphism
    integral: Morphism
    group: FiniteGroup | None = None

    @property
    def carrier(self) -> FinSet:
        return self.copy.dom.wires[0]


def group_generators(G: FiniteGroup, exact: bool = False) -> GroupGens:
    X = G.carrier
    return GroupGens(
        mult=deterministic([X, X], [X], lambda xy: G.cayley[xy[0]][xy[1]], exact=exact),
        unit=point(X, G.unit_index, exact=exact),
        inv=deterministic([X], [X], lambda x: G.inverse[x[0]], exact=exact),
        copy=copy(X, exact=exact),
        delete=delete(X, exact=exact),
        integral=uniform(X, exact=exact),
        group=G,
    )


@dataclass
class AxiomReport:
    residuals: dict[str, float] = field(default_factory=dict)
    tol: float = DEFAULT_EPS

    @property
    def passed(self) -> dict[str, bool]:
        return {k: v <= self.tol for k, v in self.residuals.items()}

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    def failing(self) -> list[str]:
        return [k for k, ok in self.passed.items() if not ok]


def _gap(*sides: Morphism) -> float:
    return max(float(sides[0].max_abs_diff(s)) for s in sides[1:])


def _bialgebra_rhs(g: GroupGens) -> Morphism:
    # (mult ⊗ mult)(id ⊗ swap ⊗ id)(copy ⊗ copy), contracted wire by wire: the
    # dense middle factor would have |X|^4 rows
    boxes = [Box(g.copy, ["x"], ["x1", "x2"]), Box(g.copy, ["y"], ["y1", "y2"]),
             Box(g.mult, ["x1", "y1"], ["a"]), Box(g.mult, ["x2", "y2"], ["b"])]
    return contract(boxes, ["x", "y"], ["a", "b"])


def hopf_sides(g: GroupGens) -> dict[str, list[Morphism]]:
    """Both (or all) sides of each Hopf law, keyed E1..E6."""
    X = g.carrier
    i = identity(X)
    return {
        "E1": [compose(g.mult, tensor(g.mult, i)), compose(g.mult, tensor(i, g.mult))],
        "E1u": [compose(g.mult, tensor(g.unit, i)), i, compose(g.mult, tensor(i, g.unit))],
        "E2": [compose(tensor(g.copy, i), g.copy), compose(tensor(i, g.copy), g.copy)],
        "E2u": [compose(tensor(g.delete, i), g.copy), i, compose(tensor(i, g.delete), g.copy)],
        "E3": [compose(g.copy, g.mult), _bialgebra_rhs(g)],
        "E4": [compose_all(g.copy, tensor(i, g.inv), g.mult),
               compose(g.unit, g.delete),
               compose_all(g.copy, tensor(g.inv, i), g.mult)],
        "E5": [compose(g.mult, tensor(g.integral, i)),
               compose(g.integral, g.delete),
               compose(g.mult, tensor(i, g.integral))],
        "E6": [compose(g.delete, g.integral), identity([])],
    }


def check_hopf(gens: GroupGens, tol: float = DEFAULT_EPS) -> AxiomReport:
    """Residuals for the monoid (E1), comonoid (E2), bialgebra (E3),
    antipode (E4), integral (E5) and normalization (E6) laws."""
    s = hopf_sides(gens)
    res = {
        "E1": max(_gap(*s["E1"]), _gap(*s["E1u"])),
        "E2": max(_gap(*s["E2"]), _gap(*s["E2u"])),
        "E3": _gap(*s["E3"]),
        "E4": _gap(*s["E4"]),
        "E5": _gap(*s["E5"]),
        "E6": _gap(*s["E6"]),
    }
    return AxiomReport(res, tol)


# --------------------------------------------------------------------------
# exponentiation action


@dataclass(frozen=True, eq=False)
class ActionGens:
    modulus: FinSet
    act: Morphism
    exp_rand: Morphism
    gen_point: Morphism
    zn_mult: Morphism | None = None


def action_generators(n_obj, G: FiniteGroup, g_index: int, exact: bool = False) -> ActionGens:
    """``act(a, h) = h^a`` for ``a`` in ``range(n)``; ``g_index`` must generate ``G``."""
    N = n_obj if isinstance(n_obj, FinSet) else FinSet(int(n_obj))
    if not 0 <= g_index < G.order or not G.generates(g_index):
        raise GroupError(f"element {g_index} does not generate {G.name or 'the group'}")
    n = N.size
    powers = {(a, h): G.power(h, a) for a in range(n) for h in range(G.order)}
    return ActionGens(
        modulus=N,
        act=deterministic([N, G.carrier], [G.carrier], lambda ah: powers[ah], exact=exact),
        exp_rand=uniform(N, exact=exact),
        gen_point=point(G.carrier, g_index, exact=exact),
        zn_mult=deterministic([N, N], [N], lambda ab: (ab[0] * ab[1]) % n, exact=exact),
    )


def check_action(gens: GroupGens, act: ActionGens, tol: float = DEFAULT_EPS) -> AxiomReport:
    """Residuals for the module laws (E7), determinism of act and g (E8),
    commutativity of exponent multiplication (E9) and cocommutative copy (E10)."""
    X, N = gens.carrier, act.modulus
    n = N.size
    iX, iN = identity(X), identity(N)
    zn_mult = act.zn_mult if act.zn_mult is not None else deterministic(
        [N, N], [N], lambda ab: (ab[0] * ab[1]) % n)
    one = point(N, 1 % n)
    # (ab)·h = a·(b·h) and 1·h = h
    e7 = max(
        _gap(compose(act.act, tensor(zn_mult, iX)), compose(act.act, tensor(iN, act.act))),
        _gap(compose(act.act, tensor(one, iX)), iX),
    )
    # copying the output of a deterministic map equals running it twice on copies
    twice = contract([Box(copy(N), ["a"], ["a1", "a2"]), Box(copy(X), ["h"], ["h1", "h2"]),
                      Box(act.act, ["a1", "h1"], ["u"]), Box(act.act, ["a2", "h2"], ["v"])],
                     ["a", "h"], ["u", "v"])
    e8 = max(
        _gap(compose(gens.copy, act.act), twice),
        _gap(compose(gens.copy, act.gen_point), tensor(act.gen_point, act.gen_point)),
    )
    e9 = _gap(zn_mult, compose(zn_mult, swap(N, N)))
    e10 = _gap(gens.copy, compose(swap(X, X), gens.copy))
    return AxiomReport({"E7": e7, "E8": e8, "E9": e9, "E10": e10}, tol)
