"""Finite sets and stochastic matrices as a symmetric monoidal category.

Conventions used throughout the package:

* A morphism ``X -> Y`` is a ``(|Y|, |X|)`` matrix whose entry ``(y, x)`` is
  ``P(y | x)``.  Composition is left multiplication, so ``compose(g, f)``
  runs ``f`` first.
* A list of wires is flattened big-endian: the leftmost wire is the most
  significant digit of the flat index.  This matches C-order reshaping, so
  ``matrix.reshape(cod.sizes + dom.sizes)`` gives one tensor axis per wire.

Matrices may hold floats or, for exact arithmetic, ``fractions.Fraction``
objects in an ``object`` array.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

DEFAULT_EPS = 1e-9

STOCHASTIC = "stochastic"
NONNEG = "nonneg"


class ShapeError(ValueError):
    """Raised when two interfaces do not line up."""


class NotStochasticError(ValueError):
    """Raised when a matrix declared stochastic has a bad column."""


@dataclass(frozen=True)
class Tolerance:
    eps: float = DEFAULT_EPS

    def __post_init__(self):
        if not self.eps >= 0:
            raise ValueError(f"tolerance must be nonnegative, got {self.eps}")


@dataclass(frozen=True)
class FinSet:
    """A finite set ``{0, ..., size-1}`` with optional element labels."""

    size: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if not isinstance(self.size, (int, np.integer)) or self.size < 1:
            raise ValueError(f"FinSet size must be a positive integer, got {self.size!r}")
        object.__setattr__(self, "size", int(self.size))
        if self.labels is not None:
            labels = tuple(str(s) for s in self.labels)
            if len(labels) != self.size:
                raise ValueError(f"expected {self.size} labels, got {len(labels)}")
            if len(set(labels)) != len(labels):
                raise ValueError("FinSet labels must be distinct")
            object.__setattr__(self, "labels", labels)

    def label(self, i: int) -> str:
        return self.labels[i] if self.labels is not None else str(i)

    def __repr__(self):
        return f"FinSet({self.size})" if self.labels is None else f"FinSet({self.size}, {self.labels})"


@dataclass(frozen=True)
class WireList:
    """An ordered tensor product of finite sets; the empty list is the unit."""

    wires: tuple[FinSet, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "wires", tuple(as_finset(w) for w in self.wires))

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(w.size for w in self.wires)

    @property
    def total_size(self) -> int:
        return int(np.prod(self.sizes, dtype=np.int64)) if self.wires else 1

    def __len__(self):
        return len(self.wires)

    def __iter__(self):
        return iter(self.wires)

    def __getitem__(self, item):
        if isinstance(item, slice):
            return WireList(self.wires[item])
        return self.wires[item]

    def __add__(self, other: "WireList") -> "WireList":
        return WireList(self.wires + as_wirelist(other).wires)

    def __repr__(self):
        return "I" if not self.wires else "⊗".join(str(s) for s in self.sizes)


UNIT = WireList(())


def as_finset(x) -> FinSet:
    if isinstance(x, FinSet):
        return x
    return FinSet(int(x))


def as_wirelist(x) -> WireList:
    """Accept a WireList, a FinSet, an int, or a sequence of those."""
    if isinstance(x, WireList):
        return x
    if isinstance(x, (FinSet, int, np.integer)):
        return WireList((as_finset(x),))
    return WireList(tuple(as_finset(w) for w in x))


def wires(*sizes) -> WireList:
    return WireList(tuple(as_finset(s) for s in sizes))


def _is_exact(a: np.ndarray) -> bool:
    return a.dtype == object


def _as_matrix(matrix, shape) -> np.ndarray:
    a = np.asarray(matrix)
    if a.dtype != object:
        a = a.astype(float)
    if a.size != shape[0] * shape[1]:
        raise ShapeError(f"matrix has {a.size} entries, interface needs {shape[0]}x{shape[1]}")
    a = a.reshape(shape).copy()
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Morphism:
    """A nonnegative matrix between two wire lists.

    ``flavor == "stochastic"`` additionally requires unit column sums.
    """

    dom: WireList
    cod: WireList
    matrix: np.ndarray = field(repr=False)
    flavor: str = STOCHASTIC

    def __post_init__(self):
        dom, cod = as_wirelist(self.dom), as_wirelist(self.cod)
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        object.__setattr__(self, "matrix", _as_matrix(self.matrix, (cod.total_size, dom.total_size)))
        if self.flavor not in (STOCHASTIC, NONNEG):
            raise ValueError(f"unknown flavor {self.flavor!r}")
        m = self.matrix
        if _is_exact(m):
            if any(x < 0 for x in m.flat):
                raise ValueError("morphism entries must be nonnegative")
            if self.flavor == STOCHASTIC:
                for j, s in enumerate(m.sum(axis=0)):
                    if s != 1:
                        raise NotStochasticError(f"column {j} sums to {s}, not 1")
        else:
            if not np.all(np.isfinite(m)):
                raise ValueError("morphism entries must be finite")
            if m.size and m.min() < -DEFAULT_EPS:
                raise ValueError(f"morphism entries must be nonnegative (min {m.min():.3g})")
            if self.flavor == STOCHASTIC:
                sums = m.sum(axis=0)
                bad = np.flatnonzero(np.abs(sums - 1.0) > DEFAULT_EPS)
                if bad.size:
                    j = int(bad[0])
                    raise NotStochasticError(f"column {j} sums to {sums[j]!r}, not 1")

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def exact(self) -> bool:
        return _is_exact(self.matrix)

    def tensor_view(self) -> np.ndarray:
        """The matrix reshaped with one axis per codomain wire then per domain wire."""
        return self.matrix.reshape(self.cod.sizes + self.dom.sizes)

    def as_float(self) -> "Morphism":
        if not self.exact:
            return self
        return Morphism(self.dom, self.cod, self.matrix.astype(float), self.flavor)

    def with_flavor(self, flavor: str) -> "Morphism":
        return Morphism(self.dom, self.cod, self.matrix, flavor)

    def is_deterministic(self, tol: float = DEFAULT_EPS) -> bool:
        m = self.as_float().matrix
        return bool(np.all((np.abs(m) <= tol) | (np.abs(m - 1.0) <= tol)))

    def max_abs_diff(self, other: "Morphism") -> float:
        _check_same_type(self, other)
        return float(np.max(np.abs(self.as_float().matrix - other.as_float().matrix), initial=0.0))

    def close_to(self, other: "Morphism", tol: float = DEFAULT_EPS) -> bool:
        return self.max_abs_diff(other) <= tol

    def __matmul__(self, other: "Morphism") -> "Morphism":
        return compose(self, other)

    def __repr__(self):
        return f"Morphism({self.dom!r} -> {self.cod!r}, {self.flavor})"


def _check_same_type(r: Morphism, s: Morphism):
    if r.dom.sizes != s.dom.sizes or r.cod.sizes != s.cod.sizes:
        raise ShapeError(
            f"morphisms have different types: {r.dom!r}->{r.cod!r} vs {s.dom!r}->{s.cod!r}"
        )


def _combine_flavor(*fs: Morphism) -> str:
    return STOCHASTIC if all(f.flavor == STOCHASTIC for f in fs) else NONNEG


def _promote(*ms: np.ndarray) -> list[np.ndarray]:
    if any(_is_exact(m) for m in ms) and not all(_is_exact(m) for m in ms):
        return [m.astype(float) if _is_exact(m) else m for m in ms]
    return list(ms)


def compose(g: Morphism, f: Morphism) -> Morphism:
    """``g ∘ f``: run ``f`` then ``g``."""
    if len(f.cod) != len(g.dom):
        raise ShapeError(
            f"cannot compose: f has {len(f.cod)} output wires, g expects {len(g.dom)} input wires"
        )
    for i, (a, b) in enumerate(zip(f.cod.sizes, g.dom.sizes)):
        if a != b:
            raise ShapeError(f"cannot compose: wire {i} has size {a} on f's output but {b} on g's input")
    gm, fm = _promote(g.matrix, f.matrix)
    return Morphism(f.dom, g.cod, gm @ fm, _combine_flavor(f, g))


def tensor(f: Morphism, g: Morphism) -> Morphism:
    """``f ⊗ g``, with ``f`` as the most significant block."""
    fm, gm = _promote(f.matrix, g.matrix)
    return Morphism(f.dom + g.dom, f.cod + g.cod, np.kron(fm, gm), _combine_flavor(f, g))


def compose_all(*fs: Morphism) -> Morphism:
    """Compose in diagram order: ``compose_all(f, g, h) == h ∘ g ∘ f``."""
    out = fs[0]
    for f in fs[1:]:
        out = compose(f, out)
    return out


def tensor_all(*fs: Morphism) -> Morphism:
    if not fs:
        return identity(UNIT)
    out = fs[0]
    for f in fs[1:]:
        out = tensor(out, f)
    return out


def _zeros(rows: int, cols: int, exact: bool) -> np.ndarray:
    if exact:
        return np.array([[Fraction(0)] * cols for _ in range(rows)], dtype=object).reshape(rows, cols)
    return np.zeros((rows, cols))


def _one(exact: bool):
    return Fraction(1) if exact else 1.0


def identity(on, exact: bool = False) -> Morphism:
    w = as_wirelist(on)
    n = w.total_size
    m = _zeros(n, n, exact)
    for i in range(n):
        m[i, i] = _one(exact)
    return Morphism(w, w, m)


def permute(on, perm: Sequence[int], exact: bool = False) -> Morphism:
    """Reorder wires: the output's k-th wire is the input's ``perm[k]``-th wire."""
    w = as_wirelist(on)
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(len(w))):
        raise ValueError(f"{perm} is not a permutation of {len(w)} wire positions")
    out = WireList(tuple(w.wires[p] for p in perm))
    n = w.total_size
    m = _zeros(n, n, exact)
    idx = np.arange(n).reshape(w.sizes) if w.wires else np.arange(1)
    src = np.transpose(idx, perm).reshape(-1) if w.wires else idx
    if exact:
        for row, col in enumerate(src):
            m[row, int(col)] = _one(exact)
    else:
        m[np.arange(n), src] = 1.0
    return Morphism(w, out, m)


def swap(x, y, exact: bool = False) -> Morphism:
    """``X ⊗ Y -> Y ⊗ X`` for two wire lists."""
    x, y = as_wirelist(x), as_wirelist(y)
    nx, ny = len(x), len(y)
    return permute(x + y, list(range(nx, nx + ny)) + list(range(nx)), exact)


def _single(on) -> FinSet:
    w = as_wirelist(on)
    if len(w) != 1:
        raise ShapeError(f"expected a single wire, got {w!r}")
    return w.wires[0]


def copy(on, exact: bool = False) -> Morphism:
    x = _single(on)
    n = x.size
    m = _zeros(n * n, n, exact)
    for i in range(n):
        m[i * n + i, i] = _one(exact)
    return Morphism(WireList((x,)), WireList((x, x)), m)


def delete(on, exact: bool = False) -> Morphism:
    x = _single(on)
    m = _zeros(1, x.size, exact)
    m[0, :] = _one(exact)
    return Morphism(WireList((x,)), UNIT, m)


def discard(on, exact: bool = False) -> Morphism:
    """Delete for an arbitrary wire list (a single all-ones row)."""
    w = as_wirelist(on)
    m = _zeros(1, w.total_size, exact)
    m[0, :] = _one(exact)
    return Morphism(w, UNIT, m)


def point(on, x: int, exact: bool = False) -> Morphism:
    s = _single(on)
    if not 0 <= int(x) < s.size:
        raise IndexError(f"point {x} out of range for a set of size {s.size}")
    m = _zeros(s.size, 1, exact)
    m[int(x), 0] = _one(exact)
    return Morphism(UNIT, WireList((s,)), m)


def uniform(on, exact: bool = False) -> Morphism:
    s = _single(on)
    m = _zeros(s.size, 1, exact)
    m[:, 0] = Fraction(1, s.size) if exact else 1.0 / s.size
    return Morphism(UNIT, WireList((s,)), m)


def deterministic(dom, cod, fn, exact: bool = False) -> Morphism:
    """The 0/1 matrix of a function on flat indices, ``fn(tuple_in) -> tuple_out``.

    ``fn`` receives and returns tuples of per-wire indices.
    """
    dom, cod = as_wirelist(dom), as_wirelist(cod)
    m = _zeros(cod.total_size, dom.total_size, exact)
    for col, xs in enumerate(itertools.product(*[range(s) for s in dom.sizes])):
        ys = fn(xs)
        if isinstance(ys, (int, np.integer)):
            ys = (ys,)
        row = np.ravel_multi_index(tuple(ys), cod.sizes) if cod.wires else 0
        m[int(row), col] = _one(exact)
    return Morphism(dom, cod, m)


_STRUCTURAL = ("identity", "swap", "copy", "delete", "point", "uniform", "permute")


def structural(kind: str, on, *, x: int | None = None, perm: Sequence[int] | None = None,
               exact: bool = False) -> Morphism:
    """Build one of the structural generators by name.

    ``swap`` expects ``on`` to hold exactly two wires; ``copy``, ``delete``,
    ``point`` and ``uniform`` act on a single wire.
    """
    if kind == "identity":
        return identity(on, exact)
    if kind == "swap":
        w = as_wirelist(on)
        if len(w) != 2:
            raise ShapeError(f"swap needs exactly two wires, got {w!r}")
        return swap(w[0:1], w[1:2], exact)
    if kind == "copy":
        return copy(on, exact)
    if kind == "delete":
        return delete(on, exact)
    if kind == "point":
        if x is None:
            raise ValueError("point needs an element index x")
        return point(on, x, exact)
    if kind == "uniform":
        return uniform(on, exact)
    if kind == "permute":
        if perm is None:
            raise ValueError("permute needs a permutation")
        return permute(on, perm, exact)
    raise ValueError(f"unknown structural morphism {kind!r}; expected one of {_STRUCTURAL}")


def channel_tv(a: np.ndarray, b: np.ndarray) -> float:
    """Max over columns of half the L1 distance between two matrices."""
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    diff = np.abs(a - b)
    cols = diff.sum(axis=0)
    best = max(cols)
    return float(best / 2) if _is_exact(diff) else float(best) / 2.0


def tv_distance(r: Morphism, s: Morphism) -> float:
    """Worst-case (over deterministic inputs) total-variation distance."""
    _check_same_type(r, s)
    if r.flavor != STOCHASTIC or s.flavor != STOCHASTIC:
        raise ValueError("tv_distance is defined for stochastic morphisms")
    a, b = _promote(r.matrix, s.matrix)
    return channel_tv(a, b)


def random_stochastic(dom, cod, rng: np.random.Generator, sparsity: float = 0.0) -> Morphism:
    """A seeded-random stochastic matrix; ``sparsity`` zeroes entries at random."""
    dom, cod = as_wirelist(dom), as_wirelist(cod)
    m = rng.random((cod.total_size, dom.total_size))
    if sparsity > 0:
        m = m * (rng.random(m.shape) >= sparsity)
        empty = m.sum(axis=0) == 0
        m[rng.integers(0, cod.total_size, size=int(empty.sum())), np.flatnonzero(empty)] = 1.0
    return Morphism(dom, cod, m / m.sum(axis=0, keepdims=True))


def from_columns(dom, cod, columns: Iterable[Sequence[float]]) -> Morphism:
    cols = np.array(list(columns), dtype=float).T
    return Morphism(dom, cod, cols)
