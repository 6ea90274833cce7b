"""Contraction of networks of boxes connected by named wires.

A network is a list of :class:`Box` values.  Each box reads some named wires
and writes others.  Contracting the network multiplies all kernels together
and sums over every wire that is neither an open input nor an open output.
A wire read by several boxes is implicitly copied; a wire that nobody reads
is discarded.

For acyclic networks this is ordinary sequential/parallel composition.  It
is also the correct "link product" when a box is a causal multi-stage
process (a comb) written as one flattened kernel, which is how protocol
parties and simulators are represented.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .finstoch import (NONNEG, STOCHASTIC, FinSet, Morphism, ShapeError, WireList,
                       as_finset)

_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


class WiringError(ValueError):
    """Raised when a network is malformed or produces an unnormalized kernel."""


@dataclass(frozen=True, eq=False)
class Box:
    """A morphism with its input and output wires named."""

    morphism: Morphism
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        object.__setattr__(self, "outputs", tuple(self.outputs))
        if len(self.inputs) != len(self.morphism.dom):
            raise ShapeError(
                f"box {self.label or '?'}: {len(self.inputs)} input names for "
                f"{len(self.morphism.dom)} domain wires"
            )
        if len(self.outputs) != len(self.morphism.cod):
            raise ShapeError(
                f"box {self.label or '?'}: {len(self.outputs)} output names for "
                f"{len(self.morphism.cod)} codomain wires"
            )
        names = self.inputs + self.outputs
        if len(set(names)) != len(names):
            raise WiringError(f"box {self.label or '?'} repeats a wire name: {names}")

    def sizes(self) -> dict[str, int]:
        out = dict(zip(self.inputs, self.morphism.dom.sizes))
        out.update(zip(self.outputs, self.morphism.cod.sizes))
        return out

    def renamed(self, mapping: dict[str, str]) -> "Box":
        return Box(self.morphism,
                   tuple(mapping.get(w, w) for w in self.inputs),
                   tuple(mapping.get(w, w) for w in self.outputs),
                   self.label)


def wire_sizes(boxes: Sequence[Box], extra: dict[str, int] | None = None) -> dict[str, int]:
    sizes: dict[str, int] = dict(extra or {})
    for b in boxes:
        for name, n in b.sizes().items():
            if sizes.setdefault(name, n) != n:
                raise ShapeError(f"wire {name!r} has size {sizes[name]} and {n} in different places")
    return sizes


def _check_producers(boxes: Sequence[Box], open_in: Sequence[str]):
    produced: dict[str, str] = {name: "<open input>" for name in open_in}
    for b in boxes:
        for w in b.outputs:
            if w in produced:
                raise WiringError(f"wire {w!r} is produced twice ({produced[w]} and {b.label or 'box'})")
            produced[w] = b.label or "box"
    for b in boxes:
        for w in b.inputs:
            if w not in produced:
                raise WiringError(f"wire {w!r} read by {b.label or 'box'} has no producer")
    return produced


def contract_tensor(boxes: Sequence[Box], open_out: Sequence[str], open_in: Sequence[str],
                    sizes: dict[str, int], extra: Sequence[tuple[np.ndarray, Sequence[str]]] = ()):
    """Contract to a tensor with axes ``open_out + open_in`` (plus any extra free axes).

    ``extra`` holds raw tensors with labelled axes that join the contraction.
    Labels that appear only in ``extra`` and in the output are kept.
    """
    terms: list[tuple[np.ndarray, list[str]]] = []
    for b in boxes:
        terms.append((b.morphism.tensor_view(), list(b.outputs) + list(b.inputs)))
    for t, labels in extra:
        terms.append((t, list(labels)))
    result_labels = list(open_out) + list(open_in)

    # open inputs nobody reads still need an axis in the result
    used = {lab for _, labels in terms for lab in labels}
    exact = any(t.dtype == object for t, _ in terms)
    for name in open_in:
        if name not in used:
            ones = np.ones(sizes[name], dtype=object if exact else float)
            if exact:
                ones[:] = 1
            terms.append((ones, [name]))
    if exact:
        terms = [(t if t.dtype == object else t.astype(object), labels) for t, labels in terms]

    if not terms:
        return np.ones(())

    # sequential pairwise contraction keeps each einsum call well under 52 labels;
    # the next term is chosen greedily to keep the intermediate small
    dims = {lab: n for t, labs in terms for lab, n in zip(labs, np.shape(t))}
    cur, cur_labels = terms[0]
    remaining = list(terms[1:])

    def kept(labels, rest):
        needed = set(result_labels)
        for _, labs in rest:
            needed.update(labs)
        return [lab for lab in dict.fromkeys(labels) if lab in needed]

    while remaining:
        best = None
        for i, (_, labs) in enumerate(remaining):
            rest = remaining[:i] + remaining[i + 1:]
            keep = kept(cur_labels + labs, rest)
            size = int(np.prod([dims[lab] for lab in keep], dtype=np.int64)) if keep else 1
            shared = len(set(labs) & set(cur_labels))
            key = (shared == 0, size)
            if best is None or key < best[0]:
                best = (key, i, keep)
        _, i, keep = best
        nxt, nxt_labels = remaining.pop(i)
        cur = _einsum([(cur, cur_labels), (nxt, nxt_labels)], keep)
        cur_labels = keep
    keep = kept(cur_labels, [])
    if keep != cur_labels:
        cur = _einsum([(cur, cur_labels)], keep)
        cur_labels = keep
    missing = [lab for lab in result_labels if lab not in cur_labels]
    if missing:
        raise WiringError(f"open wires {missing} are not connected to anything")
    free = [lab for lab in cur_labels if lab not in result_labels]
    order = result_labels + free
    perm = [cur_labels.index(lab) for lab in order]
    return np.transpose(cur, perm), free


def _einsum(operands, out_labels):
    letters: dict[str, str] = {}
    for _, labels in operands:
        for lab in labels:
            if lab not in letters:
                if len(letters) >= len(_LETTERS):
                    raise WiringError("too many simultaneous wires in one contraction step")
                letters[lab] = _LETTERS[len(letters)]
    spec = ",".join("".join(letters[lab] for lab in labels) for _, labels in operands)
    spec += "->" + "".join(letters[lab] for lab in out_labels)
    arrays = [a for a, _ in operands]
    if any(a.dtype == object for a in arrays):
        return np.einsum(spec, *arrays)
    return np.einsum(spec, *arrays, optimize=True)


def contract(boxes: Sequence[Box], open_in: Sequence[str], open_out: Sequence[str],
             *, sizes: dict[str, int] | None = None, check_normalized: bool = True,
             tol: float = 1e-9, wire_sets: dict[str, FinSet] | None = None) -> Morphism:
    """Contract a network into a single morphism ``open_in -> open_out``.

    Open outputs that are also open inputs are passed straight through.
    When every box is stochastic the result is checked for unit column sums;
    a failure means the network has a causal loop.
    """
    open_in, open_out = list(open_in), list(open_out)
    if len(set(open_in)) != len(open_in) or len(set(open_out)) != len(open_out):
        raise WiringError("open wire names must be unique")
    sz = wire_sizes(boxes, sizes)
    for name in open_in + open_out:
        if name not in sz:
            raise WiringError(f"open wire {name!r} has unknown size")
    _check_producers(boxes, open_in)
    produced = set(open_in) | {w for b in boxes for w in b.outputs}
    for name in open_out:
        if name not in produced:
            raise WiringError(f"open output {name!r} has no producer")

    # pass-through wires: rename the output side and add an identity tensor
    extra = []
    out_labels = []
    for name in open_out:
        if name in open_in:
            alias = f"{name}\x00out"
            n = sz[name]
            extra.append((np.eye(n), [alias, name]))
            out_labels.append(alias)
        else:
            out_labels.append(name)
    t, free = contract_tensor(boxes, out_labels, open_in, sz, extra)
    assert not free
    sets = wire_sets or {}
    dom = WireList(tuple(sets.get(n, as_finset(sz[n])) for n in open_in))
    cod = WireList(tuple(sets.get(n, as_finset(sz[n])) for n in open_out))
    mat = np.asarray(t).reshape(cod.total_size, dom.total_size)
    stochastic = all(b.morphism.flavor == STOCHASTIC for b in boxes)
    sums = mat.sum(axis=0)
    if mat.dtype == object:
        normalized = all(s == 1 for s in sums)
    else:
        normalized = bool(np.all(np.abs(sums - 1.0) <= tol))
    if stochastic and check_normalized and not normalized:
        raise WiringError("contracted network is not normalized: the wiring has a causal loop")
    return Morphism(dom, cod, mat, STOCHASTIC if stochastic and normalized else NONNEG)


def linear_in_box(boxes: Sequence[Box], var_inputs: Sequence[str], var_outputs: Sequence[str],
                  open_in: Sequence[str], open_out: Sequence[str],
                  sizes: dict[str, int]) -> np.ndarray:
    """Coefficient matrix of a network that is linear in one unknown box.

    The unknown box reads ``var_inputs`` and writes ``var_outputs``.  Returns
    ``M`` with shape ``(|open_out| * |open_in|, |var_out| * |var_in|)`` such that
    the contracted matrix, flattened row-major, equals ``M @ vec(X)`` where
    ``vec(X)`` is the unknown's matrix flattened row-major.
    """
    var_inputs, var_outputs = list(var_inputs), list(var_outputs)
    n_out = int(np.prod([sizes[w] for w in var_outputs], dtype=np.int64)) if var_outputs else 1
    n_in = int(np.prod([sizes[w] for w in var_inputs], dtype=np.int64)) if var_inputs else 1
    nvar = n_out * n_in
    onehot = np.eye(nvar).reshape([sizes[w] for w in var_outputs] + [sizes[w] for w in var_inputs] + [nvar])
    var_label = "\x00var"
    extra = [(onehot, var_outputs + var_inputs + [var_label])]
    out_labels = []
    for name in open_out:
        if name in open_in:
            alias = f"{name}\x00out"
            extra.append((np.eye(sizes[name]), [alias, name]))
            out_labels.append(alias)
        else:
            out_labels.append(name)
    boxes = [Box(b.morphism.as_float(), b.inputs, b.outputs, b.label) for b in boxes]
    t, free = contract_tensor(boxes, out_labels + [var_label], list(open_in), sizes, extra)
    # axes: open_out..., var, open_in...  -> move var last
    k = len(open_out)
    t = np.moveaxis(np.asarray(t, dtype=float), k, -1)
    return t.reshape(-1, nvar)
