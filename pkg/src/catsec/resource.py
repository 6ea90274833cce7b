"""Combs, multi-party resources and protocols.

An m-comb is a circuit with m holes.  It is stored as the tuple of pieces
``(g_0, ..., g_m)`` together with the memory wires ``Y_k`` threaded between
them and the order ``sigma`` in which the holes are visited::

    g_0 : C               -> A[sigma[0]] ⊗ Y_1
    g_k : B[sigma[k-1]] ⊗ Y_k -> A[sigma[k]] ⊗ Y_{k+1}
    g_m : B[sigma[m-1]] ⊗ Y_m -> D

Hole indices are 0-based.  Two combs are equal when they act identically on
every way of filling the holes; in finite stochastic semantics that is
decided by comparing process tensors (see :func:`process_tensor`).

A :class:`PartiteResource` is a single kernel whose input and output wires
are ports owned by named parties and stamped with the round in which they
are used.  A :class:`Protocol` gives every party a small local network of
boxes that reads the party's source outputs and target inputs and writes
its source inputs and target outputs.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .finstoch import (STOCHASTIC, Morphism, ShapeError, UNIT, WireList, as_wirelist,
                       compose, identity, tensor)
from .network import Box, WiringError, contract, wire_sizes


# --------------------------------------------------------------------------
# combs


@dataclass(frozen=True, eq=False)
class Comb:
    slots: tuple[tuple[WireList, WireList], ...]
    sigma: tuple[int, ...]
    pieces: tuple[Morphism, ...]
    memory: tuple[WireList, ...]
    outer: tuple[WireList, WireList]

    def __post_init__(self):
        slots = tuple((as_wirelist(a), as_wirelist(b)) for a, b in self.slots)
        object.__setattr__(self, "slots", slots)
        object.__setattr__(self, "sigma", tuple(int(s) for s in self.sigma))
        object.__setattr__(self, "pieces", tuple(self.pieces))
        object.__setattr__(self, "memory", tuple(as_wirelist(y) for y in self.memory))
        object.__setattr__(self, "outer", (as_wirelist(self.outer[0]), as_wirelist(self.outer[1])))
        m = len(slots)
        if sorted(self.sigma) != list(range(m)):
            raise ValueError(f"sigma {self.sigma} is not a permutation of {m} slots")
        if len(self.pieces) != m + 1:
            raise ShapeError(f"an {m}-comb needs {m + 1} pieces, got {len(self.pieces)}")
        if len(self.memory) != m:
            raise ShapeError(f"an {m}-comb needs {m} memory wire lists, got {len(self.memory)}")
        c, d = self.outer
        for k, g in enumerate(self.pieces):
            want_dom = c if k == 0 else slots[self.sigma[k - 1]][1] + self.memory[k - 1]
            want_cod = d if k == m else slots[self.sigma[k]][0] + self.memory[k]
            if g.dom.sizes != want_dom.sizes or g.cod.sizes != want_cod.sizes:
                raise ShapeError(
                    f"piece {k} has type {g.dom!r} -> {g.cod!r}, expected {want_dom!r} -> {want_cod!r}"
                )

    @property
    def m(self) -> int:
        return len(self.slots)

    @classmethod
    def chain(cls, pieces: Sequence[Morphism], slots: Sequence[tuple], memory: Sequence,
              sigma: Sequence[int] | None = None) -> "Comb":
        """Build a comb, reading the outer types off the first and last piece."""
        sigma = tuple(range(len(slots))) if sigma is None else tuple(sigma)
        return cls(tuple(slots), sigma, tuple(pieces), tuple(memory),
                   (pieces[0].dom, pieces[-1].cod))


@dataclass(frozen=True, eq=False)
class Filler:
    """A hole filler ``mem_in ⊗ A -> mem_out ⊗ B``.

    Memory flows from one filler to the next in the order the comb visits
    its holes; the first filler's ``mem_in`` and the last one's ``mem_out``
    must be empty.
    """

    morphism: Morphism
    mem_in: WireList = UNIT
    mem_out: WireList = UNIT

    def __post_init__(self):
        object.__setattr__(self, "mem_in", as_wirelist(self.mem_in))
        object.__setattr__(self, "mem_out", as_wirelist(self.mem_out))
        if self.morphism.dom.sizes[:len(self.mem_in)] != self.mem_in.sizes:
            raise ShapeError("filler domain must start with its memory input wires")
        if self.morphism.cod.sizes[:len(self.mem_out)] != self.mem_out.sizes:
            raise ShapeError("filler codomain must start with its memory output wires")

    @property
    def hole_in(self) -> WireList:
        return self.morphism.dom[len(self.mem_in):]

    @property
    def hole_out(self) -> WireList:
        return self.morphism.cod[len(self.mem_out):]


def _as_filler(f) -> Filler:
    return f if isinstance(f, Filler) else Filler(f)


def plug(comb: Comb, fillers: Sequence) -> Morphism:
    """Fill every hole and return the resulting morphism ``C -> D``.

    ``fillers[j]`` fills slot ``j``.  Built from compose and tensor only.
    """
    if len(fillers) != comb.m:
        raise ShapeError(f"comb has {comb.m} holes, got {len(fillers)} fillers")
    fs = [_as_filler(f) for f in fillers]
    state = comb.pieces[0]
    z = UNIT
    for k, j in enumerate(comb.sigma, start=1):
        f = fs[j]
        a, b = comb.slots[j]
        if f.hole_in.sizes != a.sizes or f.hole_out.sizes != b.sizes:
            raise ShapeError(
                f"slot {j}: filler has type {f.hole_in!r} -> {f.hole_out!r}, hole expects {a!r} -> {b!r}"
            )
        if f.mem_in.sizes != z.sizes:
            raise ShapeError(f"slot {j}: filler memory input {f.mem_in!r} does not match {z!r}")
        y = comb.memory[k - 1]
        state = compose(tensor(f.morphism, identity(y)), state)
        z = f.mem_out
        state = compose(tensor(identity(z), comb.pieces[k]), state)
    if len(z):
        raise ShapeError(f"last filler leaves memory {z!r} unconsumed")
    return state


def _comb_boxes(comb: Comb, prefix: str = ""):
    """The comb's pieces as named boxes, plus its open wire names."""
    def names(tag, wl):
        return [f"{prefix}{tag}.{i}" for i in range(len(wl))]

    c_names = names("c", comb.outer[0])
    d_names = names("d", comb.outer[1])
    a_names = {j: names(f"a{j}", comb.slots[j][0]) for j in range(comb.m)}
    b_names = {j: names(f"b{j}", comb.slots[j][1]) for j in range(comb.m)}
    y_names = [names(f"y{k}", comb.memory[k]) for k in range(comb.m)]
    boxes = []
    for k, g in enumerate(comb.pieces):
        ins = c_names if k == 0 else b_names[comb.sigma[k - 1]] + y_names[k - 1]
        outs = d_names if k == comb.m else a_names[comb.sigma[k]] + y_names[k]
        boxes.append(Box(g, ins, outs, f"{prefix}g{k}"))
    return boxes, c_names, d_names, a_names, b_names


def process_tensor(comb: Comb) -> Morphism:
    """The kernel ``C ⊗ B[σ0] ⊗ ... -> A[σ0] ⊗ ... ⊗ D`` of a comb.

    Each hole is opened up: whatever the comb sends into it becomes an
    output and whatever comes back becomes an input.  Contracting this
    kernel with any fillers reproduces :func:`plug`.
    """
    boxes, c, d, a, b = _comb_boxes(comb)
    open_in = c + [w for j in comb.sigma for w in b[j]]
    open_out = [w for j in comb.sigma for w in a[j]] + d
    return contract(boxes, open_in, open_out, check_normalized=False)


def plug_via_process_tensor(comb: Comb, fillers: Sequence) -> Morphism:
    """Contract the process tensor with the fillers' kernels."""
    pt = process_tensor(comb)
    _, c, d, a, b = _comb_boxes(comb)
    open_in = c + [w for j in comb.sigma for w in b[j]]
    open_out = [w for j in comb.sigma for w in a[j]] + d
    boxes = [Box(pt, open_in, open_out, "pt")]
    fs = [_as_filler(f) for f in fillers]
    z_names: list[str] = []
    for k, j in enumerate(comb.sigma):
        f = fs[j]
        zi = z_names
        zo = [f"z{k}.{i}" for i in range(len(f.mem_out))]
        if len(zi) != len(f.mem_in):
            raise ShapeError(f"slot {j}: filler memory input does not match")
        boxes.append(Box(f.morphism, zi + a[j], zo + b[j], f"filler{j}"))
        z_names = zo
    if z_names:
        raise ShapeError("last filler leaves memory unconsumed")
    return contract(boxes, c, d, check_normalized=False)


def comb_equal(c1: Comb, c2: Comb, tol: float = 1e-9) -> bool:
    if [(a.sizes, b.sizes) for a, b in c1.slots] != [(a.sizes, b.sizes) for a, b in c2.slots]:
        raise ShapeError("combs have different slot types")
    if c1.sigma != c2.sigma:
        raise ShapeError("combs visit their slots in different orders")
    if c1.outer[0].sizes != c2.outer[0].sizes or c1.outer[1].sizes != c2.outer[1].sizes:
        raise ShapeError("combs have different outer types")
    return process_tensor(c1).max_abs_diff(process_tensor(c2)) <= tol


def nest(outer: Comb, inners: Sequence[Comb]) -> Comb:
    """Plug a comb into each hole of ``outer``, giving one flat comb.

    ``inners[j]`` goes into slot ``j`` and must have outer type equal to that
    slot.  The new comb's slots are the inner slots listed by outer slot
    index; its memory is the pending inner memory followed by outer memory.
    """
    if len(inners) != outer.m:
        raise ShapeError(f"outer comb has {outer.m} holes, got {len(inners)} inner combs")
    for j, inner in enumerate(inners):
        a, b = outer.slots[j]
        if inner.outer[0].sizes != a.sizes or inner.outer[1].sizes != b.sizes:
            raise ShapeError(f"inner comb {j} has outer type {inner.outer}, slot expects {(a, b)}")

    offsets, slots, n = [], [], 0
    for inner in inners:
        offsets.append(n)
        slots.extend(inner.slots)
        n += inner.m

    pieces: list[Morphism] = []
    memory: list[WireList] = []
    sigma: list[int] = []
    current = outer.pieces[0]
    for k, j in enumerate(outer.sigma):
        inner = inners[j]
        y = outer.memory[k]
        current = compose(tensor(inner.pieces[0], identity(y)), current)
        for t, s in enumerate(inner.sigma):
            pieces.append(current)
            sigma.append(offsets[j] + s)
            memory.append(inner.memory[t] + y)
            current = tensor(inner.pieces[t + 1], identity(y))
        current = compose(outer.pieces[k + 1], current)
    pieces.append(current)
    return Comb(tuple(slots), tuple(sigma), tuple(pieces), tuple(memory), outer.outer)


def random_comb(rng: np.random.Generator, m: int, max_size: int = 3, max_memory: int = 3,
                shuffle: bool = True) -> Comb:
    """A seeded-random comb with all wire sizes in ``1..max_size``."""
    def wl():
        return WireList(tuple(int(rng.integers(1, max_size + 1)) for _ in range(int(rng.integers(1, 3)))))

    from .finstoch import random_stochastic

    slots = [(wl(), wl()) for _ in range(m)]
    sigma = list(rng.permutation(m)) if shuffle else list(range(m))
    memory = [WireList((int(rng.integers(1, max_memory + 1)),)) for _ in range(m)]
    c, d = wl(), wl()
    pieces = []
    for k in range(m + 1):
        dom = c if k == 0 else slots[sigma[k - 1]][1] + memory[k - 1]
        cod = d if k == m else slots[sigma[k]][0] + memory[k]
        pieces.append(random_stochastic(dom, cod, rng))
    return Comb(tuple(slots), tuple(sigma), tuple(pieces), tuple(memory), (c, d))


# --------------------------------------------------------------------------
# causal process tensors


def comb_constraints(out_wires: Sequence[str], in_wires: Sequence[str], sizes: Mapping[str, int],
                     stages: Sequence[tuple[str, Sequence[str]]]):
    """Linear equalities making a flattened kernel a causal comb.

    The unknown kernel maps ``in_wires`` to ``out_wires`` and is flattened
    row-major (rows = outputs).  ``stages`` lists ``("in", wires)`` and
    ``("out", wires)`` groups in temporal order.  Besides column
    normalization, the marginal of the outputs up to each stage must not
    depend on inputs that arrive later.

    Returns ``(A, b)`` with ``A @ vec(X) == b``.
    """
    out_wires, in_wires = list(out_wires), list(in_wires)
    out_sizes = [sizes[w] for w in out_wires]
    in_sizes = [sizes[w] for w in in_wires]
    n_out = int(np.prod(out_sizes, dtype=np.int64)) if out_sizes else 1
    n_in = int(np.prod(in_sizes, dtype=np.int64)) if in_sizes else 1
    seen = [w for _, ws in stages for w in ws]
    if sorted(seen) != sorted(out_wires + in_wires) or len(set(seen)) != len(seen):
        raise ValueError("stages must mention every wire of the kernel exactly once")

    idx = np.arange(n_out * n_in).reshape(out_sizes + in_sizes)
    rows: list[np.ndarray] = []
    rhs: list[float] = []

    # normalization: sum over all outputs is 1 for each input
    norm = idx.reshape(n_out, n_in)
    for col in range(n_in):
        r = np.zeros(n_out * n_in)
        r[norm[:, col]] = 1.0
        rows.append(r)
        rhs.append(1.0)

    for k, (kind, _) in enumerate(stages):
        if kind != "out":
            continue
        later_in = [w for kind2, ws in stages[k + 1:] if kind2 == "in" for w in ws]
        if not later_in:
            continue
        later_out = [w for kind2, ws in stages[k + 1:] if kind2 == "out" for w in ws]
        # axes of idx: out wires then in wires
        axis = {w: i for i, w in enumerate(out_wires)}
        axis.update({w: len(out_wires) + i for i, w in enumerate(in_wires)})
        sum_axes = [axis[w] for w in later_out]
        late_axes = [axis[w] for w in later_in]
        keep_axes = [i for i in range(idx.ndim) if i not in sum_axes and i not in late_axes]
        t = np.transpose(idx, keep_axes + late_axes + sum_axes)
        keep_n = int(np.prod([idx.shape[i] for i in keep_axes], dtype=np.int64))
        late_n = int(np.prod([idx.shape[i] for i in late_axes], dtype=np.int64))
        t = t.reshape(keep_n, late_n, -1)
        for a in range(keep_n):
            ref = t[a, 0]
            for l in range(1, late_n):
                r = np.zeros(n_out * n_in)
                r[t[a, l]] += 1.0
                r[ref] -= 1.0
                rows.append(r)
                rhs.append(0.0)
    return np.array(rows).reshape(len(rows), n_out * n_in), np.array(rhs)


def is_causal_comb(kernel: Morphism, out_wires, in_wires, stages, tol: float = 1e-9) -> bool:
    sizes = dict(zip(in_wires, kernel.dom.sizes))
    sizes.update(zip(out_wires, kernel.cod.sizes))
    a, b = comb_constraints(out_wires, in_wires, sizes, stages)
    x = kernel.as_float().matrix.reshape(-1)
    return bool(np.all(np.abs(a @ x - b) <= tol))


# --------------------------------------------------------------------------
# multi-party resources

IN, OUT = "in", "out"


@dataclass(frozen=True)
class Port:
    name: str
    party: str
    dir: str
    size: int
    round: int = 1

    def __post_init__(self):
        if self.dir not in (IN, OUT):
            raise ValueError(f"port direction must be 'in' or 'out', got {self.dir!r}")
        if int(self.size) < 1:
            raise ValueError(f"port {self.name!r} must have positive size")
        if int(self.round) < 1:
            raise ValueError(f"port {self.name!r} has round {self.round}; rounds start at 1")
        object.__setattr__(self, "size", int(self.size))
        object.__setattr__(self, "round", int(self.round))


@dataclass(frozen=True, eq=False)
class PartiteResource:
    """A kernel from all input ports to all output ports, in port order."""

    ports: tuple[Port, ...]
    kernel: Morphism
    parties: tuple[str, ...] = ()

    def __post_init__(self):
        ports = tuple(self.ports)
        object.__setattr__(self, "ports", ports)
        names = [p.name for p in ports]
        if len(set(names)) != len(names):
            raise ValueError(f"port names must be unique: {names}")
        parties = tuple(self.parties) or tuple(dict.fromkeys(p.party for p in ports))
        missing = {p.party for p in ports} - set(parties)
        if missing:
            raise ValueError(f"ports belong to undeclared parties {sorted(missing)}")
        object.__setattr__(self, "parties", parties)
        ins = tuple(p.size for p in ports if p.dir == IN)
        outs = tuple(p.size for p in ports if p.dir == OUT)
        if self.kernel.dom.sizes != ins or self.kernel.cod.sizes != outs:
            raise ShapeError(
                f"kernel {self.kernel!r} does not match ports (inputs {ins}, outputs {outs})"
            )
        if self.kernel.flavor != STOCHASTIC:
            raise ValueError("resource kernels must be stochastic")

    @property
    def in_ports(self) -> tuple[Port, ...]:
        return tuple(p for p in self.ports if p.dir == IN)

    @property
    def out_ports(self) -> tuple[Port, ...]:
        return tuple(p for p in self.ports if p.dir == OUT)

    def port(self, name: str) -> Port:
        for p in self.ports:
            if p.name == name:
                return p
        raise KeyError(name)

    def ports_of(self, party: str) -> tuple[Port, ...]:
        return tuple(p for p in self.ports if p.party == party)

    def as_box(self, label: str = "resource") -> Box:
        return Box(self.kernel, [p.name for p in self.in_ports], [p.name for p in self.out_ports], label)

    def sizes(self) -> dict[str, int]:
        return {p.name: p.size for p in self.ports}

    def rounds(self) -> list[int]:
        return sorted({p.round for p in self.ports})

    def is_causal(self, tol: float = 1e-9) -> bool:
        """Outputs stamped ``r`` do not depend on inputs stamped after ``r``."""
        stages = []
        for r in self.rounds():
            stages.append((IN, [p.name for p in self.in_ports if p.round == r]))
            stages.append((OUT, [p.name for p in self.out_ports if p.round == r]))
        return is_causal_comb(self.kernel, [p.name for p in self.out_ports],
                              [p.name for p in self.in_ports], stages, tol)

    def relabel(self, mapping: Mapping[str, str]) -> "PartiteResource":
        ports = tuple(Port(mapping.get(p.name, p.name), p.party, p.dir, p.size, p.round) for p in self.ports)
        return PartiteResource(ports, self.kernel, self.parties)

    def to_json(self) -> dict:
        return {
            "parties": list(self.parties),
            "ports": [{"name": p.name, "party": p.party, "dir": p.dir, "round": p.round, "size": p.size}
                      for p in self.ports],
            "kernel": self.kernel.as_float().matrix.tolist(),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PartiteResource":
        ports = tuple(Port(d["name"], d["party"], d["dir"], d["size"], d.get("round", 1))
                      for d in data["ports"])
        ins = [p.size for p in ports if p.dir == IN]
        outs = [p.size for p in ports if p.dir == OUT]
        kernel = Morphism(WireList(tuple(ins)), WireList(tuple(outs)), np.array(data["kernel"], dtype=float))
        return cls(ports, kernel, tuple(data.get("parties", ())))


def unit_resource(parties: Sequence[str] = ()) -> PartiteResource:
    return PartiteResource((), identity(UNIT), tuple(parties))


def resource_tensor(r: PartiteResource, s: PartiteResource) -> PartiteResource:
    """Side-by-side resources; port names must not clash."""
    clash = {p.name for p in r.ports} & {p.name for p in s.ports}
    if clash:
        raise ValueError(f"port names clash: {sorted(clash)}")
    parties = tuple(dict.fromkeys(r.parties + s.parties))
    # kernel inputs are ordered r.ins then s.ins; reorder the port list to match
    ports = r.in_ports + s.in_ports + r.out_ports + s.out_ports
    return PartiteResource(ports, tensor(r.kernel, s.kernel), parties)


def resource_from_boxes(ports: Sequence[Port], boxes: Sequence[Box],
                        parties: Sequence[str] = ()) -> PartiteResource:
    """Contract a network into a resource with the given ports."""
    ports = tuple(ports)
    kernel = contract(boxes, [p.name for p in ports if p.dir == IN], [p.name for p in ports if p.dir == OUT],
                      sizes={p.name: p.size for p in ports})
    return PartiteResource(ports, kernel, tuple(parties))


# --------------------------------------------------------------------------
# protocols


@dataclass(frozen=True, eq=False)
class Protocol:
    """Local behaviour of each party turning ``source`` into ``target``.

    ``pieces[party]`` is a tuple of boxes.  They may read the party's source
    output ports, its target input ports and private wires, and must write
    every source input port and target output port the party owns.
    """

    source: PartiteResource
    target: PartiteResource
    pieces: Mapping[str, tuple[Box, ...]] = field(default_factory=dict)
    free: tuple[str, ...] = ()
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "pieces", {k: tuple(v) for k, v in self.pieces.items()})
        object.__setattr__(self, "free", tuple(self.free))
        validate_protocol(self)

    @property
    def parties(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(self.source.parties + self.target.parties + tuple(self.pieces)))

    def boxes(self, parties: Iterable[str] | None = None) -> list[Box]:
        chosen = self.parties if parties is None else tuple(parties)
        return [b for party in chosen for b in self.pieces.get(party, ())]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "free": list(self.free),
            "pieces": {
                party: [{"label": b.label, "inputs": list(b.inputs), "outputs": list(b.outputs),
                         "dom": list(b.morphism.dom.sizes), "cod": list(b.morphism.cod.sizes),
                         "matrix": b.morphism.as_float().matrix.tolist()} for b in boxes]
                for party, boxes in self.pieces.items()
            },
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "Protocol":
        pieces = {
            party: tuple(Box(Morphism(WireList(tuple(b["dom"])), WireList(tuple(b["cod"])),
                                      np.array(b["matrix"], dtype=float)),
                             b["inputs"], b["outputs"], b.get("label", ""))
                         for b in boxes)
            for party, boxes in data["pieces"].items()
        }
        return cls(PartiteResource.from_json(data["source"]), PartiteResource.from_json(data["target"]),
                   pieces, tuple(data.get("free", ())), data.get("name", ""))


def validate_protocol(p: Protocol) -> None:
    src, tgt = p.source, p.target
    clash = {q.name for q in src.ports} & {q.name for q in tgt.ports}
    if clash:
        raise WiringError(f"source and target share port names {sorted(clash)}")
    owner = {q.name: q.party for q in src.ports + tgt.ports}
    readable = {q.name for q in src.out_ports} | {q.name for q in tgt.in_ports}
    writable = {q.name for q in src.in_ports} | {q.name for q in tgt.out_ports}
    private: dict[str, str] = {}
    written: dict[str, str] = {}
    for party, boxes in p.pieces.items():
        for b in boxes:
            for w in b.inputs + b.outputs:
                if w in owner:
                    if owner[w] != party:
                        raise WiringError(f"party {party!r} touches port {w!r} owned by {owner[w]!r}")
                else:
                    if private.setdefault(w, party) != party:
                        raise WiringError(f"private wire {w!r} is shared by {private[w]!r} and {party!r}")
            for w in b.inputs:
                if w in owner and w not in readable:
                    raise WiringError(f"party {party!r} reads {w!r}, which it must write")
            for w in b.outputs:
                if w in owner and w not in writable:
                    raise WiringError(f"party {party!r} writes {w!r}, which it must read")
                if w in written:
                    raise WiringError(f"wire {w!r} is written twice")
                written[w] = party
    for w in writable:
        if w not in written:
            raise WiringError(f"port {w!r} ({owner[w]}) is never written by the protocol")
    sizes = src.sizes()
    sizes.update(tgt.sizes())
    wire_sizes(p.boxes(), sizes)


def apply_protocol(p: Protocol) -> PartiteResource:
    """Run the protocol honestly on its source; the result has the target's ports."""
    boxes = [p.source.as_box("source")] + p.boxes()
    kernel = contract(boxes, [q.name for q in p.target.in_ports], [q.name for q in p.target.out_ports],
                      sizes=p.target.sizes())
    return PartiteResource(p.target.ports, kernel, p.target.parties)


def identity_protocol(r: PartiteResource, rename: str | Mapping[str, str] = "'") -> Protocol:
    """Each party forwards its ports unchanged; the target is a renamed copy of ``r``.

    ``rename`` is a suffix or an explicit old-to-new name mapping.
    """
    mapping = ({q.name: q.name + rename for q in r.ports} if isinstance(rename, str) else dict(rename))
    target = r.relabel(mapping)
    pieces: dict[str, list[Box]] = {party: [] for party in r.parties}
    for q in r.ports:
        if q.dir == IN:
            pieces[q.party].append(Box(identity(q.size), [mapping[q.name]], [q.name], f"fwd {q.name}"))
        else:
            pieces[q.party].append(Box(identity(q.size), [q.name], [mapping[q.name]], f"fwd {q.name}"))
    return Protocol(r, target, {k: tuple(v) for k, v in pieces.items()}, name="identity")


def with_free(p: Protocol, free: PartiteResource,
              uses: Mapping[str, Sequence[Box]] | None = None) -> Protocol:
    """Append a free resource to the protocol's source.

    ``uses`` optionally adds boxes for parties that consume the free
    resource.  The returned protocol records the free ports.
    """
    missing = set(free.parties) - set(p.parties)
    if missing:
        raise WiringError(f"free resource mentions parties {sorted(missing)} absent from the protocol")
    pieces = {k: tuple(v) for k, v in p.pieces.items()}
    for party, boxes in (uses or {}).items():
        pieces[party] = pieces.get(party, ()) + tuple(boxes)
    source = resource_tensor(p.source, free)
    return Protocol(source, p.target, pieces, p.free + tuple(q.name for q in free.ports), p.name)


def load_protocol(path) -> Protocol:
    with open(path, encoding="utf-8") as fh:
        return Protocol.from_json(json.load(fh))


def enumerate_inputs(sizes: Sequence[int]):
    return itertools.product(*[range(s) for s in sizes])
