"""Feasibility checks behind the bipartite and tripartite impossibility results.

Bipartite (splittability).  Take two copies ``r1``, ``r2`` of a two-party
functionality.  The environment talks to ``r1`` as Alice and to ``r2`` as
Bob; a causal machine ``g`` plays Bob towards ``r1`` and Alice towards
``r2``.  A functionality that can be realised from a plain channel must be
reproduced exactly by some such ``g``.  We report the smallest channel TV
distance between ``r`` and this composite.

``g`` is a causal comb.  Within round ``t`` it serves ``r1`` (send Bob's
round-``t`` inputs, read Bob's round-``t`` outputs) and ``r2`` (send Alice's
inputs, read Alice's outputs) in one of two orders; every combination of
per-round orders is tried.

Tripartite.  Four outer positions: Alice-type 1, Bob-type 2 and 3,
Charlie-type 4.  Each party ``X`` gets a simulator ``s_X`` that sits on
``X``'s port of ``r`` and serves two adjacent positions.  The three
composites must coincide; one LP minimises their largest pairwise distance.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .finstoch import STOCHASTIC, Morphism, WireList, channel_tv, deterministic, tensor, uniform
from .lpsolve import (OPTIMAL, Block, fit_tv, min_max_pairwise_tv,
                      views_agree_feasible)
from .network import Box, contract, linear_in_box
from .resource import IN, OUT, PartiteResource, Port, comb_constraints

COMB_LP = "comb-lp"
VERTEX_LP = "vertex-lp"
ALTERNATING_LP = "alternating-lp"
ACAUSAL = "acausal"
AUTO = "auto"
METHODS = (AUTO, COMB_LP, VERTEX_LP, ALTERNATING_LP, ACAUSAL)


class NogoError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Functionality:
    name: str
    resource: PartiteResource
    roles: tuple[str, ...]


@dataclass(frozen=True)
class SearchCfg:
    method: str = AUTO
    restarts: int = 4
    seed: int = 0
    vertex_limit: int = 4096
    max_rounds: int = 30

    def __post_init__(self):
        if self.method not in METHODS:
            raise NogoError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.restarts < 1:
            raise NogoError("restarts must be positive")


@dataclass
class ResidualReport:
    instance: str
    method: str
    min_residual: float
    witness: object = None
    restarts: int = 0
    seed: int = 0
    exact_feasible: bool | None = None
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        v = self.min_residual
        return {
            "instance": self.instance,
            "method": self.method,
            "min_residual": float(f"{v:.12g}") if abs(v) > 1e-12 else 0.0,
            "witness_present": self.witness is not None,
            "exact_feasible": self.exact_feasible,
            "restarts": self.restarts,
            "seed": self.seed,
        }


# --------------------------------------------------------------------------
# instance library

A, B, C = "A", "B", "C"


def _fn(ins, outs, fn, parties, name, ports) -> Functionality:
    kernel = deterministic(ins, outs, fn)
    return Functionality(name, PartiteResource(ports, kernel, parties), parties)


def build_instance(kind: str) -> Functionality:
    """Library of small functionalities used by the no-go checks."""
    if kind == "bit_commitment":
        # m: 0 = nothing revealed, 1 + b once opened
        ports = (Port("b", A, IN, 2, 1), Port("o", A, IN, 2, 2),
                 Port("receipt", B, OUT, 1, 1), Port("m", B, OUT, 3, 2))
        return _fn([2, 2], [1, 3], lambda x: (0, 1 + x[0] if x[1] == 1 else 0), (A, B), kind, ports)
    if kind == "oblivious_transfer":
        ports = (Port("x0", A, IN, 2), Port("x1", A, IN, 2), Port("c", B, IN, 2), Port("y", B, OUT, 2))
        return _fn([2, 2, 2], [2], lambda x: x[x[2]], (A, B), kind, ports)
    if kind == "perfect_channel":
        ports = (Port("x", A, IN, 2), Port("y", B, OUT, 2))
        return _fn([2], [2], lambda x: x, (A, B), kind, ports)
    if kind == "product_state":
        ports = (Port("x", A, OUT, 2), Port("y", B, OUT, 2))
        return Functionality(kind, PartiteResource(ports, tensor(uniform(2), uniform(2)), (A, B)), (A, B))
    if kind == "broadcast":
        ports = (Port("b", B, IN, 2), Port("a", A, OUT, 2), Port("c", C, OUT, 2))
        return _fn([2], [2, 2], lambda x: (x[0], x[0]), (A, B, C), kind, ports)
    if kind == "local_bits":
        ports = (Port("a", A, OUT, 2), Port("b", B, OUT, 2), Port("c", C, OUT, 2))
        k = tensor(tensor(uniform(2), uniform(2)), uniform(2))
        return Functionality(kind, PartiteResource(ports, k, (A, B, C)), (A, B, C))
    raise NogoError(f"unknown instance {kind!r}")


BIPARTITE = ("bit_commitment", "oblivious_transfer", "perfect_channel", "product_state")
TRIPARTITE = ("broadcast", "local_bits")


# --------------------------------------------------------------------------
# bipartite


@dataclass(frozen=True, eq=False)
class SplitSetup:
    r: PartiteResource
    sizes: dict
    open_in: list
    open_out: list
    boxes: list
    var_in: list
    var_out: list
    rounds: list
    side1: dict  # round -> (g writes to r1's Bob ins, g reads r1's Bob outs)
    side2: dict  # round -> (g writes to r2's Alice ins, g reads r2's Alice outs)

    def stages(self, orders: Sequence[int]):
        out = []
        for t, first in zip(self.rounds, orders):
            sides = [self.side1[t], self.side2[t]]
            if first:
                sides.reverse()
            for writes, reads in sides:
                if writes:
                    out.append((OUT, writes))
                if reads:
                    out.append((IN, reads))
        return out

    def all_orders(self):
        return list(itertools.product((0, 1), repeat=len(self.rounds)))


def split_setup(f: Functionality) -> SplitSetup:
    r = f.resource
    if len(f.roles) != 2:
        raise NogoError(f"{f.name} is not bipartite")
    alice, bob = f.roles

    def n1(q):
        return f"1:{q.name}"

    def n2(q):
        return f"2:{q.name}"

    r1 = Box(r.kernel, [n1(q) for q in r.in_ports], [n1(q) for q in r.out_ports], "r1")
    r2 = Box(r.kernel, [n2(q) for q in r.in_ports], [n2(q) for q in r.out_ports], "r2")
    sizes = {}
    for q in r.ports:
        sizes[n1(q)] = q.size
        sizes[n2(q)] = q.size
    open_in = [n1(q) if q.party == alice else n2(q) for q in r.in_ports]
    open_out = [n1(q) if q.party == alice else n2(q) for q in r.out_ports]
    var_in = [n1(q) for q in r.out_ports if q.party == bob] + [n2(q) for q in r.out_ports if q.party == alice]
    var_out = [n1(q) for q in r.in_ports if q.party == bob] + [n2(q) for q in r.in_ports if q.party == alice]
    rounds = r.rounds() or [1]
    side1 = {t: ([n1(q) for q in r.in_ports if q.party == bob and q.round == t],
                 [n1(q) for q in r.out_ports if q.party == bob and q.round == t]) for t in rounds}
    side2 = {t: ([n2(q) for q in r.in_ports if q.party == alice and q.round == t],
                 [n2(q) for q in r.out_ports if q.party == alice and q.round == t]) for t in rounds}
    return SplitSetup(r, sizes, open_in, open_out, [r1, r2], var_in, var_out, rounds, side1, side2)


def _g_shape(s: SplitSetup):
    dom = WireList(tuple(s.sizes[w] for w in s.var_in))
    cod = WireList(tuple(s.sizes[w] for w in s.var_out))
    return dom, cod


def split_composite(s: SplitSetup, g: Morphism, check: bool = False) -> Morphism:
    """The right-hand side for a given ``g``."""
    boxes = s.boxes + [Box(g, s.var_in, s.var_out, "g")]
    return contract(boxes, s.open_in, s.open_out, sizes=s.sizes, check_normalized=check)


def _split_map(s: SplitSetup):
    return linear_in_box(s.boxes, s.var_in, s.var_out, s.open_in, s.open_out, s.sizes)


def _first_stage(s: SplitSetup, stages):
    """Wires of ``g``'s first output group and the inputs it may see."""
    seen: list[str] = []
    for kind, ws in stages:
        if kind == OUT:
            return list(ws), list(seen)
        seen.extend(ws)
    return [], seen


def _marginal_rows(s: SplitSetup, o1: Sequence[str], i1: Sequence[str]):
    """Matrix ``K`` with ``K @ vec(X)`` = ``P(o1 | all inputs)`` flattened as (o1, inputs).

    Also returns, for each row, the (o1 value, i1 value) it belongs to.
    """
    out_sizes = [s.sizes[w] for w in s.var_out]
    in_sizes = [s.sizes[w] for w in s.var_in]
    n_out = int(np.prod(out_sizes)) if out_sizes else 1
    n_in = int(np.prod(in_sizes)) if in_sizes else 1
    idx = np.arange(n_out * n_in).reshape(out_sizes + in_sizes)
    o1_axes = [s.var_out.index(w) for w in o1]
    rest_axes = [i for i in range(len(s.var_out)) if i not in o1_axes]
    in_axes = list(range(len(s.var_out), len(s.var_out) + len(s.var_in)))
    t = np.transpose(idx, o1_axes + in_axes + rest_axes)
    n_o1 = int(np.prod([s.sizes[w] for w in o1])) if o1 else 1
    t = t.reshape(n_o1, n_in, -1)
    K = np.zeros((n_o1 * n_in, n_out * n_in))
    for a in range(n_o1):
        for i in range(n_in):
            K[a * n_in + i, t[a, i]] = 1.0
    # which i1 value each full input index carries
    i1_axes = [s.var_in.index(w) for w in i1]
    grid = np.indices(in_sizes).reshape(len(in_sizes), -1) if in_sizes else np.zeros((0, 1), int)
    i1_sizes = [s.sizes[w] for w in i1]
    i1_of = (np.ravel_multi_index(tuple(grid[a] for a in i1_axes), i1_sizes)
             if i1 else np.zeros(n_in, dtype=int))
    return K, n_o1, n_in, np.asarray(i1_of)


def _fit(s, M, constraints):
    dom, cod = _g_shape(s)
    return fit_tv(M, s.r.kernel, (dom, cod), constraints=constraints, normalized=False)


def _comb_lp(s: SplitSetup, M, stages):
    A, b = comb_constraints(s.var_out, s.var_in, s.sizes, stages)
    return _fit(s, M, (A, b))


def _vertex_lp(s: SplitSetup, M, stages, limit: int):
    """Fix the first output stage to each deterministic map and solve the rest."""
    o1, i1 = _first_stage(s, stages)
    A, b = comb_constraints(s.var_out, s.var_in, s.sizes, stages)
    K, n_o1, n_in, i1_of = _marginal_rows(s, o1, i1)
    n_i1 = int(np.prod([s.sizes[w] for w in i1])) if i1 else 1
    if n_o1 ** n_i1 > limit:
        return None
    best = None
    for f in itertools.product(range(n_o1), repeat=n_i1):
        target = np.zeros(n_o1 * n_in)
        for i in range(n_in):
            target[f[i1_of[i]] * n_in + i] = 1.0
        fit = _fit(s, M, (np.vstack([A, K]), np.concatenate([b, target])))
        if best is None or fit.residual < best.residual - 1e-12:
            best = fit
    return best


def _alternating(s: SplitSetup, M, stages, rng: np.random.Generator, max_rounds: int):
    """Alternate between the first output stage and the remainder of ``g``."""
    o1, i1 = _first_stage(s, stages)
    A, b = comb_constraints(s.var_out, s.var_in, s.sizes, stages)
    K, n_o1, n_in, i1_of = _marginal_rows(s, o1, i1)
    n_i1 = int(np.prod([s.sizes[w] for w in i1])) if i1 else 1
    P1 = rng.dirichlet(np.ones(n_o1), size=n_i1).T  # (n_o1, n_i1)
    best = None
    out_sizes = [s.sizes[w] for w in s.var_out]
    n_out = int(np.prod(out_sizes)) if out_sizes else 1
    o1_axes = [s.var_out.index(w) for w in o1]
    grid_out = np.indices(out_sizes).reshape(len(out_sizes), -1) if out_sizes else np.zeros((0, 1), int)
    o1_of = (np.ravel_multi_index(tuple(grid_out[a] for a in o1_axes), [s.sizes[w] for w in o1])
             if o1 else np.zeros(n_out, dtype=int))
    for _ in range(max_rounds):
        target = np.zeros(n_o1 * n_in)
        for a in range(n_o1):
            for i in range(n_in):
                target[a * n_in + i] = P1[a, i1_of[i]]
        fit = _fit(s, M, (np.vstack([A, K]), np.concatenate([b, target])))
        improved = best is None or fit.residual < best.residual - 1e-10
        if best is None or fit.residual < best.residual:
            best = fit
        if not improved:
            break
        # conditional of the remainder given the first stage
        X = fit.simulator.matrix  # (n_out, n_in)
        marg = np.zeros((n_o1, n_in))
        for row in range(n_out):
            marg[o1_of[row]] += X[row]
        P2 = np.zeros_like(X)
        n_rest = n_out // max(n_o1, 1)
        for row in range(n_out):
            m = marg[o1_of[row]]
            P2[row] = np.where(m > 1e-12, X[row] / np.where(m > 1e-12, m, 1.0), 1.0 / n_rest)
        # X(P1) = P1[o1 | i1] * P2  is linear in P1
        L = np.zeros((n_out * n_in, n_o1 * n_i1))
        for row in range(n_out):
            for i in range(n_in):
                L[row * n_in + i, o1_of[row] * n_i1 + i1_of[i]] = P2[row, i]
        dom1 = WireList(tuple(s.sizes[w] for w in i1))
        cod1 = WireList(tuple(s.sizes[w] for w in o1))
        fit1 = fit_tv(M @ L, s.r.kernel, (dom1, cod1), normalized=False)
        P1 = fit1.simulator.matrix
    return best


def _acausal(s: SplitSetup, M):
    dom, cod = _g_shape(s)
    return fit_tv(M, s.r.kernel, (dom, cod), normalized=False)


def splittability_residual(f: Functionality, cfg: SearchCfg = SearchCfg()) -> ResidualReport:
    """Smallest TV distance between ``r`` and ``r ⊗ r`` contracted with a causal ``g``."""
    s = split_setup(f)
    M = _split_map(s)
    method = cfg.method
    if method == ACAUSAL:
        fit = _acausal(s, M)
        return ResidualReport(f.name, ACAUSAL, fit.residual, fit.simulator, 0, cfg.seed,
                              details={"orders": None})
    best, best_orders, used = None, None, method
    for orders in s.all_orders():
        stages = s.stages(orders)
        fit, how = None, method
        if method in (AUTO, VERTEX_LP):
            fit = _vertex_lp(s, M, stages, cfg.vertex_limit)
            how = VERTEX_LP
            if fit is None and method == VERTEX_LP:
                raise NogoError("first stage is too large to enumerate")
        if fit is None and method in (AUTO, ALTERNATING_LP):
            how = ALTERNATING_LP
            for k in range(cfg.restarts):
                cand = _alternating(s, M, stages, np.random.default_rng([cfg.seed, k]), cfg.max_rounds)
                if fit is None or cand.residual < fit.residual:
                    fit = cand
        if method == COMB_LP:
            fit, how = _comb_lp(s, M, stages), COMB_LP
        used = how if used == AUTO else used
        if best is None or fit.residual < best.residual - 1e-12:
            best, best_orders = fit, orders
    restarts = cfg.restarts if used == ALTERNATING_LP else 0
    return ResidualReport(f.name, used, best.residual, best.simulator, restarts, cfg.seed,
                          details={"orders": list(best_orders)})


def check_split_witness(f: Functionality, g: Morphism) -> float:
    s = split_setup(f)
    return channel_tv(split_composite(s, g).as_float().matrix, f.resource.kernel.as_float().matrix)


# --------------------------------------------------------------------------
# tripartite

POSITIONS = {  # party -> the two outer positions its simulator serves
    "A": (1, 2),
    "B": (2, 3),
    "C": (3, 4),
}


@dataclass(frozen=True, eq=False)
class TriSetup:
    r: PartiteResource
    roles: tuple[str, str, str]
    sizes: dict
    open_in: list
    open_out: list
    shape: tuple[int, int]
    exprs: dict  # role -> (boxes, var_in, var_out, stages)


def _position_of(role_idx: int, split_idx: int) -> dict:
    """Where each party's port goes when ``split_idx``'s party is simulated."""
    # fixed positions when not simulated: Alice 1, Bob 2 or 3, Charlie 4
    if split_idx == 0:
        return {1: 3, 2: 4}.get(role_idx)
    if split_idx == 1:
        return {0: 1, 2: 4}.get(role_idx)
    return {0: 1, 1: 2}.get(role_idx)


def tri_setup(f: Functionality) -> TriSetup:
    r = f.resource
    if len(f.roles) != 3:
        raise NogoError(f"{f.name} is not tripartite")
    roles = tuple(f.roles)
    kind = {roles[0]: 0, roles[1]: 1, roles[2]: 2}
    # positions 1..4 carry copies of the Alice, Bob, Bob, Charlie ports
    pos_party = {1: 0, 2: 1, 3: 1, 4: 2}

    def name(pos, q):
        return f"{pos}:{q.name}"

    sizes = {}
    open_in, open_out = [], []
    for pos in (1, 2, 3, 4):
        for q in r.in_ports:
            if kind[q.party] == pos_party[pos]:
                open_in.append(name(pos, q))
                sizes[name(pos, q)] = q.size
        for q in r.out_ports:
            if kind[q.party] == pos_party[pos]:
                open_out.append(name(pos, q))
                sizes[name(pos, q)] = q.size
    exprs = {}
    for split_idx, role in enumerate(roles):
        def wire(q, split_idx=split_idx):
            i = kind[q.party]
            if i == split_idx:
                return f"r:{q.name}"
            return name(_position_of(i, split_idx), q)

        box = Box(r.kernel, [wire(q) for q in r.in_ports], [wire(q) for q in r.out_ports], "r")
        mine = [q for q in r.ports if kind[q.party] == split_idx]
        for q in mine:
            sizes[f"r:{q.name}"] = q.size
        p1, p2 = (1, 2) if split_idx == 0 else (2, 3) if split_idx == 1 else (3, 4)
        outer_in = [w for w in open_in if w.split(":", 1)[0] in (str(p1), str(p2))]
        outer_out = [w for w in open_out if w.split(":", 1)[0] in (str(p1), str(p2))]
        r_in = [f"r:{q.name}" for q in r.in_ports if kind[q.party] == split_idx]
        r_out = [f"r:{q.name}" for q in r.out_ports if kind[q.party] == split_idx]
        var_in = outer_in + r_out
        var_out = r_in + outer_out
        stages = []
        for kind_, ws in ((IN, outer_in), (OUT, r_in), (IN, r_out), (OUT, outer_out)):
            if ws:
                stages.append((kind_, ws))
        exprs[role] = ([box], var_in, var_out, stages)
    rows = int(np.prod([sizes[w] for w in open_out])) if open_out else 1
    cols = int(np.prod([sizes[w] for w in open_in])) if open_in else 1
    return TriSetup(r, roles, sizes, open_in, open_out, (rows, cols), exprs)


def tri_expression(t: TriSetup, role: str, sim: Morphism) -> Morphism:
    boxes, var_in, var_out, _ = t.exprs[role]
    return contract(boxes + [Box(sim, var_in, var_out, f"s_{role}")], t.open_in, t.open_out, sizes=t.sizes,
                    check_normalized=False)


def equal_middle_columns(t: TriSetup) -> list[int]:
    """View columns where every position-2 input equals its position-3 twin."""
    in_sizes = [t.sizes[w] for w in t.open_in]
    cols = []
    for j, vals in enumerate(itertools.product(*[range(n) for n in in_sizes])):
        v = dict(zip(t.open_in, vals))
        if all(v[w] == v["3:" + w.split(":", 1)[1]] for w in t.open_in if w.startswith("2:")):
            cols.append(j)
    return cols


def _pairwise(views: Sequence[np.ndarray], cols) -> float:
    best = 0.0
    for x, y in itertools.combinations(range(len(views)), 2):
        a, b = views[x][:, cols], views[y][:, cols]
        best = max(best, channel_tv(a, b))
    return best


def tripartite_residual(f: Functionality, equal_middle: bool = False) -> ResidualReport:
    """Jointly fit the three simulators; report the largest pairwise TV distance."""
    t = tri_setup(f)
    cols = equal_middle_columns(t) if equal_middle else None
    blocks, shapes = [], []
    for role in t.roles:
        boxes, var_in, var_out, stages = t.exprs[role]
        M = linear_in_box(boxes, var_in, var_out, t.open_in, t.open_out, t.sizes)
        A, b = comb_constraints(var_out, var_in, t.sizes, stages)
        blocks.append(Block(M, A, b))
        shapes.append((WireList(tuple(t.sizes[w] for w in var_in)), WireList(tuple(t.sizes[w] for w in var_out))))
    pairs = [(0, 1), (1, 2), (0, 2)]
    value, xs, status = min_max_pairwise_tv(blocks, pairs, t.shape, cols)
    if xs is None:
        raise NogoError(f"tripartite program is {status}")
    sims = []
    for x, (dom, cod) in zip(xs, shapes):
        S = x.reshape(cod.total_size, dom.total_size)
        sims.append(Morphism(dom, cod, S, STOCHASTIC if np.allclose(S.sum(axis=0), 1.0, atol=1e-9) else "nonneg"))
    views = [tri_expression(t, role, s).as_float().matrix for role, s in zip(t.roles, sims)]
    use = list(range(t.shape[1])) if cols is None else cols
    residual = _pairwise(views, use)
    feasible = views_agree_feasible(blocks, pairs, t.shape, cols) == OPTIMAL
    name = f.name + ("[equal-middle]" if equal_middle else "")
    return ResidualReport(name, COMB_LP, residual, tuple(sims), 0, 0, feasible,
                          details={"lp_value": value})


def check_tri_witness(f: Functionality, sims: Sequence[Morphism], equal_middle: bool = False) -> float:
    t = tri_setup(f)
    cols = equal_middle_columns(t) if equal_middle else list(range(t.shape[1]))
    views = [tri_expression(t, role, s).as_float().matrix for role, s in zip(t.roles, sims)]
    return _pairwise(views, cols)
