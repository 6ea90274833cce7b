"""Attacks, simulators and security reports.

Security is checked against *initial* attacks only: dishonest parties do
nothing and hand their source ports to the environment.  Any other attack
in the malicious-subset model factors through this one by post-processing,
so a simulator for the initial attack covers every attack.

For a dishonest set ``D`` the real view is the protocol with ``D``'s boxes
removed.  The ideal view is the target with a simulator sitting on ``D``'s
target ports, facing the environment through ``D``'s source ports.  The
simulator is a causal comb and is found by linear programming.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

from .finstoch import DEFAULT_EPS, Morphism, WireList, compose, tensor, tv_distance
from .lpsolve import fit_tv
from .network import Box, WiringError, contract, linear_in_box
from .resource import (IN, OUT, Port, Protocol, apply_protocol, comb_constraints,
                       resource_tensor)

MAXIMAL = "maximal-collusion"
MINIMAL = "minimal"
PRODUCT = "product"

PERFECT = "perfect"
EPSILON = "epsilon"
INSECURE = "insecure"

DEFAULT_INSECURE_THRESHOLD = 0.1


@dataclass(frozen=True)
class AttackSpec:
    """Which parties are dishonest and how they may cooperate.

    ``maximal-collusion`` gives the dishonest parties one joint simulator;
    ``product`` forces a tensor product of per-party simulators;
    ``minimal`` lets nobody deviate, so only correctness is measured.
    """

    dishonest: tuple[str, ...]
    model_kind: str = MAXIMAL

    def __post_init__(self):
        object.__setattr__(self, "dishonest", tuple(self.dishonest))
        if self.model_kind not in (MAXIMAL, MINIMAL, PRODUCT):
            raise ValueError(f"unknown attack model {self.model_kind!r}")
        if len(set(self.dishonest)) != len(self.dishonest):
            raise ValueError("dishonest parties listed twice")


@dataclass(frozen=True, eq=False)
class AttackedView:
    kernel: Morphism
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]


@dataclass(frozen=True, eq=False)
class SimulatorResult:
    simulator: Morphism | None
    residual: float
    attacked_view: Morphism
    simulated_view: Morphism
    lp_value: float = float("nan")
    exact: bool = True

    def found(self, tol: float = DEFAULT_EPS) -> bool:
        return self.residual <= tol


@dataclass
class SecurityReport:
    correctness_residual: float
    attacks: list[tuple[AttackSpec, SimulatorResult]]
    verdict: str
    epsilon: float
    tol: float = DEFAULT_EPS
    seed: int | None = None
    runtime_ms: float = 0.0

    def to_json(self, command: str = "", instance: str = "", timing: bool = False) -> dict:
        return {
            "command": command,
            "instance": instance,
            "correctness_residual": _r(self.correctness_residual),
            "attacks": [{"dishonest": list(a.dishonest), "model": a.model_kind,
                         "epsilon": _r(s.residual), "simulator_found": s.found(self.tol)}
                        for a, s in self.attacks],
            "verdict": self.verdict,
            "epsilon": _r(self.epsilon),
            "seed": self.seed,
            "runtime_ms": round(self.runtime_ms, 3) if timing else None,
        }


def _r(x: float) -> float:
    # clear float noise so reports are stable across platforms
    return float(f"{x:.12g}") if abs(x) > 1e-15 else 0.0


def _check_parties(p: Protocol, a: AttackSpec):
    if not a.dishonest:
        raise ValueError("an attack needs at least one dishonest party")
    unknown = set(a.dishonest) - set(p.parties)
    if unknown:
        raise WiringError(f"unknown parties {sorted(unknown)}")


def attack_interface(p: Protocol, dishonest: Sequence[str]):
    """Open input and output wire names of the attacked view."""
    d = set(dishonest)
    ins = [q.name for q in p.target.in_ports if q.party not in d] + \
          [q.name for q in p.source.in_ports if q.party in d]
    outs = [q.name for q in p.target.out_ports if q.party not in d] + \
           [q.name for q in p.source.out_ports if q.party in d]
    return ins, outs


def initial_attack(p: Protocol, a: AttackSpec) -> Morphism:
    """The real view when the dishonest parties expose their source ports."""
    return initial_attack_view(p, a).kernel


def initial_attack_view(p: Protocol, a: AttackSpec) -> AttackedView:
    _check_parties(p, a)
    honest = [x for x in p.parties if x not in a.dishonest]
    ins, outs = attack_interface(p, a.dishonest)
    boxes = [p.source.as_box("source")] + p.boxes(honest)
    sizes = p.source.sizes()
    sizes.update(p.target.sizes())
    kernel = contract(boxes, ins, outs, sizes=sizes)
    return AttackedView(kernel, tuple(ins), tuple(outs))


def simulator_layout(p: Protocol, dishonest: Sequence[str]):
    """Wires of the simulator and the temporal order it must respect.

    Within round ``r`` the simulator first receives the environment's
    round-``r`` source inputs, then feeds the target, reads the target's
    round-``r`` outputs and finally answers the environment.
    """
    d = set(dishonest)
    src_in = [q for q in p.source.in_ports if q.party in d]
    src_out = [q for q in p.source.out_ports if q.party in d]
    tgt_in = [q for q in p.target.in_ports if q.party in d]
    tgt_out = [q for q in p.target.out_ports if q.party in d]
    var_in = [q.name for q in src_in + tgt_out]
    var_out = [q.name for q in tgt_in + src_out]
    rounds = sorted({q.round for q in src_in + src_out + tgt_in + tgt_out})
    stages = []
    for r in rounds:
        for kind, group in ((IN, src_in), (OUT, tgt_in), (IN, tgt_out), (OUT, src_out)):
            names = [q.name for q in group if q.round == r]
            if names:
                stages.append((kind, names))
    return var_in, var_out, stages


def synthesize_simulator(p: Protocol, a: AttackSpec, attacked: AttackedView | None = None) -> SimulatorResult:
    """Best causal simulator for the initial attack, found by LP."""
    _check_parties(p, a)
    if attacked is None:
        attacked = initial_attack_view(p, a)
    if a.model_kind == MINIMAL:
        return _minimal_result(p, a, attacked)
    if a.model_kind == PRODUCT and len(a.dishonest) > 1:
        return _product_result(p, a, attacked)

    target = p.target
    var_in, var_out, stages = simulator_layout(p, a.dishonest)
    sizes = p.source.sizes()
    sizes.update(target.sizes())
    ins, outs = list(attacked.inputs), list(attacked.outputs)
    M = linear_in_box([target.as_box("target")], var_in, var_out, ins, outs, sizes)
    A, b = comb_constraints(var_out, var_in, sizes, stages)
    dom = WireList(tuple(sizes[w] for w in var_in))
    cod = WireList(tuple(sizes[w] for w in var_out))
    fit = fit_tv(M, attacked.kernel, (dom, cod), constraints=(A, b), normalized=True)
    sim = fit.simulator
    simulated = simulated_view(p, a.dishonest, sim, attacked)
    residual = tv_distance(attacked.kernel, simulated)
    return SimulatorResult(sim, residual, attacked.kernel, simulated, fit.lp_value)


def simulated_view(p: Protocol, dishonest: Sequence[str], sim: Morphism,
                   attacked: AttackedView) -> Morphism:
    var_in, var_out, _ = simulator_layout(p, dishonest)
    boxes = [p.target.as_box("target"), Box(sim, var_in, var_out, "simulator")]
    sizes = p.source.sizes()
    sizes.update(p.target.sizes())
    return contract(boxes, attacked.inputs, attacked.outputs, sizes=sizes)


def _minimal_result(p: Protocol, a: AttackSpec, attacked: AttackedView) -> SimulatorResult:
    # nobody deviates: compare the honest run with the target
    real = apply_protocol(p).kernel
    return SimulatorResult(None, tv_distance(real, p.target.kernel), real, p.target.kernel)


def _product_result(p: Protocol, a: AttackSpec, attacked: AttackedView) -> SimulatorResult:
    """Per-party simulators tensored together; an upper bound on the joint optimum."""
    boxes = [p.target.as_box("target")]
    sims = []
    for party in a.dishonest:
        single = synthesize_simulator(p, AttackSpec((party,), MAXIMAL))
        var_in, var_out, _ = simulator_layout(p, [party])
        boxes.append(Box(single.simulator, var_in, var_out, f"sim {party}"))
        sims.append(single.simulator)
    sizes = p.source.sizes()
    sizes.update(p.target.sizes())
    simulated = contract(boxes, attacked.inputs, attacked.outputs, sizes=sizes)
    joint = sims[0]
    for s in sims[1:]:
        joint = tensor(joint, s)
    return SimulatorResult(joint, tv_distance(attacked.kernel, simulated), attacked.kernel, simulated,
                           exact=False)


def correctness_residual(p: Protocol) -> float:
    return tv_distance(apply_protocol(p).kernel, p.target.kernel)


def verify_transformation(p: Protocol, attacks: Sequence[AttackSpec], tol: float = DEFAULT_EPS,
                          insecure_threshold: float = DEFAULT_INSECURE_THRESHOLD,
                          seed: int | None = None) -> SecurityReport:
    start = time.perf_counter()
    corr = correctness_residual(p)
    results = [(a, synthesize_simulator(p, a)) for a in attacks]
    eps = max([corr] + [s.residual for _, s in results])
    if eps <= tol:
        verdict = PERFECT
    elif eps > insecure_threshold:
        verdict = INSECURE
    else:
        verdict = EPSILON
    return SecurityReport(corr, results, verdict, eps, tol, seed, (time.perf_counter() - start) * 1e3)


def attack_residual(p: Protocol, dishonest: Sequence[str]) -> float:
    return synthesize_simulator(p, AttackSpec(tuple(dishonest))).residual


# --------------------------------------------------------------------------
# composition


def _namespace_private(p: Protocol, prefix: str, keep: set[str]) -> dict[str, tuple[Box, ...]]:
    pieces = {}
    for party, boxes in p.pieces.items():
        new = []
        for b in boxes:
            mapping = {w: f"{prefix}{w}" for w in b.inputs + b.outputs if w not in keep}
            new.append(b.renamed(mapping))
        pieces[party] = tuple(new)
    return pieces


def _port_key(q: Port):
    return (q.name, q.party, q.dir, q.size, q.round)


def compose_protocols(p1: Protocol, p2: Protocol) -> Protocol:
    """Run ``p1`` and then ``p2`` on its output; ``p1.target`` must be ``p2.source``."""
    if sorted(map(_port_key, p1.target.ports)) != sorted(map(_port_key, p2.source.ports)):
        raise WiringError("first protocol's target does not match second protocol's source")
    clash = {q.name for q in p1.source.ports} & {q.name for q in p2.target.ports}
    if clash:
        raise WiringError(f"outer port names clash: {sorted(clash)}")
    mid = {q.name for q in p1.target.ports}
    ports1 = {q.name for q in p1.source.ports} | mid
    ports2 = {q.name for q in p2.target.ports} | mid
    a = _namespace_private(p1, "1/", ports1)
    b = _namespace_private(p2, "2/", ports2)
    pieces = {party: a.get(party, ()) + b.get(party, ()) for party in dict.fromkeys(list(a) + list(b))}
    return Protocol(p1.source, p2.target, pieces, p1.free,
                    name=f"({p1.name};{p2.name})" if p1.name or p2.name else "")


def tensor_protocols(p1: Protocol, p2: Protocol) -> Protocol:
    a = _namespace_private(p1, "L/", {q.name for q in p1.source.ports + p1.target.ports})
    b = _namespace_private(p2, "R/", {q.name for q in p2.source.ports + p2.target.ports})
    pieces = {party: a.get(party, ()) + b.get(party, ()) for party in dict.fromkeys(list(a) + list(b))}
    return Protocol(resource_tensor(p1.source, p2.source), resource_tensor(p1.target, p2.target),
                    pieces, p1.free + p2.free,
                    name=f"({p1.name}*{p2.name})" if p1.name or p2.name else "")


def post_processed_attack(view: AttackedView, post: Morphism) -> Morphism:
    """An arbitrary attack factored through the initial one: post-process the exposed outputs.

    ``post`` acts on the full codomain of the view.
    """

    return compose(post, view.kernel)
