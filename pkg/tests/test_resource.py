import json

import numpy as np
import pytest

from catsec.finstoch import (UNIT, Morphism, ShapeError, identity, random_stochastic, uniform,
                             wires)
from catsec.network import Box, WiringError
from catsec.resource import (IN, OUT, Comb, PartiteResource, Port, Protocol, apply_protocol,
                             comb_constraints, comb_equal, identity_protocol, is_causal_comb, nest,
                             plug, plug_via_process_tensor, process_tensor, random_comb,
                             resource_from_boxes, resource_tensor, with_free)

from corpus import random_fillers


def test_one_hole_plug_matches_index_sum(rng):
    # g1 ∘ (f ⊗ id_Y) ∘ g0 written as an explicit sum over the hidden indices
    g0 = random_stochastic(wires(2), wires(3, 2), rng)   # C -> A ⊗ Y
    g1 = random_stochastic(wires(2, 2), wires(3), rng)   # B ⊗ Y -> D
    f = random_stochastic(wires(3), wires(2), rng)       # A -> B
    comb = Comb.chain([g0, g1], [(wires(3), wires(2))], [wires(2)])
    out = plug(comb, [f])
    G0 = g0.tensor_view()  # [a, y, c]
    G1 = g1.tensor_view()  # [d, b, y]
    F = f.matrix           # [b, a]
    want = np.zeros((3, 2))
    for d in range(3):
        for c in range(2):
            want[d, c] = sum(G1[d, b, y] * F[b, a] * G0[a, y, c]
                             for a in range(3) for b in range(2) for y in range(2))
    assert np.allclose(out.matrix, want, atol=1e-14)


def test_process_tensor_reproduces_plug(rng):
    for _ in range(40):
        comb = random_comb(rng, int(rng.integers(1, 4)))
        fs = random_fillers(comb, rng)
        assert plug_via_process_tensor(comb, fs).max_abs_diff(plug(comb, fs)) <= 1e-12


def test_process_tensor_is_a_causal_comb(rng):
    comb = random_comb(rng, 2, shuffle=False)
    pt = process_tensor(comb)
    # open wire names follow the comb's own naming: c, then b_j / a_j per visit, then d
    c = [f"c.{i}" for i in range(len(comb.outer[0]))]
    d = [f"d.{i}" for i in range(len(comb.outer[1]))]
    a = {j: [f"a{j}.{i}" for i in range(len(comb.slots[j][0]))] for j in range(2)}
    b = {j: [f"b{j}.{i}" for i in range(len(comb.slots[j][1]))] for j in range(2)}
    outs = a[0] + a[1] + d
    ins = c + b[0] + b[1]
    stages = [(IN, c), (OUT, a[0]), (IN, b[0]), (OUT, a[1]), (IN, b[1]), (OUT, d)]
    assert is_causal_comb(pt, outs, ins, stages)
    # an output that copies an input arriving later breaks causality
    assert is_causal_comb(identity(2), ["a"], ["b"], [(IN, ["b"]), (OUT, ["a"])])
    assert not is_causal_comb(identity(2), ["a"], ["b"], [(OUT, ["a"]), (IN, ["b"])])


def test_comb_constraints_count():
    A, b = comb_constraints(["y"], ["x"], {"x": 2, "y": 3}, [(IN, ["x"]), (OUT, ["y"])])
    assert A.shape[1] == 6 and np.allclose(b, 1.0)


def test_nest_then_plug_equals_plug_of_plugs(rng):
    for _ in range(10):
        inner_a = random_comb(rng, 1, max_size=2, max_memory=2)
        inner_b = random_comb(rng, 1, max_size=2, max_memory=2)
        g0 = random_stochastic(wires(2), inner_a.outer[0] + wires(2), rng)
        g1 = random_stochastic(inner_a.outer[1] + wires(2), inner_b.outer[0] + wires(2), rng)
        g2 = random_stochastic(inner_b.outer[1] + wires(2), wires(2), rng)
        outer = Comb.chain([g0, g1, g2], [inner_a.outer, inner_b.outer], [wires(2), wires(2)])
        fa = random_stochastic(*inner_a.slots[0], rng)
        fb = random_stochastic(*inner_b.slots[0], rng)
        flat = nest(outer, [inner_a, inner_b])
        lhs = plug(flat, [fa, fb])
        rhs = plug(outer, [plug(inner_a, [fa]), plug(inner_b, [fb])])
        assert lhs.max_abs_diff(rhs) <= 1e-12


def test_comb_equal_and_shape_errors(rng):
    c = random_comb(rng, 2)
    assert comb_equal(c, c)
    d = Comb(c.slots, c.sigma, c.pieces, c.memory, c.outer)
    assert comb_equal(c, d) and comb_equal(d, c)
    with pytest.raises(ShapeError):
        Comb.chain([identity(2)], [(wires(2), wires(2))], [wires(2)])
    with pytest.raises(ShapeError):
        plug(c, [])


# ---------------------------------------------------------------- resources

def channel(name_in="x", name_out="y", n=2, r=1):
    return PartiteResource((Port(name_in, "A", IN, n, r), Port(name_out, "B", OUT, n, r)), identity(n))


def test_resource_validation():
    with pytest.raises(ValueError):
        Port("x", "A", "sideways", 2)
    with pytest.raises(ValueError):
        Port("x", "A", IN, 2, 0)
    with pytest.raises(ShapeError):
        PartiteResource((Port("x", "A", IN, 3),), identity(2))
    with pytest.raises(ValueError):
        PartiteResource((Port("x", "A", IN, 2), Port("x", "B", OUT, 2)), identity(2))


def test_resource_json_round_trip():
    r = resource_tensor(channel(), channel("u", "v", 3, 2))
    back = PartiteResource.from_json(json.loads(json.dumps(r.to_json())))
    assert [p.name for p in back.ports] == [p.name for p in r.ports]
    assert back.kernel.max_abs_diff(r.kernel) == 0


def test_resource_causality():
    assert channel().is_causal()
    # output at round 1 that reveals a round-2 input
    ports = (Port("x", "A", IN, 2, 2), Port("y", "B", OUT, 2, 1))
    assert not PartiteResource(ports, identity(2)).is_causal()


def test_resource_from_boxes():
    ports = (Port("x", "A", IN, 2), Port("y1", "B", OUT, 2), Port("y2", "C", OUT, 2))
    r = resource_from_boxes(ports, [Box(identity(2), ["x"], ["y1"]), Box(identity(2), ["x"], ["y2"])])
    assert r.kernel.matrix[3, 1] == 1


def test_protocol_validation():
    src, tgt = channel(), channel("m", "mB")
    ok = {"A": (Box(identity(2), ["m"], ["x"]),), "B": (Box(identity(2), ["y"], ["mB"]),)}
    p = Protocol(src, tgt, ok)
    assert apply_protocol(p).kernel.max_abs_diff(identity(2)) == 0
    with pytest.raises(WiringError):   # Bob writes Alice's port
        Protocol(src, tgt, {"A": ok["A"], "B": (Box(identity(2), ["y"], ["x"]),)})
    with pytest.raises(WiringError):   # nobody writes mB
        Protocol(src, tgt, {"A": ok["A"]})
    with pytest.raises(WiringError):   # Alice reads her own input port
        Protocol(src, tgt, {"A": (Box(identity(2), ["x"], ["m"]),), "B": ok["B"]})


def test_protocol_json_round_trip():
    p = identity_protocol(channel())
    q = Protocol.from_json(json.loads(json.dumps(p.to_json())))
    assert apply_protocol(q).kernel.max_abs_diff(apply_protocol(p).kernel) == 0


def test_identity_protocol_and_free_resource():
    r = channel()
    p = identity_protocol(r)
    assert [q.name for q in p.target.ports] == ["x'", "y'"]
    assert apply_protocol(p).kernel.max_abs_diff(r.kernel) == 0
    coin = PartiteResource((Port("k", "B", OUT, 2),), uniform(2))
    pf = with_free(p, coin, {"B": (Box(Morphism(wires(2), UNIT, np.ones((1, 2))), ["k"], []),)})
    assert pf.free == ("k",)
    assert apply_protocol(pf).kernel.max_abs_diff(r.kernel) == 0
