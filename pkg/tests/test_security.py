import itertools
import json

import numpy as np
import pytest

from catsec.finstoch import identity, random_stochastic, tv_distance, wires
from catsec.grouphopf import cyclic, klein4, symmetric
from catsec.network import WiringError
from catsec.protocols import build_otp, build_dhke, dhke_then_otp
from catsec.resource import apply_protocol, identity_protocol
from catsec.security import (INSECURE, MAXIMAL, MINIMAL, PERFECT, PRODUCT, AttackSpec,
                             attack_residual, compose_protocols, correctness_residual,
                             initial_attack, initial_attack_view, post_processed_attack,
                             simulated_view, synthesize_simulator, tensor_protocols,
                             verify_transformation)

from corpus import (ATTACKS, broken_otp, mitm_dhke, plaintext_leak, random_chain_resource,
                    random_pair, random_step)

EVE_ONLY = [AttackSpec(("E",))]


def all_attacks():
    return [AttackSpec(d) for d in ATTACKS]


def test_attack_spec_validation():
    with pytest.raises(ValueError):
        AttackSpec(("E",), "honest-but-curious")
    with pytest.raises(ValueError):
        AttackSpec(("E", "E"))
    p = build_otp(cyclic(2)).protocol
    with pytest.raises(ValueError):
        initial_attack(p, AttackSpec(()))
    with pytest.raises(WiringError):
        initial_attack(p, AttackSpec(("Mallory",)))


def test_everyone_dishonest_exposes_the_source():
    p = build_otp(cyclic(3)).protocol
    view = initial_attack_view(p, AttackSpec(("A", "B", "E")))
    assert list(view.inputs) == [q.name for q in p.source.in_ports]
    assert list(view.outputs) == [q.name for q in p.source.out_ports]
    assert view.kernel.max_abs_diff(p.source.kernel) <= 1e-15


def test_otp_eve_view_and_uniform_simulator():
    p = build_otp(cyclic(2)).protocol
    view = initial_attack_view(p, AttackSpec(("E",)))
    assert view.inputs == ("m",) and view.outputs == ("mB", "c_E")
    # Bob gets m; Eve's ciphertext is uniform and independent of m
    for m in range(2):
        col = view.kernel.matrix[:, m].reshape(2, 2)
        assert np.allclose(col, np.outer(np.eye(2)[m], [0.5, 0.5]))
    res = synthesize_simulator(p, AttackSpec(("E",)))
    assert res.residual <= 1e-12
    assert np.allclose(res.simulator.matrix.ravel(), [0.5, 0.5], atol=1e-12)


def test_identity_protocol_is_simulated_by_the_dummy():
    rng = np.random.default_rng(3)
    r = random_chain_resource(0, (2, 3, 2), rng)
    p = identity_protocol(r)
    for k in range(1, 4):
        for d in itertools.combinations(("A", "B", "E"), k):
            assert attack_residual(p, d) <= 1e-9


def _leak_oracle(steps: int = 200) -> float:
    # Eve's simulator is one distribution (q, 1-q) on the ciphertext; enumerate q
    best = 1.0
    for i in range(steps + 1):
        q = i / steps
        worst = max(1 - q, 1 - (1 - q))  # column m: she must output m
        best = min(best, worst)
    return best


def test_plaintext_leak_value():
    r = verify_transformation(plaintext_leak(2), EVE_ONLY)
    assert r.correctness_residual == 0.0
    assert r.epsilon == pytest.approx(_leak_oracle(), abs=1e-9)
    assert r.verdict == INSECURE


@pytest.mark.parametrize("G", [cyclic(2), cyclic(3), cyclic(5), klein4(), symmetric(3)],
                         ids=lambda g: g.name)
def test_broken_otp_is_insecure(G):
    r = verify_transformation(broken_otp(G), EVE_ONLY)
    assert r.correctness_residual <= 1e-12
    assert r.epsilon == pytest.approx(1 - 1 / G.order, abs=1e-9)
    assert r.verdict == INSECURE


@pytest.mark.parametrize("p", [2, 3])
def test_man_in_the_middle_breaks_dhke(p):
    honest = build_dhke(cyclic(p), 1).protocol
    relayed = mitm_dhke(cyclic(p), 1)
    # an honest relay changes nothing
    assert apply_protocol(relayed).kernel.max_abs_diff(apply_protocol(honest).kernel) <= 1e-12
    eve_honest = attack_residual(honest, ("E",))
    eve_relay = attack_residual(relayed, ("E",))
    assert eve_relay > eve_honest + 0.05
    assert eve_relay >= 0.5


def test_simulator_resubstitution():
    for seed in range(20):
        p1, _, _ = random_pair(seed)
        for d in ATTACKS:
            a = AttackSpec(d)
            view = initial_attack_view(p1, a)
            res = synthesize_simulator(p1, a, view)
            assert res.simulator.flavor == "stochastic"
            again = simulated_view(p1, d, res.simulator, view)
            assert abs(tv_distance(view.kernel, again) - res.residual) <= 1e-9
            assert res.residual <= res.lp_value + 1e-9


def test_initial_attack_dominates_post_processed_attacks():
    """Any attack that post-processes the initial one is simulated at least as well."""
    rng = np.random.default_rng(99)
    for seed in range(100):
        p, _, _ = random_pair(1000 + seed)
        a = AttackSpec(ATTACKS[seed % len(ATTACKS)])
        view = initial_attack_view(p, a)
        res = synthesize_simulator(p, a, view)
        for _ in range(50):
            post = random_stochastic(view.kernel.cod, wires(int(rng.integers(1, 5))), rng)
            real = post_processed_attack(view, post)
            ideal = post_processed_attack(type(view)(res.simulated_view, view.inputs, view.outputs), post)
            assert tv_distance(real, ideal) <= res.residual + 1e-9


def test_verdicts_and_models():
    otp = build_otp(cyclic(4)).protocol
    r = verify_transformation(otp, EVE_ONLY)
    assert r.verdict == PERFECT and r.epsilon <= 1e-9
    p1, _, perfect = random_pair(1)
    assert not perfect
    r = verify_transformation(p1, all_attacks(), insecure_threshold=1.0)
    assert r.verdict == "epsilon" and r.epsilon > 1e-9
    assert r.epsilon == pytest.approx(max([r.correctness_residual] + [s.residual for _, s in r.attacks]))
    # minimal model: nobody deviates, so the residual is the correctness residual
    res = synthesize_simulator(p1, AttackSpec(("B", "E"), MINIMAL))
    assert res.residual == pytest.approx(correctness_residual(p1), abs=1e-12)
    # product simulators can only do worse than a joint one
    joint = synthesize_simulator(p1, AttackSpec(("B", "E"), MAXIMAL))
    prod = synthesize_simulator(p1, AttackSpec(("B", "E"), PRODUCT))
    assert prod.residual >= joint.residual - 1e-9
    assert not prod.exact


def test_report_json_is_deterministic():
    p1, _, _ = random_pair(5)
    a = json.dumps(verify_transformation(p1, all_attacks(), seed=5).to_json("verify", "chain"), sort_keys=True)
    b = json.dumps(verify_transformation(p1, all_attacks(), seed=5).to_json("verify", "chain"), sort_keys=True)
    assert a == b
    d = json.loads(a)
    assert set(d) == {"command", "instance", "correctness_residual", "attacks", "verdict", "epsilon",
                      "seed", "runtime_ms"}
    assert d["runtime_ms"] is None and d["seed"] == 5
    assert {tuple(x["dishonest"]) for x in d["attacks"]} == set(ATTACKS)


# ---------------------------------------------------------------- composition


def test_composition_type_errors():
    p1, p2, _ = random_pair(0)
    with pytest.raises(WiringError):
        compose_protocols(p2, p1)


def test_identity_is_a_unit_for_composition():
    p1, _, _ = random_pair(2)
    both = compose_protocols(p1, identity_protocol(p1.target))
    assert apply_protocol(both).kernel.max_abs_diff(apply_protocol(p1).kernel) <= 1e-12
    for d in ATTACKS:
        assert attack_residual(both, d) == pytest.approx(attack_residual(p1, d), abs=1e-9)


@pytest.mark.parametrize("seed", range(30))
def test_composite_epsilon_is_subadditive(seed):
    p1, p2, perfect = random_pair(seed)
    comp = compose_protocols(p1, p2)
    r1, r2, rc = (verify_transformation(x, all_attacks()) for x in (p1, p2, comp))
    assert rc.correctness_residual <= r1.correctness_residual + r2.correctness_residual + 1e-9
    for (_, s1), (_, s2), (_, sc) in zip(r1.attacks, r2.attacks, rc.attacks):
        assert sc.residual <= s1.residual + s2.residual + 1e-9
    if perfect:
        assert r1.verdict == r2.verdict == rc.verdict == PERFECT


def test_tensor_of_perfect_protocols_is_perfect():
    found = 0
    for seed in range(40):
        p1, _, perfect = random_pair(seed)
        if not perfect:
            continue
        rng = np.random.default_rng(seed)
        r = random_chain_resource(10, (2, 2, 2), rng)
        q = random_step(r, 11, rng, perfect=True)
        both = tensor_protocols(p1, q)
        assert verify_transformation(both, all_attacks()).epsilon <= 1e-9
        found += 1
        if found == 3:
            break
    assert found == 3


def test_dhke_then_otp_bound():
    G = cyclic(3)
    comp = dhke_then_otp(G, 1)
    assert [q.name for q in comp.target.ports] == ["m", "mB"]
    eps_dh = verify_transformation(build_dhke(G, 1).protocol, EVE_ONLY).epsilon
    eps_otp = verify_transformation(build_otp(G).protocol, EVE_ONLY).epsilon
    eps = verify_transformation(comp, EVE_ONLY).epsilon
    assert eps <= eps_dh + eps_otp + 1e-9


def test_identity_kernel_sanity():
    # the identity channel as a protocol target has zero correctness residual
    p = identity_protocol(random_chain_resource(0, (2, 2, 2), np.random.default_rng(0)))
    assert correctness_residual(p) == 0.0
    assert identity(2).is_deterministic()
