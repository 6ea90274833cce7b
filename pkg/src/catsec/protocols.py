"""The one-time pad and Diffie-Hellman key exchange as concrete protocols.

Port naming used throughout:

* OTP source: shared key ``kA``, ``kB`` (round 1) and an authenticated
  broadcast from Alice, input ``c`` and copies ``cB``, ``cE`` (round 2).
* OTP target: secure channel ``m`` -> ``mB`` (round 2).  Eve has no ports.
* DHKE source: broadcasts ``xA`` -> ``xA_B``, ``xA_E`` and ``xB`` -> ``xB_A``,
  ``xB_E`` (round 1).
* DHKE target: shared key ``kA``, ``kB`` (round 1).

The DHKE target ports deliberately reuse the OTP key port names so the two
protocols compose.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .finstoch import compose, copy, discard, deterministic, identity, tensor, uniform
from .grouphopf import (ActionGens, FiniteGroup, GroupError, GroupGens, action_generators,
                        group_generators)
from .network import Box
from .resource import IN, OUT, PartiteResource, Port, Protocol

ALICE, BOB, EVE = "A", "B", "E"
PARTIES = (ALICE, BOB, EVE)


def shared_key(G: FiniteGroup, names=("kA", "kB"), round_: int = 1, exact: bool = False) -> PartiteResource:
    n = G.order
    kernel = compose(copy(n, exact=exact), uniform(n, exact=exact))
    ports = (Port(names[0], ALICE, OUT, n, round_), Port(names[1], BOB, OUT, n, round_))
    return PartiteResource(ports, kernel, PARTIES)


def broadcast(size: int, sender: str, receivers: Sequence[str], name: str, round_: int = 1,
              exact: bool = False) -> PartiteResource:
    """``sender`` inputs a value on ``name``; each receiver ``r`` gets it on ``name_r``."""
    kernel = deterministic([size], [size] * len(receivers), lambda x: x * len(receivers), exact=exact)
    ports = (Port(name, sender, IN, size, round_),) + tuple(
        Port(f"{name}_{r}", r, OUT, size, round_) for r in receivers)
    return PartiteResource(ports, kernel, PARTIES)


def secure_channel(size: int, names=("m", "mB"), round_: int = 2, exact: bool = False) -> PartiteResource:
    ports = (Port(names[0], ALICE, IN, size, round_), Port(names[1], BOB, OUT, size, round_))
    return PartiteResource(ports, identity(size, exact=exact), PARTIES)


# --------------------------------------------------------------------------
# one-time pad


@dataclass(frozen=True, eq=False)
class OtpInstance:
    group: FiniteGroup
    gens: GroupGens
    protocol: Protocol


def otp_channel(G: FiniteGroup, exact: bool = False) -> PartiteResource:
    """Alice's authenticated broadcast to Bob and Eve: ports ``c``, ``c_B``, ``c_E``."""
    return broadcast(G.order, ALICE, (BOB, EVE), "c", round_=2, exact=exact)


def otp_pieces(gens: GroupGens) -> dict[str, tuple[Box, ...]]:
    X = gens.carrier
    dec = compose(gens.mult, tensor(identity(X), gens.inv))
    return {
        ALICE: (Box(gens.mult, ["m", "kA"], ["c"], "encrypt"),),
        BOB: (Box(dec, ["c_B", "kB"], ["mB"], "decrypt"),),
        EVE: (Box(gens.delete, ["c_E"], [], "ignore"),),
    }


def build_otp(G: FiniteGroup, exact: bool = False) -> OtpInstance:
    from .resource import resource_tensor

    gens = group_generators(G, exact=exact)
    source = resource_tensor(shared_key(G, exact=exact), otp_channel(G, exact=exact))
    target = secure_channel(G.order, exact=exact)
    return OtpInstance(G, gens, Protocol(source, target, otp_pieces(gens), name=f"otp[{G.name}]"))


def build_otp_free_key(G: FiniteGroup) -> Protocol:
    """The OTP with its key declared a free resource appended to the channel."""
    from .resource import resource_tensor

    source = resource_tensor(otp_channel(G), shared_key(G))
    return Protocol(source, secure_channel(G.order), otp_pieces(group_generators(G)),
                    free=("kA", "kB"), name=f"otp-free[{G.name}]")


# --------------------------------------------------------------------------
# Diffie-Hellman


@dataclass(frozen=True, eq=False)
class DhkeInstance:
    group: FiniteGroup
    generator: int
    gens: GroupGens
    action: ActionGens
    protocol: Protocol


def dhke_source(G: FiniteGroup, exact: bool = False) -> PartiteResource:
    from .resource import resource_tensor

    return resource_tensor(broadcast(G.order, ALICE, (BOB, EVE), "xA", exact=exact),
                           broadcast(G.order, BOB, (ALICE, EVE), "xB", exact=exact))


def build_dhke(G: FiniteGroup, g_index: int, exact: bool = False) -> DhkeInstance:
    gens = group_generators(G, exact=exact)
    act = action_generators(G.order, G, g_index, exact=exact)
    # a |-> g^a
    power_of_g = compose(act.act, tensor(identity(act.modulus, exact=exact), act.gen_point))
    pieces = {
        ALICE: (Box(act.exp_rand, [], ["A.a"], "sample a"),
                Box(power_of_g, ["A.a"], ["xA"], "g^a"),
                Box(act.act, ["A.a", "xB_A"], ["kA"], "(g^b)^a")),
        BOB: (Box(act.exp_rand, [], ["B.b"], "sample b"),
              Box(power_of_g, ["B.b"], ["xB"], "g^b"),
              Box(act.act, ["B.b", "xA_B"], ["kB"], "(g^a)^b")),
        EVE: (Box(discard([G.order, G.order], exact=exact), ["xA_E", "xB_E"], [], "ignore"),),
    }
    protocol = Protocol(dhke_source(G, exact=exact), shared_key(G, exact=exact), pieces,
                        name=f"dhke[{G.name},g={g_index}]")
    return DhkeInstance(G, g_index, gens, act, protocol)


def ddh_distributions(G: FiniteGroup, g_index: int):
    """Exact joint laws of ``(g^a, g^b, g^ab)`` and ``(g^a, g^b, g^c)`` as dicts of Fractions."""
    if not G.generates(g_index):
        raise GroupError(f"element {g_index} does not generate {G.name or 'the group'}")
    n = G.order
    pw = [G.power(g_index, a) for a in range(n)]
    real: dict[tuple, Fraction] = {}
    rand: dict[tuple, Fraction] = {}
    for a in range(n):
        for b in range(n):
            key = (pw[a], pw[b], pw[(a * b) % n])
            real[key] = real.get(key, Fraction(0)) + Fraction(1, n * n)
            for c in range(n):
                key = (pw[a], pw[b], pw[c])
                rand[key] = rand.get(key, Fraction(0)) + Fraction(1, n ** 3)
    return real, rand


def ddh_tv_advantage_exact(G: FiniteGroup, g_index: int) -> Fraction:
    real, rand = ddh_distributions(G, g_index)
    keys = set(real) | set(rand)
    return sum((abs(real.get(k, Fraction(0)) - rand.get(k, Fraction(0))) for k in keys), Fraction(0)) / 2


def ddh_tv_advantage(G: FiniteGroup, g_index: int) -> float:
    """Total-variation distance between the DDH triple and its random counterpart."""
    return float(ddh_tv_advantage_exact(G, g_index))


# --------------------------------------------------------------------------
# composite


def dhke_then_otp(G: FiniteGroup, g_index: int) -> Protocol:
    """Use the DHKE key for the OTP; the OTP channel is passed through unchanged."""
    from .resource import identity_protocol
    from .security import compose_protocols, tensor_protocols

    dh = build_dhke(G, g_index).protocol
    otp = build_otp(G).protocol
    chan = otp_channel(G)
    fwd = identity_protocol(chan.relabel({q.name: q.name + "0" for q in chan.ports}),
                            {q.name + "0": q.name for q in chan.ports})
    return compose_protocols(tensor_protocols(dh, fwd), otp)
