"""Evaluation environments: named objects (optionally groups) and named morphisms."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np

from ..finstoch import FinSet, Morphism, WireList
from ..grouphopf import FiniteGroup


class DiagramEnvError(ValueError):
    pass


@dataclass(frozen=True)
class ObjDef:
    finset: FinSet
    group: FiniteGroup | None = None


@dataclass(frozen=True, eq=False)
class Environment:
    objects: Mapping[str, ObjDef] = field(default_factory=dict)
    morphisms: Mapping[str, Morphism] = field(default_factory=dict)

    def __post_init__(self):
        clash = set(self.objects) & set(self.morphisms)
        if clash:
            raise DiagramEnvError(f"names bound as both object and morphism: {sorted(clash)}")
        for name, od in self.objects.items():
            if od.group is not None and od.group.order != od.finset.size:
                raise DiagramEnvError(f"object {name}: group order {od.group.order} != size {od.finset.size}")

    def with_morphism(self, name: str, m: Morphism) -> "Environment":
        if name in self.objects or name in self.morphisms:
            raise DiagramEnvError(f"name {name!r} is already bound")
        return Environment(self.objects, {**self.morphisms, name: m})


def env_for_group(G: FiniteGroup, name: str = "G", **extra_objects: int) -> Environment:
    """An environment binding ``name`` to ``G`` plus plain objects given by size."""
    objs = {name: ObjDef(G.carrier, G)}
    objs.update({k: ObjDef(FinSet(v)) for k, v in extra_objects.items()})
    return Environment(objs, {})


def _wirelist(spec, objects: Mapping[str, ObjDef], where: str) -> WireList:
    # one-element sets are the tensor unit, as in diagram terms
    out = []
    for s in spec:
        if isinstance(s, str):
            if s not in objects:
                raise DiagramEnvError(f"{where}: unknown object {s!r}")
            if objects[s].finset.size > 1:
                out.append(objects[s].finset)
        elif isinstance(s, int) and s >= 1:
            if s > 1:
                out.append(FinSet(s))
        else:
            raise DiagramEnvError(f"{where}: bad wire {s!r}")
    return WireList(tuple(out))


def environment_from_dict(data: Mapping) -> Environment:
    objects: dict[str, ObjDef] = {}
    for name, od in (data.get("objects") or {}).items():
        size = od.get("size")
        if not isinstance(size, int) or size < 1:
            raise DiagramEnvError(f"object {name}: size must be a positive integer")
        group = None
        if od.get("group") is not None:
            group = FiniteGroup.from_table(od["group"], name)
        objects[name] = ObjDef(FinSet(size), group)
    morphisms: dict[str, Morphism] = {}
    for name, md in (data.get("morphisms") or {}).items():
        dom = _wirelist(md.get("dom", []), objects, f"morphism {name}")
        cod = _wirelist(md.get("cod", []), objects, f"morphism {name}")
        mat = np.asarray(md["matrix"], dtype=float).reshape(cod.total_size, dom.total_size)
        morphisms[name] = Morphism(dom, cod, mat)
    return Environment(objects, morphisms)


def load_environment(path) -> Environment:
    return environment_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
