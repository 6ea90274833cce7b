"""Command-line front end.

Exit codes: 0 when the verdict is the one the instance is expected to have,
1 when it is not, 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .finstoch import uniform
from .grouphopf import (FiniteGroup, GroupError, check_hopf, group_generators,
                        multiplicative_mod, parse_group)
from .nogo import (BIPARTITE, METHODS, TRIPARTITE, NogoError, SearchCfg, build_instance,
                   splittability_residual, tripartite_residual)
from .protocols import EVE, build_dhke, build_otp, ddh_tv_advantage, ddh_tv_advantage_exact
from .security import PERFECT, AttackSpec, verify_transformation

DEFAULT_TOL = 1e-9

# instances whose expected verdict is "cannot be split" / "cannot be broadcast"
_EXPECT_NOGO = {"bit_commitment", "oblivious_transfer", "broadcast"}


class UsageError(Exception):
    pass


def _num(x: float) -> float:
    return float(f"{x:.12g}") if abs(x) > 1e-15 else 0.0


def _write_json(path: str | None, payload: dict):
    if path:
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def _group_from_args(args) -> FiniteGroup:
    if args.group and args.prime is not None:
        raise UsageError("give either --group or --prime, not both")
    if args.prime is not None:
        return multiplicative_mod(args.prime)
    if not args.group:
        raise UsageError("a group is required (--group S or --prime P)")
    return parse_group(args.group)


def _generator(args, G: FiniteGroup) -> int:
    if args.generator is None:
        gens = [g for g in range(G.order) if G.generates(g)]
        if not gens:
            raise UsageError(f"{G.name} is not cyclic")
        return gens[0]
    if args.prime is not None:
        # residues are written as themselves; element i stands for residue i + 1
        if not 1 <= args.generator < args.prime:
            raise UsageError(f"generator must be a residue in 1..{args.prime - 1}")
        return args.generator - 1
    if not 0 <= args.generator < G.order:
        raise UsageError(f"generator index must lie in 0..{G.order - 1}")
    return args.generator


# --------------------------------------------------------------------------
# subcommands


def _load_table(spec: str):
    """A group spec, or a JSON table that may fail the group axioms."""
    path = Path(spec)
    if not path.is_file():
        return group_generators(parse_group(spec)), spec
    data = json.loads(path.read_text(encoding="utf-8"))
    table = data["cayley"] if isinstance(data, dict) else data
    opts = data if isinstance(data, dict) else {}
    try:
        G = FiniteGroup.from_table(table, spec)
    except GroupError:
        n = len(table)
        if n < 1 or any(len(row) != n or any(not 0 <= v < n for v in row) for row in table):
            raise
        G = FiniteGroup.unchecked(table, int(opts.get("unit", 0)), opts.get("inverse"), spec)
    gens = group_generators(G)
    if "integral" in opts:
        w = np.asarray(opts["integral"], dtype=float).reshape(G.order, 1)
        gens = replace(gens, integral=replace(uniform(G.order), matrix=w))
    return gens, spec


def cmd_check_hopf(args) -> int:
    gens, name = _load_table(args.group)
    rep = check_hopf(gens, args.tol)
    for eq, r in rep.residuals.items():
        print(f"{eq}: residual {_num(r):.3g} {'ok' if rep.passed[eq] else 'FAIL'}")
    print(f"{name}: {'Hopf algebra with integral' if rep.ok else 'fails ' + ', '.join(rep.failing())}")
    _write_json(args.json, {"command": "check-hopf", "instance": name, "tol": args.tol,
                            "residuals": {k: _num(v) for k, v in rep.residuals.items()},
                            "failing": rep.failing(), "ok": rep.ok})
    return 0 if rep.ok else 1


def cmd_verify(args) -> int:
    G = _group_from_args(args)
    if args.protocol == "otp":
        proto = build_otp(G).protocol
        rep = verify_transformation(proto, [AttackSpec((EVE,))], tol=args.tol, seed=args.seed)
        ok = rep.verdict == PERFECT
        extra = {}
    else:
        g = _generator(args, G)
        proto = build_dhke(G, g).protocol
        rep = verify_transformation(proto, [AttackSpec((EVE,))], tol=args.tol, seed=args.seed)
        adv = ddh_tv_advantage(G, g)
        eve = rep.attacks[0][1].residual
        ok = abs(eve - adv) <= args.tol
        extra = {"generator": g, "ddh_advantage": _num(adv), "eve_matches_ddh": ok}
    print(f"{proto.name}: correctness residual {_num(rep.correctness_residual):.6g}")
    for a, s in rep.attacks:
        print(f"  attack by {'+'.join(a.dishonest)}: epsilon {_num(s.residual):.6g}")
    if extra:
        print(f"  DDH advantage {extra['ddh_advantage']:.6g} ({'matches' if ok else 'DIFFERS'})")
    print(f"verdict: {rep.verdict} (epsilon {_num(rep.epsilon):.6g})")
    payload = rep.to_json(f"verify {args.protocol}", proto.name)
    payload.update(extra)
    payload["tol"] = args.tol
    _write_json(args.json, payload)
    return 0 if ok else 1


def cmd_ddh(args) -> int:
    G = _group_from_args(args)
    g = _generator(args, G)
    exact = ddh_tv_advantage_exact(G, g)
    print(f"{G.name}, generator index {g}: DDH advantage {exact} = {float(exact):.12g}")
    _write_json(args.json, {"command": "ddh", "instance": G.name, "generator": g,
                            "advantage": _num(float(exact)), "advantage_exact": str(exact)})
    return 0


def cmd_eval(args) -> int:
    from .diagram import evaluate, load_environment, parse, typecheck

    env = load_environment(args.env)
    term = typecheck(parse(Path(args.file).read_text(encoding="utf-8")), env)
    m = evaluate(term, env)
    print(f"{args.file}: {m.dom!r} -> {m.cod!r}")
    with np.printoptions(precision=6, suppress=True):
        print(m.matrix)
    _write_json(args.json, {"command": "eval", "instance": args.file, "dom": list(m.dom.sizes),
                            "cod": list(m.cod.sizes),
                            "matrix": [[_num(v) for v in row] for row in m.matrix.tolist()]})
    return 0


def cmd_nogo(args) -> int:
    f = build_instance(args.instance)
    if args.kind == "split":
        if args.instance not in BIPARTITE:
            raise UsageError(f"split instances: {', '.join(BIPARTITE)}")
        rep = splittability_residual(f, SearchCfg(args.method, args.restarts, args.seed))
        nogo = rep.min_residual > args.tol
    else:
        if args.instance not in TRIPARTITE:
            raise UsageError(f"tripartite instances: {', '.join(TRIPARTITE)}")
        rep = tripartite_residual(f)
        nogo = not rep.exact_feasible
    rep.seed = args.seed
    expected = args.instance in _EXPECT_NOGO
    print(f"{rep.instance} [{rep.method}]: min residual {_num(rep.min_residual):.6g}")
    print(f"verdict: {'impossible' if nogo else 'feasible'} "
          f"(expected {'impossible' if expected else 'feasible'})")
    payload = {"command": f"nogo {args.kind}", "tol": args.tol, **rep.to_json()}
    _write_json(args.json, payload)
    return 0 if nogo == expected else 1


# --------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common(p: argparse.ArgumentParser):
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="numerical tolerance (default 1e-9)")
    p.add_argument("--json", metavar="F", help="write the full report as JSON to F")
    p.add_argument("--seed", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="catsec", description="Composable security checks over finite stochastic maps.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check-hopf", help="check the Hopf-algebra laws for a Cayley table")
    p.add_argument("--group", required=True, help="cyclic:n, klein4, sym:k or a JSON table")
    _common(p)
    p.set_defaults(fn=cmd_check_hopf)

    p = sub.add_parser("verify", help="verify a protocol against an eavesdropper")
    p.add_argument("protocol", choices=("otp", "dhke"))
    p.add_argument("--group")
    p.add_argument("--prime", type=int, help="use the unit group of Z_P")
    p.add_argument("--generator", type=int, help="residue (with --prime) or element index")
    _common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("ddh", help="exact decisional Diffie-Hellman advantage")
    p.add_argument("--group")
    p.add_argument("--prime", type=int)
    p.add_argument("--generator", type=int)
    _common(p)
    p.set_defaults(fn=cmd_ddh)

    p = sub.add_parser("eval", help="evaluate a diagram file")
    p.add_argument("--env", required=True, help="environment JSON")
    p.add_argument("file", help=".csd diagram file")
    _common(p)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("nogo", help="no-go residuals for two- and three-party functionalities")
    p.add_argument("kind", choices=("split", "tripartite"))
    p.add_argument("--instance", required=True)
    p.add_argument("--method", choices=METHODS, default="auto")
    p.add_argument("--restarts", type=int, default=4)
    _common(p)
    p.set_defaults(fn=cmd_nogo)
    return ap


def run(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.tol < 0:
            raise UsageError("--tol must be nonnegative")
        return args.fn(args)
    except UsageError as exc:
        print(f"catsec: error: {exc}", file=sys.stderr)
        return 2
    except (GroupError, NogoError, ValueError, KeyError, OSError) as exc:
        print(f"catsec: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
