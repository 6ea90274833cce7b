"""A small textual language for string diagrams over finite stochastic maps."""

from .ast import GENERATORS, Gen, ObjInt, ObjName, Par, Program, Ref, Seq, Span, gen
from .env import (DiagramEnvError, Environment, ObjDef, env_for_group, environment_from_dict,
                  load_environment)
from .parser import DiagramSyntaxError, parse, parse_expr, tokenize
from .printer import pretty
from .semantics import (DiagramTypeError, InterfaceMismatch, TypedDiagram, TypedNode, evaluate,
                        typecheck)

eval_diagram = evaluate

__all__ = [
    "GENERATORS", "Gen", "ObjInt", "ObjName", "Par", "Program", "Ref", "Seq", "Span", "gen",
    "DiagramEnvError", "Environment", "ObjDef", "env_for_group", "environment_from_dict",
    "load_environment", "DiagramSyntaxError", "parse", "parse_expr", "tokenize", "pretty",
    "DiagramTypeError", "InterfaceMismatch", "TypedDiagram", "TypedNode", "evaluate",
    "eval_diagram", "typecheck",
]
