"""Shared corpora and independent oracles for the test suite."""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest

from catsec.grouphopf import FiniteGroup, cyclic, klein4, product_group, symmetric


def group_corpus(max_order: int = 16) -> list[FiniteGroup]:
    """Cyclic groups, Klein four, S3 and a few small direct products."""
    gs = [cyclic(n) for n in range(1, max_order + 1)]
    gs += [klein4(), symmetric(3), product_group(cyclic(2), cyclic(4)),
           product_group(klein4(), cyclic(2)), product_group(cyclic(2), symmetric(3)),
           product_group(klein4(), klein4()), product_group(cyclic(4), cyclic(4))]
    return [g for g in gs if g.order <= max_order]


# non-group tables and the equations each is predicted to break
NON_GROUPS = {
    # Z2 written with unit 1, but declared with unit 0
    "wrong_unit": ([[1, 0], [0, 1]], 0, None, {"E1"}),
    # commutative idempotent quasigroup of order 3: not associative, no unit
    "non_associative": ([[0, 2, 1], [2, 1, 0], [1, 0, 2]], 0, None, {"E1"}),
    # a monoid without inverses: {0, 1} under max, unit 0
    "max_monoid": ([[0, 1], [1, 1]], 0, None, {"E4", "E5"}),
}


def matmul_oracle(a, b):
    """Triple loop, no numpy linear algebra."""
    n, k = len(a), len(a[0])
    m = len(b[0])
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)] for i in range(n)]


def kron_oracle(a, b):
    """Four loops: big-endian Kronecker product."""
    ra, ca, rb, cb = len(a), len(a[0]), len(b), len(b[0])
    out = [[0.0] * (ca * cb) for _ in range(ra * rb)]
    for i in range(ra):
        for j in range(ca):
            for k in range(rb):
                for l in range(cb):
                    out[i * rb + k][j * cb + l] = a[i][j] * b[k][l]
    return out


def brute_force_lp(c, A, b, tol=1e-9):
    """Minimise c·x over {Ax = b, x >= 0} by enumerating basic feasible solutions.

    Returns ("optimal", value), ("infeasible", None) or ("unbounded", None).
    Unboundedness is detected by checking extreme rays of the recession cone.
    """
    c, A, b = np.asarray(c, float), np.asarray(A, float), np.asarray(b, float)
    m, n = A.shape
    rank = np.linalg.matrix_rank(A) if m and np.any(A) else 0
    best = None
    if rank == 0 and np.any(np.abs(b) > 1e-9):
        return "infeasible", None
    for cols in itertools.combinations(range(n), rank):
        B = A[:, cols]
        if rank and np.linalg.matrix_rank(B) < rank:
            continue
        xb, *_ = np.linalg.lstsq(B, b, rcond=None)
        if np.max(np.abs(B @ xb - b), initial=0.0) > 1e-7 or np.min(xb, initial=0.0) < -tol:
            continue
        x = np.zeros(n)
        x[list(cols)] = xb
        v = float(c @ x)
        best = v if best is None else min(best, v)
    if best is None:
        return "infeasible", None
    # extreme rays: directions d >= 0, Ad = 0, sum d = 1 with c·d < 0
    Ar = np.vstack([A, np.ones((1, n))]) if m else np.ones((1, n))
    br = np.concatenate([np.zeros(m), [1.0]])
    rr = np.linalg.matrix_rank(Ar)
    for cols in itertools.combinations(range(n), rr):
        B = Ar[:, cols]
        if np.linalg.matrix_rank(B) < rr:
            continue
        db, *_ = np.linalg.lstsq(B, br, rcond=None)
        if np.max(np.abs(B @ db - br)) > 1e-7 or np.min(db) < -tol:
            continue
        d = np.zeros(n)
        d[list(cols)] = db
        if c @ d < -1e-9:
            return "unbounded", None
    return "optimal", best


def fractions_equal(a, b) -> bool:
    return all(Fraction(x) == Fraction(y) for x, y in zip(np.ravel(a), np.ravel(b)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
